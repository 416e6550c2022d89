"""Independent cross-checks: finite differences, the classical image system,
and the chart-change pushforward test.

These deliberately avoid the code paths they certify: the image-system
velocity is built from first principles (two image vortices), not from the
Green's function, and the pushforward check sandwiches the momentum-chart
structure through the shift Jacobian instead of reusing the closed-form
velocity-chart matrix.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.typing import NDArray

FloatArray = NDArray[np.float64]

__all__ = ["FdSpec", "fd_gradient", "fd_jacobian", "image_vortex_velocity", "pushforward_check"]

# Central-difference weights for first derivatives, by order of accuracy.
_STENCILS = {
    2: ((1,), (0.5,)),
    4: ((1, 2), (2.0 / 3.0, -1.0 / 12.0)),
    6: ((1, 2, 3), (0.75, -0.15, 1.0 / 60.0)),
}


@dataclass(frozen=True)
class FdSpec:
    """Step size and accuracy order for central differences."""

    h: float = 1e-5
    order: int = 4

    def __post_init__(self) -> None:
        if not (np.isfinite(self.h) and self.h > 0):
            raise ValueError("h must be positive")
        if self.order not in _STENCILS:
            raise ValueError(f"order must be one of {sorted(_STENCILS)}")


def fd_gradient(f: Callable[[FloatArray], float], point: FloatArray, spec: FdSpec = FdSpec()) -> FloatArray:
    """Central-difference gradient of a scalar field."""
    z = np.asarray(point, dtype=np.float64)
    offsets, weights = _STENCILS[spec.order]
    grad = np.zeros_like(z)
    for i in range(z.size):
        step = np.zeros_like(z)
        acc = 0.0
        for k, w in zip(offsets, weights):
            step[i] = k * spec.h
            acc += w * (f(z + step) - f(z - step))
        step[i] = 0.0
        grad[i] = acc / spec.h
    return grad


def fd_jacobian(
    f: Callable[[FloatArray], FloatArray], point: FloatArray, spec: FdSpec = FdSpec()
) -> FloatArray:
    """Central-difference Jacobian of a vector field (rows = outputs)."""
    z = np.asarray(point, dtype=np.float64)
    offsets, weights = _STENCILS[spec.order]
    cols = []
    for i in range(z.size):
        step = np.zeros_like(z)
        acc = None
        for k, w in zip(offsets, weights):
            step[i] = k * spec.h
            term = w * (np.asarray(f(z + step)) - np.asarray(f(z - step)))
            acc = term if acc is None else acc + term
        cols.append(acc / spec.h)
    return np.stack(cols, axis=1)


def image_vortex_velocity(point: FloatArray, gamma: float, radius: float) -> FloatArray:
    """Velocity a vortex feels from its zero-circulation image system.

    Images: strength -gamma at the inverse point (R^2/|X|^2) X and +gamma at
    the center. Self-induction is excluded. The swirl orientation matches
    this package's bracket convention (a positive-strength vortex drives
    clockwise swirl, so the induced orbit here is counterclockwise); speeds
    and decay rates agree with the textbook image system either way.
    """
    p = np.asarray(point, dtype=np.float64).reshape(2)
    d2 = float(p @ p)
    if d2 <= radius**2:
        raise ValueError("point must lie outside the body")
    velocity = np.zeros(2)
    for strength, source in ((-gamma, (radius**2 / d2) * p), (gamma, np.zeros(2))):
        rel = p - source
        r2 = float(rel @ rel)
        velocity += (strength / (2.0 * np.pi * r2)) * np.array([rel[1], -rel[0]])
    return velocity


def pushforward_check(state, body, strengths: FloatArray) -> float:
    """Max deviation of DS Lambda_momentum DS^T from the closed-form velocity matrix.

    ``state`` is a velocity-chart point; only the (V, X) block is compared
    (the Omega row of the closed-form matrix is itself defined by
    pushforward, so including it would be circular).
    """
    from .maps import shift_jacobian, shift_map
    from .structures import momentum_structure_matrix, velocity_structure_matrix

    g = np.asarray(strengths, dtype=np.float64)
    z = shift_map(state, g, body)
    ds = shift_jacobian(z.positions, g, body, direction="to_velocity")
    pushed = ds @ momentum_structure_matrix(z, g) @ ds.T
    target = velocity_structure_matrix(state, g, body)
    return float(np.max(np.abs(pushed[1:, 1:] - target[1:, 1:])))
