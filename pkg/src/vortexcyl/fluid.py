"""Closed-form potential flow around a circular cylinder of radius R.

Elementary potentials/streams for the unit translations and the rotation,
the Green's function of the exterior domain built from the circle-theorem
image system, and the Kirchhoff-Routh interaction energy W_G with its
analytic gradient.

All positions are body-frame coordinates; the cylinder is centered at the
origin. The elementary fields carry an R^2 scale so the Neumann boundary
condition dPhi_X/dn = n_x holds on |X| = R for every radius (the R = 1
forms are recovered exactly).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

FloatArray = NDArray[np.float64]

__all__ = [
    "DomainError",
    "ValidationError",
    "FluidParams",
    "VortexSet",
    "elementary_potentials",
    "elementary_streams",
    "green_function",
    "green_regular_part",
    "regularized_self",
    "kirchhoff_routh",
    "grad_kirchhoff_routh",
    "momentum_shift_terms",
]

FOUR_PI = 4.0 * np.pi

# Points closer to the body than this relative clearance are rejected.
MIN_CLEARANCE = 1e-9


class DomainError(ValueError):
    """Evaluation requested at a point outside the fluid domain."""


class ValidationError(ValueError):
    """A vortex configuration violates its invariants."""


@dataclass(frozen=True)
class FluidParams:
    """Circular body of radius ``radius``; fluid density is fixed at 1."""

    radius: float = 1.0

    def __post_init__(self) -> None:
        if not (np.isfinite(self.radius) and self.radius > 0):
            raise ValidationError("radius must be a positive finite float")
        object.__setattr__(self, "radius", float(self.radius))


@dataclass(frozen=True)
class VortexSet:
    """Vortex strengths and body-frame positions.

    Invariants: every strength nonzero, every position strictly outside the
    body, positions pairwise distinct.
    """

    strengths: FloatArray = field(default_factory=lambda: np.zeros(0))
    positions: FloatArray = field(default_factory=lambda: np.zeros((0, 2)))

    def __post_init__(self) -> None:
        g = np.asarray(self.strengths, dtype=np.float64).reshape(-1)
        x = np.asarray(self.positions, dtype=np.float64).reshape(-1, 2)
        if g.shape[0] != x.shape[0]:
            raise ValidationError("strengths and positions must have matching length")
        object.__setattr__(self, "strengths", g)
        object.__setattr__(self, "positions", x)

    @property
    def n(self) -> int:
        return self.strengths.shape[0]

    @property
    def total_strength(self) -> float:
        return float(self.strengths.sum())

    def validate(self, params: FluidParams) -> None:
        r = params.radius
        for i, gamma in enumerate(self.strengths):
            if gamma == 0.0 or not np.isfinite(gamma):
                raise ValidationError(f"vortex {i}: strength must be finite and nonzero")
        d = np.linalg.norm(self.positions, axis=1)
        for i, di in enumerate(d):
            if not di > r * (1.0 + MIN_CLEARANCE):
                raise ValidationError(f"vortex {i}: position must lie strictly outside the body")
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if np.array_equal(self.positions[i], self.positions[j]):
                    raise ValidationError(f"vortices {i} and {j} coincide")

    def with_positions(self, positions: FloatArray) -> "VortexSet":
        return VortexSet(self.strengths, positions)


def _check_exterior(point: FloatArray, radius: float, boundary_ok: bool) -> FloatArray:
    p = np.asarray(point, dtype=np.float64).reshape(2)
    d = float(np.hypot(p[0], p[1]))
    limit = radius * (1.0 - 1e-12) if boundary_ok else radius * (1.0 + MIN_CLEARANCE)
    if d < limit:
        raise DomainError(f"point at distance {d:.6g} lies inside the body of radius {radius:.6g}")
    return p


def elementary_potentials(
    point: FloatArray, params: FluidParams, check: bool = True
) -> tuple[float, float, float]:
    """Velocity potentials (Phi_X, Phi_Y, Phi_Omega) of the unit body motions.

    Phi_Omega vanishes identically for the circle.
    """
    p = _check_exterior(point, params.radius, boundary_ok=True) if check else np.asarray(point, float)
    r2 = params.radius**2
    d2 = p[0] ** 2 + p[1] ** 2
    return (-r2 * p[0] / d2, -r2 * p[1] / d2, 0.0)


def elementary_streams(
    point: FloatArray, params: FluidParams, check: bool = True
) -> tuple[float, float, float]:
    """Stream functions (Psi_X, Psi_Y, Psi_Omega) conjugate to the potentials.

    Conjugacy convention: dPsi/dX = -dPhi/dY and dPsi/dY = dPhi/dX.
    """
    p = _check_exterior(point, params.radius, boundary_ok=True) if check else np.asarray(point, float)
    r2 = params.radius**2
    d2 = p[0] ** 2 + p[1] ** 2
    return (r2 * p[1] / d2, -r2 * p[0] / d2, 0.0)


def green_regular_part(x0: FloatArray, x1: FloatArray, params: FluidParams) -> float:
    """Image contribution g(X, Y): harmonic in the domain, symmetric in its arguments."""
    p = _check_exterior(x0, params.radius, boundary_ok=True)
    q = _check_exterior(x1, params.radius, boundary_ok=True)
    r2 = params.radius**2
    a2 = p @ p
    b2 = q @ q
    denom = a2 * b2 - 2.0 * r2 * (p @ q) + r2 * r2
    return float(np.log(a2 * b2 / denom) / FOUR_PI)


def green_function(x0: FloatArray, x1: FloatArray, params: FluidParams) -> float:
    """Exterior-domain Green's function: free-space log plus the image term."""
    p = _check_exterior(x0, params.radius, boundary_ok=True)
    q = _check_exterior(x1, params.radius, boundary_ok=True)
    sep2 = float((p - q) @ (p - q))
    if sep2 == 0.0:
        raise DomainError("coincident points; use regularized_self for the self-energy term")
    return float(np.log(sep2) / FOUR_PI) + green_regular_part(p, q, params)


def regularized_self(point: FloatArray, params: FluidParams) -> float:
    """Self-interaction term g(X, X) = log(d^2/(d^2 - R^2)) / (2 pi)."""
    p = _check_exterior(point, params.radius, boundary_ok=False)
    d2 = float(p @ p)
    r2 = params.radius**2
    return float(np.log(d2 / (d2 - r2)) / (2.0 * np.pi))


def kirchhoff_routh(vortices: VortexSet, params: FluidParams) -> float:
    """Interaction energy W_G: pairwise Green's terms plus quadratic self terms."""
    vortices.validate(params)
    g = vortices.strengths
    x = vortices.positions
    total = 0.0
    for i in range(vortices.n):
        total += 0.5 * g[i] ** 2 * regularized_self(x[i], params)
        for j in range(i):
            total += g[i] * g[j] * green_function(x[i], x[j], params)
    return total


def _grad_green_first(p: FloatArray, q: FloatArray, r2: float) -> FloatArray:
    """d/dX of green_function(X, Y) at X=p, Y=q."""
    diff = p - q
    a2 = p @ p
    b2 = q @ q
    denom = a2 * b2 - 2.0 * r2 * (p @ q) + r2 * r2
    return (2.0 * diff / (diff @ diff) + 2.0 * p / a2 - (2.0 * b2 * p - 2.0 * r2 * q) / denom) / FOUR_PI


def grad_kirchhoff_routh(vortices: VortexSet, params: FluidParams) -> FloatArray:
    """Analytic dW_G/dX_k for each vortex, shape (N, 2)."""
    vortices.validate(params)
    g = vortices.strengths
    x = vortices.positions
    r2 = params.radius**2
    out = np.zeros_like(x)
    for k in range(vortices.n):
        p = x[k]
        d2 = p @ p
        # gradient of the regularized self term
        out[k] = 0.5 * g[k] ** 2 * (p / np.pi) * (1.0 / d2 - 1.0 / (d2 - r2))
        for j in range(vortices.n):
            if j != k:
                out[k] += g[k] * g[j] * _grad_green_first(p, x[j], r2)
    return out


def momentum_shift_terms(vortices: VortexSet, params: FluidParams) -> tuple[FloatArray, float]:
    """Translational and angular parts of the fluid momentum carried by the vortices.

    Returns (phi_xy, phi_omega) with
        phi_xy    = sum_i Gamma_i * (-Y_i, X_i) * (1 - R^2/d_i^2)
        phi_omega = sum_i Gamma_i * d_i^2 / 2.
    These are the identity-evaluation components of the magnetic potential and
    the exact offsets between body momenta and velocities in the momentum chart.
    """
    if vortices.n == 0:
        return np.zeros(2), 0.0
    g = vortices.strengths
    x = vortices.positions
    d2 = np.sum(x * x, axis=1)
    lam = 1.0 - params.radius**2 / d2
    phi_xy = np.array([-np.sum(g * x[:, 1] * lam), np.sum(g * x[:, 0] * lam)])
    return phi_xy, float(0.5 * np.sum(g * d2))
