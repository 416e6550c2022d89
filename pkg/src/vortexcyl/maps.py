"""Chart-to-chart and symmetry maps.

The momentum shift between the velocity chart (Omega, V, X) and the momentum
chart (A, L, X), its analytic Jacobian, the conserved planar momentum of the
combined system in body and spatial form, the magnetic potential whose
identity evaluation generates the shift, the magnetic pairing on the symmetry
generators, and the non-equivariance cocycle built from those ingredients.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from . import fluid
from .energetics import BodyParams, effective_mass
from .fluid import FluidParams, VortexSet
from .se2 import Se2Costate, Se2Element, rotation
from .state import MOMENTUM, VELOCITY, ChartState

FloatArray = NDArray[np.float64]

__all__ = [
    "CocycleForm",
    "magnetic_potential",
    "shift_map",
    "inverse_shift_map",
    "shift_jacobian",
    "momentum_map",
    "magnetic_pairing",
    "cocycle_sigma",
]

GENERATORS = ("omega", "x", "y")


def magnetic_potential(vortices: VortexSet, params: FluidParams) -> Se2Costate:
    """Momentum carried by the vortex system, evaluated at the identity pose.

    Components combine the bare vortex momentum with the stream-function
    contribution of the body's image system:
        phi_x = sum Gamma_i (-Y_i + Psi_X(X_i)),  phi_y = sum Gamma_i (X_i + Psi_Y(X_i)),
        phi_omega = sum Gamma_i |X_i|^2 / 2.
    """
    vortices.validate(params)
    phi_xy, phi_om = fluid.momentum_shift_terms(vortices, params)
    return Se2Costate(pi_omega=phi_om, pi_xy=phi_xy)


def shift_map(state: ChartState, strengths: FloatArray, body: BodyParams) -> ChartState:
    """Velocity chart -> momentum chart; the identity on vortex positions.

    L = c V + sum Gamma_k X_k x e3 + sum Gamma_k R^2 (e3 x X_k)/|X_k|^2
    A = I Omega - sum Gamma_i |X_i|^2 / 2.
    """
    if state.chart != VELOCITY:
        raise ValueError("shift_map expects a velocity-chart state")
    em = effective_mass(body)
    phi_xy, phi_om = fluid.momentum_shift_terms(VortexSet(strengths, state.positions), body.fluid)
    omega, v = state.body[0], state.body[1:]
    triple = np.array(
        [em.i_eff * omega - phi_om, em.c * v[0] - phi_xy[0], em.c * v[1] - phi_xy[1]]
    )
    return ChartState(MOMENTUM, triple, state.positions)


def inverse_shift_map(state: ChartState, strengths: FloatArray, body: BodyParams) -> ChartState:
    """Momentum chart -> velocity chart, solving the shift linearly for (Omega, V)."""
    if state.chart != MOMENTUM:
        raise ValueError("inverse_shift_map expects a momentum-chart state")
    em = effective_mass(body)
    phi_xy, phi_om = fluid.momentum_shift_terms(VortexSet(strengths, state.positions), body.fluid)
    triple = np.array(
        [
            (state.body[0] + phi_om) / em.i_eff,
            (state.body[1] + phi_xy[0]) / em.c,
            (state.body[2] + phi_xy[1]) / em.c,
        ]
    )
    return ChartState(VELOCITY, triple, state.positions)


def shift_jacobian(
    positions: FloatArray, strengths: FloatArray, body: BodyParams, direction: str = "to_velocity"
) -> FloatArray:
    """Analytic Jacobian of the chart map; depends on positions only.

    ``to_velocity`` gives D of (A, L, X) -> (Omega, V, X); ``to_momentum``
    its inverse. Row/column layout matches the flat state layout.
    """
    from .energetics import shift_term_jacobian

    x = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
    g = np.asarray(strengths, dtype=np.float64)
    em = effective_mass(body)
    n = x.shape[0]
    dim = 3 + 2 * n
    jac = np.eye(dim)
    dphi = shift_term_jacobian(x, g, body.radius)
    if direction == "to_velocity":
        jac[0, 0] = 1.0 / em.i_eff
        jac[1, 1] = jac[2, 2] = 1.0 / em.c
        if n:
            jac[0, 3:] = (g[:, None] * x).reshape(-1) / em.i_eff
            jac[1:3, 3:] = dphi / em.c
        return jac
    if direction == "to_momentum":
        jac[0, 0] = em.i_eff
        jac[1, 1] = jac[2, 2] = em.c
        if n:
            jac[0, 3:] = -(g[:, None] * x).reshape(-1)
            jac[1:3, 3:] = -dphi
        return jac
    raise ValueError("direction must be 'to_velocity' or 'to_momentum'")


def momentum_map(
    pose: Se2Element,
    pi: Se2Costate,
    vortices: VortexSet,
    params: FluidParams,
    via: str = "body",
) -> Se2Costate:
    """Spatial momentum of the solid-fluid system at a pose.

    ``via='body'`` shifts the body momentum and pushes it to the spatial
    frame; ``via='spatial'`` evaluates directly from inertial vortex
    positions. The two agree identically and at the identity pose both
    reduce to the body momentum map pi - phi.
    """
    vortices.validate(params)
    g = vortices.strengths
    gamma_total = vortices.total_strength
    rot = rotation(pose.beta)
    if via == "body":
        phi = magnetic_potential(vortices, params)
        j_body_xy = pi.pi_xy - phi.pi_xy
        j_body_om = pi.pi_omega - phi.pi_omega
        j_xy = rot @ j_body_xy + gamma_total * np.array([pose.x0[1], -pose.x0[0]])
        j_om = j_body_om + pose.x0[0] * j_xy[1] - pose.x0[1] * j_xy[0]
        return Se2Costate(pi_omega=j_om, pi_xy=j_xy)
    if via != "spatial":
        raise ValueError("via must be 'body' or 'spatial'")
    inertial = vortices.positions @ rot.T + pose.x0
    rel = inertial - pose.x0
    d2 = np.sum(rel * rel, axis=1)
    # spatial elementary streams evaluated at the inertial vortex positions
    psi = params.radius**2 * np.stack([rel[:, 1], -rel[:, 0]], axis=1) / d2[:, None] if vortices.n else rel
    cross = np.stack([inertial[:, 1], -inertial[:, 0]], axis=1) if vortices.n else inertial
    # No standalone total-strength pose term here: the frame change of the
    # vortex sum generates it, which is exactly what the body-to-spatial
    # relation adds back on the other path.
    j_xy = rot @ pi.pi_xy
    if vortices.n:
        j_xy = j_xy + (g[:, None] * (cross - psi)).sum(axis=0)
    j_om = pi.pi_omega - float(0.5 * np.sum(g * d2)) + pose.x0[0] * j_xy[1] - pose.x0[1] * j_xy[0]
    return Se2Costate(pi_omega=j_om, pi_xy=j_xy)


def _generator_velocity(tag: str, point: FloatArray) -> FloatArray:
    """Infinitesimal action of a symmetry generator on the plane."""
    if tag == "x":
        return np.array([1.0, 0.0])
    if tag == "y":
        return np.array([0.0, 1.0])
    if tag == "omega":
        return np.array([-point[1], point[0]])
    raise ValueError(f"unknown generator {tag!r}")


def _stream_gradient(tag: str, point: FloatArray, params: FluidParams) -> FloatArray:
    """Numerical gradient of an elementary stream function (order-6 stencil)."""
    from .oracle import FdSpec, fd_gradient

    index = {"x": 0, "y": 1}[tag]

    def f(p: FloatArray) -> float:
        return fluid.elementary_streams(p, params, check=False)[index]

    h = 1e-3 * (1.0 + float(np.hypot(point[0], point[1])))
    return fd_gradient(f, np.asarray(point, float), FdSpec(h=h, order=6))


def magnetic_pairing(a: str, b: str, vortices: VortexSet, params: FluidParams) -> float:
    """Magnetic two-form evaluated on a pair of symmetry generators.

    Sums over vortices the area form of the two generator velocities plus
    the stream-function coupling; translation-translation pairs reduce to
    minus the total strength, and pairs with the rotation pick up the
    gradient of the matching elementary stream along the rotational flow.
    The pose derivative of a stream function under a translation cancels its
    spatial gradient exactly, so those contributions are identically zero.
    """
    if a not in GENERATORS or b not in GENERATORS:
        raise ValueError(f"generators must be in {GENERATORS}")
    vortices.validate(params)
    total = 0.0
    for gamma, point in zip(vortices.strengths, vortices.positions):
        va = _generator_velocity(a, point)
        vb = _generator_velocity(b, point)
        term = -(va[0] * vb[1] - va[1] * vb[0])
        for trans in ("x", "y"):
            if a == trans and b == "omega":
                term += float(_stream_gradient(trans, point, params) @ vb)
            if b == trans and a == "omega":
                term -= float(_stream_gradient(trans, point, params) @ va)
        total += gamma * term
    return total


@dataclass(frozen=True)
class CocycleForm:
    """Antisymmetric two-form on the symmetry algebra, stored on basis pairs."""

    omega_x: float
    omega_y: float
    x_y: float

    def __call__(self, a: str, b: str) -> float:
        table = {
            ("omega", "x"): self.omega_x,
            ("omega", "y"): self.omega_y,
            ("x", "y"): self.x_y,
        }
        if a == b:
            return 0.0
        if (a, b) in table:
            return table[(a, b)]
        return -table[(b, a)]


# Structure constants of the planar Euclidean algebra in the (omega, x, y)
# basis: [e_omega, e_x] = e_y, [e_omega, e_y] = -e_x, [e_x, e_y] = 0.
def _bracket_on_phi(a: str, b: str, phi: Se2Costate) -> float:
    """<phi, [e_a, e_b]>."""
    if {a, b} == {"omega", "x"}:
        val = phi.pi_xy[1]
        return val if (a, b) == ("omega", "x") else -val
    if {a, b} == {"omega", "y"}:
        val = -phi.pi_xy[0]
        return val if (a, b) == ("omega", "y") else -val
    return 0.0


def cocycle_sigma(vortices: VortexSet, params: FluidParams) -> CocycleForm:
    """Non-equivariance cocycle Sigma(xi, eta) = -<phi, [xi, eta]> + beta(xi, eta).

    The mixed components cancel numerically; the surviving component is
    Sigma(e_x, e_y) = -(total vortex strength).
    """
    phi = magnetic_potential(vortices, params)

    def sigma(a: str, b: str) -> float:
        return -_bracket_on_phi(a, b, phi) + magnetic_pairing(a, b, vortices, params)

    return CocycleForm(
        omega_x=sigma("omega", "x"),
        omega_y=sigma("omega", "y"),
        x_y=sigma("x", "y"),
    )
