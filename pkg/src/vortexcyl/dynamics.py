"""Time integration of either chart, pose reconstruction, and diagnostics.

The public ``rhs`` is the literal structure-matrix-times-gradient product;
``integrate`` drives it with fixed-step RK4 or implicit midpoint through one
of two equivalent backends (compiled kernels or the pure-numpy reference,
see ``_kernels``). Poses are reconstructed during integration by exact screw
increments using each step's midpoint body velocity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.typing import NDArray

from . import _kernels
from .energetics import BodyParams, effective_mass, hamiltonian, hamiltonian_gradient
from .fluid import ValidationError, VortexSet
from .maps import shift_map
from .se2 import Se2Algebra, Se2Element, rotation, se2_exp
from .state import MOMENTUM, ChartState, canonical_chart
from .structures import structure_matrix

FloatArray = NDArray[np.float64]

__all__ = [
    "SimConfig",
    "HaltInfo",
    "Trajectory",
    "DiagnosticsReport",
    "rhs",
    "integrate",
    "reconstruct_poses",
    "diagnostics",
    "active_backend",
]

_HALT_REASONS = {
    _kernels.HALT_BODY: "vortex reached the body clearance",
    _kernels.HALT_PAIR: "two vortices closer than the clearance",
    _kernels.HALT_NO_CONVERGENCE: "implicit midpoint iteration did not converge",
    _kernels.HALT_NONFINITE: "state became non-finite",
}


@dataclass(frozen=True)
class SimConfig:
    """Everything needed to reproduce one run."""

    chart: str
    body: BodyParams
    vortices: VortexSet
    body_state: FloatArray
    dt: float
    t_end: float
    integrator: str = "rk4"
    stride: int = 1
    clearance: float | None = None
    name: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "chart", canonical_chart(self.chart))
        object.__setattr__(self, "body_state", np.asarray(self.body_state, dtype=np.float64).reshape(3))
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ValidationError("dt must be positive")
        if not (np.isfinite(self.t_end) and self.t_end >= 0):
            raise ValidationError("t_end must be nonnegative")
        if self.integrator not in ("rk4", "midpoint"):
            raise ValidationError("integrator must be 'rk4' or 'midpoint'")
        if self.stride < 1:
            raise ValidationError("stride must be a positive integer")
        eps = self.clearance if self.clearance is not None else 1e-3 * self.body.radius
        if not (np.isfinite(eps) and eps > 0):
            raise ValidationError("clearance must be positive")
        object.__setattr__(self, "clearance", float(eps))
        self.vortices.validate(self.body.fluid)

    @property
    def initial_state(self) -> ChartState:
        return ChartState(self.chart, self.body_state, self.vortices.positions)

    @property
    def nsteps(self) -> int:
        return int(round(self.t_end / self.dt))

    def with_overrides(self, **kwargs) -> "SimConfig":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class HaltInfo:
    reason: str
    vortex_index: int
    time: float


@dataclass
class Trajectory:
    """Recorded samples of one run plus conservation diagnostics."""

    chart: str
    times: FloatArray
    states: FloatArray  # (M, 3 + 2N) flat chart states
    poses: FloatArray  # (M, 3) as (beta, x0_x, x0_y)
    inertial_positions: FloatArray  # (M, N, 2)
    energy: FloatArray
    casimir: FloatArray  # Lx^2 + Ly^2 in momentum variables
    l_drift: FloatArray  # |L(t) - L(0)| in momentum variables
    halt: HaltInfo | None = None
    config: SimConfig | None = None

    @property
    def n_samples(self) -> int:
        return self.times.shape[0]

    def state_at(self, k: int) -> ChartState:
        return ChartState.from_flat(self.chart, self.states[k])


@dataclass(frozen=True)
class DiagnosticsReport:
    max_rel_energy_drift: float
    max_casimir_drift: float
    max_l_drift: float
    min_body_clearance: float
    min_pair_distance: float


def active_backend() -> str:
    return "numba" if _kernels.numba_enabled() else "numpy"


def rhs(chart: str, state: ChartState, body: BodyParams, strengths: FloatArray) -> FloatArray:
    """Structure matrix times energy gradient; the equations of motion."""
    chart = canonical_chart(chart)
    if state.chart != chart:
        raise ValidationError(f"state belongs to chart {state.chart!r}, not {chart!r}")
    VortexSet(strengths, state.positions).validate(body.fluid)
    lam = structure_matrix(state, strengths, body)
    grad = hamiltonian_gradient(chart, state, body, strengths)
    return lam @ grad


def _rhs_flat(chart: str, z: FloatArray, body: BodyParams, strengths: FloatArray) -> FloatArray:
    state = ChartState.from_flat(chart, z)
    lam = structure_matrix(state, strengths, body)
    grad = hamiltonian_gradient(chart, state, body, strengths)
    return lam @ grad


def _integrate_python(config: SimConfig):
    """Reference loop: structure-matrix rhs, python step loop."""
    chart = config.chart
    body = config.body
    g = config.vortices.strengths
    dt = config.dt
    nsteps = config.nsteps
    n = config.vortices.n
    body_limit2 = (body.radius + config.clearance) ** 2
    pair_limit2 = config.clearance**2

    z = np.concatenate([config.body_state, config.vortices.positions.reshape(-1)])
    pose = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0)  # beta, comp, x, comp, y, comp

    rec_states = [z.copy()]
    rec_poses = [(0.0, 0.0, 0.0)]
    rec_steps = [0]
    halt_code, halt_index, halt_step = _kernels.HALT_NONE, -1, nsteps

    def omv(zz: FloatArray) -> tuple[float, float, float]:
        if chart == MOMENTUM:
            return _kernels._omv_from_momentum(zz, g, body.radius**2, effective_mass(body).c, body.inertia)
        return float(zz[0]), float(zz[1]), float(zz[2])

    def _try_step(z):
        """One integrator step; None signals a domain escape or no convergence."""
        # overflow of a diverging iterate is detected explicitly, not raised
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            if config.integrator == "rk4":
                try:
                    k1 = _rhs_flat(chart, z, body, g)
                    k2 = _rhs_flat(chart, z + 0.5 * dt * k1, body, g)
                    k3 = _rhs_flat(chart, z + 0.5 * dt * k2, body, g)
                    k4 = _rhs_flat(chart, z + dt * k3, body, g)
                except ValueError:  # a stage left the fluid domain
                    return None, _kernels.HALT_NONFINITE
                return z + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), _kernels.HALT_NONE
            umid = z.copy()
            for _ in range(50):
                try:
                    unew = z + 0.5 * dt * _rhs_flat(chart, umid, body, g)
                except ValueError:
                    break
                if not np.all(np.isfinite(unew)):
                    break
                if float(np.max(np.abs(unew - umid), initial=0.0)) <= 1e-12:
                    return 2.0 * unew - z, _kernels.HALT_NONE
                umid = unew
            return None, _kernels.HALT_NO_CONVERGENCE

    for step in range(nsteps):
        om0, vx0, vy0 = omv(z)
        znew, code = _try_step(z)
        if znew is None:
            halt_code, halt_step = code, step
            break
        z = znew
        om1, vx1, vy1 = omv(z)
        pose = _kernels._pose_step(
            *pose, 0.5 * (om0 + om1), 0.5 * (vx0 + vx1), 0.5 * (vy0 + vy1), dt
        )
        if not np.all(np.isfinite(z)):
            halt_code, halt_step = _kernels.HALT_NONFINITE, step
            break
        pos = z[3:].reshape(-1, 2)
        d2 = np.sum(pos * pos, axis=1)
        if n and float(d2.min()) < body_limit2:
            halt_code = _kernels.HALT_BODY
            halt_index = int(np.argmin(d2))
            halt_step = step
            break
        hit = False
        for i in range(n):
            for j in range(i + 1, n):
                if float(np.sum((pos[i] - pos[j]) ** 2)) < pair_limit2:
                    halt_code, halt_index, halt_step = _kernels.HALT_PAIR, i, step
                    hit = True
                    break
            if hit:
                break
        if hit:
            break
        if (step + 1) % config.stride == 0 or step + 1 == nsteps:
            rec_states.append(z.copy())
            rec_poses.append((pose[0], pose[2], pose[4]))
            rec_steps.append(step + 1)

    return (
        np.asarray(rec_states),
        np.asarray(rec_poses),
        np.asarray(rec_steps, dtype=np.int64),
        halt_code,
        halt_index,
        halt_step,
    )


def _integrate_numba(config: SimConfig):
    chart_id = _kernels.CHART_MOMENTUM if config.chart == MOMENTUM else _kernels.CHART_VELOCITY
    integ_id = _kernels.RK4 if config.integrator == "rk4" else _kernels.MIDPOINT
    body = config.body
    z0 = np.concatenate([config.body_state, config.vortices.positions.reshape(-1)])
    states, poses, steps, n_rec, halt_code, halt_index, halt_step = _kernels.run_numba(
        chart_id,
        z0,
        config.vortices.strengths,
        body.radius**2,
        effective_mass(body).c,
        body.inertia,
        config.vortices.total_strength,
        config.dt,
        config.nsteps,
        config.stride,
        (body.radius + config.clearance) ** 2,
        config.clearance**2,
        integ_id,
        1e-12,
        50,
    )
    return states[:n_rec], poses[:n_rec], steps[:n_rec], halt_code, halt_index, halt_step


def integrate(config: SimConfig) -> Trajectory:
    """Run one simulation; deterministic for a given config and backend."""
    if _kernels.numba_enabled():
        states, poses, steps, halt_code, halt_index, halt_step = _integrate_numba(config)
    else:
        states, poses, steps, halt_code, halt_index, halt_step = _integrate_python(config)

    times = steps * config.dt
    n = config.vortices.n
    g = config.vortices.strengths
    m = states.shape[0]

    inertial = np.empty((m, n, 2))
    energy = np.empty(m)
    l_mom = np.empty((m, 2))
    for k in range(m):
        st = ChartState.from_flat(config.chart, states[k])
        rot = rotation(poses[k, 0])
        inertial[k] = st.positions @ rot.T + poses[k, 1:]
        energy[k] = hamiltonian(config.chart, st, config.body, g)
        zm = st if config.chart == MOMENTUM else shift_map(st, g, config.body)
        l_mom[k] = zm.body[1:]
    casimir = np.sum(l_mom * l_mom, axis=1)
    l_drift = np.linalg.norm(l_mom - l_mom[0], axis=1)

    halt = None
    if halt_code != _kernels.HALT_NONE:
        halt = HaltInfo(
            reason=_HALT_REASONS[halt_code],
            vortex_index=int(halt_index),
            time=float(halt_step * config.dt),
        )
    return Trajectory(
        chart=config.chart,
        times=times.astype(np.float64),
        states=states,
        poses=poses,
        inertial_positions=inertial,
        energy=energy,
        casimir=casimir,
        l_drift=l_drift,
        halt=halt,
        config=config,
    )


def reconstruct_poses(
    times: FloatArray, omegas: FloatArray, velocities: FloatArray, g0: Se2Element | None = None
) -> list[Se2Element]:
    """Integrate g' = g xi through exact screw steps with midpoint velocities.

    ``omegas`` is (M,), ``velocities`` (M, 2); returns one pose per sample.
    """
    g = g0 if g0 is not None else Se2Element()
    poses = [g]
    for k in range(len(times) - 1):
        dt = float(times[k + 1] - times[k])
        xi = Se2Algebra(
            0.5 * (float(omegas[k]) + float(omegas[k + 1])),
            0.5 * (velocities[k] + velocities[k + 1]),
        )
        g = g.compose(se2_exp(xi, dt))
        poses.append(g)
    return poses


def diagnostics(traj: Trajectory) -> DiagnosticsReport:
    """Conservation drifts and closest approaches over a trajectory."""
    if traj.n_samples == 0:
        raise ValidationError("empty trajectory")
    e0 = traj.energy[0]
    scale = abs(e0) if e0 != 0.0 else 1.0
    rel_h = float(np.max(np.abs(traj.energy - e0))) / scale
    cas = float(np.max(np.abs(traj.casimir - traj.casimir[0])))
    ldr = float(np.max(traj.l_drift))
    n = traj.states.shape[1] - 3
    if n:
        pos = traj.states[:, 3:].reshape(traj.n_samples, -1, 2)
        d = np.linalg.norm(pos, axis=2)
        radius = traj.config.body.radius if traj.config else 0.0
        min_clear = float(d.min()) - radius
        nv = pos.shape[1]
        min_pair = math.inf
        for i in range(nv):
            for j in range(i + 1, nv):
                min_pair = min(min_pair, float(np.min(np.linalg.norm(pos[:, i] - pos[:, j], axis=1))))
    else:
        min_clear = math.inf
        min_pair = math.inf
    return DiagnosticsReport(
        max_rel_energy_drift=rel_h,
        max_casimir_drift=cas,
        max_l_drift=ldr,
        min_body_clearance=min_clear,
        min_pair_distance=min_pair,
    )
