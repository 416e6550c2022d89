"""Backend parity: compiled kernels against the structure-matrix reference."""
import numpy as np
import numpy.testing as npt
import pytest

from conftest import random_state
from vortexcyl import hamiltonian_gradient, structure_matrix
from vortexcyl import _kernels
from vortexcyl.dynamics import SimConfig, _integrate_python, active_backend, integrate
from vortexcyl.energetics import effective_mass
from vortexcyl.fluid import VortexSet

needs_numba = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")


def _kernel_rhs(chart, st, body, g):
    z = st.flat()
    out = np.empty_like(z)
    wg = np.empty((st.n, 2))
    args = (z, g, body.radius**2, effective_mass(body).c, body.inertia, float(g.sum()), wg, out)
    if chart == "momentum":
        _kernels._rhs_momentum(*args)
    else:
        _kernels._rhs_velocity(*args)
    return out


def test_python_kernel_matches_matrix_route(body, rng):
    for chart in ("momentum", "velocity"):
        for _ in range(20):
            st, g = random_state(rng, chart)
            reference = structure_matrix(st, g, body) @ hamiltonian_gradient(chart, st, body, g)
            npt.assert_allclose(_kernel_rhs(chart, st, body, g), reference, atol=1e-12)


@needs_numba
def test_numba_kernel_matches_python_kernel(body, rng):
    for chart, fn in (("momentum", _kernels._rhs_momentum_nb), ("velocity", _kernels._rhs_velocity_nb)):
        for _ in range(10):
            st, g = random_state(rng, chart)
            z = st.flat()
            out = np.empty_like(z)
            wg = np.empty((st.n, 2))
            fn(z, g, body.radius**2, effective_mass(body).c, body.inertia, float(g.sum()), wg, out)
            npt.assert_array_equal(out, _kernel_rhs(chart, st, body, g))


@needs_numba
def test_run_loops_agree_bitwise(body):
    z0 = np.array([0.1, -0.2, 0.3, 2.0, 0.5, -1.8, 1.1])
    g = np.array([1.3, -0.7])
    args = (
        _kernels.CHART_MOMENTUM,
        z0,
        g,
        1.0,
        effective_mass(body).c,
        body.inertia,
        float(g.sum()),
        1e-3,
        500,
        25,
        (1.0 + 1e-3) ** 2,
        1e-6,
        _kernels.RK4,
        1e-12,
        50,
    )
    sa, pa, ka, na, ha, ia, ta = _kernels.run_numba(*args)
    sb, pb, kb, nb_, hb, ib, tb = _kernels.run_python(*args)
    assert (na, ha, ia, ta) == (nb_, hb, ib, tb)
    npt.assert_array_equal(sa[:na], sb[:nb_])
    npt.assert_array_equal(pa[:na], pb[:nb_])


def test_pure_numpy_env_flag(monkeypatch, body):
    monkeypatch.setenv("VCL_PURE_NUMPY", "1")
    assert active_backend() == "numpy"
    monkeypatch.delenv("VCL_PURE_NUMPY")
    if _kernels.HAVE_NUMBA:
        assert active_backend() == "numba"


def test_backends_produce_same_trajectory(body, monkeypatch):
    vs = VortexSet([1.0, -1.0], [[3.0, 0.0], [0.0, 3.0]])
    cfg = SimConfig(
        chart="velocity",
        body=body,
        vortices=vs,
        body_state=[0.05, 0.1, -0.08],
        dt=5e-3,
        t_end=1.0,
        stride=20,
    )
    monkeypatch.setenv("VCL_PURE_NUMPY", "1")
    traj_np = integrate(cfg)
    monkeypatch.delenv("VCL_PURE_NUMPY")
    traj_default = integrate(cfg)
    npt.assert_allclose(traj_default.states, traj_np.states, rtol=0, atol=1e-11)
    npt.assert_allclose(traj_default.poses, traj_np.poses, rtol=0, atol=1e-11)


def test_reference_python_loop_direct(body):
    # exercise _integrate_python regardless of the active backend
    vs = VortexSet([1.0, -1.0], [[3.0, 0.0], [0.0, 3.0]])
    cfg = SimConfig(
        chart="momentum",
        body=body,
        vortices=vs,
        body_state=[0.0, 0.0, 0.0],
        dt=0.01,
        t_end=0.2,
        stride=5,
    )
    states, poses, steps, halt_code, _, _ = _integrate_python(cfg)
    assert halt_code == _kernels.HALT_NONE
    assert states.shape[0] == steps.size == poses.shape[0]
    assert steps[-1] == 20
