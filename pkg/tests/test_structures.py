import numpy as np
import numpy.testing as npt

from conftest import random_state
from vortexcyl import (
    ChartState,
    VortexSet,
    interaction_bracket_coefficients,
    jacobi_residual,
    magnetic_pairing,
    momentum_structure_matrix,
    velocity_structure_matrix,
)
from vortexcyl.energetics import effective_mass


def test_momentum_matrix_algebra_block(rng):
    st, g = random_state(rng, "momentum")
    lam = momentum_structure_matrix(st, g)
    assert lam[0, 1] == -st.body[2]  # {A, Lx} = -Ly
    assert lam[0, 2] == st.body[1]  # {A, Ly} = Lx
    assert abs(lam[1, 2] - g.sum()) < 1e-15


def test_momentum_matrix_zero_total_strength():
    st = ChartState("momentum", [0.1, 0.2, 0.3], [[2.0, 0.0], [0.0, 2.0]])
    lam = momentum_structure_matrix(st, np.array([1.0, -1.0]))
    assert lam[1, 2] == 0.0


def test_momentum_matrix_vortex_block():
    st = ChartState("momentum", [0.0, 0.0, 0.0], [[2.0, 0.0]])
    lam = momentum_structure_matrix(st, np.array([2.0]))
    assert abs(abs(lam[3, 4]) - 0.5) < 1e-15
    assert lam[3, 4] == -0.5  # global vortex sign convention


def test_matrices_exactly_skew(body, rng):
    for chart, build in (
        ("momentum", lambda s, g: momentum_structure_matrix(s, g)),
        ("velocity", lambda s, g: velocity_structure_matrix(s, g, body)),
    ):
        st, g = random_state(rng, chart)
        lam = build(st, g)
        npt.assert_array_equal(lam, -lam.T)


def test_velocity_matrix_vortex_block(body):
    st = ChartState("velocity", [0.0, 0.1, -0.2], [[2.0, 0.0], [0.0, 2.5]])
    g = np.array([2.0, -0.5])
    lam = velocity_structure_matrix(st, g, body)
    assert abs(lam[3, 4] + 1.0 / 2.0) < 1e-15
    assert abs(lam[5, 6] - 2.0) < 1e-15


def test_velocity_matrix_far_field_limit(body):
    st = ChartState("velocity", [0.0, 0.0, 0.0], [[1.0e4, 0.0], [0.0, 1.2e4]])
    g = np.array([1.0, 2.0])
    lam = velocity_structure_matrix(st, g, body)
    # (d^4 - R^4)/d^4 -> 1, so {V1, V2} -> (Gamma - sum Gamma_i)/c^2 = 0
    assert abs(lam[1, 2]) <= 1e-15


def test_velocity_matrix_single_vortex_coupling(body):
    # magnitude (1/2pi) (16 - 4)/16 = 3/(8 pi); the coupling sign is fixed by
    # the requirement that the shift map pushes one structure onto the other
    st = ChartState("velocity", [0.0, 0.0, 0.0], [[2.0, 0.0]])
    lam = velocity_structure_matrix(st, np.array([1.0]), body)
    assert abs(abs(lam[1, 3]) - 3.0 / (8.0 * np.pi)) < 1e-15
    assert lam[1, 3] < 0


def test_interaction_matches_velocity_matrix(body, rng):
    c = effective_mass(body).c
    worst = 0.0
    for _ in range(30):
        st, g = random_state(rng, "velocity")
        lam = velocity_structure_matrix(st, g, body)
        table = interaction_bracket_coefficients(st, g, body)
        dev = abs(table[("Pi_x", "Pi_y")] - c**2 * lam[1, 2])
        for i in range(st.n):
            for a, row in (("x", 1), ("y", 2)):
                dev = max(dev, abs(table[(f"Pi_{a}", f"X{i}")] - c * lam[row, 3 + 2 * i]))
                dev = max(dev, abs(table[(f"Pi_{a}", f"Y{i}")] - c * lam[row, 4 + 2 * i]))
            for j in range(st.n):
                dev = max(dev, abs(table[(f"X{i}", f"Y{j}")] - lam[3 + 2 * i, 4 + 2 * j]))
        worst = max(worst, dev)
    assert worst <= 1e-10


def test_interaction_momentum_bracket_formula(body, rng):
    for _ in range(20):
        st, g = random_state(rng, "velocity")
        d4 = np.sum(st.positions**2, axis=1) ** 2
        expected = g.sum() - np.sum(g * (d4 - body.radius**4) / d4)
        table = interaction_bracket_coefficients(st, g, body)
        assert abs(table[("Pi_x", "Pi_y")] - expected) <= 1e-10


def test_interaction_star_term(body, rng):
    # Pi_x * Pi_y under the vortex bracket alone equals -sum G_i (d^4-R^4)/d^4;
    # recover it from the assembled entry by removing the generator pairing.
    for _ in range(10):
        st, g = random_state(rng, "velocity")
        vs = VortexSet(g, st.positions)
        table = interaction_bracket_coefficients(st, g, body)
        star = table[("Pi_x", "Pi_y")] + magnetic_pairing("x", "y", vs, body.fluid)
        d4 = np.sum(st.positions**2, axis=1) ** 2
        expected = -np.sum(g * (d4 - body.radius**4) / d4)
        assert abs(star - expected) <= 1e-10


def test_jacobi_constant_structures():
    const = np.array([[0.0, 2.0, -1.0], [-2.0, 0.0, 0.5], [1.0, -0.5, 0.0]])
    assert jacobi_residual(lambda z: const, np.zeros(3), 1e-5) <= 1e-12

    canonical = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    assert jacobi_residual(lambda z: canonical, np.zeros(4), 1e-5) <= 1e-12


def test_jacobi_both_charts(body, rng):
    for chart, build in (
        ("momentum", lambda z, g: momentum_structure_matrix(ChartState.from_flat("momentum", z), g)),
        ("velocity", lambda z, g: velocity_structure_matrix(ChartState.from_flat("velocity", z), g, body)),
    ):
        worst = 0.0
        for _ in range(20):
            st, g = random_state(rng, chart)
            z = st.flat()
            h = 1e-5 * (1.0 + float(np.max(np.abs(z))))
            worst = max(worst, jacobi_residual(lambda zz: build(zz, g), z, h))
        assert worst <= 1e-6, chart
