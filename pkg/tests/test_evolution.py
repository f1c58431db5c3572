import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strobo.clock import ClockDistribution
from strobo.errors import ContractViolation
from strobo.evolution import (Propagator, StateVector, compose_check, constrained_expectation, discrete_step, evolve,
                              expectation, run_steps, stationary_residual)
from strobo.lattice import AngularGrid, angular_eigenfunction, build_case_a, build_case_b, case_a_eigenvalues, \
    case_b_eigenvalues, constraint_projector
from strobo.operator import OperatorMatrix

clocks = st.sampled_from([ClockDistribution.delta(), ClockDistribution.gaussian(1.0), ClockDistribution.gaussian(0.2),
                          ClockDistribution.uniform(2.0)])


def test_eigenstate_picks_up_phase():
    grid = AngularGrid(16, 1.0, -0.5)
    H = build_case_b(grid)
    v = angular_eigenfunction(grid, 3)
    out = evolve(StateVector.of(v, H), H, 2.5)
    np.testing.assert_allclose(out.state.amplitudes, np.exp(-2.5j * case_b_eigenvalues(grid)[2]) * v, atol=1e-13)
    assert out.norm_ratio == pytest.approx(1, abs=1e-13)
    assert out.unitarity_defect < 1e-13


def test_non_hermitian_case_a_changes_norm_by_growth_rate():
    grid = AngularGrid(8, 1.0, 0.0)
    H = build_case_a(grid)
    v = angular_eigenfunction(grid, 2)
    tau = 0.7
    out = evolve(StateVector.of(v, H), H, tau)
    lam = case_a_eigenvalues(grid)[1]
    assert out.norm_ratio == pytest.approx(np.exp(tau * lam.imag), rel=1e-12)


@settings(deadline=None, max_examples=25)
@given(clocks, st.floats(0.05, 5.0), st.integers(0, 2**31))
def test_discrete_step_is_exact_translation(clock, T, seed):
    H = build_case_b(AngularGrid(12, 1.0, -0.5))
    rng = np.random.default_rng(seed)
    psi = StateVector.of(rng.normal(size=12) + 1j * rng.normal(size=12), H)
    step = discrete_step(psi, H, clock, T)
    np.testing.assert_allclose(step.amplitudes, Propagator(H).apply(T, psi.amplitudes), atol=1e-10)


def test_run_steps_and_composition():
    H = build_case_b(AngularGrid(10, 2.0, 0.1))
    psi = StateVector.of(np.arange(10) + 1.0, H)
    states = run_steps(psi, H, ClockDistribution.gaussian(1.0), 0.5, 4)
    assert len(states) == 5
    np.testing.assert_allclose(states[-1].amplitudes, Propagator(H).apply(2.0, psi.amplitudes), atol=1e-12)
    assert compose_check(H, 0.4, -1.3) < 1e-12


def test_sparse_path_above_dense_limit():
    grid = AngularGrid(4100, 1.0, -0.5)
    H = build_case_b(grid)
    prop = Propagator(H)
    v = angular_eigenfunction(grid, 5)
    np.testing.assert_allclose(prop.apply(0.3, v), np.exp(-0.3j * case_b_eigenvalues(grid)[4]) * v, atol=1e-10)


def test_stationary_residual_of_eigenstate():
    grid = AngularGrid(8, 1.0, 0.25)
    H = build_case_b(grid)
    psi = StateVector.of(angular_eigenfunction(grid, 1), H)
    assert stationary_residual(psi, H, case_b_eigenvalues(grid)[0]) < 1e-14


def test_expectation_contracts():
    grid = AngularGrid(8, 1.0, -0.5)
    H = build_case_b(grid)
    v = angular_eigenfunction(grid, 2)
    psi = StateVector.of(v, H)
    assert expectation(psi, H) == pytest.approx(case_b_eigenvalues(grid)[1], abs=1e-13)
    with pytest.raises(ContractViolation):
        expectation(StateVector.of(2 * v, H, normalize=False), H)
    P = constraint_projector(H, case_b_eigenvalues(grid)[1])
    assert constrained_expectation(psi, H, P) == pytest.approx(case_b_eigenvalues(grid)[1], abs=1e-12)
    with pytest.raises(ContractViolation):
        constrained_expectation(psi, H, H)


def test_state_contracts():
    H = build_case_b(AngularGrid(4))
    with pytest.raises(ContractViolation):
        StateVector.of(np.zeros(4), H)
    with pytest.raises(ContractViolation):
        StateVector.of(np.ones(5), H)
    psi = StateVector.of(np.ones(4), H)
    other = OperatorMatrix.from_array(np.eye(4))
    with pytest.raises(ContractViolation):
        discrete_step(psi, other, ClockDistribution.delta(), 1.0)
    with pytest.raises(ContractViolation):
        discrete_step(psi, H, ClockDistribution.delta(), 0.0)
