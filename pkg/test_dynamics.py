"""
Tests for normalized non-unitary propagation.
"""
import numpy as np
import pytest
from scipy.integrate import solve_ivp

from conftest import overlap_fidelity, random_state
from core.dynamics import (
    BasisOrdering, QuantumState, amplitudes_and_phases, basis_label, initial_state, matrix_exponential,
    modal_propagate, propagate, propagate_series
)
from core.errors import DefectiveDecompositionError, NumericalFailure
from core.hamiltonian import SystemConfig, build_hamiltonian, pt_hamiltonian
from core.spectral import eigendecompose


def test_state_must_be_normalized():
    with pytest.raises(ValueError, match="normalized"):
        QuantumState(n=1, amplitudes=np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        QuantumState(n=2, amplitudes=np.array([1.0, 0.0]))
    state = QuantumState.from_amplitudes([3, 4j])
    np.testing.assert_allclose(state.probabilities, [0.36, 0.64])


def test_coherent_state_moduli():
    state = initial_state("coherent", 3)
    np.testing.assert_allclose(np.abs(state.amplitudes), 1 / (2 * np.sqrt(2)), atol=1e-15)
    # (|f> - i|e>)^(x)3: |eee> carries (-i)^3 = i
    assert state.amplitudes[-1] == pytest.approx(1j / (2 * np.sqrt(2)))


def test_initial_state_kinds():
    assert initial_state("all_f", 2).amplitudes[0] == 1
    assert initial_state("all_e", 2).amplitudes[3] == 1
    custom = initial_state("custom", 1, [1, 1j])
    np.testing.assert_allclose(custom.amplitudes, np.array([1, 1j]) / np.sqrt(2))
    with pytest.raises(ValueError, match="n=1"):
        initial_state("custom", 2, [1, 0])
    with pytest.raises(ValueError, match="Unknown initial state"):
        initial_state("thermal", 2)
    with pytest.raises(ValueError, match="requires amplitudes"):
        initial_state("custom", 1)


def test_excitation_grouped_ordering():
    ordering = BasisOrdering.excitation_grouped(3)
    assert ordering.labels == ["fff", "ffe", "fef", "eff", "fee", "efe", "eef", "eee"]
    assert basis_label(6, 3) == "eef"
    assert BasisOrdering.standard(2).labels == ["ff", "fe", "ef", "ee"]


def test_phases_in_principal_range():
    state = QuantumState.from_amplitudes([-1.0, 1j, -1j, 1.0])
    moduli, phases = amplitudes_and_phases(state, BasisOrdering.standard(2))
    np.testing.assert_allclose(moduli, 0.5)
    np.testing.assert_allclose(phases, [np.pi, np.pi / 2, -np.pi / 2, 0.0])


def test_propagate_time_zero_is_identity(tripartite_config, coherent3):
    state, prenorm = propagate(build_hamiltonian(tripartite_config), coherent3, 0.0)
    assert state is coherent3
    assert prenorm == 1.0


def test_propagate_rejects_negative_time_and_mismatch(tripartite_config, coherent3):
    H = build_hamiltonian(tripartite_config)
    with pytest.raises(ValueError, match="non-negative"):
        propagate(H, coherent3, -1.0)
    with pytest.raises(ValueError, match="Dimension mismatch"):
        propagate(H, initial_state("all_f", 2), 1.0)


def test_hermitian_prenorm_is_one(rng):
    config = SystemConfig.uniform(3, omega=1.576, coupling=0.05)
    trajectory = propagate_series(build_hamiltonian(config), random_state(rng, 3), np.linspace(0, 10, 21))
    np.testing.assert_allclose(trajectory.prenorm, 1.0, atol=1e-9)


def test_dissipation_shrinks_prenorm(tripartite_config, coherent3):
    trajectory = propagate_series(build_hamiltonian(tripartite_config), coherent3, [0.0, 1.0, 2.0])
    assert trajectory.prenorm[0] == 1.0
    assert trajectory.prenorm[2] < trajectory.prenorm[1] < 1.0


def test_split_step_invariance(tripartite_config, coherent3):
    H = build_hamiltonian(tripartite_config)
    direct, _ = propagate(H, coherent3, 3.1)
    halfway, _ = propagate(H, coherent3, 1.3)
    split, _ = propagate(H, halfway, 1.8)
    np.testing.assert_allclose(split.amplitudes, direct.amplitudes, atol=1e-9)


def test_matches_adaptive_ode(tripartite_config, coherent3):
    # The PT shift keeps the unnormalized norm O(1) without changing normalized states.
    H_pt = pt_hamiltonian(tripartite_config)
    times = np.linspace(0.0, 6.5, 27)
    solution = solve_ivp(lambda t, y: -1j * (H_pt @ y), (0.0, 6.5), coherent3.amplitudes.astype(complex),
                         t_eval=times, method="DOP853", rtol=1e-12, atol=1e-14)
    assert solution.success
    trajectory = propagate_series(build_hamiltonian(tripartite_config), coherent3, times)
    for k in range(len(times)):
        reference = solution.y[:, k] / np.linalg.norm(solution.y[:, k])
        np.testing.assert_allclose(trajectory.states[k].amplitudes, reference, atol=1e-7)


def test_modal_matches_exponential_when_well_conditioned(coherent3):
    config = SystemConfig.uniform(3, omega=3.0, gamma=6.0, coupling=1e-3)
    H = build_hamiltonian(config)
    decomp = eigendecompose(H)
    assert decomp.supports_modal_propagation
    for t in (0.5, 2.0, 6.5):
        expected, _ = propagate(H, coherent3, t)
        np.testing.assert_allclose(modal_propagate(decomp, coherent3, t).amplitudes, expected.amplitudes,
                                   atol=1e-8)


def test_modal_refused_at_exceptional_point():
    decomp = eigendecompose(build_hamiltonian(SystemConfig.uniform(1, omega=1.5, gamma=6.0)))
    with pytest.raises(DefectiveDecompositionError):
        modal_propagate(decomp, initial_state("all_f", 1), 1.0)


def test_matrix_exponential_overflow():
    with pytest.raises(NumericalFailure):
        matrix_exponential(1000.0 * np.eye(2))
    np.testing.assert_allclose(matrix_exponential(np.zeros((2, 2))), np.eye(2))


def test_propagate_series_requires_increasing_times(tripartite_config, coherent3):
    with pytest.raises(ValueError, match="increasing"):
        propagate_series(build_hamiltonian(tripartite_config), coherent3, [1.0, 0.5])


def test_nonhermitian_revival_period(coherent3):
    omega, gamma = 1.576, 6.0
    period = 4 * np.pi / np.sqrt(16 * omega ** 2 - gamma ** 2)
    assert period == pytest.approx(6.497, abs=1e-3)
    state, _ = propagate(build_hamiltonian(SystemConfig.uniform(3, omega=omega, gamma=gamma)), coherent3, period)
    assert overlap_fidelity(state, coherent3) >= 0.999


def test_hermitian_revival_period(coherent3):
    omega = 1.576
    state, _ = propagate(build_hamiltonian(SystemConfig.uniform(3, omega=omega)), coherent3, np.pi / omega)
    assert overlap_fidelity(state, coherent3) >= 0.9999


def test_trajectory_table_layout(tripartite_config, coherent3):
    trajectory = propagate_series(build_hamiltonian(tripartite_config), coherent3, [0.0, 1.0])
    header = trajectory.header()
    assert header[:3] == ["time", "prenorm", "abs_fff"]
    assert len(header) == 2 + 16
    rows = trajectory.to_rows()
    assert len(rows) == 2 and all(len(row) == len(header) for row in rows)


def test_matrix_exponential_quarter_turn():
    sigma_x = np.array([[0, 1], [1, 0]], dtype=complex)
    np.testing.assert_allclose(matrix_exponential(-0.5j * np.pi * sigma_x), -1j * sigma_x, atol=1e-14)


def test_decay_never_grows_the_norm(rng):
    times = np.linspace(0.0, 8.0, 17)
    for _ in range(10):
        n = int(rng.integers(1, 4))
        config = SystemConfig.uniform(n, omega=rng.uniform(0, 3), gamma=rng.uniform(0, 8),
                                      delta=rng.uniform(-1, 1), coupling=rng.uniform(0, 0.1))
        prenorm = propagate_series(build_hamiltonian(config), random_state(rng, n), times).prenorm
        assert np.all(prenorm <= 1.0 + 1e-12)
        assert np.all(np.diff(prenorm) <= 1e-12)


def test_hermitian_norm_preserved_at_long_times(coherent3):
    H = build_hamiltonian(SystemConfig.uniform(3, omega=1.576, delta=0.2, coupling=0.05))
    _, prenorm = propagate(H, coherent3, 100.0)
    assert prenorm == pytest.approx(1.0, abs=1e-9)
