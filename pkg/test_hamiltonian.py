"""
Tests for Hamiltonian construction and PT symmetry.
"""
from itertools import product

import numpy as np
import pytest

from core.hamiltonian import (
    ORDERED, PAIRWISE, QubitParams, SystemConfig, build_hamiltonian, exceptional_drive, kronecker_sum,
    ladder_operator, parity_operator, pt_hamiltonian, pt_symmetry_residual, single_qubit_eigenvalues,
    uniform_coupling
)


def test_ladder_operator_maps_f_to_e():
    sigma = ladder_operator(1, 1)
    np.testing.assert_array_equal(sigma @ np.array([1, 0]), [0, 1])
    np.testing.assert_array_equal(sigma @ sigma.conj().T, np.diag([0, 1]))


def test_ladder_operator_acts_on_most_significant_qubit_first():
    # qubit 1 of |ff> -> |ef>, standard index 2
    sigma = ladder_operator(2, 1)
    assert sigma[2, 0] == 1
    assert np.count_nonzero(sigma) == 2


def test_single_qubit_matrix():
    H = build_hamiltonian(SystemConfig.uniform(1, omega=1.2, gamma=0.8, delta=0.3))
    expected = np.array([[0, 1.2], [1.2, 0.3 - 0.4j]])
    np.testing.assert_allclose(H, expected)


def test_single_qubit_closed_form_eigenvalues(rng):
    for _ in range(20):
        omega, gamma, delta = rng.uniform(0.1, 3), rng.uniform(0, 8), rng.uniform(-1, 1)
        H = build_hamiltonian(SystemConfig.uniform(1, omega=omega, gamma=gamma, delta=delta))
        numeric = np.sort_complex(np.linalg.eigvals(H))
        closed = np.sort_complex(np.array(single_qubit_eigenvalues(omega, gamma, delta)))
        np.testing.assert_allclose(numeric, closed, atol=1e-12)


def test_uncoupled_hamiltonian_is_kronecker_sum():
    single = build_hamiltonian(SystemConfig.uniform(1, omega=1.576, gamma=6.0))
    H = build_hamiltonian(SystemConfig.uniform(3, omega=1.576, gamma=6.0))
    np.testing.assert_allclose(H, kronecker_sum([single] * 3), atol=1e-15)


def test_hermitian_without_decay(rng):
    qubits = tuple(QubitParams(omega=w, delta=d) for w, d in zip(rng.uniform(0, 2, 3), rng.uniform(-1, 1, 3)))
    coupling = uniform_coupling(3, 0.0)
    coupling[0, 1] = coupling[1, 0] = 0.3
    coupling[1, 2] = coupling[2, 1] = -0.2
    H = build_hamiltonian(SystemConfig(qubits=qubits, coupling=coupling))
    np.testing.assert_allclose(H, H.conj().T, atol=1e-15)


def test_exchange_coupling_element():
    H = build_hamiltonian(SystemConfig.uniform(2, omega=0.0, coupling=0.7))
    # <fe|H|ef> = J; |fe> is index 1, |ef> is index 2
    assert H[1, 2] == pytest.approx(0.7)
    assert H[2, 1] == pytest.approx(0.7)
    assert H[0, 3] == 0


def test_ordered_convention_doubles_coupling():
    ordered = build_hamiltonian(SystemConfig.uniform(3, omega=1.0, gamma=2.0, coupling=0.1, convention=ORDERED))
    pairwise = build_hamiltonian(SystemConfig.uniform(3, omega=1.0, gamma=2.0, coupling=0.2, convention=PAIRWISE))
    np.testing.assert_allclose(ordered, pairwise, atol=1e-15)


def test_pt_residual_vanishes_for_zero_detuning(rng):
    for n in (1, 2, 3, 4):
        qubits = tuple(QubitParams(omega=w, gamma=g) for w, g in zip(rng.uniform(0, 3, n), rng.uniform(0, 8, n)))
        coupling = rng.uniform(-0.1, 0.1, (n, n))
        coupling = np.triu(coupling, 1)
        coupling = coupling + coupling.T
        assert pt_symmetry_residual(SystemConfig(qubits=qubits, coupling=coupling)) <= 1e-12


def test_pt_residual_nonzero_for_unbalanced_shift():
    config = SystemConfig.uniform(2, omega=1.0, gamma=4.0)
    H = build_hamiltonian(config)
    P = parity_operator(2)
    assert np.linalg.norm(P @ H.conj() @ P - H) > 1.0


def test_pt_hamiltonian_requires_zero_detuning():
    with pytest.raises(ValueError, match="detuning"):
        pt_hamiltonian(SystemConfig.uniform(2, omega=1.0, gamma=1.0, delta=0.1))


def test_exceptional_drive():
    assert exceptional_drive(6.0) == 1.5
    low, high = single_qubit_eigenvalues(1.5, 6.0)
    assert abs(low - high) < 1e-12


@pytest.mark.parametrize("kwargs, message", [
    (dict(omega=1.0, gamma=-1.0), "gamma"),
    (dict(omega=float("nan")), "finite"),
])
def test_qubit_params_validation(kwargs, message):
    with pytest.raises(ValueError, match=message):
        QubitParams(**kwargs)


def test_system_config_validation():
    qubits = (QubitParams(omega=1.0),) * 2
    with pytest.raises(ValueError, match="symmetric"):
        SystemConfig(qubits=qubits, coupling=np.array([[0, 1.0], [0.5, 0]]))
    with pytest.raises(ValueError, match="diagonal"):
        SystemConfig(qubits=qubits, coupling=np.array([[0.1, 0], [0, 0]]))
    with pytest.raises(ValueError, match="2x2"):
        SystemConfig(qubits=qubits, coupling=np.zeros((3, 3)))
    with pytest.raises(ValueError, match="convention"):
        SystemConfig(qubits=qubits, coupling=0.0, convention="sideways")
    with pytest.raises(ValueError, match="Qubit count"):
        SystemConfig(qubits=(), coupling=0.0)


def test_scalar_coupling_becomes_uniform_matrix():
    config = SystemConfig(qubits=(QubitParams(omega=1.0),) * 3, coupling=0.25)
    np.testing.assert_array_equal(config.coupling, uniform_coupling(3, 0.25))
    assert config == SystemConfig.uniform(3, omega=1.0, coupling=0.25)


def test_with_parameter():
    config = SystemConfig.uniform(3, omega=1.0, gamma=6.0, coupling=1e-3)
    assert np.all(config.with_parameter("omega", 1.5).omegas == 1.5)
    assert config.with_parameter("J", 0.2).coupling[0, 2] == 0.2
    assert np.all(config.with_parameter("gamma", 2.0).gammas == 2.0)
    assert config.omegas[0] == 1.0
    with pytest.raises(ValueError, match="Unknown parameter"):
        config.with_parameter("phi", 1.0)


def random_config(rng, n: int) -> SystemConfig:
    qubits = tuple(QubitParams(omega=w, delta=d, gamma=g)
                   for w, d, g in zip(rng.uniform(0, 3, n), rng.uniform(-1, 1, n), rng.uniform(0, 8, n)))
    coupling = np.triu(rng.uniform(-0.2, 0.2, (n, n)), 1)
    return SystemConfig(qubits=qubits, coupling=coupling + coupling.T)


def test_hamiltonian_is_complex_symmetric(rng):
    for n in (1, 2, 3, 4):
        H = build_hamiltonian(random_config(rng, n))
        np.testing.assert_allclose(H, H.T, atol=1e-15)


def test_trace_equals_eigenvalue_sum(rng):
    for n in (1, 2, 3):
        config = random_config(rng, n)
        H = build_hamiltonian(config)
        assert np.trace(H) == pytest.approx(np.sum(np.linalg.eigvals(H)), abs=1e-10)
        # each qubit contributes 2^(n-1) (Delta_j - i gamma_j / 2)
        expected = 2 ** (n - 1) * np.sum(config.deltas - 0.5j * config.gammas)
        assert np.trace(H) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("omega", [1.6, 2.2, 3.0])
def test_broken_drive_spectrum_has_common_decay(n, omega):
    gamma = 6.0
    eigenvalues = np.linalg.eigvals(build_hamiltonian(SystemConfig.uniform(n, omega=omega, gamma=gamma)))
    np.testing.assert_allclose(eigenvalues.imag, -n * gamma / 4, atol=1e-9)


@pytest.mark.parametrize("n", [2, 3])
def test_uncoupled_spectrum_is_sum_of_single_qubit_spectra(n):
    omega, gamma, delta = 2.2, 6.0, 0.3
    single = single_qubit_eigenvalues(omega, gamma, delta)
    sums = np.array([sum(combo) for combo in product(single, repeat=n)])
    numeric = np.linalg.eigvals(build_hamiltonian(SystemConfig.uniform(n, omega=omega, gamma=gamma, delta=delta)))
    np.testing.assert_allclose(np.sort_complex(numeric), np.sort_complex(sums), atol=1e-10)


def test_single_qubit_pt_hamiltonian():
    H_pt = pt_hamiltonian(SystemConfig.uniform(1, omega=1.5, gamma=6.0))
    np.testing.assert_allclose(H_pt, np.array([[1.5j, 1.5], [1.5, -1.5j]]), atol=1e-15)
