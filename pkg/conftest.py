"""
Shared pytest fixtures.
"""
import sys
from pathlib import Path

import numpy as np
import pytest

# Add src to Python path for absolute imports
src_dir = Path(__file__).parent / "src"
sys.path.insert(0, str(src_dir))

from core.dynamics import QuantumState, initial_state  # noqa: E402
from core.hamiltonian import SystemConfig  # noqa: E402

# Three qubits near the EP: Omega = 1.576, gamma = 6, J = 1e-3 (rad/us)
TRIPARTITE = dict(omega=1.576, gamma=6.0, coupling=1e-3)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def tripartite_config() -> SystemConfig:
    return SystemConfig.uniform(3, **TRIPARTITE)


@pytest.fixture
def coherent3() -> QuantumState:
    return initial_state("coherent", 3)


def random_state(rng: np.random.Generator, n: int) -> QuantumState:
    vector = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    return QuantumState.from_amplitudes(vector)


def random_density_matrix(rng: np.random.Generator, dim: int) -> np.ndarray:
    G = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = G @ G.conj().T
    return rho / np.trace(rho).real


def overlap_fidelity(a: QuantumState, b: QuantumState) -> float:
    return abs(a.overlap(b))
