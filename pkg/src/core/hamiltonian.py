"""
Driven, dissipative, weakly coupled non-Hermitian qubit Hamiltonians.

Each qubit lives in the {|f>, |e>} manifold with |f> -> index 0 and |e> -> index 1.
Qubit 1 is the most significant tensor factor. The lowering operator is
sigma = |e><f| and sigma^dagger = |f><e|, so sigma sigma^dagger = |e><e|.
"""
from dataclasses import dataclass, field, replace
from functools import reduce
from typing import Iterable, Sequence, Tuple

import numpy as np

from config.settings import N_MAX

PAIRWISE = "pairwise"
ORDERED = "ordered"
COUPLING_CONVENTIONS = (PAIRWISE, ORDERED)
DEFAULT_CONVENTION = PAIRWISE

SWEEPABLE_PARAMETERS = ("omega", "delta", "gamma", "J")

_IDENTITY = np.eye(2, dtype=np.complex128)
_SIGMA_DAG = np.array([[0, 1], [0, 0]], dtype=np.complex128)  # |f><e|
_SIGMA = np.array([[0, 0], [1, 0]], dtype=np.complex128)  # |e><f|
_SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)


@dataclass(frozen=True)
class QubitParams:
    """Drive amplitude, detuning and decay rate of one qubit (rad/us)."""

    omega: float
    delta: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        for name in ("omega", "delta", "gamma"):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be non-negative, got {self.gamma}")


@dataclass(frozen=True, eq=False)
class SystemConfig:
    """Full physical specification of n coupled qubits."""

    qubits: Tuple[QubitParams, ...]
    coupling: np.ndarray = field(repr=False)
    convention: str = DEFAULT_CONVENTION

    def __post_init__(self):
        qubits = tuple(self.qubits)
        object.__setattr__(self, "qubits", qubits)
        n = len(qubits)
        if not 1 <= n <= N_MAX:
            raise ValueError(f"Qubit count must be between 1 and {N_MAX}, got {n}")

        coupling = np.array(self.coupling, dtype=float)
        if coupling.ndim == 0:
            coupling = uniform_coupling(n, float(coupling))
        if coupling.shape != (n, n):
            raise ValueError(f"Coupling matrix must be {n}x{n}, got {coupling.shape}")
        if not np.all(np.isfinite(coupling)):
            raise ValueError("Coupling matrix entries must be finite")
        if not np.array_equal(coupling, coupling.T):
            raise ValueError("Coupling matrix must be symmetric")
        if np.any(np.diag(coupling) != 0):
            raise ValueError("Coupling matrix diagonal must be exactly zero")
        coupling.setflags(write=False)
        object.__setattr__(self, "coupling", coupling)

        if self.convention not in COUPLING_CONVENTIONS:
            raise ValueError(
                f"Unknown coupling convention '{self.convention}'. Supported: {list(COUPLING_CONVENTIONS)}"
            )

    @classmethod
    def uniform(cls, n: int, omega: float, gamma: float = 0.0, delta: float = 0.0,
                coupling: float = 0.0, convention: str = DEFAULT_CONVENTION) -> "SystemConfig":
        """Identical qubits with uniform all-to-all coupling."""
        qubit = QubitParams(omega=omega, delta=delta, gamma=gamma)
        return cls(qubits=(qubit,) * n, coupling=uniform_coupling(n, coupling), convention=convention)

    @property
    def n(self) -> int:
        return len(self.qubits)

    @property
    def dim(self) -> int:
        return 2 ** self.n

    @property
    def omegas(self) -> np.ndarray:
        return np.array([q.omega for q in self.qubits])

    @property
    def deltas(self) -> np.ndarray:
        return np.array([q.delta for q in self.qubits])

    @property
    def gammas(self) -> np.ndarray:
        return np.array([q.gamma for q in self.qubits])

    def with_parameter(self, name: str, value: float) -> "SystemConfig":
        """Copy with one parameter set on every qubit (or uniform coupling for 'J')."""
        if name == "J":
            return replace(self, coupling=uniform_coupling(self.n, value))
        if name not in SWEEPABLE_PARAMETERS:
            raise ValueError(f"Unknown parameter '{name}'. Supported: {list(SWEEPABLE_PARAMETERS)}")
        qubits = tuple(replace(q, **{name: value}) for q in self.qubits)
        return replace(self, qubits=qubits)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SystemConfig):
            return NotImplemented
        return (self.qubits == other.qubits and self.convention == other.convention
                and np.array_equal(self.coupling, other.coupling))

    __hash__ = None


def uniform_coupling(n: int, value: float) -> np.ndarray:
    """Symmetric n x n coupling matrix with constant off-diagonal entries."""
    coupling = np.full((n, n), float(value))
    np.fill_diagonal(coupling, 0.0)
    return coupling


def _embed(single: np.ndarray, n: int, j: int) -> np.ndarray:
    factors = [single if k == j else _IDENTITY for k in range(1, n + 1)]
    return reduce(np.kron, factors)


def ladder_operator(n: int, j: int, dagger: bool = False) -> np.ndarray:
    """
    Embed sigma_j (|e><f|) or sigma_j^dagger (|f><e|) into the 2^n-dimensional space.

    Args:
        n: Number of qubits
        j: Qubit index, 1-based
        dagger: Return sigma_j^dagger instead of sigma_j
    """
    if not 1 <= n <= N_MAX:
        raise ValueError(f"Qubit count must be between 1 and {N_MAX}, got {n}")
    if not 1 <= j <= n:
        raise ValueError(f"Qubit index {j} out of range for n={n}")
    return _embed(_SIGMA_DAG if dagger else _SIGMA, n, j)


def parity_operator(n: int) -> np.ndarray:
    """n-fold tensor power of the single-qubit parity exchanging |e> and |f>."""
    return reduce(np.kron, [_SIGMA_X] * n)


def build_hamiltonian(config: SystemConfig) -> np.ndarray:
    """
    Dense non-Hermitian Hamiltonian of the coupled qubits.

    H = sum_j [(Delta_j - i gamma_j / 2) |e><e|_j + Omega_j sigma^x_j]
        + c * sum_{j<k} J_jk (sigma_j^dagger sigma_k + sigma_j sigma_k^dagger)

    with c = 1 for the pairwise convention and c = 2 for the ordered double sum.
    """
    n = config.n
    lowering = [ladder_operator(n, j) for j in range(1, n + 1)]
    raising = [op.conj().T for op in lowering]

    H = np.zeros((config.dim, config.dim), dtype=np.complex128)
    for j, qubit in enumerate(config.qubits):
        H += (qubit.delta - 0.5j * qubit.gamma) * (lowering[j] @ raising[j])
        H += qubit.omega * (lowering[j] + raising[j])

    factor = 2.0 if config.convention == ORDERED else 1.0
    for j in range(n):
        for k in range(j + 1, n):
            J = config.coupling[j, k]
            if J == 0.0:
                continue
            hop = raising[j] @ lowering[k]
            H += factor * J * (hop + hop.conj().T)
    return H


def _require_zero_detuning(config: SystemConfig) -> None:
    if np.any(config.deltas != 0):
        raise ValueError("Passive PT symmetry requires all detunings to be zero")


def pt_hamiltonian(config: SystemConfig) -> np.ndarray:
    """H shifted by i * sum_j gamma_j / 4 so that it commutes with PT."""
    _require_zero_detuning(config)
    shift = 0.25j * float(np.sum(config.gammas))
    return build_hamiltonian(config) + shift * np.eye(config.dim, dtype=np.complex128)


def pt_symmetry_residual(config: SystemConfig) -> float:
    """Frobenius norm of [PT, H_PT], i.e. ||P conj(H_PT) P - H_PT||_F."""
    H_pt = pt_hamiltonian(config)
    P = parity_operator(config.n)
    return float(np.linalg.norm(P @ H_pt.conj() @ P - H_pt))


def single_qubit_eigenvalues(omega: float, gamma: float, delta: float = 0.0) -> Tuple[complex, complex]:
    """Closed-form eigenvalues of one qubit: a/2 -/+ sqrt(Omega^2 + a^2/4), a = Delta - i gamma/2."""
    a = delta - 0.5j * gamma
    root = np.sqrt(omega ** 2 + a ** 2 / 4 + 0j)
    return a / 2 - root, a / 2 + root


def exceptional_drive(gamma: float) -> float:
    """Drive amplitude of the resonant single-qubit EP, Omega = gamma / 4."""
    return gamma / 4


def kronecker_sum(blocks: Sequence[np.ndarray]) -> np.ndarray:
    """Sum of each block embedded on its own tensor factor."""
    dims = [b.shape[0] for b in blocks]
    total = np.zeros((int(np.prod(dims)),) * 2, dtype=np.complex128)
    for idx, block in enumerate(blocks):
        factors: Iterable[np.ndarray] = [
            block if k == idx else np.eye(d, dtype=np.complex128) for k, d in enumerate(dims)
        ]
        total += reduce(np.kron, factors)
    return total
