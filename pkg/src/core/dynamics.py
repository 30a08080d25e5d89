"""
Normalized non-unitary time evolution and basis amplitude/phase extraction.

psi(t) = exp(-iHt) psi(0) / ||exp(-iHt) psi(0)||
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from config.settings import N_MAX
from core.errors import DefectiveDecompositionError, NumericalFailure
from core.spectral import SpectralDecomposition

logger = logging.getLogger(__name__)

NORM_TOL = 1e-12
INITIAL_STATE_KINDS = ("coherent", "all_f", "all_e", "custom")


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Normalized amplitudes over the 2^n basis in standard tensor-product order."""

    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if amplitudes.shape != (2 ** self.n,):
            raise ValueError(f"Expected {2 ** self.n} amplitudes for n={self.n}, got shape {amplitudes.shape}")
        norm = np.linalg.norm(amplitudes)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"State is not normalized (norm={norm:.15g})")
        amplitudes.setflags(write=False)
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def from_amplitudes(cls, amplitudes: Sequence[complex]) -> "QuantumState":
        """Normalize an arbitrary nonzero amplitude vector of length 2^n."""
        vector = np.asarray(amplitudes, dtype=np.complex128)
        n = int(round(np.log2(vector.size))) if vector.size else 0
        if vector.ndim != 1 or n < 1 or 2 ** n != vector.size:
            raise ValueError(f"Amplitude vector length must be a power of two >= 2, got {vector.size}")
        norm = np.linalg.norm(vector)
        if norm == 0 or not np.isfinite(norm):
            raise ValueError("Cannot normalize a zero or non-finite amplitude vector")
        return cls(n=n, amplitudes=vector / norm)

    @property
    def dim(self) -> int:
        return 2 ** self.n

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def overlap(self, other: "QuantumState") -> complex:
        """<other|self>."""
        if other.n != self.n:
            raise ValueError(f"Dimension mismatch: n={self.n} vs n={other.n}")
        return complex(np.vdot(other.amplitudes, self.amplitudes))


@dataclass(frozen=True, eq=False)
class BasisOrdering:
    """Reporting order: position m holds standard basis index ``permutation[m]``."""

    n: int
    permutation: np.ndarray

    def __post_init__(self):
        permutation = np.asarray(self.permutation, dtype=int)
        if sorted(permutation.tolist()) != list(range(2 ** self.n)):
            raise ValueError("Basis ordering must be a permutation of the standard indices")
        object.__setattr__(self, "permutation", permutation)

    @classmethod
    def standard(cls, n: int) -> "BasisOrdering":
        return cls(n=n, permutation=np.arange(2 ** n))

    @classmethod
    def excitation_grouped(cls, n: int) -> "BasisOrdering":
        """Group basis states by excitation count, standard order within a group."""
        indices = range(2 ** n)
        return cls(n=n, permutation=np.array(sorted(indices, key=lambda i: (bin(i).count("1"), i))))

    @property
    def labels(self) -> List[str]:
        return [basis_label(int(i), self.n) for i in self.permutation]


def basis_label(index: int, n: int) -> str:
    """'f'/'e' string of a standard basis index, qubit 1 first."""
    return format(index, f"0{n}b").replace("0", "f").replace("1", "e")


def excitation_count(index: int) -> int:
    return bin(index).count("1")


def initial_state(kind: str, n: int, amplitudes: Optional[Sequence[complex]] = None) -> QuantumState:
    """
    Build a starting state.

    Args:
        kind: 'coherent' for 2^{-n/2}(|f> - i|e>)^{(x)n}, 'all_f', 'all_e' or 'custom'
        n: Number of qubits
        amplitudes: Unnormalized amplitudes for 'custom'
    """
    if not 1 <= n <= N_MAX:
        raise ValueError(f"Qubit count must be between 1 and {N_MAX}, got {n}")
    dim = 2 ** n
    if kind == "coherent":
        counts = np.array([excitation_count(i) for i in range(dim)])
        return QuantumState(n=n, amplitudes=(-1j) ** counts / 2 ** (n / 2))
    if kind in ("all_f", "all_e"):
        vector = np.zeros(dim, dtype=np.complex128)
        vector[0 if kind == "all_f" else dim - 1] = 1.0
        return QuantumState(n=n, amplitudes=vector)
    if kind == "custom":
        if amplitudes is None:
            raise ValueError("Custom initial state requires amplitudes")
        state = QuantumState.from_amplitudes(amplitudes)
        if state.n != n:
            raise ValueError(f"Custom amplitudes describe n={state.n} qubits, expected n={n}")
        return state
    raise ValueError(f"Unknown initial state kind '{kind}'. Supported: {list(INITIAL_STATE_KINDS)}")


def matrix_exponential(A: np.ndarray) -> np.ndarray:
    """exp(A) by scaling and squaring with Pade approximation."""
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"Expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("Matrix has non-finite entries")
    with np.errstate(over="ignore", invalid="ignore"):
        result = scipy.linalg.expm(A)
    if not np.all(np.isfinite(result)):
        raise NumericalFailure(f"Matrix exponential overflowed (||A||_1 = {np.linalg.norm(A, 1):.3e})")
    return result


def _check_dims(H: np.ndarray, psi0: QuantumState) -> np.ndarray:
    H = np.asarray(H, dtype=np.complex128)
    if H.shape != (psi0.dim, psi0.dim):
        raise ValueError(f"Dimension mismatch: H is {H.shape}, state has dimension {psi0.dim}")
    return H


def _normalize(vector: np.ndarray, n: int) -> Tuple[QuantumState, float]:
    prenorm = float(np.linalg.norm(vector))
    if prenorm == 0 or not np.isfinite(prenorm):
        raise NumericalFailure(f"Propagated state has norm {prenorm}")
    return QuantumState(n=n, amplitudes=vector / prenorm), prenorm


def propagate(H: np.ndarray, psi0: QuantumState, t: float) -> Tuple[QuantumState, float]:
    """Normalized state at time t and the pre-normalization norm ||exp(-iHt) psi0||."""
    H = _check_dims(H, psi0)
    if t < 0:
        raise ValueError(f"Time must be non-negative, got {t}")
    if t == 0:
        return psi0, 1.0
    return _normalize(matrix_exponential(-1j * t * H) @ psi0.amplitudes, psi0.n)


@dataclass
class Trajectory:
    """States and pre-normalization norms on a time grid."""

    times: np.ndarray
    states: List[QuantumState]
    prenorm: np.ndarray

    def __post_init__(self):
        if not len(self.times) == len(self.states) == len(self.prenorm):
            raise ValueError("Trajectory fields must have equal lengths")

    @property
    def n(self) -> int:
        return self.states[0].n

    def header(self, ordering: Optional[BasisOrdering] = None) -> List[str]:
        ordering = ordering or BasisOrdering.excitation_grouped(self.n)
        labels = ordering.labels
        return ["time", "prenorm"] + [f"abs_{l}" for l in labels] + [f"arg_{l}" for l in labels]

    def to_rows(self, ordering: Optional[BasisOrdering] = None) -> List[list]:
        ordering = ordering or BasisOrdering.excitation_grouped(self.n)
        rows = []
        for t, state, norm in zip(self.times, self.states, self.prenorm):
            moduli, phases = amplitudes_and_phases(state, ordering)
            rows.append([float(t), float(norm)] + list(moduli) + list(phases))
        return rows


def _check_times(times: Sequence[float]) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("Time grid must be a nonempty 1-D sequence")
    if np.any(np.diff(times) <= 0):
        raise ValueError("Time grid must be strictly increasing")
    if times[0] < 0:
        raise ValueError("Times must be non-negative")
    return times


def propagate_series(H: np.ndarray, psi0: QuantumState, times: Sequence[float]) -> Trajectory:
    """Independent propagate() at every requested time."""
    H = _check_dims(H, psi0)
    times = _check_times(times)
    states, norms = [], []
    for t in times:
        state, prenorm = propagate(H, psi0, float(t))
        states.append(state)
        norms.append(prenorm)
    return Trajectory(times=times, states=states, prenorm=np.array(norms))


def modal_propagate(decomp: SpectralDecomposition, psi0: QuantumState, t: float) -> QuantumState:
    """sum_m <l_m|psi0> exp(-i E_m t) |r_m>, normalized. Refuses ill-conditioned decompositions."""
    if decomp.dim != psi0.dim:
        raise ValueError(f"Dimension mismatch: decomposition {decomp.dim}, state {psi0.dim}")
    if not decomp.supports_modal_propagation:
        raise DefectiveDecompositionError(
            f"Decomposition is defective-adjacent (condition number {decomp.condition_number:.3e}); "
            "use propagate() instead"
        )
    coefficients = decomp.left_vectors @ psi0.amplitudes
    vector = decomp.right_vectors @ (coefficients * np.exp(-1j * decomp.eigenvalues * t))
    return _normalize(vector, psi0.n)[0]


def amplitudes_and_phases(state: QuantumState,
                          ordering: Optional[BasisOrdering] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Moduli |alpha_m| and principal arguments in (-pi, pi], in reporting order."""
    ordering = ordering or BasisOrdering.excitation_grouped(state.n)
    if ordering.n != state.n:
        raise ValueError(f"Ordering is for n={ordering.n}, state has n={state.n}")
    alpha = state.amplitudes[ordering.permutation]
    phases = np.angle(alpha)
    phases[phases <= -np.pi] += 2 * np.pi
    return np.abs(alpha), phases
