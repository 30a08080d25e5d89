"""
Entanglement measures of pure n-qubit states: reduced density matrices,
entropies (nats), purities, Bloch vectors, concurrences, three-tangle and
GHZ fidelities.
"""
import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

import numpy as np
import scipy.linalg

from config.settings import DENSITY_EIG_TOL, TANGLE_CLAMP_LOG_TOL
from core.dynamics import QuantumState, excitation_count

logger = logging.getLogger(__name__)

_SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
_SPIN_FLIP = np.kron(_SIGMA_Y, _SIGMA_Y)


def partial_trace(state: QuantumState, keep: Iterable[int]) -> np.ndarray:
    """Reduced density matrix of the kept qubits (1-based indices), standard ordering."""
    keep = sorted(set(keep))
    if not keep:
        raise ValueError("Keep set must be nonempty")
    if keep[0] < 1 or keep[-1] > state.n:
        raise ValueError(f"Keep indices {keep} out of range for n={state.n}")
    kept_axes = [j - 1 for j in keep]
    traced_axes = [a for a in range(state.n) if a not in kept_axes]
    tensor = state.amplitudes.reshape((2,) * state.n).transpose(kept_axes + traced_axes)
    matrix = tensor.reshape(2 ** len(keep), -1)
    return matrix @ matrix.conj().T


def reduced_qubit(state: QuantumState, j: int) -> np.ndarray:
    return partial_trace(state, [j])


def two_qubit_reduction(state: QuantumState, j: int, k: int) -> np.ndarray:
    if j == k:
        raise ValueError(f"Two-qubit reduction needs distinct qubits, got {j} twice")
    return partial_trace(state, [j, k])


def check_density_matrix(rho: np.ndarray, tol: float = DENSITY_EIG_TOL) -> np.ndarray:
    """Validate hermiticity, unit trace and positivity; clamp tiny negative eigenvalues."""
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"Density matrix must be square, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise ValueError("Density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise ValueError(f"Density matrix trace is {np.trace(rho).real:.12g}, expected 1")
    if np.min(scipy.linalg.eigvalsh(rho)) < -tol:
        raise ValueError("Density matrix has negative eigenvalues")
    return rho


def density_spectrum(rho: np.ndarray) -> np.ndarray:
    """Eigenvalues of a density matrix with roundoff negatives clamped to zero."""
    eigenvalues = scipy.linalg.eigvalsh(check_density_matrix(rho))
    if np.any(eigenvalues < 0):
        logger.debug("Clamping density eigenvalues %s", eigenvalues[eigenvalues < 0])
    return np.clip(eigenvalues, 0.0, None)


def _shannon(probabilities: np.ndarray) -> float:
    p = probabilities[probabilities > 0]
    return float(-np.sum(p * np.log(p)))


def entanglement_entropy(rho: np.ndarray) -> float:
    """
    Single-qubit entropy from the closed-form eigenvalues
    lambda_pm = 1/2 +- 1/2 sqrt((rho_xx - rho_yy)^2 + 4 rho_xy rho_yx).
    """
    rho = check_density_matrix(rho)
    if rho.shape != (2, 2):
        raise ValueError(f"Closed-form entropy needs a 2x2 matrix, got {rho.shape}; use von_neumann_entropy")
    discriminant = ((rho[0, 0] - rho[1, 1]) ** 2 + 4 * rho[0, 1] * rho[1, 0]).real
    root = 0.5 * np.sqrt(min(max(discriminant, 0.0), 1.0))
    return _shannon(np.array([0.5 + root, 0.5 - root]))


def von_neumann_entropy(rho: np.ndarray) -> float:
    """-Tr(rho log rho) in nats for any dimension."""
    return _shannon(density_spectrum(rho))


def purity(rho: np.ndarray) -> float:
    rho = check_density_matrix(rho)
    return float(np.real(np.trace(rho @ rho)))


def bloch_vector(rho: np.ndarray) -> Tuple[float, float, float]:
    """(Tr rho sx, Tr rho sy, Tr rho sz) with |f> at the north pole."""
    rho = check_density_matrix(rho)
    if rho.shape != (2, 2):
        raise ValueError(f"Bloch vector needs a 2x2 matrix, got {rho.shape}")
    coherence = rho[0, 1]
    return float(2 * coherence.real), float(-2 * coherence.imag), float((rho[0, 0] - rho[1, 1]).real)


def concurrence(rho2: np.ndarray) -> float:
    """Wootters concurrence from the square roots of the eigenvalues of rho (sy x sy) rho* (sy x sy)."""
    rho2 = check_density_matrix(rho2)
    if rho2.shape != (4, 4):
        raise ValueError(f"Concurrence needs a 4x4 matrix, got {rho2.shape}")
    flipped = _SPIN_FLIP @ rho2.conj() @ _SPIN_FLIP
    eigenvalues = scipy.linalg.eigvals(rho2 @ flipped).real
    lambdas = np.sort(np.sqrt(np.clip(eigenvalues, 0.0, None)))[::-1]
    return float(max(0.0, lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]))


def bipartition_concurrence(purity_1: float) -> float:
    """C_1(rest) = sqrt(2 - 2 P_1) for a pure global state."""
    if not 0.5 - 1e-9 <= purity_1 <= 1 + 1e-9:
        raise ValueError(f"Single-qubit purity must lie in [0.5, 1], got {purity_1}")
    return float(np.sqrt(max(0.0, 2 - 2 * purity_1)))


def three_tangle(state: QuantumState) -> float:
    """Residual tangle C^2_1(23) - C^2_12 - C^2_13, clamped to [0, 1]."""
    if state.n != 3:
        raise ValueError(f"Three-tangle is defined for n=3, got n={state.n}")
    c1 = bipartition_concurrence(purity(reduced_qubit(state, 1)))
    c12 = concurrence(two_qubit_reduction(state, 1, 2))
    c13 = concurrence(two_qubit_reduction(state, 1, 3))
    tau = c1 ** 2 - c12 ** 2 - c13 ** 2
    clamped = min(max(tau, 0.0), 1.0)
    if abs(tau - clamped) > TANGLE_CLAMP_LOG_TOL:
        logger.warning("Three-tangle %.3e outside [0, 1]; clamped", tau)
    return clamped


def ghz_state(n: int, phase: float = 0.0) -> QuantumState:
    """(|f...f> + e^{i phase} |e...e>) / sqrt(2)."""
    vector = np.zeros(2 ** n, dtype=np.complex128)
    vector[0] = 1 / np.sqrt(2)
    vector[-1] = np.exp(1j * phase) / np.sqrt(2)
    return QuantumState(n=n, amplitudes=vector)


def w_state(n: int) -> QuantumState:
    """Symmetric single-excitation superposition."""
    vector = np.array([1.0 if excitation_count(i) == 1 else 0.0 for i in range(2 ** n)])
    return QuantumState.from_amplitudes(vector)


def _class_swap_state(n: int, excitations: int, partner: int, prefactor: complex) -> QuantumState:
    # prefactor * (sum over basis states with `excitations` excitations - |partner>)
    vector = np.array([1.0 if excitation_count(i) == excitations else 0.0 for i in range(2 ** n)],
                      dtype=np.complex128)
    vector[partner] = -1.0
    return QuantumState.from_amplitudes(prefactor * vector)


def named_target(name: str, n: int) -> QuantumState:
    """
    Reference states by name: ghz_plus, ghz_minus, ghz_plus_i, ghz_minus_i,
    swapped_f and swapped_e (three-qubit GHZ classes with one end state replaced).
    """
    phases = {"ghz_plus": 0.0, "ghz_minus": np.pi, "ghz_plus_i": np.pi / 2, "ghz_minus_i": -np.pi / 2}
    if name in phases:
        return ghz_state(n, phases[name])
    if name == "swapped_f":
        return _class_swap_state(n, 1, 2 ** n - 1, -1j)
    if name == "swapped_e":
        return _class_swap_state(n, n - 1, 0, 1.0)
    raise ValueError(f"Unknown target '{name}'. Supported: {sorted(list(phases) + ['swapped_f', 'swapped_e'])}")


def ghz_fidelity(state: QuantumState, target: QuantumState) -> float:
    """|<target|state>|, insensitive to global phase."""
    return abs(state.overlap(target))


def ghz_class_fidelity(state: QuantumState) -> Tuple[float, float]:
    """Best fidelity to (|f..f> + e^{i theta}|e..e>)/sqrt(2) over theta, and that theta."""
    first, last = state.amplitudes[0], state.amplitudes[-1]
    best = (abs(first) + abs(last)) / np.sqrt(2)
    theta = float(np.angle(last) - np.angle(first))
    theta = float(np.angle(np.exp(1j * theta)))
    return float(best), theta


@dataclass
class EntanglementReport:
    """All entanglement measures of a pure state at one time."""

    time: float
    n: int
    entropies: List[float]
    purities: List[float]
    bloch: List[Tuple[float, float, float]]
    concurrences: Dict[Tuple[int, int], float]
    bipartition_concurrences: List[float]
    three_tangle: Optional[float]
    fidelities: Dict[str, float] = field(default_factory=dict)

    @property
    def min_entropy(self) -> float:
        return min(self.entropies)

    def header(self) -> List[str]:
        columns = ["time"]
        columns += [f"S_{j}" for j in range(1, self.n + 1)]
        columns += [f"P_{j}" for j in range(1, self.n + 1)]
        columns += [f"bloch_{axis}_{j}" for j in range(1, self.n + 1) for axis in "xyz"]
        columns += [f"C_{j}{k}" for j, k in sorted(self.concurrences)]
        columns += ["tau123"]
        columns += [f"F_{name}" for name in self.fidelities]
        return columns

    def to_row(self) -> list:
        row = [self.time] + list(self.entropies) + list(self.purities)
        row += [component for vector in self.bloch for component in vector]
        row += [self.concurrences[pair] for pair in sorted(self.concurrences)]
        row += [self.three_tangle]
        row += list(self.fidelities.values())
        return row


def report(state: QuantumState, time: float = 0.0,
           targets: Optional[Mapping[str, QuantumState]] = None) -> EntanglementReport:
    """Aggregate every measure; three-tangle only for n = 3."""
    n = state.n
    singles = [reduced_qubit(state, j) for j in range(1, n + 1)]
    purities = [purity(rho) for rho in singles]
    concurrences = {
        (j, k): concurrence(two_qubit_reduction(state, j, k)) for j, k in combinations(range(1, n + 1), 2)
    }
    fidelities = {name: ghz_fidelity(state, target) for name, target in (targets or {}).items()}
    if n >= 2:
        fidelities["ghz_class"] = ghz_class_fidelity(state)[0]
    return EntanglementReport(
        time=float(time),
        n=n,
        entropies=[entanglement_entropy(rho) for rho in singles],
        purities=purities,
        bloch=[bloch_vector(rho) for rho in singles],
        concurrences=concurrences,
        bipartition_concurrences=[bipartition_concurrence(p) for p in purities],
        three_tangle=three_tangle(state) if n == 3 else None,
        fidelities=fidelities,
    )
