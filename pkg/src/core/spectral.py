"""
Biorthogonal eigendecomposition, spectrum sweeps and exceptional-point detection.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.optimize import minimize_scalar
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from config.settings import (
    DEFAULT_EIG_TOL, DEFAULT_VEC_TOL, DEFECTIVE_CONDITION, MODAL_CONDITION_LIMIT, N_MAX
)
from core.errors import NumericalFailure
from core.hamiltonian import SWEEPABLE_PARAMETERS, SystemConfig, build_hamiltonian

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """
    Eigenvalues with unit-norm right eigenvectors (columns of ``right_vectors``)
    and left covectors (rows of ``left_vectors``) scaled so that
    ``left_vectors[m] @ right_vectors[:, k] == delta_mk``.
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    condition_number: float
    residual: float
    matrix_norm: float

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    @property
    def is_defective_adjacent(self) -> bool:
        return not self.condition_number <= DEFECTIVE_CONDITION

    @property
    def supports_modal_propagation(self) -> bool:
        return self.condition_number <= MODAL_CONDITION_LIMIT

    def biorthogonality_error(self) -> float:
        """max |<l_m|r_k> - delta_mk|."""
        gram = self.left_vectors @ self.right_vectors
        return float(np.max(np.abs(gram - np.eye(self.dim))))


@dataclass(frozen=True)
class EPCluster:
    """A group of coalescing eigenvalues whose eigenvectors are rank-deficient."""

    center: complex
    members: Tuple[int, ...]
    algebraic_multiplicity: int
    geometric_rank: int
    order_estimate: int


@dataclass
class SpectrumSweep:
    """Sorted spectra on a parameter grid; failed points are ``None`` gaps."""

    parameter_name: str
    parameter_grid: np.ndarray
    spectra: List[Optional[np.ndarray]]

    @property
    def dim(self) -> int:
        return next(len(s) for s in self.spectra if s is not None)

    @property
    def gaps(self) -> List[int]:
        return [i for i, s in enumerate(self.spectra) if s is None]

    def header(self) -> List[str]:
        d = self.dim if len(self.gaps) < len(self.spectra) else 0
        return ([self.parameter_name]
                + [f"re_E{m}" for m in range(1, d + 1)]
                + [f"im_E{m}" for m in range(1, d + 1)])

    def to_rows(self) -> List[list]:
        width = len(self.header()) - 1
        rows = []
        for value, spectrum in zip(self.parameter_grid, self.spectra):
            if spectrum is None:
                rows.append([float(value)] + [None] * width)
            else:
                rows.append([float(value)] + list(spectrum.real) + list(spectrum.imag))
        return rows


def _check_matrix(H: np.ndarray) -> np.ndarray:
    H = np.asarray(H, dtype=np.complex128)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"Expected a square matrix, got shape {H.shape}")
    if H.shape[0] > 2 ** N_MAX:
        raise ValueError(f"Matrix dimension {H.shape[0]} exceeds 2^{N_MAX}")
    if not np.all(np.isfinite(H)):
        raise ValueError("Matrix has non-finite entries")
    return H


def sort_spectrum(eigenvalues: np.ndarray) -> np.ndarray:
    """Stable sort by real part, then imaginary part."""
    order = np.lexsort((eigenvalues.imag, eigenvalues.real))
    return eigenvalues[order]


def _eigenvector_condition(right: np.ndarray) -> float:
    singular = scipy.linalg.svdvals(right)
    return float(singular[0] / singular[-1]) if singular[-1] > 0 else float("inf")


def _parallel_chains(eigenvalues: np.ndarray, right: np.ndarray, scale: float, vec_tol: float) -> np.ndarray:
    """Label eigenpairs connected by nearby eigenvalues and parallel unit eigenvectors."""
    overlap = np.clip(np.abs(right.conj().T @ right), 0.0, 1.0)
    sin_angle = np.sqrt(1.0 - overlap ** 2)
    near = np.abs(eigenvalues[:, None] - eigenvalues[None, :]) <= vec_tol * scale
    _, chain_of = connected_components(csr_matrix((sin_angle <= vec_tol) & near), directed=False)
    return chain_of


def _geometric_rank(right: np.ndarray, members: Sequence[int], vec_tol: float) -> int:
    return max(1, int(np.sum(scipy.linalg.svdvals(right[:, list(members)]) > vec_tol)))


def _coalesced_groups(eigenvalues: np.ndarray, right: np.ndarray, scale: float,
                      vec_tol: float = DEFAULT_VEC_TOL) -> List[Tuple[int, ...]]:
    """Chains of two or more eigenpairs whose eigenvectors span fewer dimensions than their count."""
    chain_of = _parallel_chains(eigenvalues, right, scale, vec_tol)
    groups = []
    for chain in np.unique(chain_of):
        members = tuple(int(i) for i in np.flatnonzero(chain_of == chain))
        if len(members) > 1 and _geometric_rank(right, members, vec_tol) < len(members):
            groups.append(members)
    return groups


def _eig(H: np.ndarray, left: bool = False):
    try:
        result = scipy.linalg.eig(H, left=left, right=True)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NumericalFailure(f"Eigensolver did not converge: {e}")
    if not (np.all(np.isfinite(result[0])) and np.all(np.isfinite(result[-1]))):
        raise NumericalFailure("Eigensolver returned non-finite values")
    return result


def eigendecompose(H: np.ndarray) -> SpectralDecomposition:
    """
    Full complex eigendecomposition with biorthonormal left/right eigenvectors.

    A decomposition with coalesced, rank-deficient eigenvector groups is
    defective-adjacent regardless of how the rounded eigenvectors condition:
    its condition number is reported as infinite and the left covectors come
    from the conjugate decomposition, scaled by the pairwise overlaps.
    """
    H = _check_matrix(H)
    eigenvalues, left, right = _eig(H, left=True)
    right = right / np.linalg.norm(right, axis=0)
    matrix_norm = float(np.linalg.norm(H))

    coalesced = _coalesced_groups(eigenvalues, right, max(1.0, matrix_norm))
    condition = float("inf") if coalesced else _eigenvector_condition(right)

    if condition <= DEFECTIVE_CONDITION:
        left_vectors = scipy.linalg.inv(right)
    else:
        # Biorthonormality is not achievable here.
        left_vectors = left.conj().T
        overlaps = np.einsum("ij,ji->i", left_vectors, right)
        usable = np.abs(overlaps) > np.finfo(float).eps
        left_vectors[usable] /= overlaps[usable][:, None]
        logger.debug("Defective-adjacent decomposition: %d coalesced group(s), condition number %.3e",
                     len(coalesced), condition)

    residual = float(np.max(np.linalg.norm(H @ right - right * eigenvalues, axis=0)))
    return SpectralDecomposition(
        eigenvalues=eigenvalues,
        right_vectors=right,
        left_vectors=left_vectors,
        condition_number=condition,
        residual=residual,
        matrix_norm=matrix_norm,
    )


def eigenvector_condition(H: np.ndarray) -> float:
    """Condition number of the unit-column right eigenvector matrix as computed, without the coalescence test."""
    _, right = _eig(_check_matrix(H))
    return _eigenvector_condition(right / np.linalg.norm(right, axis=0))


def eigenvalue_condition_numbers(decomp: SpectralDecomposition) -> np.ndarray:
    """Per-eigenvalue sensitivity ||l_m|| ||r_m|| for biorthonormal pairs."""
    return np.linalg.norm(decomp.left_vectors, axis=1) * np.linalg.norm(decomp.right_vectors, axis=0)


def detect_eps(decomp: SpectralDecomposition, eig_tol: float = DEFAULT_EIG_TOL,
               vec_tol: float = DEFAULT_VEC_TOL) -> List[EPCluster]:
    """
    Group coalescing eigenvalues and report rank-deficient groups as EPs.

    Eigenvalues whose right eigenvectors are parallel within ``vec_tol`` are first
    chained together: at a k-th order EP the computed eigenvalues scatter by
    roughly (machine eps)^(1/k), far beyond any useful absolute tolerance, while
    their eigenvectors stay collapsed. Chain centers are then merged by
    complete linkage with threshold ``eig_tol * max(1, ||H||_F)``. The geometric
    rank of a group is the number of singular values of its stacked eigenvectors
    exceeding ``vec_tol``.
    """
    if eig_tol <= 0 or vec_tol <= 0:
        raise ValueError("Tolerances must be positive")
    E = decomp.eigenvalues
    R = decomp.right_vectors
    scale = max(1.0, decomp.matrix_norm)

    chain_of = _parallel_chains(E, R, scale, vec_tol)

    chains = np.unique(chain_of)
    centers = np.array([E[chain_of == c].mean() for c in chains])
    if len(chains) > 1:
        tree = linkage(np.column_stack([centers.real, centers.imag]), method="complete")
        chain_label = fcluster(tree, t=eig_tol * scale, criterion="distance")
    else:
        chain_label = np.ones(1, dtype=int)
    label_of = chain_label[np.searchsorted(chains, chain_of)]

    clusters = []
    for label in np.unique(label_of):
        members = tuple(int(i) for i in np.flatnonzero(label_of == label))
        size = len(members)
        if size < 2:
            continue
        rank = _geometric_rank(R, members, vec_tol)
        if rank >= size:
            continue
        clusters.append(EPCluster(
            center=complex(E[list(members)].mean()),
            members=members,
            algebraic_multiplicity=size,
            geometric_rank=rank,
            order_estimate=size,
        ))
    clusters.sort(key=lambda c: (c.center.real, c.center.imag))
    return clusters


def _check_grid(parameter: str, grid: Sequence[float]) -> np.ndarray:
    if parameter not in SWEEPABLE_PARAMETERS:
        raise ValueError(f"Unknown parameter '{parameter}'. Supported: {list(SWEEPABLE_PARAMETERS)}")
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("Parameter grid must be a nonempty 1-D sequence")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("Parameter grid must be strictly increasing")
    return grid


def _sorted_eigenvalues(config: SystemConfig) -> Optional[np.ndarray]:
    try:
        eigenvalues = scipy.linalg.eigvals(build_hamiltonian(config))
    except (np.linalg.LinAlgError, ValueError) as e:
        logger.warning("Eigensolver failed: %s", e)
        return None
    if not np.all(np.isfinite(eigenvalues)):
        logger.warning("Eigensolver returned non-finite eigenvalues")
        return None
    return sort_spectrum(eigenvalues)


def spectrum_sweep(config_template: SystemConfig, parameter: str, grid: Sequence[float],
                   threads: int = 1) -> SpectrumSweep:
    """Sorted spectra of the template with ``parameter`` set to each grid value."""
    grid = _check_grid(parameter, grid)
    configs = [config_template.with_parameter(parameter, float(v)) for v in grid]
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        spectra = list(pool.map(_sorted_eigenvalues, configs))
    if all(s is None for s in spectra):
        raise NumericalFailure("Eigensolver failed at every grid point")
    return SpectrumSweep(parameter_name=parameter, parameter_grid=grid, spectra=spectra)


def ep_scan(config_template: SystemConfig, parameter: str, grid: Sequence[float],
            eig_tol: float = DEFAULT_EIG_TOL, vec_tol: float = DEFAULT_VEC_TOL,
            threads: int = 1) -> List[Tuple[float, Optional[List[EPCluster]]]]:
    """detect_eps at every grid point; failed points carry ``None``."""
    grid = _check_grid(parameter, grid)

    def scan_point(value: float) -> Tuple[float, Optional[List[EPCluster]]]:
        config = config_template.with_parameter(parameter, value)
        try:
            decomp = eigendecompose(build_hamiltonian(config))
        except NumericalFailure as e:
            logger.warning("EP scan gap at %s=%g: %s", parameter, value, e)
            return value, None
        return value, detect_eps(decomp, eig_tol, vec_tol)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        return list(pool.map(scan_point, (float(v) for v in grid)))


def log_condition_profile(config_template: SystemConfig, parameter: str,
                          grid: Sequence[float]) -> np.ndarray:
    """log10 of the eigenvector condition number along a grid (EP candidates peak)."""
    grid = _check_grid(parameter, grid)
    profile = np.empty(grid.size)
    for i, value in enumerate(grid):
        condition = eigenvector_condition(build_hamiltonian(config_template.with_parameter(parameter, float(value))))
        profile[i] = np.log10(min(condition, 1e300))
    return profile


def locate_ep(config_template: SystemConfig, parameter: str, bracket: Tuple[float, float],
              eig_tol: float = DEFAULT_EIG_TOL,
              vec_tol: float = DEFAULT_VEC_TOL) -> Tuple[float, List[EPCluster]]:
    """
    Refine an EP location inside ``bracket`` by maximizing the eigenvector
    condition number, then classify the spectrum there.
    """
    lo, hi = bracket
    if not lo < hi:
        raise ValueError(f"Invalid bracket {bracket}")

    def objective(value: float) -> float:
        condition = eigenvector_condition(build_hamiltonian(config_template.with_parameter(parameter, value)))
        return -np.log10(min(condition, 1e300))

    result = minimize_scalar(objective, bounds=(lo, hi), method="bounded",
                             options={"xatol": 1e-14, "maxiter": 500})
    value = float(result.x)
    decomp = eigendecompose(build_hamiltonian(config_template.with_parameter(parameter, value)))
    clusters = detect_eps(decomp, eig_tol, vec_tol)
    logger.info("EP refinement in [%g, %g]: %s=%.12f, orders %s",
                lo, hi, parameter, value, [c.order_estimate for c in clusters])
    return value, clusters
