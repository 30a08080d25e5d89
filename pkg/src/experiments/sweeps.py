"""
Parameter sweeps, optimum search and time traces built on the core modules.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from core.dynamics import (
    BasisOrdering, QuantumState, Trajectory, initial_state, propagate, propagate_series
)
from core.entanglement import (
    EntanglementReport, bloch_vector, ghz_class_fidelity, ghz_fidelity, purity, reduced_qubit, report
)
from core.errors import NumericalFailure
from core.hamiltonian import SystemConfig, build_hamiltonian
from core.spectral import EPCluster
from utils.progress import sweep_progress

logger = logging.getLogger(__name__)

OBJECTIVES = ("tau123", "min_entropy")

# (Omega, J) sets for four coupled qubits, rad/us
FOUR_QUBIT_PARAMETER_SETS: Tuple[Tuple[float, float], ...] = ((1.514, 1e-5), (1.537, 1e-4), (1.598, 1e-3))


def _strictly_increasing(name: str, values: Sequence[float]) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise ValueError(f"{name} axis must be a nonempty 1-D sequence")
    if np.any(np.diff(values) <= 0):
        raise ValueError(f"{name} axis must be strictly increasing")
    return values


@dataclass
class TraceTable:
    """Header plus rows; one row per time point."""

    header: List[str]
    rows: List[list]

    def column(self, name: str) -> np.ndarray:
        index = self.header.index(name)
        return np.array([np.nan if row[index] is None else row[index] for row in self.rows], dtype=float)


@dataclass
class SweepGrid:
    """Time (us), coupling (rad/us) and optional drive (rad/us) axes."""

    times: np.ndarray
    j_values: np.ndarray
    omegas: Optional[np.ndarray] = None

    def __post_init__(self):
        self.times = _strictly_increasing("time", self.times)
        if self.times[0] < 0:
            raise ValueError("Times must be non-negative")
        self.j_values = _strictly_increasing("J", self.j_values)
        if self.omegas is not None:
            self.omegas = _strictly_increasing("omega", self.omegas)

    @property
    def shape(self) -> Tuple[int, int, int]:
        n_omega = 1 if self.omegas is None else len(self.omegas)
        return n_omega, len(self.times), len(self.j_values)


@dataclass
class EntanglementMap:
    """Per-cell entropies and three-tangle on an (omega, t, J) grid."""

    grid: SweepGrid
    n: int
    objective: str
    entropies: np.ndarray  # (omega, t, J, n)
    tau123: Optional[np.ndarray]  # (omega, t, J) for n = 3
    failures: List[Tuple[int, int, int]] = field(default_factory=list)

    @property
    def min_entropy(self) -> np.ndarray:
        return self.entropies.min(axis=-1)

    @property
    def objective_values(self) -> np.ndarray:
        return self.tau123 if self.objective == "tau123" else self.min_entropy

    def argmax(self) -> Dict[str, float]:
        """Location of the objective maximum; ties resolve to smallest omega, t, then J."""
        values = self.objective_values
        if np.all(np.isnan(values)):
            raise NumericalFailure("Every map cell failed")
        i, j, k = np.unravel_index(int(np.nanargmax(values)), values.shape)
        omega = float("nan") if self.grid.omegas is None else float(self.grid.omegas[i])
        return {"omega": omega, "t": float(self.grid.times[j]), "J": float(self.grid.j_values[k]),
                "value": float(values[i, j, k])}

    def header(self) -> List[str]:
        leading = ["t", "J"] if self.grid.omegas is None else ["omega", "t", "J"]
        return leading + [f"S_{j}" for j in range(1, self.n + 1)] + ["tau123"]

    def to_rows(self) -> List[list]:
        rows = []
        n_omega, n_t, n_j = self.grid.shape
        for i in range(n_omega):
            leading = [] if self.grid.omegas is None else [float(self.grid.omegas[i])]
            for j in range(n_t):
                for k in range(n_j):
                    tau = None if self.tau123 is None else self.tau123[i, j, k]
                    rows.append(leading + [self.grid.times[j], self.grid.j_values[k]]
                                + list(self.entropies[i, j, k]) + [tau])
        return rows


def default_objective(n: int) -> str:
    return "tau123" if n == 3 else "min_entropy"


def evaluate_cell(config: SystemConfig, psi0: QuantumState, t: float, J: float,
                  omega: Optional[float] = None) -> EntanglementReport:
    """Single-point report; map cells use exactly this computation."""
    cell_config = config.with_parameter("J", J)
    if omega is not None:
        cell_config = cell_config.with_parameter("omega", omega)
    state, _ = propagate(build_hamiltonian(cell_config), psi0, t)
    return report(state, t)


def _objective_value(result: EntanglementReport, objective: str) -> float:
    if objective == "tau123":
        if result.three_tangle is None:
            raise ValueError("Objective 'tau123' needs n = 3")
        return result.three_tangle
    return result.min_entropy


def entanglement_map(config: SystemConfig, psi0: QuantumState, grid: SweepGrid,
                     objective: Optional[str] = None, threads: int = 1,
                     show_progress: bool = False) -> EntanglementMap:
    """Full propagation and report at every (omega, t, J) cell."""
    objective = objective or default_objective(config.n)
    if objective not in OBJECTIVES:
        raise ValueError(f"Unknown objective '{objective}'. Supported: {list(OBJECTIVES)}")
    if objective == "tau123" and config.n != 3:
        raise ValueError("Objective 'tau123' needs n = 3")
    if psi0.n != config.n:
        raise ValueError(f"Initial state has n={psi0.n}, system has n={config.n}")

    n_omega, n_t, n_j = grid.shape
    entropies = np.full((n_omega, n_t, n_j, config.n), np.nan)
    tau = np.full((n_omega, n_t, n_j), np.nan) if config.n == 3 else None
    failures: List[Tuple[int, int, int]] = []
    columns = [(i, k) for i in range(n_omega) for k in range(n_j)]

    def run_column(index: Tuple[int, int]):
        i, k = index
        omega = None if grid.omegas is None else float(grid.omegas[i])
        results = []
        for j, t in enumerate(grid.times):
            try:
                results.append((j, evaluate_cell(config, psi0, float(t), float(grid.j_values[k]), omega)))
            except NumericalFailure as e:
                logger.warning("Map cell (omega=%s, t=%g, J=%g) failed: %s", omega, t, grid.j_values[k], e)
                results.append((j, None))
        advance(1)
        return index, results

    with sweep_progress("Entanglement map", total=len(columns), enabled=show_progress, unit="column") as advance:
        with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
            outcomes = list(pool.map(run_column, columns))

    for (i, k), results in outcomes:
        for j, result in results:
            if result is None:
                failures.append((i, j, k))
                continue
            entropies[i, j, k] = result.entropies
            if tau is not None:
                tau[i, j, k] = result.three_tangle
    return EntanglementMap(grid=grid, n=config.n, objective=objective, entropies=entropies,
                           tau123=tau, failures=sorted(failures))


@dataclass
class SearchBox:
    """Closed search intervals; a degenerate interval pins that axis."""

    t: Tuple[float, float]
    J: Tuple[float, float]
    omega: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        for name in ("t", "J", "omega"):
            bounds = getattr(self, name)
            if bounds is None:
                continue
            lo, hi = (float(b) for b in bounds)
            if not (np.isfinite(lo) and np.isfinite(hi)):
                raise ValueError(f"Search box bounds for {name} must be finite")
            if lo > hi:
                raise ValueError(f"Search box for {name} is empty: lower bound {lo} > upper bound {hi}")
            setattr(self, name, (lo, hi))
        if self.t[0] < 0:
            raise ValueError("Search box times must be non-negative")
        if self.J[0] < 0:
            raise ValueError("Search box couplings must be non-negative")


@dataclass
class OptimumResult:
    t: float
    J: float
    omega: Optional[float]
    value: float
    evaluations: int


def _axis_grid(bounds: Tuple[float, float], points: int, log: bool) -> np.ndarray:
    lo, hi = bounds
    if lo == hi:
        return np.array([lo])
    if log and lo > 0:
        return np.logspace(np.log10(lo), np.log10(hi), points)
    return np.linspace(lo, hi, points)


def find_optimal(config: SystemConfig, psi0: QuantumState, box: SearchBox,
                 objective: Optional[str] = None, coarse_points: Tuple[int, int, int] = (65, 13, 9),
                 rtol: float = 1e-4, max_passes: int = 4, threads: int = 1) -> OptimumResult:
    """
    Coarse grid scan over the box followed by axis-wise bounded refinement.

    J is searched in log10 space when its lower bound is positive.
    """
    objective = objective or default_objective(config.n)
    if objective not in OBJECTIVES:
        raise ValueError(f"Unknown objective '{objective}'. Supported: {list(OBJECTIVES)}")
    log_j = box.J[0] > 0
    t_grid = _axis_grid(box.t, coarse_points[0], log=False)
    j_grid = _axis_grid(box.J, coarse_points[1], log=True)
    omega_grid = _axis_grid(box.omega, coarse_points[2], log=False) if box.omega else np.array([np.nan])

    evaluations = 0

    def value_at(t: float, J: float, omega: float) -> float:
        nonlocal evaluations
        evaluations += 1
        try:
            result = evaluate_cell(config, psi0, t, J, None if np.isnan(omega) else omega)
        except NumericalFailure:
            return -np.inf
        return _objective_value(result, objective)

    cells = [(t, J, w) for t in t_grid for J in j_grid for w in omega_grid]
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        values = np.array(list(pool.map(lambda c: value_at(*c), cells)))
    if not np.any(np.isfinite(values)):
        raise NumericalFailure("Objective failed at every coarse grid point")
    best_index = int(np.argmax(values))
    point = list(cells[best_index])
    best = float(values[best_index])

    # Axis-wise refinement; J lives in log10 space when possible.
    axes = []
    if len(t_grid) > 1:
        axes.append((0, box.t, t_grid[1] - t_grid[0], False))
    if len(j_grid) > 1:
        if log_j:
            step = np.log10(j_grid[1]) - np.log10(j_grid[0])
            axes.append((1, (np.log10(box.J[0]), np.log10(box.J[1])), step, True))
        else:
            axes.append((1, box.J, j_grid[1] - j_grid[0], False))
    if len(omega_grid) > 1:
        axes.append((2, box.omega, omega_grid[1] - omega_grid[0], False))

    for _ in range(max_passes):
        improved = False
        for axis, (lo, hi), step, in_log in axes:
            current = np.log10(point[axis]) if in_log else point[axis]
            bounds = (max(lo, current - step), min(hi, current + step))
            if bounds[0] >= bounds[1]:
                continue

            def negative(x: float, axis: int = axis, in_log: bool = in_log) -> float:
                trial = list(point)
                trial[axis] = 10 ** x if in_log else x
                return -value_at(*trial)

            xatol = rtol * max(abs(current), step)
            result = minimize_scalar(negative, bounds=bounds, method="bounded", options={"xatol": xatol})
            if -result.fun > best + 1e-12:
                best = float(-result.fun)
                point[axis] = 10 ** result.x if in_log else float(result.x)
                improved = True
        if not improved:
            break

    omega = None if np.isnan(point[2]) else float(point[2])
    return OptimumResult(t=float(point[0]), J=float(point[1]), omega=omega, value=best,
                         evaluations=evaluations)


def _trajectory(config: SystemConfig, psi0: QuantumState, times: Sequence[float]) -> Trajectory:
    if psi0.n != config.n:
        raise ValueError(f"Initial state has n={psi0.n}, system has n={config.n}")
    return propagate_series(build_hamiltonian(config), psi0, times)


def amplitude_traces(config: SystemConfig, psi0: QuantumState, times: Sequence[float],
                     ordering: Optional[BasisOrdering] = None) -> TraceTable:
    """|alpha_m| and Arg(alpha_m) per time in excitation-grouped order."""
    trajectory = _trajectory(config, psi0, times)
    return TraceTable(header=trajectory.header(ordering), rows=trajectory.to_rows(ordering))


@dataclass
class BlochTrajectory:
    times: np.ndarray
    vectors: np.ndarray  # (T, 3)
    purities: np.ndarray

    @property
    def final_purity(self) -> float:
        return float(self.purities[-1])

    @property
    def radii(self) -> np.ndarray:
        return np.linalg.norm(self.vectors, axis=1)

    def to_table(self) -> TraceTable:
        rows = [[t, *v, p] for t, v, p in zip(self.times, self.vectors, self.purities)]
        return TraceTable(header=["time", "x", "y", "z", "purity"], rows=rows)


def bloch_trajectory(config: SystemConfig, psi0: QuantumState, times: Sequence[float],
                     qubit: int) -> BlochTrajectory:
    """Bloch vector of one reduced qubit along the evolution."""
    if not 1 <= qubit <= config.n:
        raise ValueError(f"Qubit index {qubit} out of range for n={config.n}")
    trajectory = _trajectory(config, psi0, times)
    reduced = [reduced_qubit(state, qubit) for state in trajectory.states]
    return BlochTrajectory(
        times=trajectory.times,
        vectors=np.array([bloch_vector(rho) for rho in reduced]),
        purities=np.array([purity(rho) for rho in reduced]),
    )


def fidelity_traces(config: SystemConfig, psi0: QuantumState, targets: Mapping[str, QuantumState],
                    times: Sequence[float]) -> TraceTable:
    """|<target|psi(t)>| per named target plus the phase-optimized GHZ-class fidelity."""
    for name, target in targets.items():
        if target.n != config.n:
            raise ValueError(f"Target '{name}' has n={target.n}, system has n={config.n}")
    trajectory = _trajectory(config, psi0, times)
    names = list(targets)
    rows = []
    for t, state in zip(trajectory.times, trajectory.states):
        best, theta = ghz_class_fidelity(state)
        rows.append([float(t)] + [ghz_fidelity(state, targets[name]) for name in names] + [best, theta])
    return TraceTable(header=["time"] + [f"F_{name}" for name in names] + ["F_ghz_class", "ghz_class_phase"],
                      rows=rows)


def entropy_traces(config: SystemConfig, psi0: QuantumState, times: Sequence[float]) -> TraceTable:
    """S_j(t) and P_j(t) for every qubit."""
    trajectory = _trajectory(config, psi0, times)
    n = config.n
    rows = []
    for t, state in zip(trajectory.times, trajectory.states):
        result = report(state, float(t))
        rows.append([float(t)] + result.entropies + result.purities)
    return TraceTable(header=["time"] + [f"S_{j}" for j in range(1, n + 1)] + [f"P_{j}" for j in range(1, n + 1)],
                      rows=rows)


def peak_min_entropy(table: TraceTable, window: Optional[Tuple[float, float]] = None) -> Tuple[float, float]:
    """Sampled maximum over time of min_j S_j in an entropy table. Returns (time, value)."""
    times = table.column("time")
    entropies = np.column_stack([table.column(name) for name in table.header if name.startswith("S_")])
    values = entropies.min(axis=1)
    inside = np.isfinite(values)
    if window is not None:
        inside &= (times >= window[0]) & (times <= window[1])
    if not inside.any():
        raise ValueError(f"No finite entropy samples inside window {window}")
    best = int(np.flatnonzero(inside)[np.argmax(values[inside])])
    return float(times[best]), float(values[best])


def four_qubit_entropy_traces(parameter_sets: Sequence[Tuple[float, float]] = FOUR_QUBIT_PARAMETER_SETS,
                              gamma: float = 6.0, horizon: float = 40.0, points: int = 4001,
                              threads: int = 1) -> Dict[Tuple[float, float], TraceTable]:
    """Entropy traces of four identical qubits from the coherent state, one per (Omega, J)."""
    if horizon <= 0 or points < 2:
        raise ValueError("Horizon must be positive and points >= 2")
    times = np.linspace(0.0, horizon, points)
    psi0 = initial_state("coherent", 4)

    def run(parameters: Tuple[float, float]) -> TraceTable:
        omega, J = parameters
        return entropy_traces(SystemConfig.uniform(4, omega=omega, gamma=gamma, coupling=J), psi0, times)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        tables = list(pool.map(run, parameter_sets))
    return dict(zip((tuple(p) for p in parameter_sets), tables))


def refine_maximum(func: Callable[[float], float], times: Sequence[float], values: Sequence[float],
                   window: Tuple[float, float], xatol: float = 1e-6) -> Tuple[float, float]:
    """
    Maximum of ``func`` inside ``window``: sampled argmax, then bounded refinement
    within one grid step on either side. Returns (time, value).
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    lo, hi = window
    inside = np.flatnonzero((times >= lo) & (times <= hi) & np.isfinite(values))
    if inside.size == 0:
        raise ValueError(f"No finite samples inside window [{lo}, {hi}]")
    best = int(inside[np.argmax(values[inside])])
    best_t, best_value = float(times[best]), float(values[best])
    left = times[best - 1] if best > 0 else times[best]
    right = times[best + 1] if best + 1 < times.size else times[best]
    bounds = (max(lo, float(left)), min(hi, float(right)))
    if bounds[0] < bounds[1]:
        result = minimize_scalar(lambda t: -func(t), bounds=bounds, method="bounded", options={"xatol": xatol})
        if -result.fun > best_value:
            best_t, best_value = float(result.x), float(-result.fun)
    return best_t, best_value


EP_SCAN_HEADER = ["value", "cluster", "center_re", "center_im", "size", "geometric_rank", "order_estimate"]


def ep_scan_table(scan: Sequence[Tuple[float, Optional[List[EPCluster]]]]) -> TraceTable:
    """One row per detected cluster; a scan gap becomes a row of blanks."""
    rows = []
    for value, clusters in scan:
        if clusters is None:
            rows.append([value] + [None] * (len(EP_SCAN_HEADER) - 1))
            continue
        for index, cluster in enumerate(clusters):
            rows.append([value, index, cluster.center.real, cluster.center.imag,
                         cluster.algebraic_multiplicity, cluster.geometric_rank, cluster.order_estimate])
    return TraceTable(header=list(EP_SCAN_HEADER), rows=rows)
