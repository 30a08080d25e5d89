"""
Run configuration schema.

A run configuration is a JSON document with a mandatory ``schema_version`` and
blocks for the system, the initial state, the task and the output. Unknown keys
anywhere are rejected. Physical quantities are in rad/us, times in us.
"""
import json
from pathlib import Path
from typing import List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config.settings import (
    DEFAULT_EIG_TOL, DEFAULT_OUTPUT_DIR, DEFAULT_VEC_TOL, N_MAX, OUTPUT_PRECISION, SCHEMA_VERSION, UNITS
)
from core.dynamics import INITIAL_STATE_KINDS, QuantumState, initial_state
from core.hamiltonian import COUPLING_CONVENTIONS, DEFAULT_CONVENTION, QubitParams, SystemConfig

PerQubit = Union[float, List[float]]


class _Block(BaseModel):
    model_config = ConfigDict(extra="forbid")


class UnitsBlock(_Block):
    """Unit annotations echoed into generated configs; only the fixed units are accepted."""

    omega: Literal["rad/us"] = UNITS["omega"]
    delta: Literal["rad/us"] = UNITS["delta"]
    gamma: Literal["rad/us"] = UNITS["gamma"]
    coupling: Literal["rad/us"] = UNITS["coupling"]
    time: Literal["us"] = UNITS["time"]


class SystemBlock(_Block):
    n: int = Field(ge=1, le=N_MAX)
    omega: PerQubit
    delta: PerQubit = 0.0
    gamma: PerQubit = 0.0
    coupling: Union[float, List[List[float]]] = 0.0
    coupling_convention: Literal[COUPLING_CONVENTIONS] = DEFAULT_CONVENTION  # type: ignore[valid-type]

    @field_validator("gamma")
    @classmethod
    def _non_negative_gamma(cls, value: PerQubit) -> PerQubit:
        values = value if isinstance(value, list) else [value]
        if any(g < 0 for g in values):
            raise ValueError("gamma must be non-negative")
        return value

    @model_validator(mode="after")
    def _per_qubit_lengths(self) -> "SystemBlock":
        for name in ("omega", "delta", "gamma"):
            value = getattr(self, name)
            if isinstance(value, list) and len(value) != self.n:
                raise ValueError(f"{name} has {len(value)} entries, expected n={self.n}")
        if isinstance(self.coupling, list):
            if len(self.coupling) != self.n or any(len(row) != self.n for row in self.coupling):
                raise ValueError(f"coupling matrix must be {self.n}x{self.n}")
        return self

    def _per_qubit(self, name: str) -> List[float]:
        value = getattr(self, name)
        return list(value) if isinstance(value, list) else [value] * self.n

    def to_system_config(self) -> SystemConfig:
        qubits = tuple(
            QubitParams(omega=w, delta=d, gamma=g)
            for w, d, g in zip(self._per_qubit("omega"), self._per_qubit("delta"), self._per_qubit("gamma"))
        )
        coupling = np.asarray(self.coupling, dtype=float)
        if coupling.ndim == 0:
            coupling = float(coupling)
        return SystemConfig(qubits=qubits, coupling=coupling, convention=self.coupling_convention)


class InitialStateBlock(_Block):
    kind: Literal[INITIAL_STATE_KINDS] = "coherent"  # type: ignore[valid-type]
    # [re, im] pairs in standard basis order
    amplitudes: Optional[List[Tuple[float, float]]] = None

    @model_validator(mode="after")
    def _custom_needs_amplitudes(self) -> "InitialStateBlock":
        if self.kind == "custom" and not self.amplitudes:
            raise ValueError("initial_state.kind 'custom' requires amplitudes")
        if self.kind != "custom" and self.amplitudes is not None:
            raise ValueError(f"initial_state.amplitudes is only allowed with kind 'custom', got '{self.kind}'")
        return self

    def to_state(self, n: int) -> QuantumState:
        amplitudes = None
        if self.amplitudes is not None:
            amplitudes = [complex(re, im) for re, im in self.amplitudes]
        return initial_state(self.kind, n, amplitudes)


class AxisGrid(_Block):
    start: float
    stop: float
    points: int = Field(ge=1)
    spacing: Literal["linear", "log"] = "linear"

    @model_validator(mode="after")
    def _ordered(self) -> "AxisGrid":
        if self.points > 1 and self.stop <= self.start:
            raise ValueError(f"grid stop ({self.stop}) must exceed start ({self.start})")
        if self.spacing == "log" and self.start <= 0:
            raise ValueError("log-spaced grids need a positive start")
        return self

    def values(self) -> np.ndarray:
        if self.points == 1:
            return np.array([self.start])
        if self.spacing == "log":
            return np.logspace(np.log10(self.start), np.log10(self.stop), self.points)
        return np.linspace(self.start, self.stop, self.points)


def _grid_values(grid: Union[AxisGrid, List[float]]) -> np.ndarray:
    return grid.values() if isinstance(grid, AxisGrid) else np.asarray(grid, dtype=float)


class SweepBlock(AxisGrid):
    parameter: Literal["omega", "delta", "gamma", "J"]


class SearchBoxBlock(_Block):
    t: Tuple[float, float]
    J: Tuple[float, float]
    omega: Optional[Tuple[float, float]] = None


class TaskBlock(_Block):
    times: Optional[Union[AxisGrid, List[float]]] = None
    j_grid: Optional[Union[AxisGrid, List[float]]] = None
    omega_grid: Optional[Union[AxisGrid, List[float]]] = None
    sweep: Optional[SweepBlock] = None
    ep_bracket: Optional[Tuple[float, float]] = None
    eig_tol: float = Field(default=DEFAULT_EIG_TOL, gt=0)
    vec_tol: float = Field(default=DEFAULT_VEC_TOL, gt=0)
    targets: List[str] = Field(default_factory=list)
    objective: Optional[Literal["tau123", "min_entropy"]] = None
    box: Optional[SearchBoxBlock] = None
    bloch_qubits: Optional[List[int]] = None

    def time_values(self) -> Optional[np.ndarray]:
        return None if self.times is None else _grid_values(self.times)

    def j_values(self) -> Optional[np.ndarray]:
        return None if self.j_grid is None else _grid_values(self.j_grid)

    def omega_values(self) -> Optional[np.ndarray]:
        return None if self.omega_grid is None else _grid_values(self.omega_grid)


class OutputBlock(_Block):
    directory: str = DEFAULT_OUTPUT_DIR
    precision: int = Field(default=OUTPUT_PRECISION, ge=1, le=17)


class RunConfig(_Block):
    schema_version: Literal[SCHEMA_VERSION]  # type: ignore[valid-type]
    units: UnitsBlock = Field(default_factory=UnitsBlock)
    system: SystemBlock
    initial_state: InitialStateBlock = Field(default_factory=InitialStateBlock)
    task: TaskBlock = Field(default_factory=TaskBlock)
    output: OutputBlock = Field(default_factory=OutputBlock)

    def to_system_config(self) -> SystemConfig:
        return self.system.to_system_config()

    def initial_state_vector(self) -> QuantumState:
        return self.initial_state.to_state(self.system.n)


def parse_run_config(data: dict) -> RunConfig:
    return RunConfig.model_validate(data)


def load_run_config(path: Path) -> RunConfig:
    """Read and validate a JSON run configuration."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Config file not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ValueError(f"Config file {path} is not valid JSON: {e}") from e
    return parse_run_config(data)


def dump_run_config(config: RunConfig) -> str:
    """Normalized JSON including the units block; re-parses to an equal RunConfig."""
    return json.dumps(config.model_dump(mode="json"), indent=2) + "\n"
