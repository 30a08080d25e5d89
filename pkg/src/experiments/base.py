"""
Base interface for reproducible scenarios.
"""
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Tuple

from config.settings import OUTPUT_PRECISION
from core.hamiltonian import SystemConfig
from experiments.sweeps import TraceTable
from utils.file_utils import ensure_directory, write_csv

logger = logging.getLogger(__name__)

COMPARISONS = ("within", "at_least", "at_most")


@dataclass
class ManifestEntry:
    """
    One expected-versus-observed check.

    ``within`` passes when |observed - expected| <= tolerance, ``at_least`` when
    observed >= expected - tolerance and ``at_most`` when observed <= expected + tolerance.
    Informational entries are recorded but never fail a run.
    """

    name: str
    expected: float
    observed: float
    tolerance: float
    comparison: str = "within"
    informational: bool = False

    def __post_init__(self):
        if self.comparison not in COMPARISONS:
            raise ValueError(f"Unknown comparison '{self.comparison}'. Supported: {list(COMPARISONS)}")

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.observed):
            return False
        if self.comparison == "at_least":
            return self.observed >= self.expected - self.tolerance
        if self.comparison == "at_most":
            return self.observed <= self.expected + self.tolerance
        return abs(self.observed - self.expected) <= self.tolerance

    def to_row(self) -> list:
        return [self.name, self.expected, self.observed, self.tolerance, self.comparison,
                self.informational, self.passed]


MANIFEST_HEADER = ["name", "expected", "observed", "tolerance", "comparison", "informational", "pass"]


@dataclass
class ScenarioResult:
    label: str
    output_dir: Path
    files: List[Path] = field(default_factory=list)
    manifest: List[ManifestEntry] = field(default_factory=list)

    @property
    def failures(self) -> List[ManifestEntry]:
        return [e for e in self.manifest if not e.informational and not e.passed]

    @property
    def passed(self) -> bool:
        return not self.failures


class Scenario(ABC):
    """A canned configuration whose data files and expected values are regenerated on demand."""

    initial_kind: str = "coherent"

    @abstractmethod
    def get_label(self) -> str:
        """Unique scenario label."""
        pass

    @abstractmethod
    def get_description(self) -> str:
        pass

    @abstractmethod
    def system_config(self) -> SystemConfig:
        """Primary physical configuration of the scenario."""
        pass

    @abstractmethod
    def generate(self, quick: bool = False,
                 threads: int = 1) -> Tuple[Dict[str, TraceTable], List[ManifestEntry]]:
        """
        Compute the scenario's tables and manifest.

        Args:
            quick: Use reduced grids (same physics, coarser sampling)
            threads: Worker threads for grid evaluation

        Returns:
            Mapping of file name to table, and the manifest entries
        """
        pass

    def run(self, output_dir: Path, quick: bool = False, threads: int = 1,
            precision: int = OUTPUT_PRECISION) -> ScenarioResult:
        """Generate, write every table plus ``manifest.csv`` and evaluate the manifest."""
        output_dir = ensure_directory(Path(output_dir))
        tables, manifest = self.generate(quick=quick, threads=threads)
        result = ScenarioResult(label=self.get_label(), output_dir=output_dir, manifest=manifest)

        for name, table in tables.items():
            path = output_dir / name
            write_csv(table.header, table.rows, path, precision)
            result.files.append(path)
        manifest_path = output_dir / "manifest.csv"
        write_csv(MANIFEST_HEADER, [entry.to_row() for entry in manifest], manifest_path, precision)
        result.files.append(manifest_path)

        for entry in manifest:
            if not entry.passed:
                level = logging.INFO if entry.informational else logging.WARNING
                logger.log(level, "%s: %s expected %g, observed %g (tol %g)", self.get_label(),
                           entry.name, entry.expected, entry.observed, entry.tolerance)
        return result
