"""
Scenario factory for creating and running the canned scenarios.
"""
import logging
from pathlib import Path
from typing import Dict, Type

from config.settings import OUTPUT_PRECISION
from experiments.amplitude_dynamics import AmplitudeDynamicsScenario
from experiments.base import Scenario, ScenarioResult
from experiments.ep_spectra import EPSpectraScenario
from experiments.four_qubit import FourQubitScenario
from experiments.hermitian_ghz import HermitianGHZScenario
from experiments.tripartite_map import TripartiteMapScenario

logger = logging.getLogger(__name__)


class ScenarioFactory:
    """Factory for creating scenario instances by label."""

    _scenarios: Dict[str, Type[Scenario]] = {
        "fig1_spectra": EPSpectraScenario,
        "fig2_map": TripartiteMapScenario,
        "fig3_traces": AmplitudeDynamicsScenario,
        "fig4_fourqubit": FourQubitScenario,
        "fig5_hermitian": HermitianGHZScenario,
    }

    @classmethod
    def create_scenario(cls, label: str) -> Scenario:
        if label not in cls._scenarios:
            raise ValueError(f"Unknown scenario '{label}'. Valid labels: {sorted(cls._scenarios)}")
        return cls._scenarios[label]()

    @classmethod
    def get_available_scenarios(cls) -> Dict[str, str]:
        """Label to description for every registered scenario."""
        return {label: scenario().get_description() for label, scenario in cls._scenarios.items()}


def reproduce_scenario(label: str, output_dir: Path, quick: bool = False, threads: int = 1,
                       precision: int = OUTPUT_PRECISION) -> ScenarioResult:
    """Regenerate a scenario's data files under ``output_dir/label`` and evaluate its manifest."""
    scenario = ScenarioFactory.create_scenario(label)
    logger.info("Reproducing %s (quick=%s, threads=%d)", label, quick, threads)
    return scenario.run(Path(output_dir) / label, quick=quick, threads=threads, precision=precision)
