"""
Amplitude/phase traces and Bloch trajectories of three qubits near the EP,
with Hermitian and uncoupled references.
"""
from typing import Dict, List, Tuple

import numpy as np

from core.dynamics import BasisOrdering, initial_state, propagate
from core.entanglement import purity, reduced_qubit
from core.hamiltonian import SystemConfig, build_hamiltonian
from experiments.base import ManifestEntry, Scenario
from experiments.sweeps import TraceTable, amplitude_traces, bloch_trajectory, entropy_traces, peak_min_entropy

OMEGA = 1.576
GAMMA = 6.0
COUPLING = 1e-3
HORIZON = 6.5
MIXING_TIME = 3.232
ALL_F_MIXING_TIME = 5.325
PEAK_WINDOW = (3.0, 3.5)


def nonhermitian_period(omega: float, gamma: float) -> float:
    """Revival period 4 pi / sqrt(16 Omega^2 - gamma^2) of an uncoupled qubit above the EP."""
    discriminant = 16 * omega ** 2 - gamma ** 2
    if discriminant <= 0:
        raise ValueError(f"No oscillation at or below the EP (Omega={omega}, gamma={gamma})")
    return 4 * np.pi / np.sqrt(discriminant)


def _purity_at(config: SystemConfig, kind: str, t: float) -> float:
    state, _ = propagate(build_hamiltonian(config), initial_state(kind, config.n), t)
    return purity(reduced_qubit(state, 1))


def _revival(config: SystemConfig, t: float) -> float:
    psi0 = initial_state("coherent", config.n)
    state, _ = propagate(build_hamiltonian(config), psi0, t)
    return abs(state.overlap(psi0))


class AmplitudeDynamicsScenario(Scenario):
    """Three qubits at Omega = 1.576, gamma = 6, J = 1e-3 against gamma = 0 and J = 0 references."""

    def get_label(self) -> str:
        return "fig3_traces"

    def get_description(self) -> str:
        return "Amplitude and phase traces, Bloch trajectories and purities of three qubits"

    def system_config(self) -> SystemConfig:
        return SystemConfig.uniform(3, omega=OMEGA, gamma=GAMMA, coupling=COUPLING)

    def hermitian_comparison(self) -> Dict[str, SystemConfig]:
        return {
            "nonhermitian": self.system_config(),
            "uncoupled": SystemConfig.uniform(3, omega=OMEGA, gamma=GAMMA),
            "hermitian": SystemConfig.uniform(3, omega=OMEGA),
        }

    def generate(self, quick: bool = False,
                 threads: int = 1) -> Tuple[Dict[str, TraceTable], List[ManifestEntry]]:
        points = 131 if quick else 651
        times = np.linspace(0.0, HORIZON, points)
        psi0 = initial_state("coherent", 3)
        ordering = BasisOrdering.excitation_grouped(3)
        configs = self.hermitian_comparison()

        tables: Dict[str, TraceTable] = {}
        for name, config in configs.items():
            tables[f"amplitudes_{name}.csv"] = amplitude_traces(config, psi0, times, ordering)

        bloch_times = np.linspace(0.0, MIXING_TIME, points)
        coupled = bloch_trajectory(configs["nonhermitian"], psi0, bloch_times, qubit=1)
        reference = bloch_trajectory(configs["hermitian"], psi0, bloch_times, qubit=1)
        all_f = bloch_trajectory(configs["nonhermitian"], initial_state("all_f", 3),
                                 np.linspace(0.0, ALL_F_MIXING_TIME, points), qubit=1)
        tables["bloch_q1_nonhermitian.csv"] = coupled.to_table()
        tables["bloch_q1_hermitian.csv"] = reference.to_table()
        tables["bloch_q1_all_f.csv"] = all_f.to_table()

        coherent_nonhermitian = entropy_traces(configs["nonhermitian"], psi0, times)
        coherent_hermitian = entropy_traces(SystemConfig.uniform(3, omega=OMEGA, coupling=COUPLING), psi0, times)
        tables["entropy_coherent_nonhermitian.csv"] = coherent_nonhermitian
        tables["entropy_coherent_hermitian.csv"] = coherent_hermitian
        peak_t, peak_entropy = peak_min_entropy(coherent_nonhermitian, PEAK_WINDOW)

        all_f_state = initial_state("all_f", 3)
        tables["entropy_all_f_nonhermitian.csv"] = entropy_traces(configs["nonhermitian"], all_f_state, times)
        tables["entropy_all_f_hermitian.csv"] = entropy_traces(
            SystemConfig.uniform(3, omega=OMEGA, coupling=COUPLING), all_f_state, times
        )

        first_row = tables["amplitudes_nonhermitian.csv"].rows[0]
        moduli = np.array(first_row[2:2 + 8], dtype=float)
        manifest = [
            ManifestEntry("initial_moduli_deviation", 0.0, float(np.max(np.abs(moduli - 1 / (2 * np.sqrt(2))))),
                          1e-12, "at_most"),
            ManifestEntry("purity_at_3.232", 0.5033, _purity_at(configs["nonhermitian"], "coherent", MIXING_TIME),
                          0.002),
            ManifestEntry("bloch_final_purity", 0.5033, coupled.final_purity, 0.002),
            ManifestEntry("all_f_purity_at_5.325", 0.512,
                          _purity_at(configs["nonhermitian"], "all_f", ALL_F_MIXING_TIME), 0.005),
            ManifestEntry("nonhermitian_revival_fidelity", 0.999,
                          _revival(configs["uncoupled"], nonhermitian_period(OMEGA, GAMMA)), 0.0, "at_least"),
            ManifestEntry("hermitian_revival_fidelity", 0.9999, _revival(configs["hermitian"], np.pi / OMEGA),
                          0.0, "at_least"),
            ManifestEntry("hermitian_min_bloch_radius", 1.0, float(np.min(reference.radii)), 1e-6, "at_least"),
            ManifestEntry("coherent_peak_min_entropy", 0.690, peak_entropy, 0.005, "at_least"),
            ManifestEntry("coherent_peak_time", 3.233, peak_t, 0.05, informational=True),
            ManifestEntry("hermitian_coherent_max_entropy", 0.0, peak_min_entropy(coherent_hermitian)[1], 0.05,
                          "at_most"),
        ]
        return tables, manifest
