"""
Eigenvalue spectra versus drive amplitude and exceptional points of uncoupled
and weakly coupled qubits.
"""
import logging
from typing import Dict, List, Tuple

import numpy as np
from scipy.signal import argrelmax

from core.hamiltonian import SystemConfig, build_hamiltonian, exceptional_drive, pt_symmetry_residual
from core.spectral import detect_eps, eigendecompose, ep_scan, locate_ep, log_condition_profile, spectrum_sweep
from experiments.base import ManifestEntry, Scenario
from experiments.sweeps import TraceTable, ep_scan_table

logger = logging.getLogger(__name__)

GAMMA = 6.0
COUPLED_J = 1e-3
WEAK_COUPLINGS = (1e-4, 1e-5, 1e-6)


class EPSpectraScenario(Scenario):
    """Spectra of 1-3 identical qubits at gamma = 6 rad/us and the EP at Omega = gamma/4."""

    initial_kind = "all_f"

    def get_label(self) -> str:
        return "fig1_spectra"

    def get_description(self) -> str:
        return "Eigenvalue spectra, 2^n-th order EPs at Omega = 1.5 and EP splitting under weak coupling"

    def system_config(self) -> SystemConfig:
        return SystemConfig.uniform(3, omega=exceptional_drive(GAMMA), gamma=GAMMA)

    def _uncoupled_checks(self, n: int) -> List[ManifestEntry]:
        omega_ep = exceptional_drive(GAMMA)
        config = SystemConfig.uniform(n, omega=omega_ep, gamma=GAMMA)
        decomp = eigendecompose(build_hamiltonian(config))
        clusters = detect_eps(decomp)
        expected_center = -1j * n * GAMMA / 4
        order = max((c.order_estimate for c in clusters), default=0)
        center_error = min((abs(c.center - expected_center) for c in clusters), default=np.inf)
        spread = float(np.max(np.abs(decomp.eigenvalues - expected_center)))
        return [
            ManifestEntry(f"n{n}_ep_order", 2 ** n, order, 0),
            ManifestEntry(f"n{n}_ep_cluster_count", 1, len(clusters), 0),
            ManifestEntry(f"n{n}_ep_center_deviation", 0.0, center_error, 1e-8, "at_most"),
            # finite-precision splitting of a 2^n-th order EP grows like eps^(1/2^n)
            ManifestEntry(f"n{n}_finite_precision_ep_splitting", 0.0, spread, 1e-3, "at_most", informational=True),
        ]

    def _coupled_checks(self, omegas: np.ndarray, profile: np.ndarray) -> List[ManifestEntry]:
        omega_ep = exceptional_drive(GAMMA)
        config = SystemConfig.uniform(3, omega=omega_ep, gamma=GAMMA, coupling=COUPLED_J)
        step = float(omegas[1] - omegas[0])
        peaks = argrelmax(profile)[0]
        found: Dict[str, int] = {"below": 0, "above": 0}
        for side, mask in (("below", omegas[peaks] < omega_ep - step), ("above", omegas[peaks] > omega_ep + step)):
            candidates = peaks[mask]
            if candidates.size == 0:
                continue
            peak = int(candidates[np.argmax(profile[candidates])])
            bracket = (float(omegas[peak] - step), float(omegas[peak] + step))
            value, clusters = locate_ep(config, "omega", bracket)
            found[side] = sum(1 for c in clusters if c.order_estimate == 2)
            logger.info("Second-order EP candidate %s Omega_EP at %.9f", side, value)

        at_ep = detect_eps(eigendecompose(build_hamiltonian(config)))
        sizes = sorted((c.algebraic_multiplicity for c in at_ep), reverse=True)
        return [
            ManifestEntry("coupled_second_order_ep_below", 1, found["below"], 0, "at_least", informational=True),
            ManifestEntry("coupled_second_order_ep_above", 1, found["above"], 0, "at_least", informational=True),
            ManifestEntry("coupled_largest_cluster", 4, sizes[0] if sizes else 0, 0, informational=True),
            ManifestEntry("coupled_second_cluster", 3, sizes[1] if len(sizes) > 1 else 0, 0, informational=True),
        ]

    def _weak_coupling_checks(self) -> List[ManifestEntry]:
        """Largest EP cluster at Omega_EP for couplings below 1e-3, recorded as observed."""
        entries = []
        for coupling in WEAK_COUPLINGS:
            config = SystemConfig.uniform(3, omega=exceptional_drive(GAMMA), gamma=GAMMA, coupling=coupling)
            clusters = detect_eps(eigendecompose(build_hamiltonian(config)))
            largest = max(clusters, key=lambda c: c.algebraic_multiplicity, default=None)
            size, rank = (largest.algebraic_multiplicity, largest.geometric_rank) if largest else (0, 0)
            logger.info("J=%g: largest EP cluster size %d, geometric rank %d", coupling, size, rank)
            entries += [
                ManifestEntry(f"J{coupling:g}_largest_cluster", 5, size, 0, informational=True),
                ManifestEntry(f"J{coupling:g}_largest_cluster_rank", 3, rank, 0, informational=True),
            ]
        return entries

    def generate(self, quick: bool = False,
                 threads: int = 1) -> Tuple[Dict[str, TraceTable], List[ManifestEntry]]:
        tables: Dict[str, TraceTable] = {}
        manifest: List[ManifestEntry] = []

        omegas = np.linspace(0.0, 3.0, 61 if quick else 601)
        for n in (1, 2, 3):
            sweep = spectrum_sweep(SystemConfig.uniform(n, omega=1.0, gamma=GAMMA), "omega", omegas, threads)
            tables[f"spectrum_n{n}.csv"] = TraceTable(header=sweep.header(), rows=sweep.to_rows())
            manifest.extend(self._uncoupled_checks(n))

        manifest.append(ManifestEntry("n3_pt_residual", 0.0, pt_symmetry_residual(self.system_config()),
                                      1e-12, "at_most"))

        coupled = SystemConfig.uniform(3, omega=1.0, gamma=GAMMA, coupling=COUPLED_J)
        fine = np.linspace(1.45, 1.55, 51 if quick else 401)
        sweep = spectrum_sweep(coupled, "omega", fine, threads)
        tables["spectrum_n3_coupled.csv"] = TraceTable(header=sweep.header(), rows=sweep.to_rows())
        tables["ep_scan_n3_coupled.csv"] = ep_scan_table(ep_scan(coupled, "omega", fine, threads=threads))
        manifest.extend(self._coupled_checks(fine, log_condition_profile(coupled, "omega", fine)))
        manifest.extend(self._weak_coupling_checks())
        return tables, manifest
