#!/usr/bin/env python3
"""
nhqsim - Main CLI Entry Point
=============================
Spectra, exceptional points, normalized non-unitary dynamics and multipartite
entanglement of driven, dissipative, weakly coupled qubits.
"""
import argparse
import logging
import sys
import time
from datetime import datetime
from pathlib import Path
from typing import List, Optional

# Add src to Python path for absolute imports
current_dir = Path(__file__).parent
src_dir = current_dir / "src"
sys.path.insert(0, str(src_dir))

import numpy as np
from pydantic import ValidationError

from config.run_config import RunConfig, dump_run_config, load_run_config
from config.settings import DEFAULT_OUTPUT_DIR, DEFAULT_THREADS, LOG_LEVEL, output_dir_override, validate_settings
from core.dynamics import propagate_series
from core.entanglement import named_target, report
from core.errors import ExitStatus, NumericalFailure
from core.hamiltonian import build_hamiltonian
from core.spectral import ep_scan, locate_ep, spectrum_sweep
from experiments.factory import ScenarioFactory, reproduce_scenario
from experiments.sweeps import (
    BlochTrajectory, SearchBox, SweepGrid, TraceTable, entanglement_map, ep_scan_table, fidelity_traces,
    find_optimal
)
from utils.file_utils import atomic_write_text, ensure_directory, save_json, write_csv
from utils.progress import show_completion_message

VERSION = "1.0.0"
DEFAULT_FIDELITY_TARGETS = ["ghz_minus_i", "ghz_plus_i"]


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point."""
    parser = create_argument_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return ExitStatus.SUCCESS if e.code == 0 else ExitStatus.USAGE_ERROR

    logging.basicConfig(level=logging.INFO if args.verbose else LOG_LEVEL, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.seed is not None:
        logging.getLogger(__name__).info("--seed %s ignored: all computations are deterministic", args.seed)

    try:
        validate_settings()
        config = load_run_config(Path(args.config)) if args.config else None
        if config is None and args.command != "reproduce":
            print(f"❌ Configuration Error: '{args.command}' requires --config")
            return ExitStatus.USAGE_ERROR
        if args.threads < 1:
            raise ValueError(f"--threads must be positive, got {args.threads}")
    except ValidationError as e:
        print(f"❌ Configuration Error: {e}")
        return ExitStatus.USAGE_ERROR
    except (ValueError, FileNotFoundError) as e:
        print(f"❌ Configuration Error: {e}")
        return ExitStatus.USAGE_ERROR

    if args.command == "show-config":
        return handle_show_config(args, config)

    output_dir = resolve_output_dir(args, config)
    print(f"🚀 nhqsim v{VERSION} - Command: {args.command}")
    print(f"📁 Output directory: {output_dir}")

    handlers = {
        "spectrum": handle_spectrum,
        "evolve": handle_evolve,
        "map": handle_map,
        "optimize": handle_optimize,
        "fidelity": handle_fidelity,
        "reproduce": handle_reproduce,
    }
    start = time.time()
    try:
        ensure_directory(output_dir)
        status, files = handlers[args.command](args, config, output_dir)
    except (ValidationError, ValueError) as e:
        print(f"❌ Error: {e}")
        return ExitStatus.USAGE_ERROR
    except NumericalFailure as e:
        print(f"❌ Numerical failure: {e}")
        return ExitStatus.NUMERICAL_FAILURE
    except Exception as e:
        print(f"❌ Internal error: {e}")
        logging.getLogger(__name__).exception("Unexpected failure in %s", args.command)
        return ExitStatus.INTERNAL_ERROR

    save_run_metadata(args, config, output_dir, files)
    if status == ExitStatus.SUCCESS:
        show_completion_message(args.command, time.time() - start)
    return status


def create_argument_parser() -> argparse.ArgumentParser:
    """Create the command line argument parser."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Run configuration file (JSON)")
    common.add_argument("--out", help="Output directory (NHQSIM_OUT overrides)")
    common.add_argument("--threads", type=int, default=DEFAULT_THREADS, help="Worker threads for grid evaluation")
    common.add_argument("--seed", type=int, help="Reserved; all computations are deterministic")
    common.add_argument("--verbose", action="store_true", help="Log progress details (INFO level)")

    parser = argparse.ArgumentParser(
        prog="nhqsim",
        description="Simulate driven, dissipative, weakly coupled non-Hermitian qubits.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    subparsers.add_parser("spectrum", parents=[common], help="Spectrum sweep and EP scan over one parameter")
    subparsers.add_parser("evolve", parents=[common], help="Trajectory, entanglement report and Bloch vectors")
    subparsers.add_parser("map", parents=[common], help="Entanglement map over (t, J[, Omega])")
    subparsers.add_parser("optimize", parents=[common], help="Optimum search inside a (t, J[, Omega]) box")
    subparsers.add_parser("fidelity", parents=[common], help="Fidelities to named target states over time")

    reproduce_parser = subparsers.add_parser("reproduce", parents=[common],
                                             help="Regenerate a canned scenario and check its manifest")
    reproduce_parser.add_argument("label", choices=sorted(ScenarioFactory.get_available_scenarios()),
                                  help="Scenario label")
    reproduce_parser.add_argument("--quick", action="store_true", help="Reduced grids, same physics")

    show_parser = subparsers.add_parser("show-config", parents=[common],
                                        help="Print the normalized run configuration")
    show_parser.add_argument("--write", action="store_true", help="Write config_echo.json to the output directory")
    return parser


def resolve_output_dir(args, config: Optional[RunConfig]) -> Path:
    """NHQSIM_OUT, then --out, then the config's output block."""
    override = output_dir_override()
    if override:
        return Path(override)
    if args.out:
        return Path(args.out)
    return Path(config.output.directory if config else DEFAULT_OUTPUT_DIR)


def _precision(config: Optional[RunConfig]) -> Optional[int]:
    return config.output.precision if config else None


def _require(value, name: str):
    if value is None:
        raise ValueError(f"task.{name} is required for this command")
    return value


def _write_table(table: TraceTable, path: Path, config: Optional[RunConfig]) -> Path:
    write_csv(table.header, table.rows, path, _precision(config))
    print(f"✅ Wrote {path}")
    return path


def handle_show_config(args, config: Optional[RunConfig]) -> int:
    if config is None:
        print("❌ Configuration Error: 'show-config' requires --config")
        return ExitStatus.USAGE_ERROR
    text = dump_run_config(config)
    if args.write:
        path = resolve_output_dir(args, config) / "config_echo.json"
        atomic_write_text(text, path)
        print(f"✅ Wrote {path}")
    else:
        sys.stdout.write(text)
    return ExitStatus.SUCCESS


def handle_spectrum(args, config: RunConfig, output_dir: Path):
    """Sorted spectra, EP scan and optional EP refinement."""
    task = config.task
    sweep = _require(task.sweep, "sweep")
    system = config.to_system_config()
    grid = sweep.values()

    result = spectrum_sweep(system, sweep.parameter, grid, threads=args.threads)
    files = [_write_table(TraceTable(result.header(), result.to_rows()), output_dir / "spectrum.csv", config)]
    if result.gaps:
        print(f"⚠️  Eigensolver failed at {len(result.gaps)} grid point(s); rows left blank")

    scan = ep_scan(system, sweep.parameter, grid, task.eig_tol, task.vec_tol, threads=args.threads)
    files.append(_write_table(ep_scan_table(scan), output_dir / "ep_scan.csv", config))
    ep_points = sum(1 for _, clusters in scan if clusters)
    print(f"🔍 EP clusters found at {ep_points} grid point(s)")

    if task.ep_bracket is not None:
        value, clusters = locate_ep(system, sweep.parameter, task.ep_bracket, task.eig_tol, task.vec_tol)
        files.append(_write_table(ep_scan_table([(value, clusters)]), output_dir / "ep_location.csv", config))
    return ExitStatus.SUCCESS, files


def handle_evolve(args, config: RunConfig, output_dir: Path):
    """Trajectory, per-time entanglement report and Bloch vectors."""
    task = config.task
    times = _require(task.time_values(), "times")
    system = config.to_system_config()
    psi0 = config.initial_state_vector()
    targets = {name: named_target(name, system.n) for name in task.targets}

    trajectory = propagate_series(build_hamiltonian(system), psi0, times)
    files = [_write_table(TraceTable(trajectory.header(), trajectory.to_rows()),
                          output_dir / "trajectory.csv", config)]

    reports = [report(state, t, targets) for t, state in zip(trajectory.times, trajectory.states)]
    files.append(_write_table(TraceTable(reports[0].header(), [r.to_row() for r in reports]),
                              output_dir / "report.csv", config))

    for j in task.bloch_qubits or range(1, system.n + 1):
        if not 1 <= j <= system.n:
            raise ValueError(f"Bloch qubit {j} out of range for n={system.n}")
        bloch = BlochTrajectory(
            times=trajectory.times,
            vectors=np.array([r.bloch[j - 1] for r in reports]),
            purities=np.array([r.purities[j - 1] for r in reports]),
        )
        files.append(_write_table(bloch.to_table(), output_dir / f"bloch_q{j}.csv", config))
    return ExitStatus.SUCCESS, files


def handle_map(args, config: RunConfig, output_dir: Path):
    task = config.task
    grid = SweepGrid(times=_require(task.time_values(), "times"), j_values=_require(task.j_values(), "j_grid"),
                     omegas=task.omega_values())
    result = entanglement_map(config.to_system_config(), config.initial_state_vector(), grid,
                              task.objective, threads=args.threads, show_progress=True)
    files = [_write_table(TraceTable(result.header(), result.to_rows()), output_dir / "map.csv", config)]
    if result.failures:
        print(f"⚠️  {len(result.failures)} map cell(s) failed; values left blank")
    peak = result.argmax()
    print(f"📈 {result.objective} maximum {peak['value']:.6f} at t={peak['t']:.6g} us, J={peak['J']:.6g} rad/us")
    return ExitStatus.SUCCESS, files


def handle_optimize(args, config: RunConfig, output_dir: Path):
    task = config.task
    box_block = _require(task.box, "box")
    box = SearchBox(t=box_block.t, J=box_block.J, omega=box_block.omega)
    optimum = find_optimal(config.to_system_config(), config.initial_state_vector(), box, task.objective,
                           threads=args.threads)
    table = TraceTable(header=["t", "J", "omega", "value", "evaluations"],
                       rows=[[optimum.t, optimum.J, optimum.omega, optimum.value, optimum.evaluations]])
    files = [_write_table(table, output_dir / "optimum.csv", config)]
    print(f"📈 Optimum {optimum.value:.6f} at t={optimum.t:.6g} us, J={optimum.J:.6g} rad/us")
    return ExitStatus.SUCCESS, files


def handle_fidelity(args, config: RunConfig, output_dir: Path):
    task = config.task
    system = config.to_system_config()
    names = task.targets or DEFAULT_FIDELITY_TARGETS
    targets = {name: named_target(name, system.n) for name in names}
    table = fidelity_traces(system, config.initial_state_vector(), targets, _require(task.time_values(), "times"))
    return ExitStatus.SUCCESS, [_write_table(table, output_dir / "fidelity.csv", config)]


def handle_reproduce(args, config: Optional[RunConfig], output_dir: Path):
    """Regenerate one scenario; exit 3 when a non-informational manifest entry fails."""
    kwargs = {"precision": config.output.precision} if config else {}
    result = reproduce_scenario(args.label, output_dir, quick=args.quick, threads=args.threads, **kwargs)
    for entry in result.manifest:
        mark = "✅" if entry.passed else ("ℹ️ " if entry.informational else "❌")
        print(f"{mark} {entry.name}: observed {entry.observed:.6g}, expected {entry.expected:.6g} "
              f"({entry.comparison}, tol {entry.tolerance:g})")
    if not result.passed:
        print(f"❌ {len(result.failures)} manifest check(s) failed for {args.label}")
        return ExitStatus.MANIFEST_FAILED, result.files
    return ExitStatus.SUCCESS, result.files


def save_run_metadata(args, config: Optional[RunConfig], output_dir: Path, files: List[Path]) -> None:
    metadata = {
        "version": VERSION,
        "command": args.command,
        "timestamp": datetime.now().isoformat(timespec="seconds"),
        "threads": args.threads,
        "config": config.model_dump(mode="json") if config else None,
        "files": [str(Path(f).relative_to(output_dir)) for f in files],
    }
    save_json(metadata, output_dir / "run_metadata.json")


if __name__ == "__main__":
    sys.exit(main())
