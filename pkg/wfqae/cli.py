"""
wfqae - Command Line Interface
Runs feedback-based eigenstate preparation experiments and reports on them.

Usage:
    wfqae run lih-wfqae           # Run a bundled or file-based experiment
    wfqae spectrum lih-sto6g-R2.5 # Exact eigenvalues of a model
    wfqae replay circuit.yaml --state=-++  # Replay a circuit
    wfqae config lih-wfqae        # Echo the normalized config
    wfqae presets                 # List bundled experiments and models

Exit codes: 0 success, 2 bad input, 3 runtime invariant failure.
"""

import argparse
import logging
import sys
from typing import List, Optional

from .algorithms import Ensemble, LayerRecord, replay, run_falqon, run_wfqae
from .config import (
    build_experiment,
    list_experiment_presets,
    load_experiment,
    resolve_model,
    save_experiment,
)
from .errors import ConfigError, ConvergenceError, DimensionError, InvariantError, ParseError
from .export import (
    build_report,
    dump_states,
    fmt,
    load_circuit,
    save_circuit,
    write_report_json,
    write_trace_csv,
)
from .feedback import FeedbackMode
from .models import list_model_presets
from .spectrum import degeneracy_groups, diagonalize, fidelity
from .statevector import expectation, parse_state_spec

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_INVARIANT = 3

DEFAULT_LEVELS_SHOWN = 4

logger = logging.getLogger(__name__)


# ============================================================
# OUTPUT HELPERS
# ============================================================

def print_spectrum(eigenvalues, highlight: int) -> None:
    """Ascending eigenvalue table with degeneracy groups; the lowest `highlight` are starred."""
    groups = degeneracy_groups(eigenvalues)
    group_of = {i: g for g, members in enumerate(groups) for i in members}
    print(f"{'level':>5}  {'eigenvalue':>20}  group")
    for i, value in enumerate(eigenvalues):
        mark = " *" if i < highlight else ""
        print(f"{i:>5}  {fmt(value):>20}  {group_of[i]}{mark}")
    print(f"\n{len(eigenvalues)} eigenvalues in {len(groups)} degeneracy groups")


def print_summary(report: dict) -> None:
    print(f"\n📊 {report['name'] or 'run'} ({report['mode']}, {report['depth']} layers)")
    print("-" * 60)
    for reg in report["registers"]:
        print(
            f"  q={reg['register']}  E: {fmt(reg['initial_energy'])} -> {fmt(reg['final_energy'])}"
            f"  (exact {fmt(reg['target_eigenvalue'])})"
        )
        print(
            f"        |E-λ|: {fmt(reg['initial_error'])} -> {fmt(reg['final_error'])}"
            f"  fidelity: {fmt(reg['initial_fidelity'])} -> {fmt(reg['final_fidelity'])}"
        )
    print(f"\n  Lyapunov: {fmt(report['initial_lyapunov'])} -> {fmt(report['final_lyapunov'])}")
    if report["lyapunov_breaches"]:
        print(f"  ⚠️ Lyapunov value rose in {report['lyapunov_breaches']} layer(s)")
    print(f"  Max register overlap: {fmt(report['max_overlap'])}")
    print(
        f"  Estimations: {report['commutator_terms']} Pauli terms, "
        f"{report['estimations_per_layer']} per layer, {report['total_estimations']} total"
    )
    print(f"  Exact levels: {', '.join(fmt(v) for v in report['eigenvalues'][:len(report['registers'])])}")
    if report["gaps"]:
        print(f"  Gaps: {', '.join(fmt(g) for g in report['gaps'])}")


def _print_layer(record: LayerRecord) -> None:
    fids = " ".join(fmt(f) for f in record.fidelities)
    print(f"  k={record.k:>3}  V={fmt(record.lyapunov)}  fidelities: {fids}")


# ============================================================
# COMMANDS
# ============================================================

def cmd_run(args) -> int:
    """Run an experiment and write its trace, circuit, report and config echo."""
    config = load_experiment(args.config)
    if args.output_dir:
        config.output_dir = args.output_dir
    strict = args.strict or config.strict
    experiment = build_experiment(config)
    spectrum = diagonalize(experiment.drift)

    print(f"🚀 Running {config.name}: {experiment.mode.value}, depth {config.depth}, dt {config.dt}")
    options = dict(spectrum=spectrum, strict=strict, on_layer=_print_layer if args.verbose else None)
    if experiment.mode is FeedbackMode.FALQON:
        if len(experiment.initial_states) != 1:
            raise ConfigError("falqon mode takes exactly one initial state", key="initial_states")
        circuit, trace = run_falqon(
            experiment.drift, experiment.controls, experiment.initial_states[0],
            experiment.feedback, config.depth, **options,
        )
    else:
        circuit, trace = run_wfqae(
            experiment.drift, experiment.controls, Ensemble(experiment.initial_states),
            experiment.feedback, config.depth, **options,
        )

    out = config.output_path
    report = build_report(trace, spectrum, name=config.name)
    write_trace_csv(trace, out / "trace.csv")
    save_circuit(circuit, out / "circuit.yaml")
    write_report_json(report, out / "report.json")
    save_experiment(config, out / "config.yaml")
    if args.dump_states:
        dump_states(trace.final_states, out)

    print_summary(report)
    print(f"\n📁 Results written to {out}")
    return EXIT_OK


def cmd_spectrum(args) -> int:
    """Print the exact spectrum of a model."""
    drift, _ = resolve_model(args.model, args.seed)
    spectrum = diagonalize(drift)
    print(f"🔬 Spectrum of {args.model} ({drift.n_qubits} qubits, {len(drift)} terms)\n")
    print_spectrum(spectrum.eigenvalues, args.levels)
    return EXIT_OK


def cmd_replay(args) -> int:
    """Replay a circuit file on one or more initial states."""
    try:
        circuit = load_circuit(args.circuit)
    except OSError as e:
        raise ParseError(f"cannot read circuit file: {e}") from e
    spectrum = diagonalize(circuit.drift)
    levels = min(args.levels, len(spectrum))
    print(f"🔁 Replaying {circuit.depth} layers from {args.circuit}")
    for label in args.states:
        state = replay(circuit, parse_state_spec(label, circuit.n_qubits))
        fids = ", ".join(fmt(fidelity(state, spectrum, level)) for level in range(levels))
        print(f"\n  {label}: energy {fmt(expectation(state, circuit.drift))}")
        print(f"  fidelities to levels 0..{levels - 1}: {fids}")
    return EXIT_OK


def cmd_config(args) -> int:
    """Echo the normalized config; optionally save it."""
    config = load_experiment(args.source)
    if args.output:
        path = save_experiment(config, args.output)
        print(f"✅ Config written to {path}")
    else:
        print(config.to_yaml(), end="")
    return EXIT_OK


def cmd_presets(args) -> int:
    """List bundled experiments and models."""
    print("🧪 Experiment presets:")
    for name in list_experiment_presets():
        config = load_experiment(name)
        print(f"  {name:<18} {config.description}")
    print("\n⚛️  Model presets:")
    for name in list_model_presets():
        print(f"  {name}")
    return EXIT_OK


# ============================================================
# ENTRY POINT
# ============================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wfqae",
        description="Feedback-based ground and excited state preparation on a statevector simulator",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  wfqae run lih-wfqae                 Reproduce the LiH four-state run
  wfqae run my.yaml -o runs/mine      Run a config file into a chosen directory
  wfqae spectrum "1 Z; 0.5 X"         Spectrum of an inline model
  wfqae replay runs/lih-wfqae/circuit.yaml --state=-++ --levels 4
  wfqae config lih-wfqae > my.yaml    Start a config from a preset
        """,
    )
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="Print per-layer progress (-vv for debug logging)")

    subparsers = parser.add_subparsers(dest="command", help="Commands")

    run_parser = subparsers.add_parser("run", help="Run an experiment")
    run_parser.add_argument("config", help="Preset name or config file")
    run_parser.add_argument("-o", "--output-dir", help="Output directory (default runs/<name>)")
    run_parser.add_argument("--strict", action="store_true",
                            help="Fail on any Lyapunov tolerance breach")
    run_parser.add_argument("--dump-states", action="store_true",
                            help="Write final register amplitudes as CSV")
    run_parser.set_defaults(func=cmd_run)

    spectrum_parser = subparsers.add_parser("spectrum", help="Exact eigenvalues of a model")
    spectrum_parser.add_argument("model", help="Model preset, Pauli text file, inline text or random:<n>:<terms>")
    spectrum_parser.add_argument("--levels", type=int, default=DEFAULT_LEVELS_SHOWN,
                                 help="Number of lowest levels to highlight")
    spectrum_parser.add_argument("--seed", type=int, default=0, help="Seed for random models")
    spectrum_parser.set_defaults(func=cmd_spectrum)

    replay_parser = subparsers.add_parser("replay", help="Replay a circuit file")
    replay_parser.add_argument("circuit", help="Circuit file written by 'run'")
    replay_parser.add_argument("-s", "--state", dest="states", action="append", required=True,
                               help="Initial state label; repeatable. Write --state=-++ for labels starting with -")
    replay_parser.add_argument("--levels", type=int, default=DEFAULT_LEVELS_SHOWN,
                               help="Number of lowest levels to report fidelities for")
    replay_parser.set_defaults(func=cmd_replay)

    config_parser = subparsers.add_parser("config", help="Echo a normalized experiment config")
    config_parser.add_argument("source", help="Preset name or config file")
    config_parser.add_argument("-o", "--output", help="Write to this file instead of stdout")
    config_parser.set_defaults(func=cmd_config)

    presets_parser = subparsers.add_parser("presets", help="List bundled presets")
    presets_parser.set_defaults(func=cmd_presets)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)

    level = logging.WARNING
    if args.verbose >= 2:
        level = logging.DEBUG
    elif args.verbose == 1:
        level = logging.INFO
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    if args.command is None:
        parser.print_help()
        return EXIT_OK

    try:
        return args.func(args)
    except (ConfigError, ParseError, DimensionError, ConvergenceError) as e:
        print(f"❌ {e}")
        return EXIT_BAD_INPUT
    except InvariantError as e:
        print(f"❌ Invariant violated: {e}")
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
