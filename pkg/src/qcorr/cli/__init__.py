"""Command-line front end: argument parsing for ``compute`` and ``sweep``."""

import argparse
from pathlib import Path

from qcorr import __version__, config
from qcorr.api.models import FamilyName, MeasureName


def parse_measures(text: str) -> list[MeasureName]:
    """Comma-separated measure labels, e.g. ``discord,deficit``."""
    labels = [label.strip() for label in text.split(",") if label.strip()]
    if not labels:
        raise argparse.ArgumentTypeError("At least one measure is required")
    try:
        return [MeasureName(label) for label in labels]
    except ValueError as exc:
        known = ", ".join(m.value for m in MeasureName)
        raise argparse.ArgumentTypeError(f"{exc}; known measures: {known}") from exc


def _add_common_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--measures", type=parse_measures, required=True,
                        help="Comma-separated measures: " + ", ".join(m.value for m in MeasureName))
    parser.add_argument("--seed", type=int, help="Master seed; required for optimizer-backed measures")
    parser.add_argument("--restarts", type=int, default=None, help=f"Optimizer restarts (default {config.RESTARTS})")
    parser.add_argument("--max-iters", type=int, default=None,
                        help=f"Simplex iterations per restart (default {config.MAX_ITERS})")
    parser.add_argument("--k-terms", type=int, default=None, help="Separable ansatz terms (default dA²·dB²)")
    parser.add_argument("--m-outcomes", type=int, default=None, help="POVM outcomes for cc_hv (default dA²)")
    parser.add_argument("--workers", type=int, default=None, help="Threads running restarts")
    parser.add_argument("--nats", action="store_true", help="Report entropies in nats instead of bits")
    parser.add_argument("--timings", action="store_true", help="Include per-measure wall time")
    parser.add_argument("--log-level", default=None,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcorr",
        description="Quantum and classical correlation measures of bipartite density matrices.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    compute = commands.add_parser("compute", help="Evaluate measures on one state")
    source = compute.add_mutually_exclusive_group(required=True)
    source.add_argument("--file", type=Path, help="JSON density matrix with dims")
    source.add_argument("--family", choices=[f.value for f in FamilyName], help="Named state family")
    compute.add_argument("--p", type=float, help="Family parameter in [0, 1]")
    compute.add_argument("--file-a", type=Path, help="Subsystem A state for the product family")
    compute.add_argument("--file-b", type=Path, help="Subsystem B state for the product family")
    compute.add_argument("--state-seed", type=int, help="Seed of the random family")
    compute.add_argument("--rank", type=int, help="Rank of the random family")
    _add_common_options(compute)

    sweep = commands.add_parser("sweep", help="Evaluate measures along a family parameter grid")
    sweep.add_argument("--family", required=True, choices=[f.value for f in FamilyName])
    sweep.add_argument("--p-start", type=float, default=0.0)
    sweep.add_argument("--p-stop", type=float, default=1.0)
    sweep.add_argument("--p-steps", type=int, default=11, help="Number of grid points, endpoints included")
    sweep.add_argument("--csv", type=Path, help="Also write a CSV table here")
    _add_common_options(sweep)
    return parser
