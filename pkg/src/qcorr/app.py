import argparse
import json
import logging
import sys
from typing import Optional, Sequence

import numpy as np
import pydantic

from qcorr.api.models import OptimizerConfig, StateSpec
from qcorr.cli import build_parser
from qcorr.cli.compute import run_compute
from qcorr.cli.sweep import run_sweep
from qcorr.core.entropy import EntropyUnit
from qcorr.exceptions import QuantumCorrelationError, ValidationError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = ValidationError.exit_code
EXIT_NOT_CONVERGED = 3


def optimizer_config(args: argparse.Namespace) -> Optional[OptimizerConfig]:
    """OptimizerConfig from command-line overrides; None without a seed."""
    if args.seed is None:
        return None
    overrides = {
        "restarts": args.restarts,
        "max_iters": args.max_iters,
        "ansatz_terms": args.k_terms,
        "m_outcomes": args.m_outcomes,
        "workers": args.workers,
    }
    return OptimizerConfig(seed=args.seed, **{k: v for k, v in overrides.items() if v is not None})


def _unit(args: argparse.Namespace) -> EntropyUnit:
    return EntropyUnit.NATS if args.nats else EntropyUnit.BITS


def compute_command(args: argparse.Namespace) -> int:
    """Handler for ``qcorr compute``.

    Args:
        args: Parsed command-line arguments

    Returns:
        int: 0, or 3 when any requested measure did not converge
    """
    spec = StateSpec(
        file=args.file,
        family=args.family,
        p=args.p,
        file_a=args.file_a,
        file_b=args.file_b,
        state_seed=args.state_seed,
        rank=args.rank,
    )
    report = run_compute(spec, args.measures, optimizer_config(args), _unit(args), args.m_outcomes, args.timings)
    sys.stdout.write(report.model_dump_json(indent=2) + "\n")
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def sweep_command(args: argparse.Namespace) -> int:
    """Handler for ``qcorr sweep``.

    Args:
        args: Parsed command-line arguments

    Returns:
        int: 0, or 3 when any measure at any grid point did not converge
    """
    if args.p_steps < 0:
        raise ValidationError(detail=f"--p-steps must be nonnegative, got {args.p_steps}")
    p_grid = np.linspace(args.p_start, args.p_stop, args.p_steps).tolist()
    reports = run_sweep(
        args.family, p_grid, args.measures, optimizer_config(args), _unit(args),
        args.m_outcomes, args.csv, args.timings,
    )
    document = [report.model_dump(mode="json") for report in reports]
    sys.stdout.write(json.dumps(document, indent=2) + "\n")
    return EXIT_OK if all(report.converged for report in reports) else EXIT_NOT_CONVERGED


COMMANDS = {"compute": compute_command, "sweep": sweep_command}


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv``, run the command and map failures to exit codes.

    Args:
        argv: Arguments without the program name; ``sys.argv[1:]`` if None

    Returns:
        int: Process exit code (0 ok, 1 internal, 2 validation, 3 not converged)
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_VALIDATION

    if args.log_level:
        logging.getLogger("qcorr").setLevel(args.log_level)

    try:
        return COMMANDS[args.command](args)
    except QuantumCorrelationError as e:
        # Log the error with full traceback
        logger.error(e, exc_info=True)
        sys.stderr.write(json.dumps({"detail": e.detail}) + "\n")
        return e.exit_code
    except pydantic.ValidationError as e:
        logger.error(e, exc_info=True)
        sys.stderr.write(json.dumps({"detail": str(e)}) + "\n")
        return EXIT_VALIDATION
    except Exception as e:
        # Log unexpected errors
        logger.error(f"Unexpected error in {args.command} command: {e}", exc_info=True)
        sys.stderr.write(json.dumps({"detail": "An unexpected error occurred"}) + "\n")
        return 1
