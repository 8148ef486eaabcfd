"""The sweep command: one compute run per point of a parameter grid."""

import logging
from pathlib import Path
from typing import Iterable, Optional, Sequence

from qcorr.api.models import PARAMETRIZED_FAMILIES, FamilyName, MeasureName, OptimizerConfig, Report, StateSpec
from qcorr.cli.compute import run_compute
from qcorr.cli.io import write_csv
from qcorr.core.entropy import EntropyUnit
from qcorr.exceptions import ValidationError

logger = logging.getLogger(__name__)


def run_sweep(
    family: FamilyName | str,
    p_grid: Sequence[float],
    measures: Iterable[MeasureName],
    config: Optional[OptimizerConfig],
    unit: EntropyUnit = EntropyUnit.BITS,
    m_outcomes: Optional[int] = None,
    csv_path: Optional[Path] = None,
    timings: bool = False
) -> list[Report]:
    """Compute ``measures`` for ``family(p)`` at every p of ``p_grid``, in order.

    Every grid point reuses the same master seed, so each report matches the
    compute command run on that point alone.

    Raises:
        ValidationError: If the family does not take a single parameter p
    """
    family = FamilyName(family)
    if family not in PARAMETRIZED_FAMILIES:
        raise ValidationError(detail=f"Family {family.value} is not parametrized by p")
    measures = list(dict.fromkeys(MeasureName(measure) for measure in measures))

    reports = []
    for p in p_grid:
        spec = StateSpec(family=family, p=float(p))
        reports.append(run_compute(spec, measures, config, unit, m_outcomes, timings))
        logger.debug("Sweep point %s done", spec.describe())

    if csv_path is not None:
        write_csv(csv_path, measures, reports)
    return reports
