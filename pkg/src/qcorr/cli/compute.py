"""The compute command: evaluate a set of measures on one state."""

import logging
import math
import time
from typing import Any, Iterable, Optional

import numpy as np

from qcorr import __version__
from qcorr.api.models import MeasureEntry, MeasureName, OptimizerConfig, Report, StateSpec, round_significant
from qcorr.cli.io import parse_state
from qcorr.core import correlations
from qcorr.core.correlations import Certificate, MeasureReport
from qcorr.core.densop import DensityMatrix
from qcorr.core.entropy import EntropyUnit, mutual_information
from qcorr.core.measurement import ProjectiveMeasurement, RankOnePOVM
from qcorr.core.optimize import SeparableAnsatz
from qcorr.exceptions import ValidationError

logger = logging.getLogger(__name__)

OPTIMIZED_MEASURES = frozenset({
    MeasureName.DISCORD,
    MeasureName.CC_HV,
    MeasureName.QUANTUMNESS,
    MeasureName.ERE,
    MeasureName.CC_GENERALIZED,
    MeasureName.ADDITIVITY_GAP,
    MeasureName.Q_PROJECTIVE,
})


def _rounded(array: np.ndarray) -> Any:
    return [_rounded(row) for row in array] if np.ndim(array) > 1 else [round_significant(float(x)) for x in array]


def certificate_summary(certificate: Certificate) -> Optional[dict[str, Any]]:
    """JSON-friendly description of a measurement or separable ansatz."""
    if certificate is None:
        return None
    if isinstance(certificate, ProjectiveMeasurement):
        return {
            "type": "projective",
            "basis_re": _rounded(certificate.basis.real),
            "basis_im": _rounded(certificate.basis.imag),
        }
    if isinstance(certificate, RankOnePOVM):
        return {
            "type": "povm",
            "outcomes": int(certificate.kraus_vectors.shape[0]),
            "vectors_re": _rounded(certificate.kraus_vectors.real),
            "vectors_im": _rounded(certificate.kraus_vectors.imag),
        }
    if isinstance(certificate, SeparableAnsatz):
        return {
            "type": "separable",
            "terms": certificate.terms,
            "weights": _rounded(certificate.weights),
            "a_re": _rounded(certificate.unit_a.real),
            "a_im": _rounded(certificate.unit_a.imag),
            "b_re": _rounded(certificate.unit_b.real),
            "b_im": _rounded(certificate.unit_b.imag),
        }
    raise TypeError(f"Unsupported certificate type: {type(certificate).__name__}")


class MeasureSession:
    """Computes measures on one state, sharing intermediate reports.

    Values are computed in bits; ``unit`` only rescales what ends up in the
    report, so a nats report is the bits report times ln 2 exactly.
    """

    def __init__(
        self,
        rho: DensityMatrix,
        config: Optional[OptimizerConfig],
        unit: EntropyUnit = EntropyUnit.BITS,
        m_outcomes: Optional[int] = None,
        timings: bool = False
    ) -> None:
        self.rho = rho
        self.config = config
        self.unit = EntropyUnit(unit)
        self.m_outcomes = m_outcomes
        self.timings = timings
        self._reports: dict[MeasureName, MeasureReport] = {}
        self._scale = 1.0 if self.unit is EntropyUnit.BITS else math.log(2.0)

    def _require_config(self, measure: MeasureName) -> OptimizerConfig:
        if self.config is None:
            raise ValidationError(detail=f"Measure {measure.value} needs --seed")
        return self.config

    def report(self, measure: MeasureName) -> MeasureReport:
        if measure not in self._reports:
            self._reports[measure] = self._compute(measure)
        return self._reports[measure]

    def _compute(self, measure: MeasureName) -> MeasureReport:
        rho = self.rho
        if measure is MeasureName.MUTUAL_INFO:
            return MeasureReport("mutual_info", mutual_information(rho, EntropyUnit.BITS).value)
        if measure is MeasureName.DEFICIT:
            return correlations.quantum_deficit(rho)

        config = self._require_config(measure)
        if measure is MeasureName.DISCORD:
            return correlations.quantum_discord(rho, config)
        if measure is MeasureName.CC_HV:
            return correlations.classical_correlation_hv(rho, self.m_outcomes, config)
        if measure is MeasureName.QUANTUMNESS:
            return correlations.quantumness(rho, config)
        if measure is MeasureName.ERE:
            return correlations.relative_entropy_of_entanglement(rho, config)
        if measure is MeasureName.Q_PROJECTIVE:
            return correlations.projective_quantumness(rho, config)
        if measure is MeasureName.CC_GENERALIZED:
            return correlations.generalized_classical_correlation(
                rho, config, quantumness_report=self.report(MeasureName.QUANTUMNESS)
            )
        if measure is MeasureName.ADDITIVITY_GAP:
            cc_report = self.report(MeasureName.CC_HV)
            ere_report = self.report(MeasureName.ERE)
            gap = correlations.additivity_gap(
                rho, self.m_outcomes, config, cc_report=cc_report, ere_report=ere_report
            )
            # Unconverged when either underlying search is
            return MeasureReport(
                "additivity_gap", gap,
                diagnostics=cc_report.diagnostics if not cc_report.converged else ere_report.diagnostics,
            )
        raise ValidationError(detail=f"Unknown measure: {measure}")

    def entry(self, measure: MeasureName) -> MeasureEntry:
        started = time.perf_counter()
        report = self.report(measure)
        elapsed = time.perf_counter() - started
        diagnostics = report.diagnostics
        return MeasureEntry(
            measure=measure,
            value=report.value * self._scale,
            unit=self.unit.value,
            certificate=certificate_summary(report.certificate),
            constraint_residual=report.constraint_residual,
            restarts=len(diagnostics.restart_values) if diagnostics else None,
            evaluations=diagnostics.evaluations if diagnostics else None,
            converged=report.converged,
            degeneracy_flag=report.degeneracy_flag,
            wall_time=elapsed if self.timings else None,
        )


def run_compute(
    spec: StateSpec,
    measures: Iterable[MeasureName],
    config: Optional[OptimizerConfig],
    unit: EntropyUnit = EntropyUnit.BITS,
    m_outcomes: Optional[int] = None,
    timings: bool = False
) -> Report:
    """Evaluate ``measures`` on the state ``spec`` describes.

    Args:
        spec: Source of the density matrix
        measures: Labels to evaluate, reported in the order given
        config: Optimizer budget and seed; required for optimizer-backed measures
        unit: Unit of the reported entropies
        m_outcomes: POVM size for cc_hv and additivity_gap (defaults to dim_a²)
        timings: Include per-measure wall time

    Returns:
        Report: One entry per requested measure

    Raises:
        ValidationError: For invalid states or a missing seed
    """
    measures = list(dict.fromkeys(MeasureName(measure) for measure in measures))
    if config is None and OPTIMIZED_MEASURES.intersection(measures):
        needing = ", ".join(sorted(m.value for m in OPTIMIZED_MEASURES.intersection(measures)))
        raise ValidationError(detail=f"A --seed is required for optimizer-backed measures: {needing}")

    rho = parse_state(spec)
    session = MeasureSession(rho, config, unit, m_outcomes, timings)
    entries = [session.entry(measure) for measure in measures]
    logger.info("Computed %d measures for %s", len(entries), spec.describe())
    return Report(
        state=spec.describe(),
        p=spec.p,
        seed=config.seed if config else None,
        unit=EntropyUnit(unit).value,
        version=__version__,
        measures=entries,
    )
