"""Density-matrix JSON documents, state specifications and CSV output.

A document looks like ``{"dims": [dA, dB], "re": rows, "im": rows}`` where
``re`` and ``im`` are the real and imaginary parts in row-major order, either
as a list of rows or as one flat list. ``dims`` may be omitted for a single
system. Index ordering is A-major: |a, b> is row ``a * dB + b``.
"""

import csv
import json
import logging
import math
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from qcorr.api.models import FamilyName, MeasureName, Report, StateSpec
from qcorr.core import states
from qcorr.core.densop import BipartiteDims, DensityMatrix, validate_density
from qcorr.core.oracle import random_state
from qcorr.exceptions import ParseError, UnknownFamilyError

logger = logging.getLogger(__name__)


def density_to_document(rho: DensityMatrix) -> dict[str, Any]:
    document: dict[str, Any] = {}
    if rho.dims is not None:
        document["dims"] = [rho.dims.dim_a, rho.dims.dim_b]
    document["re"] = rho.mat.real.tolist()
    document["im"] = rho.mat.imag.tolist()
    return document


def density_from_document(document: Any) -> DensityMatrix:
    """Validate a parsed JSON document into a DensityMatrix.

    Raises:
        ParseError: If fields are missing or have the wrong shape
        ValidationError: If the matrix is not a valid density matrix
    """
    if not isinstance(document, dict) or "re" not in document:
        raise ParseError(detail="Document must be an object with at least an 're' field")
    try:
        real = np.asarray(document["re"], dtype=np.float64)
        imag = np.asarray(document.get("im", np.zeros_like(real)), dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ParseError(detail=f"Matrix entries must be numbers: {exc}") from exc
    if real.shape != imag.shape:
        raise ParseError(detail=f"'re' has shape {real.shape} but 'im' has shape {imag.shape}")

    if real.ndim == 1:
        side = math.isqrt(real.size)
        if side * side != real.size or side == 0:
            raise ParseError(detail=f"Flat matrix of {real.size} entries is not square")
        real, imag = real.reshape(side, side), imag.reshape(side, side)
    elif real.ndim != 2:
        raise ParseError(detail=f"Matrix must be 1- or 2-dimensional, got {real.ndim} dimensions")

    dims = None
    raw_dims = document.get("dims")
    if raw_dims is not None:
        if not (isinstance(raw_dims, list) and len(raw_dims) == 2 and all(isinstance(d, int) for d in raw_dims)):
            raise ParseError(detail=f"'dims' must be a pair of integers, got {raw_dims!r}")
        dims = BipartiteDims(*raw_dims)
    return validate_density(real + 1j * imag, dims)


def load_density(path: Path | str) -> DensityMatrix:
    """Read and validate a density-matrix document.

    Raises:
        ParseError: If the file is missing or not valid JSON
    """
    try:
        document = json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ParseError(detail=f"No such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(detail=f"Malformed JSON in {path}: {exc}") from exc
    return density_from_document(document)


def dump_density(rho: DensityMatrix, path: Path | str) -> None:
    Path(path).write_text(json.dumps(density_to_document(rho)))


def parse_state(spec: StateSpec) -> DensityMatrix:
    """Build the density matrix a StateSpec describes.

    Raises:
        ParseError: For unreadable files
        ValidationError: If the matrix fails validation
        UnknownFamilyError: For a family without a constructor
    """
    if spec.file is not None:
        rho = load_density(spec.file)
        rho.require_dims()
        return rho

    family = spec.family
    if family is FamilyName.BELL_MIXTURE:
        return states.bell_mixture(spec.p)
    if family is FamilyName.NONORTHOGONAL_SEP:
        return states.nonorthogonal_sep(spec.p)
    if family is FamilyName.WERNER:
        return states.werner(spec.p)
    if family is FamilyName.PURE_BELL:
        return states.pure_bell()
    if family is FamilyName.PRODUCT:
        return states.product(load_density(spec.file_a), load_density(spec.file_b))
    if family is FamilyName.RANDOM:
        return random_state(spec.state_seed, states.TWO_QUBITS, spec.rank)
    raise UnknownFamilyError(detail=f"Unknown state family: {family}")


def write_csv(path: Path | str, measures: Sequence[MeasureName], reports: Sequence[Report]) -> None:
    """One row per report: p, then one column per measure."""
    with Path(path).open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["p", *(measure.value for measure in measures)])
        for report in reports:
            writer.writerow([
                repr(report.p),
                *(f"{report.value_of(measure):.12g}" for measure in measures),
            ])
    logger.info("Wrote %d rows to %s", len(reports), path)
