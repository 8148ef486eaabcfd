"""Pydantic models for configuration, state specifications and reports."""

import math
from enum import Enum
from pathlib import Path
from typing import Any, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator, model_validator

from qcorr import config
from qcorr.core.densop import BipartiteDims


# Seeds are unsigned 64-bit integers
MAX_SEED = 2 ** 64
DEFAULT_PENALTY_SCHEDULE = (1e1, 1e2, 1e3, 1e4)
SIGNIFICANT_DIGITS = 12


def round_significant(value: Optional[float]) -> Any:
    """Round to SIGNIFICANT_DIGITS significant digits; non-finite values become strings."""
    if value is None:
        return None
    if not math.isfinite(value):
        return str(value)
    return float(f"{value:.{SIGNIFICANT_DIGITS}g}")


class OptimizerConfig(BaseModel):
    """Budget and seeding for every optimizer-backed measure.

    ``ansatz_terms`` and ``m_outcomes`` default to dim_a²·dim_b² and dim_a²
    for the state at hand when left unset.
    """
    model_config = ConfigDict(frozen=True)

    seed: int = Field(..., ge=0, lt=MAX_SEED, description="Master seed for all restarts")
    restarts: int = Field(default=config.RESTARTS, ge=1)
    max_iters: int = Field(default=config.MAX_ITERS, ge=1, description="Simplex iterations per restart")
    xtol: float = Field(default=1e-8, gt=0)
    ftol: float = Field(default=1e-10, gt=0)
    penalty_schedule: tuple[float, ...] = Field(default=DEFAULT_PENALTY_SCHEDULE)
    ansatz_terms: Optional[int] = Field(default=None, ge=1)
    m_outcomes: Optional[int] = Field(default=None, ge=1)
    workers: int = Field(default=config.WORKERS, ge=1, description="Threads running restarts")

    @field_validator("penalty_schedule")
    @classmethod
    def check_schedule(cls, schedule: tuple[float, ...]) -> tuple[float, ...]:
        """Require a non-empty, positive, strictly increasing schedule."""
        if not schedule:
            raise ValueError("penalty_schedule must not be empty")
        if schedule[0] <= 0:
            raise ValueError("penalty_schedule entries must be positive")
        if any(later <= earlier for earlier, later in zip(schedule, schedule[1:])):
            raise ValueError("penalty_schedule must be strictly increasing")
        return schedule

    def terms_for(self, dims: BipartiteDims) -> int:
        return self.ansatz_terms or dims.dim_a ** 2 * dims.dim_b ** 2

    def outcomes_for(self, dims: BipartiteDims) -> int:
        return self.m_outcomes or dims.dim_a ** 2


class GridSpec(BaseModel):
    """Resolution of the (theta, phi) grid used by the qubit discord oracle."""
    model_config = ConfigDict(frozen=True)

    n_theta: int = Field(default=181, ge=2)
    n_phi: int = Field(default=360, ge=2)


class FamilyName(str, Enum):
    """Named state families accepted on the command line."""
    BELL_MIXTURE = "bell_mixture"
    NONORTHOGONAL_SEP = "nonorthogonal_sep"
    WERNER = "werner"
    PRODUCT = "product"
    RANDOM = "random"
    PURE_BELL = "pure_bell"


PARAMETRIZED_FAMILIES = {FamilyName.BELL_MIXTURE, FamilyName.NONORTHOGONAL_SEP, FamilyName.WERNER}


class StateSpec(BaseModel):
    """Where a density matrix comes from: a JSON file or a named family."""
    model_config = ConfigDict(frozen=True)

    file: Optional[Path] = None
    family: Optional[FamilyName] = None
    p: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    file_a: Optional[Path] = None
    file_b: Optional[Path] = None
    state_seed: Optional[int] = Field(default=None, ge=0, lt=MAX_SEED)
    rank: Optional[int] = Field(default=None, ge=1)

    @model_validator(mode="after")
    def check_source(self) -> "StateSpec":
        """Exactly one source, with the parameters its family needs."""
        if (self.file is None) == (self.family is None):
            raise ValueError("Give exactly one of file or family")
        if self.family in PARAMETRIZED_FAMILIES and self.p is None:
            raise ValueError(f"Family {self.family.value} needs p")
        if self.family is FamilyName.PRODUCT and (self.file_a is None or self.file_b is None):
            raise ValueError("Family product needs file_a and file_b")
        if self.family is FamilyName.RANDOM and (self.state_seed is None or self.rank is None):
            raise ValueError("Family random needs state_seed and rank")
        return self

    def describe(self) -> str:
        if self.file is not None:
            return f"file:{self.file}"
        if self.family in PARAMETRIZED_FAMILIES:
            return f"{self.family.value}(p={self.p!r})"
        if self.family is FamilyName.PRODUCT:
            return f"product({self.file_a}, {self.file_b})"
        if self.family is FamilyName.RANDOM:
            return f"random(seed={self.state_seed}, rank={self.rank})"
        return self.family.value


class MeasureName(str, Enum):
    """Measures the compute command knows."""
    MUTUAL_INFO = "mutual_info"
    DISCORD = "discord"
    DEFICIT = "deficit"
    CC_HV = "cc_hv"
    QUANTUMNESS = "quantumness"
    ERE = "ere"
    CC_GENERALIZED = "cc_generalized"
    ADDITIVITY_GAP = "additivity_gap"
    Q_PROJECTIVE = "q_projective"


class MeasureEntry(BaseModel):
    """One measure in a report."""

    measure: MeasureName
    value: float
    unit: str = "bits"
    certificate: Optional[dict[str, Any]] = None
    constraint_residual: Optional[float] = None
    restarts: Optional[int] = None
    evaluations: Optional[int] = None
    converged: bool = True
    degeneracy_flag: bool = False
    wall_time: Optional[float] = Field(default=None, description="Seconds; only with --timings")

    @field_serializer("value", "constraint_residual", "wall_time", when_used="json")
    def serialize_number(self, v: Optional[float]) -> Any:
        """Serialize floats with SIGNIFICANT_DIGITS significant digits."""
        return round_significant(v)


class Report(BaseModel):
    """Machine-readable result of one compute run."""

    state: str
    p: Optional[float] = None
    seed: Optional[int] = None
    unit: str = "bits"
    version: str
    measures: List[MeasureEntry]

    @property
    def converged(self) -> bool:
        return all(entry.converged for entry in self.measures)

    def value_of(self, measure: MeasureName | str) -> float:
        name = MeasureName(measure)
        for entry in self.measures:
            if entry.measure is name:
                return entry.value
        raise KeyError(name.value)
