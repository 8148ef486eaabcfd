"""Unit tests for API Pydantic models."""

import json
import math

import pytest
from pydantic import ValidationError

from qcorr.api.models import (
    DEFAULT_PENALTY_SCHEDULE,
    MAX_SEED,
    FamilyName,
    GridSpec,
    MeasureEntry,
    MeasureName,
    OptimizerConfig,
    Report,
    StateSpec,
    round_significant,
)
from qcorr.core.densop import BipartiteDims


class TestMeasureName:
    """Test cases for MeasureName enum."""

    def test_measure_name_enum_values(self) -> None:
        """Test that MeasureName enum has the command-line labels."""
        assert MeasureName.MUTUAL_INFO == "mutual_info"
        assert MeasureName.CC_HV == "cc_hv"
        assert MeasureName.Q_PROJECTIVE == "q_projective"

    def test_measure_name_enum_membership(self) -> None:
        expected = {
            "mutual_info", "discord", "deficit", "cc_hv", "quantumness",
            "ere", "cc_generalized", "additivity_gap", "q_projective",
        }
        assert {m.value for m in MeasureName} == expected

    def test_measure_name_invalid_construction(self) -> None:
        with pytest.raises(ValueError) as exc_info:
            MeasureName("entanglement_of_formation")
        assert "entanglement_of_formation" in str(exc_info.value)


class TestOptimizerConfig:
    """Test cases for OptimizerConfig model."""

    def test_defaults(self) -> None:
        config = OptimizerConfig(seed=1)
        assert config.penalty_schedule == DEFAULT_PENALTY_SCHEDULE
        assert config.xtol == 1e-8
        assert config.ftol == 1e-10
        assert config.ansatz_terms is None

    def test_seed_is_required(self) -> None:
        with pytest.raises(ValidationError) as exc_info:
            OptimizerConfig()
        assert "seed" in exc_info.value.errors()[0]["loc"]

    @pytest.mark.parametrize("seed", [-1, MAX_SEED])
    def test_seed_range(self, seed) -> None:
        with pytest.raises(ValidationError):
            OptimizerConfig(seed=seed)

    def test_largest_seed(self) -> None:
        assert OptimizerConfig(seed=MAX_SEED - 1).seed == MAX_SEED - 1

    @pytest.mark.parametrize("schedule", [(), (0.0, 1.0), (10.0, 10.0), (100.0, 10.0)])
    def test_invalid_schedule(self, schedule) -> None:
        with pytest.raises(ValidationError):
            OptimizerConfig(seed=1, penalty_schedule=schedule)

    @pytest.mark.parametrize("field, value", [("restarts", 0), ("max_iters", 0), ("workers", 0), ("xtol", 0.0)])
    def test_positive_fields(self, field, value) -> None:
        with pytest.raises(ValidationError):
            OptimizerConfig(seed=1, **{field: value})

    def test_frozen(self) -> None:
        config = OptimizerConfig(seed=1)
        with pytest.raises(ValidationError):
            config.seed = 2

    def test_dimension_dependent_defaults(self) -> None:
        config = OptimizerConfig(seed=1)
        assert config.terms_for(BipartiteDims(2, 2)) == 16
        assert config.outcomes_for(BipartiteDims(3, 2)) == 9
        overridden = OptimizerConfig(seed=1, ansatz_terms=5, m_outcomes=3)
        assert overridden.terms_for(BipartiteDims(2, 2)) == 5
        assert overridden.outcomes_for(BipartiteDims(2, 2)) == 3


class TestStateSpec:
    """Test cases for StateSpec model."""

    def test_family_with_p(self) -> None:
        spec = StateSpec(family="bell_mixture", p=0.75)
        assert spec.family is FamilyName.BELL_MIXTURE
        assert spec.describe() == "bell_mixture(p=0.75)"

    def test_file(self, tmp_path) -> None:
        spec = StateSpec(file=tmp_path / "rho.json")
        assert spec.describe().startswith("file:")

    @pytest.mark.parametrize("kwargs", [
        {},
        {"file": "rho.json", "family": "pure_bell"},
        {"family": "bell_mixture"},
        {"family": "werner", "p": 1.5},
        {"family": "product", "file_a": "a.json"},
        {"family": "random", "state_seed": 1},
        {"family": "random", "state_seed": 1, "rank": 0},
        {"family": "no_such_family"},
    ])
    def test_invalid_specs(self, kwargs) -> None:
        with pytest.raises(ValidationError):
            StateSpec(**kwargs)

    @pytest.mark.parametrize("kwargs, expected", [
        ({"family": "pure_bell"}, "pure_bell"),
        ({"family": "random", "state_seed": 3, "rank": 2}, "random(seed=3, rank=2)"),
        ({"family": "product", "file_a": "a.json", "file_b": "b.json"}, "product(a.json, b.json)"),
    ])
    def test_describe(self, kwargs, expected) -> None:
        assert StateSpec(**kwargs).describe() == expected


class TestReportModels:
    """Test cases for MeasureEntry and Report."""

    def test_round_significant(self) -> None:
        assert round_significant(0.12345678901234567) == 0.123456789012
        assert round_significant(None) is None
        assert round_significant(math.inf) == "inf"

    def test_entry_json_uses_twelve_significant_digits(self) -> None:
        entry = MeasureEntry(measure="deficit", value=0.18872187554086717)
        document = json.loads(entry.model_dump_json())
        assert document["value"] == 0.188721875541
        assert document["measure"] == "deficit"
        assert document["wall_time"] is None

    def test_entry_python_dump_keeps_full_precision(self) -> None:
        entry = MeasureEntry(measure="deficit", value=0.18872187554086717)
        assert entry.model_dump()["value"] == 0.18872187554086717

    def test_report(self) -> None:
        report = Report(
            state="pure_bell",
            version="1.0.0",
            measures=[
                MeasureEntry(measure="mutual_info", value=2.0),
                MeasureEntry(measure="discord", value=1.0, converged=False),
            ],
        )
        assert report.value_of("discord") == 1.0
        assert not report.converged
        with pytest.raises(KeyError):
            report.value_of(MeasureName.ERE)

    def test_report_round_trip(self) -> None:
        report = Report(
            state="bell_mixture(p=0.75)", p=0.75, seed=3, version="1.0.0",
            measures=[MeasureEntry(measure="deficit", value=0.188721875541, certificate={"type": "projective"})],
        )
        assert Report.model_validate_json(report.model_dump_json()) == report


class TestGridSpec:
    """Test cases for GridSpec model."""

    def test_defaults(self) -> None:
        grid = GridSpec()
        assert (grid.n_theta, grid.n_phi) == (181, 360)

    def test_minimum_size(self) -> None:
        with pytest.raises(ValidationError):
            GridSpec(n_theta=1)
