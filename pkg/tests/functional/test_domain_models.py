import math
from pathlib import Path

import pydantic
import pytest

from nematiclab.common.exceptions import ConfigurationError, ExponentRangeError
from nematiclab.config.settings.run import load_run_configuration, parse_run_configuration, resolved_configuration
from nematiclab.config.settings.services import LabConfiguration
from nematiclab.config.setup import LAB_SERVICES_CONTAINER, ServiceName
from nematiclab.domain.indices import BesovIndex, WeightedExponentTable
from nematiclab.domain.reports import IterationReport, LedgerKind, NormLedger
from nematiclab.solver.weak_form import TestFunction, WeakEquation
from tests.conftest import ASSETS_DIR


def test_besov_index_parsing() -> None:
    index = BesovIndex.parse("0.5,2,inf")
    assert index.r == math.inf
    assert str(index) == "(0.5,2,inf)"
    with pytest.raises(ValueError):
        BesovIndex.parse("1,1,2")
    with pytest.raises(ValueError):
        BesovIndex.parse("1,2")


def test_critical_index_of_the_velocity() -> None:
    index = BesovIndex.critical(2, 1.2, 1.5)
    assert index.s == pytest.approx(2.0 / 1.2 - 1.0)
    assert BesovIndex.critical(3, 3.0, 2.0).s == pytest.approx(0.0)


def test_weighted_exponents_from_indices() -> None:
    table = WeightedExponentTable.from_indices(2, 2.5, 1.6, 8.0)
    assert table.p2 == pytest.approx(2.0)
    assert table.alpha1 == pytest.approx(0.675)
    assert table.alpha2 == pytest.approx(0.475)
    assert table.beta1 == pytest.approx(0.3)
    assert table.gamma2 == pytest.approx(0.375)
    table.check_existence_range(1.2)


def test_weighted_exponents_outside_their_range() -> None:
    with pytest.raises(ExponentRangeError):
        WeightedExponentTable.from_indices(2, 2.5, 4.0, 3.0)
    with pytest.raises(ExponentRangeError):
        WeightedExponentTable.from_indices(2, 2.5, 1.6, 3.0).check_existence_range(1.2)
    with pytest.raises(ExponentRangeError):
        WeightedExponentTable.from_indices(2, 2.5, 1.6, 8.0).check_existence_range(1.7)


def test_shifted_exponents_lose_half_the_extra_regularity() -> None:
    plain = WeightedExponentTable.from_indices(3, 2.5, 2.4, 12.0)
    shifted = WeightedExponentTable.from_indices(3, 2.5, 2.4, 12.0, epsilon=0.2)
    assert shifted.alpha1 == pytest.approx(plain.alpha1 - 0.1)
    assert shifted.beta3 == pytest.approx(plain.beta3)


def test_ledger_sums_its_components() -> None:
    ledger = NormLedger(kind=LedgerKind.UNWEIGHTED, components={"u": 1.0, "d": 0.5})
    assert ledger.total == pytest.approx(1.5)
    with pytest.raises(pydantic.ValidationError):
        NormLedger(kind=LedgerKind.WEIGHTED, components={"u": -1.0})
    with pytest.raises(pydantic.ValidationError):
        NormLedger(kind=LedgerKind.WEIGHTED, components={"u": math.nan})


def test_models_are_frozen() -> None:
    report = IterationReport(n=1, delta_U=0.1)
    with pytest.raises(pydantic.ValidationError):
        report.n = 2  # type: ignore[misc]
    with pytest.raises(pydantic.ValidationError):
        IterationReport(n=0, delta_U=0.1)


def test_test_function_windows() -> None:
    with pytest.raises(pydantic.ValidationError):
        TestFunction(equation=WeakEquation.MOMENTUM, mode=(1, 0), window=(0.5, 0.2))


def test_run_file_with_aliases() -> None:
    configuration = parse_run_configuration(
        """
        [grid]
        M = 16

        [constants]
        lambda = 2.0

        [scheme]
        T = 0.5
        dt = 0.01
        """
    )
    assert configuration.grid.build().points_per_axis == 16
    assert configuration.constants.lambda_ == 2.0
    assert configuration.scheme.steps == 50
    assert configuration.data.scenario == "zero"
    assert resolved_configuration(configuration)["scheme"]["dt"] == pytest.approx(0.01)


@pytest.mark.parametrize(
    ("text", "key"),
    [
        ("[grid]\ndim = 4\n", "grid.dim"),
        ("[scheme]\nunknown = 1\n", "scheme.unknown"),
        ("[scheme]\nsmallness = 'ignore'\n", "scheme.smallness"),
        ("[constants]\nnu = -1.0\n", "constants.nu"),
    ],
)
def test_invalid_run_files_name_the_key(text: str, key: str) -> None:
    with pytest.raises(ConfigurationError, match=f"invalid key {key}"):
        parse_run_configuration(text)


def test_unreadable_run_files() -> None:
    with pytest.raises(ConfigurationError):
        parse_run_configuration("[grid\n")
    with pytest.raises(ConfigurationError):
        load_run_configuration(Path("/nonexistent/run.toml"))


def test_shipped_run_file_is_valid() -> None:
    configuration = load_run_configuration(ASSETS_DIR / "taylor_green.toml")
    assert configuration.data.scenario == "taylor_green"


def test_data_section_takes_a_single_source() -> None:
    with pytest.raises(ConfigurationError, match="data"):
        parse_run_configuration("[data]\nscenario = 'taylor_green'\n[data.snapshots]\na = 'a'\nu = 'u'\nd = 'd'\n")


def test_environment_reconfigures_the_services(lab_environment) -> None:  # noqa: ANN001
    with lab_environment({"EL_THREADS": "3", "EL_RESOLUTION_DRIFT": "0.5"}):
        with LabConfiguration.use() as config:
            assert config.threads == 3
            assert config.resolution_drift == 0.5
        assert getattr(LAB_SERVICES_CONTAINER, ServiceName.SPECTRAL_BACKEND)().workers == 3
    with LabConfiguration.use() as config:
        assert config.threads == 1
