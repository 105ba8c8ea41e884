import math
import typing
from enum import StrEnum

from pydantic import Field, field_validator, model_validator

from nematiclab.domain.base import FrozenModel


class LedgerKind(StrEnum):
    UNWEIGHTED = "x"
    WEIGHTED = "y"


class NormLedger(FrozenModel):
    """
    Itemized solution-space norm of a trajectory.

    :ivar kind: Unweighted ledger for 1 < r < 2 or the time-weighted one.
    :ivar components: Component label mapped to its value.
    :ivar total: Sum of the components.
    """

    kind: LedgerKind
    components: dict[str, float]
    total: float = 0.0

    @model_validator(mode="before")
    @classmethod
    def sum_components(cls, data: typing.Any) -> typing.Any:
        if isinstance(data, dict) and "total" not in data:
            data = {**data, "total": math.fsum(data.get("components", {}).values())}
        return data

    @field_validator("components", mode="after")
    @classmethod
    def require_finite_components(cls, value: dict[str, float]) -> dict[str, float]:
        for label, component in value.items():
            if not math.isfinite(component) or component < 0.0:
                raise ValueError(f"Ledger component {label} is {component}")
        return value


class IterationReport(FrozenModel):
    """
    Outcome of one outer iteration.

    :ivar n: Iteration index, starting at 1.
    :ivar delta_U: Norm of the increment against the previous iterate.
    :ivar components: Breakdown of ``delta_U``.
    :ivar converged: Whether ``delta_U`` met the outer tolerance.
    :ivar monitors: Bound monitors recorded along the iteration (density and director maxima, growth ratios).
    """

    n: int = Field(ge=1)
    delta_U: float = Field(ge=0.0)
    components: dict[str, float] = Field(default_factory=dict)
    converged: bool = False
    monitors: dict[str, float] = Field(default_factory=dict)


class DiagnosticsRow(FrozenModel):
    time: float
    energy: float = Field(ge=0.0)
    dissipation: float = Field(ge=0.0)
    div_norm: float = Field(ge=0.0)
    sphere_drift: float = Field(ge=0.0)
    a_max: float = Field(ge=0.0)
    energy_rate: float = 0.0
    law_residual: float = Field(default=0.0, ge=0.0)


class RefinementLevel(FrozenModel):
    """
    Error measures of one run of a time-step refinement study.

    :ivar step: Time step Δt.
    :ivar energy_law: Largest energy-law residual over the dissipation scale.
    :ivar weak_form: Largest weak-form residual.
    :ivar weak_form_residuals: Every weak-form residual, in the order of the test functions.
    :ivar sphere_drift: Largest | |d| − 1 |.
    """

    step: float = Field(gt=0.0)
    energy_law: float = Field(ge=0.0)
    weak_form: float = Field(ge=0.0)
    weak_form_residuals: tuple[float, ...] = ()
    sphere_drift: float = Field(ge=0.0)


class InverseSource(StrEnum):
    SERIES = "series"
    DIRECT = "direct"


class NeumannCertificate(FrozenModel):
    """
    How the inverse Jacobian was obtained at one time level.

    :ivar terms: Highest power kept in the series, zero for the direct path.
    :ivar radius: Largest matrix ∞-norm of the integrated velocity gradient over the grid.
    :ivar tail_bound: ρ^{k+1}/(1 − ρ), infinite for the direct path.
    :ivar source: Series or direct inversion.
    """

    terms: int = Field(ge=0)
    radius: float = Field(ge=0.0)
    tail_bound: float = Field(ge=0.0)
    source: InverseSource


class SuiteResult(FrozenModel):
    name: str
    passed: bool
    value: float
    threshold: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        suffix = f" ({self.detail})" if self.detail else ""
        return f"{status} {self.name}: value={self.value:.6e} threshold={self.threshold:.6e}{suffix}"


class Verdict(FrozenModel):
    suites: tuple[SuiteResult, ...] = ()

    @property
    def passed(self) -> bool:
        return all(suite.passed for suite in self.suites)

    def merged(self, other: "Verdict") -> "Verdict":
        return Verdict(suites=self.suites + other.suites)

    def render(self) -> str:
        lines = [suite.line() for suite in self.suites]
        lines.append(f"OVERALL {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"
