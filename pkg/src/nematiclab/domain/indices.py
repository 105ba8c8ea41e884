import math
import typing

from pydantic import Field, field_validator, model_validator

from nematiclab.common.exceptions import ExponentRangeError
from nematiclab.domain.base import FrozenModel


def reciprocal(value: float) -> float:
    """1/value with 1/∞ = 0."""
    return 0.0 if math.isinf(value) else 1.0 / value


def from_reciprocal(value: float) -> float:
    """Inverse of :func:`reciprocal`, mapping 0 to ∞."""
    return math.inf if value == 0.0 else 1.0 / value


class BesovIndex(FrozenModel):
    """
    The triple (s, p, r) selecting a homogeneous Besov norm.

    :ivar s: Regularity.
    :ivar p: Spatial Lebesgue exponent in (1, ∞].
    :ivar r: Summation exponent over dyadic blocks in [1, ∞].
    """

    s: float
    p: float = Field(gt=1.0)
    r: float = Field(ge=1.0)

    @field_validator("s", mode="after")
    @classmethod
    def require_finite_regularity(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError(f"Regularity must be finite, got {value}")
        return value

    @classmethod
    def parse(cls, text: str) -> "BesovIndex":
        """Read ``"s,p,r"`` where ``inf`` is accepted for p and r."""
        s, p, r = (float(part) for part in text.split(","))
        return cls(s=s, p=p, r=r)

    @classmethod
    def critical(cls, dim: int, p: float, r: float) -> "BesovIndex":
        """Scaling-critical index (N/p − 1, p, r) of the initial velocity."""
        return cls(s=dim * reciprocal(p) - 1.0, p=p, r=r)

    def __str__(self) -> str:
        return f"({self.s:g},{self.p:g},{self.r:g})"


class WeightedExponentTable(FrozenModel):
    """
    Time-weight exponents of the weighted solution space, built for Lebesgue indices p1, p2, p3
    tied by 1/p1 = 1/p2 + 1/p3. A positive ``epsilon`` gives the shifted family used for uniqueness.
    """

    dim: int = Field(ge=2, le=3)
    r: float = Field(gt=1.0)
    p1: float = Field(gt=1.0)
    p2: float = Field(gt=1.0)
    p3: float = Field(gt=1.0)
    epsilon: float = Field(default=0.0, ge=0.0, lt=1.0)
    alpha1: float
    alpha2: float
    beta1: float
    beta2: float
    beta3: float
    beta4: float
    gamma1: float
    gamma2: float
    gamma3: float
    gamma4: float

    @model_validator(mode="after")
    def require_holder_triple(self) -> typing.Self:
        if not math.isclose(reciprocal(self.p1), reciprocal(self.p2) + reciprocal(self.p3), rel_tol=1e-12):
            raise ExponentRangeError(f"1/p1 = 1/p2 + 1/p3 fails for {self.p1}, {self.p2}, {self.p3}")
        return self

    @classmethod
    def from_indices(cls, dim: int, r: float, p1: float, p3: float, epsilon: float = 0.0) -> "WeightedExponentTable":
        """
        Compute every weight exponent from the free indices.

        :param dim: Spatial dimension N.
        :param r: Time integrability index.
        :param p1: Lebesgue index of the second derivatives.
        :param p3: Lebesgue index of (u, ∇d); ``math.inf`` allowed.
        :param epsilon: Extra regularity of the data, zero for the existence table.
        :return: The complete table, p2 solved from 1/p1 = 1/p2 + 1/p3.
        """
        inverse_p2 = reciprocal(p1) - reciprocal(p3)
        if inverse_p2 <= 0.0:
            raise ExponentRangeError(f"p3 = {p3} must exceed p1 = {p1}")
        p2 = from_reciprocal(inverse_p2)
        half_time = 1.0 / (2.0 * r)
        alpha = 0.5 * (3.0 - dim / p1 - epsilon)
        beta = 0.5 * (2.0 - dim * inverse_p2 - epsilon)
        beta_half = 0.5 * (2.0 - 2.0 * dim * reciprocal(p3))
        gamma = 0.5 * (1.0 - dim * reciprocal(p3) - epsilon)
        gamma_triple = 0.5 * (1.0 - dim / (3.0 * p1) - epsilon)
        return cls(
            dim=dim,
            r=r,
            p1=p1,
            p2=p2,
            p3=p3,
            epsilon=epsilon,
            alpha1=alpha - half_time,
            alpha2=alpha - 2.0 * half_time,
            beta1=beta - half_time,
            beta2=beta,
            beta3=beta_half - half_time,
            beta4=beta_half,
            gamma1=gamma - half_time,
            gamma2=gamma,
            gamma3=gamma_triple - half_time,
            gamma4=gamma_triple,
        )

    def check_existence_range(self, p: float) -> None:
        """
        Raise :class:`ExponentRangeError` unless max{p, Nr/(2r−1)} < p1 < N and Nr/(r−1) < p3.
        """
        lower_p1 = max(p, self.dim * self.r / (2.0 * self.r - 1.0))
        if not lower_p1 < self.p1 < self.dim:
            raise ExponentRangeError(f"p1 = {self.p1} must lie in ({lower_p1}, {self.dim})")
        lower_p3 = self.dim * self.r / (self.r - 1.0)
        if not self.p3 > lower_p3:
            raise ExponentRangeError(f"p3 = {self.p3} must exceed {lower_p3}")
