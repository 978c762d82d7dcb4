"""Data models shared across modules.

Parameter triples validate their supports on construction, so any
`GmlParams` / `GlParams` that exists is a valid member of its family.
"""

from enum import Enum
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator


class Family(str, Enum):
    GML = "gml"
    GL = "gl"

    @property
    def alpha_upper(self) -> float:
        return 1.0 if self is Family.GML else 2.0


class GmlParams(BaseModel):
    """gML(alpha, delta, mu): Laplace transform (mu / (mu + t**alpha)) ** delta."""

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(gt=0, le=1)
    delta: float = Field(gt=0)
    mu: float = Field(gt=0)

    family: Literal[Family.GML] = Family.GML


class GlParams(BaseModel):
    """gL(alpha, delta, mu): characteristic function (mu / (mu + |t|**alpha)) ** delta."""

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(gt=0, le=2)
    delta: float = Field(gt=0)
    mu: float = Field(gt=0)

    family: Literal[Family.GL] = Family.GL


def make_params(family: Family, alpha: float, delta: float, mu: float) -> GmlParams | GlParams:
    if Family(family) is Family.GML:
        return GmlParams(alpha=alpha, delta=delta, mu=mu)
    return GlParams(alpha=alpha, delta=delta, mu=mu)


class LogMomentSet(BaseModel):
    """Mean and central moments (orders 2-4) of ln X or ln|Y|."""

    model_config = ConfigDict(frozen=True)

    mean: float
    variance: float
    mu3: float
    mu4: float

    @model_validator(mode="after")
    def _check_moments(self):
        scale = max(1.0, self.variance**2)
        if self.variance < -1e-12 * max(1.0, abs(self.variance)):
            raise ValueError(f"variance must be non-negative, got {self.variance}")
        if self.mu4 < self.variance**2 - 1e-9 * scale:
            raise ValueError(
                f"fourth central moment {self.mu4} is below variance squared {self.variance**2}"
            )
        return self


class FitResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    family: Family
    nparams: Literal[2, 3]
    alpha_hat: float = Field(gt=0)
    delta_hat: float = Field(gt=0)
    mu_hat: float = Field(gt=0)
    objective: float = Field(ge=0)
    converged: bool
    n: int = Field(ge=0)
    dropped: int = Field(default=0, ge=0)
    on_boundary: bool = False
    in_support: bool = True
    moments: LogMomentSet | None = None

    def estimates(self) -> dict[str, float]:
        return {"alpha": self.alpha_hat, "delta": self.delta_hat, "mu": self.mu_hat}

    def free_parameters(self) -> tuple[str, ...]:
        return ("alpha", "mu") if self.nparams == 2 else ("alpha", "delta", "mu")

    def params(self) -> GmlParams | GlParams:
        """The fitted law; raises if alpha_hat is outside the family support."""
        return make_params(self.family, self.alpha_hat, self.delta_hat, self.mu_hat)


class IntervalEstimate(BaseModel):
    model_config = ConfigDict(frozen=True)

    parameter: str
    point: float
    lower: float
    upper: float
    level: float = Field(gt=0, lt=1)
    method: Literal["asymptotic", "bootstrap"]
    degenerate: bool = False
    note: str | None = None

    @model_validator(mode="after")
    def _check_order(self):
        if self.lower > self.upper:
            raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper}")
        return self

    @property
    def contains_point(self) -> bool:
        return self.lower <= self.point <= self.upper

    @property
    def width(self) -> float:
        return self.upper - self.lower
