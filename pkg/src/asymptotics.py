"""Delta-method intervals for the two-parameter (delta = 1) estimators.

(alpha-hat, mu-hat) = g(mean, variance) of the log sample, and
sqrt(n) [(mean, variance) - truth] -> N(0, Sigma) with
Sigma = [[var, mu3], [mu3, mu4 - var^2]]. The asymptotic variances are
diag(G Sigma G^T) for the Jacobian G of g.
"""

import logging
import math
from typing import Callable

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator
from scipy.stats import norm

from config import settings
from errors import DomainError, IncompatibleMethodError, InsufficientDataError
from models import Family, FitResult, IntervalEstimate, LogMomentSet
from moments import family_log_moments
from specfun import EULER_GAMMA, PI

logger = logging.getLogger(__name__)

GRADIENT_STEP = 1e-6
_PSD_TOLERANCE = 1e-10

Gradient = np.ndarray  # rows: (alpha, mu); columns: d/d mean, d/d variance


class MomentCovariance(BaseModel):
    """Asymptotic covariance of sqrt(n) (sample mean, sample variance)."""

    model_config = ConfigDict(frozen=True)

    var_mean: float
    cov: float
    var_variance: float

    @model_validator(mode="after")
    def _check_psd(self):
        scale = max(1.0, abs(self.var_mean), abs(self.var_variance))
        if self.var_mean < -_PSD_TOLERANCE * scale or self.var_variance < -_PSD_TOLERANCE * scale:
            raise DomainError(f"moment covariance has a negative diagonal: {self.matrix().tolist()}")
        if self.determinant() < -_PSD_TOLERANCE * scale**2:
            raise DomainError(f"moment covariance is not positive semidefinite: {self.matrix().tolist()}")
        return self

    def matrix(self) -> np.ndarray:
        return np.array([[self.var_mean, self.cov], [self.cov, self.var_variance]])

    def determinant(self) -> float:
        return self.var_mean * self.var_variance - self.cov**2


def moment_covariance(m: LogMomentSet) -> MomentCovariance:
    return MomentCovariance(var_mean=m.variance, cov=m.mu3, var_variance=m.mu4 - m.variance**2)


def delta_method_variance(gradient: Gradient, cov: MomentCovariance) -> np.ndarray:
    """diag(G Sigma G^T), one asymptotic variance per row of G."""
    g = np.asarray(gradient, dtype=float)
    if g.ndim != 2 or g.shape[1] != 2:
        raise DomainError(f"gradient must have shape (k, 2), got {g.shape}")
    if not np.all(np.isfinite(g)):
        raise DomainError(f"gradient is not finite: {g.tolist()}")
    sigma = cov.matrix()
    if abs(cov.determinant()) <= _PSD_TOLERANCE * max(1.0, float(np.max(np.abs(sigma)))) ** 2:
        logger.warning("Moment covariance is singular; asymptotic variances may be degenerate")
    variances = np.einsum("ij,jk,ik->i", g, sigma, g)
    return np.maximum(variances, 0.0)


def gml2_map(mean: float, variance: float) -> tuple[float, float]:
    """(alpha-hat, mu-hat) of the two-parameter gML estimator."""
    alpha = math.sqrt(2) * PI / math.sqrt(6 * variance + PI**2)
    return alpha, math.exp(-alpha * (EULER_GAMMA + mean))


def gl2_map(mean: float, variance: float) -> tuple[float, float]:
    """(alpha-hat, mu-hat) of the two-parameter gL estimator; needs 12 variance > pi^2."""
    alpha = 2 * PI / math.sqrt(12 * variance - PI**2)
    return alpha, math.exp(-alpha * (EULER_GAMMA + mean))


def _gradient(alpha: float, mu: float, mean: float, d_alpha: float) -> Gradient:
    return np.array(
        [
            [0.0, d_alpha],
            [-alpha * mu, -(EULER_GAMMA + mean) * mu * d_alpha],
        ]
    )


def gml2_gradient(mean: float, variance: float) -> Gradient:
    alpha, mu = gml2_map(mean, variance)
    d_alpha = -3 * math.sqrt(2) * PI * (6 * variance + PI**2) ** -1.5
    return _gradient(alpha, mu, mean, d_alpha)


def gl2_gradient(mean: float, variance: float) -> Gradient:
    if 12 * variance <= PI**2:
        raise DomainError(f"gL estimator is undefined for log-variance {variance} <= pi^2/12")
    alpha, mu = gl2_map(mean, variance)
    d_alpha = -12 * PI * (12 * variance - PI**2) ** -1.5
    return _gradient(alpha, mu, mean, d_alpha)


def numeric_gradient(
    fn: Callable[[float, float], tuple[float, float]],
    mean: float,
    variance: float,
    rel_step: float = GRADIENT_STEP,
) -> Gradient:
    """Central differences of `fn` with a step relative to each coordinate."""
    point = np.array([mean, variance], dtype=float)
    columns = []
    for j in range(2):
        h = rel_step * max(abs(point[j]), 1.0)
        up, down = point.copy(), point.copy()
        up[j] += h
        down[j] -= h
        columns.append((np.array(fn(*up)) - np.array(fn(*down))) / (2 * h))
    return np.column_stack(columns)


def _moments_for_covariance(fit: FitResult) -> LogMomentSet:
    if fit.in_support:
        return family_log_moments(fit.params())
    if fit.moments is None:
        raise IncompatibleMethodError(
            f"alpha-hat {fit.alpha_hat:.4f} is outside the {fit.family.value} support "
            f"and the fit carries no sample moments"
        )
    logger.warning(
        f"alpha-hat {fit.alpha_hat:.4f} is outside the {fit.family.value} support; "
        f"using sample log-moments for the covariance"
    )
    return fit.moments


def asymptotic_ci(fit: FitResult, level: float | None = None, n: int | None = None) -> tuple[IntervalEstimate, IntervalEstimate]:
    """Normal-theory intervals for alpha and mu from a two-parameter fit."""
    if fit.nparams != 2:
        raise IncompatibleMethodError(
            "asymptotic intervals are only available for two-parameter fits (delta = 1)"
        )
    level = settings.confidence_level if level is None else level
    if not 0 < level < 1:
        raise DomainError(f"confidence level must lie in (0, 1), got {level}")
    n = fit.n if n is None else n
    if n < 1:
        raise InsufficientDataError(f"sample size must be positive, got {n}")

    m = _moments_for_covariance(fit)
    gradient_of = gml2_gradient if fit.family is Family.GML else gl2_gradient
    variances = delta_method_variance(gradient_of(m.mean, m.variance), moment_covariance(m))
    z = float(norm.ppf((1 + level) / 2))

    intervals = []
    for name, point, variance in zip(("alpha", "mu"), (fit.alpha_hat, fit.mu_hat), variances):
        half_width = z * math.sqrt(variance / n)
        intervals.append(
            IntervalEstimate(
                parameter=name,
                point=point,
                lower=point - half_width,
                upper=point + half_width,
                level=level,
                method="asymptotic",
            )
        )
    return intervals[0], intervals[1]
