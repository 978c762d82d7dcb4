"""Method-of-log-moments estimators for gML and gL.

Two-parameter fits (delta = 1) are closed form. Three-parameter fits match
the variance and third central moment of the log sample, both free of mu,
with a bounded simplex search over (alpha, delta); mu is then recovered from
the sample mean.
"""

import logging
import math
from typing import Callable, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import optimize
from scipy.stats import qmc

from errors import DegenerateMomentsError, InsufficientDataError, NonPositiveDataError
from models import Family, FitResult, LogMomentSet
from moments import gl_log_variance, gml_log_variance, log_mu3
from specfun import EULER_GAMMA, PI, polygamma

logger = logging.getLogger(__name__)

MIN_CLOSED_FORM_SAMPLE = 4
MIN_OPTIMIZED_SAMPLE = 10

ALPHA_FLOOR = 0.01
DELTA_BOUNDS = (0.01, 50.0)
GML_START = (0.1, 1.0)
GL_START = (1.0, 1.0)

SIMPLEX_XATOL = 1e-8
MAX_EVALUATIONS = 10_000
BOUNDARY_TOLERANCE = 1e-6


class MinimizeResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    x: tuple[float, float]
    value: float
    converged: bool
    evaluations: int
    on_boundary: bool


class LogSample(BaseModel):
    model_config = ConfigDict(frozen=True)

    moments: LogMomentSet
    n: int
    dropped: int


def log_moments(logs: np.ndarray) -> LogMomentSet:
    """Mean and central moments of orders 2-4, divisor n."""
    mean = float(np.mean(logs))
    centred = logs - mean
    sq = centred * centred
    return LogMomentSet(
        mean=mean,
        variance=float(np.mean(sq)),
        mu3=float(np.mean(sq * centred)),
        mu4=float(np.mean(sq * sq)),
    )


def sample_log_moments(data: Sequence[float], take_abs: bool = False) -> LogMomentSet:
    """Log-moments of a sample: ln x, or ln|x| with zeros excluded when `take_abs`."""
    values = np.asarray(data, dtype=float).ravel()
    if take_abs:
        values = np.abs(values[values != 0])
    elif np.any(values <= 0):
        bad = int(np.count_nonzero(values <= 0))
        raise NonPositiveDataError(f"{bad} non-positive values cannot be log-transformed")
    if values.size < MIN_CLOSED_FORM_SAMPLE:
        raise InsufficientDataError(
            f"need at least {MIN_CLOSED_FORM_SAMPLE} usable values, got {values.size}"
        )
    logs = np.log(values)
    if not np.all(np.isfinite(logs)):
        raise NonPositiveDataError("log-transformed sample contains non-finite values")
    return log_moments(logs)


def log_sample(data: Sequence[float], family: Family, minimum: int) -> LogSample:
    """Filter to the family's log-able support and summarise.

    gML keeps strictly positive values; gL keeps non-zero values and uses
    ln|y|. Non-finite entries are dropped as well; the count is reported.
    """
    values = np.asarray(data, dtype=float).ravel()
    keep = np.isfinite(values) & ((values > 0) if family is Family.GML else (values != 0))
    dropped = int(values.size - np.count_nonzero(keep))
    if dropped:
        logger.info(f"Dropped {dropped} values outside the {family.value} log support")
    kept = np.abs(values[keep])
    if kept.size < minimum:
        raise InsufficientDataError(f"need at least {minimum} usable values, got {kept.size}")
    return LogSample(moments=log_moments(np.log(kept)), n=int(kept.size), dropped=dropped)


def _initial_simplex(x0: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    simplex = [x0.copy()]
    for i in range(x0.size):
        step = 0.05 * x0[i] if x0[i] != 0 else 0.00025
        vertex = x0.copy()
        vertex[i] = x0[i] + step if x0[i] + step <= upper[i] else x0[i] - step
        vertex[i] = min(max(vertex[i], lower[i]), upper[i])
        simplex.append(vertex)
    return np.array(simplex)


def minimize_2d(
    objective: Callable[[float, float], float],
    start: tuple[float, float],
    bounds: tuple[tuple[float, float], tuple[float, float]],
    xatol: float = SIMPLEX_XATOL,
    max_evaluations: int = MAX_EVALUATIONS,
) -> MinimizeResult:
    """Bounded Nelder-Mead over a box; trial points are projected onto the box.

    The search is restarted from its own optimum until a restart no longer
    improves the value, which guards against a prematurely collapsed simplex.
    """
    lower = np.array([b[0] for b in bounds], dtype=float)
    upper = np.array([b[1] for b in bounds], dtype=float)

    def wrapped(x: np.ndarray) -> float:
        value = objective(float(x[0]), float(x[1]))
        return value if math.isfinite(value) else math.inf

    x = np.clip(np.asarray(start, dtype=float), lower, upper)
    value = wrapped(x)
    evaluations = 1
    converged = False
    for _ in range(4):
        remaining = max_evaluations - evaluations
        if remaining <= 0:
            converged = False
            break
        result = optimize.minimize(
            wrapped,
            x,
            method="Nelder-Mead",
            bounds=list(zip(lower, upper)),
            options={
                "initial_simplex": _initial_simplex(x, lower, upper),
                "xatol": xatol,
                "fatol": 1e-15,
                "maxfev": remaining,
            },
        )
        evaluations += int(result.nfev)
        converged = bool(result.success)
        improved = result.fun < value - 1e-15 * max(1.0, abs(value))
        if result.fun <= value:
            x, value = np.asarray(result.x, dtype=float), float(result.fun)
        if not converged or not improved:
            break

    span = upper - lower
    on_boundary = bool(
        np.any(x - lower <= BOUNDARY_TOLERANCE * span) or np.any(upper - x <= BOUNDARY_TOLERANCE * span)
    )
    return MinimizeResult(
        x=(float(x[0]), float(x[1])),
        value=float(value),
        converged=converged,
        evaluations=evaluations,
        on_boundary=on_boundary,
    )


def _mu_from_mean(mean: float, alpha: float, delta: float) -> float:
    """mu-hat = exp(-[alpha (mean - C (1/alpha - 1)) - psi(delta)])."""
    return math.exp(-(alpha * (mean - EULER_GAMMA * (1 / alpha - 1)) - polygamma(0, delta)))


def _check_support(family: Family, alpha: float) -> bool:
    if alpha > family.alpha_upper:
        logger.warning(
            f"alpha-hat {alpha:.4f} exceeds the {family.value} support (0, {family.alpha_upper:g}]; "
            f"the model does not fit these data"
        )
        return False
    return True


def fit_gml2_from_moments(m: LogMomentSet, n: int = 0, dropped: int = 0) -> FitResult:
    alpha = math.sqrt(2) * PI / math.sqrt(6 * m.variance + PI**2)
    mu = math.exp(-alpha * (EULER_GAMMA + m.mean))
    return FitResult(
        family=Family.GML,
        nparams=2,
        alpha_hat=alpha,
        delta_hat=1.0,
        mu_hat=mu,
        objective=0.0,
        converged=True,
        n=n,
        dropped=dropped,
        in_support=_check_support(Family.GML, alpha),
        moments=m,
    )


def fit_gl2_from_moments(m: LogMomentSet, n: int = 0, dropped: int = 0) -> FitResult:
    excess = 12 * m.variance - PI**2
    if excess <= 0:
        raise DegenerateMomentsError(
            f"log-variance {m.variance:.6g} is at or below pi^2/12; no gL alpha matches it"
        )
    alpha = 2 * PI / math.sqrt(excess)
    mu = math.exp(-alpha * (EULER_GAMMA + m.mean))
    return FitResult(
        family=Family.GL,
        nparams=2,
        alpha_hat=alpha,
        delta_hat=1.0,
        mu_hat=mu,
        objective=0.0,
        converged=True,
        n=n,
        dropped=dropped,
        in_support=_check_support(Family.GL, alpha),
        moments=m,
    )


def _halton_starts(count: int, bounds) -> list[tuple[float, float]]:
    if count <= 0:
        return []
    points = qmc.Halton(d=2, scramble=False).random(count + 1)[1:]
    scaled = qmc.scale(points, [b[0] for b in bounds], [b[1] for b in bounds])
    return [(float(a), float(d)) for a, d in scaled]


def _fit3_from_moments(
    family: Family,
    m: LogMomentSet,
    n: int,
    dropped: int,
    multistart: int,
) -> FitResult:
    variance_of = gml_log_variance if family is Family.GML else gl_log_variance
    start = GML_START if family is Family.GML else GL_START
    bounds = ((ALPHA_FLOOR, family.alpha_upper), DELTA_BOUNDS)

    def objective(alpha: float, delta: float) -> float:
        return (variance_of(alpha, delta) - m.variance) ** 2 + (log_mu3(alpha, delta) - m.mu3) ** 2

    best = minimize_2d(objective, start, bounds)
    for extra in _halton_starts(multistart, bounds):
        candidate = minimize_2d(objective, extra, bounds)
        if candidate.value < best.value:
            best = candidate

    alpha, delta = best.x
    if not best.converged:
        logger.warning(f"{family.value} fit did not converge; best objective {best.value:.3g}")
    if best.on_boundary:
        logger.warning(f"{family.value} fit pinned to the search box at alpha={alpha:.4f}, delta={delta:.4f}")
    return FitResult(
        family=family,
        nparams=3,
        alpha_hat=alpha,
        delta_hat=delta,
        mu_hat=_mu_from_mean(m.mean, alpha, delta),
        objective=best.value,
        converged=best.converged,
        n=n,
        dropped=dropped,
        on_boundary=best.on_boundary,
        moments=m,
    )


def fit_gml3_from_moments(m: LogMomentSet, n: int = 0, dropped: int = 0, multistart: int = 0) -> FitResult:
    return _fit3_from_moments(Family.GML, m, n, dropped, multistart)


def fit_gl3_from_moments(m: LogMomentSet, n: int = 0, dropped: int = 0, multistart: int = 0) -> FitResult:
    return _fit3_from_moments(Family.GL, m, n, dropped, multistart)


def fit_gml2(data: Sequence[float]) -> FitResult:
    sample = log_sample(data, Family.GML, MIN_CLOSED_FORM_SAMPLE)
    return fit_gml2_from_moments(sample.moments, sample.n, sample.dropped)


def fit_gl2(data: Sequence[float]) -> FitResult:
    sample = log_sample(data, Family.GL, MIN_CLOSED_FORM_SAMPLE)
    return fit_gl2_from_moments(sample.moments, sample.n, sample.dropped)


def fit_gml3(data: Sequence[float], multistart: int = 0) -> FitResult:
    sample = log_sample(data, Family.GML, MIN_OPTIMIZED_SAMPLE)
    return fit_gml3_from_moments(sample.moments, sample.n, sample.dropped, multistart)


def fit_gl3(data: Sequence[float], multistart: int = 0) -> FitResult:
    sample = log_sample(data, Family.GL, MIN_OPTIMIZED_SAMPLE)
    return fit_gl3_from_moments(sample.moments, sample.n, sample.dropped, multistart)


def fit(family: Family | str, nparams: int, data: Sequence[float], multistart: int = 0) -> FitResult:
    """Dispatch to one of the four fitters."""
    family = Family(family)
    if nparams == 2:
        return fit_gml2(data) if family is Family.GML else fit_gl2(data)
    if nparams == 3:
        return fit_gml3(data, multistart) if family is Family.GML else fit_gl3(data, multistart)
    raise ValueError(f"nparams must be 2 or 3, got {nparams}")


def fit_from_moments(family: Family | str, nparams: int, m: LogMomentSet, n: int = 0) -> FitResult:
    family = Family(family)
    if nparams == 2:
        return fit_gml2_from_moments(m, n) if family is Family.GML else fit_gl2_from_moments(m, n)
    if nparams == 3:
        return fit_gml3_from_moments(m, n) if family is Family.GML else fit_gl3_from_moments(m, n)
    raise ValueError(f"nparams must be 2 or 3, got {nparams}")
