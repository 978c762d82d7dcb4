"""Special functions behind the moment formulas and the gML density.

Scalar, pure functions; safe to call from any thread.
"""

import logging
import math
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import special

from config import settings
from errors import DomainError, SeriesConvergenceError
from models import GmlParams

logger = logging.getLogger(__name__)

EULER_GAMMA = 0.5772156649015329
ZETA3 = 1.2020569031595943
ZETA5 = 1.0369277551433699
PI = math.pi

_EPS = np.finfo(float).eps
_LOG_FLOAT_MAX = math.log(np.finfo(float).max)

# w^(1/beta) past which the power series is abandoned for the large-w expansion
ASYMPTOTIC_SWITCH = 30.0


def log_gamma(x: float) -> float:
    if not x > 0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    return float(special.gammaln(x))


def polygamma(k: int, x: float) -> float:
    """psi^(k)(x); k = 0 is the digamma function."""
    if int(k) != k or not 0 <= k <= 4:
        raise DomainError(f"polygamma order must be an integer in 0..4, got {k}")
    if not x > 0:
        raise DomainError(f"polygamma requires x > 0, got {x}")
    if k == 0:
        return float(special.digamma(x))
    return float(special.polygamma(int(k), x))


class SeriesSum(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: float
    terms: int
    tail_bound: float
    # largest |term| over |value|; large ratios mean cancellation
    cancellation: float
    # tail bound plus accumulated rounding
    error: float
    precise: bool
    method: Literal["power", "asymptotic", "hypergeometric"] = "power"


def _is_precise(error: float, value: float, tolerance: float) -> bool:
    return error <= max(tolerance, 1e-8 * abs(value))


def _power_sum(beta: float, gamma: float, eta: float, z: float, tolerance: float, max_terms: int) -> SeriesSum:
    log_abs_z = math.log(abs(z))
    alternating = z < 0
    terms: list[float] = []
    log_pochhammer = 0.0
    max_log_mag = -math.inf
    previous_log_ratio = math.inf
    bound = math.inf

    for r in range(max_terms):
        log_mag = (
            log_pochhammer
            - special.gammaln(r + 1)
            - special.gammaln(beta * r + gamma)
            + r * log_abs_z
        )
        if log_mag > _LOG_FLOAT_MAX:
            raise SeriesConvergenceError(
                f"Prabhakar series E^{eta}_{{{beta},{gamma}}}({z}) has terms beyond the floating-point range",
                partial_sum=math.fsum(terms),
                bound=math.inf,
            )
        sign = -1.0 if alternating and r % 2 else 1.0
        terms.append(sign * math.exp(log_mag))
        max_log_mag = max(max_log_mag, log_mag)

        log_ratio = (
            math.log(eta + r)
            - math.log(r + 1)
            + special.gammaln(beta * r + gamma)
            - special.gammaln(beta * (r + 1) + gamma)
            + log_abs_z
        )
        log_pochhammer += math.log(eta + r)

        if log_ratio < 0 and log_ratio <= previous_log_ratio:
            next_mag = math.exp(log_mag + log_ratio)
            ratio = math.exp(log_ratio)
            bound = next_mag if alternating else next_mag / (1.0 - ratio)
            if bound < tolerance:
                break
        previous_log_ratio = log_ratio
    else:
        raise SeriesConvergenceError(
            f"Prabhakar series E^{eta}_{{{beta},{gamma}}}({z}) did not reach "
            f"tolerance {tolerance} within {max_terms} terms",
            partial_sum=math.fsum(terms),
            bound=bound,
        )

    value = math.fsum(terms)
    max_term = math.exp(max_log_mag)
    error = bound + max_term * _EPS * math.sqrt(len(terms))
    return SeriesSum(
        value=value,
        terms=len(terms),
        tail_bound=bound,
        cancellation=max_term / abs(value) if value != 0 else math.inf,
        error=error,
        precise=_is_precise(error, value, tolerance),
        method="power",
    )


def _asymptotic_sum(beta: float, gamma: float, eta: float, w: float, tolerance: float, max_terms: int) -> SeriesSum:
    """Algebraic expansion of E^eta_{beta,gamma}(-w) for large w, 0 < beta < 2.

    E ~ sum_k (-1)^k (eta)_k / k! w^(-eta-k) / Gamma(gamma - beta (eta + k))

    The series diverges; it is cut before the first term whose envelope grows.
    1/Gamma(-y) is formed as -Gamma(1 + y) sin(pi y) / pi, which vanishes
    at the poles.
    """
    log_w = math.log(w)
    # (eta)_k / k! can grow for the first few k while the expansion is still useful
    first_cut = math.ceil(eta) + 2
    terms: list[float] = []
    running = 0.0
    log_pochhammer = 0.0
    previous_log_env = math.inf
    max_log_env = -math.inf
    bound = math.inf

    for k in range(max_terms):
        arg = gamma - beta * (eta + k)
        log_common = log_pochhammer - special.gammaln(k + 1) - (eta + k) * log_w
        log_env = log_common + special.gammaln(1.0 + max(-arg, 0.0))
        if (k >= first_cut and log_env > previous_log_env) or log_env > _LOG_FLOAT_MAX:
            cut = min(log_env, previous_log_env)
            bound = math.exp(cut) if cut <= _LOG_FLOAT_MAX else math.inf
            break
        if arg > 0:
            term = math.exp(log_common - special.gammaln(arg))
        else:
            y = -arg
            term = -math.exp(log_common + special.gammaln(1.0 + y)) * math.sin(PI * y) / PI
        if k % 2:
            term = -term
        terms.append(term)
        running += term
        max_log_env = max(max_log_env, log_env)
        previous_log_env = log_env
        log_pochhammer += math.log(eta + k)
        if running != 0 and math.exp(log_env) <= tolerance * abs(running):
            bound = math.exp(log_env)
            break

    value = math.fsum(terms)
    max_term = math.exp(max_log_env) if terms else 0.0
    error = bound + max_term * _EPS * math.sqrt(max(len(terms), 1))
    return SeriesSum(
        value=value,
        terms=len(terms),
        tail_bound=bound,
        cancellation=max_term / abs(value) if value != 0 else math.inf,
        error=error,
        precise=_is_precise(error, value, tolerance),
        method="asymptotic",
    )


def prabhakar_series(
    beta: float,
    gamma: float,
    eta: float,
    z: float,
    tolerance: float | None = None,
    max_terms: int | None = None,
) -> SeriesSum:
    """E^eta_{beta,gamma}(z) = sum_r (eta)_r z^r / (r! Gamma(beta r + gamma)).

    The power series is summed from the logarithms of its terms and stops
    once the tail bound drops below `tolerance`. On the negative axis with
    beta < 2 the alternating sum cancels catastrophically for large |z|;
    there the algebraic large-|z| expansion is used instead, or whichever of
    the two carries the smaller error estimate.
    """
    if not (beta > 0 and gamma > 0 and eta > 0):
        raise DomainError(
            f"Prabhakar function needs beta, gamma, eta > 0, got ({beta}, {gamma}, {eta})"
        )
    tolerance = settings.series_tolerance if tolerance is None else tolerance
    max_terms = settings.series_term_budget if max_terms is None else max_terms

    if z == 0:
        value = math.exp(-special.gammaln(gamma))
        return SeriesSum(value=value, terms=1, tail_bound=0.0, cancellation=1.0, error=0.0, precise=True)

    if beta == 1:
        # confluent hypergeometric case: Kummer's transformation inside hyp1f1
        # avoids the alternating sum for negative z
        value = float(special.hyp1f1(eta, gamma, z) * math.exp(-special.gammaln(gamma)))
        return SeriesSum(
            value=value, terms=0, tail_bound=0.0, cancellation=1.0, error=0.0, precise=True,
            method="hypergeometric",
        )

    if z < 0 and beta < 2:
        w = -z
        # the largest power-series term grows like exp(w^(1/beta))
        if math.log(w) / beta > math.log(ASYMPTOTIC_SWITCH):
            return _asymptotic_sum(beta, gamma, eta, w, tolerance, max_terms)
        power = _power_sum(beta, gamma, eta, z, tolerance, max_terms)
        if power.precise:
            return power
        expansion = _asymptotic_sum(beta, gamma, eta, w, tolerance, max_terms)
        return expansion if expansion.error < power.error else power

    return _power_sum(beta, gamma, eta, z, tolerance, max_terms)


def prabhakar_ml(beta: float, gamma: float, eta: float, z: float) -> float:
    result = prabhakar_series(beta, gamma, eta, z)
    if not result.precise:
        logger.warning(
            f"Prabhakar series at z={z} lost precision (cancellation ratio {result.cancellation:.3g})"
        )
    return result.value


def _times_exp(log_factor: float, value: float) -> float:
    """exp(log_factor) * value without overflowing the factor."""
    if value == 0:
        return 0.0
    return math.copysign(math.exp(min(log_factor + math.log(abs(value)), _LOG_FLOAT_MAX)), value)


def gml_density(x: float, p: GmlParams) -> float:
    """mu^delta x^(delta alpha - 1) E^delta_{alpha, delta alpha}(-mu x^alpha).

    For delta * alpha < 1 the density has an integrable singularity at 0.
    Beyond the body of the law the large-argument expansion takes over, so
    the tail decays like x^(-alpha - 1).
    """
    if not x > 0:
        raise DomainError(f"gml_density requires x > 0, got {x}")
    z = -p.mu * x**p.alpha
    series = prabhakar_series(p.alpha, p.delta * p.alpha, p.delta, z)
    if not series.precise:
        logger.warning(
            f"gML density at x={x} is low precision (mu x^alpha = {-z:.3g}, "
            f"{series.method} sum, error {series.error:.3g})"
        )
    log_prefactor = p.delta * math.log(p.mu) + (p.delta * p.alpha - 1.0) * math.log(x)
    return max(0.0, _times_exp(log_prefactor, series.value))


def gml_cdf(x: float, p: GmlParams) -> float:
    """(mu x^alpha)^delta E^delta_{alpha, delta alpha + 1}(-mu x^alpha)."""
    if x <= 0:
        return 0.0
    w = p.mu * x**p.alpha
    series = prabhakar_series(p.alpha, p.delta * p.alpha + 1.0, p.delta, -w)
    if not series.precise:
        logger.warning(
            f"gML distribution function at x={x} is low precision (mu x^alpha = {w:.3g}, "
            f"{series.method} sum, error {series.error:.3g})"
        )
    return min(1.0, max(0.0, _times_exp(p.delta * math.log(w), series.value)))
