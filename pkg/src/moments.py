"""Closed-form log-moments and fractional moments.

X' = ln X = U'/alpha + S'  and  Y' = ln|Y| = U'/alpha + S_alpha', with the
two summands independent. Mean, variance and third central moment use the
closed forms; the fourth central moment comes from the binomial convolution
of the summands' moments.
"""

import math
from math import comb

from scipy import special

from errors import DomainError
from models import GlParams, GmlParams, LogMomentSet
from specfun import EULER_GAMMA, PI, ZETA3, polygamma

RawMoments = tuple[float, float, float, float]

C = EULER_GAMMA


def stable_log_raw_moments(alpha: float) -> RawMoments:
    """E S'^k, k = 1..4, for S positive alpha-stable (Laplace transform exp(-t^alpha))."""
    if not 0 < alpha < 1:
        raise DomainError(f"positive stable index must lie in (0, 1), got {alpha}")
    a = alpha
    m1 = C * (1 / a - 1)
    m2 = (1 / a - 1) ** 2 * C**2 + PI**2 / 6 * (1 / a**2 - 1)
    m3 = (
        -2 * (a - 1) ** 3 * C**3
        + C * PI**2 * (a - 1) ** 2 * (1 + a)
        - 4 * (a**3 - 1) * ZETA3
    ) / (2 * a**3)
    m4 = (
        (1 / a**3 - 1 / a**4)
        * (
            60 * C**4 * (a - 1) ** 3
            - 60 * C**2 * PI**2 * (a - 1) ** 2 * (1 + a)
            + PI**4 * (a - 3) * (1 + a) * (3 + a)
            + 480 * C * (a**3 - 1) * ZETA3
        )
        / 60
    )
    return (m1, m2, m3, m4)


def sym_stable_log_raw_moments(alpha: float) -> RawMoments:
    """E S_alpha'^k, k = 1..4, for S_alpha symmetric stable (cf exp(-|t|^alpha))."""
    if not 0 < alpha <= 2:
        raise DomainError(f"symmetric stable index must lie in (0, 2], got {alpha}")
    a = alpha
    m1 = C * (1 / a - 1)
    m2 = (12 * C**2 * (a - 1) ** 2 + (a**2 + 2) * PI**2) / (12 * a**2)
    m3 = (
        (1 - a)
        * (
            4 * (a - 1) ** 2 * C**3
            + (a**2 + 2) * C * PI**2
            + 8 * (a**2 + a + 1) * ZETA3
        )
        / (4 * a**3)
    )
    m4 = (
        240 * (a - 1) ** 4 * C**4
        + 120 * (a - 1) ** 2 * (a**2 + 2) * C**2 * PI**2
        + (19 * a**4 + 20 * a**2 + 36) * PI**4
        + 1920 * (a - 1) ** 2 * (a**2 + a + 1) * C * ZETA3
    ) / (240 * a**4)
    return (m1, m2, m3, m4)


def gamma_log_raw_moments(delta: float, mu: float) -> RawMoments:
    """E U'^k, k = 1..4, for U ~ Gamma(shape delta, rate mu)."""
    if not (delta > 0 and mu > 0):
        raise DomainError(f"gamma shape and rate must be positive, got ({delta}, {mu})")
    L = math.log(mu)
    p0 = polygamma(0, delta)
    p1 = polygamma(1, delta)
    p2 = polygamma(2, delta)
    p3 = polygamma(3, delta)
    m1 = p0 - L
    m2 = (L - p0) ** 2 + p1
    m3 = -((L - p0) ** 3) + 3 * (p0 - L) * p1 + p2
    m4 = (
        L**4
        - 4 * L * p0**3
        + p0**4
        + 6 * L**2 * p1
        + 3 * p1**2
        + 6 * p0**2 * (L**2 + p1)
        - 4 * p0 * (L**3 + 3 * L * p1 - p2)
        - 4 * L * p2
        + p3
    )
    return (m1, m2, m3, m4)


def _central(raw: RawMoments) -> RawMoments:
    """(mean, variance, mu3, mu4) from raw moments."""
    m1, m2, m3, m4 = raw
    var = m2 - m1**2
    mu3 = m3 - 3 * m1 * m2 + 2 * m1**3
    mu4 = m4 - 4 * m1 * m3 + 6 * m1**2 * m2 - 3 * m1**4
    return (m1, var, mu3, mu4)


def _scaled(raw: RawMoments, c: float) -> RawMoments:
    return tuple(c ** (k + 1) * m for k, m in enumerate(raw))


def _convolve(a: RawMoments, b: RawMoments) -> RawMoments:
    """Raw moments of A + B for independent A, B."""
    a_all = (1.0, *a)
    b_all = (1.0, *b)
    return tuple(
        math.fsum(comb(k, j) * a_all[j] * b_all[k - j] for j in range(k + 1))
        for k in range(1, 5)
    )


def _convolved_central(first: RawMoments, second: RawMoments) -> RawMoments:
    # centre each summand first: central moments do not see the shift,
    # and the large ln(mu) term would otherwise cancel in raw-to-central
    mean_a, *central_a = _central(first)
    mean_b, *central_b = _central(second)
    _, var, mu3, mu4 = _central(_convolve((0.0, *central_a), (0.0, *central_b)))
    return (mean_a + mean_b, var, mu3, mu4)


def _gamma_part(delta: float, mu: float, alpha: float) -> RawMoments:
    return _scaled(gamma_log_raw_moments(delta, mu), 1.0 / alpha)


def log_mean(alpha: float, delta: float, mu: float) -> float:
    return C * (1 / alpha - 1) + (polygamma(0, delta) - math.log(mu)) / alpha


def log_mu3(alpha: float, delta: float) -> float:
    """Third central log-moment; identical for both families."""
    return (polygamma(2, delta) - 2 * (alpha**3 - 1) * ZETA3) / alpha**3


def gml_log_variance(alpha: float, delta: float) -> float:
    return PI**2 / 6 * (1 / alpha**2 - 1) + polygamma(1, delta) / alpha**2


def gl_log_variance(alpha: float, delta: float) -> float:
    return PI**2 * (alpha**2 + 2) / (12 * alpha**2) + polygamma(1, delta) / alpha**2


def convolved_log_moments(p: GmlParams | GlParams) -> LogMomentSet:
    """All four moments through the independence convolution."""
    gamma_part = _gamma_part(p.delta, p.mu, p.alpha)
    if isinstance(p, GmlParams):
        stable_part = (0.0, 0.0, 0.0, 0.0) if p.alpha == 1 else stable_log_raw_moments(p.alpha)
    else:
        stable_part = sym_stable_log_raw_moments(p.alpha)
    mean, var, mu3, mu4 = _convolved_central(gamma_part, stable_part)
    return LogMomentSet(mean=mean, variance=var, mu3=mu3, mu4=mu4)


def gml_log_moments(p: GmlParams) -> LogMomentSet:
    """Log-moments of X ~ gML(p); alpha = 1 reduces to the gamma log-moments."""
    mu4 = convolved_log_moments(p).mu4
    return LogMomentSet(
        mean=log_mean(p.alpha, p.delta, p.mu),
        variance=gml_log_variance(p.alpha, p.delta),
        mu3=log_mu3(p.alpha, p.delta),
        mu4=mu4,
    )


def gl_log_moments(p: GlParams) -> LogMomentSet:
    """Log-moments of |Y| for Y ~ gL(p)."""
    mu4 = convolved_log_moments(p).mu4
    return LogMomentSet(
        mean=log_mean(p.alpha, p.delta, p.mu),
        variance=gl_log_variance(p.alpha, p.delta),
        mu3=log_mu3(p.alpha, p.delta),
        mu4=mu4,
    )


def family_log_moments(p: GmlParams | GlParams) -> LogMomentSet:
    if isinstance(p, GmlParams):
        return gml_log_moments(p)
    return gl_log_moments(p)


def gamma_fractional_moment(s: float, delta: float, mu: float) -> float:
    """E U^s = Gamma(delta + s) / (mu^s Gamma(delta)), s > -delta."""
    if not (delta > 0 and mu > 0) or s <= -delta:
        raise DomainError(f"gamma moment of order {s} undefined for shape {delta}, rate {mu}")
    return math.exp(special.gammaln(delta + s) - special.gammaln(delta) - s * math.log(mu))


def stable_fractional_moment(q: float, alpha: float) -> float:
    """E S^q = Gamma(1 - q/alpha) / Gamma(1 - q) for the positive stable law, 0 <= q < alpha."""
    if not 0 < alpha <= 1 or not 0 <= q < alpha:
        raise DomainError(f"positive stable moment needs 0 <= q < alpha <= 1, got q={q}, alpha={alpha}")
    if alpha == 1:
        return 1.0
    return math.exp(special.gammaln(1 - q / alpha) - special.gammaln(1 - q))


def sym_stable_abs_moment(q: float, alpha: float) -> float:
    """E|S_alpha|^q = Gamma(1 - q/alpha) / (cos(pi q / 2) Gamma(1 - q)), 0 < q < alpha.

    Evaluated as 2 Gamma(q) sin(pi q / 2) Gamma(1 - q/alpha) / pi, which is
    the same quantity without the removable singularity at q = 1.
    """
    if not 0 < alpha <= 2 or not 0 < q < alpha:
        raise DomainError(f"symmetric stable moment needs 0 < q < alpha <= 2, got q={q}, alpha={alpha}")
    return 2.0 / PI * math.sin(PI * q / 2) * math.exp(special.gammaln(q) + special.gammaln(1 - q / alpha))


def gml_fractional_moment(q: float, p: GmlParams) -> float:
    """E X^q for 0 < q < alpha."""
    if not 0 < q < p.alpha:
        raise DomainError(f"E X^q diverges unless 0 < q < alpha = {p.alpha}, got q={q}")
    return gamma_fractional_moment(q / p.alpha, p.delta, p.mu) * stable_fractional_moment(q, p.alpha)


def gl_abs_fractional_moment(q: float, p: GlParams) -> float:
    """E|Y|^q for 0 < q < alpha, as E U^(q/alpha) * E|S_alpha|^q."""
    if not 0 < q < p.alpha:
        raise DomainError(f"E|Y|^q diverges unless 0 < q < alpha = {p.alpha}, got q={q}")
    return gamma_fractional_moment(q / p.alpha, p.delta, p.mu) * sym_stable_abs_moment(q, p.alpha)
