"""Random variates for stable laws and the gML / gL mixtures.

X = U^(1/alpha) S  with U ~ Gamma(delta, rate mu) and S positive alpha-stable
Y = U^(1/alpha) S_alpha  with S_alpha symmetric alpha-stable

Products are formed in log space, ln X = ln U / alpha + ln S, and only then
exponentiated; magnitudes below the smallest normal double are floored there
so draws stay strictly positive (non-zero for gL).

Every sampler accepts either an `RngStream` (a fresh, reproducible generator
is derived from it) or a live `numpy.random.Generator`.
"""

import logging
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from errors import DomainError
from models import GlParams, GmlParams

logger = logging.getLogger(__name__)

_TINY = np.finfo(float).tiny
_UINT64_MAX = 2**64 - 1


class RngStream(BaseModel):
    """(seed, stream_id) pair; equal pairs give bitwise-equal draws."""

    model_config = ConfigDict(frozen=True)

    seed: int = Field(ge=0, le=_UINT64_MAX)
    stream_id: int = Field(default=0, ge=0, le=_UINT64_MAX)

    def generator(self) -> np.random.Generator:
        sequence = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(sequence))


def _generator(rng: RngStream | np.random.Generator) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return rng.generator()


def _positive_exp(log_values):
    return np.maximum(np.exp(log_values), _TINY)


def kanter_log_transform(alpha: float, u, e):
    """ln of Kanter's map from U ~ Uniform(0, pi), E ~ Exp(1)."""
    u = np.asarray(u, dtype=float)
    e = np.asarray(e, dtype=float)
    inv = 1.0 / alpha
    return (
        np.log(np.sin(alpha * u))
        + (inv - 1.0) * np.log(np.sin((1.0 - alpha) * u))
        - inv * np.log(np.sin(u))
        - (inv - 1.0) * np.log(e)
    )


def kanter_transform(alpha: float, u, e):
    """Kanter's map to a positive alpha-stable variate."""
    return np.exp(kanter_log_transform(alpha, u, e))


def cms_transform(alpha: float, u2, e):
    """Chambers-Mallows-Stuck map for the symmetric law with cf exp(-|t|^alpha).

    U2 ~ Uniform(-pi/2, pi/2), E ~ Exp(1).
    """
    u2 = np.asarray(u2, dtype=float)
    e = np.asarray(e, dtype=float)
    if alpha == 1:
        return np.tan(u2)
    if alpha == 2:
        return 2.0 * np.sqrt(e) * np.sin(u2)
    return (
        np.sin(alpha * u2)
        / np.cos(u2) ** (1.0 / alpha)
        * (np.cos((1.0 - alpha) * u2) / e) ** (1.0 / alpha - 1.0)
    )


def _check_positive_index(alpha: float) -> None:
    if not 0 < alpha < 1:
        raise DomainError(f"positive stable index must lie in (0, 1), got {alpha}")


def sample_log_alpha_plus_stable(alpha: float, rng: RngStream | np.random.Generator, size=None):
    """ln S for positive strictly stable S."""
    _check_positive_index(alpha)
    gen = _generator(rng)
    u = gen.uniform(0.0, np.pi, size)
    e = gen.standard_exponential(size)
    return kanter_log_transform(alpha, u, e)


def sample_alpha_plus_stable(alpha: float, rng: RngStream | np.random.Generator, size=None):
    """Positive strictly stable variates with Laplace transform exp(-t^alpha)."""
    _check_positive_index(alpha)
    return _positive_exp(sample_log_alpha_plus_stable(alpha, rng, size))


def sample_sym_alpha_stable(alpha: float, rng: RngStream | np.random.Generator, size=None):
    """Symmetric stable variates with characteristic function exp(-|t|^alpha)."""
    if not 0 < alpha <= 2:
        raise DomainError(f"symmetric stable index must lie in (0, 2], got {alpha}")
    gen = _generator(rng)
    u2 = gen.uniform(-np.pi / 2, np.pi / 2, size)
    e = gen.standard_exponential(size)
    return cms_transform(alpha, u2, e)


def _check_gamma(delta: float, mu: float) -> None:
    if not (delta > 0 and mu > 0):
        raise DomainError(f"gamma shape and rate must be positive, got ({delta}, {mu})")


def sample_log_gamma(delta: float, mu: float, rng: RngStream | np.random.Generator, size=None):
    """ln U for U ~ Gamma(shape delta, rate mu).

    Shape boost: U = G V^(1/delta) with G ~ Gamma(delta + 1) and V uniform,
    so ln U = ln G - E / delta - ln mu stays finite for small delta.
    """
    _check_gamma(delta, mu)
    gen = _generator(rng)
    log_g = np.log(gen.gamma(delta + 1.0, 1.0, size=size))
    return log_g - gen.standard_exponential(size) / delta - math.log(mu)


def sample_gamma(delta: float, mu: float, rng: RngStream | np.random.Generator, size=None):
    """Gamma variates with shape delta and rate mu."""
    _check_gamma(delta, mu)
    return _positive_exp(sample_log_gamma(delta, mu, rng, size))


def _check_count(n: int) -> int:
    if int(n) != n or n < 1:
        raise DomainError(f"sample size must be a positive integer, got {n}")
    return int(n)


def sample_gml(p: GmlParams, n: int, rng: RngStream | np.random.Generator) -> np.ndarray:
    """n draws of U^(1/alpha) S; alpha = 1 returns the gamma draws (S = 1)."""
    n = _check_count(n)
    gen = _generator(rng)
    log_u = sample_log_gamma(p.delta, p.mu, gen, n)
    if p.alpha == 1:
        return _positive_exp(log_u)
    return _positive_exp(log_u / p.alpha + sample_log_alpha_plus_stable(p.alpha, gen, n))


def sample_gl(p: GlParams, n: int, rng: RngStream | np.random.Generator) -> np.ndarray:
    """n draws of U^(1/alpha) S_alpha."""
    n = _check_count(n)
    gen = _generator(rng)
    log_u = sample_log_gamma(p.delta, p.mu, gen, n)
    s = sample_sym_alpha_stable(p.alpha, gen, n)
    with np.errstate(divide="ignore"):
        magnitude = _positive_exp(log_u / p.alpha + np.log(np.abs(s)))
    return np.copysign(magnitude, s)


def sample_family(p: GmlParams | GlParams, n: int, rng: RngStream | np.random.Generator) -> np.ndarray:
    if isinstance(p, GmlParams):
        return sample_gml(p, n, rng)
    return sample_gl(p, n, rng)
