#!/usr/bin/env python3
"""
Tests for the special functions: gamma family, the Prabhakar series and the gML density.
"""

import math
import os
import sys

import numpy as np
import pytest
from scipy import integrate, special, stats

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), "src"))

from errors import DomainError, SeriesConvergenceError
from models import GmlParams
from specfun import (
    EULER_GAMMA,
    ZETA3,
    ZETA5,
    gml_cdf,
    gml_density,
    log_gamma,
    polygamma,
    prabhakar_ml,
    prabhakar_series,
)

NORMALIZATION_GRID = [
    (alpha, delta, mu)
    for alpha in (0.6, 0.8, 0.95)
    for delta in (0.5, 1.0, 2.0)
    for mu in (0.5, 1.0, 5.0)
]


def test_log_gamma():
    assert log_gamma(5.0) == pytest.approx(math.log(24.0), rel=1e-14)
    assert log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), rel=1e-14)
    with pytest.raises(DomainError):
        log_gamma(0.0)


def test_polygamma_values_at_one():
    assert polygamma(0, 1.0) == pytest.approx(-EULER_GAMMA, rel=1e-14)
    assert polygamma(1, 1.0) == pytest.approx(math.pi**2 / 6, rel=1e-14)
    assert polygamma(2, 1.0) == pytest.approx(-2 * ZETA3, rel=1e-13)
    assert polygamma(3, 1.0) == pytest.approx(math.pi**4 / 15, rel=1e-13)
    assert polygamma(4, 1.0) == pytest.approx(-24 * ZETA5, rel=1e-13)


@pytest.mark.parametrize("k", [0, 1, 2, 3])
@pytest.mark.parametrize("x", [0.05, 0.3, 1.0, 2.5, 7.0, 40.0])
def test_polygamma_recurrence(k, x):
    # psi^(k)(x + 1) = psi^(k)(x) + (-1)^k k! / x^(k + 1)
    step = (-1) ** k * math.factorial(k) / x ** (k + 1)
    assert polygamma(k, x + 1.0) == pytest.approx(polygamma(k, x) + step, rel=1e-12, abs=1e-14)


def test_polygamma_domain():
    with pytest.raises(DomainError):
        polygamma(5, 1.0)
    with pytest.raises(DomainError):
        polygamma(1, -0.5)


@pytest.mark.parametrize("z", np.linspace(-20.0, 5.0, 11))
def test_prabhakar_reduces_to_exponential(z):
    assert prabhakar_ml(1.0, 1.0, 1.0, z) == pytest.approx(math.exp(z), rel=1e-9)


def test_prabhakar_three_parameter_kummer_case():
    # E^2_{1,1}(z) = 1F1(2; 1; z) = (1 + z) e^z
    assert prabhakar_ml(1.0, 1.0, 2.0, 0.5) == pytest.approx(1.5 * math.exp(0.5), rel=1e-12)


def test_prabhakar_cosine_case():
    # E_{2,1}(-x^2) = cos(x)
    x = 1.5
    assert prabhakar_ml(2.0, 1.0, 1.0, -(x**2)) == pytest.approx(math.cos(x), abs=1e-10)


def test_prabhakar_matches_direct_gamma_sum():
    direct = math.fsum((-1.0) ** r / math.gamma(0.7 * r + 0.7) for r in range(80))
    result = prabhakar_series(0.7, 0.7, 1.0, -1.0)
    assert result.value == pytest.approx(direct, abs=1e-10)
    assert result.precise
    assert result.tail_bound < 1e-10


def test_prabhakar_at_zero():
    result = prabhakar_series(0.5, 2.5, 3.0, 0.0)
    assert result.value == pytest.approx(1 / math.gamma(2.5), rel=1e-14)
    assert result.terms == 1


def test_prabhakar_term_budget():
    with pytest.raises(SeriesConvergenceError) as info:
        prabhakar_series(0.7, 0.7, 1.0, -1.0, max_terms=3)
    assert math.isfinite(info.value.partial_sum)


def test_prabhakar_rejects_bad_parameters():
    with pytest.raises(DomainError):
        prabhakar_series(0.0, 1.0, 1.0, -1.0)


@pytest.mark.parametrize("x", [0.1, 1.0, 3.0])
def test_gml_density_alpha_one_is_gamma(x):
    p = GmlParams(alpha=1.0, delta=0.5, mu=2.0)
    assert gml_density(x, p) == pytest.approx(stats.gamma.pdf(x, a=0.5, scale=0.5), rel=1e-9)
    assert gml_cdf(x, p) == pytest.approx(stats.gamma.cdf(x, a=0.5, scale=0.5), rel=1e-9)


def test_gml_density_integrates_to_cdf():
    p = GmlParams(alpha=0.7, delta=1.0, mu=1.0)
    x0 = 2.0
    area, _ = integrate.quad(lambda x: gml_density(x, p), 0.0, x0, limit=200)
    assert area == pytest.approx(gml_cdf(x0, p), abs=1e-6)


def test_gml_density_integrates_to_cdf_past_the_body():
    # x = 50 lies beyond the switch to the large-argument expansion
    p = GmlParams(alpha=0.8, delta=1.0, mu=1.0)
    head, _ = integrate.quad(lambda x: gml_density(x, p), 0.0, 1.0, limit=200)
    body, _ = integrate.quad(lambda x: gml_density(x, p), 1.0, 50.0, limit=200)
    assert head + body == pytest.approx(gml_cdf(50.0, p), abs=1e-6)


@pytest.mark.parametrize("alpha, delta, mu", NORMALIZATION_GRID)
def test_gml_density_is_normalized(alpha, delta, mu):
    p = GmlParams(alpha=alpha, delta=delta, mu=mu)
    scale = mu ** (-1.0 / alpha)
    pieces = [(0.0, scale), (scale, 100.0 * scale), (100.0 * scale, math.inf)]
    total = sum(integrate.quad(lambda x: gml_density(x, p), a, b, limit=200)[0] for a, b in pieces)
    assert total == pytest.approx(1.0, abs=1e-4)


@pytest.mark.parametrize("x", [30.0, 100.0, 1000.0, 1e4, 1e6])
def test_gml_density_far_tail_is_finite(x):
    p = GmlParams(alpha=0.8, delta=1.0, mu=1.0)
    value = gml_density(x, p)
    assert math.isfinite(value) and value > 0


@pytest.mark.parametrize("x, rel", [(1e4, 5e-3), (1e6, 1e-4)])
def test_gml_density_power_law_tail(x, rel):
    # f(x) ~ -delta x^(-alpha - 1) / (mu Gamma(-alpha))
    alpha, delta, mu = 0.8, 1.0, 1.0
    p = GmlParams(alpha=alpha, delta=delta, mu=mu)
    leading = -delta / (mu * special.gamma(-alpha)) * x ** (-alpha - 1.0)
    assert gml_density(x, p) == pytest.approx(leading, rel=rel)


def test_gml_cdf_power_law_tail():
    # 1 - F(x) ~ delta / (mu Gamma(1 - alpha) x^alpha)
    alpha, delta, mu = 0.8, 1.0, 1.0
    p = GmlParams(alpha=alpha, delta=delta, mu=mu)
    x = 1e6
    survival = delta / (mu * special.gamma(1.0 - alpha) * x**alpha)
    assert 1.0 - gml_cdf(x, p) == pytest.approx(survival, rel=1e-3)


def test_prabhakar_large_argument_expansion():
    result = prabhakar_series(0.8, 0.8, 1.0, -1e4)
    assert result.method == "asymptotic"
    assert result.precise
    # E_{a,a}(-w) ~ -w^(-2) / Gamma(-a)
    assert result.value == pytest.approx(-1e-8 / special.gamma(-0.8), rel=1e-3)


def test_prabhakar_power_series_below_switch():
    result = prabhakar_series(0.8, 0.8, 1.0, -2.0)
    assert result.method == "power"
    assert result.precise


def test_gml_cdf_is_monotone_across_switch():
    p = GmlParams(alpha=0.8, delta=1.0, mu=1.0)
    values = [gml_cdf(x, p) for x in np.geomspace(5.0, 500.0, 25)]
    assert all(b >= a for a, b in zip(values, values[1:]))
    assert values[-1] < 1.0


def test_gml_cdf_is_monotone():
    p = GmlParams(alpha=0.5, delta=0.5, mu=1.0)
    values = [gml_cdf(x, p) for x in (0.0, 0.01, 0.1, 0.5, 1.0, 2.0)]
    assert values[0] == 0.0
    assert all(b >= a for a, b in zip(values, values[1:]))
    assert all(0.0 <= v <= 1.0 for v in values)


def test_gml_density_domain():
    with pytest.raises(DomainError):
        gml_density(0.0, GmlParams(alpha=0.5, delta=1.0, mu=1.0))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
