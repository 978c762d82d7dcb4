#!/usr/bin/env python3
"""
Tests for the percentile bootstrap.
"""

import os
import sys
from functools import partial

import numpy as np
import pytest
from pydantic import ValidationError

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), "src"))

from bootstrap import BootstrapConfig, bootstrap_ci
from errors import BootstrapFailureError, DegenerateMomentsError
from estimators import fit, fit_gl2, fit_gml2
from models import Family, GmlParams
from sampling import RngStream, sample_gml

SLOW = pytest.mark.skipif(os.getenv("LINNIK_SLOW_TESTS") != "1", reason="set LINNIK_SLOW_TESTS=1")


@pytest.fixture(scope="module")
def sample():
    return sample_gml(GmlParams(alpha=0.9, delta=1.0, mu=1.0), 400, RngStream(seed=21))


def test_config_validation():
    with pytest.raises(ValidationError):
        BootstrapConfig(replicates=1, seed=1)
    with pytest.raises(ValidationError):
        BootstrapConfig(replicates=10, level=1.0, seed=1)


def test_two_parameter_intervals(sample):
    result = bootstrap_ci(sample, fit_gml2, BootstrapConfig(replicates=200, level=0.95, seed=5, workers=1))
    assert result.failures == 0
    assert [ci.parameter for ci in result.intervals] == ["alpha", "mu"]
    assert result.matrix().shape == (200, 2)
    for ci in result.intervals:
        assert ci.method == "bootstrap"
        assert ci.lower <= ci.upper
        assert ci.contains_point
    assert result.point.alpha_hat == fit_gml2(sample).alpha_hat


def test_same_seed_same_intervals(sample):
    cfg = BootstrapConfig(replicates=50, seed=9, workers=1)
    a = bootstrap_ci(sample, fit_gml2, cfg)
    b = bootstrap_ci(sample, fit_gml2, cfg)
    assert a.intervals == b.intervals


def test_worker_count_does_not_change_result(sample):
    fitter = partial(fit, Family.GML, 2)
    serial = bootstrap_ci(sample, fitter, BootstrapConfig(replicates=40, seed=3, workers=1))
    pooled = bootstrap_ci(sample, fitter, BootstrapConfig(replicates=40, seed=3, workers=2))
    assert serial.intervals == pooled.intervals
    assert serial.samples == pooled.samples


def test_higher_level_contains_lower_level(sample):
    result = bootstrap_ci(sample, fit_gml2, BootstrapConfig(replicates=200, level=0.9, seed=11, workers=1))
    narrow = {ci.parameter: ci for ci in result.intervals_at(0.90)}
    wide = {ci.parameter: ci for ci in result.intervals_at(0.99)}
    for name in narrow:
        assert wide[name].lower <= narrow[name].lower
        assert wide[name].upper >= narrow[name].upper


def test_constant_data_propagates_fitter_error():
    with pytest.raises(DegenerateMomentsError):
        bootstrap_ci(np.full(50, 2.0), fit_gl2, BootstrapConfig(replicates=10, seed=1, workers=1))


def test_fixed_parameter_gives_degenerate_interval(sample):
    def pinned_delta(data):
        # three-parameter shape with delta held at 1 in every replicate
        return fit_gml2(data).model_copy(update={"nparams": 3})

    result = bootstrap_ci(sample, pinned_delta, BootstrapConfig(replicates=30, seed=2, workers=1))
    delta = result.interval("delta")
    assert delta.degenerate
    assert delta.lower == delta.upper == 1.0
    assert not result.interval("alpha").degenerate


def test_excessive_failures(sample):
    def fails_on_resamples(data):
        if np.array_equal(data, sample):
            return fit_gml2(data)
        raise DegenerateMomentsError("resample rejected")

    with pytest.raises(BootstrapFailureError) as info:
        bootstrap_ci(sample, fails_on_resamples, BootstrapConfig(replicates=20, seed=4, workers=1))
    assert info.value.failures == 20


@SLOW
def test_three_parameter_interval_covers_truth():
    p = GmlParams(alpha=0.95, delta=1.0, mu=1.0)
    fitter = partial(fit, Family.GML, 3)
    hits = 0
    for r in range(200):
        data = sample_gml(p, 10_000, RngStream(seed=77, stream_id=r))
        result = bootstrap_ci(data, fitter, BootstrapConfig(replicates=1000, seed=r, workers=os.cpu_count() or 1))
        ci = result.interval("alpha")
        hits += ci.lower <= 0.95 <= ci.upper
    assert 0.90 <= hits / 200 <= 0.99


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
