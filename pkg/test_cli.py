#!/usr/bin/env python3
"""
End-to-end tests for the command-line front end.
"""

import json
import os
import sys

import numpy as np
import pandas as pd
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), "src"))

from cli import main
from models import GmlParams
from montecarlo import CSV_COLUMNS
from sampling import RngStream, sample_gml


def _sample(tmp_path, name="draws.txt", seed="7", n="500"):
    path = tmp_path / name
    code = main([
        "sample", "--family", "gml", "--alpha", "0.8", "--delta", "1.0", "--mu", "1.0",
        "--n", n, "--seed", seed, "--out", str(path),
    ])
    assert code == 0
    return path


def test_sample_is_deterministic(tmp_path):
    first = np.loadtxt(_sample(tmp_path, "a.txt"))
    second = np.loadtxt(_sample(tmp_path, "b.txt"))
    assert first.size == 500
    assert np.all(first > 0)
    np.testing.assert_array_equal(first, second)


def test_generated_seed_is_reported(tmp_path, capsys):
    path = tmp_path / "draws.txt"
    assert main(["sample", "--family", "gl", "--alpha", "1.5", "--delta", "1", "--mu", "1", "--n", "10", "--out", str(path)]) == 0
    assert "seed:" in capsys.readouterr().err


def test_invalid_parameters_exit_with_error(tmp_path):
    path = tmp_path / "draws.txt"
    code = main(["sample", "--family", "gml", "--alpha", "1.5", "--delta", "1", "--mu", "1", "--n", "10", "--out", str(path)])
    assert code == 1
    assert not path.exists()


def test_fit_on_empty_file_fails(tmp_path):
    path = tmp_path / "empty.txt"
    path.write_text("")
    assert main(["fit", "--family", "gml", "--input", str(path)]) == 1


def test_fit_prints_json(tmp_path, capsys):
    path = _sample(tmp_path)
    capsys.readouterr()
    assert main(["fit", "--family", "gml", "--nparams", "2", "--input", str(path)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["nparams"] == 2
    assert payload["n"] == 500
    assert set(payload["estimates"]) == {"alpha", "delta", "mu"}
    assert payload["estimates"]["delta"] == 1.0


def test_asymptotic_interval_needs_two_parameters(tmp_path):
    path = _sample(tmp_path)
    assert main(["ci", "--family", "gml", "--nparams", "3", "--method", "asymptotic", "--input", str(path)]) == 1


def test_asymptotic_interval(tmp_path):
    path = _sample(tmp_path)
    out = tmp_path / "ci.json"
    code = main([
        "ci", "--family", "gml", "--nparams", "2", "--method", "asymptotic",
        "--level", "0.9", "--input", str(path), "--out", str(out),
    ])
    assert code == 0
    intervals = json.loads(out.read_text())["intervals"]
    assert [i["parameter"] for i in intervals] == ["alpha", "mu"]
    assert all(i["level"] == 0.9 for i in intervals)


def test_bootstrap_interval(tmp_path):
    path = _sample(tmp_path)
    out = tmp_path / "ci.json"
    code = main([
        "ci", "--family", "gml", "--nparams", "2", "--input", str(path),
        "--replicates", "30", "--seed", "3", "--workers", "1", "--out", str(out),
    ])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["replicates"] == 30
    assert all(i["method"] == "bootstrap" for i in payload["intervals"])


def test_mc_study_writes_csv(tmp_path):
    config = tmp_path / "study.json"
    config.write_text(json.dumps({
        "family": "gml", "grid": [[0.7, 1.0, 1.0]], "sample_sizes": [100],
        "replications": 2, "nparams": 2, "workers": 1,
    }))
    out = tmp_path / "study.csv"
    assert main(["mc-study", "--config", str(config), "--seed", "5", "--out", str(out)]) == 0
    frame = pd.read_csv(out)
    assert list(frame.columns) == CSV_COLUMNS
    assert sorted(frame["param"]) == ["alpha", "mu"]


def _ohlc_file(tmp_path, n_days=400):
    gen = RngStream(seed=17).generator()
    sizes = 0.01 * sample_gml(GmlParams(alpha=0.95, delta=1.0, mu=1.0), n_days - 1, RngStream(seed=18))
    returns = np.where(gen.random(n_days - 1) < 0.5, -sizes, sizes)
    prices = 100.0 * np.exp(np.concatenate([[0.0], np.cumsum(returns)]))
    frame = pd.DataFrame({
        "Date": pd.bdate_range("2019-01-02", periods=n_days).strftime("%Y-%m-%d"),
        "Open": prices, "High": prices, "Low": prices, "Close": prices, "Adj Close": prices,
        "Volume": 1000,
    })
    path = tmp_path / "index.csv"
    frame.to_csv(path, index=False)
    return path


def test_analyze_writes_report(tmp_path):
    prefix = tmp_path / "idx"
    code = main([
        "analyze", "--input", str(_ohlc_file(tmp_path)), "--family", "gml", "--with-two-param",
        "--replicates", "20", "--seed", "4", "--workers", "1", "--bins", "30", "--out-prefix", str(prefix),
    ])
    assert code == 0
    report = json.loads((tmp_path / "idx_fit.json").read_text())
    assert report["side"] == "negative-abs"
    assert report["records"] == 400
    assert report["fit"]["fit"]["nparams"] == 3
    assert report["fit_two_param"]["fit"]["nparams"] == 2
    hist = pd.read_csv(tmp_path / "idx_hist.csv")
    assert len(hist) == 30
    if report["fit"]["fit"]["in_support"]:
        assert (tmp_path / "idx_kde.csv").exists()


def test_kde_command(tmp_path):
    path = _sample(tmp_path, n="200")
    out = tmp_path / "kde.csv"
    assert main(["kde", "--input", str(path), "--boundary", "--bandwidth", "0.1", "--points", "50", "--out", str(out)]) == 0
    frame = pd.read_csv(out)
    assert len(frame) == 50
    assert frame["x"].iloc[0] == 0.0
    assert (frame["density"] >= 0).all()


def test_density_command(tmp_path):
    out = tmp_path / "density.csv"
    code = main([
        "density", "--alpha", "0.7", "--delta", "0.5", "--mu", "1", "--x-max", "5",
        "--points", "20", "--out", str(out),
    ])
    assert code == 0
    frame = pd.read_csv(out)
    assert list(frame.columns) == ["x", "density", "cdf"]
    assert (frame["density"] > 0).all()
    assert frame["cdf"].is_monotonic_increasing
    assert frame["cdf"].between(0, 1).all()


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
