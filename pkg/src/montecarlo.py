"""Simulation study: bias and coefficient of variation of the estimators.

For each (parameter triple, sample size) cell, `replications` samples are
drawn and refitted. Replicate r of cell c draws from
RngStream(seed, c * replications + r), so rows are identical for any
worker count.
"""

import logging
import math
from pathlib import Path
from typing import Literal, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from config import settings
from errors import LinnikError
from estimators import fit
from models import Family, make_params
from sampling import RngStream, sample_family
from workers import ordered_map

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["family", "alpha", "delta", "mu", "n", "param", "mb", "cv", "fail_rate"]
STUDY_SIZES = (100, 1_000, 10_000)


class StudyConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    family: Family
    grid: list[tuple[float, float, float]] = Field(min_length=1)
    sample_sizes: list[int] = Field(default_factory=lambda: list(STUDY_SIZES), min_length=1)
    replications: int = Field(default=1000, ge=2)
    seed: int = Field(default=0, ge=0)
    nparams: Literal[2, 3] = 3
    multistart: int = Field(default=0, ge=0)
    workers: int = Field(default_factory=lambda: settings.workers, ge=1)

    @model_validator(mode="after")
    def _check_grid(self):
        for alpha, delta, mu in self.grid:
            make_params(self.family, alpha, delta, mu)
        if any(n < 10 for n in self.sample_sizes):
            raise ValueError(f"sample sizes must be at least 10, got {self.sample_sizes}")
        return self

    @classmethod
    def from_json(cls, path: str | Path) -> "StudyConfig":
        return cls.model_validate_json(Path(path).read_text(encoding="utf-8"))


class StudyRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    family: Family
    alpha: float
    delta: float
    mu: float
    n: int
    mb: dict[str, float]
    cv: dict[str, float]
    failures: int = Field(ge=0)
    replications: int

    @property
    def fail_rate(self) -> float:
        return self.failures / self.replications

    def csv_records(self) -> list[dict]:
        return [
            {
                "family": self.family.value,
                "alpha": self.alpha,
                "delta": self.delta,
                "mu": self.mu,
                "n": self.n,
                "param": name,
                "mb": self.mb[name],
                "cv": self.cv[name],
                "fail_rate": self.fail_rate,
            }
            for name in self.mb
        ]


def table1_config(seed: int = 2019, replications: int = 1000, sample_sizes: Sequence[int] = STUDY_SIZES) -> StudyConfig:
    """gML study: alpha in {0.5, 0.7, 0.95}, delta = 0.5, mu = 1."""
    return StudyConfig(
        family=Family.GML,
        grid=[(alpha, 0.5, 1.0) for alpha in (0.5, 0.7, 0.95)],
        sample_sizes=list(sample_sizes),
        replications=replications,
        seed=seed,
    )


def table2_config(seed: int = 2019, replications: int = 1000, sample_sizes: Sequence[int] = STUDY_SIZES) -> StudyConfig:
    """gL study: alpha in {0.6, 1.2, 1.8}, delta = 0.5, mu = 1."""
    return StudyConfig(
        family=Family.GL,
        grid=[(alpha, 0.5, 1.0) for alpha in (0.6, 1.2, 1.8)],
        sample_sizes=list(sample_sizes),
        replications=replications,
        seed=seed,
    )


def bias_and_cv(estimates: Sequence[float], truth: float) -> tuple[float, float]:
    """MB = mean(|est - truth| / truth), CV = sd(est) / mean(est)."""
    values = np.asarray(estimates, dtype=float)
    if values.size < 2:
        return math.nan, math.nan
    mb = float(np.mean(np.abs(values - truth) / truth))
    cv = float(np.std(values, ddof=1) / np.mean(values))
    return mb, cv


class _StudyTask:
    """Draw-and-fit for one replicate; picklable for worker processes."""

    def __init__(self, cfg: StudyConfig):
        self.cfg = cfg

    def __call__(self, task: tuple[tuple[float, float, float], int, int]) -> dict[str, float] | None:
        (alpha, delta, mu), n, stream_id = task
        params = make_params(self.cfg.family, alpha, delta, mu)
        sample = sample_family(params, n, RngStream(seed=self.cfg.seed, stream_id=stream_id))
        try:
            result = fit(self.cfg.family, self.cfg.nparams, sample, self.cfg.multistart)
        except (LinnikError, ValueError) as e:
            logger.debug(f"Replicate {stream_id} failed: {e}")
            return None
        if not result.converged:
            return None
        return result.estimates()


def run_study(cfg: StudyConfig) -> list[StudyRow]:
    cells = [(triple, n) for triple in cfg.grid for n in cfg.sample_sizes]
    tasks = [
        (triple, n, c * cfg.replications + r)
        for c, (triple, n) in enumerate(cells)
        for r in range(cfg.replications)
    ]
    logger.info(
        f"{cfg.family.value} study: {len(cells)} cells x {cfg.replications} replications "
        f"on {cfg.workers} worker(s)"
    )
    results = ordered_map(_StudyTask(cfg), tasks, cfg.workers)

    names = ("alpha", "mu") if cfg.nparams == 2 else ("alpha", "delta", "mu")
    rows = []
    for c, ((alpha, delta, mu), n) in enumerate(cells):
        chunk = results[c * cfg.replications : (c + 1) * cfg.replications]
        succeeded = [r for r in chunk if r is not None]
        failures = len(chunk) - len(succeeded)
        truth = {"alpha": alpha, "delta": delta, "mu": mu}
        mb, cv = {}, {}
        for name in names:
            mb[name], cv[name] = bias_and_cv([r[name] for r in succeeded], truth[name])
        if failures:
            logger.warning(
                f"Cell alpha={alpha}, delta={delta}, mu={mu}, n={n}: "
                f"{failures} of {cfg.replications} fits failed"
            )
        rows.append(
            StudyRow(
                family=cfg.family,
                alpha=alpha,
                delta=delta,
                mu=mu,
                n=n,
                mb=mb,
                cv=cv,
                failures=failures,
                replications=cfg.replications,
            )
        )
        logger.info(f"alpha={alpha}, n={n}: MB(alpha)={mb['alpha']:.4f}, CV(alpha)={cv['alpha']:.4f}")
    return rows


def study_frame(rows: Sequence[StudyRow]) -> pd.DataFrame:
    records = [record for row in rows for record in row.csv_records()]
    return pd.DataFrame.from_records(records, columns=CSV_COLUMNS)


def write_study_csv(rows: Sequence[StudyRow], path: str | Path) -> Path:
    path = Path(path)
    study_frame(rows).to_csv(path, index=False, lineterminator="\n")
    logger.info(f"Wrote {len(rows)} study rows to {path}")
    return path
