"""Nonparametric percentile bootstrap over raw observations."""

import logging
from typing import Callable, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from config import settings
from errors import BootstrapFailureError, InsufficientDataError, LinnikError
from models import FitResult, IntervalEstimate
from sampling import RngStream
from workers import ordered_map

logger = logging.getLogger(__name__)

Fitter = Callable[[np.ndarray], FitResult]


class BootstrapConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    replicates: int = Field(default_factory=lambda: settings.bootstrap_replicates, ge=2)
    level: float = Field(default_factory=lambda: settings.confidence_level, gt=0, lt=1)
    seed: int = Field(ge=0, le=2**64 - 1)
    workers: int = Field(default_factory=lambda: settings.workers, ge=1)
    max_failure_rate: float = Field(default=0.2, ge=0, le=1)


class BootstrapResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    point: FitResult
    level: float
    replicates: int
    failures: int
    intervals: list[IntervalEstimate]
    # parameter -> estimates of the successful replicates, in replicate order
    samples: dict[str, list[float]] = Field(repr=False)

    def matrix(self) -> np.ndarray:
        """Successful replicates x free parameters."""
        return np.column_stack([self.samples[name] for name in self.point.free_parameters()])

    def intervals_at(self, level: float) -> list[IntervalEstimate]:
        return percentile_intervals(self.point, self.samples, level)

    def interval(self, parameter: str) -> IntervalEstimate:
        for estimate in self.intervals:
            if estimate.parameter == parameter:
                return estimate
        raise KeyError(parameter)


class _Replicate:
    """One resample-and-refit; picklable so it can run in worker processes."""

    def __init__(self, data: np.ndarray, fitter: Fitter, seed: int):
        self.data = data
        self.fitter = fitter
        self.seed = seed

    def __call__(self, index: int) -> FitResult | None:
        gen = RngStream(seed=self.seed, stream_id=index).generator()
        resample = self.data[gen.integers(0, self.data.size, size=self.data.size)]
        try:
            result = self.fitter(resample)
        except (LinnikError, ValueError) as e:
            logger.debug(f"Bootstrap replicate {index} failed: {e}")
            return None
        if not result.converged:
            logger.debug(f"Bootstrap replicate {index} did not converge")
            return None
        return result


def percentile_intervals(
    point: FitResult,
    samples: dict[str, list[float]],
    level: float,
) -> list[IntervalEstimate]:
    tail = (1 - level) / 2
    intervals = []
    estimates = point.estimates()
    for name in point.free_parameters():
        values = np.asarray(samples[name], dtype=float)
        if values.size == 0:
            raise InsufficientDataError("no successful bootstrap replicates")
        lower, upper = (float(q) for q in np.quantile(values, [tail, 1 - tail]))
        note = None
        degenerate = bool(np.ptp(values) <= 1e-12 * max(1.0, abs(float(values[0]))))
        if degenerate:
            note = "every replicate returned the same value"
            logger.warning(f"Bootstrap interval for {name} is degenerate at {values[0]:.6g}")
        elif not lower <= estimates[name] <= upper:
            note = "percentile interval excludes the full-data estimate"
            logger.warning(
                f"Bootstrap interval for {name} ({lower:.6g}, {upper:.6g}) "
                f"excludes the point estimate {estimates[name]:.6g}"
            )
        intervals.append(
            IntervalEstimate(
                parameter=name,
                point=estimates[name],
                lower=lower,
                upper=upper,
                level=level,
                method="bootstrap",
                degenerate=degenerate,
                note=note,
            )
        )
    return intervals


def bootstrap_ci(data: Sequence[float], fitter: Fitter, cfg: BootstrapConfig) -> BootstrapResult:
    """Refit `cfg.replicates` with-replacement resamples and read percentile intervals.

    Replicate b draws from RngStream(cfg.seed, b), so the result does not
    depend on `cfg.workers`. Failed or non-converged refits are excluded.
    """
    values = np.asarray(data, dtype=float).ravel()
    if values.size == 0:
        raise InsufficientDataError("cannot bootstrap an empty sample")
    point = fitter(values)

    logger.info(f"Running {cfg.replicates} bootstrap replicates on {cfg.workers} worker(s)")
    results = ordered_map(_Replicate(values, fitter, cfg.seed), range(cfg.replicates), cfg.workers)
    succeeded = [r for r in results if r is not None]
    failures = cfg.replicates - len(succeeded)
    if failures > cfg.max_failure_rate * cfg.replicates:
        raise BootstrapFailureError(failures, cfg.replicates, cfg.max_failure_rate)
    if failures:
        logger.warning(f"{failures} of {cfg.replicates} bootstrap replicates failed and were excluded")

    samples = {
        name: [r.estimates()[name] for r in succeeded] for name in point.free_parameters()
    }
    return BootstrapResult(
        point=point,
        level=cfg.level,
        replicates=cfg.replicates,
        failures=failures,
        intervals=percentile_intervals(point, samples, cfg.level),
        samples=samples,
    )
