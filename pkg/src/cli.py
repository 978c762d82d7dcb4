"""Command-line front end.

Data goes to files or stdout; logs and the generated-seed notice go to stderr.
"""

import argparse
import json
import logging
import secrets
import sys
from functools import partial
from pathlib import Path

import numpy as np
import pandas as pd

from asymptotics import asymptotic_ci
from bootstrap import BootstrapConfig, BootstrapResult, bootstrap_ci
from config import settings
from data import (
    PRICE_COLUMNS,
    gaussian_kde_values,
    histogram_density,
    kde_boundary_corrected,
    load_ohlc_csv,
    log_returns,
    negative_abs_returns,
    write_density_csv,
)
from errors import InsufficientDataError, LinnikError
from estimators import fit
from models import Family, FitResult, GmlParams, make_params
from montecarlo import StudyConfig, run_study, table1_config, table2_config, write_study_csv
from sampling import RngStream, sample_family
from specfun import gml_cdf, gml_density

logger = logging.getLogger(__name__)

# stream reserved for the simulated overlay; bootstrap replicates use 0..B-1
OVERLAY_STREAM = 2**40
KDE_GRID_POINTS = 512


def _seed(args: argparse.Namespace) -> int:
    if args.seed is None:
        args.seed = secrets.randbits(63)
        print(f"seed: {args.seed}", file=sys.stderr)
    return args.seed


def _read_values(path: str) -> np.ndarray:
    try:
        column = pd.read_csv(path, header=None, comment="#", usecols=[0]).iloc[:, 0]
    except pd.errors.EmptyDataError:
        raise InsufficientDataError(f"{path} contains no values") from None
    values = pd.to_numeric(column, errors="raise").to_numpy(dtype=float)
    if values.size == 0:
        raise InsufficientDataError(f"{path} contains no values")
    return values


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
        logger.info(f"Wrote {out}")
    else:
        print(text)


def _fit_payload(result: FitResult) -> dict:
    payload = result.model_dump(mode="json")
    payload["estimates"] = result.estimates()
    return payload


def _bootstrap_payload(result: BootstrapResult) -> dict:
    return {
        "fit": _fit_payload(result.point),
        "replicates": result.replicates,
        "failures": result.failures,
        "intervals": [i.model_dump(mode="json") for i in result.intervals],
    }


def cmd_sample(args: argparse.Namespace) -> None:
    params = make_params(args.family, args.alpha, args.delta, args.mu)
    draws = sample_family(params, args.n, RngStream(seed=_seed(args)))
    np.savetxt(args.out, draws, fmt="%.17g")
    print(
        f"n={draws.size} min={draws.min():.6g} median={np.median(draws):.6g} "
        f"max={draws.max():.6g} -> {args.out}"
    )


def cmd_fit(args: argparse.Namespace) -> None:
    values = _read_values(args.input)
    if args.take_abs:
        values = np.abs(values)
    result = fit(args.family, args.nparams, values, args.multistart)
    _emit(_fit_payload(result), args.out)


def cmd_ci(args: argparse.Namespace) -> None:
    values = _read_values(args.input)
    if args.take_abs:
        values = np.abs(values)
    if args.method == "asymptotic":
        result = fit(args.family, args.nparams, values, args.multistart)
        intervals = asymptotic_ci(result, args.level)
        payload = {"fit": _fit_payload(result), "intervals": [i.model_dump(mode="json") for i in intervals]}
    else:
        cfg = BootstrapConfig(
            replicates=args.replicates or settings.bootstrap_replicates,
            level=args.level or settings.confidence_level,
            seed=_seed(args),
            workers=args.workers or settings.workers,
        )
        fitter = partial(fit, Family(args.family), args.nparams, multistart=args.multistart)
        payload = _bootstrap_payload(bootstrap_ci(values, fitter, cfg))
    _emit(payload, args.out)


def cmd_mc_study(args: argparse.Namespace) -> None:
    if args.config:
        cfg = StudyConfig.from_json(args.config)
    else:
        preset = table1_config if args.table == 1 else table2_config
        cfg = preset()
    overrides = {
        key: value
        for key, value in (
            ("replications", args.replications),
            ("sample_sizes", args.sample_sizes),
            ("seed", args.seed),
            ("workers", args.workers),
        )
        if value is not None
    }
    if overrides:
        cfg = StudyConfig.model_validate({**cfg.model_dump(), **overrides})
    rows = run_study(cfg)
    write_study_csv(rows, args.out)
    for row in rows:
        print(
            f"{row.family.value} alpha={row.alpha} delta={row.delta} mu={row.mu} n={row.n} "
            + " ".join(f"MB({k})={row.mb[k]:.4f} CV({k})={row.cv[k]:.4f}" for k in row.mb)
            + f" fail={row.fail_rate:.3f}"
        )


def _overlay(result: FitResult, data: np.ndarray, seed: int, path: Path, bandwidth: float | None) -> None:
    if not result.in_support:
        logger.warning(
            f"alpha-hat {result.alpha_hat:.4f} is outside the {result.family.value} support; "
            f"no simulated overlay for {path.name}"
        )
        return
    simulated = sample_family(result.params(), 2 * data.size, RngStream(seed=seed, stream_id=OVERLAY_STREAM))
    if result.family is Family.GML:
        grid = np.linspace(0.0, float(np.max(data)), KDE_GRID_POINTS)
        density = kde_boundary_corrected(simulated, grid, bandwidth=bandwidth)
    else:
        grid = np.linspace(float(np.min(data)), float(np.max(data)), KDE_GRID_POINTS)
        density = gaussian_kde_values(simulated, grid, bandwidth=bandwidth)
    write_density_csv(path, grid, density)


def cmd_analyze(args: argparse.Namespace) -> None:
    family = Family(args.family)
    side = args.side or ("negative-abs" if family is Family.GML else "full")
    table = load_ohlc_csv(args.input)
    returns = log_returns(table.prices(args.column), table.dates(), args.column)
    data = negative_abs_returns(returns) if side == "negative-abs" else returns.array()
    logger.info(f"{len(table)} records, {data.size} {side} returns from column {args.column}")

    seed = _seed(args)
    cfg = BootstrapConfig(
        replicates=args.replicates or settings.bootstrap_replicates,
        level=args.level or settings.confidence_level,
        seed=seed,
        workers=args.workers or settings.workers,
    )
    prefix = args.out_prefix
    centres, density = histogram_density(data, args.bins)
    write_density_csv(f"{prefix}_hist.csv", centres, density)

    report = {
        "input": str(args.input),
        "column": args.column,
        "side": side,
        "records": len(table),
        "dropped_rows": table.dropped,
        "n": int(data.size),
        "seed": seed,
    }
    fits = [("", args.nparams)]
    if args.with_two_param and args.nparams != 2:
        fits.append(("_two_param", 2))
    for suffix, nparams in fits:
        fitter = partial(fit, family, nparams, multistart=args.multistart)
        result = bootstrap_ci(data, fitter, cfg)
        report[f"fit{suffix}"] = _bootstrap_payload(result)
        _overlay(result.point, data, seed, Path(f"{prefix}_kde{suffix}.csv"), args.bandwidth)
    _emit(report, f"{prefix}_fit.json")


def cmd_kde(args: argparse.Namespace) -> None:
    values = _read_values(args.input)
    lo = 0.0 if args.boundary else float(np.min(values))
    grid = np.linspace(lo, float(np.max(values)), args.points)
    if args.boundary:
        density = kde_boundary_corrected(values, grid, bandwidth=args.bandwidth)
    else:
        density = gaussian_kde_values(values, grid, bandwidth=args.bandwidth)
    write_density_csv(args.out, grid, density)


def cmd_density(args: argparse.Namespace) -> None:
    params = GmlParams(alpha=args.alpha, delta=args.delta, mu=args.mu)
    grid = np.linspace(args.x_max / args.points, args.x_max, args.points)
    frame = pd.DataFrame(
        {
            "x": grid,
            "density": [gml_density(x, params) for x in grid],
            "cdf": [gml_cdf(x, params) for x in grid],
        }
    )
    frame.to_csv(args.out, index=False, lineterminator="\n")
    logger.info(f"Wrote {args.points} density points to {args.out}")


def _add_family(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--family", type=str, choices=[f.value for f in Family], required=True)


def _add_fit_options(parser: argparse.ArgumentParser) -> None:
    _add_family(parser)
    parser.add_argument("--nparams", type=int, choices=[2, 3], default=3)
    parser.add_argument("--input", type=str, required=True, help="One value per line")
    parser.add_argument("--take-abs", action="store_true", help="Fit |x| instead of x")
    parser.add_argument("--multistart", type=int, default=0, help="Extra quasi-random starts")
    parser.add_argument("--out", type=str, default=None, help="JSON output (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geostable",
        description="Generalized Linnik and Mittag-Leffler laws: simulation and log-moment estimation",
    )
    parser.add_argument("--log-level", type=str, default=None, help="Overrides LINNIK_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="Draw from gML or gL")
    _add_family(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", type=str, required=True)
    p.set_defaults(handler=cmd_sample)

    p = sub.add_parser("fit", help="Method-of-log-moments fit")
    _add_fit_options(p)
    p.set_defaults(handler=cmd_fit)

    p = sub.add_parser("ci", help="Confidence intervals for a fit")
    _add_fit_options(p)
    p.add_argument("--method", type=str, choices=["asymptotic", "bootstrap"], default="bootstrap")
    p.add_argument("--level", type=float, default=None)
    p.add_argument("--replicates", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(handler=cmd_ci)

    p = sub.add_parser("mc-study", help="Bias / CV simulation study")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", type=str, help="StudyConfig JSON file")
    source.add_argument("--table", type=int, choices=[1, 2], help="Preset: 1 = gML grid, 2 = gL grid")
    p.add_argument("--replications", type=int, default=None)
    p.add_argument("--sample-sizes", type=int, nargs="+", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", type=str, required=True, help="CSV output")
    p.set_defaults(handler=cmd_mc_study)

    p = sub.add_parser("analyze", help="Fit daily returns from an OHLC file")
    p.add_argument("--input", type=str, required=True, help="OHLC CSV")
    _add_family(p)
    p.add_argument("--nparams", type=int, choices=[2, 3], default=3)
    p.add_argument("--column", type=str, choices=list(PRICE_COLUMNS), default="adj_close")
    p.add_argument("--side", type=str, choices=["negative-abs", "full"], default=None)
    p.add_argument("--with-two-param", action="store_true", help="Also fit and bootstrap delta = 1")
    p.add_argument("--replicates", type=int, default=None)
    p.add_argument("--level", type=float, default=None)
    p.add_argument("--multistart", type=int, default=0)
    p.add_argument("--bandwidth", type=float, default=None)
    p.add_argument("--bins", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out-prefix", type=str, required=True)
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser("kde", help="Kernel density of a sample")
    p.add_argument("--input", type=str, required=True)
    p.add_argument("--bandwidth", type=float, default=None)
    p.add_argument("--points", type=int, default=KDE_GRID_POINTS)
    p.add_argument("--boundary", action="store_true", help="Reflect about 0 (non-negative data)")
    p.add_argument("--out", type=str, required=True)
    p.set_defaults(handler=cmd_kde)

    p = sub.add_parser("density", help="gML density and distribution function on a grid")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--x-max", type=float, required=True)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--out", type=str, required=True)
    p.set_defaults(handler=cmd_density)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=(args.log_level or settings.log_level).upper())
    try:
        args.handler(args)
    except (LinnikError, ValueError) as e:
        logger.error(str(e))
        return 1
    return 0


# Example usage:
# uv run main.py sample --family gml --alpha 0.7 --delta 0.5 --mu 1 --n 1000 --seed 7 --out draws.txt
# uv run main.py fit --family gml --nparams 3 --input draws.txt
# uv run main.py analyze --input sp500.csv --family gml --seed 1 --out-prefix sp500
