"""Command-line interface.

Subcommands:

* ``fit-bands``        estimate + one simultaneous band from a survival CSV
* ``coverage``         Monte Carlo coverage table over (alpha, y0, method)
* ``bridge-quantile``  weighted Brownian-bridge sup quantile

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical or
degenerate error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import bands as bands_mod
from . import io as io_mod
from .bands import BandSettings
from .bridge import DEFAULT_GRID, DEFAULT_PATHS, brownian_bridge_sup_quantile
from .errors import (
    DataFormatError,
    DomainError,
    HazbandError,
    InvalidInputError,
)
from .process import from_censored_sample, nelson_aalen
from .simulation import (
    ALPHA_ORDER,
    METHOD_ORDER,
    ExperimentConfig,
    coverage_experiment,
)
from .stepfun import TimeInterval


class UsageError(HazbandError):
    """Bad flags or flag combinations."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="hazband", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit-bands", help="band from a survival-data CSV")
    fit.add_argument("--data", required=True, help="CSV with header time,status")
    fit.add_argument("--method", required=True, choices=bands_mod.METHODS)
    fit.add_argument("--theta", type=float, default=0.05)
    fit.add_argument("--s-start", type=float, required=True)
    fit.add_argument("--s-end", type=float, required=True)
    fit.add_argument("--resamples", type=int, default=None)
    fit.add_argument("--paths", type=int, default=None)
    fit.add_argument("--grid", type=int, default=None)
    fit.add_argument("--seed", type=int, default=0)
    fit.add_argument("--out", required=True)
    fit.add_argument("--plot", default=None, help="also render the band to this file")

    cov = sub.add_parser("coverage", help="Monte Carlo coverage experiment")
    cov.add_argument("--config", default=None, help="key = value defaults file")
    cov.add_argument("--alphas", default=None, help="comma list, e.g. alpha1,alpha4")
    cov.add_argument("--y0", default=None, help="comma list, e.g. 25,50,75")
    cov.add_argument("--methods", default=None, help="comma list, e.g. HW,EP,B1,B2")
    cov.add_argument("--iterations", type=int, default=None)
    cov.add_argument("--resamples", type=int, default=None)
    cov.add_argument("--theta", type=float, default=None)
    cov.add_argument("--s-start", type=float, default=None)
    cov.add_argument("--s-end", type=float, default=None)
    cov.add_argument("--seed", type=int, default=None)
    cov.add_argument("--threads", default=None, help="worker count or 'auto'")
    cov.add_argument("--out", required=True)
    cov.add_argument("--plot", default=None, help="also render coverage to this file")

    brq = sub.add_parser("bridge-quantile", help="bridge sup quantile")
    brq.add_argument("--weight", required=True, choices=["hw", "ep"])
    brq.add_argument("--c1", type=float, required=True)
    brq.add_argument("--c2", type=float, required=True)
    brq.add_argument("--theta", type=float, default=0.05)
    brq.add_argument("--paths", type=int, default=DEFAULT_PATHS)
    brq.add_argument("--grid", type=int, default=DEFAULT_GRID)
    brq.add_argument("--seed", type=int, default=0)
    return parser


def _check_theta(theta: float):
    if not 0.0 < theta < 1.0:
        raise UsageError(f"theta must be in (0, 1), got {theta}")


def _check_seed(seed: int):
    if seed < 0 or seed >= 2**64:
        raise UsageError("seed must fit in an unsigned 64-bit integer")


def _cmd_fit_bands(args) -> int:
    _check_theta(args.theta)
    _check_seed(args.seed)
    if args.s_start < 0 or args.s_start >= args.s_end:
        raise UsageError("need 0 <= s-start < s-end")
    is_bootstrap = args.method in bands_mod.BOOTSTRAP_METHODS
    if not is_bootstrap and args.resamples is not None:
        raise UsageError(f"--resamples does not apply to method {args.method}")
    if is_bootstrap and (args.paths is not None or args.grid is not None):
        raise UsageError(f"--paths/--grid do not apply to method {args.method}")
    if is_bootstrap and args.resamples is not None and args.resamples < 1:
        raise UsageError("--resamples must be positive")

    try:
        with open(args.data, encoding="utf-8") as fh:
            times, observed = io_mod.parse_survival_csv(fh)
    except OSError as exc:
        raise DataFormatError(f"cannot read {args.data}: {exc}") from exc
    events, risk = from_censored_sample(times, observed)
    estimate = nelson_aalen(events, risk)

    settings = BandSettings(
        method=args.method,
        theta=args.theta,
        s=TimeInterval(args.s_start, args.s_end),
        b_resamples=args.resamples if args.resamples is not None else 200,
        bridge_paths=args.paths if args.paths is not None else DEFAULT_PATHS,
        bridge_grid=args.grid if args.grid is not None else DEFAULT_GRID,
    )
    rng = np.random.default_rng(args.seed)
    if is_bootstrap:
        band = bands_mod.bootstrap_band(estimate, events, risk, settings, rng)
    elif args.method in bands_mod.ASYMPTOTIC_METHODS:
        band = bands_mod.asymptotic_band(estimate, settings, rng)
    else:
        band = bands_mod.transformed_band(estimate, settings, rng)

    io_mod.write_band_csv(args.out, band, estimate, args.seed)
    crit = ", ".join(f"{c:.6g}" for c in band.critical_values)
    print(
        f"{args.method} band on [{args.s_start:g}, {args.s_end:g}] "
        f"theta={args.theta:g} seed={args.seed}"
    )
    print(f"records={times.size} events={int(observed.sum())} "
          f"censored={int((~observed).sum())}")
    print(f"critical values: {crit}")
    print(f"wrote {args.out}")
    if args.plot:
        from . import plotting

        x, a_hat, lower, upper = io_mod.band_export_points(band, estimate)
        plotting.plot_band(x, a_hat, lower, upper, band.method, band.theta, args.plot)
        print(f"wrote {args.plot}")
    return 0


def _resolve_threads(value) -> int:
    if value is None:
        value = os.environ.get("HBL_THREADS", "1")
    if isinstance(value, str) and value.strip().lower() == "auto":
        return max(1, os.cpu_count() or 1)
    try:
        threads = int(value)
    except (TypeError, ValueError):
        raise UsageError(f"--threads must be an integer or 'auto', got {value!r}")
    if threads < 1:
        raise UsageError("--threads must be at least 1")
    return threads


def _merged(args, file_cfg: dict, key: str, cast, default):
    cli_value = getattr(args, key.replace("-", "_"), None)
    if cli_value is not None:
        return cli_value
    if key in file_cfg:
        try:
            return cast(file_cfg[key])
        except ValueError:
            raise UsageError(f"bad config value for {key}: {file_cfg[key]!r}")
    return default


def _split_list(value) -> tuple:
    if isinstance(value, (tuple, list)):
        return tuple(value)
    return tuple(part.strip() for part in str(value).split(",") if part.strip())


def _cmd_coverage(args) -> int:
    file_cfg = io_mod.read_config_file(args.config) if args.config else {}
    alphas = _split_list(_merged(args, file_cfg, "alphas", str, ",".join(ALPHA_ORDER)))
    y0s = _split_list(_merged(args, file_cfg, "y0", str, "25,50,75"))
    methods = _split_list(_merged(args, file_cfg, "methods", str, "HW,EP,B1,B2"))
    iterations = _merged(args, file_cfg, "iterations", int, 10_000)
    resamples = _merged(args, file_cfg, "resamples", int, 200)
    theta = _merged(args, file_cfg, "theta", float, 0.05)
    s_start = _merged(args, file_cfg, "s_start", float, 0.2)
    s_end = _merged(args, file_cfg, "s_end", float, 0.8)
    seed = _merged(args, file_cfg, "seed", int, 0)
    termination_mean = _merged(args, file_cfg, "termination_mean", float, 4.0)
    threads = _resolve_threads(_merged(args, file_cfg, "threads", str, None))

    for name in alphas:
        if name not in ALPHA_ORDER:
            raise UsageError(f"unknown intensity {name!r}")
    for method in methods:
        if method not in METHOD_ORDER:
            raise UsageError(f"unknown method {method!r}")
    try:
        y0_values = tuple(int(y) for y in y0s)
    except ValueError:
        raise UsageError(f"bad --y0 list: {','.join(y0s)}")
    _check_theta(theta)
    _check_seed(seed)
    if iterations < 0:
        raise UsageError("--iterations must be nonnegative")
    if resamples < 1:
        raise UsageError("--resamples must be positive")

    config = ExperimentConfig(
        alphas=alphas,
        y0_values=y0_values,
        methods=methods,
        iterations=iterations,
        b_resamples=resamples,
        theta=theta,
        s=TimeInterval(s_start, s_end),
        termination_mean=termination_mean,
        master_seed=seed,
    )
    table = coverage_experiment(config, threads=threads)
    io_mod.write_coverage_csv(args.out, table, config)
    print(
        f"coverage table: {len(table.rows)} cells x {iterations} iterations, "
        f"seed={seed}, threads={threads}"
    )
    print(f"wrote {args.out}")
    if args.plot:
        from . import plotting

        plotting.plot_coverage(table, theta, args.plot)
        print(f"wrote {args.plot}")
    return 0


def _cmd_bridge_quantile(args) -> int:
    _check_theta(args.theta)
    _check_seed(args.seed)
    if not 0.0 <= args.c1 <= args.c2 <= 1.0:
        raise UsageError("need 0 <= c1 <= c2 <= 1")
    if args.weight == "ep" and (args.c1 <= 0.0 or args.c2 >= 1.0):
        raise UsageError("equal-precision weight needs 0 < c1 and c2 < 1")
    if args.paths < 1000:
        raise UsageError("--paths must be at least 1000")
    if args.grid < 100:
        raise UsageError("--grid must be at least 100")
    k = brownian_bridge_sup_quantile(
        args.weight,
        args.c1,
        args.c2,
        args.theta,
        paths=args.paths,
        grid=args.grid,
        rng=np.random.default_rng(args.seed),
    )
    print(
        f"# weight = {args.weight}, c1 = {args.c1:g}, c2 = {args.c2:g}, "
        f"theta = {args.theta:g}, paths = {args.paths}, grid = {args.grid}, "
        f"seed = {args.seed}"
    )
    print(f"{k:.4f}")
    return 0


_HANDLERS = {
    "fit-bands": _cmd_fit_bands,
    "coverage": _cmd_coverage,
    "bridge-quantile": _cmd_bridge_quantile,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _HANDLERS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataFormatError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except (InvalidInputError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
