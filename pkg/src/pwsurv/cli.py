"""Command-line front end.

Subcommands: ``fit`` (per-cohort maximum likelihood), ``simulate`` (draw a
synthetic cohort), ``km`` (product-limit curves, optional model overlay),
``report`` (fits plus the cross-cohort summary table). Exit codes: 0 on
success, 1 on bad input or invalid options, 2 when a fit fails to converge.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .distributions import LatentCountParams, WeibullParams
from .inference import FitOptions, NoEventsError, SingularInformationError, fit_mle
from .models import ModelKind, ModelSpec
from .nonparametric import kaplan_meier, overlay_export
from .report import (
    CsvFormatError,
    build_summary_table,
    dumps_fit_reports,
    fit_report_dict,
    format_fit_report,
    format_summary_table,
    observed_unrecovered,
    read_events_csv,
    write_events_csv,
    write_overlay_csv,
)
from .simulation import SimConfig, simulate_cohort

_KINDS = {"zt": ModelKind.ZERO_TRUNCATED, "ptm": ModelKind.PROMOTION_TIME}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # exit code 2 is reserved for non-convergence; route usage errors to 1
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="pwsurv",
        description="Fit, simulate and report latent-count Weibull survival models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="fit each cohort in an event CSV")
    fit.add_argument("--input", required=True, help="event CSV (time,event,cohort)")
    fit.add_argument(
        "--model",
        choices=["zt", "ptm", "auto"],
        default="auto",
        help="model for every cohort; auto picks zt for fully observed cohorts",
    )
    fit.add_argument("--horizon", type=float, default=24.0, help="reporting horizon")
    fit.add_argument("--format", choices=["text", "json"], default="text")
    fit.add_argument("--max-iter", type=int, default=None, help="cap optimizer iterations")
    fit.add_argument("--out", default=None, help="write output here instead of stdout")

    sim = sub.add_parser("simulate", help="draw a synthetic cohort and write it as CSV")
    sim.add_argument("--model", choices=["zt", "ptm"], required=True)
    sim.add_argument("--theta", type=float, required=True, help="latent count intensity")
    sim.add_argument("--shape", type=float, required=True, help="Weibull shape")
    sim.add_argument("--scale", type=float, required=True, help="Weibull scale")
    sim.add_argument("--n", type=int, required=True, help="number of subjects")
    sim.add_argument(
        "--horizon",
        type=float,
        required=True,
        help="censoring horizon; 'inf' allowed for the zero-truncated model",
    )
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--cohort", default="sim", help="cohort label for the output rows")
    sim.add_argument("--out", required=True, help="destination CSV")

    km = sub.add_parser("km", help="product-limit curves per cohort as CSV")
    km.add_argument("--input", required=True)
    km.add_argument("--out", default=None, help="destination CSV (default stdout)")
    km.add_argument("--overlay-model", choices=["zt", "ptm"], default=None)
    km.add_argument("--overlay-theta", type=float, default=None)
    km.add_argument("--overlay-shape", type=float, default=None)
    km.add_argument("--overlay-scale", type=float, default=None)

    rep = sub.add_parser("report", help="per-cohort fits plus the summary table")
    rep.add_argument("--input", required=True)
    rep.add_argument(
        "--model",
        choices=["zt", "ptm", "auto"],
        default="auto",
        help="model for every cohort; auto picks zt for fully observed cohorts",
    )
    rep.add_argument("--horizon", type=float, default=24.0)
    rep.add_argument("--max-iter", type=int, default=None)
    rep.add_argument("--out", default=None)
    return parser


def _fit_options(args) -> FitOptions:
    if args.max_iter is None:
        return FitOptions()
    if args.max_iter < 0:
        raise ValueError("--max-iter must be nonnegative")
    return FitOptions(max_iterations=args.max_iter)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        print(text)
    else:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")


def _cmd_fit(args) -> int:
    kind = None if args.model == "auto" else _KINDS[args.model]
    datasets = read_events_csv(args.input, kind=kind)
    options = _fit_options(args)
    blocks = []
    reports = []
    all_converged = True
    for ds in datasets:
        fit = fit_mle(ds.records, ds.kind, options)
        all_converged = all_converged and fit.converged
        if args.format == "json":
            reports.append(fit_report_dict(ds.cohort, fit, args.horizon))
        else:
            blocks.append(format_fit_report(ds.cohort, fit, args.horizon))
    if args.format == "json":
        _emit(dumps_fit_reports(reports), args.out)
    else:
        _emit("\n\n".join(blocks), args.out)
    return 0 if all_converged else 2


def _cmd_simulate(args) -> int:
    model = ModelSpec(
        kind=_KINDS[args.model],
        theta=LatentCountParams(args.theta),
        weibull=WeibullParams(shape=args.shape, scale=args.scale),
    )
    config = SimConfig(model=model, n=args.n, horizon=args.horizon, seed=args.seed)
    records = simulate_cohort(config, cohort=args.cohort)
    write_events_csv(records, args.out)
    return 0


def _cmd_km(args) -> int:
    overlay_args = (args.overlay_model, args.overlay_theta, args.overlay_shape, args.overlay_scale)
    want_overlay = any(v is not None for v in overlay_args)
    if want_overlay and any(v is None for v in overlay_args):
        raise ValueError("overlay needs --overlay-model, --overlay-theta, --overlay-shape and --overlay-scale")
    model = None
    if want_overlay:
        model = ModelSpec(
            kind=_KINDS[args.overlay_model],
            theta=LatentCountParams(args.overlay_theta),
            weibull=WeibullParams(shape=args.overlay_shape, scale=args.overlay_scale),
        )
    datasets = read_events_csv(args.input)
    rows_by_cohort = {}
    for ds in datasets:
        curve = kaplan_meier(ds.records)
        grid = np.concatenate(([0.0], curve.times))
        if model is None:
            km_vals = curve.survival_at(grid)
            rows_by_cohort[ds.cohort] = [(float(t), float(s)) for t, s in zip(grid, km_vals)]
        else:
            rows_by_cohort[ds.cohort] = overlay_export(curve, model, grid)
    if args.out is None:
        write_overlay_csv(rows_by_cohort, sys.stdout, with_model=model is not None)
        return 0
    write_overlay_csv(rows_by_cohort, args.out, with_model=model is not None)
    return 0


def _cmd_report(args) -> int:
    kind = None if args.model == "auto" else _KINDS[args.model]
    datasets = read_events_csv(args.input, kind=kind)
    options = _fit_options(args)
    fits = {}
    observed = {}
    blocks = []
    for ds in datasets:
        fit = fit_mle(ds.records, ds.kind, options)
        fits[ds.cohort] = fit
        if ds.kind is ModelKind.PROMOTION_TIME:
            observed[ds.cohort] = observed_unrecovered(ds.records, args.horizon)
        blocks.append(format_fit_report(ds.cohort, fit, args.horizon))
    rows = build_summary_table(fits, args.horizon, observed)
    text = "\n\n".join(blocks) + "\n\n" + format_summary_table(rows)
    _emit(text, args.out)
    return 0 if all(f.converged for f in fits.values()) else 2


def main(argv=None) -> int:
    parser = _build_parser()
    handlers = {
        "fit": _cmd_fit,
        "simulate": _cmd_simulate,
        "km": _cmd_km,
        "report": _cmd_report,
    }
    try:
        args = parser.parse_args(argv)
        return handlers[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (CsvFormatError, NoEventsError, SingularInformationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
