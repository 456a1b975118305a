"""Dataset ingestion, per-cohort fit orchestration, and table formatting.

Input CSV schema: header ``time,event,cohort``; time a positive decimal in
the user's time unit, event 0 or 1, cohort an opaque label. Output tables
mirror the two report formats: per-parameter Wald summaries and the
cross-cohort metric summary (latent default intensity, recovery intensity,
observed and model LGD at the horizon).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Mapping

from .distributions import zt_poisson_mean
from .events import EventRecord
from .inference import FitResult, wald_summary
from .models import ModelKind, cure_fraction, elgd_at_horizon
from .nonparametric import kaplan_meier

__all__ = [
    "CohortDataset",
    "CsvFormatError",
    "SummaryRow",
    "read_events_csv",
    "write_events_csv",
    "build_summary_table",
    "observed_unrecovered",
    "format_summary_table",
    "format_fit_report",
    "fit_report_dict",
    "write_overlay_csv",
]

_HEADER = ["time", "event", "cohort"]


class CsvFormatError(ValueError):
    """Malformed event CSV; the message names the offending line."""


@dataclass(frozen=True)
class CohortDataset:
    """One cohort's records plus the model kind chosen for fitting."""

    cohort: str
    records: list[EventRecord]
    kind: ModelKind


def _open_text(source) -> tuple[IO[str], bool]:
    if isinstance(source, (str, Path)):
        return open(source, "r", encoding="utf-8", newline=""), True
    if isinstance(source, (io.RawIOBase, io.BufferedIOBase)) or (
        hasattr(source, "read") and isinstance(source.read(0), bytes)
    ):
        return io.TextIOWrapper(source, encoding="utf-8", newline=""), False
    return source, False


def read_events_csv(source, kind: ModelKind | None = None) -> list[CohortDataset]:
    """Parse an event CSV into per-cohort datasets, in first-appearance order.

    ``source`` may be a path or an open text/byte stream. When ``kind`` is
    None the model kind is inferred per cohort: fully observed cohorts get
    the zero-truncated model, cohorts with censoring the promotion-time
    model. Malformed input raises CsvFormatError naming the line.
    """
    stream, owned = _open_text(source)
    try:
        reader = csv.reader(stream)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != _HEADER:
            raise CsvFormatError(
                f"line 1: missing or invalid header, expected {','.join(_HEADER)}"
            )
        grouped: dict[str, list[EventRecord]] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise CsvFormatError(f"line {lineno}: expected 3 fields, got {len(row)}")
            raw_time, raw_event, cohort = row
            try:
                time = float(raw_time)
            except ValueError:
                raise CsvFormatError(
                    f"line {lineno}: non-numeric time {raw_time!r}"
                ) from None
            if not time > 0.0:
                raise CsvFormatError(f"line {lineno}: time must be positive, got {raw_time}")
            if raw_event.strip() not in ("0", "1"):
                raise CsvFormatError(
                    f"line {lineno}: event flag must be 0 or 1, got {raw_event!r}"
                )
            grouped.setdefault(cohort, []).append(
                EventRecord(time=time, event=int(raw_event), cohort=cohort)
            )
    finally:
        if owned:
            stream.close()

    datasets = []
    for cohort, records in grouped.items():
        if kind is not None:
            chosen = kind
        elif all(r.event == 1 for r in records):
            chosen = ModelKind.ZERO_TRUNCATED
        else:
            chosen = ModelKind.PROMOTION_TIME
        datasets.append(CohortDataset(cohort=cohort, records=records, kind=chosen))
    return datasets


def write_events_csv(records: Iterable[EventRecord], dest) -> None:
    """Write records in the input CSV schema; times keep 17 significant digits."""
    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8", newline="") as handle:
            write_events_csv(records, handle)
        return
    writer = csv.writer(dest)
    writer.writerow(_HEADER)
    for r in records:
        writer.writerow([f"{r.time:.17g}", r.event, r.cohort])


@dataclass(frozen=True)
class SummaryRow:
    """One cohort line of the cross-cohort summary; absent metrics are None."""

    cohort: str
    theta_default: float | None
    theta_recovery: float | None
    observed_lgd_pct: float | None
    elgd_pct: float | None
    converged: bool


def observed_unrecovered(records: Iterable[EventRecord], horizon: float) -> float:
    """Empirical fraction still unrecovered at the horizon (KM estimate)."""
    return kaplan_meier(records).survival_at(horizon)


def build_summary_table(
    fits: Mapping[str, FitResult],
    horizon: float,
    observed: Mapping[str, float] | None = None,
) -> list[SummaryRow]:
    """Cross-cohort summary rows, sorted by cohort label.

    Zero-truncated fits report the truncated latent mean in the default
    column; promotion-time fits report the raw intensity in the recovery
    column and 100x the model unrecovered probability at the horizon in the
    ELGD% column. Unconverged fits keep their row but are flagged.
    """
    observed = observed or {}
    rows = []
    for cohort in sorted(fits):
        fit = fits[cohort]
        theta_hat = fit.model.theta.theta
        if fit.model.kind is ModelKind.ZERO_TRUNCATED:
            row = SummaryRow(
                cohort=cohort,
                theta_default=zt_poisson_mean(theta_hat),
                theta_recovery=None,
                observed_lgd_pct=None,
                elgd_pct=None,
                converged=fit.converged,
            )
        else:
            obs = observed.get(cohort)
            row = SummaryRow(
                cohort=cohort,
                theta_default=None,
                theta_recovery=theta_hat,
                observed_lgd_pct=None if obs is None else 100.0 * obs,
                elgd_pct=100.0 * elgd_at_horizon(fit.model, horizon),
                converged=fit.converged,
            )
        rows.append(row)
    return rows


def format_summary_table(rows: Iterable[SummaryRow]) -> str:
    """Aligned text rendering of the cross-cohort summary."""
    header = ["cohort", "theta-default", "theta-recovery", "observed LGD%", "ELGD%", "fit"]
    body = []
    for r in rows:
        body.append(
            [
                r.cohort,
                _cell(r.theta_default),
                _cell(r.theta_recovery),
                _cell(r.observed_lgd_pct, "{:.3f}"),
                _cell(r.elgd_pct, "{:.3f}"),
                "ok" if r.converged else "NOT CONVERGED",
            ]
        )
    widths = [max(len(row[i]) for row in [header] + body) for i in range(len(header))]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    for row in body:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)))
    return "\n".join(lines)


def _cell(value: float | None, fmt: str = "{:.4f}") -> str:
    return "" if value is None else fmt.format(value)


def format_fit_report(cohort: str, fit: FitResult, horizon: float) -> str:
    """Appendix-style text block for one cohort fit."""
    lines = [f"cohort {cohort} [{fit.model.kind.value}]"]
    if fit.converged:
        lines.append(
            f"  {'parameter':<10} {'estimate':>12} {'SE':>10} {'LI':>12} {'UI':>12} {'p-value':>9}"
        )
        for row in wald_summary(fit):
            lines.append(
                f"  {row.parameter:<10} {row.estimate:>12.4f} {row.se:>10.4f}"
                f" {row.ci_low:>12.4f} {row.ci_high:>12.4f} {row.p_text:>9}"
            )
    else:
        theta, shape, scale = fit.model.params()
        lines.append(
            "  NOT CONVERGED "
            f"(last point theta={theta:.4g} shape={shape:.4g} scale={scale:.4g}, "
            f"gradient norm {fit.gradient_norm:.3g} after {fit.iterations} iterations)"
        )
    lines.append(f"  log-likelihood {fit.loglik:.4f}")
    if fit.model.kind is ModelKind.ZERO_TRUNCATED:
        lines.append(f"  expected latent causes (truncated mean) {zt_poisson_mean(fit.model.theta.theta):.4f}")
    else:
        lines.append(f"  cure fraction {cure_fraction(fit.model):.4f}")
        lines.append(f"  ELGD at horizon {horizon:g}: {100.0 * elgd_at_horizon(fit.model, horizon):.3f}%")
    return "\n".join(lines)


def fit_report_dict(cohort: str, fit: FitResult, horizon: float) -> dict:
    """Machine-readable fit summary, mirrors format_fit_report."""
    theta, shape, scale = fit.model.params()
    out = {
        "cohort": cohort,
        "model": fit.model.kind.value,
        "estimates": {"theta": theta, "shape": shape, "scale": scale},
        "loglik": fit.loglik,
        "converged": fit.converged,
        "iterations": fit.iterations,
        "gradient_norm": fit.gradient_norm,
    }
    if fit.converged:
        out["parameters"] = [
            {
                "parameter": row.parameter,
                "estimate": row.estimate,
                "se": row.se,
                "ci_low": row.ci_low,
                "ci_high": row.ci_high,
                "p_value": row.p_value,
                "p_text": row.p_text,
            }
            for row in wald_summary(fit)
        ]
    if fit.model.kind is ModelKind.ZERO_TRUNCATED:
        out["latent_mean"] = zt_poisson_mean(theta)
    else:
        out["cure_fraction"] = cure_fraction(fit.model)
        out["elgd_at_horizon"] = elgd_at_horizon(fit.model, horizon)
        out["horizon"] = horizon
    return out


def dumps_fit_reports(reports: list[dict]) -> str:
    """JSON document for a list of fit_report_dict outputs."""
    return json.dumps({"fits": reports}, indent=2, sort_keys=False)


def write_overlay_csv(rows_by_cohort: Mapping[str, list[tuple[float, float, float] | tuple[float, float]]], dest, with_model: bool) -> None:
    """KM / overlay rows as CSV: cohort,t,km[,model], cohorts sorted by label."""
    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8", newline="") as handle:
            write_overlay_csv(rows_by_cohort, handle, with_model)
        return
    writer = csv.writer(dest)
    writer.writerow(["cohort", "t", "km", "model"] if with_model else ["cohort", "t", "km"])
    for cohort in sorted(rows_by_cohort):
        for row in rows_by_cohort[cohort]:
            writer.writerow([cohort] + [f"{v:.17g}" for v in row])
