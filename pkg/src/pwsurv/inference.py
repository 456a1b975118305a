"""Maximum-likelihood fitting and Wald inference for both model kinds.

The likelihood is maximized over (theta, shape, scale) by Newton-Raphson in
log coordinates (which enforces positivity), with a finite-difference Hessian
built from the analytic score and a backtracking line search. Standard errors
come from the observed information, recomputed in the original
parameterization at the optimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .distributions import LatentCountParams, WeibullParams, log_expm1
from .events import EventRecord, to_arrays
from .models import ModelKind, ModelSpec
from .nonparametric import kaplan_meier

__all__ = [
    "EventRecord",
    "FitOptions",
    "FitResult",
    "NoEventsError",
    "SingularInformationError",
    "WaldRow",
    "PARAM_NAMES",
    "Z_95",
    "loglik_zt",
    "loglik_ptm",
    "fit_mle",
    "wald_summary",
    "format_p_value",
]

PARAM_NAMES = ("theta", "shape", "scale")

# Two-sided 95% normal quantile used for all confidence intervals.
Z_95 = 1.95996


class NoEventsError(ValueError):
    """Raised when a promotion-time fit is attempted on fully censored data."""


class SingularInformationError(RuntimeError):
    """Raised when the observed information matrix cannot be inverted."""


@dataclass(frozen=True)
class FitOptions:
    """Optimizer settings for fit_mle."""

    gradient_tol: float = 1e-8
    max_iterations: int = 200
    max_halvings: int = 40
    information_step: float = 1e-5
    initial: tuple[float, float, float] | None = None


@dataclass(frozen=True, eq=False)
class FitResult:
    """Point estimates with Wald statistics and convergence diagnostics.

    Per-parameter arrays are ordered (theta, shape, scale), see PARAM_NAMES.
    When the optimizer did not converge the Wald fields are NaN.
    """

    model: ModelSpec
    se: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray
    p_value: np.ndarray
    loglik: float
    converged: bool
    iterations: int
    gradient_norm: float
    cov: np.ndarray | None = None
    objective_trace: tuple[float, ...] = field(default=(), repr=False)

    @property
    def estimates(self) -> np.ndarray:
        return np.array(self.model.params())


# --- log-likelihoods and analytic scores ---------------------------------
#
# Shared quantities per observation, writing z = t/scale:
#   w = z^shape, S = exp(-w), F = 1 - S
#   log f = log(shape) - log(scale) + (shape - 1) log z - w

def _weibull_terms(times: np.ndarray, shape: float, scale: float):
    logz = np.log(times / scale)
    w = np.exp(shape * logz)
    surv = np.exp(-w)
    return logz, w, surv


def _zt_loglik(times: np.ndarray, theta: float, shape: float, scale: float) -> float:
    logz, w, surv = _weibull_terms(times, shape, scale)
    logf = np.log(shape) - np.log(scale) + (shape - 1.0) * logz - w
    return float(np.sum(np.log(theta) + theta * surv - log_expm1(theta) + logf))


def _zt_score(times: np.ndarray, theta: float, shape: float, scale: float) -> np.ndarray:
    logz, w, surv = _weibull_terms(times, shape, scale)
    n = times.size
    d_theta = n * (1.0 / theta - 1.0 / -np.expm1(-theta)) + np.sum(surv)
    d_shape = np.sum(1.0 / shape + logz * (1.0 - w - theta * surv * w))
    d_scale = np.sum((shape / scale) * (w - 1.0 + theta * surv * w))
    return np.array([d_theta, d_shape, d_scale])


def _ptm_loglik(
    times: np.ndarray, flags: np.ndarray, theta: float, shape: float, scale: float
) -> float:
    logz, w, surv = _weibull_terms(times, shape, scale)
    logf = np.log(shape) - np.log(scale) + (shape - 1.0) * logz - w
    cdf = -np.expm1(-w)
    return float(np.sum(flags * (np.log(theta) + logf) - theta * cdf))


def _ptm_score(
    times: np.ndarray, flags: np.ndarray, theta: float, shape: float, scale: float
) -> np.ndarray:
    logz, w, surv = _weibull_terms(times, shape, scale)
    cdf = -np.expm1(-w)
    d_theta = np.sum(flags / theta - cdf)
    d_shape = np.sum(flags * (1.0 / shape + logz * (1.0 - w)) - theta * surv * w * logz)
    d_scale = np.sum(flags * (shape / scale) * (w - 1.0) + theta * surv * w * shape / scale)
    return np.array([d_theta, d_shape, d_scale])


def _validate_zt_data(times: np.ndarray, flags: np.ndarray) -> None:
    if times.size == 0:
        raise ValueError("dataset is empty")
    if np.any(flags == 0):
        raise ValueError(
            "the zero-truncated model applies to fully observed data; "
            "censored records are not allowed"
        )


def _validate_ptm_data(times: np.ndarray, flags: np.ndarray) -> None:
    if times.size == 0:
        raise ValueError("dataset is empty")
    if not np.any(flags == 1):
        raise NoEventsError(
            "no events in the dataset; the promotion-time intensity is not identifiable"
        )


def loglik_zt(data: Iterable[EventRecord], m: ModelSpec) -> float:
    """Log-likelihood of fully observed data under the zero-truncated model.

    Every record must have event = 1; censored records are rejected.
    """
    if m.kind is not ModelKind.ZERO_TRUNCATED:
        raise ValueError("loglik_zt requires a zero-truncated ModelSpec")
    times, flags = to_arrays(data)
    _validate_zt_data(times, flags)
    return _zt_loglik(times, *m.params())


def loglik_ptm(data: Iterable[EventRecord], m: ModelSpec) -> float:
    """Censored log-likelihood under the promotion-time model.

    Events contribute log density, censored records log survival.
    """
    if m.kind is not ModelKind.PROMOTION_TIME:
        raise ValueError("loglik_ptm requires a promotion-time ModelSpec")
    times, flags = to_arrays(data)
    if times.size == 0:
        raise ValueError("dataset is empty")
    return _ptm_loglik(times, flags, *m.params())


# --- optimizer -------------------------------------------------------------

def _km_weibull_init(data: Sequence[EventRecord]) -> tuple[float, float]:
    """Starting shape/scale from a least-squares Weibull plot of the KM curve.

    Regresses log(-log S(t)) on log t over event times with 0 < S < 1; falls
    back to shape 1 and the mean time when the regression is degenerate.
    """
    times, _ = to_arrays(data)
    curve = kaplan_meier(data)
    keep = (curve.survival > 0.0) & (curve.survival < 1.0)
    t = curve.times[keep]
    s = curve.survival[keep]
    if t.size >= 2:
        x = np.log(t)
        y = np.log(-np.log(s))
        slope, intercept = np.polyfit(x, y, 1)
        if np.isfinite(slope) and slope > 0.0:
            scale = float(np.exp(-intercept / slope))
            if np.isfinite(scale) and scale > 0.0:
                return float(slope), scale
    return 1.0, float(np.mean(times))


def _ptm_weibull_init(data: Sequence[EventRecord]) -> tuple[float, float]:
    """Starting shape/scale for the promotion-time fit.

    Under that model -ln S_KM(t) estimates theta*F(t), so the KM plot
    plateaus instead of diverging; rescaling by its terminal value recovers
    the shape of the base CDF, which then feeds the usual Weibull plot.
    """
    curve = kaplan_meier(data)
    keep = curve.survival > 0.0
    cum = -np.log(curve.survival[keep])
    t = curve.times[keep]
    if t.size >= 2 and cum[-1] > 0.0:
        frac = cum / cum[-1]
        mid = (frac > 0.01) & (frac < 0.99)
        if np.count_nonzero(mid) >= 2:
            x = np.log(t[mid])
            y = np.log(-np.log1p(-frac[mid]))
            slope, intercept = np.polyfit(x, y, 1)
            if np.isfinite(slope) and slope > 0.0:
                scale = float(np.exp(-intercept / slope))
                if np.isfinite(scale) and scale > 0.0:
                    return float(slope), scale
    return _km_weibull_init(data)


def _initial_params(
    data: Sequence[EventRecord], kind: ModelKind, times: np.ndarray, flags: np.ndarray
) -> np.ndarray:
    if kind is ModelKind.ZERO_TRUNCATED:
        shape0, scale0 = _km_weibull_init(data)
        theta0 = 1.0
    else:
        shape0, scale0 = _ptm_weibull_init(data)
        # profile value: d loglik / d theta = 0 at theta = events / sum F(t_i)
        cdf_sum = float(np.sum(-np.expm1(-((times / scale0) ** shape0))))
        if cdf_sum > 0.0:
            theta0 = float(np.sum(flags)) / cdf_sum
        else:
            theta0 = -math.log(max(0.01, 1.0 - float(np.mean(flags))))
        theta0 = min(max(theta0, 1e-3), 1e3)
    return np.array([theta0, shape0, scale0])


def _fd_hessian(score, x: np.ndarray, step_scale: float) -> np.ndarray:
    """Central finite differences of a score function, symmetrized."""
    k = x.size
    h_mat = np.empty((k, k))
    for j in range(k):
        h = step_scale * max(1.0, abs(x[j]))
        xp = x.copy()
        xm = x.copy()
        xp[j] += h
        xm[j] -= h
        h_mat[:, j] = (score(xp) - score(xm)) / (2.0 * h)
    return 0.5 * (h_mat + h_mat.T)


def _damped_newton_direction(hess: np.ndarray, g: np.ndarray) -> np.ndarray | None:
    """Ascent direction when the Hessian is not negative definite.

    Ridge damping: solve (H - lam*I) d = -g with lam grown until the shifted
    matrix is negative definite. Keeps curvature scaling in the concave
    directions instead of collapsing to a raw gradient step, which crawls
    on ridge-shaped likelihoods.
    """
    eye = np.eye(g.size)
    lam = 1e-3 * max(1.0, float(np.max(np.abs(np.diag(hess)))))
    for _ in range(60):
        shifted = hess - lam * eye
        try:
            np.linalg.cholesky(-shifted)
            return np.linalg.solve(shifted, -g)
        except np.linalg.LinAlgError:
            lam *= 4.0
    return None


def _newton_maximize(loglik, score, u0: np.ndarray, opts: FitOptions):
    """Maximize loglik(u) over unconstrained u; returns (u, trace, diagnostics)."""
    u = u0.copy()
    ll = loglik(u)
    if not np.isfinite(ll):
        raise ValueError("log-likelihood is not finite at the starting point")
    trace = [ll]
    iterations = 0
    converged = False

    while True:
        g = score(u)
        gnorm = float(np.max(np.abs(g)))
        if gnorm < opts.gradient_tol:
            converged = True
            break
        if iterations >= opts.max_iterations:
            break

        hess = _fd_hessian(score, u, opts.information_step)
        direction = None
        if np.all(np.isfinite(hess)):
            try:
                np.linalg.cholesky(-hess)
                direction = np.linalg.solve(hess, -g)
            except np.linalg.LinAlgError:
                direction = _damped_newton_direction(hess, g)
        if direction is None:
            direction = g / gnorm

        slope = float(g @ direction)
        # Objective changes this small are below float summation noise; accept
        # the step on the gradient criterion alone.
        noise = 1e-9 * (1.0 + abs(ll))
        alpha = 1.0
        accepted = False
        for _ in range(opts.max_halvings):
            u_try = u + alpha * direction
            ll_try = loglik(u_try)
            if np.isfinite(ll_try) and (
                ll_try >= ll or (alpha * slope <= noise and ll_try >= ll - noise)
            ):
                u, ll = u_try, ll_try
                trace.append(ll)
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            break
        iterations += 1

    return u, ll, tuple(trace), converged, iterations, gnorm


def _name_singular_parameter(info: np.ndarray) -> str:
    diag = np.diag(info)
    bad = ~np.isfinite(diag)
    if np.any(bad):
        return PARAM_NAMES[int(np.argmax(bad))]
    if np.any(diag <= 0.0):
        return PARAM_NAMES[int(np.argmin(diag))]
    # Direction of (near) zero curvature: dominant component of the smallest
    # eigenvalue's eigenvector.
    _, vecs = np.linalg.eigh(info)
    return PARAM_NAMES[int(np.argmax(np.abs(vecs[:, 0])))]


def _wald_from_information(info: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Covariance and standard errors from the observed information matrix."""
    if not np.all(np.isfinite(info)):
        raise SingularInformationError(
            f"observed information is not finite for parameter "
            f"'{_name_singular_parameter(info)}'"
        )
    try:
        cov = np.linalg.inv(info)
    except np.linalg.LinAlgError as exc:
        raise SingularInformationError(
            f"observed information matrix is singular; parameter "
            f"'{_name_singular_parameter(info)}' is not identified"
        ) from exc
    var = np.diag(cov)
    if np.any(var <= 0.0):
        bad = PARAM_NAMES[int(np.argmin(var))]
        raise SingularInformationError(
            f"observed information is not positive definite; variance for "
            f"'{bad}' is nonpositive"
        )
    return cov, np.sqrt(var)


def _two_sided_p(z: np.ndarray) -> np.ndarray:
    return np.vectorize(math.erfc)(np.abs(z) / math.sqrt(2.0))


def fit_mle(
    data: Iterable[EventRecord],
    kind: ModelKind,
    options: FitOptions | None = None,
) -> FitResult:
    """Maximum-likelihood fit of either model on loan event records.

    Newton-Raphson runs on (log theta, log shape, log scale); the reported
    standard errors use the observed information recomputed in the original
    parameterization at the optimum. Non-convergence is reported through
    converged=False with NaN Wald statistics, never silently.

    Raises
    ------
    ValueError
        On empty data, or censored records under the zero-truncated kind.
    NoEventsError
        On promotion-time data with no observed events.
    SingularInformationError
        When the information matrix at a converged optimum is singular.
    """
    opts = options or FitOptions()
    records = list(data)
    times, flags = to_arrays(records)
    if kind is ModelKind.ZERO_TRUNCATED:
        _validate_zt_data(times, flags)

        def loglik_params(p):
            return _zt_loglik(times, p[0], p[1], p[2])

        def score_params(p):
            return _zt_score(times, p[0], p[1], p[2])

    else:
        _validate_ptm_data(times, flags)

        def loglik_params(p):
            return _ptm_loglik(times, flags, p[0], p[1], p[2])

        def score_params(p):
            return _ptm_score(times, flags, p[0], p[1], p[2])

    if opts.initial is not None:
        start = np.array(opts.initial, dtype=float)
    else:
        start = _initial_params(records, kind, times, flags)
    if np.any(start <= 0.0) or not np.all(np.isfinite(start)):
        raise ValueError(f"initial parameters must be positive and finite, got {start}")

    def loglik_u(u):
        with np.errstate(over="ignore", invalid="ignore"):
            return loglik_params(np.exp(u))

    def score_u(u):
        p = np.exp(u)
        return score_params(p) * p

    u_hat, ll, trace, converged, iterations, gnorm = _newton_maximize(
        loglik_u, score_u, np.log(start), opts
    )
    estimates = np.exp(u_hat)

    spec = ModelSpec(kind, LatentCountParams(estimates[0]), WeibullParams(estimates[1], estimates[2]))
    nan3 = np.full(3, np.nan)
    se, ci_low, ci_high, p_value, cov = nan3, nan3, nan3, nan3, None
    if converged:
        info = -_fd_hessian(score_params, estimates, opts.information_step)
        cov, se = _wald_from_information(info)
        ci_low = estimates - Z_95 * se
        ci_high = estimates + Z_95 * se
        p_value = _two_sided_p(estimates / se)

    return FitResult(
        model=spec,
        se=se,
        ci_low=ci_low,
        ci_high=ci_high,
        p_value=p_value,
        loglik=ll,
        converged=converged,
        iterations=iterations,
        gradient_norm=gnorm,
        cov=cov,
        objective_trace=trace,
    )


# --- Wald summaries --------------------------------------------------------

@dataclass(frozen=True)
class WaldRow:
    """One summary line: estimate, SE, 95% CI bounds, and the Wald p-value."""

    parameter: str
    estimate: float
    se: float
    ci_low: float
    ci_high: float
    p_value: float

    @property
    def p_text(self) -> str:
        return format_p_value(self.p_value)


def format_p_value(p: float) -> str:
    """Render a p-value, collapsing the far tail to '< 0.0001'."""
    return "< 0.0001" if p < 1e-4 else f"{p:.4f}"


def wald_summary(f: FitResult, null_values: Sequence[float] | float = 0.0) -> list[WaldRow]:
    """Per-parameter Wald rows (estimate, SE, CI, p) for a converged fit.

    The p-value tests each parameter against the corresponding null value
    (default 0) using the normal approximation.
    """
    if not f.converged:
        raise ValueError("wald_summary requires a converged fit")
    nulls = np.broadcast_to(np.asarray(null_values, dtype=float), (3,))
    estimates = f.estimates
    p = _two_sided_p((estimates - nulls) / f.se)
    return [
        WaldRow(
            parameter=PARAM_NAMES[i],
            estimate=float(estimates[i]),
            se=float(f.se[i]),
            ci_low=float(f.ci_low[i]),
            ci_high=float(f.ci_high[i]),
            p_value=float(p[i]),
        )
        for i in range(3)
    ]
