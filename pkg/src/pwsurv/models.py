"""Compound latent-competing-risk models for loan event times.

Both models view the observed time as the minimum of a latent number M of
independent Weibull cause-specific times. The zero-truncated variant
conditions on M >= 1 (every subject eventually fails); the promotion-time
variant lets M = 0 with probability exp(-theta), giving a cured fraction that
never experiences the event.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .distributions import (
    LatentCountParams,
    WeibullParams,
    log_expm1,
    weibull_cdf,
    weibull_pdf,
    weibull_survival,
)

__all__ = [
    "ModelKind",
    "ModelSpec",
    "ztpw_density",
    "ztpw_survival",
    "ptm_density",
    "ptm_survival",
    "cure_fraction",
    "elgd_at_horizon",
    "model_density",
    "model_survival",
]


class ModelKind(Enum):
    ZERO_TRUNCATED = "zt"
    PROMOTION_TIME = "ptm"


@dataclass(frozen=True)
class ModelSpec:
    """Model kind plus the full parameter vector (theta, shape, scale)."""

    kind: ModelKind
    theta: LatentCountParams
    weibull: WeibullParams

    def __post_init__(self) -> None:
        if not isinstance(self.kind, ModelKind):
            raise ValueError(f"kind must be a ModelKind, got {self.kind!r}")
        if self.kind is ModelKind.ZERO_TRUNCATED and self.theta.theta <= 0.0:
            raise ValueError("the zero-truncated model requires theta > 0")

    @classmethod
    def zero_truncated(cls, theta: float, shape: float, scale: float) -> "ModelSpec":
        return cls(ModelKind.ZERO_TRUNCATED, LatentCountParams(theta), WeibullParams(shape, scale))

    @classmethod
    def promotion_time(cls, theta: float, shape: float, scale: float) -> "ModelSpec":
        return cls(ModelKind.PROMOTION_TIME, LatentCountParams(theta), WeibullParams(shape, scale))

    def params(self) -> tuple[float, float, float]:
        """The parameter vector as (theta, shape, scale)."""
        return self.theta.theta, self.weibull.shape, self.weibull.scale


def _require_kind(m: ModelSpec, kind: ModelKind) -> None:
    if m.kind is not kind:
        raise ValueError(f"operation requires a {kind.value} model, got {m.kind.value}")


def ztpw_density(t, m: ModelSpec):
    """Event-time density of the zero-truncated model.

    f_Y(t) = theta * exp(theta * S(t)) * f(t) / (exp(theta) - 1), with S and f
    the Weibull survival and density.
    """
    _require_kind(m, ModelKind.ZERO_TRUNCATED)
    theta = m.theta.theta
    surv = weibull_survival(t, m.weibull)
    # exp(log theta + theta*S - log(e^theta - 1)) stays finite for large theta.
    amplitude = np.exp(np.log(theta) + theta * np.asarray(surv) - log_expm1(theta))
    out = amplitude * weibull_pdf(t, m.weibull)
    return float(out) if np.ndim(t) == 0 else out


def ztpw_survival(t, m: ModelSpec):
    """Survival of the zero-truncated model: (exp(theta*S(t)) - 1) / (exp(theta) - 1)."""
    _require_kind(m, ModelKind.ZERO_TRUNCATED)
    theta = m.theta.theta
    surv = np.asarray(weibull_survival(t, m.weibull))
    if theta <= 700.0:
        out = np.expm1(theta * surv) / np.expm1(theta)
    else:
        # Both numerator and denominator overflow; the -1 terms are negligible.
        out = np.exp(theta * (surv - 1.0))
    return float(out) if np.ndim(t) == 0 else out


def ptm_density(t, m: ModelSpec):
    """Event-time (sub)density of the promotion-time model.

    f_Y(t) = theta * f(t) * exp(-theta * F(t)). Defective: its total mass is
    1 - exp(-theta), the complement of the cured fraction.
    """
    _require_kind(m, ModelKind.PROMOTION_TIME)
    theta = m.theta.theta
    out = theta * weibull_pdf(t, m.weibull) * np.exp(-theta * np.asarray(weibull_cdf(t, m.weibull)))
    return float(out) if np.ndim(t) == 0 else out


def ptm_survival(t, m: ModelSpec):
    """Survival of the promotion-time model: exp(-theta * F(t)).

    Decreases from 1 to the cure plateau exp(-theta) as t grows.
    """
    _require_kind(m, ModelKind.PROMOTION_TIME)
    theta = m.theta.theta
    out = np.exp(-theta * np.asarray(weibull_cdf(t, m.weibull)))
    return float(out) if np.ndim(t) == 0 else out


def cure_fraction(m: ModelSpec) -> float:
    """Asymptotic never-failing fraction exp(-theta) of the promotion-time model.

    For recovery data this is the expected long-run loss given default: the
    share of defaulted loans that are never recovered.
    """
    _require_kind(m, ModelKind.PROMOTION_TIME)
    return float(np.exp(-m.theta.theta))


def elgd_at_horizon(m: ModelSpec, horizon: float) -> float:
    """Model probability that a defaulted loan is still unrecovered at the horizon.

    This is the promotion-time survival at the monitoring horizon (e.g. the
    24-month collection window) and is always at least cure_fraction(m).
    """
    _require_kind(m, ModelKind.PROMOTION_TIME)
    if not horizon > 0.0:
        raise ValueError(f"horizon must be positive, got {horizon!r}")
    return float(ptm_survival(horizon, m))


def model_density(t, m: ModelSpec):
    """Density of either model kind, dispatched on m.kind."""
    if m.kind is ModelKind.ZERO_TRUNCATED:
        return ztpw_density(t, m)
    return ptm_density(t, m)


def model_survival(t, m: ModelSpec):
    """Survival of either model kind, dispatched on m.kind."""
    if m.kind is ModelKind.ZERO_TRUNCATED:
        return ztpw_survival(t, m)
    return ptm_survival(t, m)
