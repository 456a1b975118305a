"""Loan-level event records shared by the fitting, nonparametric and simulation code."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = ["EventRecord", "to_arrays"]


@dataclass(frozen=True)
class EventRecord:
    """One observed loan: time to event (or censoring), event flag, cohort label.

    ``event`` is 1 when the event of interest was observed at ``time`` and 0
    when the observation was right-censored there.
    """

    time: float
    event: int
    cohort: str = ""

    def __post_init__(self) -> None:
        if not (isinstance(self.time, (int, float)) and math.isfinite(self.time)):
            raise ValueError(f"time must be a finite number, got {self.time!r}")
        if self.time <= 0.0:
            raise ValueError(f"time must be positive, got {self.time}")
        if self.event not in (0, 1):
            raise ValueError(f"event flag must be 0 or 1, got {self.event!r}")


def to_arrays(records: Iterable[EventRecord]) -> tuple[np.ndarray, np.ndarray]:
    """Split records into a float time array and an integer event-flag array."""
    recs: Sequence[EventRecord] = list(records)
    times = np.array([r.time for r in recs], dtype=float)
    flags = np.array([r.event for r in recs], dtype=int)
    return times, flags
