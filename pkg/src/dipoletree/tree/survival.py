"""
Filename: survival.py

Description:
    Kaplan-Meier product-limit estimates, their median survival
    time, and the two-sample log-rank statistic used to score splits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np
from scipy.stats import chi2

from dipoletree.utilities.errors import DataError

# S(t) <= 0.5 is tested with this slack against product round-off
_MEDIAN_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class Outcomes:
    """ Observed times and event indicators of a group """
    times: np.ndarray
    statuses: np.ndarray

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float).reshape(-1)
        statuses = np.asarray(self.statuses, dtype=np.int64).reshape(-1)
        if times.shape != statuses.shape:
            raise DataError("Outcomes", "times and statuses differ in length")

        object.__setattr__(self, "times", times)
        object.__setattr__(self, "statuses", statuses)

    @classmethod
    def of(cls, source: Any, statuses: Any = None) -> Outcomes:
        """ Accepts Outcomes, anything with times/statuses, (times, statuses) or (t, d) pairs """
        if isinstance(source, Outcomes):
            return source

        if statuses is not None:
            return cls(source, statuses)

        if hasattr(source, "times") and hasattr(source, "statuses"):
            return cls(source.times, source.statuses)

        pairs = np.asarray(source, dtype=float).reshape(-1, 2)
        return cls(pairs[:, 0], pairs[:, 1])

    def __len__(self) -> int:
        return int(self.times.shape[0])


@dataclass(frozen=True, eq=False)
class KaplanMeier:
    """
    Product-limit survival curve.

    survival[i] is S just after event_times[i]; the curve is right
    continuous and equals 1 before the first event.
    """
    event_times: np.ndarray
    survival: np.ndarray
    at_risk: np.ndarray
    deaths: np.ndarray
    max_time: float
    n_samples: int

    def survival_at(self, t: Any) -> Any:
        """ S(t), right continuous """
        index = np.searchsorted(self.event_times, t, side="right")
        values = np.concatenate(([1.0], self.survival))[index]
        return float(values) if np.ndim(values) == 0 else values

    def survival_before(self, t: Any) -> Any:
        """ S(t-), the left limit """
        index = np.searchsorted(self.event_times, t, side="left")
        values = np.concatenate(([1.0], self.survival))[index]
        return float(values) if np.ndim(values) == 0 else values

    def to_dict(self) -> dict[str, Any]:
        """ Returns a JSON compatible record """
        return {
            "event_times": self.event_times.tolist(),
            "survival": self.survival.tolist(),
            "at_risk": self.at_risk.tolist(),
            "deaths": self.deaths.tolist(),
            "max_time": self.max_time,
            "n_samples": self.n_samples,
        }

    @classmethod
    def from_dict(cls, record: dict[str, Any]) -> KaplanMeier:
        """ Rebuilds a curve from to_dict output """
        return cls(
            np.asarray(record["event_times"], dtype=float), np.asarray(record["survival"], dtype=float),
            np.asarray(record["at_risk"], dtype=np.int64), np.asarray(record["deaths"], dtype=np.int64),
            float(record["max_time"]), int(record["n_samples"]),
        )


def kaplan_meier(obs: Any, statuses: Sequence[int] | np.ndarray | None = None) -> KaplanMeier:
    """ Product-limit estimator; censored-only input gives S = 1 throughout """
    outcomes = Outcomes.of(obs, statuses)
    if len(outcomes) == 0:
        raise DataError("kaplan_meier", "no observations")

    unique, inverse = np.unique(outcomes.times, return_inverse=True)
    counts = np.bincount(inverse)
    deaths = np.bincount(inverse, weights=outcomes.statuses).astype(np.int64)
    at_risk = len(outcomes) - np.concatenate(([0], np.cumsum(counts)[:-1]))

    events = deaths > 0
    survival = np.cumprod(1.0 - deaths[events] / at_risk[events])

    return KaplanMeier(
        unique[events], survival, at_risk[events], deaths[events],
        float(outcomes.times.max()), len(outcomes)
    )


def median_reached(km: KaplanMeier) -> bool:
    """ True when the curve drops to 0.5 at some event time """
    return bool(np.any(km.survival <= 0.5 + _MEDIAN_SLACK))


def km_median(km: KaplanMeier) -> float:
    """ Smallest event time with S(t) <= 0.5, else the largest observed time """
    crossed = np.flatnonzero(km.survival <= 0.5 + _MEDIAN_SLACK)
    if crossed.size == 0:
        return km.max_time

    return float(km.event_times[crossed[0]])


def logrank_statistic(left: Any, right: Any) -> float:
    """
    Two-sample log-rank chi-square.

    Tied event times share one risk set; the variance is the
    hypergeometric one summed over event times. Returns 0 when a
    group is empty or the variance vanishes.
    """
    left, right = Outcomes.of(left), Outcomes.of(right)
    if len(left) == 0 or len(right) == 0:
        return 0.0

    times = np.concatenate((left.times, right.times))
    statuses = np.concatenate((left.statuses, right.statuses))
    event_times = np.unique(times[statuses == 1])
    if event_times.size == 0:
        return 0.0

    # Risk sets and deaths at each event time
    n_left = len(left) - np.searchsorted(np.sort(left.times), event_times, side="left")
    n_all = times.size - np.searchsorted(np.sort(times), event_times, side="left")

    left_events = np.sort(left.times[left.statuses == 1])
    all_events = np.sort(times[statuses == 1])
    d_left = np.searchsorted(left_events, event_times, side="right") - np.searchsorted(left_events, event_times, side="left")
    d_all = np.searchsorted(all_events, event_times, side="right") - np.searchsorted(all_events, event_times, side="left")

    share = n_left / n_all
    expected = float(np.sum(d_all * share))
    with np.errstate(divide="ignore", invalid="ignore"):
        correction = np.where(n_all > 1, (n_all - d_all) / (n_all - 1), 0.0)
    variance = float(np.sum(d_all * share * (1.0 - share) * correction))

    if variance <= 0:
        return 0.0

    return (float(d_left.sum()) - expected) ** 2 / variance


def logrank_pvalue(statistic: float) -> float:
    """ Upper tail of chi-square with one degree of freedom """
    return float(chi2.sf(statistic, df=1))
