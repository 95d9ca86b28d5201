"""
Filename: metrics.py

Description:
    Concordance index, inverse-probability-of-censoring weighted
    Brier score and its integral over time, plus the evaluation of a
    tree on a test dataset.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from scipy.integrate import trapezoid

from dipoletree.core.data import Dataset
from dipoletree.tree.growth import SurvivalTree
from dipoletree.tree.survival import KaplanMeier, kaplan_meier
from dipoletree.utilities.errors import DataError, DimensionError, DroppedWeightsWarning

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CensoringKM:
    """ Kaplan-Meier curve of the censoring times (statuses flipped) """
    km: KaplanMeier

    @classmethod
    def fit(cls, times: Any, statuses: Any) -> CensoringKM:
        """ Fits G on the given outcomes """
        flipped = 1 - np.asarray(statuses, dtype=np.int64)
        return cls(kaplan_meier(np.asarray(times, dtype=float), flipped))

    def before(self, t: Any) -> Any:
        """ G(t-) """
        return self.km.survival_before(t)


@dataclass(frozen=True)
class EvalReport:
    """ Test-set metrics of one model """
    ci: float | None
    ibs: float
    brier_curve: tuple[tuple[float, float], ...]
    n_test: int
    dropped_weights: int = 0
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.ci is not None and not 0.0 <= self.ci <= 1.0:
            raise DataError("EvalReport", f"concordance {self.ci} outside [0, 1]")

    def to_dict(self) -> dict[str, Any]:
        """ Returns a JSON compatible record """
        return {
            "ci": self.ci,
            "ibs": self.ibs,
            "n_test": self.n_test,
            "dropped_weights": self.dropped_weights,
            "brier_curve": [list(point) for point in self.brier_curve],
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, record: dict[str, Any]) -> EvalReport:
        """ Rebuilds a report from to_dict output """
        ci = record.get("ci")
        return cls(
            None if ci is None else float(ci), float(record["ibs"]),
            tuple((float(t), float(b)) for t, b in record.get("brier_curve", ())),
            int(record["n_test"]), int(record.get("dropped_weights", 0)),
            tuple(record.get("notes", ())),
        )


def concordance_index(pred_medians: Sequence[float], times: Sequence[float], statuses: Sequence[int]) -> float | None:
    """
    Share of comparable ordered pairs ranked correctly.

    A pair (i, j) counts when t_i < t_j and i is an event; pairs with
    tied predictions are left out of both sums. Returns None when no
    pair remains.
    """
    predicted = np.asarray(pred_medians, dtype=float)
    times = np.asarray(times, dtype=float)
    statuses = np.asarray(statuses, dtype=np.int64)

    if not predicted.shape == times.shape == statuses.shape:
        raise DimensionError("concordance_index", times.shape[0], predicted.shape[0])

    ordered = (times[:, None] < times[None, :]) & (statuses[:, None] == 1)
    distinct = predicted[:, None] != predicted[None, :]

    denominator = np.count_nonzero(ordered & distinct)
    if denominator == 0:
        return None

    numerator = np.count_nonzero(ordered & distinct & (predicted[:, None] < predicted[None, :]))
    return numerator / denominator


def _survival_matrix(curves: Sequence[KaplanMeier], grid: np.ndarray) -> np.ndarray:
    """ S(t) of every curve at every grid time; shared curves are evaluated once """
    result = np.empty((len(curves), grid.size))
    groups: dict[int, list[int]] = {}
    for row, curve in enumerate(curves):
        groups.setdefault(id(curve), []).append(row)

    for rows in groups.values():
        result[rows] = curves[rows[0]].survival_at(grid)

    return result


def brier_curve(
    leaf_curves: Sequence[KaplanMeier],
    times: Sequence[float],
    statuses: Sequence[int],
    g: CensoringKM,
    grid: Sequence[float],
) -> tuple[np.ndarray, int]:
    """
    Brier scores at every grid time and the number of observations
    dropped for a zero censoring weight G(t_i-).
    """
    times = np.asarray(times, dtype=float)
    statuses = np.asarray(statuses, dtype=np.int64)
    grid = np.asarray(grid, dtype=float).reshape(-1)

    if len(leaf_curves) != times.shape[0] or statuses.shape != times.shape:
        raise DimensionError("brier_score", times.shape[0], len(leaf_curves))

    weights = np.asarray(g.before(times), dtype=float)
    kept = weights > 0
    dropped = int(np.count_nonzero(~kept))
    if not np.any(kept):
        return np.full(grid.size, np.nan), dropped

    survival = _survival_matrix(list(leaf_curves), grid)[kept]
    t, d, w = times[kept, None], statuses[kept, None], weights[kept, None]

    died = (t <= grid[None, :]) & (d == 1)
    alive = t > grid[None, :]
    terms = survival ** 2 * died / w + (1.0 - survival) ** 2 * alive / w

    return terms.mean(axis=0), dropped


def brier_score(
    leaf_curves: Sequence[KaplanMeier],
    times: Sequence[float],
    statuses: Sequence[int],
    g: CensoringKM,
    t: float,
) -> float:
    """ IPCW Brier score at time t """
    if t < 0:
        raise DataError("brier_score", f"time must be >= 0, got {t}")

    scores, dropped = brier_curve(leaf_curves, times, statuses, g, [t])
    if dropped:
        DroppedWeightsWarning(dropped).display()

    return float(scores[0])


def integrated_brier(curve: Sequence[tuple[float, float]], t_max: float | None = None) -> float:
    """ Trapezoidal integral of BS over [0, t_max] divided by t_max """
    points = np.asarray(curve, dtype=float).reshape(-1, 2)
    if points.shape[0] == 0:
        raise DataError("integrated_brier", "evaluation grid is empty")

    grid, index = np.unique(points[:, 0], return_index=True)
    scores = points[index, 1]
    t_max = float(grid[-1]) if t_max is None else float(t_max)

    if t_max <= 0:
        return float(scores[0])

    return float(trapezoid(scores, grid) / t_max)


def evaluation_grid(times: Sequence[float], statuses: Sequence[int]) -> np.ndarray:
    """ 0, the sorted unique uncensored times and the largest time """
    times = np.asarray(times, dtype=float)
    statuses = np.asarray(statuses, dtype=np.int64)
    return np.unique(np.concatenate(([0.0], times[statuses == 1], [times.max()])))


def evaluate(tree: SurvivalTree, dataset: Dataset) -> EvalReport:
    """ Routes a test set through the tree and scores the predictions """
    if dataset.p != tree.p:
        raise DimensionError("evaluate", tree.p, dataset.p)

    medians = tree.predict_medians(dataset.covariates)
    curves = tree.leaf_curves(dataset.covariates)
    ci = concordance_index(medians, dataset.times, dataset.statuses)

    g = CensoringKM.fit(dataset.times, dataset.statuses)
    grid = evaluation_grid(dataset.times, dataset.statuses)
    scores, dropped = brier_curve(curves, dataset.times, dataset.statuses, g, grid)

    notes = []
    if dropped:
        warning = DroppedWeightsWarning(dropped)
        warning.display()
        notes.append(warning.message)

    ibs = integrated_brier(np.column_stack((grid, scores)), float(dataset.times.max()))
    logger.info("Evaluated %d observations: CI=%s, IBS=%.4f", dataset.n, ci, ibs)

    return EvalReport(
        ci, ibs, tuple((float(t), float(b)) for t, b in zip(grid, scores)),
        dataset.n, dropped, tuple(notes)
    )
