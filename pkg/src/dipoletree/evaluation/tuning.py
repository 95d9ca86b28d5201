"""
Filename: tuning.py

Description:
    k-fold evaluation of the fit pipeline and the search for the
    ridge weight kappa = exp(eta) over a grid of eta values.

    NOTE: Every (eta, fold) cell is independent; cells may run in
    parallel and are reduced in (eta, fold) key order.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Any, Sequence

import numpy as np
from joblib import Parallel, delayed

from dipoletree.core.data import Dataset, stratified_folds
from dipoletree.evaluation.metrics import evaluate
from dipoletree.tree.fitting import FitConfig, fit_tree
from dipoletree.utilities.errors import DataError, NumericalError, UsageError

logger = logging.getLogger(__name__)

DEFAULT_ETAS = tuple(float(eta) for eta in range(-4, 5))


@dataclass(frozen=True)
class FoldResult:
    """ Scores of one (eta, fold) cell; None marks an undefined value """
    eta: float
    fold: int
    ci: float | None
    ibs: float | None
    nodes: int | None
    nodes_pruned: int | None
    error: str | None = None

    @property
    def defined(self) -> bool:
        """ True when the fold produced a tree """
        return self.error is None

    def to_dict(self) -> dict[str, Any]:
        """ Table row """
        return {
            "eta": self.eta,
            "kappa": math.exp(self.eta),
            "fold": self.fold,
            "ci": self.ci,
            "ibs": self.ibs,
            "nodes": self.nodes,
            "nodes_pruned": self.nodes_pruned,
            "error": self.error,
        }


def _mean_sd(values: Sequence[float | None]) -> tuple[float | None, float | None]:
    kept = np.array([value for value in values if value is not None], dtype=float)
    if kept.size == 0:
        return None, None

    sd = float(kept.std(ddof=1)) if kept.size > 1 else 0.0
    return float(kept.mean()), sd


@dataclass(frozen=True)
class CvSummary:
    """ Fold averages (and standard deviations) for one eta """
    eta: float
    folds: tuple[FoldResult, ...]

    @property
    def kappa(self) -> float:
        """ exp(eta) """
        return math.exp(self.eta)

    def statistic(self, name: str) -> tuple[float | None, float | None]:
        """ (mean, sd) of a FoldResult field over the defined cells """
        return _mean_sd([getattr(fold, name) for fold in self.folds])

    @property
    def mean_ci(self) -> float | None:
        """ Average concordance index """
        return self.statistic("ci")[0]

    @property
    def mean_ibs(self) -> float | None:
        """ Average integrated Brier score """
        return self.statistic("ibs")[0]

    def to_dict(self) -> dict[str, Any]:
        """ Summary row """
        record: dict[str, Any] = {"eta": self.eta, "kappa": self.kappa}
        for name in ("ci", "ibs", "nodes", "nodes_pruned"):
            mean, sd = self.statistic(name)
            record[f"{name}_mean"], record[f"{name}_sd"] = mean, sd

        record["undefined_folds"] = sum(not fold.defined for fold in self.folds)
        return record


@dataclass(frozen=True)
class TuneResult:
    """ Selected eta and the full cross-validation table """
    best_eta: float
    summaries: tuple[CvSummary, ...]

    @property
    def best_kappa(self) -> float:
        """ exp(best_eta) """
        return math.exp(self.best_eta)

    def table(self) -> list[dict[str, Any]]:
        """ One row per (eta, fold) cell """
        return [fold.to_dict() for summary in self.summaries for fold in summary.folds]

    def to_dict(self) -> dict[str, Any]:
        """ Returns a JSON compatible record """
        return {
            "best_eta": self.best_eta,
            "best_kappa": self.best_kappa,
            "summary": [summary.to_dict() for summary in self.summaries],
            "table": self.table(),
        }


def default_folds(n: int) -> int:
    """ Fold count for k-fold evaluation: 10 below 500 observations, else 20 """
    return 10 if n < 500 else 20


def _run_cell(dataset: Dataset, train: np.ndarray, test: np.ndarray, cfg: FitConfig, eta: float, fold: int) -> FoldResult:
    """ Fits on train, scores on test; failures become an undefined cell """
    try:
        result = fit_tree(dataset.subset(train), cfg)
        report = evaluate(result.tree, dataset.subset(test))
    except (DataError, NumericalError) as e:
        logger.warning("Cell eta=%g fold=%d is undefined: %s", eta, fold, e)
        return FoldResult(eta, fold, None, None, None, None, str(e))

    logger.debug("Cell eta=%g fold=%d: CI=%s, IBS=%.4f", eta, fold, report.ci, report.ibs)
    return FoldResult(eta, fold, report.ci, report.ibs, result.full.n_nodes, result.tree.n_nodes)


def _cells(
    dataset: Dataset, cfg: FitConfig, etas: Sequence[float], k: int, seed: int, jobs: int
) -> list[FoldResult]:
    """ Evaluates every (eta, fold) cell on one shared fold assignment """
    folds = stratified_folds(dataset, k, np.random.default_rng(seed))
    everything = np.arange(dataset.n)

    tasks = []
    for eta in etas:
        growth = replace(cfg.growth, kappa=math.exp(eta))
        for fold, test in enumerate(folds):
            train = np.setdiff1d(everything, test)
            cell_cfg = replace(cfg, growth=growth, seed=cfg.seed + fold)
            tasks.append(delayed(_run_cell)(dataset, train, test, cell_cfg, float(eta), fold))

    results = Parallel(n_jobs=jobs, prefer="threads")(tasks)
    return sorted(results, key=lambda cell: (cell.eta, cell.fold))


def cross_validate(
    dataset: Dataset, cfg: FitConfig | None = None, k: int | None = None, seed: int = 0, jobs: int = 1
) -> CvSummary:
    """ k-fold evaluation of the fit pipeline at the configured kappa """
    cfg = cfg or FitConfig()
    k = k or default_folds(dataset.n)
    eta = math.log(cfg.growth.kappa)

    cells = _cells(dataset, cfg, [eta], k, seed, jobs)
    summary = CvSummary(eta, tuple(cells))
    logger.info("Cross-validated %d folds: CI=%s, IBS=%s", k, summary.mean_ci, summary.mean_ibs)
    return summary


def _select_eta(summaries: Sequence[CvSummary]) -> float:
    """ Largest mean CI, else smallest mean IBS; ties go to the smaller eta """
    with_ci = [summary for summary in summaries if summary.mean_ci is not None]
    if with_ci:
        best = max(summary.mean_ci for summary in with_ci)
        return min(summary.eta for summary in with_ci if summary.mean_ci >= best - 1e-12)

    with_ibs = [summary for summary in summaries if summary.mean_ibs is not None]
    if not with_ibs:
        raise NumericalError("tune_kappa", "no eta produced a usable fold")

    best = min(summary.mean_ibs for summary in with_ibs)
    return min(summary.eta for summary in with_ibs if summary.mean_ibs <= best + 1e-12)


def tune_kappa(
    dataset: Dataset,
    cfg: FitConfig | None = None,
    etas: Sequence[float] = DEFAULT_ETAS,
    k: int = 5,
    seed: int = 0,
    jobs: int = 1,
) -> TuneResult:
    """ Picks eta = log(kappa) with the largest average concordance """
    cfg = cfg or FitConfig()
    if len(etas) == 0:
        raise UsageError("tune_kappa", "the eta grid is empty")

    if k < 2:
        raise UsageError("tune_kappa", f"need at least 2 folds, got {k}")

    cells = _cells(dataset, cfg, sorted(set(float(eta) for eta in etas)), k, seed, jobs)
    summaries = []
    for eta in sorted(set(cell.eta for cell in cells)):
        summary = CvSummary(eta, tuple(cell for cell in cells if cell.eta == eta))
        summaries.append(summary)
        logger.info("eta=%g: CI=%s, IBS=%s", eta, summary.mean_ci, summary.mean_ibs)

    result = TuneResult(_select_eta(summaries), tuple(summaries))
    logger.info("Selected eta=%g (kappa=%.4g)", result.best_eta, result.best_kappa)
    return result
