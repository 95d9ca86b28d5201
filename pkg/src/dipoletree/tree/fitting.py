"""
Filename: fitting.py

Description:
    The complete fit pipeline: grow on a training part, build the
    pruning chain, score it on held-out data (or correct the
    training log-ranks by bootstrap) and keep the best subtree.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from dipoletree.core.data import Dataset, stratified_holdout
from dipoletree.tree.growth import GrowthConfig, SurvivalTree, grow
from dipoletree.tree.pruning import (
    PruneSequence, check_alpha, prune_sequence, select_index, subtree_scores
)
from dipoletree.tree.survival import logrank_pvalue
from dipoletree.utilities.errors import (
    MedianFallbackWarning, Notification, UsageError, ValidationFallbackWarning
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FitConfig:
    """ Growth settings plus the subtree selection knobs """
    growth: GrowthConfig = field(default_factory=GrowthConfig)
    alpha_c: float = 3.0
    bootstrap: int = 0
    validation_fraction: float = 0.25
    seed: int = 0

    def __post_init__(self) -> None:
        if self.bootstrap < 0:
            raise UsageError("FitConfig", f"bootstrap must be >= 0, got {self.bootstrap}")

        if not 0 <= self.validation_fraction < 1:
            raise UsageError("FitConfig", f"validation_fraction must lie in [0, 1), got {self.validation_fraction}")

    def to_dict(self) -> dict[str, Any]:
        """ Snapshot stored in model metadata """
        return {
            "growth": self.growth.to_dict(),
            "alpha_c": self.alpha_c,
            "bootstrap": self.bootstrap,
            "validation_fraction": self.validation_fraction,
            "seed": self.seed,
        }


@dataclass(frozen=True, eq=False)
class FitResult:
    """ Selected subtree with the chain and scores it was chosen from """
    full: SurvivalTree
    sequence: PruneSequence
    scores: np.ndarray
    selected: int
    n_train: int
    n_validation: int
    notes: tuple[Notification, ...] = ()

    @property
    def tree(self) -> SurvivalTree:
        """ The selected subtree """
        return self.sequence.subtrees[self.selected]

    def report(self) -> dict[str, Any]:
        """ Node counts before and after pruning and the per-split log-ranks """
        splits = [
            {
                "node_id": node.node_id,
                "depth": node.depth,
                "n_samples": node.n_samples,
                "logrank": node.logrank,
                "p_value": logrank_pvalue(node.logrank),
                "support_points": int(node.split.support.shape[0]),
                "rounds": node.split.rounds,
            }
            for node in self.tree.root.internal_nodes()
        ]

        return {
            "n_train": self.n_train,
            "n_validation": self.n_validation,
            "nodes": self.full.n_nodes,
            "nodes_pruned": self.tree.n_nodes,
            "leaves_pruned": self.tree.n_leaves,
            "depth_pruned": self.tree.depth,
            "alphas": list(self.sequence.alphas),
            "scores": self.scores.tolist(),
            "selected": self.selected,
            "splits": splits,
            "notes": [note.to_dict() for note in self.notes],
        }


def _median_notes(tree: SurvivalTree) -> list[Notification]:
    notes: list[Notification] = []
    for leaf in tree.root.leaves():
        if not leaf.median_reached:
            note = MedianFallbackWarning(leaf.node_id, leaf.median)
            note.display()
            notes.append(note)

    return notes


def fit_tree(dataset: Dataset, cfg: FitConfig | None = None) -> FitResult:
    """
    Grows, prunes and selects a survival tree.

    Without bootstrap a stratified validation part is held out and
    every subtree is scored on it. With bootstrap the tree is grown
    on all observations and its log-ranks are optimism corrected.
    """
    cfg = cfg or FitConfig()
    check_alpha(cfg.alpha_c)
    notes: list[Notification] = []

    if cfg.bootstrap > 0:
        full = grow(dataset, cfg.growth)
        sequence = prune_sequence(full)
        scores = subtree_scores(sequence, cfg.alpha_c, bootstrap=cfg.bootstrap, training=dataset, seed=cfg.seed)
        n_train, n_validation = dataset.n, 0

    else:
        rng = np.random.default_rng(cfg.seed)
        train_rows, held_rows = stratified_holdout(dataset, cfg.validation_fraction, rng)

        if held_rows.size == 0 or train_rows.size == 0:
            note = ValidationFallbackWarning(dataset.n)
        elif not np.any(dataset.statuses[held_rows] == 1):
            # Log-rank scores need at least one event
            note = ValidationFallbackWarning(dataset.n, "leave no event for the validation part")
        else:
            note = None

        if note is not None:
            note.display()
            notes.append(note)
            training = validation = dataset
        else:
            training, validation = dataset.subset(train_rows), dataset.subset(held_rows)

        full = grow(training, cfg.growth)
        sequence = prune_sequence(full)
        scores = subtree_scores(sequence, cfg.alpha_c, validation)
        n_train, n_validation = training.n, (0 if validation is training else validation.n)

    selected = select_index(scores)
    result = FitResult(full, sequence, scores, selected, n_train, n_validation)
    notes.extend(_median_notes(result.tree))

    logger.info(
        "Selected subtree %d of %d: %d -> %d nodes",
        selected, len(sequence) - 1, full.n_nodes, result.tree.n_nodes
    )
    return FitResult(full, sequence, scores, selected, n_train, n_validation, tuple(notes))
