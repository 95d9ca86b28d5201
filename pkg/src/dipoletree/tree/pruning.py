"""
Filename: pruning.py

Description:
    Weakest-link pruning by the per-split log-rank ratio
    g(h) = G(T_h) / |S_h|, split-complexity scoring of the resulting
    chain on held-out data, and bootstrap optimism correction when
    no validation sample is spared.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2

from dipoletree.core.data import Dataset
from dipoletree.tree.growth import GrowthConfig, SurvivalTree, TreeNode, grow
from dipoletree.tree.survival import Outcomes, logrank_statistic
from dipoletree.utilities.errors import AlphaRangeWarning, DimensionError, UsageError

logger = logging.getLogger(__name__)

# Relative slack under which two ratios count as tied
_TIE = 1e-12


@dataclass(frozen=True, eq=False)
class PruneSequence:
    """
    Nested subtrees T_0 (full) > T_1 > ... > T_m (root only).

    alphas[k - 1] is the threshold at which T_k replaces T_(k-1);
    collapsed[k - 1] lists the node_ids turned into leaves at that step.
    """
    subtrees: tuple[SurvivalTree, ...]
    alphas: tuple[float, ...]
    collapsed: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.subtrees)

    def index_for(self, alpha: float) -> int:
        """ Index of the subtree in force at threshold alpha """
        return int(np.searchsorted(np.asarray(self.alphas), alpha, side="right"))


def _branch_totals(node: TreeNode, removed: set[int]) -> dict[int, tuple[float, int]]:
    """ (G, |S|) for every remaining internal node, bottom up """
    totals: dict[int, tuple[float, int]] = {}

    def visit(current: TreeNode) -> tuple[float, int]:
        if current.is_leaf or current.node_id in removed:
            return 0.0, 0

        left_g, left_s = visit(current.left)
        right_g, right_s = visit(current.right)
        total = (current.logrank + left_g + right_g, 1 + left_s + right_s)
        totals[current.node_id] = total
        return total

    visit(node)
    return totals


def prune_sequence(tree: SurvivalTree) -> PruneSequence:
    """
    Repeatedly collapses the branch with the smallest g(h).

    Every branch whose ratio ties the current minimum is collapsed
    in the same step (deeper first, then lower node_id), so the
    recorded thresholds are strictly increasing.
    """
    lookup = tree.nodes()
    removed: set[int] = set()
    subtrees, alphas, collapsed = [tree], [], []

    totals = _branch_totals(tree.root, removed)
    while totals:
        ratios = {node_id: g / s for node_id, (g, s) in totals.items()}
        alpha = min(ratios.values())
        step: list[int] = []

        while totals:
            ratios = {node_id: g / s for node_id, (g, s) in totals.items()}
            tied = [node_id for node_id, ratio in ratios.items() if ratio <= alpha + _TIE * (1.0 + abs(alpha))]
            if not tied:
                break

            target = min(tied, key=lambda node_id: (-lookup[node_id].depth, node_id))
            step.append(target)
            removed.add(target)
            totals = _branch_totals(tree.root, removed)

        alphas.append(alpha)
        collapsed.append(tuple(step))
        subtrees.append(tree.collapse(frozenset(removed)))

        logger.debug("Pruning step %d: alpha=%.6g collapses %s", len(alphas), alpha, step)

    return PruneSequence(tuple(subtrees), tuple(alphas), tuple(collapsed))


def validation_logranks(tree: SurvivalTree, validation: Dataset) -> dict[int, float]:
    """ Log-rank statistic of every internal split recomputed on validation data """
    if validation.p != tree.p:
        raise DimensionError("split_complexity", tree.p, validation.p)

    X = validation.covariates
    statistics: dict[int, float] = {}
    stack = [(tree.root, np.arange(validation.n))]

    while stack:
        node, rows = stack.pop()
        if node.is_leaf:
            continue

        if rows.size == 0:
            right = np.zeros(0, dtype=bool)
        else:
            right = node.split.values(X[rows]) > 0

        left_rows, right_rows = rows[~right], rows[right]
        statistics[node.node_id] = logrank_statistic(
            Outcomes(validation.times[left_rows], validation.statuses[left_rows]),
            Outcomes(validation.times[right_rows], validation.statuses[right_rows]),
        )
        stack.append((node.left, left_rows))
        stack.append((node.right, right_rows))

    return statistics


def split_complexity(subtree: SurvivalTree, alpha: float, validation: Dataset) -> float:
    """ G(T') - alpha |S'| with G summed from validation log-ranks """
    if alpha < 0:
        raise UsageError("split_complexity", f"alpha must be >= 0, got {alpha}")

    statistics = validation_logranks(subtree, validation)
    return sum(statistics.values()) - alpha * len(statistics)


def _training_g(tree: SurvivalTree) -> float:
    return float(sum(node.logrank for node in tree.root.internal_nodes()))


def check_alpha(alpha_c: float) -> None:
    """ Rejects negative thresholds and warns outside [2, 4] """
    if alpha_c < 0:
        raise UsageError("select_subtree", f"alpha_c must be >= 0, got {alpha_c}")

    if not 2 <= alpha_c <= 4:
        AlphaRangeWarning(alpha_c, float(chi2.sf(alpha_c, df=1))).display()


def _representative_alphas(alphas: tuple[float, ...]) -> list[float]:
    """ Geometric midpoint of each subtree's threshold interval """
    bounds = [0.0, *alphas, math.inf]
    return [math.sqrt(low * high) if math.isfinite(high) else math.inf for low, high in zip(bounds[:-1], bounds[1:])]


def bootstrap_optimism(
    seq: PruneSequence,
    training: Dataset,
    config: GrowthConfig,
    bootstrap: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """
    Average optimism of the training G for each subtree of seq.

    For every resample a tree is grown and pruned; its subtree in
    force at the representative threshold of T_k is scored on the
    resample and on the original data, and the difference is averaged.
    """
    representative = _representative_alphas(seq.alphas)
    optimism = np.zeros(len(seq))

    for draw in range(bootstrap):
        rows = rng.integers(0, training.n, size=training.n)
        resample = training.subset(rows)
        boot_seq = prune_sequence(grow(resample, config))

        for k, alpha in enumerate(representative):
            chosen = boot_seq.subtrees[boot_seq.index_for(alpha)]
            on_resample = _training_g(chosen)
            on_original = sum(validation_logranks(chosen, training).values())
            optimism[k] += on_resample - on_original

        logger.debug("Bootstrap resample %d/%d done", draw + 1, bootstrap)

    return optimism / bootstrap


def subtree_scores(
    seq: PruneSequence,
    alpha_c: float,
    validation: Dataset | None = None,
    bootstrap: int = 0,
    training: Dataset | None = None,
    seed: int = 0,
) -> np.ndarray:
    """ G_alpha_c of every subtree in the chain (held-out or bias-corrected) """
    if bootstrap < 0:
        raise UsageError("select_subtree", f"bootstrap must be >= 0, got {bootstrap}")

    sizes = np.array([subtree.n_internal for subtree in seq.subtrees], dtype=float)

    if bootstrap == 0:
        if validation is None:
            raise UsageError("select_subtree", "validation data is required without bootstrap")

        logranks = validation_logranks(seq.subtrees[0], validation)
        g = np.array([
            sum(logranks[node.node_id] for node in subtree.root.internal_nodes())
            for subtree in seq.subtrees
        ])
        return g - alpha_c * sizes

    if training is None:
        raise UsageError("select_subtree", "bootstrap correction needs the training data")

    rng = np.random.default_rng(seed)
    optimism = bootstrap_optimism(seq, training, seq.subtrees[0].config, bootstrap, rng)
    g = np.array([_training_g(subtree) for subtree in seq.subtrees]) - optimism
    return g - alpha_c * sizes


def select_subtree(
    seq: PruneSequence,
    alpha_c: float,
    validation: Dataset | None = None,
    bootstrap: int = 0,
    training: Dataset | None = None,
    seed: int = 0,
) -> SurvivalTree:
    """ Subtree maximizing the split complexity; ties go to the larger tree """
    check_alpha(alpha_c)
    return seq.subtrees[select_index(subtree_scores(seq, alpha_c, validation, bootstrap, training, seed))]


def select_index(scores: np.ndarray) -> int:
    """ First (largest) subtree attaining the maximum score """
    best = float(np.max(scores))
    tolerance = 1e-12 * (1.0 + abs(best))
    return int(np.flatnonzero(scores >= best - tolerance)[0])
