"""
Filename: growth.py

Description:
    Recursive induction of survival trees. Every node keeps its
    Kaplan-Meier curve and median so a pruned tree needs no refit;
    internal nodes add the fitted split and the training log-rank
    statistic of the partition it produced.

    NOTE: Routing sends f(x) <= 0 to the left child.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field, replace
from typing import Any, Iterator

import numpy as np

from dipoletree.core.data import Dataset, Standardization, label_dipoles
from dipoletree.core.kernel import KernelSpec
from dipoletree.core.qp import SolverConfig
from dipoletree.core.splitter import PriceFactors, SplitModel, fit_split
from dipoletree.tree.survival import (
    KaplanMeier, Outcomes, kaplan_meier, km_median, logrank_statistic, median_reached
)
from dipoletree.utilities.errors import (
    DataError, DegenerateSplitError, DimensionError, EmptyLabelsError, UsageError
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GrowthConfig:
    """ Everything grow() needs to reproduce a tree """
    kernel: KernelSpec = field(default_factory=KernelSpec.linear)
    kappa: float = 1.0
    epsilon: float = 1.0
    zeta1: float = 0.3
    zeta2: float = 0.6
    min_node: int = 15
    min_child: int = 5
    tau: float = 1e-5
    max_rounds: int = 25
    solver: SolverConfig = field(default_factory=SolverConfig)
    price: PriceFactors = field(default_factory=PriceFactors)

    def __post_init__(self) -> None:
        if not self.kappa > 0:
            raise UsageError("GrowthConfig", f"kappa must be > 0, got {self.kappa}")

        if not 0 < self.zeta1 < self.zeta2 < 1:
            raise UsageError("GrowthConfig", f"need 0 < zeta1 < zeta2 < 1, got {self.zeta1}, {self.zeta2}")

        if self.min_node < 2 or self.min_child < 1:
            raise UsageError("GrowthConfig", "min_node must be >= 2 and min_child >= 1")

        if self.max_rounds < 1:
            raise UsageError("GrowthConfig", f"max_rounds must be >= 1, got {self.max_rounds}")

    def to_dict(self) -> dict[str, Any]:
        """ Config snapshot stored with the model """
        return {
            "kernel": self.kernel.to_dict(),
            "kappa": self.kappa,
            "epsilon": self.epsilon,
            "zeta1": self.zeta1,
            "zeta2": self.zeta2,
            "min_node": self.min_node,
            "min_child": self.min_child,
            "tau": self.tau,
            "max_rounds": self.max_rounds,
            "solver": self.solver.to_dict(),
            "price": {"pure": self.price.pure, "mixed": self.price.mixed},
        }

    @classmethod
    def from_dict(cls, record: dict[str, Any]) -> GrowthConfig:
        """ Rebuilds a config from to_dict output """
        values = dict(record)
        values["kernel"] = KernelSpec.from_dict(record["kernel"])
        values["solver"] = SolverConfig(**record.get("solver", {}))
        values["price"] = PriceFactors(**record.get("price", {}))
        return cls(**values)


@dataclass(eq=False)
class TreeNode:
    """ A tree node; split, left and right are set on internal nodes only """
    node_id: int
    depth: int
    km: KaplanMeier
    median: float
    n_samples: int
    median_reached: bool = True
    split: SplitModel | None = None
    left: TreeNode | None = None
    right: TreeNode | None = None
    logrank: float = 0.0

    @property
    def is_leaf(self) -> bool:
        """ True for terminal nodes """
        return self.split is None

    def walk(self) -> Iterator[TreeNode]:
        """ Preorder traversal """
        yield self
        if not self.is_leaf:
            yield from self.left.walk()
            yield from self.right.walk()

    def internal_nodes(self) -> list[TreeNode]:
        """ Internal nodes of this branch in preorder """
        return [node for node in self.walk() if not node.is_leaf]

    def leaves(self) -> list[TreeNode]:
        """ Leaves of this branch in preorder """
        return [node for node in self.walk() if node.is_leaf]

    def as_leaf(self) -> TreeNode:
        """ Copy of this node with its branch removed """
        return replace(self, split=None, left=None, right=None, logrank=0.0)


@dataclass(eq=False)
class SurvivalTree:
    """ A grown (or pruned) tree with the data transform it was fit under """
    root: TreeNode
    standardization: Standardization
    config: GrowthConfig
    covariates: tuple[str, ...] = ()

    @property
    def p(self) -> int:
        """ Covariate dimension """
        return self.standardization.p

    @property
    def n_internal(self) -> int:
        """ Number of internal nodes """
        return len(self.root.internal_nodes())

    @property
    def n_leaves(self) -> int:
        """ Number of leaves """
        return len(self.root.leaves())

    @property
    def n_nodes(self) -> int:
        """ Total node count """
        return self.n_internal + self.n_leaves

    @property
    def depth(self) -> int:
        """ Depth of the deepest leaf """
        return max(node.depth for node in self.root.leaves())

    def nodes(self) -> dict[int, TreeNode]:
        """ node_id to node lookup """
        return {node.node_id: node for node in self.root.walk()}

    def _check(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.p:
            raise DimensionError("SurvivalTree", self.p, X.shape[1])
        return X

    def route(self, X: np.ndarray) -> np.ndarray:
        """ Leaf node_id reached by each row of standardized covariates """
        X = self._check(X)
        reached = np.empty(X.shape[0], dtype=np.int64)

        stack = [(self.root, np.arange(X.shape[0]))]
        while stack:
            node, rows = stack.pop()
            if node.is_leaf or rows.size == 0:
                reached[rows] = node.node_id
                continue

            right = node.split.values(X[rows]) > 0
            stack.append((node.left, rows[~right]))
            stack.append((node.right, rows[right]))

        return reached

    def leaf_for(self, x: np.ndarray) -> TreeNode:
        """ Leaf reached by a single standardized covariate vector """
        return self.nodes()[int(self.route(np.reshape(x, (1, -1)))[0])]

    def predict_medians(self, X: np.ndarray) -> np.ndarray:
        """ Leaf medians for each row """
        lookup = self.nodes()
        return np.array([lookup[node_id].median for node_id in self.route(X)], dtype=float)

    def leaf_curves(self, X: np.ndarray) -> list[KaplanMeier]:
        """ Leaf Kaplan-Meier curve for each row """
        lookup = self.nodes()
        return [lookup[node_id].km for node_id in self.route(X)]

    def collapse(self, node_ids: set[int] | frozenset[int]) -> SurvivalTree:
        """ Copy of the tree with the given nodes turned into leaves """
        def rebuild(node: TreeNode) -> TreeNode:
            if node.is_leaf:
                return node

            if node.node_id in node_ids:
                return node.as_leaf()

            return replace(node, left=rebuild(node.left), right=rebuild(node.right))

        return replace(self, root=rebuild(self.root))


def predict_median(tree: SurvivalTree, x: np.ndarray) -> float:
    """ Median survival of the leaf reached by standardized x """
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != tree.p:
        raise DimensionError("predict_median", tree.p, x.shape[0])

    return float(tree.leaf_for(x).median)


def _make_node(d: Dataset, rows: np.ndarray, depth: int, counter: Iterator[int]) -> TreeNode:
    km = kaplan_meier(d.times[rows], d.statuses[rows])
    return TreeNode(next(counter), depth, km, km_median(km), int(rows.size), median_reached(km))


def _find_split(d: Dataset, rows: np.ndarray, cfg: GrowthConfig) -> tuple[SplitModel, np.ndarray] | None:
    """ Fitted split and its right-child mask, or None for a terminal node """
    if rows.size < cfg.min_node:
        return None

    node_data = d.subset(rows)
    try:
        labels = label_dipoles(node_data, cfg.zeta1, cfg.zeta2)
    except EmptyLabelsError:
        logger.debug("Terminal: no right-comparable pairs in %d rows", rows.size)
        return None

    if labels.mixed.shape[0] == 0:
        logger.debug("Terminal: only pure dipoles in %d rows", rows.size)
        return None

    try:
        model = fit_split(
            node_data, labels, cfg.kernel, cfg.kappa, cfg.epsilon,
            cfg.tau, cfg.max_rounds, cfg.solver, cfg.price
        )
    except DegenerateSplitError as e:
        logger.debug("Terminal: %s", e)
        return None

    right = model.values(node_data.covariates) > 0
    smaller = min(int(right.sum()), int((~right).sum()))
    if smaller < cfg.min_child:
        logger.debug("Terminal: child of size %d below min_child", smaller)
        return None

    return model, right


def _grow_node(d: Dataset, rows: np.ndarray, depth: int, cfg: GrowthConfig, counter: Iterator[int]) -> TreeNode:
    node = _make_node(d, rows, depth, counter)

    found = _find_split(d, rows, cfg)
    if found is None:
        return node

    model, right = found
    node.split = model
    node.left = _grow_node(d, rows[~right], depth + 1, cfg, counter)
    node.right = _grow_node(d, rows[right], depth + 1, cfg, counter)
    node.logrank = logrank_statistic(_outcomes(d, rows[~right]), _outcomes(d, rows[right]))

    logger.debug(
        "Node %d split %d rows into %d/%d (log-rank %.4g)",
        node.node_id, rows.size, node.left.n_samples, node.right.n_samples, node.logrank
    )
    return node


def _outcomes(d: Dataset, rows: np.ndarray) -> Outcomes:
    return Outcomes(d.times[rows], d.statuses[rows])


def grow(d: Dataset, cfg: GrowthConfig | None = None) -> SurvivalTree:
    """
    Grows a tree by recursive dipole splitting.

    An omitted Gaussian variance is resolved once on the whole
    training set and then shared by every node.
    """
    cfg = cfg or GrowthConfig()
    if d.n == 0:
        raise DataError("grow", "empty dataset")

    cfg = replace(cfg, kernel=cfg.kernel.resolve(d.covariates))
    root = _grow_node(d, np.arange(d.n), 0, cfg, itertools.count())
    tree = SurvivalTree(root, d.standardization, cfg, d.names)

    logger.info("Grew tree: %d internal nodes, %d leaves, depth %d", tree.n_internal, tree.n_leaves, tree.depth)
    return tree
