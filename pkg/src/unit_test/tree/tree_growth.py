# pylint: skip-file
"""
Filename: tree_growth.py

Descriptions:
    Tests recursive tree induction, routing and median prediction.
    NOTE:   Classes | TestGrowthConfig, TestGrow
"""

import unittest

import numpy as np

from dipoletree.core.data import Dataset
from dipoletree.core.kernel import KernelSpec
from dipoletree.tree.growth import GrowthConfig, grow, predict_median
from dipoletree.tree.serialization import dumps_model
from dipoletree.utilities.errors import DimensionError, UsageError


def two_groups() -> Dataset:
    """ Short survivors at x in [-3, -2], long ones at x in [2, 3] """
    offsets = np.arange(20) / 19.0
    x = np.concatenate((-3.0 + offsets, 2.0 + offsets))
    times = np.concatenate((1.0 + offsets, 10.0 + offsets))
    return Dataset.from_arrays(x, times, np.ones(40, dtype=int))


class TestGrowthConfig(unittest.TestCase):
    """ Unit tests for GrowthConfig """
    def test_invalid(self):
        """ Out of range settings """
        cases = [{"kappa": 0.0}, {"zeta1": 0.7}, {"min_node": 1}, {"min_child": 0}, {"max_rounds": 0}]

        for kwargs in cases:
            with self.assertRaises(UsageError):
                _ = GrowthConfig(**kwargs)

    def test_record(self):
        """ to_dict / from_dict """
        cfg = GrowthConfig(KernelSpec.polynomial(3, 0.5), kappa=2.0, min_node=20)
        self.assertEqual(GrowthConfig.from_dict(cfg.to_dict()), cfg)


class TestGrow(unittest.TestCase):
    """ Unit tests for grow and the tree queries """
    def setUp(self):
        self.dataset = two_groups()
        self.tree = grow(self.dataset, GrowthConfig(min_node=25))

    def test_two_group_split(self):
        """ One split separates the groups """
        self.assertEqual(self.tree.depth, 1)
        self.assertEqual(self.tree.n_leaves, 2)
        self.assertEqual([leaf.n_samples for leaf in self.tree.root.leaves()], [20, 20])
        self.assertGreater(self.tree.root.logrank, 20.0)

    def test_prediction(self):
        """ Leaf medians follow the group survival """
        short = self.dataset.standardization.apply([[-2.5]])[0]
        long = self.dataset.standardization.apply([[2.5]])[0]

        self.assertLess(predict_median(self.tree, short), 3.0)
        self.assertGreater(predict_median(self.tree, long), 9.0)

        with self.assertRaises(DimensionError):
            _ = predict_median(self.tree, np.zeros(2))

    def test_routing(self):
        """ Every training row reaches a leaf of the matching group """
        reached = self.tree.route(self.dataset.covariates)
        left, right = self.tree.root.left.node_id, self.tree.root.right.node_id

        self.assertEqual(set(reached[:20].tolist()) | set(reached[20:].tolist()), {left, right})
        self.assertEqual(len(set(reached[:20].tolist())), 1)
        self.assertNotEqual(reached[0], reached[-1])

    def test_node_bookkeeping(self):
        """ Preorder ids, child counts summing to the parent """
        ids = [node.node_id for node in self.tree.root.walk()]
        self.assertEqual(ids, list(range(self.tree.n_nodes)))

        for node in self.tree.root.internal_nodes():
            self.assertEqual(node.left.n_samples + node.right.n_samples, node.n_samples)
            self.assertEqual(node.left.depth, node.depth + 1)

    def test_terminal_conditions(self):
        """ Too few rows or nothing comparable give a single leaf """
        small = grow(self.dataset, GrowthConfig(min_node=100))
        self.assertEqual(small.n_nodes, 1)
        self.assertAlmostEqual(small.root.median, predict_median(small, np.zeros(1)))

        censored = Dataset.from_arrays(self.dataset.raw_covariates(), self.dataset.times, np.zeros(40, dtype=int))
        self.assertEqual(grow(censored, GrowthConfig(min_node=2)).n_nodes, 1)

        wide_child = grow(self.dataset, GrowthConfig(min_node=10, min_child=21))
        self.assertEqual(wide_child.n_nodes, 1)

    def test_deterministic(self):
        """ Growing twice yields identical model documents """
        cfg = GrowthConfig(KernelSpec.quadratic(), min_node=10)
        self.assertEqual(dumps_model(grow(self.dataset, cfg)), dumps_model(grow(self.dataset, cfg)))

    def test_gaussian_variance_resolved_once(self):
        """ The tree stores the variance of the training set """
        tree = grow(self.dataset, GrowthConfig(KernelSpec.gaussian(), min_node=25))
        self.assertIsNotNone(tree.config.kernel.variance)

    def test_collapse(self):
        """ Collapsing the root leaves one node with the root curve """
        collapsed = self.tree.collapse({0})

        self.assertEqual(collapsed.n_nodes, 1)
        self.assertIs(collapsed.root.km, self.tree.root.km)
        self.assertEqual(self.tree.n_nodes, 3)
