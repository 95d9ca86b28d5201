# pylint: skip-file
"""
Filename: tree_pruning.py

Descriptions:
    Tests weakest-link pruning, split-complexity scoring and subtree
    selection on hand-built and simulated trees.
    NOTE:   Classes | TestPruneSequence, TestSubtreeScores
"""

import unittest

import numpy as np

from dipoletree.core.data import Dataset, Standardization
from dipoletree.core.splitter import Hyperplane
from dipoletree.simulation.hazards import preset, simulate
from dipoletree.tree.growth import GrowthConfig, SurvivalTree, TreeNode, grow
from dipoletree.tree.pruning import (
    check_alpha, prune_sequence, select_index, select_subtree, split_complexity,
    subtree_scores, validation_logranks
)
from dipoletree.tree.survival import kaplan_meier
from dipoletree.utilities.errors import UsageError


def _node(node_id: int, depth: int) -> TreeNode:
    km = kaplan_meier([1.0, 2.0], [1, 1])
    return TreeNode(node_id, depth, km, 1.0, 2)


def hand_tree(root_g: float, left_g: float, right_g: float) -> SurvivalTree:
    """ Root f = x with children f = x + 1 and f = x - 1, seven nodes """
    root, left, right = _node(0, 0), _node(1, 1), _node(4, 1)

    root.split, root.logrank = Hyperplane(0.0, np.array([1.0])), root_g
    left.split, left.logrank = Hyperplane(1.0, np.array([1.0])), left_g
    right.split, right.logrank = Hyperplane(-1.0, np.array([1.0])), right_g

    left.left, left.right = _node(2, 2), _node(3, 2)
    right.left, right.right = _node(5, 2), _node(6, 2)
    root.left, root.right = left, right

    return SurvivalTree(root, Standardization(np.zeros(1), np.ones(1)), GrowthConfig(), ("x1",))


def _training_score(tree: SurvivalTree, alpha: float) -> float:
    internal = tree.root.internal_nodes()
    return sum(node.logrank for node in internal) - alpha * len(internal)


class TestPruneSequence(unittest.TestCase):
    """ Unit tests for prune_sequence """
    def test_thresholds(self):
        """ Log-ranks (10, 1, 3) collapse left, right, then the root """
        sequence = prune_sequence(hand_tree(10.0, 1.0, 3.0))

        np.testing.assert_allclose(sequence.alphas, [1.0, 3.0, 10.0])
        self.assertEqual(sequence.collapsed, ((1,), (4,), (0,)))
        self.assertEqual([tree.n_internal for tree in sequence.subtrees], [3, 2, 1, 0])

    def test_tied_branches(self):
        """ Equal ratios are removed in one step """
        sequence = prune_sequence(hand_tree(10.0, 1.0, 1.0))

        np.testing.assert_allclose(sequence.alphas, [1.0, 10.0])
        self.assertEqual(sequence.collapsed, ((1, 4), (0,)))

    def test_index_for(self):
        """ Subtree in force at a threshold """
        sequence = prune_sequence(hand_tree(10.0, 1.0, 3.0))
        cases = [(0.5, 0), (1.0, 1), (2.0, 1), (5.0, 2), (11.0, 3)]

        for alpha, expected in cases:
            self.assertEqual(sequence.index_for(alpha), expected)

    def test_single_node(self):
        """ A leaf-only tree has an empty chain """
        sequence = prune_sequence(hand_tree(1.0, 1.0, 1.0).collapse({0}))

        self.assertEqual(len(sequence), 1)
        self.assertEqual(sequence.alphas, ())

    def test_chain_on_simulated_trees(self):
        """ Nested subtrees, increasing thresholds, optimal inside their interval """
        for seed in range(4):
            dataset = simulate(preset("elliptical", p=2, n=150, seed=seed))
            sequence = prune_sequence(grow(dataset, GrowthConfig(min_node=15)))
            alphas = np.asarray(sequence.alphas)

            self.assertTrue(np.all(np.diff(alphas) > 0))
            self.assertEqual(sequence.subtrees[-1].n_nodes, 1)

            for larger, smaller in zip(sequence.subtrees, sequence.subtrees[1:]):
                kept = {node.node_id for node in smaller.root.walk()}
                self.assertTrue(kept < {node.node_id for node in larger.root.walk()})

            bounds = [0.0, *alphas.tolist()]
            midpoints = [0.5 * (low + high) for low, high in zip(bounds, bounds[1:])] + [bounds[-1] + 1.0]
            for k, alpha in enumerate(midpoints):
                scores = [_training_score(tree, alpha) for tree in sequence.subtrees]
                self.assertGreaterEqual(scores[k], max(scores) - 1e-9)


class TestSubtreeScores(unittest.TestCase):
    """ Unit tests for split complexity and selection """
    def setUp(self):
        self.tree = hand_tree(10.0, 1.0, 3.0)
        # Events fall in order of the covariate
        x = np.array([-3.0, -2.5, -0.8, -0.2, 0.3, 0.7, 1.6, 2.4])
        self.validation = Dataset.from_arrays(
            x, np.arange(1.0, 9.0), np.ones(8, dtype=int), standardization=self.tree.standardization
        )

    def test_validation_logranks(self):
        """ One statistic per internal node """
        statistics = validation_logranks(self.tree, self.validation)

        self.assertEqual(set(statistics), {0, 1, 4})
        self.assertTrue(all(value > 0 for value in statistics.values()))

    def test_scores_match_split_complexity(self):
        """ Chain scores agree with scoring each subtree directly """
        sequence = prune_sequence(self.tree)
        scores = subtree_scores(sequence, 3.0, self.validation)

        for tree, score in zip(sequence.subtrees, scores):
            self.assertAlmostEqual(score, split_complexity(tree, 3.0, self.validation))

    def test_split_complexity_by_hand(self):
        """ Left pair dies at t = 1, 2 and the right pair later: chi-square 49/17 """
        sequence = prune_sequence(self.tree)
        stump = next(tree for tree in sequence.subtrees if tree.n_internal == 1)
        validation = Dataset.from_arrays(
            [-2.0, -1.0, 1.0, 2.0], [1.0, 2.0, 3.0, 4.0], np.ones(4, dtype=int),
            standardization=self.tree.standardization
        )

        # O - E = 2 - (1/2 + 1/3), V = 1/4 + 2/9
        for alpha, expected in [(0.0, 49 / 17), (1.0, 32 / 17), (4.0, 49 / 17 - 4.0)]:
            self.assertAlmostEqual(split_complexity(stump, alpha, validation), expected, places=12)

        root_only = sequence.subtrees[-1]
        self.assertEqual(split_complexity(root_only, 3.0, validation), 0.0)

    def test_select_index_prefers_larger(self):
        """ The first maximum wins """
        self.assertEqual(select_index(np.array([1.0, 3.0, 3.0, 0.0])), 1)
        self.assertEqual(select_index(np.array([0.0, 0.0])), 0)

    def test_large_alpha_prunes_to_root(self):
        """ A huge penalty leaves the root only """
        sequence = prune_sequence(self.tree)
        chosen = select_subtree(sequence, 1e6, self.validation)
        self.assertEqual(chosen.n_nodes, 1)

    def test_invalid_alpha(self):
        """ Negative thresholds and missing validation data """
        with self.assertRaises(UsageError):
            check_alpha(-1.0)

        with self.assertRaises(UsageError):
            _ = split_complexity(self.tree, -1.0, self.validation)

        with self.assertRaises(UsageError):
            _ = subtree_scores(prune_sequence(self.tree), 3.0)

    def test_bootstrap_scores(self):
        """ Bootstrap correction scores every subtree of a grown chain """
        dataset = simulate(preset("planar", p=2, n=80, seed=1))
        sequence = prune_sequence(grow(dataset, GrowthConfig(min_node=20)))
        scores = subtree_scores(sequence, 3.0, bootstrap=2, training=dataset, seed=5)

        self.assertEqual(scores.shape, (len(sequence),))
        self.assertTrue(np.all(np.isfinite(scores)))
        self.assertEqual(scores[-1], 0.0)
        np.testing.assert_array_equal(scores, subtree_scores(sequence, 3.0, bootstrap=2, training=dataset, seed=5))
