# pylint: skip-file
"""
Filename: fit_pipeline.py

Descriptions:
    Tests the grow, prune and select pipeline with a held-out part
    and with bootstrap correction.
    NOTE:   Classes | TestFitTree
"""

import unittest

import numpy as np

from dipoletree.core.data import Dataset
from dipoletree.simulation.hazards import preset, simulate
from dipoletree.tree.fitting import FitConfig, fit_tree
from dipoletree.tree.growth import GrowthConfig
from dipoletree.tree.serialization import dumps_model
from dipoletree.utilities.errors import UsageError, ValidationFallbackWarning


class TestFitTree(unittest.TestCase):
    """ Unit tests for fit_tree """
    @classmethod
    def setUpClass(cls):
        cls.dataset = simulate(preset("elliptical", p=2, n=160, seed=2))
        cls.cfg = FitConfig(GrowthConfig(min_node=15), seed=7)
        cls.result = fit_tree(cls.dataset, cls.cfg)

    def test_tiny_dataset(self):
        """ Four rows: no split, no spare validation rows """
        dataset = Dataset.from_arrays([0.0, 1.0, 2.0, 3.0], [1.0, 2.0, 3.0, 4.0], [1, 1, 0, 0])
        result = fit_tree(dataset)

        self.assertEqual(result.tree.n_nodes, 1)
        self.assertEqual(result.n_validation, 0)
        self.assertTrue(any(isinstance(note, ValidationFallbackWarning) for note in result.notes))

    def test_validation_without_events(self):
        """ Three events in thirty rows: the held-out quarter is all censored """
        rng = np.random.default_rng(4)
        statuses = np.zeros(30, dtype=int)
        statuses[:3] = 1
        dataset = Dataset.from_arrays(rng.normal(size=(30, 2)), rng.uniform(1.0, 10.0, size=30), statuses)

        result = fit_tree(dataset, FitConfig(GrowthConfig(min_node=40)))
        warnings = [note for note in result.notes if isinstance(note, ValidationFallbackWarning)]

        self.assertEqual(len(warnings), 1)
        self.assertIn("no event", warnings[0].message)
        self.assertEqual((result.n_train, result.n_validation), (30, 0))

    def test_holdout_sizes(self):
        """ A quarter of each status group is held out """
        statuses = self.dataset.statuses
        held = int(0.25 * statuses.sum()) + int(0.25 * (statuses.size - statuses.sum()))

        self.assertEqual(self.result.n_validation, held)
        self.assertEqual(self.result.n_train + self.result.n_validation, self.dataset.n)

    def test_selection(self):
        """ The selected subtree has the best score and belongs to the chain """
        scores = self.result.scores

        self.assertEqual(scores.shape, (len(self.result.sequence),))
        self.assertEqual(self.result.selected, int(np.flatnonzero(scores >= scores.max() - 1e-9)[0]))
        self.assertLessEqual(self.result.tree.n_nodes, self.result.full.n_nodes)

    def test_report(self):
        """ Counts and one entry per kept split """
        report = self.result.report()

        self.assertEqual(report["nodes"], self.result.full.n_nodes)
        self.assertEqual(report["nodes_pruned"], self.result.tree.n_nodes)
        self.assertEqual(len(report["splits"]), self.result.tree.n_internal)
        self.assertEqual(len(report["alphas"]), len(self.result.sequence) - 1)

        for split in report["splits"]:
            self.assertTrue(0.0 <= split["p_value"] <= 1.0)

    def test_deterministic(self):
        """ The same seed gives the same model """
        again = fit_tree(self.dataset, self.cfg)

        self.assertEqual(dumps_model(again.tree), dumps_model(self.result.tree))
        np.testing.assert_array_equal(again.scores, self.result.scores)

    def test_bootstrap(self):
        """ All rows train when bootstrap correction is on """
        result = fit_tree(self.dataset, FitConfig(GrowthConfig(min_node=25), bootstrap=2, seed=1))

        self.assertEqual(result.n_train, self.dataset.n)
        self.assertEqual(result.n_validation, 0)

    def test_invalid_config(self):
        """ Negative bootstrap, fraction outside [0, 1), negative alpha """
        with self.assertRaises(UsageError):
            _ = FitConfig(bootstrap=-1)

        with self.assertRaises(UsageError):
            _ = FitConfig(validation_fraction=1.0)

        with self.assertRaises(UsageError):
            _ = fit_tree(self.dataset, FitConfig(alpha_c=-1.0))
