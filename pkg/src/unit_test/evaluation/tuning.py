# pylint: skip-file
"""
Filename: tuning.py

Descriptions:
    Tests k-fold evaluation and the search for kappa over a grid of
    log values.
    NOTE:   Classes | TestCrossValidate, TestTuneKappa
"""

import math
import unittest

from dipoletree.evaluation.tuning import (
    CvSummary, FoldResult, _select_eta, cross_validate, default_folds, tune_kappa
)
from dipoletree.simulation.hazards import preset, simulate
from dipoletree.tree.fitting import FitConfig
from dipoletree.tree.growth import GrowthConfig
from dipoletree.utilities.errors import NumericalError, UsageError


def _summary(eta: float, ci, ibs) -> CvSummary:
    return CvSummary(eta, (FoldResult(eta, 0, ci, ibs, 3, 1),))


class TestCrossValidate(unittest.TestCase):
    """ Unit tests for cross_validate """
    @classmethod
    def setUpClass(cls):
        cls.dataset = simulate(preset("planar", p=2, n=60, seed=3))

    def test_default_folds(self):
        """ 10 folds below 500 observations, 20 from there """
        self.assertEqual(default_folds(499), 10)
        self.assertEqual(default_folds(500), 20)

    def test_unsplit_trees(self):
        """ Single-node trees leave CI undefined and IBS defined """
        cfg = FitConfig(GrowthConfig(min_node=10_000))
        summary = cross_validate(self.dataset, cfg, k=3)

        self.assertEqual(len(summary.folds), 3)
        self.assertIsNone(summary.mean_ci)
        self.assertIsNotNone(summary.mean_ibs)
        self.assertTrue(all(fold.nodes_pruned == 1 for fold in summary.folds))
        self.assertEqual(summary.to_dict()["undefined_folds"], 0)

    def test_kappa_recorded(self):
        """ The summary carries eta = log(kappa) """
        cfg = FitConfig(GrowthConfig(kappa=math.e, min_node=20))
        summary = cross_validate(self.dataset, cfg, k=3)

        self.assertAlmostEqual(summary.eta, 1.0)
        self.assertEqual([fold.fold for fold in summary.folds], [0, 1, 2])


class TestTuneKappa(unittest.TestCase):
    """ Unit tests for tune_kappa and the eta selection rule """
    @classmethod
    def setUpClass(cls):
        cls.dataset = simulate(preset("planar", p=2, n=60, seed=3))
        cls.cfg = FitConfig(GrowthConfig(min_node=20))

    def test_single_eta(self):
        """ A one-point grid returns that point """
        result = tune_kappa(self.dataset, self.cfg, etas=(0.5,), k=3)

        self.assertEqual(result.best_eta, 0.5)
        self.assertAlmostEqual(result.best_kappa, math.exp(0.5))
        self.assertEqual(len(result.table()), 3)

    def test_parallel_matches_serial(self):
        """ Cells reduce in key order whatever the job count """
        serial = tune_kappa(self.dataset, self.cfg, etas=(-1.0, 1.0), k=3, jobs=1)
        parallel = tune_kappa(self.dataset, self.cfg, etas=(1.0, -1.0), k=3, jobs=2)

        self.assertEqual(serial.to_dict(), parallel.to_dict())

    def test_selection_rule(self):
        """ Largest CI, ties to the smaller eta, IBS when no CI exists """
        cases = [
            ([_summary(-1.0, 0.6, 0.2), _summary(0.0, 0.7, 0.3), _summary(1.0, 0.65, 0.1)], 0.0),
            ([_summary(-1.0, 0.7, 0.2), _summary(2.0, 0.7, 0.1)], -1.0),
            ([_summary(-1.0, None, 0.2), _summary(0.0, None, 0.15), _summary(1.0, None, 0.15)], 0.0),
            ([_summary(-2.0, None, None), _summary(3.0, 0.55, 0.3)], 3.0),
        ]

        for summaries, expected in cases:
            self.assertEqual(_select_eta(summaries), expected)

        with self.assertRaises(NumericalError):
            _ = _select_eta([_summary(0.0, None, None)])

    def test_invalid_arguments(self):
        """ Empty grid and too few folds """
        with self.assertRaises(UsageError):
            _ = tune_kappa(self.dataset, self.cfg, etas=(), k=3)

        with self.assertRaises(UsageError):
            _ = tune_kappa(self.dataset, self.cfg, etas=(0.0,), k=1)
