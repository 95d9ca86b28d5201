# pylint: skip-file
"""
Filename: scoring.py

Descriptions:
    Tests the concordance index, the censoring-weighted Brier score,
    its integral and the evaluation of trees on test data.
    NOTE:   Classes | TestConcordance, TestBrier, TestEvaluate
"""

import unittest

import numpy as np

from dipoletree.core.data import Dataset
from dipoletree.tree.growth import GrowthConfig, grow
from dipoletree.tree.survival import KaplanMeier
from dipoletree.evaluation.metrics import (
    CensoringKM, EvalReport, brier_curve, brier_score, concordance_index, evaluate,
    evaluation_grid, integrated_brier
)
from dipoletree.utilities.errors import DataError, DimensionError


def flat_curve(level: float) -> KaplanMeier:
    """ S(t) = level for every t >= 0 """
    return KaplanMeier(np.array([0.0]), np.array([level]), np.array([1]), np.array([1]), 10.0, 1)


class TestConcordance(unittest.TestCase):
    """ Unit tests for concordance_index """
    def test_hand_cases(self):
        """ Perfect, reversed, tied predictions """
        cases = [
            ([1.0, 2.0, 3.0], [1.0, 2.0, 3.0], [1, 1, 1], 1.0),
            ([3.0, 2.0, 1.0], [1.0, 2.0, 3.0], [1, 1, 1], 0.0),
            ([1.0, 1.0, 2.0], [1.0, 2.0, 3.0], [1, 1, 1], 1.0),
            ([2.0, 1.0, 3.0], [1.0, 2.0, 3.0], [1, 0, 1], 0.5),
            ([1.0, 3.0, 2.0], [1.0, 2.0, 3.0], [1, 1, 1], 2 / 3),
        ]

        for predicted, times, statuses, expected in cases:
            self.assertAlmostEqual(concordance_index(predicted, times, statuses), expected)

    def test_undefined(self):
        """ No usable pair """
        self.assertIsNone(concordance_index([1.0, 2.0], [1.0, 2.0], [0, 1]))
        self.assertIsNone(concordance_index([5.0, 5.0, 5.0], [1.0, 2.0, 3.0], [1, 1, 1]))

    def test_length_mismatch(self):
        """ Predictions and outcomes must align """
        with self.assertRaises(DimensionError):
            _ = concordance_index([1.0], [1.0, 2.0], [1, 1])


class TestBrier(unittest.TestCase):
    """ Unit tests for brier_score, brier_curve and integrated_brier """
    def setUp(self):
        # (t = 1, censored) and (t = 2, event): G(1-) = 1, G(2-) = 1/2
        self.times, self.statuses = [1.0, 2.0], [0, 1]
        self.g = CensoringKM.fit(self.times, self.statuses)
        self.curves = [flat_curve(0.6), flat_curve(0.6)]

    def test_hand_computed(self):
        """ Both weighting branches at three times """
        cases = [(0.5, 0.24), (1.5, 0.16), (2.5, 0.36)]

        for t, expected in cases:
            self.assertAlmostEqual(brier_score(self.curves, self.times, self.statuses, self.g, t), expected)

    def test_uninformative_prediction(self):
        """ S = 1/2 without censoring scores 1/4 everywhere """
        times, statuses = [1.0, 2.0, 3.0, 4.0], [1, 1, 1, 1]
        g = CensoringKM.fit(times, statuses)
        scores, dropped = brier_curve([flat_curve(0.5)] * 4, times, statuses, g, [0.0, 1.5, 3.0, 5.0])

        np.testing.assert_allclose(scores, 0.25)
        self.assertEqual(dropped, 0)

    def test_zero_weights_dropped(self):
        """ An external G reaching 0 drops the later observation """
        g = CensoringKM.fit([1.0], [0])
        scores, dropped = brier_curve([flat_curve(0.6)] * 2, [0.5, 2.0], [1, 1], g, [0.25])

        self.assertEqual(dropped, 1)
        self.assertAlmostEqual(scores[0], 0.16)

    def test_invalid(self):
        """ Negative time and mismatched curves """
        with self.assertRaises(DataError):
            _ = brier_score(self.curves, self.times, self.statuses, self.g, -1.0)

        with self.assertRaises(DimensionError):
            _ = brier_curve(self.curves[:1], self.times, self.statuses, self.g, [1.0])

    def test_integrated(self):
        """ Trapezoid over the grid divided by its end """
        cases = [
            ([(0.0, 0.1), (5.0, 0.3), (10.0, 0.2)], 0.225),
            ([(0.0, 0.1), (5.0, 0.3), (5.0, 0.3), (10.0, 0.2)], 0.225),
            ([(0.0, 0.2), (4.0, 0.2)], 0.2),
            ([(0.0, 0.0), (8.0, 0.2)], 0.1),
        ]

        for curve, expected in cases:
            self.assertAlmostEqual(integrated_brier(curve), expected)

        with self.assertRaises(DataError):
            _ = integrated_brier([])

    def test_grid(self):
        """ 0, uncensored times and the largest time """
        grid = evaluation_grid([4.0, 1.0, 2.0, 7.0, 2.0], [1, 0, 1, 0, 1])
        np.testing.assert_array_equal(grid, [0.0, 2.0, 4.0, 7.0])


class TestEvaluate(unittest.TestCase):
    """ Unit tests for evaluate and EvalReport """
    def setUp(self):
        offsets = np.arange(20) / 19.0
        x = np.concatenate((-3.0 + offsets, 2.0 + offsets))
        times = np.concatenate((1.0 + offsets, 10.0 + offsets))
        self.dataset = Dataset.from_arrays(x, times, np.ones(40, dtype=int))

    def test_separating_tree(self):
        """ Between-group pairs are all concordant """
        report = evaluate(grow(self.dataset, GrowthConfig(min_node=25)), self.dataset)

        self.assertEqual(report.ci, 1.0)
        self.assertEqual(report.n_test, 40)
        self.assertTrue(0.0 <= report.ibs <= 1.0)

    def test_single_node(self):
        """ One leaf: CI undefined, IBS from the root curve """
        report = evaluate(grow(self.dataset, GrowthConfig(min_node=100)), self.dataset)

        self.assertIsNone(report.ci)
        self.assertAlmostEqual(report.ibs, integrated_brier(report.brier_curve, float(self.dataset.times.max())))
        self.assertEqual(report.brier_curve[0][0], 0.0)

    def test_dimension_mismatch(self):
        """ Test data must have the training covariates """
        tree = grow(self.dataset, GrowthConfig(min_node=100))
        other = Dataset.from_arrays(np.ones((3, 2)) * [[1.0], [2.0], [3.0]], [1.0, 2.0, 3.0], [1, 1, 1])

        with self.assertRaises(DimensionError):
            _ = evaluate(tree, other)

    def test_report_record(self):
        """ from_dict(to_dict) and the [0, 1] range check """
        report = EvalReport(0.7, 0.12, ((0.0, 0.0), (1.0, 0.2)), 5)
        self.assertEqual(EvalReport.from_dict(report.to_dict()), report)

        with self.assertRaises(DataError):
            _ = EvalReport(1.5, 0.1, (), 1)
