# pylint: skip-file
"""
Filename: survival_curves.py

Descriptions:
    Tests the Kaplan-Meier estimator, its median and the log-rank
    statistic against hand-computed values.
    NOTE:   Classes | TestKaplanMeier, TestLogrank
"""

import unittest

import numpy as np

from dipoletree.tree.survival import (
    KaplanMeier, Outcomes, kaplan_meier, km_median, logrank_pvalue, logrank_statistic, median_reached
)
from dipoletree.utilities.errors import DataError


class TestKaplanMeier(unittest.TestCase):
    """ Unit tests for kaplan_meier and km_median """
    def test_all_events(self):
        """ Times {1, 2, 3}: S = 2/3, 1/3, 0 """
        km = kaplan_meier([1.0, 2.0, 3.0], [1, 1, 1])

        np.testing.assert_allclose(km.survival, [2 / 3, 1 / 3, 0.0])
        np.testing.assert_array_equal(km.at_risk, [3, 2, 1])
        self.assertEqual(km_median(km), 2.0)

    def test_censoring(self):
        """ {1 event, 2 censored, 3 event}: S(2) = 2/3, S(3) = 0 """
        km = kaplan_meier([1.0, 2.0, 3.0], [1, 0, 1])

        self.assertAlmostEqual(km.survival_at(2.0), 2 / 3)
        self.assertEqual(km.survival_at(3.0), 0.0)
        np.testing.assert_array_equal(km.event_times, [1.0, 3.0])

    def test_right_continuity(self):
        """ S(t) jumps at t, S(t-) does not """
        km = kaplan_meier([1.0, 2.0, 3.0], [1, 1, 1])
        cases = [(0.5, 1.0, 1.0), (1.0, 2 / 3, 1.0), (1.5, 2 / 3, 2 / 3), (2.0, 1 / 3, 2 / 3), (10.0, 0.0, 0.0)]

        for t, at, before in cases:
            self.assertAlmostEqual(km.survival_at(t), at)
            self.assertAlmostEqual(km.survival_before(t), before)

        np.testing.assert_allclose(km.survival_at(np.array([0.5, 2.5])), [1.0, 1 / 3])

    def test_tied_times(self):
        """ Two deaths at t = 2 share one risk set """
        km = kaplan_meier([2.0, 2.0, 4.0, 5.0], [1, 1, 0, 1])

        np.testing.assert_allclose(km.survival, [0.5, 0.0])
        np.testing.assert_array_equal(km.deaths, [2, 1])

    def test_median_fallback(self):
        """ A curve above one half falls back to the largest time """
        km = kaplan_meier([1.0, 4.0, 6.0, 9.0], [1, 0, 0, 0])

        self.assertFalse(median_reached(km))
        self.assertEqual(km_median(km), 9.0)

    def test_all_censored(self):
        """ S = 1 throughout """
        km = kaplan_meier([1.0, 2.0], [0, 0])

        self.assertEqual(km.event_times.size, 0)
        self.assertEqual(km.survival_at(5.0), 1.0)
        self.assertEqual(km_median(km), 2.0)

    def test_empty_and_mismatched(self):
        """ No observations or unequal arrays """
        with self.assertRaises(DataError):
            _ = kaplan_meier([], [])

        with self.assertRaises(DataError):
            _ = Outcomes([1.0, 2.0], [1])

    def test_record(self):
        """ to_dict / from_dict keep the curve """
        km = kaplan_meier([1.0, 3.0, 3.0, 7.0], [1, 1, 0, 1])
        rebuilt = KaplanMeier.from_dict(km.to_dict())

        np.testing.assert_array_equal(rebuilt.survival, km.survival)
        self.assertEqual(rebuilt.max_time, 7.0)
        self.assertEqual(rebuilt.n_samples, 4)


class TestLogrank(unittest.TestCase):
    """ Unit tests for logrank_statistic """
    def test_separated_groups(self):
        """ A = {1, 2}, B = {3, 4}, all events """
        statistic = logrank_statistic(Outcomes([1.0, 2.0], [1, 1]), Outcomes([3.0, 4.0], [1, 1]))
        self.assertAlmostEqual(statistic, (7 / 6) ** 2 / (1 / 4 + 2 / 9), places=12)

    def test_symmetric(self):
        """ Swapping the groups keeps the statistic """
        rng = np.random.default_rng(12)
        left = Outcomes(rng.exponential(1.0, 15), rng.integers(0, 2, 15))
        right = Outcomes(rng.exponential(2.0, 11), rng.integers(0, 2, 11))

        self.assertAlmostEqual(logrank_statistic(left, right), logrank_statistic(right, left), places=12)

    def test_degenerate_groups(self):
        """ Empty groups and no events give 0 """
        cases = [
            (Outcomes([], []), Outcomes([1.0], [1])),
            (Outcomes([1.0, 2.0], [0, 0]), Outcomes([3.0], [0])),
            (Outcomes([5.0, 6.0], [1, 1]), Outcomes([1.0, 2.0], [0, 0])),
        ]

        for left, right in cases:
            self.assertEqual(logrank_statistic(left, right), 0.0)

    def test_input_forms(self):
        """ (t, d) pairs and Outcomes agree """
        pairs = logrank_statistic([(1.0, 1), (2.0, 1)], [(3.0, 1), (4.0, 0)])
        arrays = logrank_statistic(Outcomes([1.0, 2.0], [1, 1]), Outcomes([3.0, 4.0], [1, 0]))
        self.assertEqual(pairs, arrays)

    def test_pvalue(self):
        """ Chi-square upper tail with one degree of freedom """
        self.assertAlmostEqual(logrank_pvalue(3.841458820694124), 0.05, places=9)
        self.assertEqual(logrank_pvalue(0.0), 1.0)
