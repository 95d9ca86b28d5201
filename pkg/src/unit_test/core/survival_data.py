# pylint: skip-file
"""
Filename: survival_data.py

Descriptions:
    Tests CSV loading, standardization, right-comparable pairs,
    dipole labelling and the stratified splits.
    NOTE:   Classes | TestLoadCsv, TestComparablePairs,
            TestLabelDipoles, TestSplits
"""

import tempfile
import unittest
from pathlib import Path

import numpy as np

from dipoletree.core.data import (
    CsvSchema, Dataset, label_dipoles, load_csv, pair_set, right_comparable_pairs,
    stratified_folds, stratified_holdout, write_csv
)
from dipoletree.utilities.errors import DataError, EmptyLabelsError, SchemaError, UsageError


def _dataset(times, statuses, covariates=None):
    """ 1-D dataset with covariates 0..n-1 unless given """
    times = np.asarray(times, dtype=float)
    if covariates is None:
        covariates = np.arange(times.size, dtype=float)
    return Dataset.from_arrays(covariates, times, statuses)


class TestLoadCsv(unittest.TestCase):
    """ Unit tests for load_csv and write_csv """
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.root = Path(self.directory.name)

    def tearDown(self):
        self.directory.cleanup()

    def _write(self, text: str) -> Path:
        path = self.root / "data.csv"
        path.write_text(text, encoding="utf-8")
        return path

    def test_three_rows(self):
        """ (x1, time, status) with three rows gives n = 3, p = 1 """
        dataset = load_csv(self._write("x1,time,status\n1,2,1\n2,3,0\n3,4,1\n"))

        self.assertEqual(dataset.n, 3)
        self.assertEqual(dataset.p, 1)
        self.assertEqual(dataset.names, ("x1",))
        np.testing.assert_array_equal(dataset.statuses, [1, 0, 1])

    def test_bundled_remission(self):
        """ 42 subjects, 21 per arm, 30 relapses; every standard-arm subject relapses """
        path = Path(__file__).resolve().parents[1] / "data" / "remission.csv"
        dataset = load_csv(path, CsvSchema(exclude=("sex",)))

        self.assertEqual((dataset.n, dataset.p), (42, 2))
        self.assertEqual(dataset.names, ("logWBC", "TR"))
        self.assertEqual(int(dataset.statuses.sum()), 30)

        standard = dataset.standardization.invert(dataset.covariates)[:, 1] > 0.5
        self.assertEqual(int(standard.sum()), 21)
        self.assertEqual(int(dataset.statuses[standard].sum()), 21)

    def test_sample_standard_deviation(self):
        """ Column (1, 3) standardizes to -/+ 1/sqrt(2) with the n-1 convention """
        dataset = load_csv(self._write("x1,time,status\n1,2,1\n3,3,1\n"))
        np.testing.assert_allclose(dataset.covariates[:, 0], [-0.7071067811865476, 0.7071067811865476])

    def test_constant_column(self):
        """ A constant covariate keeps scale 1 """
        dataset = load_csv(self._write("x1,x2,time,status\n5,1,2,1\n5,2,3,1\n5,3,1,0\n"))
        np.testing.assert_allclose(dataset.covariates[:, 0], 0.0)
        self.assertEqual(dataset.standardization.scales[0], 1.0)

    def test_invalid_files(self):
        """ Schema, numeric and value errors """
        cases = [
            "x1,status\n1,1\n2,0\n",
            "x1,time,status\n1,2,1\nabc,3,0\n",
            "x1,time,status\n1,0,1\n2,3,0\n",
            "x1,time,status\n1,2,2\n2,3,0\n",
            "x1,time,status\n1,,1\n2,3,0\n",
            "time,status\n2,1\n3,0\n",
        ]

        for text in cases:
            with self.assertRaises(DataError):
                _ = load_csv(self._write(text))

    def test_missing_time_is_schema_error(self):
        """ Column 'time' absent """
        with self.assertRaises(SchemaError):
            _ = load_csv(self._write("x1,status\n1,1\n2,0\n"))

    def test_missing_file(self):
        """ Nonexistent path """
        with self.assertRaises(DataError):
            _ = load_csv(self.root / "absent.csv")

    def test_schema_mapping_and_exclude(self):
        """ Renamed outcome columns and an excluded id column """
        path = self._write("id,age,t,event\n1,50,2,1\n2,60,3,0\n3,70,4,1\n")
        dataset = load_csv(path, CsvSchema("t", "event", ("id",)))

        self.assertEqual(dataset.names, ("age",))
        np.testing.assert_array_equal(dataset.times, [2, 3, 4])

    def test_prediction_time_reuse(self):
        """ A supplied standardization is applied, not refit """
        train = load_csv(self._write("x1,time,status\n1,2,1\n3,3,1\n"))
        path = self.root / "test.csv"
        path.write_text("x1,time,status\n3,5,0\n", encoding="utf-8")

        test = load_csv(path, standardization=train.standardization, covariates=train.names)
        np.testing.assert_allclose(test.covariates[:, 0], [0.7071067811865476])

    def test_write_then_load(self):
        """ write_csv produces a file load_csv reads back """
        dataset = _dataset([3.5, 1.25, 7.0], [1, 0, 1], [[1.0, 10.0], [2.0, 30.0], [4.0, 20.0]])
        path = self.root / "copy.csv"
        write_csv(dataset, path)

        loaded = load_csv(path)
        np.testing.assert_allclose(loaded.raw_covariates(), dataset.raw_covariates())
        np.testing.assert_array_equal(loaded.statuses, dataset.statuses)


class TestComparablePairs(unittest.TestCase):
    """ Unit tests for right_comparable_pairs """
    def test_smaller_time_uncensored(self):
        """ (3, event), (5, censored) is comparable """
        self.assertEqual(pair_set(right_comparable_pairs(_dataset([3, 5], [1, 0]))), {(0, 1)})

    def test_smaller_time_censored(self):
        """ (3, censored), (5, event) is not """
        self.assertEqual(pair_set(right_comparable_pairs(_dataset([3, 5], [0, 1]))), set())

    def test_no_censoring(self):
        """ All pairs of three events """
        pairs = pair_set(right_comparable_pairs(_dataset([1, 2, 10], [1, 1, 1])))
        self.assertEqual(pairs, {(0, 1), (0, 2), (1, 2)})

    def test_tied_times(self):
        """ Ties are comparable when either observation is an event """
        cases = [([4, 4], [1, 0], {(0, 1)}), ([4, 4], [0, 1], {(0, 1)}), ([4, 4], [0, 0], set())]

        for times, statuses, expected in cases:
            self.assertEqual(pair_set(right_comparable_pairs(_dataset(times, statuses))), expected)

    def test_reversed_order(self):
        """ The smaller time may sit at the larger index """
        self.assertEqual(pair_set(right_comparable_pairs(_dataset([5, 3], [0, 1]))), {(0, 1)})


class TestLabelDipoles(unittest.TestCase):
    """ Unit tests for the pure / mixed labelling """
    def test_hand_enumerated_thresholds(self):
        """ times {1, 2, 10, 12}: pure {(0, 1)}, mixed the four widest pairs """
        labels = label_dipoles(_dataset([1, 2, 10, 12], [1, 1, 1, 1]), 0.4, 0.6)

        self.assertEqual(pair_set(labels.pure), {(0, 1)})
        self.assertEqual(pair_set(labels.mixed), {(0, 2), (0, 3), (1, 2), (1, 3)})
        np.testing.assert_array_equal(np.sort(labels.delta_t), [1, 2, 8, 9, 10, 11])

    def test_all_times_equal(self):
        """ Zero differences: every pair mixed, none pure """
        labels = label_dipoles(_dataset([5, 5, 5], [1, 1, 1]))

        self.assertEqual(pair_set(labels.pure), set())
        self.assertEqual(pair_set(labels.mixed), {(0, 1), (0, 2), (1, 2)})

    def test_single_pair(self):
        """ With one comparable pair the clamped threshold makes it mixed """
        labels = label_dipoles(_dataset([1, 3], [1, 1]))

        self.assertEqual(pair_set(labels.pure), set())
        self.assertEqual(pair_set(labels.mixed), {(0, 1)})

    def test_no_comparable_pairs(self):
        """ All censored """
        with self.assertRaises(EmptyLabelsError):
            _ = label_dipoles(_dataset([1, 2, 3], [0, 0, 0]))

    def test_invalid_zetas(self):
        """ zeta1 must lie below zeta2 inside (0, 1) """
        dataset = _dataset([1, 2, 3], [1, 1, 1])
        for zeta1, zeta2 in [(0.6, 0.3), (0.0, 0.5), (0.3, 1.0), (0.4, 0.4)]:
            with self.assertRaises(UsageError):
                _ = label_dipoles(dataset, zeta1, zeta2)

    def test_label_invariants(self):
        """ Disjointness, pure endpoints uncensored, mixed comparable """
        rng = np.random.default_rng(11)
        for _ in range(25):
            n = int(rng.integers(3, 25))
            dataset = _dataset(rng.exponential(5.0, n) + 0.01, rng.integers(0, 2, n))
            try:
                labels = label_dipoles(dataset)
            except EmptyLabelsError:
                continue

            pure, mixed = pair_set(labels.pure), pair_set(labels.mixed)
            comparable = pair_set(right_comparable_pairs(dataset))

            self.assertFalse(pure & mixed)
            self.assertTrue(mixed <= comparable)
            for i, j in pure:
                self.assertEqual((dataset.statuses[i], dataset.statuses[j]), (1, 1))

    def test_threshold_monotonicity(self):
        """ Raising zeta1 never shrinks pure, raising zeta2 never grows mixed """
        rng = np.random.default_rng(5)
        dataset = _dataset(rng.exponential(5.0, 30) + 0.01, rng.integers(0, 2, 30))

        previous_pure, previous_mixed = set(), None
        for zeta1, zeta2 in [(0.1, 0.5), (0.2, 0.6), (0.3, 0.7), (0.4, 0.8)]:
            labels = label_dipoles(dataset, zeta1, zeta2)
            pure, mixed = pair_set(labels.pure), pair_set(labels.mixed)

            self.assertTrue(previous_pure <= pure)
            if previous_mixed is not None:
                self.assertTrue(mixed <= previous_mixed)
            previous_pure, previous_mixed = pure, mixed

    def test_time_scaling(self):
        """ Multiplying every time by a constant leaves the labels unchanged """
        rng = np.random.default_rng(2)
        times, statuses = rng.exponential(3.0, 20) + 0.1, rng.integers(0, 2, 20)

        base = label_dipoles(_dataset(times, statuses))
        scaled = label_dipoles(_dataset(7.5 * times, statuses))

        self.assertEqual(pair_set(base.pure), pair_set(scaled.pure))
        self.assertEqual(pair_set(base.mixed), pair_set(scaled.mixed))

    def test_row_permutation(self):
        """ Relabelling rows permutes the labelled pairs """
        rng = np.random.default_rng(8)
        times, statuses = rng.exponential(3.0, 15) + 0.1, rng.integers(0, 2, 15)
        order = rng.permutation(15)

        base = label_dipoles(_dataset(times, statuses))
        permuted = label_dipoles(_dataset(times[order], statuses[order]))

        def back(pairs):
            return {tuple(sorted((int(order[i]), int(order[j])))) for i, j in pairs}

        self.assertEqual(back(pair_set(permuted.pure)), pair_set(base.pure))
        self.assertEqual(back(pair_set(permuted.mixed)), pair_set(base.mixed))


class TestSplits(unittest.TestCase):
    """ Unit tests for holdout, folds and subsets """
    def setUp(self):
        rng = np.random.default_rng(3)
        self.dataset = _dataset(rng.exponential(2.0, 40) + 0.1, [1] * 30 + [0] * 10)

    def test_holdout_keeps_status_mix(self):
        """ floor(0.25 * group) of each status group is held out """
        train, held = stratified_holdout(self.dataset, 0.25, np.random.default_rng(0))

        self.assertEqual(held.size, 7 + 2)
        self.assertEqual(set(train.tolist()) | set(held.tolist()), set(range(40)))
        self.assertFalse(set(train.tolist()) & set(held.tolist()))
        self.assertEqual(int(self.dataset.statuses[held].sum()), 7)

    def test_folds_partition(self):
        """ Folds are disjoint, cover every row and balance statuses """
        folds = stratified_folds(self.dataset, 4, np.random.default_rng(0))
        rows = np.concatenate(folds)

        self.assertEqual(sorted(rows.tolist()), list(range(40)))
        for fold in folds:
            self.assertEqual(fold.size, 10)
            self.assertIn(int(self.dataset.statuses[fold].sum()), (7, 8))

    def test_fold_count_bounds(self):
        """ k must lie in [2, n] """
        for k in (1, 41):
            with self.assertRaises(UsageError):
                _ = stratified_folds(self.dataset, k, np.random.default_rng(0))

    def test_subset_shares_standardization(self):
        """ Subsets keep the parent transform """
        subset = self.dataset.subset([3, 1, 4])

        self.assertIs(subset.standardization, self.dataset.standardization)
        np.testing.assert_array_equal(subset.times, self.dataset.times[[3, 1, 4]])

        with self.assertRaises(DataError):
            _ = self.dataset.subset([])
