# pylint: skip-file
"""
Filename: splitting.py

Descriptions:
    Tests dipole orientation, hinge weights, the kernelized dual and
    the reorientation loop of the node splitter.
    NOTE:   Classes | TestOrientation, TestBetaWeights, TestInitialHyperplane,
            TestDualRound, TestFitSplit
"""

import unittest

import numpy as np
from scipy.optimize import minimize_scalar

from dipoletree.core.data import Dataset, DipoleLabels, label_dipoles
from dipoletree.core.kernel import KernelSpec, gram_matrix
from dipoletree.core.qp import QpSolution, QpStatus, solve
from dipoletree.core.splitter import (
    BetaWeights, DipoleKind, Hyperplane, Margin, OrientationAssignment, SplitModel,
    assemble_dual, beta_weights, decision_value, dipole_penalty, fit_split, hinge_pair,
    initial_hyperplane, initial_paraboloid, intercept_interval, orient_dipoles, recover_intercept,
    regularized_criterion, weighted_hinge
)
from dipoletree.utilities.errors import DegenerateSplitError, UsageError


def _labels(pure=(), mixed=()) -> DipoleLabels:
    """ Hand-built labels; the Delta-T vector is irrelevant to the splitter """
    return DipoleLabels(np.array(pure, dtype=int), np.array(mixed, dtype=int), 0.3, 0.6, np.zeros(0))


def _empty() -> np.ndarray:
    return np.empty((0, 2), dtype=np.int64)


def _random_dataset(seed: int, n: int = 40, p: int = 2) -> Dataset:
    """ Hazard rising with the first covariate """
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, p))
    times = rng.exponential(1.0 / np.exp(X[:, 0])) + 0.01
    statuses = (rng.uniform(size=n) < 0.8).astype(int)
    return Dataset.from_arrays(X, times, statuses)


class TestOrientation(unittest.TestCase):
    """ Unit tests for hinge_pair, dipole_penalty and orient_dipoles """
    def test_hinge_pair(self):
        """ (max(0, eps - v), max(0, eps + v)) """
        cases = [(0.0, 1.0, (1.0, 1.0)), (2.0, 1.0, (0.0, 3.0)), (-0.5, 1.0, (1.5, 0.5))]

        for value, epsilon, expected in cases:
            self.assertEqual(hinge_pair(value, epsilon), expected)

        with self.assertRaises(UsageError):
            _ = hinge_pair(0.0, 0.0)

    def test_penalty_variants(self):
        """ f(x_j) = 0.5, f(x_k) = -2 with eps = 1 """
        cases = [
            (DipoleKind.PURE, True, 0.5 + 3.0),
            (DipoleKind.PURE, False, 1.5 + 0.0),
            (DipoleKind.MIXED, True, 0.5 + 0.0),
            (DipoleKind.MIXED, False, 1.5 + 3.0),
        ]

        for kind, positive, expected in cases:
            self.assertAlmostEqual(float(dipole_penalty(kind, positive, 0.5, -2.0, 1.0)), expected)

    def test_chosen_variant_is_cheaper(self):
        """ 10000 random dipoles: the chosen orientation never costs more """
        rng = np.random.default_rng(0)
        values = rng.normal(scale=2.0, size=20000)
        values[:2000] = np.round(values[:2000] * 2) / 2
        pairs = np.arange(20000).reshape(-1, 2)

        assign = orient_dipoles(_labels(pairs, pairs), values)
        self.assertEqual(assign.n_dipoles, 20000)

        groups = [
            (DipoleKind.PURE, assign.pure_pos, True), (DipoleKind.PURE, assign.pure_neg, False),
            (DipoleKind.MIXED, assign.mixed_pos, True), (DipoleKind.MIXED, assign.mixed_neg, False),
        ]
        for kind, chosen, positive in groups:
            first, second = values[chosen[:, 0]], values[chosen[:, 1]]
            taken = dipole_penalty(kind, positive, first, second, 1.0)
            other = dipole_penalty(kind, not positive, first, second, 1.0)
            self.assertTrue(np.all(taken <= other + 1e-12))

    def test_zero_is_positive(self):
        """ Ties orient positive """
        assign = orient_dipoles(_labels([(0, 1)], [(2, 3)]), np.array([1.0, -1.0, 0.5, 0.5]))

        self.assertEqual(assign.pure_pos.shape[0], 1)
        self.assertEqual(assign.mixed_pos.shape[0], 1)

    def test_surface_argument(self):
        """ A surface and its precomputed values orient alike """
        points = np.array([[0.0], [1.0], [3.0]])
        plane = Hyperplane(-1.5, np.array([1.0]))
        labels = _labels([(0, 2)], [(0, 1), (1, 2)])

        direct = orient_dipoles(labels, plane, points)
        values = orient_dipoles(labels, plane.values(points))
        for name in ("pure_pos", "pure_neg", "mixed_pos", "mixed_neg"):
            np.testing.assert_array_equal(getattr(direct, name), getattr(values, name))


class TestBetaWeights(unittest.TestCase):
    """ Unit tests for beta_weights and weighted_hinge """
    def test_aggregation(self):
        """ Pure-positive (0, 1) and mixed-negative (0, 2) """
        assign = OrientationAssignment(np.array([[0, 1]]), _empty(), _empty(), np.array([[0, 2]]))
        betas = beta_weights(assign, 3)

        np.testing.assert_array_equal(betas.beta_plus, [1, 1, 1])
        np.testing.assert_array_equal(betas.beta_minus, [1, 0, 0])
        self.assertEqual(betas.total, 4.0)

    def test_hinge_matches_penalties(self):
        """ The weighted hinge equals the summed dipole penalties """
        rng = np.random.default_rng(6)
        values = rng.normal(size=12)
        pairs = np.array([(i, j) for i in range(12) for j in range(i + 1, 12)])
        labels = _labels(pairs[::3], pairs[1::3])

        assign = orient_dipoles(labels, values)
        total = sum(
            float(dipole_penalty(kind, positive, values[group[:, 0]], values[group[:, 1]], 1.0).sum())
            for kind, group, positive in [
                (DipoleKind.PURE, assign.pure_pos, True), (DipoleKind.PURE, assign.pure_neg, False),
                (DipoleKind.MIXED, assign.mixed_pos, True), (DipoleKind.MIXED, assign.mixed_neg, False),
            ]
        )
        self.assertAlmostEqual(weighted_hinge(values, beta_weights(assign, 12), 1.0), total, places=10)

    def test_criterion(self):
        """ 1/2 |w|^2 plus kappa times the hinge """
        plane = Hyperplane(0.0, np.array([2.0]))
        betas = BetaWeights(np.array([1.0, 0.0]), np.array([0.0, 1.0]))
        points = np.array([[0.25], [-1.0]])

        # f = (0.5, -2): hinge 0.5 + 0
        self.assertAlmostEqual(regularized_criterion(plane, betas, 3.0, 1.0, points), 2.0 + 1.5)


class TestInitialHyperplane(unittest.TestCase):
    """ Unit tests for the univariate median start """
    def setUp(self):
        self.points = np.array([[-1.0, -1.0], [1.0, -1.0], [-1.0, 1.0], [1.0, 1.0]])

    def test_best_covariate(self):
        """ Mixed dipoles across the second covariate """
        plane = initial_hyperplane(self.points, _labels(mixed=[(0, 2), (1, 3)]), 1.0, 1.0)

        np.testing.assert_array_equal(plane.slopes, [0.0, 1.0])
        self.assertEqual(plane.intercept, 0.0)

    def test_tie_takes_lowest_index(self):
        """ A diagonal dipole is split equally well by both covariates """
        plane = initial_hyperplane(self.points, _labels(mixed=[(0, 3)]), 1.0, 1.0)
        np.testing.assert_array_equal(plane.slopes, [1.0, 0.0])


class TestDualRound(unittest.TestCase):
    """ One orientation round solved through the dual """
    def _round(self, dataset, spec, kappa):
        X = dataset.covariates
        labels = label_dipoles(dataset)
        gram = gram_matrix(spec, X)
        betas = beta_weights(orient_dipoles(labels, initial_hyperplane(X, labels, kappa, 1.0), X), dataset.n)

        dual = assemble_dual(betas, gram, kappa, 1.0)
        solution = solve(dual.problem)
        mu_plus, mu_minus = dual.expand(solution.mu)
        coefficients = mu_plus - mu_minus
        g = gram @ coefficients

        low, high = intercept_interval(g, betas, 1.0)
        intercept = float(np.clip(recover_intercept(solution, dual, betas, gram, kappa, 1.0), low, high))
        primal = 0.5 * float(coefficients @ g) + kappa * weighted_hinge(intercept + g, betas, 1.0)
        return solution, betas, coefficients, primal

    def test_duality_gap(self):
        """ Primal and dual objectives meet within 1e-4 relative """
        for seed in range(8):
            for spec in (KernelSpec.linear(), KernelSpec.quadratic(), KernelSpec.gaussian(1.0)):
                solution, _, _, primal = self._round(_random_dataset(seed), spec, 1.0)

                self.assertIs(solution.status, QpStatus.SOLVED)
                self.assertGreaterEqual(primal, solution.objective - 1e-6 * (1.0 + abs(primal)))
                self.assertLessEqual(primal - solution.objective, 1e-4 * (1.0 + abs(primal)))

    def test_primal_minimum_one_covariate(self):
        """ Direct minimization over (w, w0) reaches the recovered primal """
        dataset = _random_dataset(3, n=30, p=1)
        x = dataset.covariates[:, 0]
        solution, betas, coefficients, primal = self._round(dataset, KernelSpec.linear(), 1.0)

        def profile(w):
            low, high = intercept_interval(w * x, betas, 1.0)
            w0 = low if np.isfinite(low) else high
            if np.isfinite(low) and np.isfinite(high):
                w0 = 0.5 * (low + high)
            return 0.5 * w * w + weighted_hinge(w0 + w * x, betas, 1.0)

        best = minimize_scalar(profile, bounds=(-50.0, 50.0), method="bounded", options={"xatol": 1e-9})
        self.assertAlmostEqual(primal, best.fun, delta=1e-5 * (1.0 + abs(best.fun)))
        self.assertAlmostEqual(float(coefficients @ x), best.x, delta=1e-3)

    def test_all_weights_zero(self):
        """ Nothing to penalize """
        betas = BetaWeights(np.zeros(3), np.zeros(3))
        with self.assertRaises(DegenerateSplitError):
            _ = assemble_dual(betas, np.eye(3), 1.0, 1.0)

    def _given(self, points, betas, mu, kappa):
        """ Intercept for a hand-set dual point under the linear kernel """
        gram = gram_matrix(KernelSpec.linear(), np.asarray(points, dtype=float))
        dual = assemble_dual(betas, gram, kappa, 1.0)
        solution = QpSolution(np.asarray(mu, dtype=float), 0.0, 0, QpStatus.SOLVED)
        return recover_intercept(solution, dual, betas, gram, kappa, 1.0)

    def test_intercept_free_support(self):
        """ Points +/-1, mu = (0.5, 0.5), kappa = 10: both candidates give 0 """
        betas = BetaWeights(np.array([1.0, 0.0]), np.array([0.0, 1.0]))
        self.assertAlmostEqual(self._given([[1.0], [-1.0]], betas, [0.5, 0.5], 10.0), 0.0, places=12)

    def test_intercept_without_free_support(self):
        """ Saturated pair bounds w0 to [-0.5, 0.5], an idle point raises the floor to -0.25 """
        points = [[1.0], [-1.0], [2.5]]
        betas = BetaWeights(np.array([1.0, 0.0, 1.0]), np.array([0.0, 1.0, 0.0]))

        # Variables run (0, +), (2, +), (1, -)
        self.assertAlmostEqual(self._given(points, betas, [0.25, 0.0, 0.25], 0.25), 0.125, places=12)

        # One-sided: only the finite end
        one_sided = BetaWeights(np.array([1.0, 1.0]), np.zeros(2))
        self.assertAlmostEqual(self._given([[0.0], [1.0]], one_sided, [0.0, 0.0], 1.0), 1.0, places=12)

    def test_intercept_mirrored(self):
        """ Data mirrored about the origin with mirrored weights """
        points = np.array([[2.0], [1.0], [-1.0], [-2.0]])
        betas = BetaWeights(np.array([1.0, 1.0, 0.0, 0.0]), np.array([0.0, 0.0, 1.0, 1.0]))
        gram = gram_matrix(KernelSpec.linear(), points)

        for kappa in (0.1, 1.0, 10.0):
            dual = assemble_dual(betas, gram, kappa, 1.0)
            solution = solve(dual.problem)
            self.assertAlmostEqual(recover_intercept(solution, dual, betas, gram, kappa, 1.0), 0.0, places=5)


class TestFitSplit(unittest.TestCase):
    """ Unit tests for fit_split """
    def test_single_mixed_dipole(self):
        """ Points -/+1 split by f(x) = x with objective 1/2 """
        points = np.array([[1.0], [-1.0]])
        model = fit_split(points, _labels(mixed=[(0, 1)]), KernelSpec.linear(), kappa=10.0)

        self.assertAlmostEqual(model.intercept, 0.0, places=5)
        np.testing.assert_allclose(model.values(points), [1.0, -1.0], atol=1e-5)
        self.assertAlmostEqual(model.objective, 0.5, places=5)
        self.assertLessEqual(model.rounds, 2)

    def test_single_pure_dipole(self):
        """ Both points on the positive side with no slope """
        points = np.array([[1.0], [2.0]])
        model = fit_split(points, _labels(pure=[(0, 1)]), KernelSpec.linear(), kappa=10.0)

        np.testing.assert_allclose(model.coefficients, 0.0, atol=1e-9)
        self.assertAlmostEqual(model.intercept, 1.0, places=6)
        self.assertAlmostEqual(model.objective, 0.0, places=6)
        self.assertAlmostEqual(decision_value(model, [5.0]), 1.0, places=6)

    def test_quadratic_surface(self):
        """ The middle point is split from the outer two by 2x^2 - 1 """
        points = np.array([[-1.0], [0.0], [1.0]])
        labels = _labels(pure=[(0, 2)], mixed=[(0, 1), (1, 2)])

        for kappa in (1.0, 10.0):
            model = fit_split(points, labels, KernelSpec.quadratic(), kappa=kappa)
            values = model.values(points)

            self.assertAlmostEqual(model.objective, 2.0, places=4)
            np.testing.assert_allclose(values, [1.0, -1.0, 1.0], atol=1e-4)
            self.assertEqual(np.sign(values[0]), np.sign(values[2]))
            self.assertNotEqual(np.sign(values[0]), np.sign(values[1]))
            self.assertAlmostEqual(decision_value(model, [0.5]), -0.5, places=4)

    def test_median_start_alone_collapses(self):
        """ From f = x both mixed dipoles point the same way and the fit is constant """
        points = np.array([[-1.0], [0.0], [1.0]])
        labels = _labels(pure=[(0, 2)], mixed=[(0, 1), (1, 2)])
        start = initial_hyperplane(points, labels, 1.0, 1.0)

        model = fit_split(points, labels, KernelSpec.quadratic(), kappa=1.0, initial=start)
        self.assertGreater(model.objective, 2.0 + 1e-3)

    def test_folded_start(self):
        """ One covariate folded at its median: values (0, -3, 0) """
        points = np.array([[-1.0], [0.0], [1.0]])
        labels = _labels(pure=[(0, 2)], mixed=[(0, 1), (1, 2)])

        folded = initial_paraboloid(points, labels, KernelSpec.quadratic(), 1.0, 1.0)
        np.testing.assert_allclose(folded.values(points), [0.0, -3.0, 0.0])
        self.assertAlmostEqual(folded.ridge_norm(), 9.0)

        assign = orient_dipoles(labels, folded, points)
        np.testing.assert_array_equal(assign.mixed_pos, [[0, 1]])
        np.testing.assert_array_equal(assign.mixed_neg, [[1, 2]])

        self.assertIsNone(initial_paraboloid(points, labels, KernelSpec.linear(), 1.0, 1.0))
        self.assertIsNone(initial_paraboloid(points, labels, KernelSpec.gaussian(1.0), 1.0, 1.0))

    def test_linear_recovery(self):
        """ Groups separated along the first covariate give a normal near e1 """
        x2 = -3.0 + 6.0 * np.arange(10) / 9.0
        X = np.vstack([np.column_stack((-np.ones(10), x2)), np.column_stack((np.ones(10), x2))])
        times = np.concatenate((1.0 + 0.1 * np.arange(10), 100.0 + 0.1 * np.arange(10)))
        dataset = Dataset.from_arrays(X, times, np.ones(20, dtype=int))

        model = fit_split(dataset, label_dipoles(dataset), KernelSpec.linear(), kappa=1e6)
        w = model.coefficients @ model.support
        angle = np.degrees(np.arccos(abs(w[0]) / np.linalg.norm(w)))

        self.assertLessEqual(angle, 2.0)

    def test_criterion_never_increases(self):
        """ Computed rounds improve on each other and the result on the start """
        for seed in range(6):
            dataset = _random_dataset(seed)
            labels = label_dipoles(dataset)
            X = dataset.covariates

            for spec in (KernelSpec.linear(), KernelSpec.quadratic()):
                start = initial_hyperplane(X, labels, 1.0, 1.0)
                betas = beta_weights(orient_dipoles(labels, start, X), dataset.n)
                model = fit_split(dataset, labels, spec, kappa=1.0)

                self.assertLessEqual(model.objective, regularized_criterion(start, betas, 1.0, 1.0, X) * (1 + 1e-6))
                self.assertEqual(model.objective, model.history[-1])
                self.assertLessEqual(model.rounds, 25)

                # Every computed round, a discarded one included
                trace = np.asarray(model.trace)
                self.assertEqual(tuple(trace[:model.rounds]), model.history)
                self.assertTrue(np.all(np.diff(trace) <= 1e-6 * (1.0 + np.abs(trace[:-1]))))

    def test_model_record(self):
        """ to_dict / from_dict keep the decision values """
        dataset = _random_dataset(1)
        model = fit_split(dataset, label_dipoles(dataset), KernelSpec.gaussian(), kappa=2.0)
        rebuilt = SplitModel.from_dict(model.to_dict())

        np.testing.assert_array_equal(rebuilt.values(dataset.covariates), model.values(dataset.covariates))
        self.assertIsNotNone(rebuilt.kernel.variance)
        self.assertEqual(rebuilt.margin, Margin(1.0))
        self.assertEqual(rebuilt.trace, model.trace)

    def test_invalid_arguments(self):
        """ Empty labels and nonpositive kappa """
        points = np.array([[0.0], [1.0]])
        with self.assertRaises(DegenerateSplitError):
            _ = fit_split(points, _labels(), KernelSpec.linear())

        with self.assertRaises(UsageError):
            _ = fit_split(points, _labels(mixed=[(0, 1)]), KernelSpec.linear(), kappa=0.0)
