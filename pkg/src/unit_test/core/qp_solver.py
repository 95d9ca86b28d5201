# pylint: skip-file
"""
Filename: qp_solver.py

Descriptions:
    Tests the box and single-equality QP solver against closed forms
    and against scipy's SLSQP on random dual-shaped problems.
    NOTE:   Classes | TestQpProblem, TestSolve, TestProjection
"""

import unittest

import numpy as np
from scipy.optimize import minimize

from dipoletree.core.data import Dataset, label_dipoles
from dipoletree.core.kernel import KernelSpec, gram_matrix
from dipoletree.core.qp import (
    QpProblem, QpStatus, SolverConfig, project_feasible, solve
)
from dipoletree.core.splitter import assemble_dual, beta_weights, initial_hyperplane, orient_dipoles
from dipoletree.simulation.hazards import preset, simulate
from dipoletree.utilities.errors import QpInputError, UsageError


def _random_problem(rng: np.random.Generator, m: int) -> QpProblem:
    """ Signed Gram structure like the splitter's dual """
    basis = rng.normal(size=(m, 3))
    signs = rng.choice([-1.0, 1.0], size=m)
    P = np.outer(signs, signs) * (basis @ basis.T)
    upper = rng.uniform(0.5, 3.0, size=m)

    return QpProblem(P, np.ones(m), signs, np.zeros(m), upper)


def _reference_objective(problem: QpProblem) -> float:
    """ SLSQP optimum of the same problem """
    result = minimize(
        lambda mu: -problem.objective(mu),
        np.zeros(problem.size),
        jac=lambda mu: problem.P @ mu - problem.q,
        bounds=list(zip(problem.lower, problem.upper)),
        constraints=[{"type": "eq", "fun": lambda mu: problem.a @ mu, "jac": lambda mu: problem.a}],
        method="SLSQP",
        options={"ftol": 1e-12, "maxiter": 500},
    )
    return -float(result.fun)


class TestQpProblem(unittest.TestCase):
    """ Unit tests for problem validation """
    def test_invalid_inputs(self):
        """ Shapes, NaN, asymmetry and crossed bounds """
        cases = [
            ([[1.0, 0.0], [0.0, 1.0]], [1.0], [1.0], [0.0], [1.0]),
            ([[1.0, 2.0], [0.0, 1.0]], [1.0, 1.0], [1.0, -1.0], [0.0, 0.0], [1.0, 1.0]),
            ([[np.nan]], [1.0], [1.0], [0.0], [1.0]),
            ([[1.0]], [1.0], [1.0], [2.0], [1.0]),
        ]

        for P, q, a, lower, upper in cases:
            with self.assertRaises(QpInputError):
                _ = QpProblem(np.array(P), np.array(q), np.array(a), np.array(lower), np.array(upper))

    def test_solver_config(self):
        """ Nonpositive tolerances and steps are rejected """
        for kwargs in ({"tol": 0.0}, {"max_iter": 0}, {"rho": -1.0}, {"alpha": 2.0}, {"adaptive_interval": 0}):
            with self.assertRaises(UsageError):
                _ = SolverConfig(**kwargs)


class TestSolve(unittest.TestCase):
    """ Unit tests for solve """
    def test_pinned_box(self):
        """ lower = upper = 0 forces mu = 0 """
        problem = QpProblem(np.array([[1.0]]), np.zeros(1), np.ones(1), np.zeros(1), np.zeros(1))
        solution = solve(problem)

        self.assertIs(solution.status, QpStatus.SOLVED)
        np.testing.assert_array_equal(solution.mu, [0.0])

    def test_unconstrained_direction(self):
        """ a = 0 leaves the box only: mu = 1, objective 0.5 """
        problem = QpProblem(np.array([[1.0]]), np.ones(1), np.zeros(1), np.zeros(1), np.full(1, 10.0))
        solution = solve(problem)

        self.assertAlmostEqual(solution.mu[0], 1.0, places=6)
        self.assertAlmostEqual(solution.objective, 0.5, places=9)

    def test_two_variable_closed_form(self):
        """ mu1 = mu2 = t maximizes 2t - 2t^2 at t = 1/2 """
        problem = QpProblem(
            np.ones((2, 2)), np.ones(2), np.array([1.0, -1.0]), np.zeros(2), np.full(2, 10.0)
        )
        solution = solve(problem)

        self.assertIs(solution.status, QpStatus.SOLVED)
        np.testing.assert_allclose(solution.mu, [0.5, 0.5], atol=1e-6)
        self.assertAlmostEqual(solution.objective, 0.5, places=9)

    def test_empty_problem(self):
        """ Zero variables solve trivially """
        problem = QpProblem(np.zeros((0, 0)), np.zeros(0), np.zeros(0), np.zeros(0), np.zeros(0))
        solution = solve(problem)

        self.assertIs(solution.status, QpStatus.SOLVED)
        self.assertEqual(solution.mu.size, 0)

    def test_infeasible(self):
        """ a . mu >= 2 on the box """
        problem = QpProblem(np.eye(2), np.ones(2), np.ones(2), np.ones(2), np.full(2, 2.0))
        self.assertIs(solve(problem).status, QpStatus.INFEASIBLE)

    def test_against_reference(self):
        """ Random dual-shaped problems reach the SLSQP optimum """
        rng = np.random.default_rng(17)

        for m in (2, 5, 10, 20):
            problem = _random_problem(rng, m)
            solution = solve(problem)
            reference = _reference_objective(problem)

            self.assertIs(solution.status, QpStatus.SOLVED)
            self.assertGreaterEqual(solution.objective, reference - 1e-5 * (1.0 + abs(reference)))

    def test_returned_point_is_feasible(self):
        """ a . mu = 0 and the box hold to machine precision """
        rng = np.random.default_rng(23)

        for _ in range(10):
            problem = _random_problem(rng, 12)
            mu = solve(problem).mu

            self.assertLessEqual(abs(problem.a @ mu), 1e-9)
            self.assertTrue(np.all(mu >= problem.lower) and np.all(mu <= problem.upper))

    def test_iteration_limit(self):
        """ A single iteration ends at MAX_ITER with a feasible point """
        problem = _random_problem(np.random.default_rng(3), 15)
        solution = solve(problem, SolverConfig(max_iter=1, polish=False))

        self.assertIs(solution.status, QpStatus.MAX_ITER)
        self.assertEqual(solution.iterations, 1)
        self.assertLessEqual(abs(problem.a @ solution.mu), 1e-9)

    def test_warm_start(self):
        """ Restarting from a solution returns the same optimum """
        problem = _random_problem(np.random.default_rng(9), 10)
        cold = solve(problem)
        warm = solve(problem, warm_mu=cold.mu, warm_duals=cold.duals)

        self.assertIs(warm.status, QpStatus.SOLVED)
        self.assertAlmostEqual(warm.objective, cold.objective, places=6)
        self.assertLessEqual(warm.iterations, cold.iterations)

    def test_permutation_invariance(self):
        """ Relabelling the variables permutes mu and keeps the optimum """
        rng = np.random.default_rng(21)
        basis, signs = rng.normal(size=(14, 16)), rng.choice([-1.0, 1.0], size=14)

        # Full rank so the maximizer is unique
        problem = QpProblem(
            np.outer(signs, signs) * (basis @ basis.T), np.ones(14), signs, np.zeros(14), rng.uniform(0.5, 3.0, size=14)
        )
        order = rng.permutation(14)
        permuted = QpProblem(
            problem.P[np.ix_(order, order)], problem.q[order], problem.a[order],
            problem.lower[order], problem.upper[order]
        )

        base, moved = solve(problem), solve(permuted)
        self.assertIs(moved.status, QpStatus.SOLVED)
        self.assertAlmostEqual(moved.objective, base.objective, delta=1e-6 * (1.0 + abs(base.objective)))
        np.testing.assert_allclose(moved.mu, base.mu[order], atol=1e-4)

    def test_splitter_duals_converge(self):
        """ Root duals of the splitter fixtures end SOLVED within the default budget """
        fixtures = []
        for seed in range(5):
            rng = np.random.default_rng(seed)
            X = rng.normal(size=(40, 2))
            times = rng.exponential(1.0 / np.exp(X[:, 0])) + 0.01
            statuses = (rng.uniform(size=40) < 0.8).astype(int)

            for spec in (KernelSpec.linear(), KernelSpec.quadratic(), KernelSpec.gaussian(1.0)):
                fixtures.append((Dataset.from_arrays(X, times, statuses), spec))

        fixtures.append((simulate(preset("elliptical", p=2, n=180, seed=7)), KernelSpec.quadratic()))

        for dataset, spec in fixtures:
            X = dataset.covariates
            labels = label_dipoles(dataset)
            betas = beta_weights(orient_dipoles(labels, initial_hyperplane(X, labels, 1.0, 1.0), X), dataset.n)
            dual = assemble_dual(betas, gram_matrix(spec.resolve(X), X), 1.0, 1.0)

            solution = solve(dual.problem)
            self.assertIs(solution.status, QpStatus.SOLVED)
            self.assertLess(solution.iterations, SolverConfig().max_iter)
            self.assertLessEqual(abs(dual.problem.a @ solution.mu), 1e-9)


class TestProjection(unittest.TestCase):
    """ Unit tests for project_feasible """
    def test_projection_onto_diagonal(self):
        """ (3, 0) onto mu1 = mu2 is (1.5, 1.5) """
        mu = project_feasible(np.array([3.0, 0.0]), np.array([1.0, -1.0]), np.zeros(2), np.full(2, 10.0))
        np.testing.assert_allclose(mu, [1.5, 1.5], atol=1e-12)

    def test_projection_with_active_box(self):
        """ (3, 0) with upper bound 1 ends on the corner (1, 1) """
        mu = project_feasible(np.array([3.0, 0.0]), np.array([1.0, -1.0]), np.zeros(2), np.ones(2))
        np.testing.assert_allclose(mu, [1.0, 1.0], atol=1e-12)
