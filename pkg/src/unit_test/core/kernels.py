# pylint: skip-file
"""
Filename: kernels.py

Descriptions:
    Tests kernel notation parsing, kernel evaluation and Gram matrix
    assembly.
    NOTE:   Classes | TestKernelNotation, TestKernelEvaluation
"""

import unittest

import numpy as np

from dipoletree.core.kernel import (
    KernelKind, KernelSpec, cross_gram, default_gaussian_variance, gram_matrix, kernel_eval
)
from dipoletree.utilities.errors import DimensionError, UnknownKernel, UsageError


class TestKernelNotation(unittest.TestCase):
    """ Unit tests for KernelSpec.parse and its inverse """
    def test_parse(self):
        """ Accepted notations """
        cases = [
            ("linear", KernelSpec.linear()),
            ("quad", KernelSpec(KernelKind.POLYNOMIAL, 2, 1.0)),
            ("poly:3,0.5", KernelSpec(KernelKind.POLYNOMIAL, 3, 0.5)),
            ("poly:2", KernelSpec(KernelKind.POLYNOMIAL, 2, 0.0)),
            ("gauss", KernelSpec(KernelKind.GAUSSIAN)),
            ("gauss:2.5", KernelSpec(KernelKind.GAUSSIAN, variance=2.5)),
            (" RBF:4 ", KernelSpec(KernelKind.GAUSSIAN, variance=4.0)),
        ]

        for text, expected in cases:
            self.assertEqual(KernelSpec.parse(text), expected)

    def test_notation_inverts_parse(self):
        """ parse(spec.notation) == spec """
        for spec in (KernelSpec.linear(), KernelSpec.quadratic(), KernelSpec.polynomial(4, 2.0),
                     KernelSpec.gaussian(), KernelSpec.gaussian(0.3)):
            self.assertEqual(KernelSpec.parse(spec.notation), spec)
            self.assertEqual(KernelSpec.from_dict(spec.to_dict()), spec)

    def test_unknown_kernel(self):
        """ Unsupported family names """
        for text in ("sigmoid", "", "linear:2"):
            with self.assertRaises(UnknownKernel):
                _ = KernelSpec.parse(text)

    def test_bad_parameters(self):
        """ Malformed or out of range parameters """
        for text in ("poly", "poly:x,1", "poly:0,1", "poly:2,-1", "gauss:-1", "gauss:abc"):
            with self.assertRaises(UsageError):
                _ = KernelSpec.parse(text)

    def test_resolve(self):
        """ Only a Gaussian without variance is unresolved """
        points = np.array([[0.0, 0.0], [2.0, 0.0]])
        self.assertFalse(KernelSpec.gaussian().is_resolved)
        self.assertEqual(KernelSpec.gaussian().resolve(points).variance, 1.0)
        self.assertIs(KernelSpec.linear().resolve(points).kind, KernelKind.LINEAR)


class TestKernelEvaluation(unittest.TestCase):
    """ Unit tests for kernel_eval, cross_gram and gram_matrix """
    def setUp(self):
        self.u = np.array([1.0, 2.0])
        self.v = np.array([3.0, -1.0])

    def test_closed_forms(self):
        """ u . v = 1, |u - v|^2 = 13 """
        cases = [
            (KernelSpec.linear(), 1.0),
            (KernelSpec.quadratic(), 4.0),
            (KernelSpec.polynomial(3, 0.0), 1.0),
            (KernelSpec.polynomial(2, 3.0), 16.0),
            (KernelSpec.gaussian(2.0), np.exp(-13.0 / 4.0)),
        ]

        for spec, expected in cases:
            self.assertAlmostEqual(kernel_eval(spec, self.u, self.v), expected, places=12)

    def test_dimension_mismatch(self):
        """ Vectors of unequal length """
        with self.assertRaises(DimensionError):
            _ = kernel_eval(KernelSpec.linear(), self.u, np.ones(3))

    def test_unresolved_gaussian(self):
        """ A Gaussian kernel needs its variance before evaluation """
        with self.assertRaises(UsageError):
            _ = cross_gram(KernelSpec.gaussian(), self.u, self.v)

    def test_gram_properties(self):
        """ Symmetric, positive semidefinite, unit Gaussian diagonal """
        points = np.random.default_rng(4).normal(size=(12, 3))

        for spec in (KernelSpec.linear(), KernelSpec.quadratic(), KernelSpec.gaussian(1.5)):
            gram = gram_matrix(spec, points)
            np.testing.assert_array_equal(gram, gram.T)
            self.assertGreater(np.linalg.eigvalsh(gram).min(), -1e-8 * np.abs(gram).max())

        np.testing.assert_array_equal(np.diag(gram_matrix(KernelSpec.gaussian(0.7), points)), 1.0)

    def test_gram_matches_cross_gram(self):
        """ Gram entries agree with pairwise evaluation """
        points = np.random.default_rng(1).normal(size=(5, 2))
        gram = gram_matrix(KernelSpec.polynomial(3, 1.0), points)

        for i in range(5):
            for j in range(5):
                expected = kernel_eval(KernelSpec.polynomial(3, 1.0), points[i], points[j])
                self.assertAlmostEqual(gram[i, j], expected, places=10)

    def test_empty_points(self):
        """ No points to assemble """
        with self.assertRaises(UsageError):
            _ = gram_matrix(KernelSpec.linear(), np.zeros((0, 2)))

    def test_default_variance(self):
        """ Mean squared distance to the centroid """
        points = np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0], [2.0, 2.0]])
        self.assertAlmostEqual(default_gaussian_variance(points), 2.0)
        self.assertEqual(default_gaussian_variance(np.ones((3, 2))), 1.0)
