# pylint: skip-file
"""
Filename: hazard_models.py

Descriptions:
    Tests the quadratic hazard simulator and its named presets.
    NOTE:   Classes | TestHazardSpec, TestSimulate, TestPresets
"""

import unittest
from dataclasses import replace

import numpy as np

from dipoletree.simulation.hazards import (
    HazardFamily, HazardSpec, SimConfig, coefficients_from_form, feature_count, preset,
    preset_names, quadratic_features, simulate
)
from dipoletree.utilities.errors import SimulationError, UnknownPreset, UsageError


def _exponential(n: int, seed: int = 0, **kwargs) -> SimConfig:
    """ Unit hazard over two standard normal covariates """
    return SimConfig(n, np.zeros(2), np.eye(2), seed, HazardSpec(1.0, np.zeros(5), **kwargs))


class TestHazardSpec(unittest.TestCase):
    """ Unit tests for the feature map and HazardSpec """
    def test_feature_order(self):
        """ Linear terms, products q < r, squares """
        np.testing.assert_array_equal(quadratic_features([[1.0, 2.0, 3.0]])[0], [1, 2, 3, 2, 3, 6, 1, 4, 9])
        self.assertEqual([feature_count(p) for p in (1, 2, 4, 7)], [2, 5, 14, 35])

    def test_dimension_from_beta(self):
        """ p follows from len(beta); other lengths are rejected """
        self.assertEqual(HazardSpec(1.0, np.zeros(14)).p, 4)

        with self.assertRaises(UsageError):
            _ = HazardSpec(1.0, np.zeros(6))

    def test_quadratic_form(self):
        """ X' Q X reproduces the second order part of the rate """
        rng = np.random.default_rng(0)
        hazard = HazardSpec(0.0, np.concatenate((np.zeros(3), rng.normal(size=6))))
        X = rng.normal(size=(5, 3))

        expected = hazard.rate(X)
        direct = np.einsum("ij,jk,ik->i", X, hazard.quadratic_form(), X)
        np.testing.assert_allclose(direct, expected, atol=1e-12)

    def test_coefficients_from_form(self):
        """ The raw-unit rate equals base + g.z + z'Az """
        rng = np.random.default_rng(1)
        mean, scale = np.array([1.0, 2.0]), np.array([1.0, 1.5])
        form = np.array([[0.7, 0.2], [0.2, -0.4]])
        linear = np.array([0.3, -0.1])

        beta0, beta = coefficients_from_form(0.5, linear, form, mean, scale)
        X = rng.normal(size=(6, 2)) * 3
        z = (X - mean) / scale

        expected = 0.5 + z @ linear + np.einsum("ij,jk,ik->i", z, form, z)
        np.testing.assert_allclose(HazardSpec(beta0, beta).rate(X), expected, atol=1e-12)

    def test_family_notation(self):
        """ Accepted hazard family names """
        self.assertIs(HazardFamily.from_notation("Weibull"), HazardFamily.WEIBULL)
        self.assertIs(HazardFamily.from_notation("exponential"), HazardFamily.CONSTANT)

        with self.assertRaises(UsageError):
            _ = HazardFamily.from_notation("gompertz")


class TestSimulate(unittest.TestCase):
    """ Unit tests for simulate """
    def test_exponential_mean(self):
        """ Unit hazard without censoring: mean time 1 within three standard errors """
        dataset = simulate(_exponential(5000))

        self.assertEqual(dataset.censored_fraction, 0.0)
        self.assertLess(abs(dataset.times.mean() - 1.0), 3.0 / np.sqrt(5000))

    def test_short_follow_up(self):
        """ A tiny horizon censors nearly everyone """
        dataset = simulate(_exponential(1000, follow_up=1e-4))

        self.assertGreaterEqual(dataset.censored_fraction, 0.99)
        self.assertLessEqual(dataset.times.max(), 1e-4)

    def test_deterministic(self):
        """ Identical seeds give identical data """
        first, second = simulate(_exponential(50, seed=9)), simulate(_exponential(50, seed=9))

        np.testing.assert_array_equal(first.times, second.times)
        np.testing.assert_array_equal(first.raw_covariates(), second.raw_covariates())
        self.assertEqual(first.names, ("x1", "x2"))

    def test_invalid_configurations(self):
        """ Bad sizes, covariances and hazards """
        hazard = HazardSpec(1.0, np.zeros(5))

        with self.assertRaises(UsageError):
            _ = SimConfig(1, np.zeros(2), np.eye(2), 0, hazard)

        with self.assertRaises(UsageError):
            _ = SimConfig(10, np.zeros(3), np.eye(3), 0, hazard)

        with self.assertRaises(SimulationError):
            _ = SimConfig(10, np.zeros(2), np.array([[1.0, 0.5], [0.0, 1.0]]), 0, hazard)

        with self.assertRaises(SimulationError):
            _ = simulate(SimConfig(10, np.zeros(2), np.array([[1.0, 2.0], [2.0, 1.0]]), 0, hazard))

    def test_nonpositive_hazard(self):
        """ A hazard that is never positive exhausts the redraws """
        cfg = SimConfig(10, np.zeros(2), np.eye(2), 0, HazardSpec(-1.0, np.zeros(5)))
        with self.assertRaises(SimulationError):
            _ = simulate(cfg)


class TestPresets(unittest.TestCase):
    """ Unit tests for the named presets """
    def test_planar_has_no_quadratic_terms(self):
        """ Products and squares vanish """
        for p in (2, 4, 7):
            hazard = preset("planar", p=p).hazard
            np.testing.assert_array_equal(hazard.beta[p:], 0.0)

    def test_level_set_geometry(self):
        """ Elliptical is definite, hyperbolic indefinite """
        for p in (2, 4, 7):
            elliptical = np.linalg.eigvalsh(preset("elliptical", p=p).hazard.quadratic_form())
            hyperbolic = np.linalg.eigvalsh(preset("hyperbolic", p=p).hazard.quadratic_form())

            self.assertGreater(elliptical.min(), 0.0)
            self.assertLess(hyperbolic.min(), 0.0)
            self.assertGreater(hyperbolic.max(), 0.0)

    def test_censoring_fraction(self):
        """ Censoring stays near the calibrated level over many seeds """
        for name in preset_names():
            cfg = preset(name, p=2, n=500)
            for seed in range(20):
                fraction = simulate(replace(cfg, seed=seed)).censored_fraction
                self.assertTrue(0.05 <= fraction <= 0.30, f"{name} seed {seed}: {fraction}")

    def test_weibull_family(self):
        """ The Weibull preset carries its family """
        self.assertIs(preset("weibull-elliptical").hazard.family, HazardFamily.WEIBULL)

    def test_unknown_preset(self):
        """ Unknown names and dimensions """
        with self.assertRaises(UnknownPreset):
            _ = preset("spherical")

        with self.assertRaises(UsageError):
            _ = preset("planar", p=3)
