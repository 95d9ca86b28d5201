# pylint: skip-file
"""
File: runner.py

Description:
    Main script to run all unit test modules within
    the dipoletree library. This includes survival data, kernels,
    the dual solver, splitting, trees, metrics, simulation and
    configuration.

    NOTE: Reference commands:
    coverage run src/unit_test/runner.py
    coverage report -m

    NOTE: The long acceptance checks are skipped unless
    DIPOLETREE_ACCEPTANCE=1 is set (the remission check reads the
    bundled data/remission.csv unless DIPOLETREE_REMISSION_CSV is set).
"""

import sys
import unittest
from pathlib import Path

# src/ holds both dipoletree and unit_test
sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from unit_test.core.survival_data import (
    TestLoadCsv, TestComparablePairs, TestLabelDipoles, TestSplits
)
from unit_test.core.kernels import TestKernelNotation, TestKernelEvaluation
from unit_test.core.qp_solver import TestQpProblem, TestSolve, TestProjection
from unit_test.core.splitting import (
    TestOrientation, TestBetaWeights, TestInitialHyperplane, TestDualRound, TestFitSplit
)

from unit_test.tree.survival_curves import TestKaplanMeier, TestLogrank
from unit_test.tree.tree_growth import TestGrowthConfig, TestGrow
from unit_test.tree.tree_pruning import TestPruneSequence, TestSubtreeScores
from unit_test.tree.model_files import TestModelFiles
from unit_test.tree.fit_pipeline import TestFitTree

from unit_test.evaluation.scoring import TestConcordance, TestBrier, TestEvaluate
from unit_test.evaluation.tuning import TestCrossValidate, TestTuneKappa

from unit_test.simulation.hazard_models import TestHazardSpec, TestSimulate, TestPresets

from unit_test.configuration.settings import TestSettingsFile, TestPrecedence
from unit_test.configuration.commands import TestCommands

from unit_test.acceptance import TestSplitterAcceptance, TestTreeAcceptance, TestRemission

loader = unittest.TestLoader()
suite = unittest.TestSuite()

# === Core ===

# Survival data and dipoles
suite.addTests(loader.loadTestsFromTestCase(TestLoadCsv))
suite.addTests(loader.loadTestsFromTestCase(TestComparablePairs))
suite.addTests(loader.loadTestsFromTestCase(TestLabelDipoles))
suite.addTests(loader.loadTestsFromTestCase(TestSplits))

# Kernels
suite.addTests(loader.loadTestsFromTestCase(TestKernelNotation))
suite.addTests(loader.loadTestsFromTestCase(TestKernelEvaluation))

# Dual solver
suite.addTests(loader.loadTestsFromTestCase(TestQpProblem))
suite.addTests(loader.loadTestsFromTestCase(TestSolve))
suite.addTests(loader.loadTestsFromTestCase(TestProjection))

# Splitting
suite.addTests(loader.loadTestsFromTestCase(TestOrientation))
suite.addTests(loader.loadTestsFromTestCase(TestBetaWeights))
suite.addTests(loader.loadTestsFromTestCase(TestInitialHyperplane))
suite.addTests(loader.loadTestsFromTestCase(TestDualRound))
suite.addTests(loader.loadTestsFromTestCase(TestFitSplit))

# === Tree ===

suite.addTests(loader.loadTestsFromTestCase(TestKaplanMeier))
suite.addTests(loader.loadTestsFromTestCase(TestLogrank))
suite.addTests(loader.loadTestsFromTestCase(TestGrowthConfig))
suite.addTests(loader.loadTestsFromTestCase(TestGrow))
suite.addTests(loader.loadTestsFromTestCase(TestPruneSequence))
suite.addTests(loader.loadTestsFromTestCase(TestSubtreeScores))
suite.addTests(loader.loadTestsFromTestCase(TestModelFiles))
suite.addTests(loader.loadTestsFromTestCase(TestFitTree))

# === Evaluation ===

suite.addTests(loader.loadTestsFromTestCase(TestConcordance))
suite.addTests(loader.loadTestsFromTestCase(TestBrier))
suite.addTests(loader.loadTestsFromTestCase(TestEvaluate))
suite.addTests(loader.loadTestsFromTestCase(TestCrossValidate))
suite.addTests(loader.loadTestsFromTestCase(TestTuneKappa))

# === Simulation ===

suite.addTests(loader.loadTestsFromTestCase(TestHazardSpec))
suite.addTests(loader.loadTestsFromTestCase(TestSimulate))
suite.addTests(loader.loadTestsFromTestCase(TestPresets))

# === Configuration ===

suite.addTests(loader.loadTestsFromTestCase(TestSettingsFile))
suite.addTests(loader.loadTestsFromTestCase(TestPrecedence))
suite.addTests(loader.loadTestsFromTestCase(TestCommands))

# === Acceptance ===

suite.addTests(loader.loadTestsFromTestCase(TestSplitterAcceptance))
suite.addTests(loader.loadTestsFromTestCase(TestTreeAcceptance))
suite.addTests(loader.loadTestsFromTestCase(TestRemission))

runner = unittest.TextTestRunner(verbosity=2)

if __name__ == "__main__":
    result = runner.run(suite)
