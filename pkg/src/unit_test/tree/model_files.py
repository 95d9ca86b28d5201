# pylint: skip-file
"""
Filename: model_files.py

Descriptions:
    Tests the JSON model document: writing, reading back, and the
    errors raised for foreign or damaged files.
    NOTE:   Classes | TestModelFiles
"""

import json
import tempfile
import unittest
from pathlib import Path

import numpy as np

from dipoletree.core.kernel import KernelSpec
from dipoletree.simulation.hazards import preset, simulate
from dipoletree.tree.growth import GrowthConfig, grow
from dipoletree.tree.serialization import (
    MODEL_VERSION, dumps_model, read_model, tree_from_dict, tree_to_dict, write_model
)
from dipoletree.utilities.errors import ModelFormatError


class TestModelFiles(unittest.TestCase):
    """ Unit tests for write_model and read_model """
    @classmethod
    def setUpClass(cls):
        cls.dataset = simulate(preset("parabolic", p=2, n=120, seed=4))
        cls.tree = grow(cls.dataset, GrowthConfig(KernelSpec.quadratic(), min_node=20))

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.root = Path(self.directory.name)

    def tearDown(self):
        self.directory.cleanup()

    def test_predictions_survive(self):
        """ A reloaded tree routes and predicts identically """
        path = write_model(self.root / "model.json", self.tree, {"note": "test"})
        loaded = read_model(path)

        X = self.dataset.covariates
        np.testing.assert_array_equal(loaded.route(X), self.tree.route(X))
        np.testing.assert_array_equal(loaded.predict_medians(X), self.tree.predict_medians(X))
        self.assertEqual(loaded.covariates, self.tree.covariates)
        self.assertEqual(loaded.config, self.tree.config)

    def test_document_is_stable(self):
        """ Writing a reloaded tree reproduces the same text """
        text = dumps_model(self.tree)
        self.assertEqual(dumps_model(tree_from_dict(json.loads(text))), text)

    def test_document_layout(self):
        """ Version tag and metadata placement """
        document = tree_to_dict(self.tree, {"seed": 3})

        self.assertEqual(document["version"], MODEL_VERSION)
        self.assertEqual(document["metadata"], {"seed": 3})
        self.assertEqual(list(document)[:2], ["version", "covariates"])

    def test_rejected_documents(self):
        """ Wrong version, missing keys, wrong top level """
        document = tree_to_dict(self.tree)
        cases = [
            {**document, "version": "dipole-tree/0"},
            {key: value for key, value in document.items() if key != "root"},
            {**document, "covariates": ["a", "b", "c"]},
            [document],
        ]

        for case in cases:
            with self.assertRaises(ModelFormatError):
                _ = tree_from_dict(case)

    def test_unreadable_files(self):
        """ Missing and non-JSON files """
        broken = self.root / "broken.json"
        broken.write_text("{not json", encoding="utf-8")

        for path in (self.root / "absent.json", broken):
            with self.assertRaises(ModelFormatError):
                _ = read_model(path)
