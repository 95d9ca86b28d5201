# pylint: skip-file
"""
Filename: settings.py

Descriptions:
    Tests discovery and parsing of the '.dipoletree' settings file
    and the precedence of command line flags over it.
    NOTE:   Classes | TestSettingsFile, TestPrecedence
"""

import os
import tempfile
import unittest
from pathlib import Path

from dipoletree.configuration import management
from dipoletree.configuration.cli import _fit_config, _schema, build_parser
from dipoletree.configuration.defaults import CONFIG_FILENAME, DEFAULT_CONFIG, DEFAULTS
from dipoletree.utilities.errors import ConfigError


class _InTemporaryDirectory(unittest.TestCase):
    """ Runs each test from an empty working directory """
    def setUp(self):
        self.previous = Path.cwd()
        self.directory = tempfile.TemporaryDirectory()
        self.root = Path(self.directory.name).resolve()
        os.chdir(self.root)
        management.reload_config()

    def tearDown(self):
        os.chdir(self.previous)
        self.directory.cleanup()
        management.reload_config()

    def write(self, text: str, folder: Path | None = None) -> Path:
        path = (folder or self.root) / CONFIG_FILENAME
        path.write_text(text, encoding="utf-8")
        return path


class TestSettingsFile(_InTemporaryDirectory):
    """ Unit tests for find_config_file, load_from_file and get_settings """
    def test_defaults_without_file(self):
        """ No file anywhere: packaged defaults """
        self.assertIsNone(management.get_config_source())
        self.assertEqual(management.get_settings(), DEFAULTS)

    def test_generated_file_matches_defaults(self):
        """ The template parses to the packaged defaults """
        path = self.write(DEFAULT_CONFIG)
        self.assertEqual(management.load_from_file(path), DEFAULTS)

    def test_search_upwards(self):
        """ A file in a parent folder is found from a child """
        path = self.write("[splitter]\nkappa: 2.5\n")
        child = self.root / "a" / "b"
        child.mkdir(parents=True)

        self.assertEqual(management.find_config_file(child), path)

    def test_typed_values(self):
        """ Entries take the type of their default """
        self.write("[splitter]\nkernel = quad\nkappa: 2.5\nmax_rounds: 7\n\n[tuning]\neta_grid: -1, 0.5\n")
        management.reload_config()

        self.assertEqual(management.get_setting("splitter", "kernel"), "quad")
        self.assertEqual(management.get_setting("splitter", "kappa"), 2.5)
        self.assertEqual(management.get_setting("splitter", "max_rounds"), 7)
        self.assertEqual(management.get_setting("tuning", "eta_grid"), (-1.0, 0.5))
        self.assertEqual(management.get_setting("tree", "min_node"), 15)

    def test_settings_are_copies(self):
        """ Mutating a returned dict leaves the effective settings alone """
        management.get_settings()["splitter"]["kappa"] = 99.0
        self.assertEqual(management.get_setting("splitter", "kappa"), 1.0)

    def test_invalid_files(self):
        """ Unknown sections and keys, unparsable and empty values """
        cases = [
            "[plotting]\ncolor: red\n",
            "[splitter]\nkapa: 2\n",
            "[splitter]\nkappa: abc\n",
            "[tree]\nmin_node: 1.5\n",
            "[splitter]\nkernel:\n",
            "kappa: 2\n",
        ]

        for text in cases:
            path = self.write(text)
            with self.assertRaises(ConfigError):
                _ = management.load_from_file(path)


class TestPrecedence(_InTemporaryDirectory):
    """ Defaults < file < flags """
    def test_flags_override_file(self):
        """ File values fill in what the flags leave out """
        self.write("[splitter]\nkappa: 2.5\nkernel: gauss\n\n[tree]\nmin_node: 40\n\n[data]\ntime: t\n")
        management.reload_config()

        args = build_parser().parse_args(["fit", "train.csv", "--out", "m.json", "--kappa", "0.5"])
        cfg = _fit_config(args, management.get_settings())
        schema = _schema(args, management.get_settings())

        self.assertEqual(cfg.growth.kappa, 0.5)
        self.assertEqual(cfg.growth.min_node, 40)
        self.assertEqual(cfg.growth.kernel.notation, "gauss")
        self.assertEqual(cfg.alpha_c, 3.0)
        self.assertEqual((schema.time, schema.status), ("t", "status"))

    def test_bootstrap_flag(self):
        """ A bare --bootstrap takes the default resample count """
        parser = build_parser()
        settings = management.get_settings()

        bare = _fit_config(parser.parse_args(["fit", "d.csv", "--out", "m", "--bootstrap"]), settings)
        counted = _fit_config(parser.parse_args(["fit", "d.csv", "--out", "m", "--bootstrap", "4"]), settings)
        absent = _fit_config(parser.parse_args(["fit", "d.csv", "--out", "m"]), settings)

        self.assertEqual((bare.bootstrap, counted.bootstrap, absent.bootstrap), (25, 4, 0))
