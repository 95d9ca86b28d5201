# pylint: skip-file
"""
Filename: commands.py

Descriptions:
    Runs the command line entry point end to end on simulated data
    and checks the files it writes and its exit codes.
    NOTE:   Classes | TestCommands
"""

import contextlib
import io
import json
import os
import tempfile
import unittest
from pathlib import Path
from unittest import mock

import pandas as pd

from dipoletree.configuration import management
from dipoletree.configuration.cli import main
from dipoletree.configuration.defaults import CONFIG_FILENAME, DEFAULT_CONFIG
from dipoletree.utilities.errors import ConfigError


def run(*argv: str) -> tuple[int, str]:
    """ Exit code and captured standard output """
    buffer = io.StringIO()
    with contextlib.redirect_stdout(buffer), contextlib.redirect_stderr(io.StringIO()):
        code = main(list(argv))
    return code, buffer.getvalue()


class TestCommands(unittest.TestCase):
    """ End to end tests for main """
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

    def simulate(self, name: str = "train.csv", seed: str = "7") -> Path:
        code, _ = run("simulate", "--preset", "elliptical", "--n", "120", "--seed", seed, "--out", name)
        self.assertEqual(code, 0)
        return self.root / name

    def test_simulate(self):
        """ CSV rows, sidecar record and the printed censoring fraction """
        code, output = run("simulate", "--preset", "planar", "--n", "100", "--seed", "3", "--out", "sim.csv")
        frame = pd.read_csv(self.root / "sim.csv")
        record = json.loads((self.root / "sim.json").read_text(encoding="utf-8"))

        self.assertEqual(code, 0)
        self.assertEqual(list(frame.columns), ["x1", "x2", "time", "status"])
        self.assertEqual(len(frame), 100)
        self.assertAlmostEqual(record["censored_fraction"], 1.0 - frame["status"].mean())
        self.assertIn(f"{record['censored_fraction']:.4f}", output)

    def test_simulate_deterministic(self):
        """ Same seed, same bytes """
        first, second = self.simulate("a.csv"), self.simulate("b.csv")
        self.assertEqual(first.read_bytes(), second.read_bytes())

    def test_fit_predict_evaluate(self):
        """ The model written by fit serves predict and evaluate """
        train = self.simulate()
        test = self.simulate("test.csv", seed="8")

        code, output = run("fit", str(train), "--out", "model.json", "--min-node", "20")
        self.assertEqual(code, 0)
        self.assertIn("Model written", output)

        report = json.loads((self.root / "model.report.json").read_text(encoding="utf-8"))
        self.assertGreaterEqual(report["nodes"], report["nodes_pruned"])

        code, _ = run("predict", "model.json", str(test), "--out", "pred.csv")
        predictions = pd.read_csv(self.root / "pred.csv")
        self.assertEqual(code, 0)
        self.assertEqual(list(predictions.columns), ["median", "leaf_id", "median_reached"])
        self.assertEqual(len(predictions), 120)

        code, output = run("evaluate", "model.json", str(test), "--out", "eval.json", "--curve-out", "curve.csv")
        evaluation = json.loads((self.root / "eval.json").read_text(encoding="utf-8"))
        self.assertEqual(code, 0)
        self.assertEqual(evaluation["n_test"], 120)
        self.assertIn("IBS", output)
        self.assertEqual(list(pd.read_csv(self.root / "curve.csv").columns), ["time", "brier"])

    def test_fit_deterministic(self):
        """ Two fits with the same seed write the same model """
        train = self.simulate()
        run("fit", str(train), "--out", "one.json", "--seed", "3")
        run("fit", str(train), "--out", "two.json", "--seed", "3")

        self.assertEqual((self.root / "one.json").read_bytes(), (self.root / "two.json").read_bytes())

    def test_exit_codes(self):
        """ Usage errors exit 2, data errors 3 """
        train = self.simulate()
        cases = [
            (("simulate", "--preset", "spherical", "--out", "x.csv"), 2),
            (("simulate", "--preset", "planar", "--p", "3", "--out", "x.csv"), 2),
            (("fit", str(train), "--out", "m.json", "--kernel", "sigmoid"), 2),
            (("fit", str(train), "--out", "m.json", "--zeta1", "0.8"), 2),
            (("fit", "absent.csv", "--out", "m.json"), 3),
            (("fit", str(train), "--out", "m.json", "--time-col", "duration"), 3),
            (("predict", "absent.json", str(train)), 3),
        ]

        for argv, expected in cases:
            self.assertEqual(run(*argv)[0], expected, argv)

    def test_bad_settings_file(self):
        """ A broken '.dipoletree' is a usage error """
        train = self.simulate()
        (self.root / CONFIG_FILENAME).write_text("[splitter]\nkapa: 2\n", encoding="utf-8")

        with self.assertRaises(ConfigError):
            management.reload_config()

        self.assertEqual(run("fit", str(train), "--out", "m.json")[0], 2)

    def test_generate(self):
        """ --force writes the template, a declined prompt keeps the old file """
        code, _ = run("generate", "--force")
        target = self.root / CONFIG_FILENAME

        self.assertEqual(code, 0)
        self.assertEqual(target.read_text(encoding="utf-8"), DEFAULT_CONFIG.strip() + "\n")

        target.write_text("[splitter]\nkappa: 2\n", encoding="utf-8")
        with mock.patch("builtins.input", return_value="n"):
            code, output = run("generate")

        self.assertEqual(code, 0)
        self.assertIn("Aborted", output)
        self.assertEqual(target.read_text(encoding="utf-8"), "[splitter]\nkappa: 2\n")

    def test_no_command(self):
        """ Help is printed and the exit code is 0 """
        code, output = run()
        self.assertEqual(code, 0)
        self.assertIn("usage", output)
