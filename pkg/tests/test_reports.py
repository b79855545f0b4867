"""
Tests for result tables, result files and the configuration hash.
"""

import json
import os
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

import numpy as np

from wavegraph.analysis import McEstimate, ResultTable, config_hash, read_results
from wavegraph.utils.exceptions import ConfigurationError


class TestConfigHash(unittest.TestCase):
    """Test the canonical configuration hash."""

    def test_key_order_independent(self):
        """Test that the hash ignores key order."""
        self.assertEqual(config_hash({"a": 1, "b": [1, 2]}), config_hash({"b": [1, 2], "a": 1}))
        self.assertNotEqual(config_hash({"a": 1}), config_hash({"a": 2}))
        self.assertEqual(len(config_hash({})), 64)

    def test_numpy_and_path_values(self):
        """Test that numpy scalars and paths hash like their plain values."""
        self.assertEqual(config_hash({"n": np.int64(3), "x": np.float64(0.5)}), config_hash({"n": 3, "x": 0.5}))
        self.assertEqual(config_hash({"p": Path("a/b")}), config_hash({"p": "a/b"}))

    def test_unsupported_value(self):
        """Test that arbitrary objects are rejected."""
        with self.assertRaises(TypeError):
            config_hash({"x": object()})


class TestResultTable(unittest.TestCase):
    """Test rows, CSV output and summaries."""

    def setUp(self):
        """Set up a table with one plain and one Monte Carlo row."""
        self.temp_dir = tempfile.mkdtemp()
        self.table = ResultTable("fk", "abc123", seed=5, version="0.1.0")
        self.table.add("energy", 0.5, 1.25)
        self.table.add_estimate("u:a", 1.0, McEstimate(0.75, 0.01, 100, 5, 2.0), n=8, N=50)

    def tearDown(self):
        """Clean up test fixtures."""
        import shutil
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def test_rows(self):
        """Test row labels and values."""
        rows = self.table.rows
        self.assertEqual(len(self.table), 2)
        self.assertEqual(rows[0]["experiment"], "fk:energy")
        self.assertEqual(rows[0]["seed"], 5)
        self.assertIsNone(rows[0]["bound"])
        self.assertEqual(rows[1]["R"], 100)
        self.assertEqual(rows[1]["bound"], 2.0)

    def test_explicit_bound_overrides(self):
        """Test that add_estimate prefers an explicit bound."""
        self.table.add_estimate("x", 0.0, McEstimate(1.0, 0.0, 2, 5, 9.0), bound=3.0)
        self.assertEqual(self.table.rows[-1]["bound"], 3.0)

    def test_frame_dtypes(self):
        """Test nullable integer columns."""
        frame = self.table.to_frame()
        self.assertEqual(list(frame.columns), ["experiment", "n", "N", "t", "R", "seed", "estimate", "stderr", "bound"])
        self.assertEqual(str(frame["n"].dtype), "Int64")
        self.assertEqual(int(frame["N"].iloc[1]), 50)

    def test_write_csv(self):
        """Test the header lines and the CSV body."""
        path = self.table.write_csv(os.path.join(self.temp_dir, "results.csv"))
        with open(path) as f:
            lines = f.read().splitlines()
        self.assertEqual(lines[:3], ["# wavegraph 0.1.0", "# config_hash abc123", "# seed 5"])
        self.assertEqual(lines[3], "experiment,n,N,t,R,seed,estimate,stderr,bound")
        self.assertEqual(lines[4], "fk:energy,,,0.5,,5,1.25,0.0,")
        self.assertEqual(lines[5], "fk:u:a,8,50,1.0,100,5,0.75,0.01,2.0")

    def test_write_is_deterministic(self):
        """Test that writing twice gives identical bytes."""
        first = self.table.write_csv(os.path.join(self.temp_dir, "a.csv"))
        second = self.table.write_csv(os.path.join(self.temp_dir, "b.csv"))
        self.assertEqual(Path(first).read_bytes(), Path(second).read_bytes())

    def test_read_results(self):
        """Test reading the header and rows back."""
        path = self.table.write_csv(os.path.join(self.temp_dir, "results.csv"))
        header, frame = read_results(path)
        self.assertEqual(header, {"wavegraph": "0.1.0", "config_hash": "abc123", "seed": "5"})
        self.assertEqual(len(frame), 2)
        self.assertEqual(frame["experiment"].tolist(), ["fk:energy", "fk:u:a"])

    def test_read_results_errors(self):
        """Test missing files and files without a hash header."""
        with self.assertRaises(ConfigurationError):
            read_results(os.path.join(self.temp_dir, "missing.csv"))
        bare = os.path.join(self.temp_dir, "bare.csv")
        with open(bare, "w") as f:
            f.write("experiment,t\nx,0.0\n")
        with self.assertRaises(ConfigurationError):
            read_results(bare)

    def test_summary(self):
        """Test the JSON summary with notes."""
        self.table.note("slope", -1.0)
        path = self.table.write_summary(os.path.join(self.temp_dir, "summary.json"))
        with open(path) as f:
            summary = json.load(f)
        self.assertEqual(summary["artifact"], "wavegraph")
        self.assertEqual(summary["config_hash"], "abc123")
        self.assertEqual(summary["slope"], -1.0)
        self.assertEqual(len(summary["rows"]), 2)

    def test_print_rows(self):
        """Test the human-readable listing."""
        with patch("builtins.print") as mock_print:
            self.table.print_rows()
        printed = "\n".join(str(call.args[0]) for call in mock_print.call_args_list)
        self.assertIn("fk:u:a n=8 N=50 t=1: 0.75 +/- 0.01 bound=2", printed)


if __name__ == "__main__":
    unittest.main()
