import contextlib
import io
import json
import tempfile
import unittest
from pathlib import Path
from unittest import mock

from canningskit.cli._common import parse_n_list, parse_query
from canningskit.errors import UsageError
from canningskit.main import main

CONFIG_DIR = Path(__file__).resolve().parents[1] / "canningskit" / "config"


def _run(argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


class ParsingTests(unittest.TestCase):
    def test_query(self):
        self.assertEqual(parse_query("2:2,1"), (2, (2, 1)))
        for bad in ("2:2", "x:1", "3"):
            with self.subTest(query=bad):
                with self.assertRaises(UsageError):
                    parse_query(bad)

    def test_n_list(self):
        self.assertEqual(parse_n_list(["1e3,10", "100", "10"]), [10, 100, 1000])
        self.assertEqual(parse_n_list(None), [])
        with self.assertRaises(UsageError):
            parse_n_list(["ten"])


class CatalogCommandTests(unittest.TestCase):
    def test_listing(self):
        code, out, _ = _run(["catalog"])
        self.assertEqual(code, 0)
        self.assertIn("pareto alpha=1.5 → Beta(0.5,1.5)", out)
        self.assertIn("logtail beta=2 → star-shaped", out)

    def test_filter_without_match(self):
        code, _, err = _run(["catalog", "--filter", "nomatch"])
        self.assertEqual(code, 1)
        self.assertIn("nomatch", err)

    def test_json(self):
        code, out, _ = _run(["catalog", "--json", "--filter", "sibuya"])
        self.assertEqual(code, 0)
        (entry,) = json.loads(out)
        self.assertEqual(entry["regime"], "poisson-dirichlet")
        self.assertIsNone(entry["mu"])


class MomentsCommandTests(unittest.TestCase):
    def test_degenerate_pair_coalescence(self):
        code, out, _ = _run(["moments", "--model", "degenerate", "--N", "10", "--query", "1:2"])
        self.assertEqual(code, 0)
        self.assertIn("Phi_1(2) = 0.1 ", out)

    def test_json_with_monte_carlo(self):
        code, out, _ = _run(["moments", "--model", "gamma:r=1", "--N", "99", "--query", "1:2", "--method", "both", "--reps", "200", "--json"])
        self.assertEqual(code, 0)
        payload = json.loads(out)
        self.assertAlmostEqual(payload["exact"]["value"], 0.02, places=12)
        self.assertIn("z", payload)

    def test_bad_query_and_model(self):
        code, _, err = _run(["moments", "--model", "degenerate", "--N", "10", "--query", "2:2"])
        self.assertEqual(code, 2)
        self.assertIn("malformed query", err)
        code, _, err = _run(["moments", "--model", "nosuch:alpha=1", "--N", "10", "--query", "1:2"])
        self.assertEqual(code, 2)
        self.assertTrue(err.startswith("error: "))

    def test_unexpected_failure_exits_with_execution_error(self):
        with mock.patch("canningskit.cli.moments.phi_exact", side_effect=ZeroDivisionError("float division by zero")):
            code, out, err = _run(["moments", "--model", "pareto:alpha=1.5", "--N", "10", "--query", "1:2"])
        self.assertEqual(code, 2)
        self.assertEqual(out, "")
        self.assertIn("error: ZeroDivisionError: float division by zero", err)


class SimulateCommandTests(unittest.TestCase):
    def test_single_lineage(self):
        code, out, _ = _run(["simulate", "--model", "degenerate", "--N", "10", "--n", "1", "--json"])
        self.assertEqual(code, 0)
        payload = json.loads(out)
        self.assertEqual(payload["mrca"], 0)
        self.assertEqual(payload["block_counts"], [1])

    def test_path_csv(self):
        with tempfile.TemporaryDirectory() as tmp:
            out_path = Path(tmp) / "path.csv"
            code, _, err = _run(["simulate", "--model", "pareto:alpha=1", "--N", "50", "--n", "4", "--seed", "3", "--out", str(out_path)])
            self.assertEqual(code, 0)
            lines = out_path.read_text().splitlines()
            self.assertEqual(lines[0], "generation,blocks,partition")
            self.assertEqual(lines[1], "0,4,{1}{2}{3}{4}")
            self.assertIn("MRCA at generation", err)

    def test_mrca_summary(self):
        code, out, _ = _run(["simulate", "--model", "degenerate", "--N", "10", "--n", "2", "--reps", "50", "--workers", "1", "--json"])
        self.assertEqual(code, 0)
        payload = json.loads(out)
        self.assertEqual(payload["unabsorbed"], 0)
        self.assertGreater(payload["mean"], 0.0)


class CurveCommandTests(unittest.TestCase):
    def test_csv_to_stdout(self):
        code, out, _ = _run(["cn-curve", "--model", "gamma:r=1", "--N", "9,99", "--reps", "50", "--workers", "1"])
        self.assertEqual(code, 0)
        lines = out.splitlines()
        self.assertEqual(lines[0], "model,N,cn_exact,cn_mc,cn_mc_se,cn_predicted,ratio,regime")
        self.assertEqual(len(lines), 3)
        self.assertTrue(lines[1].startswith("gamma:r=1,9,"))

    def test_json_skips_monte_carlo_above_limit(self):
        code, out, _ = _run(["cn-curve", "--model", "degenerate", "--N", "10", "--N", "1000", "--mc-max-n", "100", "--reps", "10", "--json"])
        self.assertEqual(code, 0)
        rows = json.loads(out)
        self.assertEqual([r["N"] for r in rows], [10, 1000])
        self.assertIsNotNone(rows[0]["cn_mc"])
        self.assertIsNone(rows[1]["cn_mc"])


class VerifyCommandTests(unittest.TestCase):
    def test_degenerate_config_passes(self):
        with tempfile.TemporaryDirectory() as tmp:
            code, out, _ = _run(["verify", "--config", str(CONFIG_DIR / "degenerate_only.json"), "--out", tmp, "--workers", "1"])
            self.assertEqual(code, 0, out)
            self.assertTrue((Path(tmp) / "report.json").exists())
            self.assertTrue((Path(tmp) / "curves.csv").exists())
            self.assertIn("pass", out)

    def test_corrupted_config(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "bad.json"
            path.write_text('{"models": [')
            code, _, err = _run(["verify", "--config", str(path), "--out", tmp])
            self.assertEqual(code, 2)
            self.assertIn(str(path), err)

    def test_missing_config(self):
        code, _, err = _run(["verify", "--config", "/nonexistent/config.json"])
        self.assertEqual(code, 2)
        self.assertIn("config.json", err)


if __name__ == "__main__":
    unittest.main()
