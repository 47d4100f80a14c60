import contextlib
import io
import json
import tempfile
import unittest
from pathlib import Path

from canningskit.main import main

CONFIG = Path(__file__).resolve().parents[1] / "canningskit" / "config" / "six_regimes.json"


class SixRegimeRunTests(unittest.TestCase):
    """The bundled six-regime battery, run once through the command line."""

    @classmethod
    def setUpClass(cls):
        with tempfile.TemporaryDirectory() as tmp:
            out = io.StringIO()
            with contextlib.redirect_stdout(out), contextlib.redirect_stderr(io.StringIO()):
                cls.code = main(["verify", "--config", str(CONFIG), "--out", tmp, "--reps", "400"])
            cls.output = out.getvalue()
            report = json.loads((Path(tmp) / "report.json").read_text())
            cls.csv_header = (Path(tmp) / "curves.csv").read_text().splitlines()[0]
        cls.models = {m["model"]: m for m in report["models"]}

    def _curve(self, label):
        return self.models[label]["curve"]

    def _observed(self, label, name, query):
        (test,) = [t for t in self.models[label]["tests"] if t["name"] == name and t["query"] == query]
        return test["observed"]

    def test_run_passes(self):
        self.assertEqual(self.code, 0, self.output)
        self.assertEqual(len(self.models), 7)
        self.assertTrue(self.csv_header.startswith("model,N,cn_exact"))

    def test_kingman_at_alpha_two(self):
        curve = self._curve("pareto:alpha=2")
        first, last = curve[0], curve[-1]
        self.assertEqual(last["N"], 1_000_000)
        self.assertTrue(0.8 <= last["ratio"] <= 1.2, last["ratio"])
        self.assertLess(abs(last["ratio"] - 1.0), abs(first["ratio"] - 1.0))

    def test_beta_coalescent(self):
        label = "pareto:alpha=1.5"
        self.assertAlmostEqual(self._curve(label)[-1]["ratio"], 1.0, delta=0.1)
        for k in (3, 4, 5):
            (test,) = [t for t in self.models[label]["tests"] if t["query"] == f"Phi_1({k})/c_N"]
            with self.subTest(k=k):
                self.assertEqual(test["N"], 100_000)
                self.assertAlmostEqual(test["observed"] / test["target"], 1.0, delta=0.1)
        self.assertLessEqual(self._observed(label, "no-simultaneous-mergers", "Phi_2(2,2)/c_N"), 0.05)

    def test_bolthausen_sznitman(self):
        label = "pareto:alpha=1"
        curve = self._curve(label)
        self.assertLessEqual(abs(curve[-1]["ratio"] - 1.0), abs(curve[0]["ratio"] - 1.0))
        self.assertAlmostEqual(curve[-1]["ratio"], 1.0, delta=0.15)
        for k in (3, 4, 5):
            with self.subTest(k=k):
                self.assertAlmostEqual(self._observed(label, "lambda-moment", f"Phi_1({k})/c_N") * (k - 1), 1.0, delta=0.1)
        self.assertAlmostEqual(self._observed(label, "bs-second-order", "Phi_2(2,2)/c_N^2") * 6.0, 1.0, delta=0.2)

    def test_poisson_dirichlet(self):
        for label in ("pareto:alpha=0.5", "sibuya:alpha=0.5"):
            with self.subTest(model=label):
                top = self._curve(label)[-1]
                self.assertEqual(top["N"], 10_000)
                self.assertAlmostEqual(top["cn_exact"] / 0.5, 1.0, delta=0.05)
                self.assertAlmostEqual(self._observed(label, "pd-transition", "Phi_2(2,2)") * 48.0, 1.0, delta=0.1)
                self.assertAlmostEqual(self._observed(label, "pd-transition", "Phi_3(1,1,1)") / 0.25, 1.0, delta=0.1)

    def test_star_shaped(self):
        label = "logtail:beta=2"
        values = [r["cn_exact"] for r in self._curve(label)]
        self.assertEqual(values, sorted(values))
        self.assertLess(values[-1], 1.0)
        self.assertAlmostEqual(self._observed(label, "star-moment", "N*E(W^3)"), 1.0, delta=0.1)


if __name__ == "__main__":
    unittest.main()
