from __future__ import annotations

import csv
import json
import logging
import math
import time
from pathlib import Path

from .. import __version__
from ..core.limit_coalescents import BRANCH_FORMULAS
from ..models.config import RunConfig
from ..models.results import ModelReport, VerificationReport
from .battery import (
    bs_second_order_tests,
    cn_curve,
    curve_tests,
    transition_frequency_tests,
    verify_limit_transitions,
)
from .regime import Regime, classify

logger = logging.getLogger(__name__)

CURVE_COLUMNS = ("model", "N", "cn_exact", "cn_mc", "cn_mc_se", "cn_predicted", "ratio", "regime")


def _finite_or_none(value: float) -> float | None:
    return value if math.isfinite(value) else None


def run_report(cfg: RunConfig) -> VerificationReport:
    reports = []
    for spec in cfg.models:
        started = time.perf_counter()
        model = spec.build()
        prediction = classify(model)
        grid = sorted(spec.n_grid or cfg.n_grid)
        logger.info("verifying %s as %s on N=%s", model.label, prediction.label, grid)

        curve = cn_curve(model, prediction, grid, cfg, cfg.workers)
        tests = curve_tests(prediction, curve, cfg.tolerances)
        transition_n = spec.transition_n or grid[-1]
        tests += verify_limit_transitions(model, prediction, transition_n, cfg.quadrature, cfg.tolerances)
        if prediction.regime is Regime.BOLTHAUSEN_SZNITMAN:
            tests += bs_second_order_tests(model, grid, cfg.quadrature)
        if cfg.freq_steps > 0 and cfg.sample_size <= cfg.freq_n:
            tests += transition_frequency_tests(
                model, cfg.sample_size, cfg.freq_n, cfg.freq_steps, cfg.seed, cfg.quadrature, cfg.tolerances, cfg.workers
            )

        passed = all(t.passed for t in tests)
        reports.append(
            ModelReport(
                model=model.label,
                regime=prediction.regime.value,
                regime_label=prediction.label,
                branch=BRANCH_FORMULAS[prediction.regime],
                alpha=model.alpha_label,
                mu=_finite_or_none(model.mu),
                rho=_finite_or_none(model.rho),
                n_grid=grid,
                curve=curve,
                tests=tests,
                passed=passed,
            )
        )
        for t in tests:
            if not t.passed:
                logger.warning("%s: %s %s at N=%d observed %.6g target %.6g", model.label, t.name, t.query, t.N, t.observed, t.target)
        logger.info("%s done in %.1fs: %s", model.label, time.perf_counter() - started, "pass" if passed else "FAIL")

    return VerificationReport(
        version=__version__,
        config=cfg.model_dump(mode="json", exclude={"workers", "out_dir"}),
        models=reports,
        passed=all(r.passed for r in reports),
    )


def csv_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_report(report: VerificationReport, out_dir: str | Path) -> tuple[Path, Path]:
    """Write report.json and curves.csv; both depend only on the config and seed."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    json_path = out / "report.json"
    csv_path = out / "curves.csv"
    json_path.write_text(json.dumps(report.model_dump(mode="json"), sort_keys=True, indent=2) + "\n")
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CURVE_COLUMNS)
        for model in report.models:
            for row in model.curve:
                data = row.model_dump()
                writer.writerow([csv_value(data[c]) for c in CURVE_COLUMNS])
    logger.info("wrote %s and %s", json_path, csv_path)
    return json_path, csv_path
