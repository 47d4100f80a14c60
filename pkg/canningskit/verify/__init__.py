from .orchestrator import run_report, write_report
from .regime import Regime, RegimePrediction, classify

__all__ = ["Regime", "RegimePrediction", "classify", "run_report", "write_report"]
