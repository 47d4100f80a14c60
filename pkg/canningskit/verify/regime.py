from __future__ import annotations

from dataclasses import dataclass

from ..core.dist_catalog import DistributionModel
from ..core.limit_coalescents import Branch, LambdaSpec, PDSpec, limit_measure, predicted_cN, theorem_branch

# the six limit regimes are exactly the branches of the c_N asymptotics
Regime = Branch

_BOUNDARY = {Regime.KINGMAN_ALPHA2, Regime.BOLTHAUSEN_SZNITMAN, Regime.STAR_SHAPED}


@dataclass(frozen=True)
class RegimePrediction:
    model: DistributionModel
    regime: Regime
    limit: LambdaSpec | PDSpec

    @property
    def label(self) -> str:
        if self.regime is Regime.KINGMAN_ALPHA2:
            return "Kingman(alpha=2)"
        return self.limit.label

    @property
    def boundary(self) -> bool:
        """Log-speed regimes, accepted on trends rather than fixed tolerances."""
        return self.regime in _BOUNDARY

    def predicted_cN(self, N: int) -> float:
        return predicted_cN(self.model, N)


def classify(model: DistributionModel) -> RegimePrediction:
    regime = theorem_branch(model)
    return RegimePrediction(model=model, regime=regime, limit=limit_measure(regime, model.alpha))
