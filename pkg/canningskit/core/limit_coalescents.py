"""Limiting coalescents: Λ-measure functionals and Poisson-Dirichlet(α, 0) transitions."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from scipy.special import betaln, gammaln

from ..errors import ConfigurationError, DomainError
from .dist_catalog import DistributionModel
from .partitions import Partition, enumerate_partitions, merger_spec
from .rv_calculus import ell_star, solve_aN

logger = logging.getLogger(__name__)


class Branch(str, Enum):
    KINGMAN_MOMENT = "kingman-moment"
    KINGMAN_ALPHA2 = "kingman-alpha2"
    BETA = "beta"
    BOLTHAUSEN_SZNITMAN = "bolthausen-sznitman"
    POISSON_DIRICHLET = "poisson-dirichlet"
    STAR_SHAPED = "star-shaped"


class LambdaVariant(str, Enum):
    DIRAC_AT_0 = "dirac-at-0"
    BETA = "beta"
    UNIFORM = "uniform"
    DIRAC_AT_1 = "dirac-at-1"


@dataclass(frozen=True)
class LambdaSpec:
    variant: LambdaVariant
    alpha: float | None = None

    def __post_init__(self):
        if self.variant is LambdaVariant.BETA and not (self.alpha is not None and 1.0 < self.alpha < 2.0):
            raise DomainError(f"Beta(2-alpha, alpha) needs 1 < alpha < 2, got {self.alpha}")

    @property
    def label(self) -> str:
        if self.variant is LambdaVariant.BETA:
            return f"Beta({2.0 - self.alpha:g},{self.alpha:g})"
        return {
            LambdaVariant.DIRAC_AT_0: "Kingman",
            LambdaVariant.UNIFORM: "Bolthausen-Sznitman",
            LambdaVariant.DIRAC_AT_1: "star-shaped",
        }[self.variant]


@dataclass(frozen=True)
class PDSpec:
    alpha: float
    theta: float = 0.0

    def __post_init__(self):
        _check_pd_alpha(self.alpha)
        if self.theta != 0.0:
            raise DomainError("only theta = 0 is supported")

    @property
    def label(self) -> str:
        return f"PD({self.alpha:g},0)"


def _check_pd_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"Poisson-Dirichlet alpha must lie in (0, 1), got {alpha}")


def lambda_moment(spec: LambdaSpec, k: int) -> float:
    """∫ x^{k-2} Λ(dx)."""
    if k < 2:
        raise DomainError(f"lambda_moment needs k >= 2, got {k}")
    if spec.variant is LambdaVariant.DIRAC_AT_0:
        return 1.0 if k == 2 else 0.0
    if spec.variant is LambdaVariant.DIRAC_AT_1:
        return 1.0
    if spec.variant is LambdaVariant.UNIFORM:
        return 1.0 / (k - 1)
    a = spec.alpha
    return math.exp(gammaln(k - a) - gammaln(k) - gammaln(2.0 - a))


def lambda_rate(spec: LambdaSpec, b: int, k: int) -> float:
    """λ_{b,k} = ∫ x^{k-2} (1-x)^{b-k} Λ(dx): rate of one given k-merger among b blocks."""
    if not 2 <= k <= b:
        raise DomainError(f"lambda_rate needs 2 <= k <= b, got b={b}, k={k}")
    if spec.variant is LambdaVariant.DIRAC_AT_0:
        return 1.0 if k == 2 else 0.0
    if spec.variant is LambdaVariant.DIRAC_AT_1:
        return 1.0 if k == b else 0.0
    if spec.variant is LambdaVariant.UNIFORM:
        return math.exp(betaln(k - 1, b - k + 1))
    a = spec.alpha
    return math.exp(betaln(k - a, b - k + a) - betaln(2.0 - a, a))


def total_rate(spec: LambdaSpec, b: int) -> float:
    return sum(math.comb(b, k) * lambda_rate(spec, b, k) for k in range(2, b + 1))


def pd_transition(alpha: float, j: int, ks: Sequence[int]) -> float:
    """φ_j(k) = α^{j-1} Γ(j)/Γ(k) Π Γ(k_i - α)/Γ(1 - α)."""
    _check_pd_alpha(alpha)
    ks = tuple(int(k) for k in ks)
    if len(ks) != j or any(k < 1 for k in ks):
        raise DomainError(f"invalid query j={j}, ks={ks}")
    k = sum(ks)
    log_value = (j - 1) * math.log(alpha) + gammaln(j) - gammaln(k)
    log_value += sum(gammaln(ki - alpha) - gammaln(1.0 - alpha) for ki in ks)
    return math.exp(log_value)


def pd_consistency_check(alpha: float, j: int, ks: Sequence[int] | None = None) -> float:
    """φ_j(k) - φ_{j+1}(k, 1) - Σ_i φ_j(k + e_i); zero for a consistent transition family."""
    ks = tuple(ks) if ks is not None else (1,) * j
    residual = pd_transition(alpha, j, ks) - pd_transition(alpha, j + 1, ks + (1,))
    for i in range(j):
        bumped = list(ks)
        bumped[i] += 1
        residual -= pd_transition(alpha, j, bumped)
    return residual


def pd_transition_law(alpha: float, b: int) -> list[tuple[Partition, float]]:
    """One-step law of the PD(α, 0) coalescent started from b singletons."""
    start = Partition.singletons(b)
    law = []
    for target in enumerate_partitions(b):
        spec = merger_spec(start, target)
        law.append((target, pd_transition(alpha, spec.j, spec.group_sizes)))
    return law


def beta_moment_limit(alpha: float, k: int) -> float:
    """αB(k - α, α), the limit of (μN)^α/ℓ(N) E(W^k) for 1 < α < 2."""
    return alpha * math.exp(betaln(k - alpha, alpha))


def bs_joint_constant(j: int, ks: Sequence[int]) -> float:
    """Γ(j) Π Γ(k_i - 1) / Γ(k); Φ_j(k) ~ this × c_N^j in the α = 1 regime."""
    ks = tuple(int(k) for k in ks)
    if len(ks) != j or any(k < 2 for k in ks):
        raise DomainError(f"bs_joint_constant needs j group sizes >= 2, got j={j}, ks={ks}")
    return math.exp(gammaln(j) + sum(gammaln(k - 1.0) for k in ks) - gammaln(sum(ks)))


def theorem_branch(model: DistributionModel) -> Branch:
    alpha, mu, rho = model.alpha, model.mu, model.rho
    if alpha is None:
        if not math.isfinite(rho):
            raise ConfigurationError(f"{model.label}: no tail index and infinite second moment")
        return Branch.KINGMAN_MOMENT
    if alpha > 2.0 or (alpha == 2.0 and math.isfinite(rho)):
        if not math.isfinite(rho):
            raise ConfigurationError(f"{model.label}: alpha={alpha:g} > 2 but rho declared infinite")
        return Branch.KINGMAN_MOMENT
    if math.isfinite(rho):
        raise ConfigurationError(f"{model.label}: alpha={alpha:g} < 2 with rho declared finite")
    if alpha == 2.0:
        return Branch.KINGMAN_ALPHA2
    if alpha > 1.0:
        if not math.isfinite(mu):
            raise ConfigurationError(f"{model.label}: alpha={alpha:g} > 1 needs a finite mean")
        return Branch.BETA
    if math.isfinite(mu):
        raise ConfigurationError(f"{model.label}: alpha={alpha:g} <= 1 with mu declared finite")
    if alpha == 1.0:
        return Branch.BOLTHAUSEN_SZNITMAN
    if alpha > 0.0:
        return Branch.POISSON_DIRICHLET
    return Branch.STAR_SHAPED


def limit_measure(branch: Branch, alpha: float | None) -> LambdaSpec | PDSpec:
    if branch in (Branch.KINGMAN_MOMENT, Branch.KINGMAN_ALPHA2):
        return LambdaSpec(LambdaVariant.DIRAC_AT_0)
    if branch is Branch.BETA:
        return LambdaSpec(LambdaVariant.BETA, alpha)
    if branch is Branch.BOLTHAUSEN_SZNITMAN:
        return LambdaSpec(LambdaVariant.UNIFORM)
    if branch is Branch.POISSON_DIRICHLET:
        return PDSpec(alpha)
    return LambdaSpec(LambdaVariant.DIRAC_AT_1)


def predicted_cN(model: DistributionModel, N: int) -> float:
    """Leading-order coalescence probability for the model's branch."""
    branch = theorem_branch(model)
    alpha, mu, rho = model.alpha, model.mu, model.rho
    if branch is Branch.KINGMAN_MOMENT:
        if not (math.isfinite(mu) and math.isfinite(rho)):
            raise ConfigurationError(f"{model.label}: finite mu and rho are required")
        return rho / (mu * mu * N)
    if branch is Branch.KINGMAN_ALPHA2:
        return 2.0 * ell_star(model.slowly_varying(), N) / (mu * mu * N)
    if branch is Branch.BETA:
        log_value = gammaln(2.0 - alpha) + gammaln(alpha + 1.0) + math.log(model.ell(N))
        return math.exp(log_value - alpha * math.log(mu) - (alpha - 1.0) * math.log(N))
    if branch is Branch.BOLTHAUSEN_SZNITMAN:
        ell = model.slowly_varying()
        a_n = solve_aN(ell, N)
        logger.debug("a_N for %s at N=%d: %g", model.label, N, a_n)
        return ell(a_n) / ell_star(ell, a_n)
    if branch is Branch.POISSON_DIRICHLET:
        return 1.0 - alpha
    return 1.0


BRANCH_FORMULAS: dict[Branch, str] = {
    Branch.KINGMAN_MOMENT: "rho/(mu^2 N)",
    Branch.KINGMAN_ALPHA2: "2 ell*(N)/(mu^2 N)",
    Branch.BETA: "Gamma(2-a)Gamma(a+1) ell(N)/(mu^a N^(a-1))",
    Branch.BOLTHAUSEN_SZNITMAN: "ell(a_N)/ell*(a_N)",
    Branch.POISSON_DIRICHLET: "1-a",
    Branch.STAR_SHAPED: "1",
}
