"""Monte Carlo engine for mixed multinomial Cannings models.

One generation draws X_1..X_N iid from the fitness law, sets W_i = X_i/S_N and
lets every lineage pick its parent independently with probabilities W. Moment
estimators condition on W, so they average power sums of the weights instead
of sampled indicators.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize
from scipy.special import softmax

from ..errors import DomainError, UsageError
from ..models.results import EstimateCI, MrcaSummary
from .dist_catalog import DistributionModel
from .parallel import run_chunks
from .partitions import Partition, index_partitions, merge_by_parent, mobius_weight

logger = logging.getLogger(__name__)

_TINY = np.finfo(float).tiny

# spawn-key tags separating the random streams of different estimators
_KEY_CN, _KEY_PHI, _KEY_FREQ, _KEY_LDP, _KEY_MRCA = 1, 2, 3, 4, 5


@dataclass(eq=False)
class WeightVector:
    w: np.ndarray

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=float)
        if self.w.ndim != 1 or self.w.size == 0:
            raise UsageError("weights must be a non-empty vector")

    @property
    def N(self) -> int:
        return int(self.w.size)

    def power_sum(self, m: float) -> float:
        return float(np.sum(self.w**m))


@dataclass
class GenealogyPath:
    partitions: list[Partition] = field(default_factory=list)
    mrca: int | None = None

    @property
    def absorbed(self) -> bool:
        return self.mrca is not None

    @property
    def block_counts(self) -> list[int]:
        return [len(p) for p in self.partitions]


class AliasTable:
    """Vose alias method: O(N) setup, O(1) per categorical draw."""

    def __init__(self, weights):
        p = np.asarray(weights, dtype=float)
        n = p.size
        scaled = p * (n / p.sum())
        self.prob = np.ones(n)
        self.alias = np.arange(n)
        small = [i for i in range(n) if scaled[i] < 1.0]
        large = [i for i in range(n) if scaled[i] >= 1.0]
        while small and large:
            s, g = small.pop(), large.pop()
            self.prob[s] = scaled[s]
            self.alias[s] = g
            scaled[g] = (scaled[g] + scaled[s]) - 1.0
            (small if scaled[g] < 1.0 else large).append(g)
        # leftovers are 1 up to rounding

    def __len__(self) -> int:
        return self.prob.size

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        idx = rng.integers(0, self.prob.size, size)
        keep = rng.random(size) < self.prob[idx]
        return np.where(keep, idx, self.alias[idx])


def sample_weights(model: DistributionModel, N: int, rng: np.random.Generator) -> WeightVector:
    if N < 1:
        raise UsageError(f"N must be >= 1, got {N}")
    logs = np.asarray(model.sample_log(rng, N), dtype=float)
    w = softmax(logs)
    if np.any(w < _TINY):
        w = np.maximum(w, _TINY)
        w = w / w.sum()
    return WeightVector(w)


def sample_offspring(weights: WeightVector, rng: np.random.Generator) -> np.ndarray:
    """Multinomial(N, W) offspring numbers ν_1..ν_N."""
    return rng.multinomial(weights.N, weights.w)


def step_genealogy(pi: Partition, weights: WeightVector, rng: np.random.Generator, table: AliasTable | None = None) -> Partition:
    if len(pi) <= 1:
        return pi
    table = table or AliasTable(weights.w)
    return merge_by_parent(pi, table.sample(rng, len(pi)).tolist())


def simulate_coalescent(model: DistributionModel, N: int, n: int, horizon: int, rng: np.random.Generator) -> GenealogyPath:
    """Discrete-time n-coalescent with fresh weights every generation."""
    if not 1 <= n <= N:
        raise UsageError(f"need 1 <= n <= N, got n={n}, N={N}")
    pi = Partition.singletons(n)
    path = GenealogyPath([pi])
    if n == 1:
        path.mrca = 0
        return path
    for r in range(1, horizon + 1):
        pi = step_genealogy(pi, sample_weights(model, N, rng), rng)
        path.partitions.append(pi)
        if len(pi) == 1:
            path.mrca = r
            break
    if path.mrca is None:
        logger.info("genealogy of %d lineages not absorbed within %d generations", n, horizon)
    return path


# --- chunk workers (module level so they pickle) ------------------------------------


def _power_sums_chunk(rng: np.random.Generator, count: int, model: DistributionModel, N: int, orders: tuple[float, ...]) -> np.ndarray:
    out = np.empty((count, len(orders)))
    for r in range(count):
        w = sample_weights(model, N, rng).w
        for c, m in enumerate(orders):
            out[r, c] = np.sum(w**m)
    return out


def _parents_chunk(rng: np.random.Generator, count: int, model: DistributionModel, N: int, b: int) -> np.ndarray:
    out = np.empty((count, b), dtype=np.int64)
    for r in range(count):
        cdf = np.cumsum(sample_weights(model, N, rng).w)
        out[r] = np.minimum(np.searchsorted(cdf, rng.random(b) * cdf[-1], side="right"), N - 1)
    return out


def _sum_below_chunk(rng: np.random.Generator, count: int, model: DistributionModel, N: int, a: float) -> np.ndarray:
    out = np.empty(count)
    for r in range(count):
        out[r] = float(np.sum(model.sample(rng, N)) <= a * N)
    return out


def _mrca_chunk(rng: np.random.Generator, count: int, model: DistributionModel, N: int, n: int, horizon: int) -> np.ndarray:
    out = np.full(count, -1.0)
    for r in range(count):
        blocks = n
        for gen in range(1, horizon + 1):
            if blocks <= 1:
                break
            table = AliasTable(sample_weights(model, N, rng).w)
            blocks = int(np.unique(table.sample(rng, blocks)).size)
            if blocks == 1:
                out[r] = gen
                break
        if n == 1:
            out[r] = 0.0
    return out


def _estimate(samples: np.ndarray, reps: int, seed: int, method: str = "monte-carlo") -> EstimateCI:
    value = float(np.mean(samples))
    se = float(np.std(samples, ddof=1) / math.sqrt(samples.size)) if samples.size > 1 else 0.0
    return EstimateCI(value=value, se=se, reps=reps, seed=seed, method=method)


def _check_reps(reps: int) -> None:
    if reps < 2:
        raise UsageError(f"need at least 2 replicates, got {reps}")


# --- estimators ---------------------------------------------------------------------


def estimate_cN(model: DistributionModel, N: int, reps: int, seed: int, workers: int | None = 1) -> EstimateCI:
    """c_N as the average of Σ w_i² over weight draws."""
    _check_reps(reps)
    sums = run_chunks(_power_sums_chunk, reps, seed, (_KEY_CN, N), workers, args=(model, N, (2.0,)))
    return _estimate(sums[:, 0], reps, seed, "monte-carlo:rao-blackwell")


def phi_statistic(power_sums: dict[float, np.ndarray], ks: tuple[int, ...]) -> np.ndarray:
    """Σ over distinct ordered index tuples of Π w_i^k, by Möbius inversion over index partitions."""
    total = 0.0
    for blocks in index_partitions(len(ks)):
        term = float(mobius_weight(blocks))
        for block in blocks:
            term = term * power_sums[float(sum(ks[i] for i in block))]
        total = total + term
    return np.asarray(total)


def _subset_orders(ks: tuple[int, ...]) -> tuple[float, ...]:
    orders = set()
    for mask in range(1, 1 << len(ks)):
        orders.add(float(sum(k for i, k in enumerate(ks) if mask >> i & 1)))
    return tuple(sorted(orders))


def estimate_phi(model: DistributionModel, N: int, j: int, ks, reps: int, seed: int, workers: int | None = 1) -> EstimateCI:
    ks = tuple(int(k) for k in ks)
    if len(ks) != j:
        raise UsageError(f"query has j={j} but {len(ks)} group sizes")
    if any(k < 1 for k in ks):
        raise UsageError(f"group sizes must be >= 1, got {ks}")
    _check_reps(reps)
    if j > N:
        return EstimateCI(value=0.0, se=0.0, reps=reps, seed=seed, method="exact:j>N")
    orders = _subset_orders(ks)
    sums = run_chunks(_power_sums_chunk, reps, seed, (_KEY_PHI, N, *ks), workers, args=(model, N, orders))
    stat = phi_statistic({m: sums[:, c] for c, m in enumerate(orders)}, ks)
    return _estimate(stat, reps, seed, "monte-carlo:power-sums")


def transition_frequencies(
    model: DistributionModel, N: int, pi: Partition, steps: int, seed: int, workers: int | None = 1
) -> dict[str, EstimateCI]:
    """Empirical one-step law of the genealogy started from pi, keyed by the target partition text."""
    _check_reps(steps)
    parents = run_chunks(_parents_chunk, steps, seed, (_KEY_FREQ, N, pi.n), workers, args=(model, N, len(pi)))
    counts: dict[str, int] = {}
    for row in parents:
        key = str(merge_by_parent(pi, row.tolist()))
        counts[key] = counts.get(key, 0) + 1
    out = {}
    for key, c in sorted(counts.items()):
        p = c / steps
        out[key] = EstimateCI(value=p, se=math.sqrt(p * (1.0 - p) / steps), reps=steps, seed=seed, method="monte-carlo:frequency")
    return out


def chernoff_rate(model: DistributionModel, a: float) -> tuple[float, float]:
    """(q, θ*) with q = inf_θ e^θ ψ(θ/a), so that P(S_N <= aN) <= q^N."""
    if not 0.0 < a < model.mu:
        raise DomainError(f"chernoff_rate needs 0 < a < mu={model.mu}, got {a}")

    def f(theta: float) -> float:
        return theta + model.log_laplace(theta / a)

    hi = 1.0
    while hi < 1e6 and f(2.0 * hi) < f(hi):
        hi *= 2.0
    res = optimize.minimize_scalar(f, bounds=(0.0, 2.0 * hi), method="bounded", options={"xatol": 1e-10})
    q = min(1.0, math.exp(min(res.fun, 0.0)))
    logger.debug("chernoff rate for %s at a=%g: q=%g theta=%g", model.label, a, q, res.x)
    return q, float(res.x)


def lower_deviation_probability(model: DistributionModel, N: int, a: float, reps: int, seed: int, workers: int | None = 1) -> EstimateCI:
    _check_reps(reps)
    hits = run_chunks(_sum_below_chunk, reps, seed, (_KEY_LDP, N), workers, args=(model, N, a))
    p = float(np.mean(hits))
    return EstimateCI(value=p, se=math.sqrt(p * (1.0 - p) / reps), reps=reps, seed=seed, method="monte-carlo:indicator")


def estimate_mrca(model: DistributionModel, N: int, n: int, horizon: int, reps: int, seed: int, workers: int | None = 1) -> MrcaSummary:
    if not 1 <= n <= N:
        raise UsageError(f"need 1 <= n <= N, got n={n}, N={N}")
    _check_reps(reps)
    times = run_chunks(_mrca_chunk, reps, seed, (_KEY_MRCA, N, n), workers, args=(model, N, n, horizon))
    done = times[times >= 0]
    mean = float(np.mean(done)) if done.size else math.nan
    se = float(np.std(done, ddof=1) / math.sqrt(done.size)) if done.size > 1 else 0.0
    return MrcaSummary(mean=mean, se=se, absorbed=int(done.size), unabsorbed=int(times.size - done.size), horizon=horizon, seed=seed)
