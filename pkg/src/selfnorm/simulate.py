"""Monte Carlo estimates of P(W_n >= z): plain simulation and tilted importance sampling.

Paths are generated in fixed blocks of ``BLOCK`` paths.  Block ``b`` draws from
its own Philox stream keyed by (seed, b), so results do not depend on how
blocks are spread over threads; per-block sums are merged in block order.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import distributions as D
from .errors import PreconditionError
from .geometry import in_target_set
from .shao_rate import BoundarySolution, j_boundary

BLOCK = 4096
# keeps a block's jump matrix around 1e6 doubles
MAX_CELLS = 1 << 20


@dataclass
class McEstimate:
    value: float
    std_error: float
    trials: int
    method: str  # direct | importance
    seed: int
    n: int
    hits: int
    effective_sample_size: float = math.nan
    log_value: float = -math.inf

    @property
    def rel_error(self) -> float:
        return self.std_error / self.value if self.value > 0 else math.inf

    def row(self):
        ess = "" if math.isnan(self.effective_sample_size) else repr(self.effective_sample_size)
        return [self.method, self.n, self.trials, self.seed, repr(self.value),
                repr(self.std_error), ess]


CSV_HEADER = ["method", "n", "trials", "seed", "estimate", "std_error", "ess"]


def write_csv(path, estimates) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for est in estimates:
            w.writerow(est.row())


def block_rng(seed: int, block: int) -> np.random.Generator:
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be a non-negative 64-bit integer")
    return np.random.Generator(np.random.Philox(key=(block << 64) | seed))


def _blocks(trials, n):
    size = max(1, min(BLOCK, MAX_CELLS // max(n, 1)))
    starts = range(0, trials, size)
    return [(b, s, min(size, trials - s)) for b, s in enumerate(starts)]


def walk_sums(dist, norm, n, m, rng, tilt=None):
    """(S_n, T_n) for m independent n-step walks; jumps tilted when ``tilt`` is given."""
    if tilt is None:
        x = dist.sample(rng, (m, n))
    else:
        x = D.tilted_sample(dist, norm, tilt, rng, (m, n))
    x = np.asarray(x, dtype=float).reshape(m, n)
    return x.sum(axis=1), norm.u(x).sum(axis=1)


def simulate_paths(dist, norm, n, trials, seed, tilt=None):
    """All (S_n, T_n) pairs in path order (for diagnostics and tests)."""
    out = [walk_sums(dist, norm, n, m, block_rng(seed, b), tilt)
           for b, _, m in _blocks(trials, n)]
    return np.concatenate([s for s, _ in out]), np.concatenate([t for _, t in out])


def _run(task, blocks, threads):
    if threads <= 1:
        return [task(blk) for blk in blocks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(task, blocks))


def direct_mc(dist, norm, z, n, trials, seed, threads=1) -> McEstimate:
    if trials < 1:
        raise ValueError("trials must be positive")

    def task(blk):
        b, _, m = blk
        s, t = walk_sums(dist, norm, n, m, block_rng(seed, b))
        return int(np.count_nonzero(in_target_set(np.stack([s / n, t / n], axis=-1), z, norm)))

    hits = sum(_run(task, _blocks(trials, n), threads))
    p = hits / trials
    se = math.sqrt(p * (1 - p) / trials)
    return McEstimate(p, se, trials, "direct", seed, n, hits,
                      log_value=math.log(p) if hits else -math.inf)


def importance_mc(dist, norm, z, n, trials, seed, threads=1,
                  solution: BoundarySolution | None = None, tilt=None) -> McEstimate:
    """Sample jumps from the law tilted at the dominating point and reweight.

    ``tilt`` overrides the dominating-point tilt.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    if tilt is None:
        sol = solution if solution is not None else j_boundary(dist, norm, z)
        tilt = sol.tilt
        if sol.point is not None and not sol.point.converged:
            raise PreconditionError("boundary solution did not converge")
    lam = np.asarray(tilt, dtype=float)
    if not np.all(np.isfinite(lam)):
        raise PreconditionError("dominating point has no finite tilt (not attained)")
    a = D.cumulant(dist, norm, lam)

    def task(blk):
        b, _, m = blk
        s, t = walk_sums(dist, norm, n, m, block_rng(seed, b), lam)
        hit = in_target_set(np.stack([s / n, t / n], axis=-1), z, norm)
        logw = -(lam[0] * s[hit] + lam[1] * t[hit]) + n * a
        if not logw.size:
            return 0, -math.inf, -math.inf
        return int(logw.size), float(special.logsumexp(logw)), float(special.logsumexp(2 * logw))

    parts = _run(task, _blocks(trials, n), threads)
    hits = sum(h for h, _, _ in parts)
    if not hits:
        return McEstimate(0.0, 0.0, trials, "importance", seed, n, 0, 0.0)
    lse = float(special.logsumexp([l1 for _, l1, _ in parts]))
    lse2 = float(special.logsumexp([l2 for _, _, l2 in parts]))
    log_mean = lse - math.log(trials)
    ess = math.exp(2 * lse - lse2)
    # relative variance of the weighted mean, free of under/overflow
    rel_var = max(trials / ess - 1.0, 0.0) / max(trials - 1, 1)
    mean = math.exp(log_mean)
    return McEstimate(mean, mean * math.sqrt(rel_var), trials, "importance", seed, n, hits,
                      ess, log_mean)


def rate_trend(dist, norm, z, n_schedule, trials, seed, threads=1):
    """[(n, log(estimate) / n)] from importance sampling at each n."""
    sol = j_boundary(dist, norm, z)
    out = []
    for n in n_schedule:
        est = importance_mc(dist, norm, z, n, trials, seed, threads, solution=sol)
        out.append((n, est.log_value / n))
    return out
