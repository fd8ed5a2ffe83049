"""Exact large-deviation asymptotics for two-point jump laws.

With P(X = b) = q and P(X = a) = 1 - q the walk Z_n / n moves on the segment
between (a, u(a)) and (b, u(b)), so {W_n >= z} is an event for the binomial
count N_n of b-steps.  Closed-form Bahadur-Rao type approximations are compared
against exact binomial summation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special, stats

from . import distributions as D
from .errors import PreconditionError
from .geometry import in_target_set

# widening of B_z for lattice points that sit on the curve up to round-off
_EDGE_TOL = 1e-12


def _norm(norm):
    return norm if hasattr(norm, "u") else D.PowerLaw(float(norm))


@dataclass
class ThresholdSolution:
    case_tag: str  # a_neg | a_zero | a_pos | trivial_b_nonpos
    roots: tuple
    q: float


def segment_ratio(a, b, norm):
    """f(t) = S/n over u_inv(T/n) along the segment at fraction t of b-steps."""
    norm = _norm(norm)
    ua, ub = float(norm.u(a)), float(norm.u(b))

    def f(t):
        return (a + t * (b - a)) / float(norm.inverse(ua + t * (ub - ua)))

    return f


def thresholds(a, b, q, norm, z) -> ThresholdSolution:
    norm = _norm(norm)
    if not a < b:
        raise PreconditionError("need a < b")
    if not 0 < q < 1:
        raise PreconditionError("need q in (0, 1)")
    if b <= 0:
        return ThresholdSolution("trivial_b_nonpos", (), q)
    f = segment_ratio(a, b, norm)
    zq = f(q)
    if not zq < z < 1:
        raise PreconditionError(f"z={z} outside (f(q), 1) = ({zq}, 1)")
    g = lambda t: f(t) - z
    # f(q) = z* < z and f(1) = 1 > z bracket the upper root
    upper = optimize.brentq(g, q, 1.0, xtol=1e-15, rtol=1e-15)
    if a < 0:
        return ThresholdSolution("a_neg", (upper,), q)
    if a == 0:
        return ThresholdSolution("a_zero", (0.0, upper), q)
    # a > 0: f(0) = 1 > z as well
    lower = optimize.brentq(g, 0.0, q, xtol=1e-15, rtol=1e-15)
    return ThresholdSolution("a_pos", (lower, upper), q)


def binary_rate(alpha, q) -> float:
    """Rate function of a Bernoulli(q) mean, including both endpoints."""
    if not 0 <= alpha <= 1:
        raise PreconditionError("alpha must lie in [0, 1]")
    return float(special.xlogy(alpha, alpha / q) + special.xlogy(1 - alpha, (1 - alpha) / (1 - q)))


def binary_tilt(alpha, q) -> float:
    if alpha == 0:
        return -math.inf
    if alpha == 1:
        return math.inf
    return math.log(alpha / (1 - alpha) * (1 - q) / q)


def log_q_n(alpha, q, n) -> float:
    """log of the lattice tail approximation Q_n(alpha).

    For alpha > q it approximates P(N_n >= n alpha); for alpha < q the mirrored
    expression approximates P(N_n <= n alpha).
    """
    if alpha == q:
        raise PreconditionError("Q_n is singular at alpha = q")
    if alpha < q:
        return log_q_n(1 - alpha, 1 - q, n)
    if alpha >= 1:
        return math.inf
    return (0.5 * math.log(alpha / (2 * math.pi * n * (1 - alpha)))
            + math.log((1 - q) / (alpha - q))
            + n * alpha * math.log(q / alpha)
            + n * (1 - alpha) * math.log((1 - q) / (1 - alpha)))


def q_n(alpha, q, n) -> float:
    return math.exp(log_q_n(alpha, q, n))


def _lattice_members(a, b, q, norm, z, n):
    """Boolean array over k = 0..n: is the endpoint with k b-steps in B_z?"""
    norm = _norm(norm)
    k = np.arange(n + 1, dtype=float)
    s = (n * a + k * (b - a)) / n
    ua, ub = float(norm.u(a)), float(norm.u(b))
    t = (n * ua + k * (ub - ua)) / n
    return in_target_set(np.stack([s, t], axis=-1), z, norm, rel_tol=_EDGE_TOL)


def log_exact_prob(a, b, q, norm, z, n) -> float:
    """log P(W_n >= z) by summing binomial masses over lattice points in B_z."""
    members = _lattice_members(a, b, q, norm, z, n)
    if not members.any():
        return -math.inf
    k = np.nonzero(members)[0]
    return float(special.logsumexp(stats.binom.logpmf(k, n, q)))


def exact_prob(a, b, q, norm, z, n) -> float:
    return math.exp(log_exact_prob(a, b, q, norm, z, n))


@dataclass
class BinomialAsymptotics:
    n: int
    case_tag: str
    levels: dict
    terms: dict
    log_total: float
    log_exact: float
    total: float = field(init=False)
    exact: float = field(init=False)
    ratio: float = field(init=False)

    def __post_init__(self):
        self.total = math.exp(self.log_total)
        self.exact = math.exp(self.log_exact)
        self.ratio = math.exp(self.log_total - self.log_exact)


def lattice_level(t, n, members, upper=True, lattice="ceil"):
    """Integer count k for the level n*t.

    ``ceil``: smallest k >= n t (largest k <= n t for a lower branch); when n t
    is within 1e-9 of an integer the lattice point decides by set membership.
    ``none`` keeps the real level t; ``literal`` rounds t itself.
    """
    if lattice == "none":
        return None
    if lattice == "literal":
        return n * (math.ceil(t) if upper else math.floor(t))
    x = n * t
    k0 = round(x)
    if abs(x - k0) < 1e-9:
        if members[k0]:
            return k0
        return k0 + 1 if upper else k0 - 1
    return math.ceil(x) if upper else math.floor(x)


def _branch(t, q, n, members, upper, lattice):
    k = lattice_level(t, n, members, upper, lattice)
    alpha = t if k is None else k / n
    if lattice != "literal":
        # endpoint levels: the formula breaks down, the tail is a single atom
        if alpha >= 1:
            return alpha, n * math.log(q)
        if alpha <= 0:
            return alpha, n * math.log1p(-q)
    try:
        return alpha, log_q_n(alpha, q, n)
    except (ValueError, ZeroDivisionError):
        return alpha, math.inf


def asymptotic_prob(a, b, q, norm, z, n, lattice="ceil") -> BinomialAsymptotics:
    norm = _norm(norm)
    sol = thresholds(a, b, q, norm, z)
    members = _lattice_members(a, b, q, norm, z, n)
    log_exact = log_exact_prob(a, b, q, norm, z, n)
    levels, terms = {}, {}
    if sol.case_tag == "trivial_b_nonpos":
        lt = n * math.log(q) if b == 0 else -math.inf
        return BinomialAsymptotics(n, sol.case_tag, levels, {"atom": lt}, lt, log_exact)
    if sol.case_tag == "a_neg":
        levels["upper"], terms["upper"] = _branch(sol.roots[0], q, n, members, True, lattice)
    else:
        levels["upper"], terms["upper"] = _branch(sol.roots[1], q, n, members, True, lattice)
        if sol.case_tag == "a_zero":
            terms["zero"] = n * math.log1p(-q)
        else:
            levels["lower"], terms["lower"] = _branch(sol.roots[0], q, n, members, False,
                                                      lattice)
    log_total = float(special.logsumexp(list(terms.values())))
    return BinomialAsymptotics(n, sol.case_tag, levels, terms, log_total, log_exact)


def segment_rate(a, b, q, norm, z):
    """Lambda(B_z) for a two-point law: smallest binary rate over B_z on the segment.

    Returns (rate, t_hat) where t_hat is the fraction of b-steps at the
    dominating point.
    """
    sol = thresholds(a, b, q, norm, z)
    if sol.case_tag == "trivial_b_nonpos":
        return (-math.log(q) if b == 0 else math.inf), (1.0 if b == 0 else math.nan)
    cands = [(binary_rate(sol.roots[-1], q), sol.roots[-1])]
    if sol.case_tag in ("a_zero", "a_pos"):
        cands.append((binary_rate(sol.roots[0], q), sol.roots[0]))
    return min(cands)
