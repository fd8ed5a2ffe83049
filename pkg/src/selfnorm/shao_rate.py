"""The logarithmic rate J_z computed by three independent routes.

* ``j_supinf``    sup over c >= 0 of inf over t >= 0 of the scalar cumulant of
                  t (cX - z/p (|X|^p + (p-1) c^(p/(p-1)))).
* ``j_halfplane`` sup over boundary points y of minus the one-sided rate of the
                  jump projected on the supporting half-plane at y.
* ``j_boundary``  minus the minimum of the bivariate rate function along the
                  curved boundary of B_z.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import distributions as D
from . import exact_twopoint as E
from . import geometry as G
from .errors import NumericFailure, PreconditionError
from .legendre import RatePoint, rate_at, univariate_rate

N_STARTS = 5


def _check(dist, norm, z):
    if not dist.prob_positive() > 0:
        raise PreconditionError("need P(X > 0) > 0")
    zs = D.z_star(dist, norm)
    if not z > zs:
        raise PreconditionError(f"z={z} is not above z*={zs}: not a large deviation")


def _log_p_zero(dist):
    p0 = dist.prob_zero()
    return math.log(p0) if p0 > 0 else -math.inf


def _power(norm):
    if not isinstance(norm, D.PowerLaw):
        raise NotImplementedError("the sup-inf route exists only for u(x) = |x|^p")
    return norm.p


# --------------------------------------------------------------------------
# one-dimensional search helpers


def _neg_finite(v):
    return -v if math.isfinite(v) else 1e300


def _refine_max(f, grid, n_starts=N_STARTS, xatol=1e-12):
    """Maximize f over a sorted grid, then polish the best local maxima.

    Returns a list of (value, x) for each polished start, best first.
    """
    vals = np.array([f(x) for x in grid])
    finite = np.where(np.isfinite(vals), vals, -np.inf)
    idx = [i for i in range(len(grid))
           if finite[i] > -np.inf
           and (i == 0 or finite[i] >= finite[i - 1])
           and (i == len(grid) - 1 or finite[i] >= finite[i + 1])]
    if not idx:
        return [(-math.inf, grid[0])]
    idx = sorted(idx, key=lambda i: -finite[i])[:n_starts]
    out = []
    for i in idx:
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
        best = (finite[i], grid[i])
        if hi > lo:
            res = optimize.minimize_scalar(lambda x: _neg_finite(f(x)), bounds=(lo, hi),
                                           method="bounded",
                                           options={"xatol": xatol * max(1.0, abs(hi))})
            if -res.fun > best[0]:
                best = (-float(res.fun), float(res.x))
        out.append(best)
    return sorted(out, key=lambda t: -t[0])


def _inf_halfline(f, cap=1e8, floor=1e-40):
    """min over t >= 0 of a convex f with f(0) = 0 (f may be inf past the minimum)."""
    b, fb = 0.5, f(0.5)
    c, fc = 1.0, f(1.0)
    if fc < fb:
        a, fa, b, fb = b, fb, c, fc
        while True:
            c, fc = 2 * b, f(2 * b)
            if not fc < fb:
                break
            if c >= cap:
                return min(fc, 0.0)
            a, fa, b, fb = b, fb, c, fc
    else:
        # minimum below t = 1/2: descend by factors of 4 until f turns up again
        while True:
            a, fa = b / 4, f(b / 4)
            if not (fa < fb or fb == math.inf):
                break
            if a <= floor:
                return min(fa, 0.0)
            c, fc, b, fb = b, fb, a, fa
    try:
        # golden section compares values only, so inf on the bracket ends is harmless
        res = optimize.minimize_scalar(f, bracket=(a, b, c), method="golden",
                                       options={"xtol": 1e-10})
        best = min(float(res.fun), fb)
    except ValueError:
        best = fb
    return min(best, 0.0)


def _y_max(dist):
    return min(max(dist.abs_quantile(0.9999), 1e-3), 1e4)


def _y_grid(dist):
    """Log-spaced near the origin, uniform further out (narrow admissible arcs)."""
    y_max = _y_max(dist)
    # atoms can leave admissible arcs much narrower than a continuous law's
    dense = 257 if getattr(dist, "values", None) is not None else 65
    return np.union1d(np.geomspace(1e-4, y_max, 64), np.linspace(0, y_max, dense)[1:])


# --------------------------------------------------------------------------
# the three routes


def supinf_inner(dist, p, z, c):
    """inf over t >= 0 of ln E exp(t (cX - z/p (|X|^p + (p-1) c^(p/(p-1)))))."""
    norm = D.PowerLaw(p)
    shift = z / p * (p - 1) * c ** (p / (p - 1))

    def f(t):
        try:
            return D.cumulant(dist, norm, (t * c, -t * z / p)) - t * shift
        except NumericFailure:
            # only at extreme t, past the minimum of the convex objective
            return math.inf

    return _inf_halfline(f)


def j_supinf(dist, p, z) -> float:
    norm = D.PowerLaw(p)
    if z > 1:
        return _log_p_zero(dist)
    _check(dist, norm, z)
    mean = dist.mean()
    c0 = max(1.0, abs(mean)) if math.isfinite(mean) else 1.0
    grid = c0 * 2.0 ** np.arange(-24, 25)
    # c = 0: the inner infimum is the t -> inf limit ln P(X = 0)
    return max(_refine_max(lambda c: supinf_inner(dist, p, z, c), grid)[0][0],
               _log_p_zero(dist))


def halfplane_inner(dist, norm, z, y) -> float:
    hp = G.normal_and_offset(y, z, norm)
    law = G.projected_jump_law(dist, y, z, norm)
    return -univariate_rate(law, hp.offset).rate


def j_halfplane(dist, p, z) -> float:
    norm = D.PowerLaw(p)
    if z > 1:
        return _log_p_zero(dist)
    _check(dist, norm, z)
    grid = _y_grid(dist)
    return max(_refine_max(lambda y: halfplane_inner(dist, norm, z, y), grid)[0][0],
               halfplane_inner(dist, norm, z, 0.0))


@dataclass
class BoundarySolution:
    y_hat: float
    alpha_hat: np.ndarray
    tilt: np.ndarray
    rate: float
    unique_flag: bool
    starts: list = field(default_factory=list, repr=False)
    point: RatePoint | None = field(default=None, repr=False)


def _boundary_twopoint(dist, norm, z):
    a, b, q = (dist.a, dist.b, dist.q) if isinstance(dist, D.TwoPoint) else (
        dist.values[0], dist.values[-1], dist.probs[-1])
    rate, t_hat = E.segment_rate(a, b, q, norm, z)
    ua, ub = float(norm.u(a)), float(norm.u(b))
    alpha = np.array([a + t_hat * (b - a), ua + t_hat * (ub - ua)])
    y = float(alpha[0])
    eta = E.binary_tilt(t_hat, q)
    if math.isfinite(eta):
        nu = np.array(G.normal_and_offset(y, z, norm).normal)
        tilt = eta / float(nu @ np.array([b - a, ub - ua])) * nu
    else:
        tilt = np.array([0.0, -math.inf])
    return BoundarySolution(y, alpha, tilt, rate, True)


def j_boundary(dist, norm, z) -> BoundarySolution:
    """Dominating point of B_z: the minimizer of the rate along the boundary curve.

    Two-point laws have a rate function concentrated on a segment; there the
    minimum is taken over the segment's crossings with B_z.
    """
    if not z < 1:
        raise PreconditionError("boundary minimization needs z < 1")
    _check(dist, norm, z)
    if dist.is_degenerate:
        if len(dist.values) < 2:
            raise PreconditionError("single-atom law")
        return _boundary_twopoint(dist, norm, z)

    cache = {"tilt": (0.0, -1.0)}
    points = {}

    def rate_y(y):
        rp = rate_at(dist, norm, G.boundary_point(y, z, norm), start=cache["tilt"])
        if not rp.converged:
            rp = rate_at(dist, norm, G.boundary_point(y, z, norm))
        if rp.converged:
            cache["tilt"] = rp.tilt
            points[float(y)] = rp
            return -rp.rate
        return -math.inf

    grid = _y_grid(dist)
    starts = _refine_max(rate_y, grid)
    # the origin is a vertex of the support hull: its rate -ln P(X = 0) is not attained
    origin = _log_p_zero(dist)
    if math.isfinite(origin) and origin >= starts[0][0]:
        unique = not starts[0][0] >= origin - 1e-6
        return BoundarySolution(0.0, np.zeros(2), np.array([0.0, -math.inf]), -origin,
                                unique, [(-v, y) for v, y in starts])
    if not math.isfinite(starts[0][0]):
        raise NumericFailure("no boundary point has a finite attained rate",
                             residual=math.inf)
    best_val, y_hat = starts[0]
    rp = points.get(float(y_hat))
    if rp is None:
        rate_y(y_hat)
        rp = points[float(y_hat)]
    unique = all(abs(y - y_hat) <= 1e-6 * max(1.0, y_hat)
                 for v, y in starts if v >= best_val - 1e-6)
    return BoundarySolution(float(y_hat), rp.alpha, rp.tilt, rp.rate, unique,
                            [(-v, y) for v, y in starts], rp)


# --------------------------------------------------------------------------
# report


@dataclass
class RateReport:
    z: float
    norm: object
    J_supinf: float | None
    J_halfplane: float | None
    J_boundary: float
    dominating: BoundarySolution | None
    agreement: float = field(init=False)

    def __post_init__(self):
        vals = [v for v in (self.J_supinf, self.J_halfplane, self.J_boundary)
                if v is not None and math.isfinite(v)]
        self.agreement = max(vals) - min(vals) if vals else 0.0

    def to_dict(self):
        def num(v):
            if v is None:
                return None
            return float(v) if math.isfinite(v) else ("inf" if v > 0 else "-inf")

        d = {"z": self.z}
        d.update({"p": self.norm.p} if isinstance(self.norm, D.PowerLaw)
                 else {"normalizer": self.norm.to_dict()})
        sol = self.dominating
        d.update({
            "J_supinf": num(self.J_supinf),
            "J_halfplane": num(self.J_halfplane),
            "J_boundary": num(self.J_boundary),
            "alpha_hat": [num(v) for v in sol.alpha_hat] if sol else [0.0, 0.0],
            "tilt": [num(v) for v in sol.tilt] if sol else None,
            "agreement": self.agreement,
        })
        return d


def rate_report(dist, norm, z) -> RateReport:
    """All available routes for J_z at one level."""
    if z > 1:
        j = _log_p_zero(dist)
        power = isinstance(norm, D.PowerLaw)
        return RateReport(z, norm, j if power else None, j if power else None, j, None)
    sol = j_boundary(dist, norm, z)
    if isinstance(norm, D.PowerLaw):
        return RateReport(z, norm, j_supinf(dist, norm.p, z), j_halfplane(dist, norm.p, z),
                          -sol.rate, sol)
    return RateReport(z, norm, None, None, -sol.rate, sol)
