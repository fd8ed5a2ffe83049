"""Legendre transform of the bivariate cumulant.

``rate_at`` computes Lambda(alpha) = sup_lam (alpha . lam - A(lam)) by damped
Newton on grad A(lam) = alpha.  ``univariate_rate`` does the one-sided scalar
version used along supporting half-planes.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import distributions as D
from .errors import DegeneracyError, PreconditionError

START = (0.0, -1.0)
TOL = 1e-9


@dataclass
class RatePoint:
    """Lambda(alpha) with its maximizing tilt.

    When Newton fails to converge (alpha outside the image of grad A),
    ``lower_bound`` is the best dual value seen along the path.  ``rate`` is
    then that value if the dual objective had levelled off (finite but not
    attained, e.g. a vertex of the support hull) and ``inf`` otherwise.
    """

    alpha: np.ndarray
    rate: float
    tilt: np.ndarray
    converged: bool
    residual: float
    lower_bound: float
    iterations: int = 0


def _dual(alpha, lam, a_val):
    return float(alpha @ lam - a_val)


def rate_at(dist, norm, alpha, start=START, tol=TOL, max_iter=200) -> RatePoint:
    if dist.is_degenerate:
        raise DegeneracyError(
            "jump vector supported on a line; the rate function is one-dimensional "
            "(see selfnorm.exact_twopoint)")
    alpha = np.asarray(alpha, dtype=float)
    lam = np.asarray(start, dtype=float)
    if not D.in_domain(dist, norm, lam, interior=True):
        lam = np.asarray(START)
    a_val = D.cumulant(dist, norm, lam)
    phi = _dual(alpha, lam, a_val)
    grad = D.cumulant_grad(dist, norm, lam)
    best = phi
    gains = []
    it = 0
    for it in range(1, max_iter + 1):
        g = alpha - grad
        res = float(np.linalg.norm(g))
        if res <= tol:
            return RatePoint(alpha, phi, lam, True, res, phi, it)
        hess = D.cumulant_hess(dist, norm, lam)
        ridge = 1e-14 * np.trace(hess) + 1e-300
        with np.errstate(over="ignore", invalid="ignore"):
            try:
                d = np.linalg.solve(hess + ridge * np.eye(2), g)
            except np.linalg.LinAlgError:
                d = g / ridge
        # far outside the mean set the covariance vanishes; cap the step length
        cap = 10.0 * (1.0 + float(np.linalg.norm(lam)))
        size = float(np.linalg.norm(d))
        if not np.isfinite(size):
            break
        if size > cap:
            d *= cap / size
        slope = float(g @ d)
        t = 1.0
        accepted = False
        for _ in range(60):
            trial = lam + t * d
            if D.in_domain(dist, norm, trial, interior=True):
                a_t = D.cumulant(dist, norm, trial)
                if math.isfinite(a_t):
                    phi_t = _dual(alpha, trial, a_t)
                    armijo = phi_t >= phi + 1e-4 * t * slope
                    grad_t = None
                    if not armijo and phi_t >= phi - 1e-12 * max(1.0, abs(phi)):
                        grad_t = D.cumulant_grad(dist, norm, trial)
                        armijo = np.linalg.norm(alpha - grad_t) < res
                    if armijo:
                        accepted = True
                        break
            t *= 0.5
        if not accepted:
            break
        gains.append(phi_t - phi)
        lam, a_val, phi = trial, a_t, phi_t
        grad = grad_t if grad_t is not None else D.cumulant_grad(dist, norm, lam)
        best = max(best, phi)
        if np.linalg.norm(lam) > 1e8:
            break
    res = float(np.linalg.norm(alpha - grad))
    if res <= tol:
        return RatePoint(alpha, phi, lam, True, res, phi, it)
    levelled = len(gains) >= 3 and max(gains[-3:]) < 1e-10 * max(1.0, abs(best))
    return RatePoint(alpha, best if levelled else math.inf, lam, False, res, best, it)


# --------------------------------------------------------------------------
# scalar half-line version


@dataclass
class UnivariateRate:
    rate: float
    tilt: float
    boundary: bool = False


def univariate_rate(law, a: float, cap: float = 1e6) -> UnivariateRate:
    """-inf_{lam >= 0} ln E exp(lam (xi - a)) for a law with mean below a.

    ``law`` needs ``cumulant(lam)``, ``mean`` and ``atom_mass(level)``.  If the
    objective is still decreasing at ``cap`` the infimum is approached only as
    lam -> inf, where it equals ln P(xi = a); that limit is returned with
    ``boundary=True`` and an infinite tilt.
    """
    if not law.mean < a:
        raise PreconditionError(f"mean {law.mean} is not below the level {a}")
    f = lambda lam: law.cumulant(lam) - lam * a
    hi = 1.0
    while f(hi) < f(hi / 2):
        if hi >= cap:
            mass = law.atom_mass(a)
            return UnivariateRate(-math.log(mass) if mass > 0 else math.inf, math.inf, True)
        hi *= 2.0
    # f >= ln P(xi = a) everywhere; reaching it to round-off means the lam -> inf limit
    mass = law.atom_mass(a)
    if mass > 0:
        floor = math.log(mass)
        if f(hi) <= floor + 4 * np.finfo(float).eps * max(1.0, abs(floor)):
            return UnivariateRate(-floor, math.inf, True)
    lo = 0.0 if hi == 1.0 else hi / 4
    res = optimize.minimize_scalar(f, bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-11 * hi})
    cands = [(float(res.fun), float(res.x)), (f(lo), lo), (f(hi / 2), hi / 2)]
    val, lam = min(cands)
    return UnivariateRate(-val, lam, False)


# --------------------------------------------------------------------------
# grids


@dataclass
class ContourGrid:
    x1: np.ndarray
    x2: np.ndarray
    values: np.ndarray  # values[j, i] at (x1[i], x2[j]); inf where not converged
    converged: np.ndarray = field(repr=False)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x1", "x2", "rate"])
            for j, b in enumerate(self.x2):
                for i, a in enumerate(self.x1):
                    v = self.values[j, i]
                    w.writerow([repr(float(a)), repr(float(b)),
                                repr(float(v)) if math.isfinite(v) else "inf"])


def contour(dist, norm, x1_range, x2_range, resolution, order="row") -> ContourGrid:
    """Rate function on a grid, warm-starting from the left then the lower neighbour.

    ``order="column"`` sweeps columns first; converged values do not depend on it.
    """
    n1, n2 = (resolution, resolution) if np.isscalar(resolution) else resolution
    if min(n1, n2) < 1:
        raise ValueError("resolution must be positive")
    x1 = np.linspace(*x1_range, n1) if n1 > 1 else np.array([float(x1_range[0])])
    x2 = np.linspace(*x2_range, n2) if n2 > 1 else np.array([float(x2_range[0])])
    vals = np.full((n2, n1), math.inf)
    conv = np.zeros((n2, n1), dtype=bool)
    tilts = {}
    cells = [(j, i) for j in range(n2) for i in range(n1)]
    if order == "column":
        cells = [(j, i) for i in range(n1) for j in range(n2)]
    for j, i in cells:
        start = START
        for nb in ((j, i - 1), (j - 1, i), (j, i + 1), (j + 1, i)):
            if nb in tilts:
                start = tilts[nb]
                break
        rp = rate_at(dist, norm, (x1[i], x2[j]), start=start)
        if rp.converged:
            vals[j, i] = rp.rate
            conv[j, i] = True
            tilts[(j, i)] = rp.tilt
    return ContourGrid(x1, x2, vals, conv)


def boundary_cells(grid: ContourGrid, z: float, norm) -> np.ndarray:
    """Values at the grid cells nearest to the curve x2 = u(x1 / z), x1 >= 0."""
    out = []
    for i, a in enumerate(grid.x1):
        if a < 0:
            continue
        target = float(norm.u(a / z))
        if not grid.x2[0] <= target <= grid.x2[-1]:
            continue
        j = int(np.argmin(np.abs(grid.x2 - target)))
        out.append(grid.values[j, i])
    return np.array(out)
