"""Target sets, supporting half-planes and projected jump laws.

For a normalizer u and level z the event {W >= z} is {Z_n / n in B_z} with

    B_z = {x : x2 >= 0, x1 >= z * u_inv(x2)},

whose curved upper-left boundary is parameterized by y >= 0 as
``point(y) = (y, u(y / z))`` (for u = |x|**p this is ``(y, y**p z**-p)``).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import distributions as D


def _norm(norm_or_p):
    return norm_or_p if hasattr(norm_or_p, "u") else D.PowerLaw(float(norm_or_p))


@dataclass(frozen=True)
class HalfPlane:
    """Closed half-plane {x : x . normal >= offset}."""

    normal: tuple
    offset: float

    def contains(self, x) -> np.ndarray | bool:
        x = np.asarray(x, dtype=float)
        return x[..., 0] * self.normal[0] + x[..., 1] * self.normal[1] >= self.offset


def in_target_set(x, z: float, norm, rel_tol: float = 0.0):
    """Membership in the closed set B_z (the origin always belongs).

    ``rel_tol`` widens the defining inequality by a relative amount; the exact
    binomial oracle uses a few ulps so lattice points sitting on the curve are
    not lost to round-off.
    """
    norm = _norm(norm)
    x = np.asarray(x, dtype=float)
    x1, x2 = x[..., 0], x[..., 1]
    rhs = z * norm.inverse(np.maximum(x2, 0.0))
    slack = rel_tol * np.maximum(np.abs(x1), np.abs(rhs))
    out = (x2 >= 0) & (x1 >= rhs - slack)
    return bool(out) if out.ndim == 0 else out


def boundary_point(y, z: float, norm) -> np.ndarray:
    norm = _norm(norm)
    y = np.asarray(y, dtype=float)
    return np.stack([y, norm.u(y / z)], axis=-1)


def normal_and_offset(y: float, z: float, norm) -> HalfPlane:
    """Supporting half-plane of B_z touching the boundary at point(y)."""
    norm = _norm(norm)
    if isinstance(norm, D.PowerLaw):
        p = norm.p
        nu1 = p * y ** (p - 1) * z ** (-p)
        h = (p - 1) * y**p * z ** (-p)
    else:
        nu1 = float(norm.du(y / z)) / z
        h = y * nu1 - float(norm.u(y / z))
    return HalfPlane((float(nu1), -1.0), float(h))


def unit_normal(y: float, z: float, norm) -> np.ndarray:
    nu = np.array(normal_and_offset(y, z, norm).normal)
    return nu / math.hypot(*nu)


@dataclass(frozen=True)
class ProjectedLaw:
    """Law of xi = coef * X - u(X), the jump projected on a boundary normal."""

    dist: object
    norm: object
    coef: float

    def cumulant(self, lam: float) -> float:
        return D.cumulant(self.dist, self.norm, (lam * self.coef, -lam))

    @property
    def mean(self) -> float:
        m = self.dist.mean()
        eu = D.moment_u(self.dist, self.norm)
        if not math.isfinite(eu):
            return -math.inf
        return self.coef * m - eu

    def atom_mass(self, level: float) -> float:
        """P(xi = level); zero unless the jump law has atoms."""
        if not hasattr(self.dist, "values"):
            return 0.0
        v, w = self.values()
        hit = np.abs(v - level) <= 1e-12 * max(1.0, abs(level))
        return float(np.sum(w[hit]))

    def values(self):
        """Support points and masses (discrete laws only)."""
        v = self.dist.values
        return self.coef * v - self.norm.u(v), self.dist.probs


def projected_jump_law(dist, y: float, z: float, norm) -> ProjectedLaw:
    return ProjectedLaw(dist, _norm(norm), normal_and_offset(y, z, norm).normal[0])


@dataclass(frozen=True)
class BoundaryChart:
    z: float
    norm: object

    def point(self, y):
        return boundary_point(y, self.z, self.norm)

    def halfplane(self, y):
        return normal_and_offset(y, self.z, self.norm)

    def polyline(self, y_max: float, num: int = 200) -> np.ndarray:
        return self.point(np.linspace(0.0, y_max, num))


def write_polyline_csv(path, points) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x1", "x2"])
        for x1, x2 in points:
            w.writerow([repr(float(x1)), repr(float(x2))])
