"""Jump laws for X and the induced bivariate jump z = (X, u(X)).

A tilt is a pair ``lam = (lam1, lam2)`` acting on z through
``lam1 * X + lam2 * u(X)``.  The cumulant ``A(lam) = ln E exp(lam1 X + lam2 u(X))``
is returned as ``math.inf`` where the expectation diverges.  All finite values
are computed in log space, so an infinite return always means divergence and
never floating overflow.

Discrete laws and the Gaussian/quadratic pair use closed forms.  Everything
else goes through adaptive Gauss-Kronrod quadrature on a window around the
mode of the tilted integrand.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import interpolate, optimize, special, stats

from .errors import ConfigError, DomainError, NumericFailure

QUAD_TOL = 1e-10
# tail cut-off for the quadrature window, in nats below the integrand peak
_WINDOW_DROP = 80.0


# --------------------------------------------------------------------------
# normalizers


@dataclass(frozen=True)
class PowerLaw:
    """u(x) = |x|**p with p > 1."""

    p: float

    def __post_init__(self):
        if not self.p > 1:
            raise ValueError(f"PowerLaw needs p > 1, got {self.p}")

    growth = property(lambda self: self.p)

    def u(self, x):
        return np.abs(x) ** self.p

    def inverse(self, y):
        return np.asarray(y, dtype=float) ** (1.0 / self.p)

    def du(self, x):
        x = np.asarray(x, dtype=float)
        return self.p * np.sign(x) * np.abs(x) ** (self.p - 1)

    def d2u(self, x):
        return self.p * (self.p - 1) * np.abs(np.asarray(x, dtype=float)) ** (self.p - 2)

    def envelope(self, lam1: float, lam2: float) -> float:
        """sup_x lam1*x + lam2*|x|**p for lam2 < 0, in closed form."""
        p = self.p
        if lam2 >= 0:
            return math.inf if lam1 != 0 or lam2 > 0 else 0.0
        return (p - 1) / p * abs(lam1) ** (p / (p - 1)) / (p * abs(lam2)) ** (1 / (p - 1))

    def to_dict(self):
        return {"p": self.p}


class CustomConvex:
    """A convex u with u(0) = 0, strictly increasing on both half-lines.

    ``func`` must accept numpy arrays.  ``growth`` is the power with which u
    grows at infinity; it only decides which moments of heavy-tailed laws
    are finite.
    """

    def __init__(self, func: Callable, growth: float = 1.0, name: str = "custom"):
        self.func = func
        self.growth = growth
        self.name = name
        if abs(float(func(0.0))) > 1e-12:
            raise ValueError("custom normalizer must satisfy u(0) = 0")
        self._table = None

    @classmethod
    def tabulated(cls, xs: Sequence[float], us: Sequence[float], name="tabulated"):
        """Shape-preserving cubic through (xs, us), extended linearly past the ends."""
        xs = np.asarray(xs, dtype=float)
        us = np.asarray(us, dtype=float)
        order = np.argsort(xs)
        xs, us = xs[order], us[order]
        if not (xs[0] < 0 < xs[-1]):
            raise ValueError("table must bracket 0")
        slopes = np.diff(us) / np.diff(xs)
        if np.any(np.diff(slopes) < -1e-12):
            raise ValueError("tabulated u is not convex")
        spline = interpolate.PchipInterpolator(xs, us, extrapolate=False)
        dspline = spline.derivative()
        lo, hi = xs[0], xs[-1]
        slo, shi = float(dspline(lo)), float(dspline(hi))
        ulo, uhi = us[0], us[-1]

        def func(x):
            x = np.asarray(x, dtype=float)
            inside = np.clip(x, lo, hi)
            out = spline(inside)
            out = np.where(x < lo, ulo + slo * (x - lo), out)
            out = np.where(x > hi, uhi + shi * (x - hi), out)
            return out if out.ndim else float(out)

        obj = cls(func, growth=1.0, name=name)
        obj._table = (xs.tolist(), us.tolist())
        return obj

    def u(self, x):
        return self.func(x)

    def inverse(self, y):
        """Increasing inverse of u on [0, inf)."""
        y = np.asarray(y, dtype=float)

        def one(v):
            if v <= 0:
                return 0.0
            hi = 1.0
            while self.func(hi) < v:
                hi *= 2.0
            return optimize.brentq(lambda t: self.func(t) - v, 0.0, hi, xtol=1e-15, rtol=4e-16)

        out = np.vectorize(one, otypes=[float])(y)
        return out if out.ndim else float(out)

    def du(self, x):
        x = np.asarray(x, dtype=float)
        h = 1e-6 * np.maximum(1.0, np.abs(x))
        return (self.func(x + h) - self.func(x - h)) / (2 * h)

    def d2u(self, x):
        x = np.asarray(x, dtype=float)
        h = 1e-4 * np.maximum(1.0, np.abs(x))
        return (self.func(x + h) - 2 * self.func(x) + self.func(x - h)) / h**2

    def envelope(self, lam1: float, lam2: float) -> float:
        if lam2 >= 0:
            return math.inf if lam1 != 0 or lam2 > 0 else 0.0
        f = lambda x: -(lam1 * x + lam2 * self.func(x))
        lo, hi = -1.0, 1.0
        while f(lo) > f(lo / 2) or f(hi) > f(hi / 2):
            if f(lo) < f(lo / 2):
                lo *= 2
            if f(hi) < f(hi / 2):
                hi *= 2
            if hi > 1e12 or lo < -1e12:
                return math.inf
            if f(lo) >= f(lo / 2) and f(hi) >= f(hi / 2):
                break
        res = optimize.minimize_scalar(f, bounds=(lo, hi), method="bounded",
                                       options={"xatol": 1e-12})
        # small safety margin: the acceptance ratio must never exceed 1
        return -float(res.fun) + 1e-9

    def to_dict(self):
        if self._table is None:
            raise ConfigError("only tabulated custom normalizers serialize")
        return {"table": {"x": self._table[0], "u": self._table[1]}}

    def __repr__(self):
        return f"CustomConvex({self.name})"


def is_quadratic(norm) -> bool:
    return isinstance(norm, PowerLaw) and norm.p == 2


# --------------------------------------------------------------------------
# laws of X


class ScalarDistribution:
    """Common interface; concrete laws are the four dataclasses below."""

    discrete = False

    def sample(self, rng: np.random.Generator, size):
        raise NotImplementedError

    @property
    def is_degenerate(self) -> bool:
        """True when z = (X, u(X)) lives on a line, i.e. at most two atoms."""
        return False

    def prob_zero(self) -> float:
        return 0.0

    def prob_positive(self) -> float:
        raise NotImplementedError


class _Atomic(ScalarDistribution):
    discrete = True

    @property
    def values(self) -> np.ndarray:
        raise NotImplementedError

    @property
    def probs(self) -> np.ndarray:
        raise NotImplementedError

    @property
    def is_degenerate(self):
        return len(self.values) <= 2

    def sample(self, rng, size):
        return rng.choice(self.values, size=size, p=self.probs)

    def mean(self):
        return float(np.dot(self.values, self.probs))

    def prob_zero(self):
        return float(self.probs[self.values == 0].sum())

    def prob_positive(self):
        return float(self.probs[self.values > 0].sum())

    def abs_quantile(self, level):
        a = np.abs(self.values)
        order = np.argsort(a)
        cdf = np.cumsum(self.probs[order])
        return float(a[order][min(np.searchsorted(cdf, level - 1e-15), len(a) - 1)])

    def tilted_probs(self, norm, lam):
        logw = lam[0] * self.values + lam[1] * norm.u(self.values) + np.log(self.probs)
        return np.exp(logw - special.logsumexp(logw))


@dataclass(frozen=True)
class TwoPoint(_Atomic):
    """P(X = b) = q, P(X = a) = 1 - q, a < b."""

    a: float
    b: float
    q: float

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError("TwoPoint needs a < b")
        if not 0 < self.q < 1:
            raise ValueError("TwoPoint needs q in (0, 1)")

    @property
    def values(self):
        return np.array([self.a, self.b], dtype=float)

    @property
    def probs(self):
        return np.array([1 - self.q, self.q])

    def to_dict(self):
        return {"family": "two_point", "a": self.a, "b": self.b, "q": self.q}


@dataclass(frozen=True)
class FiniteDiscrete(_Atomic):
    """Finitely many atoms given as ((value, prob), ...)."""

    atoms: tuple

    def __post_init__(self):
        atoms = tuple((float(x), float(w)) for x, w in self.atoms if w != 0)
        if not atoms:
            raise ValueError("FiniteDiscrete needs at least one atom")
        if any(w < 0 for _, w in atoms):
            raise ValueError("negative probability")
        if abs(math.fsum(w for _, w in atoms) - 1) > 1e-12:
            raise ValueError("probabilities must sum to 1")
        if len({x for x, _ in atoms}) != len(atoms):
            raise ValueError("duplicate atom values")
        object.__setattr__(self, "atoms", atoms)

    @property
    def values(self):
        return np.array([x for x, _ in self.atoms])

    @property
    def probs(self):
        return np.array([w for _, w in self.atoms])

    def to_dict(self):
        return {"family": "finite", "atoms": [list(a) for a in self.atoms]}


@dataclass(frozen=True)
class Gaussian(ScalarDistribution):
    mu: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("Gaussian needs sigma > 0")

    support = property(lambda self: (-math.inf, math.inf))
    center = property(lambda self: self.mu)
    spread = property(lambda self: self.sigma)

    def logpdf(self, x):
        r = (np.asarray(x, dtype=float) - self.mu) / self.sigma
        return -0.5 * r * r - math.log(self.sigma) - 0.5 * math.log(2 * math.pi)

    def sample(self, rng, size):
        return rng.normal(self.mu, self.sigma, size)

    def mean(self):
        return self.mu

    def prob_positive(self):
        return float(stats.norm.sf(0, self.mu, self.sigma))

    def abs_quantile(self, level):
        d = stats.norm(self.mu, self.sigma)
        f = lambda t: d.cdf(t) - d.cdf(-t) - level
        hi = abs(self.mu) + 10 * self.sigma
        return float(optimize.brentq(f, 0.0, hi))

    def to_dict(self):
        return {"family": "gaussian", "mu": self.mu, "sigma": self.sigma}


@dataclass(frozen=True)
class ShiftedPareto(ScalarDistribution):
    """X = shift + Y with P(Y > y) = (scale / y)**tail_index for y >= scale."""

    scale: float
    tail_index: float
    shift: float = 0.0

    def __post_init__(self):
        if not (self.scale > 0 and self.tail_index > 0):
            raise ValueError("ShiftedPareto needs positive scale and tail_index")

    support = property(lambda self: (self.shift + self.scale, math.inf))
    center = property(lambda self: self.shift + self.scale)
    spread = property(lambda self: self.scale)

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        y = x - self.shift
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (math.log(self.tail_index) + self.tail_index * math.log(self.scale)
                   - (self.tail_index + 1) * np.log(np.where(y > 0, y, 1.0)))
        return np.where(y >= self.scale, out, -np.inf)

    def sample(self, rng, size):
        return self.shift + self.scale * (1.0 - rng.random(size)) ** (-1.0 / self.tail_index)

    def mean(self):
        if self.tail_index <= 1:
            return math.inf
        return self.shift + self.scale * self.tail_index / (self.tail_index - 1)

    def prob_positive(self):
        lo = self.shift + self.scale
        if lo >= 0:
            return 1.0
        return (self.scale / -self.shift) ** self.tail_index

    def prob_zero(self):
        return 0.0

    def abs_quantile(self, level):
        f = lambda t: self._abs_cdf(t) - level
        hi = abs(self.shift) + self.scale
        while f(hi) < 0:
            hi *= 2
        return float(optimize.brentq(f, 0.0, hi))

    def _cdf(self, x):
        y = x - self.shift
        return 0.0 if y < self.scale else 1.0 - (self.scale / y) ** self.tail_index

    def _abs_cdf(self, t):
        return max(0.0, self._cdf(t) - (self._cdf(-t) if -t >= self.support[0] else 0.0))

    def to_dict(self):
        return {"family": "pareto", "scale": self.scale, "tail_index": self.tail_index,
                "shift": self.shift}


# --------------------------------------------------------------------------
# JSON constructors

_FIELDS = {
    "two_point": ("a", "b", "q"),
    "finite": ("atoms",),
    "gaussian": ("mu", "sigma"),
    "pareto": ("scale", "tail_index", "shift"),
}


def distribution_from_dict(obj: dict) -> ScalarDistribution:
    if not isinstance(obj, dict) or "family" not in obj:
        raise ConfigError("distribution: missing field 'family'")
    family = obj["family"]
    if family not in _FIELDS:
        raise ConfigError(f"distribution.family: unknown family {family!r}")
    allowed = set(_FIELDS[family]) | {"family"}
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"distribution.{key}: unknown field for family {family!r}")
    required = [f for f in _FIELDS[family] if not (family == "pareto" and f == "shift")]
    for key in required:
        if key not in obj:
            raise ConfigError(f"distribution.{key}: missing")
    try:
        if family == "two_point":
            return TwoPoint(float(obj["a"]), float(obj["b"]), float(obj["q"]))
        if family == "finite":
            return FiniteDiscrete(tuple(tuple(a) for a in obj["atoms"]))
        if family == "gaussian":
            return Gaussian(float(obj["mu"]), float(obj["sigma"]))
        return ShiftedPareto(float(obj["scale"]), float(obj["tail_index"]),
                             float(obj.get("shift", 0.0)))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"distribution: {exc}") from exc


def normalizer_from_dict(obj: dict):
    if not isinstance(obj, dict):
        raise ConfigError("normalizer: expected an object")
    unknown = set(obj) - {"p", "table"}
    if unknown:
        raise ConfigError(f"normalizer.{sorted(unknown)[0]}: unknown field")
    if ("p" in obj) == ("table" in obj):
        raise ConfigError("normalizer: give exactly one of 'p' or 'table'")
    try:
        if "p" in obj:
            return PowerLaw(float(obj["p"]))
        table = obj["table"]
        if set(table) != {"x", "u"}:
            raise ConfigError("normalizer.table: needs exactly fields 'x' and 'u'")
        return CustomConvex.tabulated(table["x"], table["u"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"normalizer: {exc}") from exc


# --------------------------------------------------------------------------
# cumulant domain


def in_domain(dist, norm, lam, interior=False) -> bool:
    """Whether lam lies in the cumulant domain (or its interior)."""
    l1, l2 = float(lam[0]), float(lam[1])
    if dist.discrete:
        return True
    if isinstance(dist, Gaussian):
        if l2 < 0:
            return True
        if isinstance(norm, PowerLaw):
            if norm.p < 2:
                return True
            if norm.p == 2:
                return l2 < 1 / (2 * dist.sigma**2)
            return l2 == 0 and not interior
        return l2 == 0 and not interior
    # Pareto: polynomial right tail
    if l2 < 0:
        return True
    return l2 == 0 and l1 <= 0 and not interior


def _check_interior(dist, norm, lam):
    if not in_domain(dist, norm, lam, interior=True):
        raise DomainError(f"tilt {tuple(lam)} is not interior to the cumulant domain")


# --------------------------------------------------------------------------
# quadrature core


def _log_integrand(dist, norm, lam):
    l1, l2 = float(lam[0]), float(lam[1])

    def g(x):
        with np.errstate(over="ignore", invalid="ignore"):
            return l1 * x + l2 * norm.u(x) + dist.logpdf(x)

    return g


_SCAN = np.concatenate([np.arange(-32, 33) / 4.0, 2.0 ** np.arange(3, 64),
                        -(2.0 ** np.arange(3, 64))])


def _mode(g, lo, hi, start, step):
    """Global maximizer of the log integrand: scan a wide grid, then refine the best cell.

    The integrand need not be unimodal (the Pareto log-density is convex, and
    lam2 > 0 adds a convex term for p < 2), so a local climb is not enough.
    """
    x = np.unique(np.clip(start + step * _SCAN, lo, hi))
    if math.isfinite(lo) and x[0] > lo:
        x = np.concatenate([[lo], x])
    h = 1e-6 * np.maximum(step, np.abs(x - start))
    with np.errstate(all="ignore"):
        vals = np.asarray(g(x), dtype=float)
        slope = np.asarray(g(np.minimum(x + h, hi)), dtype=float) \
            - np.asarray(g(np.maximum(x - h, lo)), dtype=float)
    vals = np.where(np.isnan(vals), -np.inf, vals)
    i = int(np.argmax(vals))
    # a peak narrower than the grid spacing still shows as a + to - slope change
    cells = {(max(i - 1, 0), min(i + 1, len(x) - 1))}
    cells.update((j, j + 1) for j in np.flatnonzero((slope[:-1] > 0) & (slope[1:] < 0)))
    best = (vals[i], x[i])
    for a, b in sorted(cells):
        left, right = x[a], x[b]
        if not right > left:
            continue
        res = optimize.minimize_scalar(lambda t: -g(t), bounds=(left, right),
                                       method="bounded",
                                       options={"xatol": 1e-10 * max(1.0, abs(right))})
        if np.isfinite(res.fun):
            best = max(best, (-float(res.fun), float(res.x)))
    return best[1]


def _window(g, lo, hi, mode, step, gmax):
    """Breakpoints from the mode outward until the integrand drops by _WINDOW_DROP nats."""
    pts = [mode]
    for sign, edge in ((1, hi), (-1, lo)):
        s = step
        x = mode
        while True:
            x = mode + sign * s
            if (sign > 0 and x >= edge) or (sign < 0 and x <= edge):
                pts.append(edge)
                break
            pts.append(x)
            # stop only on a descending stretch: a second mode may lie beyond a dip
            if g(x) < gmax - _WINDOW_DROP and g(x) < g(mode + sign * s / 2):
                break
            s *= 2
            if s > 1e300:
                raise NumericFailure("quadrature window did not close", residual=math.inf)
    return sorted(set(pts))


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(40)
_GL_REL = 1e-13
_GL_ROUNDS = 40
# nats; beyond this exp(g - gmax) is noise
MAX_ROUNDOFF = 1e-6


def _gl_pieces(f, a, b):
    """40-point Gauss-Legendre integral of the vector function f over each [a_i, b_i]."""
    half = 0.5 * (b - a)
    x = (0.5 * (a + b))[:, None] + half[:, None] * _GL_NODES
    vals = np.asarray(f(x.ravel())).reshape(-1, len(a), len(_GL_NODES))
    return (vals * _GL_WEIGHTS).sum(axis=-1) * half


def _adaptive_gl(f, pts, floor=0.0):
    """Integrate f over [pts[0], pts[-1]], bisecting pieces until each agrees with its halves.

    ``floor`` is the relative round-off level of f itself; pieces are never
    asked to agree more closely than that.  Returns (integrals, error
    estimate of the first component).
    """
    a = np.asarray(pts[:-1], dtype=float)
    b = np.asarray(pts[1:], dtype=float)
    total = 0.0
    err = 0.0
    scale = None
    for _ in range(_GL_ROUNDS):
        whole = _gl_pieces(f, a, b)
        mid = 0.5 * (a + b)
        halves = _gl_pieces(f, np.concatenate([a, mid]), np.concatenate([mid, b]))
        split = halves[:, :len(a)] + halves[:, len(a):]
        diff = np.abs(split - whole)
        if scale is None:
            scale = np.abs(split).sum(axis=1)[:, None] + 1e-300
        ok = np.all(diff <= max(_GL_REL, floor) * scale, axis=0)
        total = total + split[:, ok].sum(axis=1)
        err += float(diff[0, ok].sum())
        if ok.all():
            return total, err
        a, b = np.concatenate([a[~ok], mid[~ok]]), np.concatenate([mid[~ok], b[~ok]])
    raise NumericFailure("quadrature did not converge", residual=float(diff[0].sum()))


def _integrate(dist, norm, lam, funcs, center=None):
    """Return (log normaliser, vector of integrals of funcs(x) under the tilted law).

    ``funcs`` maps an array of abscissae to a (k, n) array.  The results are
    the tilted expectations E_lam[funcs(X)].
    """
    g = _log_integrand(dist, norm, lam)
    lo, hi = dist.support
    step = dist.spread
    m = _mode(g, lo, hi, dist.center, step)
    gmax = float(g(m))
    if not math.isfinite(gmax):
        raise NumericFailure("tilted density has no finite mode", residual=math.inf)
    pts = _window(g, lo, hi, m, step, gmax)
    if pts[0] < 0 < pts[-1]:
        pts = sorted(set(pts + [0.0]))

    def integrand(x):
        w = np.exp(g(x) - gmax)
        return np.concatenate(([w], np.asarray(funcs(x), dtype=float) * w))

    # exp(g - gmax) inherits the cancellation error of g's large terms at the mode
    l1, l2 = float(lam[0]), float(lam[1])
    big = max(1.0, abs(l1 * m), abs(l2 * float(norm.u(m))), abs(float(dist.logpdf(m))))
    floor = 64 * np.finfo(float).eps * big
    if floor > MAX_ROUNDOFF:
        raise NumericFailure("tilt too large: log integrand not resolvable in double precision",
                             residual=floor)
    total, err = _adaptive_gl(integrand, pts, floor)
    if not total[0] > 0:
        raise NumericFailure("tilted normaliser vanished", residual=err)
    if err > (QUAD_TOL + len(pts) * floor) * max(1.0, total[0]):
        raise NumericFailure("quadrature did not converge", residual=err)
    return math.log(total[0]) + gmax, total[1:] / total[0]


# --------------------------------------------------------------------------
# cumulant and derivatives


def _gauss_quadratic_tilt(dist, lam):
    """Mean and variance of the tilted Gaussian when u(x) = x**2."""
    a = 1 / dist.sigma**2 - 2 * lam[1]
    b = dist.mu / dist.sigma**2 + lam[0]
    return b / a, 1 / a


def cumulant(dist, norm, lam) -> float:
    """ln E exp(lam1 X + lam2 u(X)); ``math.inf`` when it diverges."""
    lam = np.asarray(lam, dtype=float)
    if lam[0] == 0 and lam[1] == 0:
        return 0.0
    if dist.discrete:
        return float(special.logsumexp(lam[0] * dist.values + lam[1] * norm.u(dist.values),
                                       b=dist.probs))
    if not in_domain(dist, norm, lam):
        return math.inf
    if isinstance(dist, Gaussian) and is_quadratic(norm):
        s2 = dist.sigma**2
        a = 1 / s2 - 2 * lam[1]
        b = dist.mu / s2 + lam[0]
        return float(-0.5 * math.log(s2 * a) + b * b / (2 * a) - dist.mu**2 / (2 * s2))
    logz, _ = _integrate(dist, norm, lam, lambda x: np.zeros((0,) + np.shape(x)))
    return logz


def cumulant_grad(dist, norm, lam) -> np.ndarray:
    """Gradient of A at lam: the mean of the tilted jump vector."""
    lam = np.asarray(lam, dtype=float)
    _check_interior(dist, norm, lam)
    if dist.discrete:
        w = dist.tilted_probs(norm, lam)
        return np.array([w @ dist.values, w @ norm.u(dist.values)])
    if isinstance(dist, Gaussian) and is_quadratic(norm):
        m, v = _gauss_quadratic_tilt(dist, lam)
        return np.array([m, v + m * m])
    _, mom = _integrate(dist, norm, lam, lambda x: np.stack([x, norm.u(x)]))
    return mom


def cumulant_hess(dist, norm, lam) -> np.ndarray:
    """Hessian of A at lam: the covariance of the tilted jump vector."""
    lam = np.asarray(lam, dtype=float)
    _check_interior(dist, norm, lam)
    if dist.discrete:
        w = dist.tilted_probs(norm, lam)
        zz = np.stack([dist.values, norm.u(dist.values)])
        c = zz - (zz @ w)[:, None]
        return (c * w) @ c.T
    if isinstance(dist, Gaussian) and is_quadratic(norm):
        m, v = _gauss_quadratic_tilt(dist, lam)
        cov = 2 * m * v
        return np.array([[v, cov], [cov, 2 * v * v + 4 * m * m * v]])
    m1, m2 = cumulant_grad(dist, norm, lam)
    _, c = _integrate(dist, norm, lam, lambda x: np.stack(
        [(x - m1) ** 2, (x - m1) * (norm.u(x) - m2), (norm.u(x) - m2) ** 2]))
    return np.array([[c[0], c[1]], [c[1], c[2]]])


def tilted_sample(dist, norm, lam, rng: np.random.Generator, size=None):
    """Draws of X under the law proportional to exp(lam1 x + lam2 u(x)) dP(x)."""
    lam = np.asarray(lam, dtype=float)
    _check_interior(dist, norm, lam)
    if dist.discrete:
        return rng.choice(dist.values, size=size, p=dist.tilted_probs(norm, lam))
    if isinstance(dist, Gaussian) and is_quadratic(norm):
        m, v = _gauss_quadratic_tilt(dist, lam)
        return rng.normal(m, math.sqrt(v), size)
    # acceptance-rejection against the base law
    if lam[1] < 0:
        bound = norm.envelope(lam[0], lam[1])
    elif lam[1] == 0 and lam[0] <= 0 and math.isfinite(dist.support[0]):
        bound = lam[0] * dist.support[0]
    else:
        raise DomainError("no finite acceptance-rejection envelope for this tilt")
    accept = math.exp(cumulant(dist, norm, lam) - bound)
    if accept < 1e-5:
        raise NumericFailure("acceptance rate too small for rejection sampling",
                             residual=accept)
    want = 1 if size is None else int(np.prod(size))
    out = np.empty(0)
    while out.size < want:
        batch = int(1.2 * (want - out.size) / accept) + 16
        x = dist.sample(rng, batch)
        logr = lam[0] * x + lam[1] * norm.u(x) - bound
        keep = np.log(rng.random(batch)) < logr
        out = np.concatenate([out, x[keep]])
    out = out[:want]
    return float(out[0]) if size is None else out.reshape(size)


# --------------------------------------------------------------------------
# moments


def moment_u(dist, norm) -> float:
    """E u(X), ``math.inf`` when it diverges."""
    if dist.discrete:
        return float(dist.probs @ norm.u(dist.values))
    if isinstance(dist, Gaussian):
        if is_quadratic(norm):
            return dist.mu**2 + dist.sigma**2
    elif dist.tail_index <= norm.growth:
        return math.inf
    _, mom = _integrate(dist, norm, (0.0, 0.0), lambda x: np.stack([norm.u(x)]))
    return float(mom[0])


def z_star(dist, norm) -> float:
    """Threshold above which {W >= z} is a large deviation event."""
    mean = dist.mean()
    eu = moment_u(dist, norm)
    if not math.isfinite(eu) or not mean > 0:
        return 0.0
    return max(0.0, mean / float(norm.inverse(eu)))


def truncated_moment_ratio(dist, x_cut: float, p: float):
    """(E[|X|; |X| <= x])**p / E[|X|**p; |X| <= x], or None with no mass below x."""
    if dist.discrete:
        a = np.abs(dist.values)
        keep = a <= x_cut
        first = float(dist.probs[keep] @ a[keep])
        second = float(dist.probs[keep] @ a[keep] ** p)
    else:
        lo = max(dist.support[0], -x_cut)
        hi = min(dist.support[1], x_cut)
        if not lo < hi:
            return None
        pts = [lo, hi] + ([0.0] if lo < 0 < hi else [])
        # log-spaced breakpoints keep the polynomial tails resolved
        if hi > 1:
            pts += list(np.geomspace(max(1.0, lo if lo > 0 else 1.0), hi, 40))
        if lo < -1:
            pts += list(-np.geomspace(1.0, -lo, 40))
        pts = sorted(set(min(max(t, lo), hi) for t in pts))

        def f(x):
            dens = np.exp(dist.logpdf(x))
            return np.stack([np.abs(x) * dens, np.abs(x) ** p * dens])

        (first, second), _ = _adaptive_gl(f, pts)
    if second <= 0:
        return None
    return first**p / second
