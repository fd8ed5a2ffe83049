"""Exact asymptotic constant for P(W_n >= z) with a non-degenerate jump law.

Near the dominating point alpha_hat the event boundary is the curve
V(alpha) = z**-p alpha1**p - alpha2 = 0 with inward normal nu = grad V and unit
normal e.  The tilted walk fluctuates like N(alpha_hat, Sigma / n); the curve
bends back along the tangent e_bar, which inflates the half-plane tail by
chi* = 1 / sqrt(1 - sigma**2).

Two forms of sigma**2 are available:

``"scaled"`` (default)
    ||lam|| * D11 * e_bar1**2 * s / ||nu||.  Curvature of the level set in
    arclength units; sigma**2 < 1 is then equivalent to the curvature condition.
``"unscaled"``
    ||lam|| * D11 * e_bar1**2 * s, i.e. without the 1/||nu|| factor.

Here ``s`` is the conditional tangential variance returned by
``projected_variance``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import distributions as D
from .errors import DegeneracyError, PreconditionError, RegimeError
from .legendre import rate_at
from .shao_rate import BoundarySolution, j_boundary

FORMS = ("scaled", "unscaled")


def _power(norm):
    if not isinstance(norm, D.PowerLaw):
        raise RegimeError("the prefactor is implemented for u(x) = |x|**p only")
    return norm.p


def _tilt(dist, norm, alpha_hat, tilt):
    if tilt is not None:
        return np.asarray(tilt, dtype=float)
    rp = rate_at(dist, norm, alpha_hat)
    if not rp.converged:
        raise PreconditionError(f"no attained tilt at {alpha_hat} (residual {rp.residual:.3g})")
    return rp.tilt


def normal_vectors(alpha_hat, z, p):
    """Unit normal e and a unit tangent e_bar of the boundary at alpha_hat, plus ||nu||."""
    a1 = float(alpha_hat[0])
    nu = np.array([p * a1 ** (p - 1) * z ** (-p), -1.0])
    size = float(np.linalg.norm(nu))
    e = nu / size
    return e, np.array([-e[1], e[0]]), size


def curve_hessian(alpha_hat, z, p) -> float:
    """D11 = d^2 V / d alpha1^2 at alpha_hat (the only non-zero entry)."""
    return p * (p - 1) * z ** (-p) * float(alpha_hat[0]) ** (p - 2)


def tilted_covariance(dist, norm, alpha_hat, tilt=None) -> np.ndarray:
    lam = _tilt(dist, norm, alpha_hat, tilt)
    h = D.cumulant_hess(dist, norm, lam)
    h = 0.5 * (h + h.T)
    tr = float(np.trace(h))
    if not np.linalg.det(h) >= 1e-12 * tr * tr:
        raise DegeneracyError("tilted covariance is singular; use exact_twopoint")
    return h


def projected_variance(sigma, e_unit) -> float:
    """Variance along the tangent e_bar after conditioning on the normal coordinate."""
    sigma = np.asarray(sigma, dtype=float)
    e = np.asarray(e_unit, dtype=float)
    eb = np.array([-e[1], e[0]])
    ee = float(e @ sigma @ e)
    if not ee > 0:
        raise DegeneracyError("zero variance in the normal direction")
    cross = float(eb @ sigma @ e)
    return float(eb @ sigma @ eb) - cross * cross / ee


def rate_hessian(dist, norm, alpha_hat, tilt=None) -> np.ndarray:
    """Hessian of the rate function at alpha_hat, by inverting the tilted covariance."""
    return np.linalg.inv(tilted_covariance(dist, norm, alpha_hat, tilt))


@dataclass
class CurvatureCheck:
    ok: bool
    margin: float
    left: float
    right: float

    def __iter__(self):
        yield self.ok
        yield self.margin


def curvature_condition(dist, norm, z, alpha_hat, tilt=None) -> CurvatureCheck:
    """Second-order separation of the level line from the boundary curve.

    ``left`` is the level line's second derivative g2'' and ``right`` the
    boundary's g1''.  When d Lambda / d alpha2 vanishes the check is
    inconclusive: ``ok`` is False and ``margin`` is nan.
    Unpacks as ``(ok, margin)``.
    """
    p = _power(norm)
    lam = _tilt(dist, norm, alpha_hat, tilt)
    hl = rate_hessian(dist, norm, alpha_hat, lam)
    a1 = float(alpha_hat[0])
    slope = p * z ** (-p) * a1 ** (p - 1)
    right = curve_hessian(alpha_hat, z, p)
    quad = hl[0, 0] + 2 * hl[0, 1] * slope + hl[1, 1] * slope * slope
    if lam[1] == 0:
        return CurvatureCheck(False, math.nan, math.nan, right)
    left = -quad / float(lam[1])
    return CurvatureCheck(bool(left > right), left - right, left, right)


def chi_star(s2: float) -> float:
    """E exp(s2 Y**2 / 2) for standard normal Y."""
    if not s2 < 1:
        raise RegimeError(f"sigma^2 = {s2} >= 1: the Gaussian integral diverges")
    return 1.0 / math.sqrt(1.0 - s2)


def sigma_sq(dist, norm, z, alpha_hat, tilt=None, form="scaled"):
    """(sigma**2, chi*) at alpha_hat."""
    if form not in FORMS:
        raise ValueError(f"form must be one of {FORMS}")
    p = _power(norm)
    lam = _tilt(dist, norm, alpha_hat, tilt)
    e, eb, nu_size = normal_vectors(alpha_hat, z, p)
    s = projected_variance(tilted_covariance(dist, norm, alpha_hat, lam), e)
    val = float(np.linalg.norm(lam)) * curve_hessian(alpha_hat, z, p) * eb[0] ** 2 * s
    if form == "scaled":
        val /= nu_size
    return val, chi_star(val)


@dataclass
class PrefactorReport:
    """Audit record of the exact asymptotic estimate at one n."""

    z: float
    p: float
    n: int
    form: str
    alpha_hat: np.ndarray
    tilt: np.ndarray
    tilt_norm: float
    Sigma: np.ndarray
    Sigma_tilde11: float
    D11: float
    sigma_sq: float
    chi_star: float
    curvature_ok: bool
    curvature_margin: float
    unique_ok: bool
    J: float
    log_prefactor: float
    log_value: float
    prefactor: float = field(init=False)
    value: float = field(init=False)

    def __post_init__(self):
        self.prefactor = math.exp(self.log_prefactor)
        self.value = math.exp(self.log_value)

    def to_dict(self):
        return {
            "z": self.z, "p": self.p, "n": self.n, "sigma_sq_form": self.form,
            "alpha_hat": [float(v) for v in self.alpha_hat],
            "tilt": [float(v) for v in self.tilt],
            "tilt_norm": self.tilt_norm,
            "Sigma": [[float(v) for v in row] for row in self.Sigma],
            "Sigma_tilde11": self.Sigma_tilde11,
            "D11": self.D11,
            "sigma_sq": self.sigma_sq,
            "chi_star": self.chi_star,
            "curvature_ok": self.curvature_ok,
            "curvature_margin": self.curvature_margin,
            "unique_ok": self.unique_ok,
            "J": self.J,
            "log_prefactor": self.log_prefactor,
            "prefactor": self.prefactor,
            "log_value": self.log_value,
            "value": self.value,
        }


def asymptotic_estimate(dist, norm, z, n, solution: BoundarySolution | None = None,
                        form="scaled") -> PrefactorReport:
    """e^{nJ} / (sqrt(2 pi n (1 - sigma^2) e Sigma e^T) ||lam||) with every ingredient."""
    p = _power(norm)
    if dist.is_degenerate:
        raise DegeneracyError("two-point jump law: use exact_twopoint.asymptotic_prob")
    if not 0 < z < 1:
        raise PreconditionError("need z in (z*, 1)")
    sol = solution if solution is not None else j_boundary(dist, norm, z)
    if not sol.unique_flag:
        raise RegimeError("dominating point not unique across multi-starts")
    alpha = np.asarray(sol.alpha_hat, dtype=float)
    lam = np.asarray(sol.tilt, dtype=float)
    if not (alpha[0] > 0 and np.all(np.isfinite(lam))):
        raise RegimeError("dominating point is not an attained interior point of the boundary")
    cond = curvature_condition(dist, norm, z, alpha, lam)
    if not cond.ok:
        raise RegimeError(f"curvature condition fails (margin {cond.margin})")
    sigma = tilted_covariance(dist, norm, alpha, lam)
    e, eb, _ = normal_vectors(alpha, z, p)
    s2, chi = sigma_sq(dist, norm, z, alpha, lam, form)
    lam_norm = float(np.linalg.norm(lam))
    ese = float(e @ sigma @ e)
    log_pre = -0.5 * math.log(2 * math.pi * n * (1 - s2) * ese) - math.log(lam_norm)
    return PrefactorReport(
        z=z, p=p, n=n, form=form, alpha_hat=alpha, tilt=lam, tilt_norm=lam_norm,
        Sigma=sigma, Sigma_tilde11=eb[0] ** 2 * projected_variance(sigma, e),
        D11=curve_hessian(alpha, z, p), sigma_sq=s2, chi_star=chi,
        curvature_ok=cond.ok, curvature_margin=cond.margin, unique_ok=sol.unique_flag,
        J=-sol.rate, log_prefactor=log_pre, log_value=n * -sol.rate + log_pre)


# name fixed by the public interface
theorem4_estimate = asymptotic_estimate
