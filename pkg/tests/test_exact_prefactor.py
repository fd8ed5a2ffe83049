import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from selfnorm import distributions as D
from selfnorm import exact_prefactor as EP
from selfnorm.errors import DegeneracyError, RegimeError
from selfnorm.shao_rate import j_boundary

P2 = D.PowerLaw(2)
GAUSS = D.Gaussian(-0.5, 1)
Z = 0.67


@pytest.fixture(scope="module")
def gauss_solution():
    return j_boundary(GAUSS, P2, Z)


def test_untilted_gaussian_covariance():
    cov = EP.tilted_covariance(D.Gaussian(0, 1), P2, (0.0, 0.0), tilt=(0.0, 0.0))
    np.testing.assert_allclose(cov, [[1, 0], [0, 2]], atol=1e-12)
    assert np.array_equal(cov, cov.T)


def test_tilted_covariance_matches_samples(gauss_solution):
    lam = gauss_solution.tilt
    cov = EP.tilted_covariance(GAUSS, P2, gauss_solution.alpha_hat, lam)
    x = D.tilted_sample(GAUSS, P2, lam, np.random.default_rng(12), 1_000_000)
    zz = np.stack([x, x * x])
    centred = zz - zz.mean(axis=1, keepdims=True)
    for i in range(2):
        for j in range(2):
            prod = centred[i] * centred[j]
            se = prod.std() / math.sqrt(x.size)
            assert abs(prod.mean() - cov[i, j]) < 4 * se


def test_projected_variance_examples():
    assert EP.projected_variance(np.eye(2), (0.6, -0.8)) == pytest.approx(1.0, abs=1e-15)
    assert EP.projected_variance(np.diag([4.0, 1.0]), (1.0, 0.0)) == 1.0


@given(angle=st.floats(0, 2 * math.pi), a=st.floats(0.1, 5), b=st.floats(0.1, 5),
       rho=st.floats(-0.9, 0.9))
def test_projected_variance_ignores_tangent_sign(angle, a, b, rho):
    c = rho * math.sqrt(a * b)
    sigma = np.array([[a, c], [c, b]])
    e = np.array([math.cos(angle), math.sin(angle)])
    s = EP.projected_variance(sigma, e)
    assert EP.projected_variance(sigma, -e) == pytest.approx(s, abs=1e-14)
    # it equals the inverse of the tangential entry of the inverse matrix
    eb = np.array([-e[1], e[0]])
    assert s == pytest.approx(1 / float(eb @ np.linalg.inv(sigma) @ eb), rel=1e-9)


def test_hessians_are_mutually_inverse(gauss_solution):
    a = gauss_solution.alpha_hat
    h_rate = EP.rate_hessian(GAUSS, P2, a, gauss_solution.tilt)
    h_cum = D.cumulant_hess(GAUSS, P2, gauss_solution.tilt)
    np.testing.assert_allclose(h_rate @ h_cum, np.eye(2), atol=1e-6)


def test_rate_hessian_matches_finite_differences(gauss_solution):
    from selfnorm.legendre import rate_at
    a = np.asarray(gauss_solution.alpha_hat)
    h = 1e-4
    fd = np.zeros((2, 2))
    for i in range(2):
        e = np.zeros(2)
        e[i] = h
        fd[:, i] = (rate_at(GAUSS, P2, a + e).tilt - rate_at(GAUSS, P2, a - e).tilt) / (2 * h)
    np.testing.assert_allclose(EP.rate_hessian(GAUSS, P2, a, gauss_solution.tilt), fd, rtol=1e-5)


def test_curvature_condition_holds_at_the_figure_point(gauss_solution):
    ok, margin = EP.curvature_condition(GAUSS, P2, Z, gauss_solution.alpha_hat, gauss_solution.tilt)
    assert ok and margin > 0


def test_curvature_margin_agrees_with_level_line_tracer(oracle):
    for mu, z, traced in oracle["curvature_cases"]:
        d = D.Gaussian(mu, 1)
        sol = j_boundary(d, P2, z)
        chk = EP.curvature_condition(d, P2, z, sol.alpha_hat, sol.tilt)
        assert math.copysign(1, chk.margin) == math.copysign(1, traced)
        assert chk.margin == pytest.approx(traced, rel=1e-2)


def test_chi_star():
    assert EP.chi_star(0.0) == 1.0
    assert EP.chi_star(0.5) == pytest.approx(math.sqrt(2), abs=1e-15)
    with pytest.raises(RegimeError):
        EP.chi_star(1.0)


def test_chi_star_matches_gaussian_integral_by_simulation(oracle):
    assert EP.chi_star(0.5) == pytest.approx(oracle["chi_mc_05"], rel=1e-2)


def test_sigma_sq_in_unit_interval(gauss_solution):
    s2, chi = EP.sigma_sq(GAUSS, P2, Z, gauss_solution.alpha_hat, gauss_solution.tilt)
    assert 0 < s2 < 1
    assert chi == pytest.approx(1 / math.sqrt(1 - s2))


def test_scaled_sigma_below_one_iff_curvature_condition(oracle):
    # the two statements are algebraically equivalent for the scaled form
    for mu, z, _ in oracle["curvature_cases"]:
        d = D.Gaussian(mu, 1)
        sol = j_boundary(d, P2, z)
        chk = EP.curvature_condition(d, P2, z, sol.alpha_hat, sol.tilt)
        e, eb, size = EP.normal_vectors(sol.alpha_hat, z, 2)
        cov = EP.tilted_covariance(d, P2, sol.alpha_hat, sol.tilt)
        s2 = (np.linalg.norm(sol.tilt) * EP.curve_hessian(sol.alpha_hat, z, 2) * eb[0] ** 2
              * EP.projected_variance(cov, e) / size)
        assert (s2 < 1) == chk.ok
        assert s2 == pytest.approx(chk.right / chk.left, rel=1e-6)


def test_unscaled_form_is_available_for_audit(gauss_solution):
    with pytest.raises(RegimeError):
        EP.sigma_sq(GAUSS, P2, Z, gauss_solution.alpha_hat, gauss_solution.tilt, form="unscaled")


def test_estimate_report(gauss_solution):
    rep = EP.asymptotic_estimate(GAUSS, P2, Z, 200, solution=gauss_solution)
    assert rep.curvature_ok and rep.unique_ok
    assert rep.J == pytest.approx(-0.7314232, abs=1e-6)
    assert 0 < rep.sigma_sq < 1
    assert np.array_equal(rep.Sigma, rep.Sigma.T)
    assert np.all(np.linalg.eigvalsh(rep.Sigma) > 0)
    d = rep.to_dict()
    for key in ("alpha_hat", "tilt", "Sigma", "Sigma_tilde11", "D11", "sigma_sq", "chi_star",
                "J", "prefactor", "value"):
        assert key in d


def test_prefactor_halves_when_n_quadruples(gauss_solution):
    n = 50
    a = EP.asymptotic_estimate(GAUSS, P2, Z, n, solution=gauss_solution)
    b = EP.asymptotic_estimate(GAUSS, P2, Z, 4 * n, solution=gauss_solution)
    assert b.prefactor / a.prefactor == pytest.approx(0.5, abs=1e-12)
    assert b.log_value - a.log_value == pytest.approx(3 * n * a.J + math.log(0.5), abs=1e-9)


def test_log_value_per_step_approaches_rate(gauss_solution):
    devs = []
    for n in (50, 200, 800):
        rep = EP.asymptotic_estimate(GAUSS, P2, Z, n, solution=gauss_solution)
        devs.append(abs(rep.log_value / n - rep.J))
    assert devs[0] > devs[1] > devs[2]
    assert devs[-1] < 0.05


def test_two_point_laws_are_redirected():
    with pytest.raises(DegeneracyError):
        EP.asymptotic_estimate(D.TwoPoint(-1, 1, 0.5), P2, 0.5, 100)


def test_custom_normalizer_is_refused():
    with pytest.raises(RegimeError):
        EP.asymptotic_estimate(GAUSS, D.CustomConvex(lambda x: x * x, growth=2.0), Z, 100)


def test_direction_invariance(gauss_solution):
    a = gauss_solution.alpha_hat
    e, _, _ = EP.normal_vectors(a, Z, 2)
    cov = EP.tilted_covariance(GAUSS, P2, a, gauss_solution.tilt)
    s_plus = EP.projected_variance(cov, e)
    s_minus = EP.projected_variance(cov, -e)
    assert abs(s_plus - s_minus) <= 1e-14
