import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import optimize

from selfnorm import distributions as D
from selfnorm import geometry as G

P2 = D.PowerLaw(2)
ys = st.floats(0.0, 5.0)
zs = st.floats(0.05, 0.95)
ps = st.floats(1.2, 4.0)


def test_target_set_examples():
    assert G.in_target_set((0.0, 0.0), 0.3, P2)
    assert G.in_target_set((0.0, 0.0), 1.7, P2)
    assert G.in_target_set((0.5, 0.25), 0.7, P2)
    assert not G.in_target_set((0.3, 0.25), 0.7, P2)
    assert not G.in_target_set((0.5, -0.1), 0.7, P2)


def test_target_set_is_vectorized():
    pts = np.array([[0.5, 0.25], [0.3, 0.25], [0, 0]])
    np.testing.assert_array_equal(G.in_target_set(pts, 0.7, P2), [True, False, True])


def test_normal_examples():
    hp = G.normal_and_offset(0.0, 0.7, P2)
    assert hp.normal == (0.0, -1.0) and hp.offset == 0.0
    hp = G.normal_and_offset(1.0, 1.0, D.PowerLaw(3))
    assert hp.normal == pytest.approx((3.0, -1.0), abs=1e-15)
    assert hp.offset == pytest.approx(2.0, abs=1e-15)
    np.testing.assert_allclose(G.unit_normal(0.0, 0.4, P2), [0, -1])
    nu = np.array([1 / 0.49, -1.0])
    np.testing.assert_allclose(G.unit_normal(0.5, 0.7, P2), nu / np.linalg.norm(nu), atol=1e-15)
    np.testing.assert_allclose(G.unit_normal(0.5, 0.7, P2), [0.8979903, -0.4400153], atol=1e-7)
    hp = G.normal_and_offset(0.5, 0.7, P2)
    assert hp.normal[0] == pytest.approx(2.0408163265306123, abs=1e-14)
    assert hp.offset == pytest.approx(0.25 / 0.49, abs=1e-15)


@given(y=ys, z=zs, p=ps)
def test_chart_points_lie_on_the_curve_and_their_half_plane(y, z, p):
    norm = D.PowerLaw(p)
    pt = G.boundary_point(y, z, norm)
    assert pt[0] == pytest.approx(z * pt[1] ** (1 / p), rel=1e-12, abs=1e-14)
    hp = G.normal_and_offset(y, z, norm)
    assert float(np.dot(hp.normal, pt)) == pytest.approx(hp.offset, rel=1e-12, abs=1e-12)
    assert np.linalg.norm(G.unit_normal(y, z, norm)) == pytest.approx(1.0, abs=1e-15)


@given(y=st.floats(0.1, 3.0), z=zs, p=ps)
def test_normal_is_orthogonal_to_the_tangent(y, z, p):
    norm = D.PowerLaw(p)
    nu = np.array(G.normal_and_offset(y, z, norm).normal)
    gaps = []
    for h in (1e-2, 1e-3):
        step = G.boundary_point(y + h, z, norm) - G.boundary_point(y, z, norm)
        gaps.append(abs(float(step @ nu)))
    # second order: a tenfold smaller step shrinks the gap about a hundredfold
    assert gaps[1] <= gaps[0] / 50 + 1e-13


def test_union_of_half_planes_is_target_set_plus_lower_half():
    z, p = 0.6, 2.5
    norm = D.PowerLaw(p)
    pts = np.random.default_rng(9).uniform([-2, -1], [3, 4], size=(10_000, 2))
    planes = [G.normal_and_offset(y, z, norm) for y in np.linspace(0, 4, 2001)]
    nus = np.array([hp.normal for hp in planes])
    offs = np.array([hp.offset for hp in planes])
    gap = (pts @ nus.T - offs).max(axis=1)

    def refined(x):
        f = lambda y: -(float(np.dot(G.normal_and_offset(y, z, norm).normal, x))
                        - G.normal_and_offset(y, z, norm).offset)
        res = optimize.minimize_scalar(f, bounds=(0, 4), method="bounded",
                                       options={"xatol": 1e-12})
        return -res.fun

    close = np.abs(gap) < 1e-2
    gap[close] = [refined(x) for x in pts[close]]
    covered = gap >= 0
    lower = G.normal_and_offset(0.0, z, norm)
    left = G.in_target_set(pts, z, norm) | (lower.contains(pts) & np.any(pts != 0, axis=1))
    np.testing.assert_array_equal(left, covered)


def test_projected_law_at_zero_is_minus_u():
    law = G.projected_jump_law(D.FiniteDiscrete(((-1, 0.5), (2, 0.5))), 0.0, 0.5, P2)
    v, w = law.values()
    np.testing.assert_allclose(v, [-1, -4])


def test_projected_two_point_values():
    y, z = 0.8, 0.6
    law = G.projected_jump_law(D.TwoPoint(-1, 1, 0.3), y, z, P2)
    v, _ = law.values()
    c = 2 * y / z**2
    np.testing.assert_allclose(v, [-c - 1, c - 1], atol=1e-14)
    assert law.mean == pytest.approx(0.3 * (c - 1) + 0.7 * (-c - 1), abs=1e-14)


def test_custom_square_matches_power_two():
    sq = D.CustomConvex(lambda x: x * x, growth=2.0)
    for y in (0.0, 0.4, 1.3):
        a = G.normal_and_offset(y, 0.7, sq)
        b = G.normal_and_offset(y, 0.7, P2)
        assert a.normal == pytest.approx(b.normal, abs=1e-6)
        assert a.offset == pytest.approx(b.offset, abs=1e-6)


def test_polyline_csv(tmp_path):
    chart = G.BoundaryChart(0.67, P2)
    pts = chart.polyline(1.5, 4)
    out = tmp_path / "b.csv"
    G.write_polyline_csv(out, pts)
    rows = out.read_text().splitlines()
    assert rows[0] == "x1,x2" and len(rows) == 5
    assert float(rows[-1].split(",")[1]) == pytest.approx((1.5 / 0.67) ** 2)
