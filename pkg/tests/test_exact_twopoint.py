import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from selfnorm import distributions as D
from selfnorm import exact_twopoint as ET
from selfnorm.errors import PreconditionError
from selfnorm.shao_rate import j_boundary
from selfnorm.simulate import direct_mc

P2 = D.PowerLaw(2)


def test_symmetric_threshold_is_three_quarters():
    sol = ET.thresholds(-1, 1, 0.5, P2, 0.5)
    assert sol.case_tag == "a_neg"
    assert sol.roots[0] == pytest.approx(0.75, abs=1e-14)


def test_zero_lower_atom_gives_zero_root():
    sol = ET.thresholds(0, 1, 0.3, P2, 0.7)
    assert sol.case_tag == "a_zero"
    lo, hi = sol.roots
    assert lo == 0.0
    assert ET.segment_ratio(0, 1, P2)(hi) == pytest.approx(0.7, abs=1e-14)


def test_positive_atoms_give_roots_on_both_sides():
    f = ET.segment_ratio(1, 2, P2)
    z = 0.5 * (f(0.5) + 1)
    sol = ET.thresholds(1, 2, 0.5, P2, z)
    assert sol.case_tag == "a_pos"
    lo, hi = sol.roots
    assert lo < 0.5 < hi
    assert f(lo) == pytest.approx(z, abs=1e-13)
    assert f(hi) == pytest.approx(z, abs=1e-13)


def test_threshold_preconditions():
    with pytest.raises(PreconditionError):
        ET.thresholds(-1, 1, 0.8, P2, 0.5)  # z below f(q) = 0.6
    assert ET.thresholds(-2, -1, 0.5, P2, 0.5).case_tag == "trivial_b_nonpos"


def test_binary_rate_examples(oracle):
    assert ET.binary_rate(0.5, 0.5) == 0.0
    assert ET.binary_tilt(0.5, 0.5) == 0.0
    rate, tilt = oracle["bernoulli_rate_075"]
    assert ET.binary_rate(0.75, 0.5) == pytest.approx(rate, abs=1e-12)
    assert ET.binary_tilt(0.75, 0.5) == pytest.approx(math.log(3), abs=1e-14)
    assert tilt == pytest.approx(math.log(3), abs=1e-8)
    assert ET.binary_rate(1.0, 0.5) == pytest.approx(math.log(2), abs=1e-15)


def test_lattice_tail_formula_against_binomial_tail():
    q, alpha, n = 0.5, 0.75, 100
    expect = math.exp(-n * ET.binary_rate(alpha, q)) * math.sqrt(
        alpha / (2 * math.pi * n * (1 - alpha))) * (1 - q) / (alpha - q)
    assert ET.q_n(alpha, q, n) == pytest.approx(expect, rel=1e-12)
    tail = stats.binom.sf(74, n, q)
    assert ET.q_n(alpha, q, n) / tail == pytest.approx(1, abs=0.03)


@given(alpha=st.floats(0.01, 0.99), q=st.floats(0.05, 0.95), n=st.integers(1, 10_000))
def test_lattice_tail_is_positive(alpha, q, n):
    if abs(alpha - q) > 1e-9:
        # the log stays finite where the value itself underflows
        assert math.isfinite(ET.log_q_n(alpha, q, n))


def test_lattice_tail_exponent():
    devs = [abs(ET.log_q_n(0.75, 0.5, n) / n + ET.binary_rate(0.75, 0.5)) for n in (100, 1000, 10_000)]
    assert devs[0] > devs[1] > devs[2]
    assert devs[-1] < 0.05 / 100


def test_four_steps_enumeration(oracle):
    assert ET.exact_prob(-1, 1, 0.5, P2, 0.5, 4) == pytest.approx(5 / 16, abs=1e-15)
    assert oracle["enumerate_n4"] == 5 / 16


def test_exact_matches_path_enumeration(oracle):
    for a, b, q, z, n, expect in oracle["enumerate_small"]:
        assert ET.exact_prob(a, b, q, P2, z, n) == pytest.approx(expect, abs=1e-13)


@pytest.mark.parametrize("a,b,q,z", [(-1, 1, 0.5, 0.5), (0, 1, 0.3, 0.6), (1, 2, 0.5, 0.96),
                                     (-2, 0.5, 0.7, 0.2)])
def test_single_step_is_atom_inspection(a, b, q, z):
    direct = sum(w for x, w in ((a, 1 - q), (b, q)) if x == 0 or x >= z * abs(x))
    assert ET.exact_prob(a, b, q, P2, z, 1) == pytest.approx(direct, abs=1e-15)


def test_non_positive_upper_atom():
    assert ET.exact_prob(-2, -1, 0.5, P2, 0.5, 6) == 0.0
    # b = 0: only the all-zero path has T_n = 0
    assert ET.exact_prob(-1, 0, 0.3, P2, 0.5, 6) == pytest.approx(0.3**6, rel=1e-12)
    rep = ET.asymptotic_prob(-1, 0, 0.3, P2, 0.5, 6)
    assert rep.ratio == pytest.approx(1.0, abs=1e-12)


def test_exact_agrees_with_simulation():
    a, b, q, z, n = -1, 2, 0.4, 0.3, 20
    est = direct_mc(D.TwoPoint(a, b, q), P2, z, n, 1_000_000, seed=3)
    assert abs(est.value - ET.exact_prob(a, b, q, P2, z, n)) < 4 * est.std_error


def test_segment_rate_is_the_boundary_rate():
    for a, b, q, z in ((-1, 1, 0.5, 0.5), (-1, 1, 0.8, 0.8)):
        rate, _ = ET.segment_rate(a, b, q, P2, z)
        assert rate == pytest.approx(j_boundary(D.TwoPoint(a, b, q), P2, z).rate, abs=1e-12)


def test_exact_log_rate_approaches_the_binary_rate():
    j = -ET.binary_rate(0.75, 0.5)
    devs = [abs(ET.log_exact_prob(-1, 1, 0.5, P2, 0.5, n) / n - j) for n in (100, 500, 2000)]
    assert devs[0] > devs[1] > devs[2]
    assert devs[-1] < 0.01


def test_both_sided_case_ratio_trend():
    f = ET.segment_ratio(1, 2, P2)
    z = 0.5 * (f(0.5) + 1)
    gaps = [abs(ET.asymptotic_prob(1, 2, 0.5, P2, z, n).ratio - 1) for n in (100, 300, 1000)]
    assert gaps[-1] < gaps[0]
    assert gaps[-1] < 0.05


def test_literal_lattice_reading_diverges():
    # rounding t itself puts the level at the endpoint for every n
    good = ET.asymptotic_prob(-1, 1, 0.5, P2, 0.5, 500)
    bad = ET.asymptotic_prob(-1, 1, 0.5, P2, 0.5, 500, lattice="literal")
    assert good.ratio == pytest.approx(1, abs=0.05)
    assert not 0.5 < bad.ratio < 2
