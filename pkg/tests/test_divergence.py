import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qif.belief import Belief, Reality, point_mass
from qif.divergence import (alt_disc, disc_alt, disc_js, disc_kl, j_divergence, js_asym_divergence,
                            js_disc, kl_disc, kl_divergence, l_divergence)
from strategies import belief_pairs

ABC = ["A", "B", "C"]
SURE_A = Belief.from_mapping({"A": Fraction(98, 100), "B": Fraction(1, 100), "C": Fraction(1, 100)}, ABC)
SPLIT_BC = Belief.from_mapping({"A": 0, "B": Fraction(1, 2), "C": Fraction(1, 2)}, ABC)
REAL_C = point_mass(Reality("C"), ABC)

# frozen from an independent 30-digit mpmath evaluation
JS_DISC_001_05 = 0.971430847803229
ALT_DISC_001_05 = 0.570607207744086
K_SURE_A_TO_C = 0.985644707022930
J_HALF_TO_QUARTER = 0.396240625180289
L_SURE_A_SPLIT = 1.857982340963799


def test_disc_kl_examples():
    assert disc_kl(SURE_A, SPLIT_BC, "C") == pytest.approx(5.6438, abs=5e-4)
    assert disc_kl(SURE_A, SURE_A, "B") == 0
    assert kl_disc(0, 0.5) == math.inf
    assert kl_disc(0.5, 0) == -math.inf
    assert kl_disc(0, 0) == 0


def test_disc_js_examples():
    assert js_disc(0, 1) == 1.0
    assert disc_js(SURE_A, SURE_A, "A") == 0
    assert disc_js(SURE_A, SPLIT_BC, "C") == pytest.approx(JS_DISC_001_05, abs=1e-12)
    assert disc_js(SURE_A, SPLIT_BC, "C") == pytest.approx(0.9714, abs=5e-4)
    assert disc_js(SURE_A, SPLIT_BC, "C") <= disc_kl(SURE_A, SPLIT_BC, "C") / 2
    assert js_disc(0, 0) == 0


def test_disc_alt_examples():
    assert alt_disc(0, 1) == 1.0
    assert disc_alt(SURE_A, SURE_A, "C") == 0
    assert disc_alt(SURE_A, SPLIT_BC, "C") == pytest.approx(ALT_DISC_001_05, abs=1e-12)
    # equals the normalized refined flow of the worked example
    assert disc_alt(SURE_A, SPLIT_BC, "C") == pytest.approx(0.9044 / 1.5849, abs=5e-4)


def test_kl_examples():
    assert kl_divergence(SURE_A, REAL_C) == pytest.approx(6.6438, abs=5e-4)
    assert kl_divergence(SURE_A, SURE_A) == 0
    assert kl_divergence(SPLIT_BC, REAL_C) == pytest.approx(1.0, abs=5e-4)
    assert kl_divergence(REAL_C, SURE_A) == math.inf


def test_js_asym_examples():
    assert js_asym_divergence(SURE_A, SURE_A) == 0
    pa, pb = point_mass(Reality("A"), ABC), point_mass(Reality("B"), ABC)
    assert js_asym_divergence(pa, pb) == 1.0
    assert js_asym_divergence(SURE_A, REAL_C) == pytest.approx(K_SURE_A_TO_C, abs=1e-12)
    assert js_asym_divergence(SURE_A, REAL_C) == pytest.approx(1 - math.log2(1.01), abs=1e-12)


def test_j_examples():
    half = Belief.from_probs([0.5, 0.5])
    skew = Belief.from_probs([0.25, 0.75])
    assert j_divergence(half, half) == 0
    assert j_divergence(half, skew) == pytest.approx(J_HALF_TO_QUARTER, abs=1e-12)
    assert j_divergence(half, skew) == pytest.approx(kl_divergence(half, skew) + kl_divergence(skew, half))
    assert j_divergence(SURE_A, REAL_C) == math.inf
    assert j_divergence(REAL_C, SURE_A) == math.inf


def test_l_examples():
    pa, pb = point_mass(Reality("A"), ABC), point_mass(Reality("B"), ABC)
    assert l_divergence(SURE_A, SURE_A) == 0
    assert l_divergence(pa, pb) == pytest.approx(2.0)
    value = l_divergence(SURE_A, SPLIT_BC)
    assert value == pytest.approx(L_SURE_A_SPLIT, abs=1e-12)
    assert value == pytest.approx(js_asym_divergence(SURE_A, SPLIT_BC) + js_asym_divergence(SPLIT_BC, SURE_A))


def test_domain_mismatch():
    with pytest.raises(ValueError):
        kl_divergence(SURE_A, Belief.from_probs([0.5, 0.5]))
    for f in (js_asym_divergence, j_divergence, l_divergence):
        with pytest.raises(ValueError):
            f(SURE_A, Belief.from_probs([0.5, 0.5]))


@given(belief_pairs())
def test_pointwise_halving(pair):
    b, b2 = pair
    for s in b.states:
        if b2[s] > 0:
            kl = disc_kl(b, b2, s)
            assert disc_js(b, b2, s) <= kl / 2 + 1e-12
            assert disc_js(b, b2, s) <= 1.0


@given(belief_pairs())
def test_js_asym_range_and_identity(pair):
    b, b2 = pair
    k = js_asym_divergence(b, b2)
    assert 0 <= k <= 1
    assert (k == 0) == (b.probs == b2.probs)
    assert js_asym_divergence(b, b) == 0


@given(belief_pairs())
def test_kl_and_j_nonnegative_and_finiteness(pair):
    b, b2 = pair
    d = kl_divergence(b, b2)
    assert d >= 0
    assert math.isfinite(d) == set(b2.support()).issubset(b.support())
    assert j_divergence(b, b2) >= 0
    assert j_divergence(b, b2) == pytest.approx(j_divergence(b2, b))


@given(belief_pairs())
def test_l_decomposes_into_k(pair):
    b, b2 = pair
    l = l_divergence(b, b2)
    assert 0 <= l <= 2
    assert l == pytest.approx(js_asym_divergence(b, b2) + js_asym_divergence(b2, b), abs=1e-9)


@given(belief_pairs(), st.randoms(use_true_random=False))
def test_permutation_invariance(pair, rnd):
    b, b2 = pair
    order = list(range(len(b)))
    rnd.shuffle(order)
    pb = Belief(b.states, tuple(b.probs[i] for i in order))
    pb2 = Belief(b.states, tuple(b2.probs[i] for i in order))
    for f in (kl_divergence, js_asym_divergence, j_divergence, l_divergence):
        x, y = f(b, b2), f(pb, pb2)
        assert x == y or x == pytest.approx(y, abs=1e-12)
        assert f(b, b) == 0
