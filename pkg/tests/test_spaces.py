import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import beta as beta_fn

from besov.holocalc import PolySeries, extremal_f_r
from besov.spaces import (MeasureConditionError, SpaceParams, besov_norm, besov_norm_with_error,
                          lemma1_ratio, lp_norm)
from besov.weights import weight_from_config


def sp(p, *a):
    return SpaceParams(p, weight_from_config([{"family": "power", "a": x} for x in a]))


def test_besov_norm_of_z():
    np.testing.assert_allclose(besov_norm(PolySeries.monomial((1,)), sp(2, 0.0)), math.sqrt(2 * math.pi),
                               rtol=1e-10)


def test_besov_norm_of_constant_is_not_zero():
    np.testing.assert_allclose(besov_norm(PolySeries.constant(1.0), sp(2, 0.0)), math.sqrt(math.pi),
                               rtol=1e-10)


def test_besov_norm_zero():
    assert besov_norm(PolySeries(np.zeros(4)), sp(1, 0.5)) == 0.0


def test_besov_two_variables():
    np.testing.assert_allclose(besov_norm(PolySeries.monomial((1, 1)), sp(2, 0.0, 0.0)), 2 * math.pi,
                               rtol=1e-10)


def test_besov_product_and_dense_agree():
    rng = np.random.default_rng(2)
    f = PolySeries.product(PolySeries.random((3,), rng), PolySeries.random((2,), rng))
    s = sp(1.5, 0.5, 1.0)
    v1, e1 = besov_norm_with_error(f, s)
    v2, e2 = besov_norm_with_error(PolySeries(f.coeffs), s)
    assert abs(v1 - v2) <= e1 + e2


def test_besov_measure_condition():
    with pytest.raises(MeasureConditionError):
        besov_norm(PolySeries.monomial((2,)), sp(0.5, 0.5))


def test_lp_norm_closed_form():
    np.testing.assert_allclose(lp_norm(lambda z: np.ones_like(z[0]), sp(1, 2.0)),
                               2 * math.pi * (math.log(2) - 0.5), rtol=1e-10)


def test_lp_norm_zero_and_homogeneity():
    s = sp(2, 3.0)
    assert lp_norm(PolySeries(np.zeros(3)), s) == 0.0
    one = lp_norm(lambda z: np.ones_like(z[0]), s)
    np.testing.assert_allclose(lp_norm(lambda z: 3j * np.ones_like(z[0]), s), 3 * one, rtol=1e-12)


def test_lp_norm_needs_alpha_above_one():
    with pytest.raises(MeasureConditionError):
        lp_norm(lambda z: np.ones_like(z[0]), sp(1, 0.5))


def test_lemma1_constant_at_origin():
    rep = lemma1_ratio(PolySeries.constant(1.0), [1], [0.0], sp(1, 0.5))
    np.testing.assert_allclose(rep.rows[0]["value"], 2 / math.pi, rtol=1e-10)


def test_lemma1_zero_function_skipped():
    rep = lemma1_ratio(PolySeries(np.zeros(3)), [1], [0.0], sp(1, 0.5))
    assert rep.metrics["skipped"] and rep.rows == []


def test_lemma1_reports_hypothesis():
    rep = lemma1_ratio(PolySeries.monomial((2,)), [0], [0.5], sp(1, 3.5))
    assert rep.metrics["hypothesis m_j >= alpha_w - 1"] is False
    assert rep.mode == "necessity"


def test_extremal_norm_stable_in_r():
    s = sp(1.0, 0.5)
    norms = [besov_norm(extremal_f_r([r], [4], s.weight, 1.0), s) for r in (0.5, 0.7, 0.9)]
    assert max(norms) / min(norms) <= 3.0


def test_norm_error_estimate_small():
    val, err = besov_norm_with_error(PolySeries.random((8,), np.random.default_rng(0)), sp(0.7, 1.0))
    assert err <= 1e-6 * val


@settings(max_examples=25, deadline=None)
@given(k=st.integers(0, 12), a=st.floats(-0.9, 3.0))
def test_besov_monomial_closed_form(k, a):
    # ||z^k||^2 = 2 pi (k+1)^2 B(2k+2, a+1) for p = 2, w = t^a
    ref = math.sqrt(2 * math.pi * (k + 1) ** 2 * beta_fn(2 * k + 2, a + 1))
    np.testing.assert_allclose(besov_norm(PolySeries.monomial((k,)), sp(2, a)), ref, rtol=1e-8)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000), p=st.floats(0.6, 3.0), c=st.complex_numbers(min_magnitude=0.1, max_magnitude=10))
def test_besov_homogeneity(seed, p, c):
    f = PolySeries.random((5,), np.random.default_rng(seed))
    s = sp(p, 1.0)
    np.testing.assert_allclose(besov_norm(f * c, s), abs(c) * besov_norm(f, s), rtol=1e-7)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000), th=st.floats(-math.pi, math.pi))
def test_besov_rotation_invariance(seed, th):
    f = PolySeries.random((6,), np.random.default_rng(seed))
    rot = PolySeries(f.coeffs * np.exp(1j * th * np.arange(7)))
    s = sp(1.3, 0.5)
    np.testing.assert_allclose(besov_norm(rot, s), besov_norm(f, s), rtol=1e-7)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_conjugated_input_has_mirrored_norm(seed):
    f = PolySeries.random((4,), np.random.default_rng(seed))
    fbar = PolySeries(np.conj(f.coeffs), conjugated=True)
    s = sp(1.0, 0.5)
    np.testing.assert_allclose(besov_norm(fbar, s), besov_norm(f, s), rtol=1e-9)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_besov_triangle_inequality(seed):
    rng = np.random.default_rng(seed)
    f, g = PolySeries.random((5,), rng), PolySeries.random((5,), rng)
    s = sp(1.5, 0.5)
    assert besov_norm(f + g, s) <= besov_norm(f, s) + besov_norm(g, s) + 1e-9
