import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from besov.holocalc import (D, PolySeries, TruncationError, eval_series, extremal_f_r,
                            frac_diff, frac_multiplier, polar_values, required_degree, symbol_g_r)
from besov.weights import weight_from_config


def _w(a, n=1):
    return weight_from_config([{"family": "power", "a": a}] * n)


def test_frac_diff_zero_order_is_identity():
    f = PolySeries.random((5,), np.random.default_rng(1))
    np.testing.assert_array_equal(frac_diff(f, [0.0]).coeffs, f.coeffs)


def test_frac_diff_first_order_monomial():
    out = frac_diff(PolySeries.monomial((3,)), [1.0])
    np.testing.assert_allclose(out.coeffs[3], 4.0)


def test_D_two_variables_matches_mixed_derivative():
    # d^2/dz1 dz2 (z1^3 z2^2) = 6 z1^2 z2
    out = D(PolySeries.monomial((2, 1)))
    np.testing.assert_allclose(out.coeffs[2, 1], 6.0)
    assert np.count_nonzero(out.coeffs) == 1


def test_frac_diff_half_order():
    np.testing.assert_allclose(frac_diff(PolySeries.monomial((1,)), [0.5]).coeffs[1], 1.5, rtol=1e-14)


def test_frac_diff_rejects_order_below_minus_one():
    with pytest.raises(ValueError):
        frac_diff(PolySeries.monomial((1,)), [-1.0])


def test_eval_constant_and_product():
    assert PolySeries.constant(1.0)(0.7) == 1.0
    np.testing.assert_allclose(PolySeries.monomial((1, 1))([0.3, 0.4j]), 0.12j, atol=1e-16)


def test_eval_geometric_series():
    f = PolySeries(np.ones(51))
    np.testing.assert_allclose(f(0.5), 2 - 2 * 0.5 ** 51, atol=1e-12)


def test_eval_outside_polydisc_raises():
    with pytest.raises(ValueError):
        PolySeries.monomial((1,))(1.0)


def test_polar_values_match_pointwise_evaluation():
    rng = np.random.default_rng(3)
    f = PolySeries.random((7, 4), rng)
    radii = [np.array([0.2, 0.8]), np.array([0.5])]
    ms = [8, 16]
    vals = polar_values(f, radii, ms)
    th1 = -np.pi + 2 * np.pi * np.arange(8) / 8
    th2 = -np.pi + 2 * np.pi * np.arange(16) / 16
    z1 = radii[0][:, None, None] * np.exp(1j * th1)[None, :, None]
    z2 = (radii[1][0] * np.exp(1j * th2))[None, None, :]
    ref = eval_series(f, [np.broadcast_to(z1, (2, 8, 16)), np.broadcast_to(z2, (2, 8, 16))])
    np.testing.assert_allclose(vals[:, 0], ref, atol=1e-13)


def test_polar_values_fold_high_degree():
    f = PolySeries(np.arange(1, 40, dtype=complex))
    vals = polar_values(f, [np.array([0.9])], [8])
    th = -np.pi + 2 * np.pi * np.arange(8) / 8
    np.testing.assert_allclose(vals[0], f(0.9 * np.exp(1j * th)), rtol=1e-12)


def test_extremal_r_zero_is_constant():
    f = extremal_f_r([0.0], [2], _w(0.5), 2.0)
    np.testing.assert_allclose(f.coeffs, [1.0])


def test_extremal_binomial_coefficients():
    r, p = 0.6, 2.0
    f = extremal_f_r([r], [2], _w(0.0), p)
    j = np.arange(10)
    C = (1 - r) ** 2
    np.testing.assert_allclose(f.coeffs[:10], C * (j + 1) * r ** j, rtol=1e-12)


def test_extremal_requires_large_k():
    with pytest.raises(ValueError):
        extremal_f_r([0.5], [1], _w(2.0), 1.0)


def test_extremal_truncation_error():
    with pytest.raises(TruncationError) as exc:
        extremal_f_r([0.99], [3], _w(0.0), 1.0, degree_bound=[10])
    assert exc.value.required_degree > 10


def test_required_degree_tail():
    r, k = 0.9, 3.0
    N = required_degree(r, k, 1e-10)
    m = np.arange(N + 1)
    c = np.exp([math.lgamma(k + x) - math.lgamma(k) - math.lgamma(x + 1) for x in m]) * r ** m
    assert 1 - c.sum() * (1 - r) ** k < 1e-10


def test_symbol_g_r_phase_cancellation():
    f = PolySeries.random((6,), np.random.default_rng(5))
    g = symbol_g_r(f)
    rng = np.random.default_rng(6)
    z = 0.95 * np.sqrt(rng.random(200)) * np.exp(2j * np.pi * rng.random(200))
    fz = f(z)
    np.testing.assert_allclose(np.abs(g([z]) * fz - np.abs(fz)), 0, atol=1e-14)


def test_symbol_g_r_positive_and_imaginary_values():
    g = symbol_g_r(PolySeries.constant(2.0))
    np.testing.assert_allclose(g([np.array([0.3])]), 1.0)
    g = symbol_g_r(PolySeries.constant(2.0j))
    np.testing.assert_allclose(g([np.array([0.3])]), -1j, atol=1e-15)


def test_series_json_round_trip():
    f = PolySeries.random((3, 2), np.random.default_rng(0))
    g = PolySeries.from_json(f.to_json())
    np.testing.assert_array_equal(g.coeffs, f.coeffs)


@settings(max_examples=30, deadline=None)
@given(beta=st.floats(-0.9, 4.0), kmax=st.integers(0, 60))
def test_frac_multiplier_recurrence(beta, kmax):
    m = frac_multiplier(beta, kmax)
    k = np.arange(1, kmax + 1)
    np.testing.assert_allclose(m[1:], m[:-1] * (beta + k) / k, rtol=1e-10)
    assert m[0] == pytest.approx(1.0)


@settings(max_examples=30, deadline=None)
@given(b1=st.floats(-0.5, 3.0), b2=st.floats(-0.5, 3.0), seed=st.integers(0, 1000))
def test_frac_diff_composes_over_variables(b1, b2, seed):
    f = PolySeries.random((4, 3), np.random.default_rng(seed))
    both = frac_diff(f, [b1, b2])
    stepwise = frac_diff(frac_diff(f, [b1, 0.0]), [0.0, b2])
    np.testing.assert_allclose(both.coeffs, stepwise.coeffs, rtol=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), x=st.floats(0, 0.95), y=st.floats(0, 0.95))
def test_product_series_evaluates_as_product(seed, x, y):
    rng = np.random.default_rng(seed)
    f1, f2 = PolySeries.random((4,), rng), PolySeries.random((3,), rng)
    prod = PolySeries.product(f1, f2)
    np.testing.assert_allclose(prod([x, 1j * y]), f1(x) * f2(1j * y), rtol=1e-12)
    np.testing.assert_allclose(prod([x, 1j * y]), PolySeries(prod.coeffs)([x, 1j * y]), rtol=1e-10)
