import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import beta as beta_fn

from besov.quadrature import (AngularRule, QuadratureError, QuadratureScheme, RadialRule,
                              Separable, integrate, integrate_kernel, mc_integrate)


@pytest.fixture
def scheme1():
    return QuadratureScheme.default(1)


def test_area_of_disc(scheme1):
    val, err = integrate(scheme1, lambda z: np.ones_like(z[0]))
    np.testing.assert_allclose(val, math.pi, rtol=1e-12)


@pytest.mark.parametrize("alpha", [0.5, -0.5, 2.0])
def test_beta_integral(scheme1, alpha):
    val, _ = integrate(scheme1, lambda z: 1.0, a=alpha)
    np.testing.assert_allclose(val, math.pi / (alpha + 1), rtol=1e-12)


@pytest.mark.parametrize("n", [1, 2])
def test_odd_integrand_vanishes(n):
    val, _ = integrate(QuadratureScheme.default(n), lambda z: z[0])
    assert abs(val) < 1e-12


def test_product_of_radial_moments():
    f = Separable([lambda x: np.abs(x) ** 2, lambda x: np.abs(x) ** 2])
    val, _ = integrate(QuadratureScheme.default(2), f)
    np.testing.assert_allclose(val, (math.pi / 2) ** 2, rtol=1e-12)


def test_dense_two_variable_integrand_matches_separable():
    dense = lambda z: np.abs(z[0]) ** 2 * np.abs(z[1]) ** 2
    val, _ = integrate(QuadratureScheme.default(2), dense)
    np.testing.assert_allclose(val, (math.pi / 2) ** 2, rtol=1e-12)


@pytest.mark.parametrize("a, b", [(0.0, 3.0), (1.5, 4.0), (-0.5, 2.5)])
def test_kernel_at_origin_is_beta(scheme1, a, b):
    val, _ = integrate_kernel(scheme1, a, b, [0.0])
    np.testing.assert_allclose(val, math.pi / (a + 1), rtol=1e-12)


@pytest.mark.parametrize("x", [0.3, 0.7, 0.9, 0.99])
def test_modulus_kernel_series_oracle(scheme1, x):
    # |1 - z conj(zeta)|^-2 integrates to pi log(1/(1-|z|^2)) / |z|^2
    val, _ = integrate_kernel(scheme1, 0.0, 2.0, [x])
    np.testing.assert_allclose(val, math.pi * math.log(1 / (1 - x * x)) / x ** 2, rtol=1e-9)


@pytest.mark.parametrize("z", [0.5, 0.9j, -0.95 + 0.1j])
def test_holomorphic_kernel_is_pi(scheme1, z):
    kern = lambda zeta: (1 - np.conj(z) * zeta[0]) ** -2
    val, _ = integrate_kernel(scheme1, 0.0, 0.0, [z], kernel=kern)
    np.testing.assert_allclose(val, math.pi, rtol=1e-10)


def test_kernel_matches_monte_carlo(scheme1):
    z = 0.9
    val, _ = integrate_kernel(scheme1, 1.0, 4.0, [z])
    f = lambda zeta: (1 - np.abs(zeta[0]) ** 2) * np.abs(1 - z * np.conj(zeta[0])) ** -4.0
    mv, se = mc_integrate(f, 1, 10 ** 6, seed=11)
    assert abs(mv.real - val.real) <= 3 * se


def test_kernel_two_variables_factorizes():
    s2 = QuadratureScheme.default(2)
    val, _ = integrate_kernel(s2, [1.0, 0.5], [4.0, 3.0], [0.5, 0.9j])
    v1, _ = integrate_kernel(QuadratureScheme.default(1), 1.0, 4.0, [0.5])
    v2, _ = integrate_kernel(QuadratureScheme.default(1), 0.5, 3.0, [0.9j])
    np.testing.assert_allclose(val, v1 * v2, rtol=1e-10)


def test_refinement_error_decreases(scheme1):
    errs = []
    for level in range(3):
        s = QuadratureScheme(1, kernel_panel_nodes=4 * 2 ** level, max_refinement=1)
        _, e = integrate_kernel(s, 0.5, 4.0, [0.99], strict=False)
        errs.append(e)
    assert errs[0] > errs[1] > errs[2]


def test_nonconvergence_raises():
    s = QuadratureScheme(1, radial_nodes=2, angular_nodes=4, max_refinement=1)
    with pytest.raises(QuadratureError):
        integrate(s, lambda z: np.abs(1 - 0.999 * z[0]) ** -3.0)


def test_mc_constant_exact_and_deterministic():
    v, se = mc_integrate(lambda z: 1.0, 2, 5000, seed=3)
    assert v == math.pi ** 2 and se == 0.0
    f = lambda z: 1 - np.abs(z[0]) ** 2
    assert mc_integrate(f, 1, 20000, seed=7) == mc_integrate(f, 1, 20000, seed=7)


def test_mc_beta_integral():
    v, se = mc_integrate(lambda z: 1 - np.abs(z[0]) ** 2, 1, 10 ** 6, seed=0)
    assert abs(v.real - math.pi / 2) <= 3 * se


def test_angular_weights_sum():
    np.testing.assert_allclose(AngularRule.periodic(37).weights.sum(), 2 * math.pi)
    np.testing.assert_allclose(AngularRule.graded(0.3, 0.01).weights.sum(), 2 * math.pi)


@settings(max_examples=30, deadline=None)
@given(a=st.floats(-0.9, 4.0), j=st.integers(0, 15))
def test_gauss_jacobi_exact_in_rho_squared(a, j):
    # int_0^1 rho^(2j) (1-rho^2)^a rho d rho = B(j+1, a+1) / 2
    rule = RadialRule.gauss_jacobi(8, a)
    val = np.sum(rule.weights * rule.nodes ** (2 * j))
    np.testing.assert_allclose(val, beta_fn(j + 1, a + 1) / 2, rtol=1e-11)
    assert np.all(rule.weights > 0)


@settings(max_examples=30, deadline=None)
@given(a=st.floats(-0.9, 4.0), j=st.integers(0, 20))
def test_graded_rule_moments(a, j):
    rule = RadialRule.graded(a, t_min=1e-3, q=12)
    val = np.sum(rule.weights * rule.nodes ** j)
    # odd powers of rho included: int rho^j (1-rho^2)^a rho d rho = B(j/2 + 1, a + 1) / 2
    np.testing.assert_allclose(val, beta_fn(j / 2 + 1, a + 1) / 2, rtol=1e-9)
    assert np.all(rule.weights > 0)


@settings(max_examples=20, deadline=None)
@given(x=st.floats(0.0, 0.95), th=st.floats(-math.pi, math.pi), a=st.floats(0.0, 2.0))
def test_kernel_rotation_invariance(x, th, a):
    s = QuadratureScheme.default(1)
    v0, _ = integrate_kernel(s, a, 3.0, [x])
    v1, _ = integrate_kernel(s, a, 3.0, [x * np.exp(1j * th)])
    np.testing.assert_allclose(v1, v0, rtol=1e-9)
