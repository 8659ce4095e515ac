import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from besov.weights import (ProductWeight, WeightFactor, eval_weight, lemma2_ratio,
                           regularity_indices, verify_class_S, weight_from_config)


@pytest.mark.parametrize("w, t, expected", [
    (WeightFactor.power(0.0), 0.3, 1.0),
    (WeightFactor.power(2.0), 0.5, 0.25),
    (WeightFactor.power_log(1.0, 1.0, 1.0), math.exp(-1), 2 * math.exp(-1)),
])
def test_eval_weight_values(w, t, expected):
    np.testing.assert_allclose(eval_weight(w, t), expected, rtol=1e-14)


@pytest.mark.parametrize("t", [0.0, -0.1, 1.5])
def test_eval_weight_rejects_outside_domain(t):
    with pytest.raises(ValueError):
        eval_weight(WeightFactor.power(0.5), t)


@pytest.mark.parametrize("a, expected", [(0.5, (0.5, 0.0)), (0.0, (0.0, 0.0)), (-0.5, (-0.5, 0.5))])
def test_regularity_indices_power(a, expected):
    assert regularity_indices(WeightFactor.power(a)) == expected


def test_regularity_indices_powerlog_matches_power():
    assert regularity_indices(WeightFactor.power_log(0.7, 2.0, 1.0)) == (0.7, 0.0)


def test_power_exponent_must_exceed_minus_one():
    with pytest.raises(ValueError):
        WeightFactor.power(-1.0)


def test_class_S_power_half():
    rep = verify_class_S(WeightFactor.power(0.5), q=0.5)
    np.testing.assert_allclose(rep.metrics["min_ratio"], 2 ** -0.5, rtol=1e-12)
    np.testing.assert_allclose(rep.metrics["max_ratio"], 1.0, rtol=1e-12)
    assert rep.passed


def test_class_S_constant_weight():
    rep = verify_class_S(WeightFactor.power(0.0), q=0.3)
    assert rep.metrics["min_ratio"] == rep.metrics["max_ratio"] == 1.0


def test_class_S_powerlog_index_estimates():
    rep = verify_class_S(WeightFactor.power_log(0.5, 1.0, 1.0), q=0.5)
    assert abs(rep.metrics["alpha_est"] - 0.5) < 0.05
    assert abs(rep.metrics["beta_est"]) < 0.05


def test_weight_from_config_product():
    w = weight_from_config([{"family": "power", "a": 0.5}, {"family": "power-log", "a": 1, "b": 2}])
    assert isinstance(w, ProductWeight) and w.n == 2
    with pytest.raises(ValueError):
        weight_from_config([{"family": "gauss", "a": 1}])


@pytest.mark.parametrize("w, a, b, expected", [
    (WeightFactor.power(0.5), 1.0, 4.0, math.pi / 2.5),
    (WeightFactor.power(0.0), 0.0, 2.0, math.pi),
])
def test_lemma2_value_at_origin(w, a, b, expected):
    rep = lemma2_ratio(w, a, b, [0.0])
    np.testing.assert_allclose(rep.rows[0]["value"], expected, rtol=1e-10)


def test_lemma2_bounded_profile():
    rep = lemma2_ratio(WeightFactor.power(0.5), 1.0, 4.0, [0.5, 0.9, 0.99])
    prof = rep.metrics["profile"]
    assert prof[2] / prof[1] <= 2.0
    assert rep.passed and rep.mode == "sufficiency"


def test_lemma2_growth_when_violated():
    rep = lemma2_ratio(WeightFactor.power(0.5), 1.0, 3.2, [0.5, 0.9, 0.95, 0.99])
    assert rep.mode == "necessity" and rep.passed


@settings(max_examples=40, deadline=None)
@given(a=st.floats(-0.9, 3.0), q=st.floats(0.05, 0.95))
def test_class_S_power_ratio_is_lambda_power(a, q):
    rep = verify_class_S(WeightFactor.power(a), q=q, grid_size=20)
    lo, hi = sorted((q ** a, 1.0))
    np.testing.assert_allclose([rep.metrics["min_ratio"], rep.metrics["max_ratio"]], [lo, hi], rtol=1e-10)


@settings(max_examples=40, deadline=None)
@given(a=st.floats(-0.9, 3.0), b=st.floats(-2.0, 2.0), t=st.floats(1e-8, 1.0))
def test_weights_positive_and_finite(a, b, t):
    v = eval_weight(WeightFactor.power_log(a, b, 1.0), t)
    assert np.isfinite(v) and v > 0
