"""Bandwidth selection: closed form, optimality, case dispatch, guards."""

import numpy as np
import pytest

from lpdens.bandwidth import (
    closed_form_h,
    estimate_bias_constants,
    mse_bandwidth,
    preliminary_bandwidth,
)
from lpdens.errors import ZeroBias, ZeroVariance
from lpdens.sample import load_sample


def test_closed_form_value():
    # (2v-1) V / (n (2p+2-2v) B^2), exponent 1/(2p+1):
    # v=1, p=2: (0.6 / (1000 * 4 * 0.04))^(1/5)
    h = closed_form_h(0.6, 0.2, 1000, 2, 1)
    assert h == pytest.approx((0.6 / 160.0) ** 0.2, rel=1e-12)


def test_closed_form_first_order_optimality():
    # stationary point of the frozen-constant MSE in h
    V, B, n, p, v = 0.6, 0.2, 1000, 2, 1
    h = closed_form_h(V, B, n, p, v)

    def mse(hh):
        return B**2 * hh ** (2 * p + 2 - 2 * v) + V / (n * hh ** (2 * v - 1))

    eps = 1e-6
    deriv = (mse(h * (1 + eps)) - mse(h * (1 - eps))) / (2 * h * eps)
    scale = mse(h) / h
    assert abs(deriv) / scale < 1e-6
    assert mse(h) < mse(h * 0.9) and mse(h) < mse(h * 1.1)


def test_closed_form_zero_bias():
    with pytest.raises(ZeroBias):
        closed_form_h(0.6, 0.0, 1000, 2, 1)


def test_preliminary_bandwidth_normal_reference():
    rng = np.random.default_rng(12)
    vals = rng.normal(size=1000)
    s = load_sample(vals)
    ell = preliminary_bandwidth(s)
    assert ell == pytest.approx(1.06 * np.std(vals, ddof=1) * 1000 ** (-0.2))


def test_preliminary_bandwidth_zero_variance():
    s = load_sample([1.0, 1.0, 1.0])
    with pytest.raises(ZeroVariance):
        preliminary_bandwidth(s)


def test_bias_constants_shape_and_pilot():
    rng = np.random.default_rng(8)
    s = load_sample(rng.exponential(size=3000), support=(0.0, np.inf))
    bc = estimate_bias_constants(s, 1.0, 2, 1, "triangular", 0.5)
    assert bc.Sinv_c.shape == (3,)
    assert np.isfinite(bc.F_p1) and np.isfinite(bc.F_p2)
    # exponential: F'''(1) = e^{-1}; pilot is rough, just sign and scale
    assert abs(bc.F_p1) < 5.0


def test_mse_bandwidth_case_dispatch():
    rng = np.random.default_rng(15)
    s = load_sample(rng.exponential(size=4000), support=(0.0, np.inf))
    # p=2, v=1: p-v odd -> case (a) everywhere
    sel = mse_bandwidth(s, 1.0, 2, 1)
    assert sel.case_tag == "odd_or_boundary"
    assert 0.05 < sel.h < 2.0
    # p=3, v=1 interior: p-v even -> second-order case
    sel2 = mse_bandwidth(s, 1.0, 3, 1)
    assert sel2.case_tag == "even_interior"
    assert 0.05 < sel2.h < 3.0
    # near the boundary the pilot region is truncated -> case (a)
    sel3 = mse_bandwidth(s, 0.0, 3, 1)
    assert sel3.case_tag == "odd_or_boundary"


def test_mse_bandwidth_cdf_cases():
    rng = np.random.default_rng(16)
    s = load_sample(rng.exponential(size=4000), support=(0.0, np.inf))
    sel = mse_bandwidth(s, 1.0, 2, 0)
    assert sel.case_tag == "cdf_interior" and sel.h > 0
    sel_b = mse_bandwidth(s, 0.0, 2, 0)
    assert sel_b.case_tag == "cdf_boundary_empirical" and sel_b.h > 0


def test_mse_bandwidth_rate_in_n():
    # h should shrink roughly like n^{-1/5} for p=2, v=1
    rng = np.random.default_rng(17)
    pool = rng.exponential(size=32000)
    h_small = mse_bandwidth(load_sample(pool[:2000], support=(0.0, np.inf)), 1.0, 2, 1).h
    h_large = mse_bandwidth(load_sample(pool, support=(0.0, np.inf)), 1.0, 2, 1).h
    ratio = h_large / h_small
    expect = (32000 / 2000) ** (-0.2)
    assert 0.5 * expect < ratio < 2.0 * expect


def test_mse_bandwidth_order_guard():
    s = load_sample(np.linspace(0, 1, 100))
    with pytest.raises(ValueError):
        mse_bandwidth(s, 0.5, 2, 3)
