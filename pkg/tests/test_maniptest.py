"""Manipulation test: joint/separate identities, models, RBC wrapper."""

import numpy as np
import pytest

from lpdens.errors import EmptySide
from lpdens.kernels import BasisKind
from lpdens.lpfit import derivative_estimate, fit_local
from lpdens.maniptest import diff_mse_bandwidth, rbc_test
from lpdens.maniptest import test_restricted as restricted_test
from lpdens.maniptest import test_unrestricted as unrestricted_test
from lpdens.sample import load_sample, split_at_cutoff


@pytest.fixture(scope="module")
def normal_sample():
    rng = np.random.default_rng(31)
    return load_sample(rng.normal(size=2500))


def test_joint_separate_identities(normal_sample):
    """Separate-sample fits equal rescaled joint-fit blocks exactly."""
    s = normal_sample
    c, h, p = 0.2, 0.8, 2
    left, right, n_minus, n_plus = split_at_cutoff(s, c)
    joint = fit_local(s, c, h, p, basis=BasisKind.UNRESTRICTED)
    fit_l = fit_local(left, c, h, p)
    fit_r = fit_local(right, c, h, p)
    n = s.n
    for v in range(p + 1):
        jl = derivative_estimate(joint, v, "left")
        jr = derivative_estimate(joint, v, "right")
        sl = derivative_estimate(fit_l, v)
        sr = derivative_estimate(fit_r, v)
        assert sl == pytest.approx((n / n_minus) * jl, rel=1e-10, abs=1e-12)
        if v == 0:
            # right EDF is affine in the pooled EDF below the block
            assert sr == pytest.approx((n / n_plus) * jr - n_minus / n_plus, rel=1e-10)
        else:
            assert sr == pytest.approx((n / n_plus) * jr, rel=1e-10, abs=1e-12)


def test_unrestricted_joint_result_shape(normal_sample):
    res = unrestricted_test(normal_sample, 0.0, p=2, h_minus=0.7, h_plus=0.7)
    assert res.model == "unrestricted"
    assert res.h_minus == res.h_plus == 0.7
    assert res.n_minus + res.n_plus == normal_sample.n
    assert res.se_diff > 0
    assert 0.0 <= res.p_value <= 1.0
    rec = res.record()
    for key in ("cutoff", "model", "p_point", "p_infer", "h_minus", "h_plus",
                "n_minus", "n_plus", "m_eff_minus", "m_eff_plus", "f_minus",
                "f_plus", "se_diff", "T", "p_value", "warnings"):
        assert key in rec


def test_unrestricted_distinct_bandwidths_use_separate(normal_sample):
    res = unrestricted_test(normal_sample, 0.0, p=2, h_minus=0.6, h_plus=0.8)
    assert res.model == "separate"
    assert res.h_minus == 0.6 and res.h_plus == 0.8


def test_joint_and_separate_T_agree_under_common_h(normal_sample):
    """Numerators are identical; the studentized forms agree asymptotically."""
    from lpdens.maniptest import _separate_test

    s = normal_sample
    h = 0.8
    joint = unrestricted_test(s, 0.1, p=2, h_minus=h, h_plus=h)
    sep = _separate_test(s, 0.1, 2, "triangular", h, h)
    num_joint = joint.f_plus - joint.f_minus
    num_sep = (sep.n_plus / s.n) * sep.f_plus - (sep.n_minus / s.n) * sep.f_minus
    # exact identity for the jump estimate
    assert num_joint == pytest.approx(num_sep, rel=1e-10)
    # the separate se drops the cross-side EDF covariance: close, not equal
    assert joint.T == pytest.approx(sep.T, rel=0.25)


def test_restricted_model(normal_sample):
    res = restricted_test(normal_sample, 0.0, p=2, h=0.7)
    assert res.model == "restricted"
    assert res.se_diff > 0
    assert 0.0 <= res.p_value <= 1.0


def test_restricted_no_jump_when_density_continuous(normal_sample):
    # standard normal has no jump at 0; the restricted T should be moderate
    res = restricted_test(normal_sample, 0.0, p=2, h=0.8)
    assert abs(res.T) < 4.0


def test_rbc_orders(normal_sample):
    res = rbc_test(normal_sample, 0.0, p=2)
    assert res.p_point == 2 and res.p_infer == 3
    assert res.h_minus == res.h_plus > 0


def test_diff_mse_bandwidth_positive(normal_sample):
    bw = diff_mse_bandwidth(normal_sample, 0.0, 2)
    assert bw.h_common > 0 and bw.h_minus > 0 and bw.h_plus > 0
    assert bw.variance_diff > 0


def test_diff_bandwidth_clamped_inside_support():
    # selected bandwidths must keep the window inside each side's support
    rng = np.random.default_rng(57)
    u = rng.random(3000)
    vals = np.where(u < 0.75, u / 0.75, 1.0 + (u - 0.75) / 0.25)
    s = load_sample(vals, support=(0.0, 2.0))
    bw = diff_mse_bandwidth(s, 1.0, 2)
    assert bw.h_common <= 0.95 + 1e-12
    assert bw.h_minus <= 0.95 + 1e-12
    assert bw.h_plus <= 0.95 + 1e-12


def test_cutoff_outside_data(normal_sample):
    with pytest.raises(EmptySide):
        unrestricted_test(normal_sample, 99.0, h_minus=0.5, h_plus=0.5)


def test_power_against_actual_jump():
    # sharp density jump 0.75 vs 0.25 at cutoff 1: T should be large
    rng = np.random.default_rng(33)
    u = rng.random(4000)
    vals = np.where(u < 0.75, u / 0.75, 1.0 + (u - 0.75) / 0.25)
    s = load_sample(vals, support=(0.0, 2.0))
    res = rbc_test(s, 1.0, p=2)
    assert res.p_value < 0.01
    assert res.f_plus < res.f_minus
