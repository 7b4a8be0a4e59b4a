import math

import numpy as np
import pytest

from cantormap.analysis import (
    SubexpFunctional,
    frame_integral_mc,
    frame_jacobian_integral,
    frame_subexp_integral,
    frame_tv_integral,
    image_area_partition_defect,
    gain_ratio_limit,
    gain_ratio,
    p_threshold,
    series_terms,
    subexp_A,
    subexp_gain,
)
from cantormap.construction import LOG2, ConstructionParams, radii
from cantormap.logspace import log_sum
from cantormap.mapping import coeffs, sup_distortion
from cantormap.quadrature import integrate

P = ConstructionParams(0.45, 2.0)


def test_subexp_gauge_anchors():
    assert subexp_A(1.0, 0.7) == 0.0
    # A(e) = e/2 - 1 at p = 1
    np.testing.assert_allclose(subexp_A(math.e, 1.0), 0.3591409142295226, rtol=1e-14)
    assert subexp_gain(1.0, 2.0) == 2.0
    with pytest.raises(ValueError):
        subexp_A(0.5, 1.0)
    with pytest.raises(ValueError):
        subexp_A(2.0, 0.0)
    with pytest.raises(ValueError):
        subexp_gain(0.99, 1.0)
    with pytest.raises(ValueError):
        SubexpFunctional(-1.0)
    f = SubexpFunctional(1.0)
    assert f.A(math.e) == subexp_A(math.e, 1.0)
    assert f.gain(math.e) == subexp_gain(math.e, 1.0)


def test_jacobian_integral_equals_image_frame_area():
    """The Jacobian integral over a frame is exactly the image frame area."""
    for k in range(3, 13):
        rad = radii(k, P)
        area_img = 4.0 * (rad.R_img**2 - rad.r_img**2)
        np.testing.assert_allclose(frame_jacobian_integral(k, P), area_img, rtol=1e-12)


def test_jacobian_integral_vs_monte_carlo():
    mc = frame_integral_mc(4, P, "jacobian", n_samples=10**6)
    np.testing.assert_allclose(mc, frame_jacobian_integral(4, P), rtol=5e-3)


def test_tv_integral_vs_quadrature():
    for k in (3, 4, 7):
        c = coeffs(k, P)
        rad = radii(k, P)
        oracle = integrate(
            lambda rho: max(c.a, c.a + c.b / rho) * 8.0 * rho, rad.r, rad.R
        )
        np.testing.assert_allclose(frame_tv_integral(k, P), oracle, rtol=1e-9)


def test_tv_integral_drops_negative_b_term():
    # b < 0 at level 4 for these parameters, so |Df| = a on the frame
    c = coeffs(4, P)
    assert c.b < 0.0
    rad = radii(4, P)
    expected = 4.0 * c.a * (rad.R**2 - rad.r**2)
    assert frame_tv_integral(4, P) == expected


def test_include_square_adds_exact_contribution():
    for k in (3, 5):
        rad = radii(k, P)
        tv_delta = frame_tv_integral(k, P, include_square=True) - frame_tv_integral(k, P)
        np.testing.assert_allclose(
            tv_delta, (rad.r_img / rad.r) * (2.0 * rad.r) ** 2, rtol=1e-12
        )
        se_delta = frame_subexp_integral(k, 0.5, P, include_square=True) - (
            frame_subexp_integral(k, 0.5, P)
        )
        np.testing.assert_allclose(
            se_delta, math.exp(0.5) * (2.0 * rad.r) ** 2, rtol=1e-9
        )


def test_subexp_integral_vs_monte_carlo():
    quad = frame_subexp_integral(4, 0.5, P)
    mc = frame_integral_mc(4, P, "subexp", p=0.5, n_samples=10**6)
    np.testing.assert_allclose(mc, quad, rtol=5e-3)


def test_frame_integral_guards():
    with pytest.raises(ValueError, match="underflow"):
        frame_jacobian_integral(2000, P)
    with pytest.raises(ValueError, match="overflow"):
        frame_subexp_integral(800, 20.0, P)
    with pytest.raises(ValueError):
        frame_subexp_integral(4, -1.0, P)
    with pytest.raises(ValueError):
        frame_integral_mc(4, P, "nope")
    with pytest.raises(ValueError):
        frame_integral_mc(4, P, "subexp")


def test_partition_of_image_area():
    for depth in (6, 12, 40):
        assert image_area_partition_defect(depth, P) <= 1e-12


def test_series_log_terms_match_linear_integrals():
    levels = range(3, 41)
    diag = series_terms("tv", levels, P)
    for term in diag.terms:
        direct = math.log(frame_tv_integral(term.level, P))
        np.testing.assert_allclose(term.log_per_frame, direct, rtol=1e-12)
        assert term.count_log2 == 2 * (term.level - 1)
        assert term.log_term == term.count_log2 * LOG2 + term.log_per_frame


def test_subexp_log_terms_match_linear():
    diag = series_terms("subexp", range(3, 41), P, p=0.5)
    for term in diag.terms:
        rad = radii(term.level, P)
        area = 4.0 * (rad.R**2 - rad.r**2)
        direct = math.log(area) + subexp_gain(sup_distortion(term.level, P), 0.5)
        np.testing.assert_allclose(term.log_per_frame, direct, atol=1e-12)


def test_series_ratio_consistency():
    diag = series_terms("tv", [5, 6], P)
    implied = math.exp(
        2.0 * LOG2 + diag.terms[1].log_per_frame - diag.terms[0].log_per_frame
    )
    np.testing.assert_allclose(diag.ratios[0], implied, rtol=1e-15)


def test_tv_ratios_tend_to_two_sigma():
    diag = series_terms("tv", [10**4], P)
    assert diag.limit_ratio == 2.0 * P.sigma
    assert diag.verdict == "convergent"
    np.testing.assert_allclose(diag.ratios[0], 0.9, atol=1e-4)


def test_subexp_ratio_approaches_limit():
    diag = series_terms("subexp", [10**6], P, p=0.5)
    np.testing.assert_allclose(diag.ratios[0], diag.limit_ratio, rtol=2e-2)


def test_verdict_flips_at_threshold():
    p0 = p_threshold(P)
    assert series_terms("subexp", [4], P, p=0.9 * p0).verdict == "convergent"
    assert series_terms("subexp", [4], P, p=1.1 * p0).verdict == "divergent"
    assert series_terms("subexp", [4], P, p=p0).verdict == "inconclusive"


def test_partial_sums_settle_below_threshold():
    """For p below the threshold the grouped series is Cauchy: by level
    250 a term sits twelve orders below the partial sum."""
    diag = series_terms("subexp", range(3, 251), P, p=0.5)
    log_terms = [t.log_term for t in diag.terms]
    total = log_sum(log_terms)
    assert log_terms[-1] - total < math.log(1e-12)
    assert all(r < 1.0 for r in diag.ratios[-20:])


def test_terms_grow_above_threshold():
    p0 = p_threshold(P)
    diag = series_terms("subexp", [10**4, 10**5], P, p=2.0 * p0)
    assert all(r > 1.0 for r in diag.ratios)
    assert diag.verdict == "divergent"


def test_series_validation():
    with pytest.raises(ValueError):
        series_terms("bad", [4], P)
    with pytest.raises(ValueError):
        series_terms("subexp", [4], P)
    with pytest.raises(ValueError):
        series_terms("tv", [], P)
    with pytest.raises(ValueError):
        series_terms("tv", [2], P)
    with pytest.raises(ValueError):
        series_terms("tv", [4], P, margin=0.0)


def test_gain_ratio_limit_quarter_sigma():
    # alpha = 1 at sigma = 1/4, so the limit at p = 2, beta = 2 is e^2
    params = ConstructionParams(0.25, 2.0)
    np.testing.assert_allclose(gain_ratio_limit(2.0, params), math.e**2, rtol=1e-15)


def test_gain_ratio_slow_convergence_pinned():
    params_a = ConstructionParams(0.25, 2.0)
    dev_a = abs(gain_ratio(10**9, 2.0, params_a) / gain_ratio_limit(2.0, params_a) - 1.0)
    np.testing.assert_allclose(dev_a, 0.27079833900146566, rtol=1e-9)
    params_b = ConstructionParams(0.45, 1.0)
    dev_b = abs(gain_ratio(10**9, 0.5, params_b) / gain_ratio_limit(0.5, params_b) - 1.0)
    np.testing.assert_allclose(dev_b, 0.011694276031904427, rtol=1e-9)


def test_gain_ratio_rejects_pre_asymptotic_levels():
    with pytest.raises(ValueError, match="below 1"):
        gain_ratio(6, 1.0, ConstructionParams(0.48, 2.0))
    with pytest.raises(ValueError):
        gain_ratio(100, -1.0, P)


def test_threshold_anchors():
    np.testing.assert_allclose(
        p_threshold(ConstructionParams(0.25, 2.0)), 2.0 * LOG2, rtol=1e-15
    )
    np.testing.assert_allclose(
        p_threshold(ConstructionParams(0.499, 1.0)), 0.9989993326658104, rtol=1e-12
    )
    assert p_threshold(ConstructionParams(0.45, 4.0)) == 2.0 * p_threshold(P)
