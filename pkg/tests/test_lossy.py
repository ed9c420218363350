import numpy as np
import pytest
from scipy.stats import entropy as sp_entropy

from jscc_exponents.bounds import JsccProblem, classify
from jscc_exponents.channels import bsc
from jscc_exponents.lossy import (
    LossyProblem,
    es_delta,
    lossy_bounds,
    lossy_primal_oracle,
    lossy_source_curve,
    lossy_source_exponent,
    lossy_source_exponent_vec,
    lossy_threshold,
    rate_distortion_binary,
    rho_zero,
)
from jscc_exponents.probability import SourceSpec, ValidationError, is_unbounded, tilted_entropy


def h(p):
    return sp_entropy([p, 1 - p], base=2)


def brute_F(q, d, R, n=200001):
    """min D(P||Q) over binary P whose rate-distortion function reaches R."""
    p = np.linspace(1e-9, 0.5, n)
    hp = -(p * np.log2(p) + (1 - p) * np.log2(1 - p))
    rd = np.where(p > d, hp - h(d), 0.0)
    D = p * np.log2(p / q) + (1 - p) * np.log2((1 - p) / (1 - q))
    ok = rd >= R
    return float(D[ok].min()) if ok.any() else np.inf


@pytest.mark.parametrize("q,d", [(0.1, 0.02), (0.2, 0.05), (0.3, 0.1)])
def test_source_exponent_brute_force(q, d):
    for R in np.linspace(0.0, 0.95 * (1 - h(d)), 7):
        assert lossy_source_exponent(q, d, R) == pytest.approx(brute_F(q, d, R), abs=2e-5)
    assert is_unbounded(lossy_source_exponent(q, d, 1 - h(d) + 1e-3))


def test_rate_distortion():
    assert rate_distortion_binary(0.2, 0.05) == pytest.approx(h(0.2) - h(0.05))
    assert rate_distortion_binary(0.2, 0.3) == 0.0
    assert np.all(lossy_source_exponent_vec(0.2, 0.05, [0.0, 0.1]) == 0.0)


def test_rho_zero_and_threshold():
    assert rho_zero(0.2, 0.1) == 0.0
    r = rho_zero(0.1, 0.2)
    assert tilted_entropy(SourceSpec([0.1, 0.9]), r) == pytest.approx(h(0.2), abs=1e-10)
    q = 0.15
    assert rho_zero(q, lossy_threshold(q)) == pytest.approx(1.0, abs=1e-9)
    assert rho_zero(0.1, 0.5) == np.inf


def test_es_delta_shift():
    from jscc_exponents.source import gallager_source_fn
    rho = np.array([0.3, 1.0])
    ref = gallager_source_fn(SourceSpec([0.1, 0.9]), rho) - rho * h(0.05)
    np.testing.assert_allclose(es_delta(0.1, 0.05, rho), ref)


def test_zero_distortion_reduces_to_lossless():
    Q = SourceSpec([0.1, 0.9])
    lossless = classify(JsccProblem(Q, bsc(0.05), 1.0))
    lossy = lossy_bounds(LossyProblem(0.1, bsc(0.05), 1.0, 0.0))
    assert lossy.lower == pytest.approx(lossless.lower_rc, abs=1e-10)
    assert lossy.upper == pytest.approx(lossless.upper_sp, abs=1e-10)
    assert lossy.tightness == lossless.tightness


@pytest.mark.parametrize("q,eps,t,d", [(0.1, 0.05, 1.0, 0.02), (0.2, 0.02, 1.0, 0.1), (0.1, 0.01, 0.5, 0.2)])
def test_lossy_bounds_against_primal(q, eps, t, d):
    p = LossyProblem(q, bsc(eps), t, d)
    rep = lossy_bounds(p)
    lo, _ = lossy_primal_oracle(p, "rc", step=1e-5 * t)
    up, _ = lossy_primal_oracle(p, "sp", step=1e-5 * t)
    assert rep.lower == pytest.approx(lo, abs=1e-5)
    assert rep.upper == pytest.approx(up, abs=1e-5)
    assert rep.lower <= rep.upper + 1e-12


def test_lossy_zero_exponent_and_validation():
    rep = lossy_bounds(LossyProblem(0.3, bsc(0.2), 2.0, 0.01))
    assert rep.tightness.value == "ZeroExponent"
    # uniform sources are allowed once distortion is positive
    assert lossy_bounds(LossyProblem(0.5, bsc(0.05), 1.0, 0.1)).lower > 0
    for q, d in ((0.0, 0.1), (0.6, 0.1), (0.1, -0.1), (0.1, 0.6)):
        with pytest.raises(ValidationError):
            LossyProblem(q, bsc(0.1), 1.0, d)


def test_source_curve():
    c = lossy_source_curve(0.1, 0.05, n=51)
    assert c.rates[-1] == pytest.approx(1 - h(0.05))
    assert np.all(np.diff(c.values) >= -1e-12)
    assert len(c.samples) == 51


def test_lower_bound_continuous_across_branch_threshold():
    q, W = 0.1, bsc(0.05)
    ds = lossy_threshold(q)
    a = lossy_bounds(LossyProblem(q, W, 1.0, ds - 1e-9)).lower
    b = lossy_bounds(LossyProblem(q, W, 1.0, ds + 1e-9)).lower
    assert a == pytest.approx(b, abs=1e-6)


def test_lower_bound_monotone_in_distortion():
    vals = [lossy_bounds(LossyProblem(0.2, bsc(0.05), 1.0, d)).lower for d in np.linspace(0, 0.5, 26)]
    assert np.all(np.diff(vals) >= -1e-10)


def test_source_exponent_convex():
    q, d = 0.3, 0.1
    R = np.linspace(rate_distortion_binary(q, d) + 1e-3, 0.98 * (1 - h(d)), 200)
    F = lossy_source_exponent_vec(q, d, R)
    assert np.all(np.diff(F, 2) >= -1e-10)
