import math

import numpy as np
import pytest

from jscc_exponents.bounds import (
    JsccProblem,
    Tightness,
    classify,
    expurgated_bound,
    gallager_bound,
    primal_oracle,
    random_coding_bound,
    sphere_packing_bound,
    symmetric_exact,
)
from jscc_exponents.channel import channel_profile
from jscc_exponents.channels import bec, bsc, gallager_6x4
from jscc_exponents.probability import SourceSpec, ValidationError, entropy, is_unbounded
from jscc_exponents.source import source_critical_rate


def binary(q):
    return SourceSpec([q, 1 - q])


def test_exact_value_frozen():
    # 40-digit stationary point of E0(rho) - t E_s(rho) for BSC sources/channels
    rep = classify(JsccProblem(binary(0.1), bsc(0.1), 1.0))
    assert rep.tightness is Tightness.EXACT
    assert rep.exact_value == pytest.approx(0.0015663435670228693, abs=1e-10)
    assert rep.rho_bar_star == pytest.approx(0.051074045255618817, abs=1e-6)
    rep = classify(JsccProblem(binary(0.1), bsc(0.02), 0.75))
    assert rep.exact_value == pytest.approx(0.16016885947146766, abs=1e-10)
    assert rep.rho_bar_star == pytest.approx(0.6874517292786284, abs=1e-6)


def test_symmetric_exact_agrees_with_classify():
    for q, eps, t in ((0.1, 0.1, 1.0), (0.1, 0.02, 0.75), (0.2, 0.01, 1.25)):
        p = JsccProblem(binary(q), bsc(eps), t)
        se = symmetric_exact(p)
        rep = classify(p)
        assert se.failed is None and rep.tightness is Tightness.EXACT
        assert se.value == pytest.approx(rep.exact_value, abs=1e-9)


def test_symmetric_exact_failure_modes():
    assert symmetric_exact(JsccProblem(binary(0.4), bsc(0.2), 2.0)).failed == "co1"
    assert symmetric_exact(JsccProblem(binary(0.05), bsc(0.001), 0.5)).failed == "co2"
    assert symmetric_exact(JsccProblem(binary(0.1), gallager_6x4(0.01), 1.0)).failed == "not symmetric"


def random_problem(rng):
    ns, nx, ny = rng.integers(2, 4, size=3)
    W = rng.dirichlet(0.8 * np.ones(ny), size=nx)
    z = rng.normal(size=ns)
    Q = np.exp(z) / np.exp(z).sum()
    C = channel_profile(W).capacity
    t = float(rng.uniform(0.3, 0.9) * C / entropy(SourceSpec(Q)))
    return JsccProblem(SourceSpec(Q), W, t)


@pytest.mark.parametrize("seed", range(4))
def test_dual_forms_match_primal_grid(seed):
    p = random_problem(np.random.default_rng(seed))
    lo, _, _ = random_coding_bound(p)
    up, _, _ = sphere_packing_bound(p)
    lo_ref, _ = primal_oracle(p, "rc", step=1e-5 * p.t)
    up_ref, _ = primal_oracle(p, "sp", step=1e-5 * p.t)
    # both sides are discretized: rates on a grid, rho on the sample grid
    assert lo == pytest.approx(lo_ref, abs=1e-5)
    assert up == pytest.approx(up_ref, abs=1e-5)
    assert gallager_bound(p) <= lo + 1e-12


def test_bracketed_ordering_and_expurgated():
    p = JsccProblem(binary(0.1), bsc(0.001), 0.5)
    rep = classify(p)
    assert rep.tightness is Tightness.BRACKETED
    assert rep.lower_rc < rep.upper_sp
    rex = channel_profile(bsc(0.001)).expurgated_rate()
    assert rep.expurgated_improves == (0.5 * source_critical_rate(binary(0.1)) < rex)
    ex = expurgated_bound(p)
    assert ex[3] == "verified"
    ref, _ = primal_oracle(p, "ex", step=1e-5 * p.t)
    assert ex[0] == pytest.approx(ref, abs=1e-5)
    assert rep.lower <= rep.upper_sp


def test_zero_exponent():
    rep = classify(JsccProblem(binary(0.3), bsc(0.2), 2.0))
    assert rep.tightness is Tightness.ZERO
    assert rep.lower == rep.upper == 0.0


def test_sphere_packing_unbounded_when_rate_below_r_infinity():
    ring = np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]])
    rep = classify(JsccProblem(binary(0.2), ring, 0.5))
    assert is_unbounded(rep.upper_sp)
    assert rep.lower_rc > 0


def test_bec_exact_matches_primal():
    p = JsccProblem(binary(0.15), bec(0.2), 1.0)
    rep = classify(p)
    ref, _ = primal_oracle(p, "sp", step=1e-5)
    assert rep.tightness is Tightness.EXACT
    assert rep.exact_value == pytest.approx(ref, abs=1e-5)


def test_rate_tolerance_moves_the_boundary():
    # just below the exact threshold, a generous tolerance flips the class
    Q = binary(0.1)
    rcr = channel_profile(bsc(0.05)).critical_rate()
    t = 0.999 * rcr / source_critical_rate(Q)
    p = JsccProblem(Q, bsc(0.05), t)
    assert classify(p).tightness is Tightness.BRACKETED
    assert classify(p, rate_tol=1e-2).tightness is Tightness.EXACT


def test_validation():
    with pytest.raises(ValidationError):
        classify(JsccProblem(binary(0.5), bsc(0.1), 1.0))
    with pytest.raises(ValidationError):
        JsccProblem(binary(0.1), bsc(0.1), 0.0)
    with pytest.raises(ValidationError):
        JsccProblem(binary(0.1), bsc(0.1), math.inf)
    with pytest.raises(ValidationError):
        classify(JsccProblem(binary(0.1), bsc(0.1), 1.0), rho_max=0.5)
    with pytest.raises(ValueError):
        primal_oracle(JsccProblem(binary(0.1), bsc(0.1), 1.0), "xx")


def test_report_dict():
    d = classify(JsccProblem(binary(0.1), bsc(0.1), 1.0)).to_dict()
    assert d["tightness"] == "Exact"
    assert d["lower"] == d["lower_rc"]
