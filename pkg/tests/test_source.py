import math

import numpy as np
import pytest
from scipy.optimize import brentq, minimize_scalar

from jscc_exponents.probability import SourceSpec, binary_divergence, binary_entropy, entropy, is_unbounded
from jscc_exponents.source import (
    gallager_source_fn,
    source_critical_rate,
    source_error_exponent,
    source_exponent_curve,
    source_exponent_vec,
    source_fn_derivative,
)

Q2 = SourceSpec([0.1, 0.9])
Q3 = SourceSpec([0.6, 0.3, 0.1])


def test_es_direct_sum():
    for r in [0.0, 0.3, 1.0, 5.0]:
        ref = (1 + r) * math.log2(sum(q ** (1 / (1 + r)) for q in Q3.probs))
        assert gallager_source_fn(Q3, r) == pytest.approx(ref, abs=1e-14)


def test_es_derivative_is_tilted_entropy():
    h = 1e-6
    for r in [0.2, 1.0, 3.0]:
        fd = (gallager_source_fn(Q3, r + h) - gallager_source_fn(Q3, r - h)) / (2 * h)
        assert source_fn_derivative(Q3, r) == pytest.approx(fd, abs=1e-8)


def test_es_limits():
    assert gallager_source_fn(Q3, 0.0) == 0.0
    # E_s grows like rho log|S| once the tilt is nearly uniform
    big = gallager_source_fn(Q3, 1e6) / 1e6
    assert big == pytest.approx(math.log2(3), rel=1e-5)


def test_binary_exponent_frozen():
    # 40-digit evaluation of min over h_b(p) = R of D(p || q)
    assert source_error_exponent(Q2, 0.8) == pytest.approx(0.1223070850808856, abs=1e-12)


def test_ternary_exponent_frozen():
    # 40-digit Legendre transform of E_s
    assert source_error_exponent(Q3, 1.4) == pytest.approx(0.014652257973245262, abs=1e-12)


def test_binary_exponent_boundary_oracle():
    for R in np.linspace(0.5, 0.99, 8):
        p = brentq(lambda p: binary_entropy(p) - R, 0.1, 0.5, xtol=1e-15)
        assert source_error_exponent(Q2, R) == pytest.approx(binary_divergence(p, 0.1), abs=1e-11)


def test_exponent_is_legendre_transform():
    for R in [1.35, 1.45, 1.55]:
        res = minimize_scalar(lambda r: -(r * R - gallager_source_fn(Q3, r)), bounds=(0, 200), method="bounded",
                              options={"xatol": 1e-12})
        assert source_error_exponent(Q3, R) == pytest.approx(-res.fun, abs=1e-9)


def test_exponent_regimes():
    assert source_error_exponent(Q3, 0.5) == 0.0
    assert source_error_exponent(Q3, entropy(Q3)) == 0.0
    top = source_error_exponent(Q3, math.log2(3))
    assert top == pytest.approx(np.sum(np.log2((1 / 3) / Q3.probs)) / 3, abs=1e-12)
    assert is_unbounded(source_error_exponent(Q3, 1.6))


def test_exponent_convex_increasing():
    R = np.linspace(entropy(Q3), math.log2(3), 400)
    e = source_exponent_vec(Q3, R)
    assert np.all(np.diff(e) >= -1e-15)
    assert np.all(np.diff(e, 2) >= -1e-9)


def test_source_critical_rate_closed_form():
    # H of the sqrt-tilt of {0.1, 0.9}; 40-digit value
    assert source_critical_rate(Q2) == pytest.approx(0.81127812445913286, abs=1e-13)


def test_curve_samples():
    c = source_exponent_curve(Q2, n=11)
    assert len(c.samples) == 11 and c.rates[-1] == 1.0
    assert c.values[0] == 0.0 and np.isfinite(c.values[-1])
