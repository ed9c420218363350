"""Gallager source function E_s(rho, Q) and the source error exponent e(R, Q)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .probability import (
    LN2,
    UNBOUNDED,
    SourceSpec,
    ValidationError,
    entropy,
    tilted_entropy,
    tilted_entropy_root_vec,
    _lse,
    _tilt_rows,
)


def gallager_source_fn(Q: SourceSpec, rho):
    """E_s(rho, Q) = (1 + rho) log sum_s Q(s)^{1/(1+rho)}, vectorized over rho."""
    r = np.asarray(rho, dtype=float)
    if np.any(r < 0):
        raise ValidationError(f"rho must be nonnegative, got {rho!r}")
    rr = np.atleast_1d(r)
    out = (1.0 + rr) * _lse(np.log(Q.probs)[None, :] / (1.0 + rr[:, None]), axis=1) / LN2
    return out.reshape(r.shape) if r.ndim else float(out[0])


def source_fn_derivative(Q: SourceSpec, rho):
    """dE_s/drho = H(Q^(rho))."""
    return tilted_entropy(Q, rho)


def _divergence_rows(P, q):
    return np.sum(P * np.log2(P / q[None, :]), axis=1)


def source_exponent_vec(Q: SourceSpec, R):
    """e(R, Q) for an array of rates; inf above log|S|."""
    R = np.asarray(R, dtype=float)
    flat = np.atleast_1d(R).ravel()
    H0 = entropy(Q)
    top = math.log2(Q.alphabet_size)
    out = np.zeros_like(flat)
    out[flat > top] = np.inf
    mid = (flat > H0) & (flat <= top)
    if mid.any():
        if Q.is_uniform():
            out[mid] = 0.0
        else:
            rho = tilted_entropy_root_vec(Q, np.minimum(flat[mid], top))
            rho[flat[mid] >= top] = np.inf  # the uniform tilt, not a huge finite one
            fin = np.isfinite(rho)
            vals = np.empty(rho.shape)
            if fin.any():
                vals[fin] = _divergence_rows(_tilt_rows(np.log(Q.probs), rho[fin]), Q.probs)
            if (~fin).any():
                u = np.full(Q.alphabet_size, 1.0 / Q.alphabet_size)
                vals[~fin] = float(np.sum(u * np.log2(u / Q.probs)))
            out[mid] = np.maximum(vals, 0.0)
    return out.reshape(R.shape) if R.ndim else float(out[0])


def source_error_exponent(Q: SourceSpec, R: float):
    """e(R, Q): zero up to H(Q), D(Q^(rho*)||Q) up to log|S|, UNBOUNDED beyond."""
    v = source_exponent_vec(Q, float(R))
    return UNBOUNDED if math.isinf(v) else v


def source_critical_rate(Q: SourceSpec) -> float:
    """R_cr^(s)(Q) = H(Q^(1))."""
    return tilted_entropy(Q, 1.0)


@dataclass(frozen=True)
class SourceExponentCurve:
    rates: np.ndarray
    values: np.ndarray
    entropy: float
    log_size: float

    @property
    def samples(self):
        return list(zip(self.rates.tolist(), self.values.tolist()))


def source_exponent_curve(Q: SourceSpec, n: int = 201, r_lo: float = 0.0) -> SourceExponentCurve:
    """Samples of e(R, Q) on [r_lo, log|S|]; sampling stops at log|S|."""
    top = math.log2(Q.alphabet_size)
    R = np.linspace(r_lo, top, n)
    return SourceExponentCurve(R, source_exponent_vec(Q, R), entropy(Q), top)
