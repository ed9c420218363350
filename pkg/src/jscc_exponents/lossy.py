"""Excess-distortion exponent bounds for a binary source under Hamming distortion."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import BoundReport, Tightness, RATE_TOL, _dual_max, _raw_max, _sup_search
from .channel import RHO_CAP, as_channel, channel_profile
from .probability import (
    UNBOUNDED,
    ChannelSpec,
    SourceSpec,
    ValidationError,
    binary_divergence,
    binary_entropy,
    is_unbounded,
    tilted_entropy,
    tilted_entropy_root,
)
from .source import gallager_source_fn, source_exponent_vec


def _check_q_delta(q, delta):
    if not (0.0 < q <= 0.5):
        raise ValidationError(f"q must lie in (0, 1/2], got {q!r}")
    if not (0.0 <= delta <= 0.5):
        raise ValidationError(f"delta must lie in [0, 1/2], got {delta!r}")


@dataclass(frozen=True)
class LossyProblem:
    q: float
    channel: ChannelSpec
    t: float
    delta: float

    def __post_init__(self):
        _check_q_delta(self.q, self.delta)
        object.__setattr__(self, "channel", as_channel(self.channel))
        if not (self.t > 0 and math.isfinite(self.t)):
            raise ValidationError(f"t must be a positive number, got {self.t!r}")

    @property
    def source(self) -> SourceSpec:
        return SourceSpec([self.q, 1.0 - self.q])


def rate_distortion_binary(q: float, delta: float) -> float:
    """R(Q, Delta) = h_b(q) - h_b(Delta) for Delta <= q, else 0."""
    _check_q_delta(q, delta)
    return float(binary_entropy(q) - binary_entropy(delta)) if delta <= q else 0.0


def es_delta(q: float, delta: float, rho):
    """E_s^Delta(rho, Q) = E_s(rho, Q) - rho h_b(Delta)."""
    _check_q_delta(q, delta)
    return gallager_source_fn(SourceSpec([q, 1 - q]), rho) - np.asarray(rho) * binary_entropy(delta)


def rho_zero(q: float, delta: float) -> float:
    """0 when q >= Delta, else the root of H(Q^(rho)) = h_b(Delta) (inf at Delta = 1/2)."""
    _check_q_delta(q, delta)
    if q >= delta:
        return 0.0
    r = tilted_entropy_root(SourceSpec([q, 1 - q]), float(binary_entropy(delta)))
    return math.inf if is_unbounded(r) else float(r)


def lossy_source_exponent_vec(q: float, delta: float, R):
    """F(R, Q, Delta) over an array of rates; inf above 1 - h_b(Delta)."""
    _check_q_delta(q, delta)
    R = np.asarray(R, dtype=float)
    hd = float(binary_entropy(delta))
    out = np.zeros(R.shape)
    mid = R > rate_distortion_binary(q, delta)
    # the sup over rho >= rho_0 is attained inside, where it equals e(R + h_b(Delta), Q)
    out[mid] = source_exponent_vec(SourceSpec([q, 1 - q]), R[mid] + hd)
    out[R > 1.0 - hd] = np.inf
    return out


def lossy_source_exponent(q: float, delta: float, R: float):
    v = float(lossy_source_exponent_vec(q, delta, np.array([R]))[0])
    return UNBOUNDED if math.isinf(v) else v


@dataclass(frozen=True)
class LossySourceCurve:
    rates: np.ndarray
    values: np.ndarray
    rho_zero: float
    rd_value: float

    @property
    def samples(self):
        return list(zip(self.rates.tolist(), self.values.tolist()))


def lossy_source_curve(q: float, delta: float, n: int = 201) -> LossySourceCurve:
    top = 1.0 - float(binary_entropy(delta))
    R = np.linspace(0.0, top, n)
    return LossySourceCurve(R, lossy_source_exponent_vec(q, delta, R), rho_zero(q, delta),
                            rate_distortion_binary(q, delta))


def lossy_threshold(q: float) -> float:
    """Distortion level sqrt(q) / (sqrt(q) + sqrt(1 - q)) at which rho_0 reaches 1."""
    return math.sqrt(q) / (math.sqrt(q) + math.sqrt(1 - q))


def lossy_bounds(p: LossyProblem, rho_step: float = 1e-3, rho_max: float = RHO_CAP,
                 rate_tol: float = RATE_TOL) -> BoundReport:
    """Random-coding lower and sphere-packing upper bounds on the excess-distortion exponent.

    Tightness uses the lossless test transplanted to the distortion setting
    (maximizer at rho <= 1) and is marked as such in the notes.
    """
    q, t, d = p.q, p.t, p.delta
    Q = p.source
    hd = float(binary_entropy(d))
    prof = channel_profile(p.channel, rho_step)
    rd = rate_distortion_binary(q, d)
    notes = ["tightness by analogy with the lossless test"]
    if t * rd >= prof.capacity:
        return BoundReport(0.0, 0.0, 0.0, None, 0.0, 0.0, None, t * rd, t * rd, None, Tightness.ZERO, 0.0,
                           converged=prof.converged, notes=["t R(Q, Delta) >= C"])

    def g(r):
        return t * (gallager_source_fn(Q, r) - np.asarray(r) * hd)

    r0 = rho_zero(q, d)
    below = d < lossy_threshold(q)
    if below:
        lo, r_lo = _dual_max(prof, g, r0, 1.0)
        gal = _raw_max(prof, g, r0, 1.0)
    else:
        lo, r_lo = t * float(binary_divergence(d, q)) + prof.e0(1.0), 1.0
        gal = lo
    lo, gal = max(lo, 0.0), max(min(gal, lo), 0.0)
    cap_hit = False
    if prof.r_infinity > t * (1.0 - hd) or math.isinf(r0):
        up, r_up, Rup = UNBOUNDED, math.inf, t * (1.0 - hd)
    else:
        up, r_up, cap_hit = _sup_search(prof, g, r0, rho_max)
        up, Rup = max(up, 0.0), t * (tilted_entropy(Q, r_up) - hd)
    rcr = prof.critical_rate()
    exact = below and t * (tilted_entropy(Q, 1.0) - hd) >= rcr - rate_tol
    if exact and not is_unbounded(up) and abs(up - lo) <= 1e-8:
        lo = up
    Rlo = t * (tilted_entropy(Q, r_lo) - hd)
    if cap_hit:
        notes.append("sphere-packing maximizer reached the rho cap")
    return BoundReport(lo, up, gal, None, r_up, r_lo, None, Rup, Rlo, None,
                       Tightness.EXACT if exact else Tightness.BRACKETED, up if exact else None,
                       rho_cap_hit=cap_hit, converged=prof.converged, notes=notes)


def lossy_primal_oracle(p: LossyProblem, which: str = "sp", step: float | None = None, rho_step: float = 1e-3):
    """Grid minimum over R in (0, t(1 - h_b(Delta))] of t F(R/t) + E_r or E_sp."""
    prof = channel_profile(p.channel, rho_step)
    t = p.t
    top = t * (1.0 - float(binary_entropy(p.delta)))
    step = 1e-4 * t if step is None else step
    n = max(int(math.ceil(top / step)), 2)
    # the infimum may sit at R -> 0+, so include a rate just above zero
    R = np.r_[1e-12 * t, np.linspace(top / n, top, n)]
    src = t * lossy_source_exponent_vec(p.q, p.delta, R / t)
    x, y = prof.samples(1.0 if which == "rc" else 1024.0)
    ch = np.empty_like(R)
    for i in range(0, len(R), 512):
        blk = R[i:i + 512]
        ch[i:i + 512] = np.max(y[None, :] - x[None, :] * blk[:, None], axis=1)
    ch = np.maximum(ch, 0.0)
    tot = src + ch
    k = int(np.argmin(tot))
    return float(tot[k]), float(R[k])
