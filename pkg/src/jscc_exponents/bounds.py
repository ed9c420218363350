"""Dual-form (Fenchel) bounds on the JSCC error exponent and the exactness test."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np

from .channel import RHO_CAP, ChannelProfile, as_channel, channel_profile
from .optimize import bracketed_max, golden_max
from .probability import (
    UNBOUNDED,
    ChannelSpec,
    SourceSpec,
    ValidationError,
    entropy,
    is_unbounded,
    tilted_entropy,
)
from .source import gallager_source_fn, source_critical_rate, source_exponent_vec

RATE_TOL = 1e-6  # tolerance when comparing rates for the exactness test


@dataclass(frozen=True)
class JsccProblem:
    source: SourceSpec
    channel: ChannelSpec
    t: float

    def __post_init__(self):
        if not isinstance(self.source, SourceSpec):
            object.__setattr__(self, "source", SourceSpec(self.source))
        object.__setattr__(self, "channel", as_channel(self.channel))
        if not (self.t > 0 and math.isfinite(self.t)):
            raise ValidationError(f"t must be a positive number, got {self.t!r}")
        object.__setattr__(self, "t", float(self.t))


class Tightness(str, Enum):
    ZERO = "ZeroExponent"
    EXACT = "Exact"
    BRACKETED = "Bracketed"


@dataclass
class BoundReport:
    lower_rc: float
    upper_sp: object  # float or UNBOUNDED
    lower_gallager: float
    lower_ex: float | None
    rho_bar_star: float
    rho_under_star: float
    rho_under_x: float | None
    R_bar_m: float
    R_under_m: float
    R_under_xm: float | None
    tightness: Tightness
    exact_value: float | None
    expurgated_improves: bool | None = None
    expurgated_hypothesis: str = "n/a"  # "verified" (equidistant), "assumed", or "n/a"
    rho_cap_hit: bool = False
    converged: bool = True
    notes: list = field(default_factory=list)

    @property
    def lower(self) -> float:
        """Best available lower bound."""
        if self.lower_ex is not None and self.expurgated_improves:
            return max(self.lower_rc, self.lower_ex)
        return self.lower_rc

    @property
    def upper(self):
        return self.upper_sp

    def to_dict(self) -> dict:
        d = asdict(self)
        d["tightness"] = self.tightness.value
        d["lower"] = self.lower
        return d


def _require_nonuniform(Q: SourceSpec):
    if Q.is_uniform():
        raise ValidationError(
            "source is uniform; lossless bounds assume a nonuniform source (use the lossy mode for uniform sources)"
        )


def _source_terms(p: JsccProblem):
    Q, t = p.source, p.t

    def g(r):
        return t * gallager_source_fn(Q, r)

    return g


def _dual_max(prof: ChannelProfile, g, lo: float, hi: float):
    """max over [lo, hi] of T(rho) - g(rho), T the concave hull of E0 on [0, hi]; returns (value, rho)."""
    if prof.symmetric is not None:
        e0 = prof.symmetric.e0
        parts = [np.linspace(lo, max(lo, min(hi, 1.0)), 65)]
        if hi > 1.0:
            parts.append(np.geomspace(max(lo, 1.0), hi, 65))
        grid = np.unique(np.concatenate(parts))
        x, v = bracketed_max(lambda r: e0(r) - g(r), grid, 1e-10, fvec=lambda r: e0(r) - g(r))
        return v, x
    H = prof.hull(hi)
    knots = H.x[(H.x > lo) & (H.x < hi)]
    grid = np.unique(np.concatenate([[lo], knots, [hi]]))
    x, v = bracketed_max(lambda r: prof.t_value(r, hi) - g(r), grid, 1e-10, fvec=lambda r: H(r) - g(r))
    return v, x


def _check_cap(rho_max):
    if not (1.0 <= rho_max <= RHO_CAP):
        raise ValidationError(f"rho_max must lie in [1, {RHO_CAP:g}], got {rho_max!r}")
    return float(rho_max)


def _sup_search(prof: ChannelProfile, g, lo: float = 0.0, rho_max: float = RHO_CAP):
    """sup over rho >= lo of T_sp - g with the rho range doubled until the maximizer is interior."""
    cap = _check_cap(rho_max)
    hi = min(max(8.0, 2.0 * lo), cap)
    while True:
        v, r = _dual_max(prof, g, lo, min(hi, cap))
        if r <= 0.5 * hi:
            return v, r, False
        if hi >= cap:
            return v, r, True
        hi *= 2.0


def _raw_max(prof: ChannelProfile, g, lo: float, hi: float) -> float:
    """max over [lo, hi] of the raw E0 - g."""
    if prof.symmetric is not None:
        return _dual_max(prof, g, lo, hi)[0]
    x, y = prof.samples(hi)
    m = (x >= lo) & (x <= hi)
    x, y = x[m], y[m]
    if x.size == 0 or x[0] > lo:
        x, y = np.r_[lo, x], np.r_[prof.e0(lo), y]
    return bracketed_max(lambda r: prof.e0(r) - g(r), x, 1e-10, fvec=lambda r: y - g(r))[1]


def random_coding_bound(p: JsccProblem, rho_step: float = 1e-3):
    """(max_{0<=rho<=1} [T_r(rho) - t E_s(rho, Q)], rho_under_star, R_under_m)."""
    _require_nonuniform(p.source)
    prof = channel_profile(p.channel, rho_step)
    if p.t * entropy(p.source) >= prof.capacity:
        return 0.0, 0.0, p.t * entropy(p.source)
    v, r = _dual_max(prof, _source_terms(p), 0.0, 1.0)
    return max(v, 0.0), r, p.t * tilted_entropy(p.source, r)


def _sp_search(prof, p, rho_max=RHO_CAP):
    return _sup_search(prof, _source_terms(p), 0.0, rho_max)


def sphere_packing_bound(p: JsccProblem, rho_step: float = 1e-3, rho_max: float = RHO_CAP):
    """(sup_{rho>=0} [T_sp(rho) - t E_s(rho, Q)], rho_bar_star, R_bar_m); UNBOUNDED if t log|S| <= R_inf."""
    _require_nonuniform(p.source)
    prof = channel_profile(p.channel, rho_step)
    tH = p.t * entropy(p.source)
    if tH >= prof.capacity:
        return 0.0, 0.0, tH
    if p.t * math.log2(p.source.alphabet_size) <= prof.r_infinity:
        return UNBOUNDED, math.inf, p.t * math.log2(p.source.alphabet_size)
    v, r, _ = _sp_search(prof, p, rho_max)
    return max(v, 0.0), r, p.t * tilted_entropy(p.source, r)


def gallager_bound(p: JsccProblem, rho_step: float = 1e-3) -> float:
    """max_{0<=rho<=1} [E0(rho, W) - t E_s(rho, Q)] on raw (un-hulled) E0."""
    prof = channel_profile(p.channel, rho_step)
    return max(_raw_max(prof, _source_terms(p), 0.0, 1.0), 0.0)


def expurgated_bound(p: JsccProblem, rho_step: float = 1e-3):
    """(sup_{rho>=1} [E_x(rho, W) - t E_s(rho, Q)], rho_under_x, R_under_xm, hypothesis) or None when C0 > 0."""
    prof = channel_profile(p.channel, rho_step)
    if not prof.c0_is_zero:
        return None
    g = _source_terms(p)
    xs, ys, _, approx = prof.ex_samples()
    vals = ys - g(xs)
    k = int(np.argmax(vals))
    lo, hi = float(xs[max(k - 1, 0)]), float(xs[min(k + 1, len(xs) - 1)])
    r, v = golden_max(lambda r: prof.ex_value(r) - g(r), lo, hi, 1e-10)
    if vals[k] > v:
        r, v = float(xs[k]), float(vals[k])
    hyp = "assumed" if approx else "verified"
    return v, r, p.t * tilted_entropy(p.source, r), hyp


def classify(p: JsccProblem, rho_step: float = 1e-3, expurgated: bool = True,
             rho_max: float = RHO_CAP, rate_tol: float = RATE_TOL) -> BoundReport:
    """Bounds and tightness class for a lossless problem."""
    _require_nonuniform(p.source)
    prof = channel_profile(p.channel, rho_step)
    Q, t = p.source, p.t
    tH = t * entropy(Q)
    if tH >= prof.capacity:
        return BoundReport(0.0, 0.0, 0.0, None, 0.0, 0.0, None, tH, tH, None, Tightness.ZERO, 0.0,
                           converged=prof.converged, notes=["tH(Q) >= C"])
    lo, r_lo, Rlo = random_coding_bound(p, rho_step)
    gal = gallager_bound(p, rho_step)
    if t * math.log2(Q.alphabet_size) <= prof.r_infinity:
        up, r_up, Rup, cap_hit = UNBOUNDED, math.inf, t * math.log2(Q.alphabet_size), False
    else:
        up, r_up, cap_hit = _sp_search(prof, p, rho_max)
        up, Rup = max(up, 0.0), t * tilted_entropy(Q, r_up)
    rcr = prof.critical_rate()
    trs = t * source_critical_rate(Q)
    notes = []
    if trs >= rcr - rate_tol:
        tight, exact = Tightness.EXACT, up
        if not is_unbounded(up):
            lo = max(lo, up) if abs(up - lo) <= 1e-8 else lo
    else:
        tight, exact = Tightness.BRACKETED, None
    if cap_hit:
        notes.append("sphere-packing maximizer reached the rho cap")
    rep = BoundReport(lo, up, min(gal, lo), None, r_up, r_lo, None, Rup, Rlo, None, tight, exact,
                      rho_cap_hit=cap_hit, converged=prof.converged, notes=notes)
    if expurgated and tight is Tightness.BRACKETED and prof.c0_is_zero:
        rex = prof.expurgated_rate()
        rep.expurgated_improves = bool(trs < rex)
        ex = expurgated_bound(p, rho_step)
        if ex is not None:
            rep.lower_ex, rep.rho_under_x, rep.R_under_xm, rep.expurgated_hypothesis = ex
    return rep


def primal_oracle(p: JsccProblem, which: str = "sp", step: float | None = None, rho_step: float = 1e-3):
    """Grid minimum over R in [tH(Q), t log|S|] of t e(R/t, Q) + E(R, W); returns (value, argmin R).

    ``which`` selects E_r ("rc"), E_sp ("sp") or E_ex ("ex"); channel exponents are
    maxima of raw samples of E0 (or E_x) minus rho R.
    """
    prof = channel_profile(p.channel, rho_step)
    Q, t = p.source, p.t
    step = 1e-4 * t if step is None else step
    lo, hi = t * entropy(Q), t * math.log2(Q.alphabet_size)
    R = np.linspace(lo, hi, max(int(math.ceil((hi - lo) / step)) + 1, 2))
    src = t * source_exponent_vec(Q, R / t)
    if which == "rc":
        x, y = prof.samples(1.0)
    elif which == "sp":
        # stop once the hull slope falls below the smallest rate on the grid
        top = 8.0
        while top < RHO_CAP and prof.hull(top).slopes[-1] > lo:
            top = min(2.0 * top, RHO_CAP)
        x, y = prof.samples(top)
    elif which == "ex":
        x, y, _, _ = prof.ex_samples()
    else:
        raise ValueError(f"unknown exponent {which!r}")
    ch = np.empty_like(R)
    for i in range(0, len(R), 512):
        blk = R[i:i + 512]
        ch[i:i + 512] = np.max(y[None, :] - x[None, :] * blk[:, None], axis=1)
    ch = np.maximum(ch, 0.0)
    if which == "sp":
        ch[R <= prof.r_infinity] = np.inf
    tot = src + ch
    k = int(np.argmin(tot))
    return float(tot[k]), float(R[k])


@dataclass(frozen=True)
class SymmetricExact:
    value: float | None
    rho: float | None
    failed: str | None  # "co1", "co2" or None


def symmetric_exact(p: JsccProblem, rho_step: float = 1e-3) -> SymmetricExact:
    """Closed-form exponent for symmetric channels by bisection on the stationarity equation."""
    prof = channel_profile(p.channel, rho_step)
    sym = prof.symmetric
    if sym is None:
        return SymmetricExact(None, None, "not symmetric")
    Q, t = p.source, p.t
    if t * entropy(Q) >= sym.capacity:
        return SymmetricExact(0.0, 0.0, "co1")

    def lhs(r):
        # t H(Q^(rho)) - E0'(rho); increasing in rho
        return t * tilted_entropy(Q, r) - sym.e0_derivative(r)

    if lhs(1.0) < 0:
        return SymmetricExact(None, None, "co2")
    a, b = 0.0, 1.0
    for _ in range(200):
        m = 0.5 * (a + b)
        if lhs(m) < 0:
            a = m
        else:
            b = m
        if b - a <= 1e-15:
            break
    r = 0.5 * (a + b)
    return SymmetricExact(float(sym.e0(r) - t * gallager_source_fn(Q, r)), r, None)
