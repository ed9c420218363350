"""Tandem (separate) coding exponent and how it compares with the joint exponent."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .bounds import JsccProblem, Tightness, classify
from .channel import (
    NumericalError,
    channel_profile,
    e_ex_zero,
    expurgated_exponent,
    random_coding_exponent,
    sphere_packing_exponent,
)
from .probability import (
    SourceSpec,
    as_float,
    entropy,
    is_unbounded,
    kl_divergence,
    tilted_entropy,
    tilted_entropy_root,
    tilted_source,
)
from .source import gallager_source_fn, source_critical_rate, source_exponent_vec

BISECT_TOL = 1e-13


@lru_cache(maxsize=4096)
def _classify(p: JsccProblem, rho_step: float):
    return classify(p, rho_step)


def _te(Q: SourceSpec, t: float, R: float) -> float:
    return float(t * source_exponent_vec(Q, np.array([R / t]))[0])


def gamma_tilt(Q: SourceSpec, t: float, rcr: float) -> float:
    """gamma with t H(Q^(gamma)) = R_cr, or 0 when tH(Q) > R_cr; inf when R_cr >= t log|S|."""
    if t * entropy(Q) > rcr:
        return 0.0
    if rcr >= t * math.log2(Q.alphabet_size):
        return math.inf
    return float(tilted_entropy_root(Q, rcr / t))


def source_exponent_at_gamma(Q: SourceSpec, gamma: float, t: float) -> float:
    """t D(Q^(gamma) || Q); gamma = inf gives the uniform tilt."""
    return float(t * kl_divergence(tilted_source(Q, gamma).probs, Q.probs))


def _intersection(Q, t, E, hi):
    """Rate in [tH(Q), hi] where t e(R/t, Q) meets the nonincreasing E."""
    a, b = t * entropy(Q), hi

    def f(R):
        e = E(R)
        # an unbounded channel exponent only needs the right sign
        return -1e6 if is_unbounded(e) else _te(Q, t, R) - e

    fa, fb = f(a), f(b)
    if fa > 0.0:
        raise NumericalError("source exponent starts above the channel exponent")
    if fb < 0.0:
        return None
    if fb == 0.0:
        return b
    return float(brentq(f, a, b, xtol=BISECT_TOL, rtol=4 * np.finfo(float).eps))


@dataclass
class TandemReport:
    E_T_value: float | None
    E_T_lower: float
    E_T_upper: float
    R_o: float | None
    R_s: float
    gamma: float
    intersects: bool
    E_J_value: float | None = None
    E_J_lower: float | None = None
    E_J_upper: object = None
    ratio: float | None = None
    ratio_is_lower_bound: bool = False
    not_applicable: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def tandem_exponent(p: JsccProblem, rho_step: float = 1e-3) -> TandemReport:
    """sup_R min{t e(R/t, Q), E(R, W)}, exact when the crossing sits at or above R_cr."""
    Q, t, W = p.source, p.t, p.channel
    prof = channel_profile(W, rho_step)
    C, rcr = prof.capacity, prof.critical_rate()
    tlog = t * math.log2(Q.alphabet_size)
    gam = gamma_tilt(Q, t, rcr)
    if t * entropy(Q) >= C:
        return TandemReport(0.0, 0.0, 0.0, t * entropy(Q), t * entropy(Q), gam, True)

    def Esp(R):
        return sphere_packing_exponent(W, R, rho_step)

    def Elo(R):
        v = random_coding_exponent(W, R, rho_step)
        if prof.c0_is_zero:
            v = max(v, expurgated_exponent(W, R, rho_step))
        return v

    hi = min(tlog, C)
    Rs = _intersection(Q, t, Esp, hi)
    if Rs is None:
        # no crossing: E_T = E(t log|S|, W)
        up = as_float(Esp(tlog))
        lo = Elo(tlog)
        exact = tlog >= rcr
        return TandemReport(up if exact else None, up if exact else lo, up, tlog if exact else None,
                            tlog, gam, False)
    up = _te(Q, t, Rs)
    if Rs >= rcr:
        return TandemReport(up, up, up, Rs, Rs, gam, True)
    Rl = _intersection(Q, t, Elo, hi)
    lo = _te(Q, t, Rl) if Rl is not None else Elo(tlog)
    if t * source_critical_rate(Q) >= rcr and math.isfinite(gam):
        up = min(source_exponent_at_gamma(Q, gam, t), up)
    return TandemReport(None, lo, up, None, Rs, gam, True)


def ratio_report(p: JsccProblem, rho_step: float = 1e-3) -> TandemReport:
    """E_J / E_T, or a lower bound on it (never below 1); N/A when tH(Q) >= C."""
    rep = _classify(p, rho_step)
    tr = tandem_exponent(p, rho_step)
    tr.E_J_lower, tr.E_J_upper = rep.lower, rep.upper
    if rep.tightness is Tightness.ZERO:
        tr.not_applicable = True
        tr.E_J_value = 0.0
        return tr
    exact_j = rep.tightness is Tightness.EXACT
    tr.E_J_value = as_float(rep.exact_value) if exact_j else None
    if exact_j and tr.E_T_value is not None:
        tr.ratio = tr.E_J_value / tr.E_T_value
        return tr
    num = tr.E_J_value if exact_j else rep.lower
    den = tr.E_T_value if tr.E_T_value is not None else tr.E_T_upper
    tr.ratio = max(1.0, num / den)
    tr.ratio_is_lower_bound = True
    return tr


@dataclass(frozen=True)
class DoublingVerdict:
    both_exact: bool
    holds: bool | None  # E_T <= E_J <= 2 E_T, checked only when both are exact
    equality_condition: bool
    E_J: float | None
    E_T: float | None


def doubling_check(p: JsccProblem, rho_step: float = 1e-3, tol: float = 1e-9) -> DoublingVerdict:
    rep = _classify(p, rho_step)
    if rep.tightness is Tightness.BRACKETED:
        return DoublingVerdict(False, None, False, None, None)
    tr = tandem_exponent(p, rho_step)
    exact = rep.tightness is not Tightness.BRACKETED and tr.E_T_value is not None
    if not exact:
        return DoublingVerdict(False, None, False, None, tr.E_T_value)
    ej, et = as_float(rep.exact_value), tr.E_T_value
    holds = et <= ej + tol and ej <= 2 * et + tol
    prof = channel_profile(p.channel, rho_step)
    Q, t = p.source, p.t
    eq = False
    if rep.tightness is Tightness.EXACT and t * source_critical_rate(Q) >= prof.critical_rate() - 1e-6:
        r = rep.rho_bar_star
        twoD = 2 * t * kl_divergence(tilted_source(Q, r).probs, Q.probs)
        eq = abs(ej - twoD) <= 1e-6
    return DoublingVerdict(True, bool(holds), bool(eq), ej, et)


@dataclass(frozen=True)
class TandemPredicates:
    rate_test: bool | None
    rate_case: str | None  # "a", "b", "c"
    rate_gap_bound: float | None  # lower bound on E_J - E_T for the active case
    ex_test: bool | None
    ex_test_skipped: str | None
    k1: float | None
    k2: float | None
    E_Rl: float | None
    e0_test: bool | None
    gamma: float
    zero_exponent: bool

    @property
    def beats_tandem(self) -> bool:
        return bool(self.rate_test or self.ex_test or self.e0_test)

    @property
    def region(self) -> str:
        """"G" for zero exponents, "F" when some predicate proves E_J > E_T, else "H" (undetermined)."""
        if self.zero_exponent:
            return "G"
        return "F" if self.beats_tandem else "H"


def beats_tandem_predicates(p: JsccProblem, rho_step: float = 1e-3) -> TandemPredicates:
    """Sufficient conditions for E_J > E_T that use only a few closed-form channel quantities."""
    Q, t = p.source, p.t
    prof = channel_profile(p.channel, rho_step)
    C, rcr = prof.capacity, prof.critical_rate()
    slog = math.log2(Q.alphabet_size)
    gam = gamma_tilt(Q, t, rcr)
    if t * entropy(Q) >= C:
        return TandemPredicates(False, None, None, False, "tH(Q) >= C", None, None, None, False, gam, True)
    if rcr > t * slog:
        return TandemPredicates(None, None, None, None, "R_cr > t log|S|", None, None, None, None, gam, False)
    e01 = prof.e0(1.0)
    tEs1 = t * float(gallager_source_fn(Q, 1.0))
    tDg = source_exponent_at_gamma(Q, gam, t)
    trs = t * source_critical_rate(Q)
    A, B = trs, e01 - tDg
    rate_ok = max(A, B) >= rcr
    case, gap = None, None
    if rate_ok:
        rep = _classify(p, rho_step)
        if min(A, B) >= rcr:
            case = "a"
            T = as_float(rep.exact_value)
            r = rep.rho_bar_star
            tD = t * kl_divergence(tilted_source(Q, r).probs, Q.probs)
            gap = 0.5 * T - abs(0.5 * T - tD)
        elif A >= rcr:
            case = "b"
            gap = as_float(rep.exact_value) - tDg
        else:
            case = "c"
            gap = rcr - tEs1
    e0_ok = e01 - tEs1 >= tDg
    ex0 = e_ex_zero(p.channel, check=False)
    if is_unbounded(ex0):
        return TandemPredicates(rate_ok, case, gap, None, "E_ex(0, W) is unbounded", None, None, None, e0_ok, gam, False)
    ex0 = ex0[0]
    q1 = tilted_source(Q, 1.0).probs
    lgm = slog + float(np.mean(np.log2(Q.probs)))  # log(|S| * geometric mean)
    k1 = (kl_divergence(q1, Q.probs) + lgm) / (entropy(q1) - slog)
    k2 = (e01 - ex0) / rcr - 1.0 if rcr > 0 else math.inf
    erl = (k1 * k2 * t * slog + k2 * t * lgm + k1 * ex0) / (k1 - k2)
    ex_ok = bool(e01 - tEs1 >= erl)
    return TandemPredicates(rate_ok, case, gap, ex_ok, None, k1, k2, erl, e0_ok, gam, False)
