"""Grid sweeps behind the CLI subcommands."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import JsccProblem, Tightness, classify
from .channels import awgn_quantized, bec, bsc, optimize_step, rayleigh_quantized
from .lossy import LossyProblem, lossy_bounds, lossy_threshold
from .probability import SourceSpec, ValidationError
from .tandem import beats_tandem_predicates, ratio_report

FAMILIES = {"bsc": ("epsilon", bsc), "bec": ("alpha", bec)}
MAPS = ("exact", "expurgated", "compare", "lossy")

# Source-channel pairs of the comparison table: rows are BSC crossover
# probabilities, columns are (t, q) pairs.
TABLE_EPS = (0.0005, 0.001, 0.005, 0.01, 0.04, 0.08, 0.12, 0.16, 0.2)
TABLE_COLS = ((0.5, 0.1), (0.75, 0.1), (0.75, 0.15), (1.0, 0.05))


@dataclass(frozen=True)
class Axis:
    name: str
    lo: float
    hi: float
    steps: int

    def __post_init__(self):
        if int(self.steps) != self.steps or self.steps < 2:
            raise ValidationError(f"{self.name}: need at least 2 grid steps, got {self.steps!r}")
        if not self.lo < self.hi:
            raise ValidationError(f"{self.name}: lo={self.lo!r} must be below hi={self.hi!r}")

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, int(self.steps))


@dataclass(frozen=True)
class SweepJob:
    kind: str
    axes: tuple
    fixed: dict = field(default_factory=dict)
    out: str | None = None

    def points(self):
        return itertools.product(*(a.values() for a in self.axes))


def _binary(q: float) -> SourceSpec:
    return SourceSpec([q, 1.0 - q])


def exact_label(rep, expurgated: bool = False) -> str:
    """A: zero exponent, B: exact, C: bracketed (C1/C2 split by expurgated improvement)."""
    if rep.tightness is Tightness.ZERO:
        return "A"
    if rep.tightness is Tightness.EXACT:
        return "B"
    if expurgated and rep.expurgated_improves is not None:
        return "C2" if rep.expurgated_improves else "C1"
    return "C"


def lossy_label(rep, q: float, delta: float) -> str:
    if rep.tightness is Tightness.ZERO:
        return "A"
    if rep.tightness is Tightness.EXACT:
        return "B"
    return "C1" if delta < lossy_threshold(q) else "C2"


def region_point(family: str, param: float, q: float, t: float, map_kind: str = "exact",
                 delta: float = 0.0, rho_step: float = 1e-3, rho_max: float = 1024.0,
                 rate_tol: float = 1e-6) -> dict:
    """Label and bounds at one (channel parameter, q) grid point."""
    if family not in FAMILIES:
        raise ValidationError(f"unknown channel family {family!r}")
    if map_kind not in MAPS:
        raise ValidationError(f"unknown map {map_kind!r}")
    pname, make = FAMILIES[family]
    W = make(param)
    row = {pname: float(param), "q": float(q)}
    if map_kind == "lossy":
        rep = lossy_bounds(LossyProblem(q, W, t, delta), rho_step, rho_max, rate_tol)
        row.update(label=lossy_label(rep, q, delta), lower=rep.lower, upper=rep.upper)
        return row
    p = JsccProblem(_binary(q), W, t)
    if map_kind == "compare":
        pr = beats_tandem_predicates(p, rho_step)
        row.update(label=pr.region, rate_test=pr.rate_test, ex_test=pr.ex_test,
                   e0_test=pr.e0_test)
        return row
    rep = classify(p, rho_step, map_kind == "expurgated", rho_max, rate_tol)
    row.update(label=exact_label(rep, map_kind == "expurgated"), lower=rep.lower, upper=rep.upper)
    return row


def run_region(job: SweepJob, **kw) -> list[dict]:
    f = job.fixed
    rows = [region_point(f["family"], a, b, f["t"], f.get("map", "exact"), f.get("delta", 0.0), **kw)
            for a, b in job.points()]
    pname = FAMILIES[f["family"]][0]
    return sorted(rows, key=lambda r: (r[pname], r["q"]))


def format_ratio(tr) -> str:
    """Ratio cell as printed; a dagger marks a lower bound."""
    if tr.not_applicable:
        return "N/A"
    return f"{tr.ratio:.2f}" + ("†" if tr.ratio_is_lower_bound else "")


def ratio_table(eps_list=TABLE_EPS, cols=TABLE_COLS, rho_step: float = 1e-3) -> list[dict]:
    rows = []
    for eps in eps_list:
        for t, q in cols:
            tr = ratio_report(JsccProblem(_binary(q), bsc(eps), t), rho_step)
            rows.append({"epsilon": float(eps), "t": float(t), "q": float(q),
                         "ratio": None if tr.not_applicable else tr.ratio,
                         "lower_bound": tr.ratio_is_lower_bound, "cell": format_ratio(tr)})
    return sorted(rows, key=lambda r: (r["epsilon"], r["t"], r["q"]))


_QUANT = {"awgn": awgn_quantized, "rayleigh": rayleigh_quantized}


@dataclass
class PowerCurve:
    kind: str
    bits: int
    snr_db: np.ndarray
    E_J: np.ndarray
    E_T: np.ndarray
    J_exact: np.ndarray
    T_exact: np.ndarray
    steps: np.ndarray

    def shift_at(self, levels) -> np.ndarray:
        """SNR(E_T = level) - SNR(E_J = level) in dB, linear in dB; nan outside either curve."""
        levels = np.asarray(levels, dtype=float)
        return _snr_at(self.snr_db, self.E_T, levels) - _snr_at(self.snr_db, self.E_J, levels)

    def row_shift(self) -> np.ndarray:
        """dB shift at the exponent level E_J reaches at each grid SNR."""
        return _snr_at(self.snr_db, self.E_T, self.E_J) - self.snr_db

    def common_levels(self, n: int = 20) -> np.ndarray:
        lo = max(self.E_J.min(), self.E_T.min())
        hi = min(self.E_J.max(), self.E_T.max())
        pad = 1e-6 * (hi - lo)
        return np.linspace(lo + pad, hi - pad, n)

    def exact_through(self) -> float | None:
        """Largest grid SNR up to which both exponents are exact at every grid point."""
        ok = self.J_exact & self.T_exact
        if not ok[0]:
            return None
        k = int(np.argmin(ok)) if not ok.all() else len(ok)
        return float(self.snr_db[k - 1])


def _snr_at(snr, E, levels):
    # exponents grow with SNR; keep the increasing part for interpolation
    E = np.maximum.accumulate(np.asarray(E, dtype=float))
    keep = np.r_[True, np.diff(E) > 0]
    x, s = E[keep], np.asarray(snr)[keep]
    out = np.interp(levels, x, s)
    return np.where((levels < x[0]) | (levels > x[-1]) | (levels <= 0), np.nan, out)


def power_curve(kind: str, bits: int, t: float, q: float, snr_db, rho_step: float = 1e-3) -> PowerCurve:
    """E_J and E_T for BPSK with an m-bit quantizer whose step maximizes capacity."""
    if kind not in _QUANT:
        raise ValidationError(f"unknown channel kind {kind!r}")
    snr_db = np.asarray(snr_db, dtype=float)
    Q = _binary(q)
    EJ, ET, jx, tx, st = [], [], [], [], []
    for s in snr_db:
        cfg = optimize_step(float(s), bits, kind)
        tr = ratio_report(JsccProblem(Q, _QUANT[kind](cfg), t), rho_step)
        # inexact values fall back to the side that understates the gain
        EJ.append(tr.E_J_value if tr.E_J_value is not None else tr.E_J_lower)
        ET.append(tr.E_T_value if tr.E_T_value is not None else tr.E_T_upper)
        jx.append(tr.E_J_value is not None)
        tx.append(tr.E_T_value is not None)
        st.append(cfg.step_size)
    return PowerCurve(kind, int(bits), snr_db, np.array(EJ, dtype=float), np.array(ET, dtype=float),
                      np.array(jx), np.array(tx), np.array(st))


def snr_grid(lo: float, hi: float, step: float) -> np.ndarray:
    if not (step > 0 and lo < hi):
        raise ValidationError("snr range needs lo < hi and a positive step")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n)
