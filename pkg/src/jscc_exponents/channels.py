"""Channel constructors, including BPSK links behind a uniform quantizer."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .channel import capacity
from .optimize import bracketed_max
from .probability import ChannelSpec, ValidationError


def _check_range(name, v, lo, hi):
    if not (lo <= v <= hi):
        raise ValidationError(f"{name}={v!r} outside [{lo}, {hi}]")


def bsc(epsilon: float) -> ChannelSpec:
    _check_range("epsilon", epsilon, 0.0, 0.5)
    e = float(epsilon)
    return ChannelSpec([[1 - e, e], [e, 1 - e]])


def bec(alpha: float) -> ChannelSpec:
    """Binary erasure channel; the last output is the erasure."""
    _check_range("alpha", alpha, 0.0, 1.0)
    a = float(alpha)
    return ChannelSpec([[1 - a, 0.0, a], [0.0, 1 - a, a]])


def qary_symmetric(q: int, epsilon: float) -> ChannelSpec:
    """q-ary symmetric channel with total error probability epsilon."""
    if q < 2:
        raise ValidationError(f"alphabet size must be at least 2, got {q}")
    _check_range("epsilon", epsilon, 0.0, 1.0)
    W = np.full((q, q), epsilon / (q - 1))
    np.fill_diagonal(W, 1.0 - epsilon)
    return ChannelSpec(W)


def gallager_6x4(epsilon: float) -> ChannelSpec:
    """Four noisy 'good' inputs plus two half-erasing ones; E0 is not concave for small epsilon."""
    _check_range("epsilon", epsilon, 0.0, 1.0 / 18.0)
    e = float(epsilon)
    good = np.full((4, 4), 6 * e)
    np.fill_diagonal(good, 1 - 18 * e)
    extra = np.array([[0.5 - e, 0.5 - e, e, e], [e, e, 0.5 - e, 0.5 - e]])
    return ChannelSpec(np.vstack([good, extra]))


def gaussian_tail(x):
    """Q(x) = P(N(0,1) > x)."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))


@dataclass(frozen=True)
class QuantizerConfig:
    bits: int
    step_size: float
    snr_db: float

    def __post_init__(self):
        if int(self.bits) != self.bits or self.bits < 1:
            raise ValidationError(f"bits must be a positive integer, got {self.bits!r}")
        if not self.step_size > 0:
            raise ValidationError(f"step_size must be positive, got {self.step_size!r}")
        if not math.isfinite(self.snr_db):
            raise ValidationError("snr_db must be finite")

    @property
    def snr(self) -> float:
        return 10.0 ** (self.snr_db / 10.0)

    @property
    def n0(self) -> float:
        return 2.0 / self.snr

    def thresholds(self) -> np.ndarray:
        """T_{-1}, ..., T_{2^m - 1} with infinite ends."""
        m = int(self.bits)
        inner = (np.arange(2**m - 1) + 1 - 2 ** (m - 1)) * self.step_size
        return np.concatenate([[-np.inf], inner, [np.inf]])


def _cells(F, T):
    # rows i, columns j: F(T_j | i) - F(T_{j-1} | i)
    cdf = np.array([F(T, 0), F(T, 1)])
    W = np.diff(cdf, axis=1)
    W = np.clip(W, 0.0, None)
    return W / W.sum(axis=1, keepdims=True)


def awgn_quantized(cfg: QuantizerConfig) -> ChannelSpec:
    """BPSK over AWGN followed by an m-bit uniform quantizer."""
    rs = math.sqrt(cfg.snr)

    def F(z, i):
        return gaussian_tail(-(z - (2 * i - 1)) * rs)

    return ChannelSpec(_cells(F, cfg.thresholds()))


def rayleigh_cdf(z, i: int, n0: float):
    """P(Z <= z | X = i) for BPSK over Rayleigh fading without receiver CSI."""
    z = np.asarray(z, dtype=float)
    if i == 0:
        return 1.0 - rayleigh_cdf(-z, 1, n0)
    with np.errstate(invalid="ignore"):
        tail = np.exp(-(z**2) / (n0 + 1.0)) / math.sqrt(n0 + 1.0)
        tail = tail * (1.0 - gaussian_tail(z / math.sqrt(n0 * (n0 + 1.0) / 2.0)))
    tail = np.where(np.isinf(z), 0.0, tail)
    return 1.0 - gaussian_tail(z / math.sqrt(n0 / 2.0)) - tail


def rayleigh_quantized(cfg: QuantizerConfig) -> ChannelSpec:
    """BPSK over Rayleigh fading followed by an m-bit uniform quantizer."""
    n0 = cfg.n0
    return ChannelSpec(_cells(lambda z, i: rayleigh_cdf(z, i, n0), cfg.thresholds()))


_BUILDERS = {"awgn": awgn_quantized, "rayleigh": rayleigh_quantized}


def optimize_step(snr_db: float, m: int, kind: str = "awgn", n_grid: int = 60) -> QuantizerConfig:
    """Quantizer step maximizing the capacity of the induced DMC."""
    if kind not in _BUILDERS:
        raise ValidationError(f"unknown channel kind {kind!r}")
    build = _BUILDERS[kind]
    if m == 1:
        return QuantizerConfig(1, 1.0, snr_db)
    hi = 4.0 * 2**m / math.sqrt(10.0 ** (snr_db / 10.0))

    def C(step):
        return capacity(build(QuantizerConfig(m, step, snr_db)))[0]

    grid = np.geomspace(1e-3 * hi, hi, n_grid)
    step, _ = bracketed_max(C, grid, 1e-7 * hi, fvec=lambda g: np.array([C(s) for s in g]))
    if step >= hi * (1 - 1e-6) or step <= grid[0] * (1 + 1e-6):
        warnings.warn(f"optimal step sits on the search bracket edge ({hi:.4g})", RuntimeWarning)
    return QuantizerConfig(m, float(step), snr_db)
