"""Validated distributions and the information measures built on them.

All logarithms are base 2.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

LN2 = math.log(2.0)
SUM_TOL = 1e-12


class ValidationError(ValueError):
    """Raised for malformed inputs or problem files."""


class _Unbounded:
    """Marker for an infinite value; never a float."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNBOUNDED"

    def __str__(self):
        return "inf"

    def __float__(self):
        return math.inf

    def __reduce__(self):
        return (_Unbounded, ())

    def __gt__(self, other):
        return not is_unbounded(other)

    def __ge__(self, other):
        return True

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return is_unbounded(other)


UNBOUNDED = _Unbounded()


def is_unbounded(x) -> bool:
    return x is UNBOUNDED


def as_float(x) -> float:
    """Float view of a value that may be the unbounded marker."""
    return math.inf if x is UNBOUNDED else float(x)


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SourceSpec:
    """Discrete memoryless source with strictly positive probabilities."""

    probs: np.ndarray

    def __init__(self, probs):
        p = _frozen(probs)
        if p.ndim != 1 or p.size == 0:
            raise ValidationError("source.probs must be a nonempty vector")
        for i, v in enumerate(p):
            if not np.isfinite(v) or v <= 0 or v > 1:
                raise ValidationError(f"source.probs[{i}] = {v!r} is not in (0, 1]")
        if abs(p.sum() - 1.0) > SUM_TOL:
            raise ValidationError(f"source.probs sums to {p.sum()!r}, not 1")
        object.__setattr__(self, "probs", p)

    @property
    def alphabet_size(self) -> int:
        return int(self.probs.size)

    def is_uniform(self, tol=1e-12) -> bool:
        return bool(np.ptp(self.probs) <= tol)

    def __eq__(self, other):
        return isinstance(other, SourceSpec) and np.array_equal(self.probs, other.probs)

    def __hash__(self):
        return hash(self.probs.tobytes())


@dataclass(frozen=True, eq=False)
class ChannelSpec:
    """Row-stochastic transition matrix W[x, y] = W(y|x)."""

    matrix: np.ndarray

    def __init__(self, matrix):
        W = _frozen(matrix)
        if W.ndim != 2 or W.size == 0:
            raise ValidationError("channel.matrix must be a nonempty 2-D array")
        for (i, j), v in np.ndenumerate(W):
            if not np.isfinite(v) or v < 0 or v > 1:
                raise ValidationError(f"channel.matrix[{i}][{j}] = {v!r} is not in [0, 1]")
        for i, row in enumerate(W):
            if abs(row.sum() - 1.0) > SUM_TOL:
                raise ValidationError(f"channel.matrix[{i}] sums to {row.sum()!r}, not 1")
        object.__setattr__(self, "matrix", W)

    @property
    def input_size(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def output_size(self) -> int:
        return int(self.matrix.shape[1])

    def __eq__(self, other):
        return isinstance(other, ChannelSpec) and np.array_equal(self.matrix, other.matrix)

    def __hash__(self):
        return hash((self.matrix.shape, self.matrix.tobytes()))


@dataclass(frozen=True, eq=False)
class TiltedDist:
    probs: np.ndarray
    rho: float


def _check_dist(p, name="distribution", tol=1e-9):
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValidationError(f"{name} must be a nonempty vector")
    if np.any(~np.isfinite(p)) or np.any(p < 0):
        raise ValidationError(f"{name} has negative or non-finite entries")
    if abs(p.sum() - 1.0) > tol:
        raise ValidationError(f"{name} sums to {p.sum()!r}, not 1")
    return p


def _probs(x):
    return x.probs if isinstance(x, (SourceSpec, TiltedDist)) else x


def entropy(dist) -> float:
    """Shannon entropy in bits, with 0 log 0 = 0."""
    p = _check_dist(_probs(dist))
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz)))


def kl_divergence(p, q):
    """D(p||q) in bits; UNBOUNDED when p puts mass where q has none."""
    p = _check_dist(_probs(p), "p")
    q = _check_dist(_probs(q), "q")
    if p.shape != q.shape:
        raise ValidationError(f"length mismatch: {p.size} vs {q.size}")
    nz = p > 0
    if np.any(q[nz] == 0):
        return UNBOUNDED
    return float(max(np.sum(p[nz] * np.log2(p[nz] / q[nz])), 0.0))


def _lse(a, axis):
    """log-sum-exp along an axis; rows of -inf give -inf."""
    m = np.max(a, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore"):
        return np.squeeze(m, axis) + np.log(np.sum(np.exp(a - m), axis=axis))


def _tilt_rows(logq, rho):
    """Tilted distributions for an array of finite rho (rows)."""
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    z = logq[None, :] / (1.0 + rho[:, None])
    z -= z.max(axis=1, keepdims=True)
    w = np.exp(z)
    return w / w.sum(axis=1, keepdims=True)


def _entropy_rows(P):
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(P > 0, P * np.log2(P), 0.0)
    return -t.sum(axis=1)


def tilted_source(Q: SourceSpec, rho) -> TiltedDist:
    """Q^(rho) proportional to Q^{1/(1+rho)}; rho = inf (or UNBOUNDED) is uniform."""
    if is_unbounded(rho) or rho == math.inf:
        n = Q.alphabet_size
        return TiltedDist(_frozen(np.full(n, 1.0 / n)), math.inf)
    if not rho >= 0:
        raise ValidationError(f"tilt must be nonnegative, got {rho!r}")
    if rho == 0:
        return TiltedDist(Q.probs, 0.0)
    return TiltedDist(_frozen(_tilt_rows(np.log(Q.probs), rho)[0]), float(rho))


def tilted_entropy(Q: SourceSpec, rho):
    """H(Q^(rho)) in bits, vectorized over finite rho."""
    rho = np.asarray(rho, dtype=float)
    out = _entropy_rows(_tilt_rows(np.log(Q.probs), rho.ravel()))
    return out.reshape(rho.shape) if rho.ndim else float(out[0])


def tilted_entropy_root_vec(Q: SourceSpec, R, tol=1e-12, max_rho=2.0**80):
    """Vectorized bisection for H(Q^(rho)) = R with R in [H(Q), log|S|).

    Entries not reachable below ``max_rho`` come back as inf.
    """
    R = np.atleast_1d(np.asarray(R, dtype=float))
    logq = np.log(Q.probs)

    def H(r):
        return _entropy_rows(_tilt_rows(logq, r))

    if R.size == 1:
        return np.array([_root_scalar(H, float(R[0]), entropy(Q), max_rho)])

    hi = np.ones_like(R)
    short = H(hi) < R
    while short.any():
        hi[short] *= 2.0
        short &= hi <= max_rho
        idx = np.where(short)[0]
        short[idx] = H(hi[idx]) < R[idx]
    out = np.full_like(R, np.inf)
    ok = hi <= max_rho
    lo, hi, Rk = np.zeros(ok.sum()), hi[ok], R[ok]
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        hm = H(mid)
        below = hm < Rk
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all((np.abs(hm - Rk) <= tol) | (hi - lo <= 1e-15 * np.maximum(hi, 1.0))):
            break
    out[ok] = 0.5 * (lo + hi)
    out[R <= entropy(Q)] = 0.0
    return out


def _root_scalar(H, R, H0, max_rho):
    if R <= H0:
        return 0.0
    hi = 1.0
    while H(np.array([hi]))[0] < R:
        hi *= 2.0
        if hi > max_rho:
            return math.inf
    f = lambda r: H(np.array([r]))[0] - R
    if f(hi) == 0.0:
        return hi
    return brentq(f, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def tilted_entropy_root(Q: SourceSpec, R: float, tol=1e-12):
    """Unique rho with H(Q^(rho)) = R; UNBOUNDED when R = log|S|."""
    if Q.is_uniform():
        raise ValidationError("tilted entropy root is not unique for a uniform source")
    H0 = entropy(Q)
    top = math.log2(Q.alphabet_size)
    if R < H0 - tol or R > top + tol:
        raise ValidationError(f"rate {R!r} outside [H(Q), log|S|] = [{H0!r}, {top!r}]")
    if R <= H0:
        return 0.0
    if R >= top:
        return UNBOUNDED
    r = float(tilted_entropy_root_vec(Q, [R], tol)[0])
    return UNBOUNDED if math.isinf(r) else r


def binary_entropy(p):
    """h_b(p) in bits (vectorized)."""
    p = np.asarray(p, dtype=float)
    if np.any((p < 0) | (p > 1)):
        raise ValidationError(f"binary entropy argument outside [0, 1]: {p!r}")
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -np.where(p > 0, p * np.log2(p), 0.0) - np.where(p < 1, (1 - p) * np.log2(1 - p), 0.0)
    return float(h) if h.ndim == 0 else h


def binary_divergence(delta, q):
    """D(delta||q) for Bernoulli laws, q in (0, 1)."""
    delta = np.asarray(delta, dtype=float)
    q = np.asarray(q, dtype=float)
    if np.any((delta < 0) | (delta > 1)):
        raise ValidationError(f"delta outside [0, 1]: {delta!r}")
    if np.any((q <= 0) | (q >= 1)):
        raise ValidationError(f"q outside (0, 1): {q!r}")
    with np.errstate(divide="ignore", invalid="ignore"):
        d = np.where(delta > 0, delta * np.log2(delta / q), 0.0) + np.where(
            delta < 1, (1 - delta) * np.log2((1 - delta) / (1 - q)), 0.0
        )
    d = np.maximum(d, 0.0)
    return float(d) if d.ndim == 0 else d


def _check_number(v, where):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValidationError(f"{where}: expected a decimal number, got {v!r}")
    return float(v)


def parse_problem(doc) -> tuple[SourceSpec | None, ChannelSpec | None, float | None]:
    """Parse ``{"source": {"probs": [...]}, "channel": {"matrix": [[...]]}, "t": x}``.

    Any of the three keys may be absent; absent parts come back as None.
    """
    if not isinstance(doc, dict):
        raise ValidationError("top level: expected a JSON object")
    source = channel = t = None
    if "source" in doc:
        src = doc["source"]
        if not isinstance(src, dict) or "probs" not in src:
            raise ValidationError("source: expected an object with a 'probs' list")
        probs = src["probs"]
        if not isinstance(probs, list) or not probs:
            raise ValidationError("source.probs: expected a nonempty list")
        source = SourceSpec([_check_number(v, f"source.probs[{i}]") for i, v in enumerate(probs)])
    if "channel" in doc:
        ch = doc["channel"]
        if not isinstance(ch, dict) or "matrix" not in ch:
            raise ValidationError("channel: expected an object with a 'matrix' list")
        rows = ch["matrix"]
        if not isinstance(rows, list) or not rows:
            raise ValidationError("channel.matrix: expected a nonempty list of rows")
        parsed = []
        for i, row in enumerate(rows):
            if not isinstance(row, list) or not row:
                raise ValidationError(f"channel.matrix[{i}]: expected a nonempty list")
            if parsed and len(row) != len(parsed[0]):
                raise ValidationError(f"channel.matrix[{i}]: has {len(row)} entries, expected {len(parsed[0])}")
            parsed.append([_check_number(v, f"channel.matrix[{i}][{j}]") for j, v in enumerate(row)])
        channel = ChannelSpec(parsed)
    if "t" in doc:
        t = _check_number(doc["t"], "t")
        if not t > 0:
            raise ValidationError(f"t: must be positive, got {t!r}")
    return source, channel, t


def load_problem(path):
    """Read and parse a problem file; malformed JSON becomes a ValidationError."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from exc
    except OSError as exc:
        raise ValidationError(f"{path}: {exc.strerror}") from exc
    try:
        return parse_problem(doc)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from exc
