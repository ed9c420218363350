"""Gallager channel functions maximized over inputs, with the derived rates and exponent curves."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from . import kernels
from .envelope import ConcaveEnvelope, upper_concave_envelope
from .optimize import bracketed_max, golden_max
from .probability import _lse, LN2, UNBOUNDED, ChannelSpec, ValidationError, _check_dist, _entropy_rows

ARIMOTO_TOL = 1e-12  # target certified error on E0, bits
ARIMOTO_MAX_ITER = 2000
ACCEPT = 1e-9  # certified error above which a value is flagged as not converged
RHO_CAP = 1024.0


class NumericalError(RuntimeError):
    """An iterative solver failed to reach its accuracy target."""


def as_channel(W) -> ChannelSpec:
    return W if isinstance(W, ChannelSpec) else ChannelSpec(W)


def _pow0(M, s):
    """M**s entrywise with 0**s = 0 for s > 0."""
    pos = M > 0
    return np.where(pos, np.where(pos, M, 1.0) ** s, 0.0)


def _log_or_zero(M):
    pos = M > 0
    return np.where(pos, np.log(np.where(pos, M, 1.0)), 0.0)


def _input_dist(P, W):
    P = _check_dist(P, "P_X")
    if P.size != W.shape[0]:
        raise ValidationError(f"P_X has {P.size} entries but the channel has {W.shape[0]} inputs")
    return P


# ---------------------------------------------------------------- E0 for fixed inputs


def _e0_tilde(rho, P, Wm):
    if rho == 0:
        return 0.0
    al = P @ _pow0(Wm, 1.0 / (1.0 + rho))
    al = al[al > 0]
    return float(-_lse((1.0 + rho) * np.log(al), axis=0) / LN2)


def e0_tilde(rho, P, W):
    """E0~(rho, P, W) = -log sum_y (sum_x P(x) W(y|x)^{1/(1+rho)})^{1+rho}."""
    Wm = as_channel(W).matrix
    P = _input_dist(P, Wm)
    r = np.asarray(rho, dtype=float)
    if np.any(r < 0):
        raise ValidationError(f"rho must be nonnegative, got {rho!r}")
    out = np.array([_e0_tilde(float(x), P, Wm) for x in np.atleast_1d(r)])
    return out.reshape(r.shape) if r.ndim else float(out[0])


def e0_tilde_derivative(rho, P, W):
    """d/drho of E0~(rho, P, W) at fixed P."""
    Wm = as_channel(W).matrix
    P = _input_dist(P, Wm)
    s = 1.0 / (1.0 + rho)
    a = _pow0(Wm, s)
    al = P @ a
    dal = -s * s * (P @ (a * _log_or_zero(Wm)))
    live = al > 0
    al, dal = al[live], dal[live]
    L = (1.0 + rho) * np.log(al)
    w = np.exp(L - L.max())
    num = np.sum(w * (np.log(al) + (1.0 + rho) * dal / al))
    return float(-num / w.sum() / LN2)


# ---------------------------------------------------------------- maximization over inputs


@dataclass(frozen=True)
class E0Result:
    value: float
    P: np.ndarray
    bound: float  # certified upper bound on E0(rho, W) - value, bits
    iterations: int
    converged: bool


def _scaled_parts(P, a, rho):
    """F = sum_y al^{1+rho} scaled by exp(-m), gradient/(1+rho), Hessian/(1+rho)."""
    al = P @ a
    live = al > 0
    L = np.full(al.shape, -np.inf)
    L[live] = (1.0 + rho) * np.log(al[live])
    m = L.max()
    w = np.where(live, np.exp(L - m), 0.0)
    safe = np.where(live, al, 1.0)
    F = w.sum()
    beta = a @ np.where(live, w / safe, 0.0)
    H = rho * (a * np.where(live, w / safe**2, 0.0)) @ a.T
    return F, beta, H, m


def _bound_bits(rho, F, beta):
    gap = (1.0 + rho) * (1.0 - beta.min() / F)
    if gap <= 0:
        return 0.0
    return -math.log1p(-gap) / LN2 if gap < 1 else math.inf


def polish_e0(rho, W, P, tol=ARIMOTO_TOL, max_iter=80):
    """Active-set Newton refinement of an approximate maximizer of E0~(rho, ., W).

    Minimizes the convex function sum_y (P a)_y^{1+rho} on the simplex; returns
    (value, P, bound).
    """
    Wm = W if isinstance(W, np.ndarray) else as_channel(W).matrix
    a = _pow0(Wm, 1.0 / (1.0 + rho))
    P = np.array(P, dtype=float)
    # residual Arimoto mass on dead inputs blocks Newton steps; the active set re-adds them if needed
    P[P < 1e-10] = 0.0
    P /= P.sum()
    n = P.size
    # rounding in the KKT spread puts a floor of about (1 + rho) 2e-13 under the certificate
    tol = max(tol, (1.0 + rho) * 2e-13)
    best, stall = math.inf, 0
    for _ in range(max_iter):
        F, beta, H, m = _scaled_parts(P, a, rho)
        b = _bound_bits(rho, F, beta)
        if b <= tol:
            break
        stall = stall + 1 if b > 0.9 * best else 0
        if stall >= 3:
            break
        best = min(best, b)
        S = P > 0
        bs = beta[S]
        if bs.max() - bs.min() <= 1e-11 * F:
            out = np.where(~S)[0]
            if out.size == 0:
                break
            S[out[np.argmin(beta[out])]] = True
        idx = np.where(S)[0]
        k = idx.size
        K = np.zeros((k + 1, k + 1))
        K[:k, :k] = H[np.ix_(idx, idx)] + 1e-14 * np.eye(k)
        K[:k, k] = K[k, :k] = 1.0
        rhs = np.zeros(k + 1)
        rhs[:k] = -beta[idx]
        d = np.zeros(n)
        d[idx] = np.linalg.lstsq(K, rhs, rcond=None)[0][:k]
        neg = d < 0
        ratios = np.full(n, np.inf)
        ratios[neg] = -P[neg] / d[neg]
        smax = min(1.0, float(ratios.min()))
        step, improved = smax, False
        while step > 1e-14:
            Pn = P + step * d
            if step == smax < 1.0:
                Pn[ratios <= smax * (1 + 1e-12)] = 0.0
            Pn = np.maximum(Pn, 0.0)
            Pn /= Pn.sum()
            an = Pn @ a
            Fn = np.exp((1.0 + rho) * np.log(an[an > 0]) - m).sum()
            if Fn < F or (Fn <= F and step == smax < 1.0):
                P, improved = Pn, True
                break
            if Fn <= F * (1.0 + 8 * (1.0 + rho) * np.finfo(float).eps):
                # near the optimum F no longer resolves progress; judge by the certificate
                Fc, bc, _, _ = _scaled_parts(Pn, a, rho)
                if _bound_bits(rho, Fc, bc) < b:
                    P, improved = Pn, True
                    break
            step *= 0.5
        if not improved:
            # Newton made no progress; fall back to a short Arimoto run
            _, Ps, _, _ = kernels.arimoto_sweep(
                np.array([float(rho)]), np.ascontiguousarray(Wm), np.ascontiguousarray(P), tol, 50
            )
            if np.allclose(Ps[0], P, rtol=0, atol=1e-16):
                break
            P = Ps[0]
    F, beta, _, m = _scaled_parts(P, a, rho)
    return float(-(math.log(F) + m) / LN2), P, _bound_bits(rho, F, beta)


def e0_max(rho, W, P0=None, tol=ARIMOTO_TOL, max_iter=ARIMOTO_MAX_ITER) -> E0Result:
    """E0(rho, W) = max_P E0~(rho, P, W) with the achieving P.

    Arimoto iterations run until the certified error falls below ``tol`` or
    ``max_iter`` is hit; a Newton polish then finishes unconverged cases.
    ``converged`` is False when the final certified error exceeds 1e-9 bits.
    """
    ch = as_channel(W)
    rho = float(rho)
    if rho < 0:
        raise ValidationError(f"rho must be nonnegative, got {rho!r}")
    nx = ch.input_size
    P0 = np.full(nx, 1.0 / nx) if P0 is None else _input_dist(P0, ch.matrix)
    if rho == 0:
        return E0Result(0.0, np.array(P0), 0.0, 0, True)
    v, Ps, b, it = kernels.arimoto_sweep(
        np.array([rho]), np.ascontiguousarray(ch.matrix), np.ascontiguousarray(P0, dtype=float), tol, max_iter
    )
    value, P, bound = float(v[0]), Ps[0], float(b[0])
    if bound > tol:
        v2, P2, b2 = polish_e0(rho, ch.matrix, P, tol)
        if b2 <= bound:
            value, P, bound = v2, P2, b2
    return E0Result(value, P, bound, int(it[0]), bound <= ACCEPT)


def e0_sweep(rhos, W, P0=None, tol=ARIMOTO_TOL, max_iter=200):
    """E0 at increasing rhos with warm starts; returns (values, P rows, bounds)."""
    ch = as_channel(W)
    rhos = np.ascontiguousarray(rhos, dtype=float)
    nx = ch.input_size
    P0 = np.full(nx, 1.0 / nx) if P0 is None else np.asarray(P0, dtype=float)
    Wm = np.ascontiguousarray(ch.matrix)
    n = len(rhos)
    vals, Ps, bounds = np.zeros(n), np.empty((n, nx)), np.zeros(n)
    start, P = 0, np.ascontiguousarray(P0, dtype=float)
    newton = False
    while start < n:
        if newton:
            # Arimoto has stalled once; give it a few steps, then hand over to Newton
            v, Pk, b, _ = kernels.arimoto_sweep(rhos[start:start + 1], Wm, P, tol, 25)
            if b[0] > tol:
                v2, P2, b2 = polish_e0(rhos[start], Wm, Pk[0], tol)
                if b2 <= b[0]:
                    v, Pk, b = [v2], P2[None, :], [b2]
            vals[start], bounds[start] = v[0], b[0]
            Ps[start] = P = np.ascontiguousarray(Pk[0])
            start += 1
            continue
        chunk = rhos[start:start + 64]
        v, Pk, b, _ = kernels.arimoto_sweep(chunk, Wm, P, tol, max_iter)
        bad = np.where(b > tol)[0]
        stop = len(chunk) if bad.size == 0 else bad[0] + 1
        vals[start:start + stop] = v[:stop]
        Ps[start:start + stop] = Pk[:stop]
        bounds[start:start + stop] = b[:stop]
        k = start + stop - 1
        if bad.size:
            # polish the failing point and restart the warm-started sweep from it
            v2, P2, b2 = polish_e0(rhos[k], Wm, Ps[k], tol)
            if b2 <= bounds[k]:
                vals[k], Ps[k], bounds[k] = v2, P2, b2
            newton = True
        P = np.ascontiguousarray(Ps[k])
        start += stop
    return vals, Ps, bounds


# ---------------------------------------------------------------- capacity


def capacity(W, tol=1e-12, max_iter=200000):
    """(C, achieving P, certified gap) by Blahut-Arimoto, closed form when symmetric."""
    ch = as_channel(W)
    sym = symmetric_profile(ch)
    nx = ch.input_size
    if sym is not None:
        return sym.capacity, np.full(nx, 1.0 / nx), 0.0
    C, P, gap, _ = kernels.blahut_arimoto(np.ascontiguousarray(ch.matrix), np.full(nx, 1.0 / nx), tol, max_iter)
    return float(C), np.asarray(P), float(gap)


# ---------------------------------------------------------------- symmetric channels


@dataclass(frozen=True, eq=False)
class SymmetricProfile:
    """Column blocks of a Gallager-symmetric channel.

    ``columns[i]`` holds the entries p_i1..p_i|X| of any column of block i and
    ``sizes[i]`` its number of columns |Y_i|.
    """

    columns: np.ndarray
    sizes: np.ndarray

    @property
    def input_size(self) -> int:
        return int(self.columns.shape[1])

    def _tilt(self, rho):
        r = np.atleast_1d(np.asarray(rho, dtype=float))
        s = 1.0 / (1.0 + r)
        with np.errstate(divide="ignore"):
            lp = np.log(self.columns)
        A = s[:, None, None] * lp[None]  # (n, blocks, |X|)
        logc = _lse(A, axis=2)
        return r, A, logc

    def _weights(self, r, logc):
        g = np.log(self.sizes)[None, :] + (1.0 + r[:, None]) * logc
        return g, _lse(g, axis=1)

    def e0(self, rho):
        """Closed-form E0(rho, W) with the uniform input."""
        r, _, logc = self._tilt(rho)
        _, tot = self._weights(r, logc)
        out = (1.0 + r) * math.log2(self.input_size) - tot / LN2
        out = np.where(r == 0, 0.0, out)
        return out.reshape(np.shape(rho)) if np.ndim(rho) else float(out[0])

    def tilted_columns(self, alpha):
        """P_i^(alpha)(j) proportional to p_ij^{1/(1+alpha)}, one row per block."""
        _, A, logc = self._tilt(alpha)
        return np.exp(A[0] - logc[0][:, None])

    def e0_derivative(self, rho):
        """dE0/drho = log|X| - weighted mean of H(P_i^(rho))."""
        r, A, logc = self._tilt(rho)
        L = A - logc[..., None]
        T = np.exp(L)
        H = -np.sum(T * np.where(T > 0, L, 0.0), axis=2) / LN2
        g, tot = self._weights(r, logc)
        w = np.exp(g - tot[:, None])
        out = math.log2(self.input_size) - np.sum(w * H, axis=1)
        return out.reshape(np.shape(rho)) if np.ndim(rho) else float(out[0])

    @property
    def capacity(self) -> float:
        mass = self.sizes * self.columns.sum(axis=1)
        return float(
            math.log2(self.input_size) - np.sum(mass * _entropy_rows(self.tilted_columns(0.0))) / self.input_size
        )


def symmetric_profile(W, tol=1e-12):
    """Detect Gallager symmetry: columns split into blocks whose rows and columns are permutations."""
    Wm = as_channel(W).matrix
    cols = Wm.T
    keep = cols.max(axis=1) > 0
    groups: list[list[int]] = []
    reps: list[np.ndarray] = []
    for j in np.where(keep)[0]:
        key = np.sort(cols[j])
        for g, rep in zip(groups, reps):
            if np.allclose(key, rep, rtol=0, atol=tol):
                g.append(j)
                break
        else:
            groups.append([j])
            reps.append(key)
    for g in groups:
        rows = np.sort(Wm[:, g], axis=1)
        if not np.allclose(rows, rows[0][None, :], rtol=0, atol=tol):
            return None
    columns = np.array([cols[g[0]] for g in groups])
    return SymmetricProfile(columns, np.array([len(g) for g in groups], dtype=float))


# ---------------------------------------------------------------- expurgated functions


def bhattacharyya(W) -> np.ndarray:
    """Pairwise sums B(x, x') = sum_y sqrt(W(y|x) W(y|x'))."""
    r = np.sqrt(as_channel(W).matrix)
    return r @ r.T


def equidistant_beta(W, tol=1e-12):
    """Common off-diagonal Bhattacharyya value, or None when the channel is not equidistant."""
    B = bhattacharyya(W)
    n = B.shape[0]
    if n == 1:
        return None
    off = B[~np.eye(n, dtype=bool)]
    if np.ptp(off) <= tol:
        return float(off.mean())
    return None


def zero_error_capacity_is_zero(W) -> bool:
    """True iff every pair of input rows shares an output with positive probability."""
    S = (as_channel(W).matrix > 0).astype(float)
    return bool(np.all(S @ S.T > 0))


def ex_tilde(rho, P, W):
    """E_x~(rho, P, W) = -rho log sum_{x,x'} P(x)P(x') B(x,x')^{1/rho}, rho >= 1."""
    Wm = as_channel(W).matrix
    if rho < 1:
        raise ValidationError(f"E_x is defined for rho >= 1, got {rho!r}")
    P = _input_dist(P, Wm)
    return float(-rho * math.log2(P @ _pow0(bhattacharyya(Wm), 1.0 / rho) @ P))


def ex_tilde_derivative(rho, P, W):
    """d/drho of E_x~(rho, P, W) at fixed P."""
    B = bhattacharyya(W)
    M = _pow0(B, 1.0 / rho)
    S = P @ M @ P
    dS = P @ (M * _log_or_zero(B)) @ P * (-1.0 / rho**2)
    return float(-math.log2(S) - rho * dS / S / LN2)


def _refine_quadform(M, P, sweeps=500):
    """Pairwise exchange descent for min p' M p on the simplex."""
    P = np.array(P, dtype=float)
    MP = M @ P
    f = P @ MP
    n = P.size
    for _ in range(sweeps):
        f0 = f
        for i in range(n):
            for j in range(i + 1, n):
                # move s from j to i: P_i += s, P_j -= s, s in [-P_i, P_j]
                g = 2.0 * (MP[i] - MP[j])
                c = M[i, i] + M[j, j] - 2.0 * M[i, j]
                lo, hi = -P[i], P[j]
                if c > 0:
                    s = min(max(-g / (2.0 * c), lo), hi)
                else:
                    s = lo if g * lo + c * lo * lo < g * hi + c * hi * hi else hi
                df = g * s + c * s * s
                if df < 0 and s != 0.0:
                    P[i] += s
                    P[j] -= s
                    MP += s * (M[:, i] - M[:, j])
                    f += df
        if f0 - f <= 1e-16 * max(1.0, abs(f0)):
            break
    P = np.maximum(P, 0.0)
    P /= P.sum()
    return float(P @ M @ P), P


def _min_quadform(M, resolution=200, starts=(), seed=0):
    """Approximate min of p' M p over the simplex: grid (|X| <= 4) or multistart, then pairwise descent."""
    n = M.shape[0]
    cands = [np.full(n, 1.0 / n)] + [np.eye(n)[i] for i in range(n)] + [np.asarray(s, float) for s in starts]
    if n <= 4:
        _, Pg = kernels.simplex_grid_min(np.ascontiguousarray(M), int(resolution))
        cands.append(Pg)
    else:
        rng = np.random.default_rng(seed)
        cands.extend(rng.dirichlet(np.ones(n), size=8 * n))
    best = (math.inf, None)
    for c in cands:
        v, P = _refine_quadform(M, c)
        if v < best[0]:
            best = (v, P)
    return best


@dataclass(frozen=True)
class ExResult:
    value: float
    P: np.ndarray
    approximate: bool  # True when the maximizer came from a search rather than equidistance


def ex_max(rho, W, resolution=200, starts=()) -> ExResult:
    """E_x(rho, W) = max_P E_x~; uniform P for equidistant channels, grid search otherwise."""
    ch = as_channel(W)
    if rho < 1:
        raise ValidationError(f"E_x is defined for rho >= 1, got {rho!r}")
    n = ch.input_size
    beta = equidistant_beta(ch)
    if beta is not None or n == 1:
        P = np.full(n, 1.0 / n)
        return ExResult(ex_tilde(rho, P, ch), P, False)
    v, P = _min_quadform(_pow0(bhattacharyya(ch), 1.0 / rho), resolution, starts)
    return ExResult(float(-rho * math.log2(v)), P, True)


def equidistant_ex(rho, beta, n):
    """E_x(rho) = -rho log((|X|-1)/|X| beta^{1/rho} + 1/|X|), vectorized over rho."""
    r = np.asarray(rho, dtype=float)
    a = (n - 1.0) / n
    with np.errstate(divide="ignore"):
        v = -r * np.log2(a * np.power(beta, 1.0 / r) + 1.0 / n)
    return float(v) if v.ndim == 0 else v


def equidistant_rex(beta, n):
    """Right derivative of the equidistant E_x at rho = 1."""
    a, b = (n - 1.0) / n, 1.0 / n
    if beta == 0:
        return -math.log2(b)
    return -math.log2(a * beta + b) + a * beta * math.log2(beta) / (a * beta + b)


def e_ex_zero(W, resolution=200, check=True):
    """E_ex(0, W) = -min_P sum P P' log B; UNBOUNDED when some pair of rows is orthogonal.

    With ``check`` the value is compared against E_x(2^k, W) for growing k.
    Returns (value, approximate flag, large-rho estimate or None).
    """
    ch = as_channel(W)
    if not zero_error_capacity_is_zero(ch):
        return UNBOUNDED, False, None
    B = bhattacharyya(ch)
    n = ch.input_size
    beta = equidistant_beta(ch)
    if beta is not None:
        P = np.full(n, 1.0 / n)
        value, approx = float(-(P @ np.log2(B) @ P)), False
    else:
        v, P = _min_quadform(np.log2(B), resolution)
        value, approx = -v, True
    est = None
    if check:
        prev = None
        for k in range(1, 21):
            r = 2.0**k
            cur = ex_tilde(r, P, ch)
            if prev is not None and abs(cur - prev) < 1e-6:
                break
            prev = cur
        est = cur
    return value, approx, est


# ---------------------------------------------------------------- R_infinity


def r_infinity(W, tol=1e-9):
    """lim_{rho -> inf} E0(rho, W) / rho.

    Zero when some output is reachable from every input; otherwise the limit is
    extrapolated from E0 at rho = 2^k with a Richardson step.
    """
    ch = as_channel(W)
    if np.any(np.all(ch.matrix > 0, axis=0)):
        return 0.0
    P = None
    prev_est = None
    last = None
    for k in range(3, 21):
        r = 2.0**k
        res = e0_max(r, ch, P0=P, tol=1e-12 * r)
        P = res.P
        f = res.value / r
        if last is not None:
            est = 2.0 * f - last
            if prev_est is not None and abs(est - prev_est) <= tol:
                return max(min(est, f), 0.0)
            prev_est = est
        last = f
    return max(min(prev_est, last), 0.0)


# ---------------------------------------------------------------- cached per-channel state


class ChannelProfile:
    """Cached E0 samples (uniform on [0, 1], geometric beyond) with their hulls."""

    def __init__(self, channel: ChannelSpec, rho_step: float = 1e-3):
        self.channel = channel
        self.W = np.ascontiguousarray(channel.matrix)
        self.rho_step = float(rho_step)
        self.geo_step = 10.0 * self.rho_step  # relative spacing of samples beyond rho = 1
        self.symmetric = symmetric_profile(channel)
        self.beta = equidistant_beta(channel)
        n = int(round(1.0 / rho_step))
        rho = np.linspace(0.0, 1.0, n + 1)
        vals, Ps, bounds = self._compute(rho, None)
        self._rho, self._e0, self._P, self._bound = rho, vals, Ps, bounds
        self._hulls: dict[float, ConcaveEnvelope] = {}
        self._cache: dict[str, object] = {}
        self._ex = None

    def _compute(self, rho, P0):
        if self.symmetric is not None:
            vals = self.symmetric.e0(rho)
            nx = self.channel.input_size
            return vals, np.full((len(rho), nx), 1.0 / nx), np.zeros(len(rho))
        return e0_sweep(rho, self.W, P0)

    @property
    def rho_max(self) -> float:
        return float(self._rho[-1])

    def ensure(self, rho_max: float):
        """Extend samples geometrically up to rho_max."""
        if rho_max <= self.rho_max + 1e-12:
            return
        start = self.rho_max
        n = int(math.ceil(math.log(rho_max / start) / math.log1p(self.geo_step)))
        new = start * (1.0 + self.geo_step) ** np.arange(1, n + 1)
        new[-1] = rho_max
        vals, Ps, bounds = self._compute(new, self._P[-1])
        self._rho = np.concatenate([self._rho, new])
        self._e0 = np.concatenate([self._e0, vals])
        self._P = np.vstack([self._P, Ps])
        self._bound = np.concatenate([self._bound, bounds])

    def samples(self, rho_hi: float = 1.0):
        self.ensure(rho_hi)
        k = int(np.searchsorted(self._rho, rho_hi * (1 + 1e-12), side="right"))
        return self._rho[:k], self._e0[:k]

    def max_bound(self, rho_hi: float = 1.0) -> float:
        self.ensure(rho_hi)
        k = int(np.searchsorted(self._rho, rho_hi * (1 + 1e-12), side="right"))
        return float(self._bound[:k].max())

    @property
    def converged(self) -> bool:
        return bool(self._bound.max() <= ACCEPT)

    def nearest_P(self, rho):
        k = int(np.clip(np.searchsorted(self._rho, rho), 0, len(self._rho) - 1))
        return self._P[k]

    def e0(self, rho: float) -> float:
        """E0(rho, W) at an arbitrary rho (closed form or warm-started maximization)."""
        if self.symmetric is not None:
            return self.symmetric.e0(float(rho))
        self.ensure(rho)
        return e0_max(rho, self.W, self.nearest_P(rho)).value

    def e0_prime(self, rho: float) -> float:
        """Derivative of E0 at rho along the maximizing input (envelope theorem)."""
        if self.symmetric is not None:
            return self.symmetric.e0_derivative(float(rho))
        P = e0_max(rho, self.W, self.nearest_P(rho)).P
        return e0_tilde_derivative(rho, P, self.W)

    def hull(self, rho_hi: float) -> ConcaveEnvelope:
        key = round(float(rho_hi), 12)
        if key not in self._hulls:
            x, y = self.samples(rho_hi)
            self._hulls[key] = upper_concave_envelope(x, y)
        return self._hulls[key]

    def t_value(self, rho: float, rho_hi: float) -> float:
        """Hull value at rho; on segments that follow the samples the exact E0 is used."""
        if self.symmetric is not None:
            return self.symmetric.e0(float(rho))
        H = self.hull(rho_hi)
        i = H.segment(rho)
        lin = float(np.interp(rho, H.x, H.y))
        if H.is_bridge(i) or rho in (H.x[i], H.x[i + 1]):
            return lin
        return max(lin, self.e0(rho))

    # ------------------------------------------------------------ rates

    @property
    def capacity(self) -> float:
        if "C" not in self._cache:
            self._cache["C"] = capacity(self.channel)[0]
        return self._cache["C"]

    def critical_rate(self, rho_hi: float = 8.0) -> float:
        """Right derivative at rho = 1 of T_sp."""
        if "Rcr" not in self._cache:
            if self.symmetric is not None:
                val = self.symmetric.e0_derivative(1.0)
            else:
                H = self.hull(rho_hi)
                i = H.segment(1.0)
                if H.is_bridge(i):
                    val = float(H.slopes[i])
                else:
                    val = self.e0_prime(1.0)
            self._cache["Rcr"] = float(val)
        return self._cache["Rcr"]

    def critical_rate_fd(self, h: float = 1e-4) -> float:
        """Cross-check of R_cr: one-sided difference on the hull refined near rho = 1."""
        x, y = self.samples(8.0)
        extra = 1.0 + h * np.arange(1, 3)
        vals = np.array([self.e0(r) for r in extra])
        xs = np.concatenate([x, extra])
        ys = np.concatenate([y, vals])
        order = np.argsort(xs)
        xs, ys = xs[order], ys[order]
        keep = np.concatenate([[True], np.diff(xs) > 1e-15])
        H = upper_concave_envelope(xs[keep], ys[keep])
        return H.right_slope(1.0)

    @property
    def r_infinity(self) -> float:
        if "Rinf" not in self._cache:
            self._cache["Rinf"] = r_infinity(self.channel)
        return self._cache["Rinf"]

    @property
    def c0_is_zero(self) -> bool:
        return zero_error_capacity_is_zero(self.channel)

    # ------------------------------------------------------------ expurgated function

    def ex_samples(self):
        """E_x on a geometric grid over [1, RHO_CAP] with the maximizers; cached."""
        if self._ex is None:
            n = self.channel.input_size
            rho = np.geomspace(1.0, RHO_CAP, int(math.log(RHO_CAP) / math.log(1.01)) + 1)
            if self.beta is not None or n == 1:
                beta = 1.0 if n == 1 else self.beta
                vals = equidistant_ex(rho, beta, max(n, 2)) if n > 1 else np.zeros_like(rho)
                Ps = np.full((len(rho), n), 1.0 / n)
                self._ex = (rho, vals, Ps, False)
            else:
                B = bhattacharyya(self.channel)
                anchors = {}
                vals = np.empty(len(rho))
                Ps = np.empty((len(rho), n))
                P1 = e0_max(1.0, self.W).P
                prev = P1
                for k, r in enumerate(rho):
                    M = _pow0(B, 1.0 / r)
                    a = 2 ** int(math.floor(math.log2(r)))
                    starts = [prev, P1]
                    if a not in anchors:
                        anchors[a] = _min_quadform(_pow0(B, 1.0 / a), 200, starts)[1]
                    starts.append(anchors[a])
                    best = (math.inf, None)
                    for s0 in starts:
                        v, P = _refine_quadform(M, s0)
                        if v < best[0]:
                            best = (v, P)
                    vals[k] = -r * math.log2(best[0])
                    Ps[k] = prev = best[1]
                self._ex = (rho, vals, Ps, True)
        return self._ex

    def ex_value(self, rho: float) -> float:
        n = self.channel.input_size
        if self.beta is not None:
            return float(equidistant_ex(rho, self.beta, n))
        if n == 1:
            return 0.0
        xs, _, Ps, _ = self.ex_samples()
        k = int(np.clip(np.searchsorted(xs, rho), 0, len(xs) - 1))
        B = bhattacharyya(self.channel)
        M = _pow0(B, 1.0 / rho)
        best = min(_refine_quadform(M, Ps[j])[0] for j in {max(k - 1, 0), k})
        return float(-rho * math.log2(best))

    def expurgated_rate(self) -> float:
        """Right derivative at rho = 1 of the concave hull of E_x."""
        if "Rex" not in self._cache:
            n = self.channel.input_size
            if self.beta is not None:
                val = equidistant_rex(self.beta, n)
            elif n == 1:
                val = 0.0
            else:
                x, y, Ps, _ = self.ex_samples()
                H = upper_concave_envelope(x, y)
                i = H.segment(1.0)
                if H.is_bridge(i):
                    val = float(H.slopes[i])
                else:
                    val = ex_tilde_derivative(1.0, Ps[0], self.W)
            self._cache["Rex"] = float(val)
        return self._cache["Rex"]

    # ------------------------------------------------------------ conjugates

    def conj(self, R: float, lo: float, hi: float, tol: float = 1e-12):
        """max over lo <= rho <= hi of T(rho) - rho R, T the concave hull of E0; returns (value, rho)."""
        if self.symmetric is not None:
            d = self.symmetric.e0_derivative
            if d(lo) <= R:
                r = lo
            elif d(hi) >= R:
                r = hi
            else:
                r = brentq(lambda x: d(x) - R, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps)
            return float(self.symmetric.e0(r) - r * R), float(r)
        H = self.hull(hi)
        mask = (H.x >= lo - 1e-15) & (H.x <= hi + 1e-15)
        xs = np.concatenate([[lo], H.x[mask], [hi]])
        x, v = bracketed_max(lambda r: self.t_value(r, hi) - r * R, np.unique(xs), tol=1e-10,
                             fvec=lambda g: H(g) - g * R)
        return v, x


@lru_cache(maxsize=256)
def _profile(channel: ChannelSpec, rho_step: float) -> ChannelProfile:
    return ChannelProfile(channel, rho_step)


def channel_profile(W, rho_step: float = 1e-3) -> ChannelProfile:
    return _profile(as_channel(W), float(rho_step))


# ---------------------------------------------------------------- rates and curves


@dataclass(frozen=True)
class ChannelRates:
    capacity: float
    critical_rate: float
    expurgated_rate: float
    r_infinity: float
    zero_error_capacity_is_zero: bool
    expurgated_exact: bool  # E_x maximizer certified (equidistant) rather than searched
    converged: bool


def channel_rates(W, rho_step: float = 1e-3) -> ChannelRates:
    prof = channel_profile(W, rho_step)
    return ChannelRates(
        capacity=prof.capacity,
        critical_rate=prof.critical_rate(),
        expurgated_rate=prof.expurgated_rate(),
        r_infinity=prof.r_infinity,
        zero_error_capacity_is_zero=prof.c0_is_zero,
        expurgated_exact=prof.beta is not None or prof.channel.input_size == 1,
        converged=prof.converged,
    )


@dataclass(frozen=True)
class ChannelCurvePoint:
    R: float
    E_r: float
    E_sp: object  # float or UNBOUNDED
    E_ex: float


def random_coding_exponent(W, R, rho_step=1e-3) -> float:
    """E_r(R, W) = max_{0 <= rho <= 1} [E0(rho, W) - rho R]."""
    prof = channel_profile(W, rho_step)
    return max(prof.conj(float(R), 0.0, 1.0)[0], 0.0)


def sphere_packing_exponent(W, R, rho_step=1e-3):
    """E_sp(R, W) = sup_{rho >= 0} [E0(rho, W) - rho R]; UNBOUNDED for R <= R_inf."""
    prof = channel_profile(W, rho_step)
    R = float(R)
    if R <= prof.r_infinity + 1e-12:
        return UNBOUNDED
    hi = 8.0
    while True:
        v, r = prof.conj(R, 0.0, hi)
        if r < 0.5 * hi or hi >= RHO_CAP:
            return max(v, 0.0)
        hi *= 2.0


def expurgated_exponent(W, R, rho_step=1e-3) -> float:
    """E_ex(R, W) = sup_{rho >= 1} [E_x(rho, W) - rho R]."""
    prof = channel_profile(W, rho_step)
    x, y, _, _ = prof.ex_samples()
    vals = y - x * float(R)
    k = int(np.argmax(vals))
    if k == len(x) - 1 and R <= 0:
        return max(float(vals[k]), 0.0)
    lo, hi = x[max(k - 1, 0)], x[min(k + 1, len(x) - 1)]
    _, v = golden_max(lambda r: prof.ex_value(r) - r * R, float(lo), float(hi), 1e-10)
    return max(float(v), float(vals[k]), 0.0)


def exponent_curves(W, R_grid, rho_step=1e-3) -> list[ChannelCurvePoint]:
    """Channel exponent curves sampled at each rate of R_grid."""
    ch = as_channel(W)
    c0 = zero_error_capacity_is_zero(ch)
    out = []
    for R in np.asarray(R_grid, dtype=float):
        ex = UNBOUNDED if (not c0 and R <= 0) else expurgated_exponent(ch, R, rho_step)
        out.append(ChannelCurvePoint(float(R), random_coding_exponent(ch, R, rho_step),
                                     sphere_packing_exponent(ch, R, rho_step), ex))
    return out
