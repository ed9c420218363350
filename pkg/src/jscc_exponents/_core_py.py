"""Pure numpy versions of the compiled kernels (same signatures and results)."""

import itertools

import numpy as np

LN2 = np.log(2.0)


def arimoto_sweep(rhos, W, p0, tol, max_iter):
    rhos = np.asarray(rhos, dtype=float)
    W = np.asarray(W, dtype=float)
    n, nx = len(rhos), W.shape[0]
    values = np.zeros(n)
    probs = np.empty((n, nx))
    bounds = np.zeros(n)
    iters = np.zeros(n, dtype=np.int64)
    p = np.array(p0, dtype=float)
    pos = W > 0
    for k, rho in enumerate(rhos):
        if rho <= 0:
            probs[k] = p
            continue
        a = np.where(pos, W, 1.0) ** (1.0 / (1.0 + rho)) * pos
        it = 0
        while True:
            al = p @ a
            live = al > 0
            lw = np.full(al.shape, -np.inf)
            lw[live] = rho * np.log(al[live])
            m = lw.max()
            w = np.where(live, np.exp(lw - m), 0.0)
            F = al @ w
            beta = a @ w
            gap = (1.0 + rho) * (1.0 - beta.min() / F)
            bnd = -np.log1p(-gap) / LN2 if gap < 1.0 else np.inf
            if bnd <= tol or it >= max_iter:
                break
            ok = (p > 0) & (beta > 0)
            r = np.full(nx, -np.inf)
            r[ok] = -np.log(beta[ok] / F) / rho
            p = np.where(ok, p * np.exp(r - r[ok].max()), 0.0)
            p /= p.sum()
            it += 1
        values[k] = -(np.log(F) + m) / LN2
        bounds[k] = max(bnd, 0.0)
        iters[k] = it
        probs[k] = p
    return values, probs, bounds, iters


def blahut_arimoto(W, p0, tol, max_iter):
    W = np.asarray(W, dtype=float)
    p = np.array(p0, dtype=float)
    pos = W > 0
    it = 0
    while True:
        q = p @ W
        ratio = np.where(pos, W / np.where(q > 0, q, 1.0)[None, :], 1.0)
        d = np.sum(np.where(pos, W * np.log(ratio), 0.0), axis=1)
        dmax = d.max()
        tot = p @ np.exp(d - dmax)
        lo, hi = dmax + np.log(tot), dmax
        if (hi - lo) / LN2 <= tol or it >= max_iter:
            break
        p = p * np.exp(d - dmax) / tot
        it += 1
    return lo / LN2, p, (hi - lo) / LN2, it


def _compositions(n, k, chunk=200000):
    """Yield arrays of nonnegative integer k-vectors summing to n (stars and bars)."""
    bars = itertools.combinations(range(n + k - 1), k - 1)
    while True:
        block = np.array(list(itertools.islice(bars, chunk)), dtype=np.int64)
        if block.size == 0:
            return
        block = block.reshape(-1, k - 1)
        edges = np.hstack([np.full((len(block), 1), -1), block, np.full((len(block), 1), n + k - 1)])
        yield np.diff(edges, axis=1) - 1


def simplex_grid_min(M, resolution):
    M = np.asarray(M, dtype=float)
    k = M.shape[0]
    if k == 1:
        return float(M[0, 0]), np.ones(1)
    best, vbest = None, np.inf
    for c in _compositions(int(resolution), k):
        c = c.astype(float)
        v = np.einsum("ij,jk,ik->i", c, M, c)
        i = int(np.argmin(v))
        if v[i] < vbest:
            vbest, best = v[i], c[i]
    n = float(resolution)
    return vbest / (n * n), best / n
