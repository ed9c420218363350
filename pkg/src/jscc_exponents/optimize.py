"""Golden-section search helpers for unimodal maximization."""

import math

import numpy as np

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_max(f, a: float, b: float, tol: float = 1e-10, max_iter: int = 300):
    """Maximize a unimodal f on [a, b]; returns (x, f(x)), endpoints included."""
    a0, b0 = a, b
    fa, fb = f(a), f(b)
    if b - a <= tol:
        return (a, fa) if fa >= fb else (b, fb)
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return max(((fa, a0), (fb, b0), (fc, c), (fd, d)), key=lambda p: p[0])[::-1]


def bracketed_max(f, grid, tol: float = 1e-10, fvec=None):
    """Maximize f by taking the best grid point and refining between its neighbours.

    Suited to concave objectives sampled on a grid that contains the domain
    endpoints; ``fvec`` evaluates f on the whole grid at once when given.
    """
    grid = np.asarray(grid, dtype=float)
    vals = np.asarray(fvec(grid), dtype=float) if fvec is not None else np.array([f(g) for g in grid])
    i = int(np.nanargmax(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    x, fx = golden_max(f, float(lo), float(hi), tol)
    if vals[i] > fx:
        return float(grid[i]), float(vals[i])
    return float(x), float(fx)
