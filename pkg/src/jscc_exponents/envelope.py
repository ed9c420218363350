"""Least concave majorants of sampled functions, and the hulls T_r and T_sp of E0."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class ConcaveEnvelope:
    """Piecewise-linear concave majorant through ``knots``.

    ``index`` maps each knot back to its position in the original samples, so
    a segment whose knots are not adjacent samples is a bridge over a dip.
    """

    x: np.ndarray
    y: np.ndarray
    index: np.ndarray

    @property
    def knots(self):
        return list(zip(self.x.tolist(), self.y.tolist()))

    @property
    def domain(self):
        return float(self.x[0]), float(self.x[-1])

    @property
    def slopes(self):
        return np.diff(self.y) / np.diff(self.x)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        lo, hi = self.domain
        if np.any(t < lo - 1e-12) or np.any(t > hi + 1e-12):
            raise ValueError(f"evaluation outside envelope domain [{lo}, {hi}]")
        v = np.interp(t, self.x, self.y)
        return float(v) if v.ndim == 0 else v

    def segment(self, t: float) -> int:
        """Index i of the segment [x_i, x_{i+1}] holding t (right-continuous)."""
        i = int(np.searchsorted(self.x, t, side="right")) - 1
        return min(max(i, 0), len(self.x) - 2)

    def is_bridge(self, i: int) -> bool:
        return bool(self.index[i + 1] - self.index[i] > 1)

    def right_slope(self, t: float) -> float:
        return float(self.slopes[self.segment(t)])

    def left_slope(self, t: float) -> float:
        i = int(np.searchsorted(self.x, t, side="left")) - 1
        return float(self.slopes[min(max(i, 0), len(self.x) - 2)])

    def excess(self, xs, ys):
        """Envelope minus samples; nonnegative by construction."""
        return self(xs) - np.asarray(ys, dtype=float)

    def conjugate(self, R):
        """max over the domain of env(x) - x R, attained at a knot; vectorized over R."""
        R = np.atleast_1d(np.asarray(R, dtype=float))
        vals = self.y[None, :] - self.x[None, :] * R[:, None]
        k = np.argmax(vals, axis=1)
        return vals[np.arange(len(R)), k], self.x[k]


def upper_concave_envelope(x, y=None) -> ConcaveEnvelope:
    """Upper hull of (x, y) samples by the monotone chain; x strictly increasing.

    Accepts either two arrays or a single sequence of (x, y) pairs.
    """
    if y is None:
        pts = np.asarray(x, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError("samples must be (x, y) pairs")
        x, y = pts[:, 0], pts[:, 1]
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or x.size < 2:
        raise ValueError("need at least two samples with matching x and y")
    if np.any(np.diff(x) <= 0):
        raise ValueError("sample abscissae must be strictly increasing (unsorted or duplicate x)")
    hull = []
    for i in range(x.size):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            cross = (x[b] - x[a]) * (y[i] - y[a]) - (y[b] - y[a]) * (x[i] - x[a])
            if cross >= 0:
                hull.pop()
            else:
                break
        hull.append(i)
    idx = np.array(hull, dtype=np.int64)
    return ConcaveEnvelope(x[idx].copy(), y[idx].copy(), idx)


def t_r(W, rho_step: float = 1e-3) -> ConcaveEnvelope:
    """T_r: concave hull of rho -> E0(rho, W) on [0, 1]."""
    from .channel import channel_profile

    return channel_profile(W, rho_step).hull(1.0)


def t_sp(W, rho_max: float = 8.0, rho_step: float = 1e-3) -> ConcaveEnvelope:
    """T_sp: concave hull of rho -> E0(rho, W) on [0, rho_max]."""
    from .channel import channel_profile

    return channel_profile(W, rho_step).hull(rho_max)
