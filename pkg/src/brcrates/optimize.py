"""Bounded maximisers over [0, 1] and [0, 1]^2.

Both scan a coarse grid first and then refine locally; ties go to the
smaller parameter value so repeated runs pick the same argmax.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f: Callable[[float], float], lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Golden-section search for the maximum of a unimodal ``f`` on ``[lo, hi]``."""
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _grid(lo: float, hi: float, step: float) -> np.ndarray:
    n = int(round((hi - lo) / step))
    pts = lo + step * np.arange(n + 1)
    pts[-1] = hi
    return pts


def maximize_1d(
    f: Callable[[float], float],
    coarse_step: float = 1e-2,
    refine_tol: float = 1e-5,
    lo: float = 0.0,
    hi: float = 1.0,
) -> tuple[float, float]:
    """Maximise ``f`` on ``[lo, hi]``; returns ``(x_star, f_star)``."""
    if not 0 < coarse_step < hi - lo + 1e-15:
        raise ValueError(f"coarse_step must lie in (0, {hi - lo}], got {coarse_step}")
    if refine_tol <= 0:
        raise ValueError("refine_tol must be positive")
    xs = _grid(lo, hi, coarse_step)
    vals = np.array([f(float(x)) for x in xs])
    i = int(np.argmax(vals))
    x_best, f_best = float(xs[i]), float(vals[i])
    left = float(xs[max(i - 1, 0)])
    right = float(xs[min(i + 1, len(xs) - 1)])
    if right - left > refine_tol:
        x, fx = golden_section_max(f, left, right, refine_tol)
        # accept the refinement only if strictly better, so plateaus keep the smaller grid point
        if fx > f_best:
            x_best, f_best = float(x), float(fx)
    return x_best, f_best


def maximize_2d(
    f: Callable,
    coarse_step: float = 1e-2,
    refine_tol: float = 1e-5,
    vectorized: bool = False,
    shrink: int = 10,
) -> tuple[float, float, float]:
    """Maximise ``f(x, y)`` on the unit square by grid scan plus local grid refinement.

    With ``vectorized=True`` the function is called once per grid with
    broadcastable arrays. Returns ``(x_star, y_star, f_star)``.
    """

    def evaluate(xs, ys):
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        if vectorized:
            return np.broadcast_to(np.asarray(f(X, Y), dtype=float), X.shape)
        return np.vectorize(lambda a, b: float(f(float(a), float(b))))(X, Y)

    xs = ys = _grid(0.0, 1.0, coarse_step)
    vals = evaluate(xs, ys)
    i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
    x_best, y_best, f_best = float(xs[i]), float(ys[j]), float(vals[i, j])
    step = coarse_step
    while step > refine_tol:
        fine = step / shrink
        xs = _grid(max(x_best - step, 0.0), min(x_best + step, 1.0), fine)
        ys = _grid(max(y_best - step, 0.0), min(y_best + step, 1.0), fine)
        vals = evaluate(xs, ys)
        i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
        if vals[i, j] > f_best:
            x_best, y_best, f_best = float(xs[i]), float(ys[j]), float(vals[i, j])
        step = fine
    return x_best, y_best, f_best
