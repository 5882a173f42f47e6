"""Helpers shared by the model modules."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from ..polygauss import GaussSum, PolyGauss1D, PolyGauss2D

SQRT2 = math.sqrt(2.0)


@lru_cache(maxsize=None)
def normalized_hermite(n: int) -> np.ndarray:
    """Monomial coefficients of H_n(u) / sqrt(2**n n!).

    Built from h_{k+1} = sqrt(2/(k+1)) u h_k - sqrt(k/(k+1)) h_{k-1}, which
    is the physicists' recurrence H_{k+1} = 2u H_k - 2k H_{k-1} with the
    normalization folded in so coefficients stay O(1) for moderate n.
    """
    if n < 0:
        raise ValueError("Hermite degree must be nonnegative")
    prev = np.zeros(1)
    cur = np.ones(1)
    for k in range(n):
        nxt = np.zeros(k + 2)
        nxt[1:] += math.sqrt(2.0 / (k + 1)) * cur
        nxt[: len(prev)] -= math.sqrt(k / (k + 1)) * prev
        prev, cur = cur, nxt
    cur.setflags(write=False)
    return cur


def mul_x(f):
    return f.mul_poly([0.0, 1.0])


def linear_op(f, cx: complex, cd: complex, c0: complex = 0.0):
    """Apply cx * x + cd * d/dx + c0 to a 1D state (or a sum of them)."""
    if isinstance(f, GaussSum):
        return GaussSum(tuple(linear_op(t, cx, cd, c0) for t in f.terms)).simplify()
    out = cx * mul_x(f) + cd * f.differentiate()
    if c0:
        out = out + c0 * f
    return out


def check_index(n) -> int:
    if isinstance(n, tuple):
        if len(n) != 1:
            raise ValueError(f"expected a single quantum number, got {n!r}")
        n = n[0]
    if int(n) != n or n < 0:
        raise ValueError(f"quantum number must be a nonnegative integer, got {n!r}")
    return int(n)


def zero_like(f):
    """Zero function carrying the Gaussian core of ``f``."""
    if isinstance(f, PolyGauss2D):
        return PolyGauss2D(np.zeros((1, 1)), f.ax, f.ay, f.bx, f.by, f.c)
    return PolyGauss1D(np.zeros(1), f.a, f.b, f.c)
