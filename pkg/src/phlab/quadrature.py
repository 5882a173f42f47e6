"""Adaptive Romberg quadrature for Gaussian-decaying integrands.

This is the independent witness for the closed-form inner products: it only
ever sees point values of the integrand, never its polynomial/Gaussian
structure.  The infinite line is truncated to [-L, L] and the composite
trapezoid rule is refined by doubling, with Richardson extrapolation
(Romberg) supplying both the value and the error estimate.
"""

from __future__ import annotations

import cmath
import math
from typing import Callable

import numpy as np

__all__ = ["integrate_1d", "integrate_2d", "ToleranceNotMet", "InvalidDecay"]

MAX_DOUBLINGS = 24
MAX_DOUBLINGS_2D = 12  # (2^12 + 1)^2 nodes is the memory ceiling
# Truncation always targets this floor so the node sequence, and hence the
# error estimate, does not depend on the requested tolerance.
TAIL_TOL = 1e-17
_STALL_LEVELS = 4
_MIN_LEVEL = 4
_CHUNK = 1 << 20


class ToleranceNotMet(ArithmeticError):
    """Refinement stopped improving before reaching the tolerance."""


class InvalidDecay(ValueError):
    """Nonpositive decay rate (the integral would diverge)."""


def _half_width(fn, decay: float, axis_probe) -> float:
    """Truncation half-width L = sqrt(ln(10 scale / TAIL_TOL) / decay).

    ``scale`` is the integrand magnitude on a coarse probe; L is then pushed
    outwards until the integrand at +-L is below the tail floor, which covers
    Gaussians whose centre is displaced from the origin.
    """
    probe = np.linspace(-8.0, 8.0, 161) / math.sqrt(decay)
    scale = max(float(np.max(np.abs(axis_probe(probe)))), 1e-300)
    L = math.sqrt(max(math.log(10.0 * scale / TAIL_TOL), 1.0) / decay)
    for _ in range(60):
        edge = np.abs(axis_probe(np.array([-L, L])))
        if not np.all(np.isfinite(edge)):
            raise ToleranceNotMet(f"integrand not finite at truncation edge L = {L:.3g}")
        if np.max(edge) * L < TAIL_TOL * max(scale, 1.0):
            break
        L *= 1.25
    return L


def _romberg(levels, max_level: int, tol: float):
    """Drive a Romberg table from a generator of trapezoid sums."""
    table: list[list[complex]] = []
    best_err = math.inf
    best_val = 0j
    stalled = 0
    for k, trap in enumerate(levels):
        if not cmath.isfinite(trap):
            raise ToleranceNotMet(f"non-finite trapezoid sum at level {k}")
        row = [trap]
        for j in range(1, k + 1):
            prev = row[j - 1]
            row.append(prev + (prev - table[k - 1][j - 1]) / (4.0**j - 1.0))
        table.append(row)
        if k == 0:
            continue
        err = abs(row[k] - table[k - 1][k - 1])
        if err < best_err:
            best_err, best_val = err, row[k]
            stalled = 0
        else:
            stalled += 1
        if k >= _MIN_LEVEL and best_err <= tol:
            return best_val, best_err
        if k >= _MIN_LEVEL + 6 and stalled >= _STALL_LEVELS:
            break
        if k >= max_level:
            break
    raise ToleranceNotMet(f"error estimate {best_err:.3g} above tolerance {tol:.3g}")


def integrate_1d(
    f: Callable[[np.ndarray], np.ndarray], decay_rate: float, tol: float = 1e-10
) -> tuple[complex, float]:
    """Integrate a complex function over the real line.

    Parameters
    ----------
    f : callable
        Vectorized integrand; must decay at least like exp(-decay_rate x^2).
    decay_rate : float
        Positive lower bound on the Gaussian decay of ``|f|``.
    tol : float
        Absolute tolerance on the returned value.

    Returns
    -------
    (value, err_estimate)
    """
    if not decay_rate > 0:
        raise InvalidDecay(f"decay rate must be positive, got {decay_rate!r}")
    L = _half_width(f, decay_rate, f)
    n0 = 16

    def levels():
        x = np.linspace(-L, L, n0 + 1)
        vals = np.asarray(f(x), dtype=complex)
        h = 2 * L / n0
        total = vals.sum() - 0.5 * (vals[0] + vals[-1])
        yield h * total
        n = n0
        while True:
            h /= 2
            # Chunked so deep refinement levels stay within memory.
            for start in range(0, n, _CHUNK):
                k = np.arange(start, min(n, start + _CHUNK))
                total += np.asarray(f(-L + h * (2 * k + 1)), dtype=complex).sum()
            n *= 2
            yield h * total

    val, err = _romberg(levels(), MAX_DOUBLINGS, tol)
    return complex(val), float(err)


def integrate_2d(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    decay_x: float,
    decay_y: float,
    tol: float = 1e-10,
) -> tuple[complex, float]:
    """Tensor-product Romberg rule on [-Lx, Lx] x [-Ly, Ly]."""
    if not (decay_x > 0 and decay_y > 0):
        raise InvalidDecay(f"decay rates must be positive, got {decay_x!r}, {decay_y!r}")
    Lx = _half_width(f, decay_x, lambda x: np.max(np.abs(f(x[:, None], _probe(decay_y)[None, :])), axis=1))
    Ly = _half_width(f, decay_y, lambda y: np.max(np.abs(f(_probe(decay_x)[:, None], y[None, :])), axis=0))
    n0 = 16

    def levels():
        n = n0
        while True:
            x = np.linspace(-Lx, Lx, n + 1)
            y = np.linspace(-Ly, Ly, n + 1)
            wx = np.full(n + 1, 2 * Lx / n)
            wy = np.full(n + 1, 2 * Ly / n)
            wx[[0, -1]] *= 0.5
            wy[[0, -1]] *= 0.5
            vals = np.asarray(f(x[:, None], y[None, :]), dtype=complex)
            yield complex(wx @ vals @ wy)
            n *= 2

    val, err = _romberg(levels(), MAX_DOUBLINGS_2D, tol)
    return complex(val), float(err)


def _probe(decay: float) -> np.ndarray:
    return np.linspace(-8.0, 8.0, 81) / math.sqrt(decay)
