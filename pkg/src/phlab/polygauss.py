"""Exact calculus on polynomial-times-Gaussian functions.

A :class:`PolyGauss1D` represents

    f(x) = P(x) * exp(-a x**2 + b x + c)

with complex polynomial coefficients and complex ``a, b, c``.  The 2D
analogue :class:`PolyGauss2D` is separable in the exponent (no ``x*y``
term), which covers every Landau-level state.  Inner products are
evaluated in closed form through Gaussian moments.

All objects are immutable; every operation returns a new object.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import DivergentIntegral, ZeroScale

__all__ = [
    "DivergentIntegral",
    "ZeroScale",
    "PolyGauss1D",
    "PolyGauss2D",
    "GaussSum",
    "gaussian_moment",
    "gaussian_moments",
    "inner_batch",
    "is_integrable",
    "inner",
]

# Relative slack on the convergence predicate Re(a) > 0.  Exponents that are
# analytically zero (e.g. cos(pi/2)) come out as ~1e-17 in floating point and
# must still be reported as divergent.
CONVERGENCE_RTOL = 1e-12


def is_integrable(a: complex) -> bool:
    """Decide whether exp(-a x**2) decays along the real line."""
    return a.real > CONVERGENCE_RTOL * abs(a)


def gaussian_moments(nmax: int, alpha: complex, beta: complex) -> np.ndarray:
    """Moments M_k = int x**k exp(-alpha x**2 + beta x) dx for k = 0..nmax.

    Uses M_0 = sqrt(pi/alpha) exp(beta**2 / (4 alpha)), M_1 = beta/(2 alpha) M_0
    and M_k = (beta M_{k-1} + (k-1) M_{k-2}) / (2 alpha).  The principal square
    root is safe because Re(alpha) > 0 keeps alpha off the negative real axis.
    """
    alpha = complex(alpha)
    beta = complex(beta)
    if not is_integrable(alpha):
        raise DivergentIntegral(f"Re(alpha) = {alpha.real:.3g} <= 0")
    out = np.empty(nmax + 1, dtype=complex)
    out[0] = cmath.sqrt(math.pi / alpha) * cmath.exp(beta * beta / (4 * alpha))
    if nmax >= 1:
        out[1] = beta / (2 * alpha) * out[0]
    for k in range(2, nmax + 1):
        out[k] = (beta * out[k - 1] + (k - 1) * out[k - 2]) / (2 * alpha)
    return out


def gaussian_moment(n: int, alpha: complex, beta: complex) -> complex:
    """Single moment int x**n exp(-alpha x**2 + beta x) dx."""
    if n < 0:
        raise ValueError("moment order must be nonnegative")
    return complex(gaussian_moments(n, alpha, beta)[n])


def _trim(p: np.ndarray) -> np.ndarray:
    """Drop trailing zero coefficients (keeps at least one entry)."""
    p = np.asarray(p, dtype=complex)
    nz = np.flatnonzero(p)
    if nz.size == 0:
        return np.zeros(1, dtype=complex)
    return p[: nz[-1] + 1].copy()


def _readonly(p: np.ndarray) -> np.ndarray:
    p.setflags(write=False)
    return p


@dataclass(frozen=True, eq=False)
class PolyGauss1D:
    """P(x) exp(-a x^2 + b x + c), poly indexed by degree."""

    poly: np.ndarray
    a: complex = 0.5
    b: complex = 0.0
    c: complex = 0.0

    def __post_init__(self):
        object.__setattr__(self, "poly", _readonly(_trim(self.poly)))
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))
        object.__setattr__(self, "c", complex(self.c))

    # -- basic queries ---------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.poly) - 1

    @property
    def is_zero(self) -> bool:
        return not np.any(self.poly)

    @property
    def exponent(self) -> tuple[complex, complex, complex]:
        return (self.a, self.b, self.c)

    def is_square_integrable(self) -> bool:
        return is_integrable(self.a)

    def __call__(self, x):
        x = np.asarray(x)
        return np.polynomial.polynomial.polyval(x, self.poly) * np.exp(
            -self.a * x * x + self.b * x + self.c
        )

    def same_exponent(self, other: "PolyGauss1D", tol: float = 1e-13) -> bool:
        """Equal Gaussian cores; the additive constant c is not compared."""
        return all(
            abs(u - v) <= tol * max(1.0, abs(u), abs(v))
            for u, v in zip(self.exponent[:2], other.exponent[:2])
        )

    def normalized(self) -> "PolyGauss1D":
        """Same function with the additive constant folded into the poly."""
        return PolyGauss1D(self.poly * cmath.exp(self.c), self.a, self.b, 0.0)

    # -- algebra ---------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, PolyGauss1D) and self.same_exponent(other):
            lhs = self.normalized().poly
            rhs = other.normalized().poly
            n = max(len(lhs), len(rhs))
            out = np.zeros(n, dtype=complex)
            out[: len(lhs)] += lhs
            out[: len(rhs)] += rhs
            return PolyGauss1D(out, self.a, self.b, 0.0)
        return GaussSum([self]) + other

    def __sub__(self, other):
        return self + (-1.0) * other

    def __mul__(self, scalar):
        if isinstance(scalar, (int, float, complex, np.number)):
            return PolyGauss1D(self.poly * scalar, self.a, self.b, self.c)
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        return (-1.0) * self

    def differentiate(self) -> "PolyGauss1D":
        """d/dx: P' + (-2 a x + b) P, same exponent."""
        p = self.poly
        out = np.zeros(len(p) + 1, dtype=complex)
        out[: len(p) - 1] += p[1:] * np.arange(1, len(p))
        out[: len(p)] += self.b * p
        out[1:] += -2.0 * self.a * p
        return PolyGauss1D(out, self.a, self.b, self.c)

    def mul_poly(self, q: Sequence[complex]) -> "PolyGauss1D":
        q = np.asarray(q, dtype=complex)
        if q.size == 0 or not np.any(q):
            return PolyGauss1D(np.zeros(1), self.a, self.b, self.c)
        return PolyGauss1D(np.convolve(self.poly, q), self.a, self.b, self.c)

    def mul_gauss(self, da: complex = 0.0, db: complex = 0.0, dc: complex = 0.0) -> "PolyGauss1D":
        """Multiply by exp(-da x^2 + db x + dc)."""
        return PolyGauss1D(self.poly, self.a + da, self.b + db, self.c + dc)

    def scale_arg(self, lam: complex, prefactor: complex = 1.0) -> "PolyGauss1D":
        """prefactor * f(lam * x), valid for complex lam by analyticity."""
        lam = complex(lam)
        if lam == 0:
            raise ZeroScale("cannot scale the argument by zero")
        powers = lam ** np.arange(len(self.poly))
        return PolyGauss1D(
            self.poly * powers * prefactor, self.a * lam * lam, self.b * lam, self.c
        )

    def conjugate(self) -> "PolyGauss1D":
        return PolyGauss1D(
            np.conj(self.poly), self.a.conjugate(), self.b.conjugate(), self.c.conjugate()
        )

    def allclose(self, other: "PolyGauss1D", atol: float = 1e-12) -> bool:
        """Coefficient-level equality after folding c into the poly."""
        return residual(self, other) <= atol

    def __repr__(self):
        return (
            f"PolyGauss1D(deg={self.degree}, a={self.a:.6g}, b={self.b:.6g}, c={self.c:.6g})"
        )


@dataclass(frozen=True, eq=False)
class PolyGauss2D:
    """P(x, y) exp(-ax x^2 - ay y^2 + bx x + by y + c).

    ``poly[i, j]`` multiplies ``x**i * y**j``.
    """

    poly: np.ndarray
    ax: complex = 0.5
    ay: complex = 0.5
    bx: complex = 0.0
    by: complex = 0.0
    c: complex = 0.0

    def __post_init__(self):
        p = np.atleast_2d(np.asarray(self.poly, dtype=complex))
        rows = np.flatnonzero(np.any(p != 0, axis=1))
        cols = np.flatnonzero(np.any(p != 0, axis=0))
        if rows.size == 0:
            p = np.zeros((1, 1), dtype=complex)
        else:
            p = p[: rows[-1] + 1, : cols[-1] + 1].copy()
        object.__setattr__(self, "poly", _readonly(p))
        for name in ("ax", "ay", "bx", "by", "c"):
            object.__setattr__(self, name, complex(getattr(self, name)))

    @property
    def is_zero(self) -> bool:
        return not np.any(self.poly)

    @property
    def exponent(self) -> tuple[complex, ...]:
        return (self.ax, self.ay, self.bx, self.by, self.c)

    def is_square_integrable(self) -> bool:
        return is_integrable(self.ax) and is_integrable(self.ay)

    def __call__(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x), np.asarray(y))
        val = np.polynomial.polynomial.polyval2d(x, y, self.poly)
        return val * np.exp(
            -self.ax * x * x - self.ay * y * y + self.bx * x + self.by * y + self.c
        )

    def same_exponent(self, other: "PolyGauss2D", tol: float = 1e-13) -> bool:
        return all(
            abs(u - v) <= tol * max(1.0, abs(u), abs(v))
            for u, v in zip(self.exponent[:4], other.exponent[:4])
        )

    def normalized(self) -> "PolyGauss2D":
        return PolyGauss2D(self.poly * cmath.exp(self.c), self.ax, self.ay, self.bx, self.by, 0.0)

    def _with(self, poly) -> "PolyGauss2D":
        return PolyGauss2D(poly, self.ax, self.ay, self.bx, self.by, self.c)

    def __add__(self, other):
        if isinstance(other, PolyGauss2D) and self.same_exponent(other):
            lhs = self.normalized().poly
            rhs = other.normalized().poly
            shape = (max(lhs.shape[0], rhs.shape[0]), max(lhs.shape[1], rhs.shape[1]))
            out = np.zeros(shape, dtype=complex)
            out[: lhs.shape[0], : lhs.shape[1]] += lhs
            out[: rhs.shape[0], : rhs.shape[1]] += rhs
            return PolyGauss2D(out, self.ax, self.ay, self.bx, self.by, 0.0)
        return GaussSum([self]) + other

    def __sub__(self, other):
        return self + (-1.0) * other

    def __mul__(self, scalar):
        if isinstance(scalar, (int, float, complex, np.number)):
            return self._with(self.poly * scalar)
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        return (-1.0) * self

    def differentiate(self, axis: int) -> "PolyGauss2D":
        """Partial derivative along ``axis`` (0 for x, 1 for y)."""
        p = self.poly
        if axis == 0:
            a, b = self.ax, self.bx
        elif axis == 1:
            a, b = self.ay, self.by
            p = p.T
        else:
            raise ValueError("axis must be 0 or 1")
        n = p.shape[0]
        out = np.zeros((n + 1, p.shape[1]), dtype=complex)
        out[: n - 1] += p[1:] * np.arange(1, n)[:, None]
        out[:n] += b * p
        out[1:] += -2.0 * a * p
        if axis == 1:
            out = out.T
        return self._with(out)

    def mul_poly(self, q) -> "PolyGauss2D":
        """Multiply by a polynomial given as a 2D coefficient array."""
        q = np.atleast_2d(np.asarray(q, dtype=complex))
        p = self.poly
        out = np.zeros((p.shape[0] + q.shape[0] - 1, p.shape[1] + q.shape[1] - 1), dtype=complex)
        for (i, j), v in np.ndenumerate(q):
            if v != 0:
                out[i : i + p.shape[0], j : j + p.shape[1]] += v * p
        return self._with(out)

    def mul_x(self) -> "PolyGauss2D":
        return self.mul_poly([[0.0], [1.0]])

    def mul_y(self) -> "PolyGauss2D":
        return self.mul_poly([[0.0, 1.0]])

    def mul_gauss(self, dax=0.0, day=0.0, dbx=0.0, dby=0.0, dc=0.0) -> "PolyGauss2D":
        return PolyGauss2D(
            self.poly, self.ax + dax, self.ay + day, self.bx + dbx, self.by + dby, self.c + dc
        )

    def conjugate(self) -> "PolyGauss2D":
        return PolyGauss2D(
            np.conj(self.poly),
            self.ax.conjugate(),
            self.ay.conjugate(),
            self.bx.conjugate(),
            self.by.conjugate(),
            self.c.conjugate(),
        )

    def allclose(self, other: "PolyGauss2D", atol: float = 1e-12) -> bool:
        return residual(self, other) <= atol

    def __repr__(self):
        return f"PolyGauss2D(shape={self.poly.shape}, ax={self.ax:.6g}, ay={self.ay:.6g})"


PolyGauss = Union[PolyGauss1D, PolyGauss2D]


@dataclass(frozen=True, eq=False)
class GaussSum:
    """Finite sum of PolyGauss terms with distinct exponents.

    Arises when a superposition mixes states from families with different
    Gaussian cores, e.g. phi_0 + psi_1.
    """

    terms: tuple = field(default_factory=tuple)

    def __post_init__(self):
        merged: list = []
        for t in self.terms:
            for i, m in enumerate(merged):
                if type(m) is type(t) and m.same_exponent(t):
                    merged[i] = m + t
                    break
            else:
                merged.append(t)
        object.__setattr__(self, "terms", tuple(merged))

    def __add__(self, other):
        if isinstance(other, GaussSum):
            return GaussSum(self.terms + other.terms)
        return GaussSum(self.terms + (other,))

    __radd__ = __add__

    def __mul__(self, scalar):
        return GaussSum(tuple(scalar * t for t in self.terms))

    __rmul__ = __mul__

    def __call__(self, *args):
        return sum(t(*args) for t in self.terms)

    def simplify(self):
        """Collapse to a bare PolyGauss when only one exponent is present."""
        return self.terms[0] if len(self.terms) == 1 else self

    def map(self, fn) -> "GaussSum":
        return GaussSum(tuple(fn(t) for t in self.terms))

    # Term-wise lifts of the linear operations.
    def conjugate(self):
        return self.map(lambda t: t.conjugate())

    def differentiate(self, *args):
        return self.map(lambda t: t.differentiate(*args))

    def mul_gauss(self, *args, **kw):
        return self.map(lambda t: t.mul_gauss(*args, **kw))

    def scale_arg(self, *args, **kw):
        return self.map(lambda t: t.scale_arg(*args, **kw))

    def mul_poly(self, q):
        return self.map(lambda t: t.mul_poly(q))

    def is_square_integrable(self) -> bool:
        return all(t.is_square_integrable() for t in self.terms)

    @property
    def is_zero(self) -> bool:
        return all(t.is_zero for t in self.terms)


def _terms(f) -> Iterable:
    return f.terms if isinstance(f, GaussSum) else (f,)


def _inner1d(f: PolyGauss1D, g: PolyGauss1D) -> complex:
    if f.is_zero or g.is_zero:
        return 0j
    a = f.a.conjugate() + g.a
    b = f.b.conjugate() + g.b
    c = f.c.conjugate() + g.c
    if not is_integrable(a):
        raise DivergentIntegral(f"combined exponent has Re(a) = {a.real:.3g} <= 0")
    # Substituting x = s*u with s = 1/sqrt(a) rotates the contour onto the
    # direction where the Gaussian is real, which keeps the moment sum
    # well conditioned for high-degree rotated Hermite products.
    s = 1.0 / cmath.sqrt(a)
    poly = np.convolve(np.conj(f.poly), g.poly) * s ** np.arange(len(f.poly) + len(g.poly) - 1)
    moments = gaussian_moments(len(poly) - 1, 1.0, b * s)
    return complex(s * cmath.exp(c) * np.dot(poly, moments))


def _inner2d(f: PolyGauss2D, g: PolyGauss2D) -> complex:
    if f.is_zero or g.is_zero:
        return 0j
    ax = f.ax.conjugate() + g.ax
    ay = f.ay.conjugate() + g.ay
    bx = f.bx.conjugate() + g.bx
    by = f.by.conjugate() + g.by
    c = f.c.conjugate() + g.c
    if not (is_integrable(ax) and is_integrable(ay)):
        raise DivergentIntegral(
            f"combined exponent has Re(ax) = {ax.real:.3g}, Re(ay) = {ay.real:.3g}"
        )
    pf, pg = np.conj(f.poly), g.poly
    shape = (pf.shape[0] + pg.shape[0] - 1, pf.shape[1] + pg.shape[1] - 1)
    prod = np.zeros(shape, dtype=complex)
    for (i, j), v in np.ndenumerate(pf):
        if v != 0:
            prod[i : i + pg.shape[0], j : j + pg.shape[1]] += v * pg
    sx = 1.0 / cmath.sqrt(ax)
    sy = 1.0 / cmath.sqrt(ay)
    mx = gaussian_moments(shape[0] - 1, 1.0, bx * sx) * sx ** np.arange(shape[0])
    my = gaussian_moments(shape[1] - 1, 1.0, by * sy) * sy ** np.arange(shape[1])
    return complex(sx * sy * cmath.exp(c) * (mx @ prod @ my))


def inner(f, g) -> complex:
    """Closed-form <f, g> = int conj(f) g, conjugate-linear in ``f``.

    Raises :class:`DivergentIntegral` when any contributing pair has a
    combined exponent without decay.
    """
    total = 0j
    for u in _terms(f):
        for v in _terms(g):
            if isinstance(u, PolyGauss1D) and isinstance(v, PolyGauss1D):
                total += _inner1d(u, v)
            elif isinstance(u, PolyGauss2D) and isinstance(v, PolyGauss2D):
                total += _inner2d(u, v)
            else:
                raise TypeError("cannot pair 1D and 2D states")
    return total


def inner_batch(fs: Sequence, g) -> np.ndarray:
    """Vector of ``inner(f, g)`` for many ``f`` sharing one Gaussian core.

    Equivalent to ``[inner(f, g) for f in fs]`` but forms the moment table
    once, which makes whole-family expansions cheap.  The additive constants
    ``c`` of the ``fs`` may differ.
    """
    fs = list(fs)
    if not fs:
        return np.zeros(0, dtype=complex)
    head = fs[0]
    if any(not head.same_exponent(f) for f in fs[1:]):
        raise ValueError("inner_batch needs a common Gaussian core")
    cs = np.array([f.c.conjugate() for f in fs])
    out = np.zeros(len(fs), dtype=complex)
    for v in _terms(g):
        if isinstance(head, PolyGauss1D):
            out += _batch1d(fs, head, v)
        else:
            out += _batch2d(fs, head, v)
    return out * np.exp(cs - head.c.conjugate())


def _hankel(moments: np.ndarray, rows: int, cols: int) -> np.ndarray:
    idx = np.arange(rows)[:, None] + np.arange(cols)[None, :]
    return moments[idx]


def _batch1d(fs, head: PolyGauss1D, g: PolyGauss1D) -> np.ndarray:
    if g.is_zero:
        return np.zeros(len(fs), dtype=complex)
    a = head.a.conjugate() + g.a
    b = head.b.conjugate() + g.b
    c = head.c.conjugate() + g.c
    if not is_integrable(a):
        raise DivergentIntegral(f"combined exponent has Re(a) = {a.real:.3g} <= 0")
    df = max(len(f.poly) for f in fs)
    P = np.zeros((len(fs), df), dtype=complex)
    for k, f in enumerate(fs):
        P[k, : len(f.poly)] = np.conj(f.poly)
    s = 1.0 / cmath.sqrt(a)
    m = gaussian_moments(df + len(g.poly) - 2, 1.0, b * s) * s ** np.arange(df + len(g.poly) - 1)
    w = _hankel(m, df, len(g.poly)) @ g.poly
    return s * cmath.exp(c) * (P @ w)


def _batch2d(fs, head: PolyGauss2D, g: PolyGauss2D) -> np.ndarray:
    if g.is_zero:
        return np.zeros(len(fs), dtype=complex)
    ax = head.ax.conjugate() + g.ax
    ay = head.ay.conjugate() + g.ay
    bx = head.bx.conjugate() + g.bx
    by = head.by.conjugate() + g.by
    c = head.c.conjugate() + g.c
    if not (is_integrable(ax) and is_integrable(ay)):
        raise DivergentIntegral(
            f"combined exponent has Re(ax) = {ax.real:.3g}, Re(ay) = {ay.real:.3g}"
        )
    dx = max(f.poly.shape[0] for f in fs)
    dy = max(f.poly.shape[1] for f in fs)
    P = np.zeros((len(fs), dx, dy), dtype=complex)
    for k, f in enumerate(fs):
        P[k, : f.poly.shape[0], : f.poly.shape[1]] = np.conj(f.poly)
    gx, gy = g.poly.shape
    sx = 1.0 / cmath.sqrt(ax)
    sy = 1.0 / cmath.sqrt(ay)
    mx = gaussian_moments(dx + gx - 2, 1.0, bx * sx) * sx ** np.arange(dx + gx - 1)
    my = gaussian_moments(dy + gy - 2, 1.0, by * sy) * sy ** np.arange(dy + gy - 1)
    w = _hankel(mx, dx, gx) @ g.poly @ _hankel(my, dy, gy).T
    return sx * sy * cmath.exp(c) * np.einsum("kij,ij->k", P, w)


def residual(f, g) -> float:
    """Max coefficient deviation between two PolyGauss objects.

    Exponents must agree; the additive constant is folded into the poly
    first.  Returns ``inf`` if the Gaussian cores differ.
    """
    if type(f) is not type(g):
        return math.inf
    if f.is_zero and g.is_zero:
        return 0.0
    if f.is_zero or g.is_zero:
        other = g if f.is_zero else f
        return float(np.max(np.abs(other.normalized().poly)))
    if not f.same_exponent(g):
        return math.inf
    p = f.normalized().poly
    q = g.normalized().poly
    if p.ndim == 1:
        n = max(len(p), len(q))
        d = np.zeros(n, dtype=complex)
        d[: len(p)] += p
        d[: len(q)] -= q
    else:
        shape = (max(p.shape[0], q.shape[0]), max(p.shape[1], q.shape[1]))
        d = np.zeros(shape, dtype=complex)
        d[: p.shape[0], : p.shape[1]] += p
        d[: q.shape[0], : q.shape[1]] -= q
    return float(np.max(np.abs(d)))
