"""Extended Landau levels.

Two commuting pseudo-bosonic pairs (A1, B1), (A2, B2) deformed by k1, k2.
phi_{n,l} = B1^n B2^l phi_00 / sqrt(n! l!) and
psi_{n,l} = (A1^+)^n (A2^+)^l psi_00 / sqrt(n! l!), with Gaussian vacua of
normalization 1/sqrt(2 pi).  The metric is multiplication by
exp(k2 x^2 - k1 y^2) (phi -> psi) and its inverse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import InvalidParameter
from ..polygauss import GaussSum, PolyGauss2D
from ._common import SQRT2

NAME = "landau"
NORM = 1.0 / math.sqrt(2.0 * math.pi)

# (cdx, cdy, cx, cy) of (cdx d/dx + cdy d/dy + cx x + cy y) * sqrt2, per operator,
# as functions of (k1, k2).
_OPS = {
    "A1": lambda k1, k2: (1, -1j, (1 + 2 * k2) / 2, -1j * (1 - 2 * k1) / 2),
    "B1": lambda k1, k2: (-1, -1j, (1 - 2 * k2) / 2, 1j * (1 + 2 * k1) / 2),
    "A2": lambda k1, k2: (-1j, 1, -1j * (1 + 2 * k2) / 2, (1 - 2 * k1) / 2),
    "B2": lambda k1, k2: (-1j, -1, 1j * (1 - 2 * k2) / 2, (1 + 2 * k1) / 2),
}


def _adjoint(coeffs):
    # (c d)^+ = -conj(c) d ; (c x)^+ = conj(c) x
    cdx, cdy, cx, cy = coeffs
    return (-np.conj(cdx), -np.conj(cdy), np.conj(cx), np.conj(cy))


@dataclass(frozen=True)
class LandauParams:
    k1: float
    k2: float

    name = NAME
    dim = 2
    spacing = 1.0

    def __post_init__(self):
        k1, k2 = float(self.k1), float(self.k2)
        if not (abs(k1) < 0.5 and abs(k2) < 0.5):
            raise InvalidParameter(f"k1, k2 must lie in (-1/2, 1/2), got {self.k1!r}, {self.k2!r}")
        object.__setattr__(self, "k1", k1)
        object.__setattr__(self, "k2", k2)

    @property
    def in_quarter(self) -> bool:
        return max(abs(self.k1), abs(self.k2)) < 0.25

    @property
    def period(self) -> float:
        return 2.0 * math.pi

    @staticmethod
    def hamiltonian_eigenvalue(n, l=0) -> float:
        """Eigenvalue of H = B1 A1 on phi_{n,l}; independent of l."""
        return float(_check2((n, l))[0])

    def eigenvalue(self, index) -> float:
        return self.hamiltonian_eigenvalue(*_check2(index))

    # -- states ----------------------------------------------------------
    def vacuum(self, family: str = "phi") -> PolyGauss2D:
        k1, k2 = self.k1, self.k2
        if family == "phi":
            return PolyGauss2D([[NORM]], (1 + 2 * k2) / 4, (1 - 2 * k1) / 4)
        if family == "psi":
            return PolyGauss2D([[NORM]], (1 - 2 * k2) / 4, (1 + 2 * k1) / 4)
        raise ValueError(f"unknown family {family!r}")

    def phi(self, n, l=None) -> PolyGauss2D:
        n, l = _check2((n, l) if l is not None else n)
        return _family(self, n, l, "phi")

    def psi(self, n, l=None) -> PolyGauss2D:
        n, l = _check2((n, l) if l is not None else n)
        return _family(self, n, l, "psi")

    # -- ladder operators ------------------------------------------------
    def ladder_apply(self, f, which: str):
        """Apply one of A1, B1, A2, B2 or their adjoints (suffix ``+`` or ``†``)."""
        which = which.replace("†", "+")
        base = which.rstrip("+")
        coeffs = _OPS[base](self.k1, self.k2)
        if which.endswith("+"):
            coeffs = _adjoint(coeffs)
        return _apply(f, coeffs)

    def h_apply(self, f, j: int):
        """h_j = B_j A_j - 1/2."""
        out = self.ladder_apply(self.ladder_apply(f, f"A{j}"), f"B{j}")
        return out + (-0.5) * f

    def hamiltonian_apply(self, f):
        """H = h_1 + 1/2 = B1 A1."""
        return self.ladder_apply(self.ladder_apply(f, "A1"), "B1")

    def hamiltonian_adjoint_apply(self, f):
        return self.ladder_apply(self.ladder_apply(f, "B1+"), "A1+")

    # -- metric ----------------------------------------------------------
    def metric_weight(self, direction: str = "to_psi") -> tuple[float, float]:
        """(dax, day) increments of the multiplication weight.

        to_psi multiplies by exp(k2 x^2 - k1 y^2); to_phi by the inverse.
        """
        if direction == "to_psi":
            return (-self.k2, self.k1)
        if direction == "to_phi":
            return (self.k2, -self.k1)
        raise ValueError(f"unknown direction {direction!r}")

    def metric_apply(self, f, direction: str = "to_psi"):
        dax, day = self.metric_weight(direction)
        return f.mul_gauss(dax, day)

    def metric_pointwise(self, fn, direction: str = "to_psi"):
        sign = 1.0 if direction == "to_psi" else -1.0
        k1, k2 = self.k1, self.k2

        def weighted(x, y):
            return np.exp(sign * (k2 * x * x - k1 * y * y)) * fn(x, y)

        return weighted

    # -- spectral bookkeeping --------------------------------------------
    def indices(self, nmax: int) -> list[tuple[int, int]]:
        """All (n, l) with n + l <= nmax, ordered by shell then n."""
        return [(n, total - n) for total in range(nmax + 1) for n in range(total + 1)]

    def shell(self, index) -> int:
        n, l = _check2(index)
        return n + l

    def parse_index(self, parts: tuple[int, ...]) -> tuple[int, int]:
        return _check2(parts)


def _check2(index) -> tuple[int, int]:
    if not (isinstance(index, tuple) and len(index) == 2):
        raise ValueError(f"Landau states need an index pair (n, l), got {index!r}")
    n, l = index
    for v in (n, l):
        if int(v) != v or v < 0:
            raise ValueError(f"quantum numbers must be nonnegative integers, got {index!r}")
    return int(n), int(l)


def _apply(f, coeffs):
    if isinstance(f, GaussSum):
        return GaussSum(tuple(_apply(t, coeffs) for t in f.terms)).simplify()
    cdx, cdy, cx, cy = coeffs
    out = None
    for c, term in (
        (cdx, lambda: f.differentiate(0)),
        (cdy, lambda: f.differentiate(1)),
        (cx, f.mul_x),
        (cy, f.mul_y),
    ):
        if c != 0:
            piece = complex(c) * term()
            out = piece if out is None else out + piece
    return (1.0 / SQRT2) * out


@lru_cache(maxsize=None)
def _family(p: LandauParams, n: int, l: int, family: str) -> PolyGauss2D:
    if n == 0 and l == 0:
        return p.vacuum(family)
    up1, up2 = ("B1", "B2") if family == "phi" else ("A1+", "A2+")
    if n > 0:
        prev = _family(p, n - 1, l, family)
        return p.ladder_apply(prev, up1) * (1.0 / math.sqrt(n))
    prev = _family(p, 0, l - 1, family)
    return p.ladder_apply(prev, up2) * (1.0 / math.sqrt(l))
