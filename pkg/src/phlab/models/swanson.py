"""Swanson model with omega_theta = 1/cos(2 theta).

Eigenfunctions are oscillator states with a complex-rotated argument,
phi_n(x) ~ H_n(e^{i theta} x) exp(-e^{2 i theta} x^2 / 2) and psi_n its
complex conjugate.  The metric maps one family onto the other by the
dilation (S_psi f)(x) = e^{-i theta} f(e^{-2 i theta} x); its inverse uses
the opposite angle.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import InvalidParameter
from ..polygauss import PolyGauss1D
from ._common import SQRT2, check_index, linear_op, normalized_hermite

NAME = "swanson"


@dataclass(frozen=True)
class SwansonParams:
    theta: float

    name = NAME
    dim = 1

    def __post_init__(self):
        th = float(self.theta)
        if not (abs(th) < math.pi / 4) or th == 0.0:
            raise InvalidParameter(
                f"theta must lie in (-pi/4, pi/4) without 0, got {self.theta!r}"
            )
        object.__setattr__(self, "theta", th)

    @property
    def in_I1(self) -> bool:
        """True when |theta| < pi/8, where the metric norms are finite."""
        return abs(self.theta) < math.pi / 8

    @property
    def omega(self) -> float:
        return 1.0 / math.cos(2.0 * self.theta)

    @property
    def spacing(self) -> float:
        return self.omega

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega

    def eigenvalue(self, n) -> float:
        return self.omega * (check_index(n) + 0.5)

    def phi(self, n) -> PolyGauss1D:
        return _family(self, check_index(n), +1)

    def psi(self, n) -> PolyGauss1D:
        return _family(self, check_index(n), -1)

    # -- ladder operators ------------------------------------------------
    def ladder_apply(self, f, which: str):
        """Apply A, B, A+ or B+ (``†`` accepted for ``+``).

        A = (e^{i t} x + e^{-i t} d/dx)/sqrt2, B = (e^{i t} x - e^{-i t} d/dx)/sqrt2.
        """
        e = cmath.exp(1j * self.theta)
        ops = {
            "A": (e, 1 / e),
            "B": (e, -1 / e),
            "A+": (1 / e, -e),
            "B+": (1 / e, e),
        }
        cx, cd = ops[which.replace("†", "+")]
        return linear_op(f, cx / SQRT2, cd / SQRT2)

    def hamiltonian_apply(self, f):
        ba = self.ladder_apply(self.ladder_apply(f, "A"), "B")
        return self.omega * (ba + 0.5 * f)

    def hamiltonian_adjoint_apply(self, f):
        ab = self.ladder_apply(self.ladder_apply(f, "B+"), "A+")
        return self.omega * (ab + 0.5 * f)

    # -- metric ----------------------------------------------------------
    def _dilation(self, direction: str) -> tuple[complex, complex]:
        if direction == "to_psi":
            return cmath.exp(-2j * self.theta), cmath.exp(-1j * self.theta)
        if direction == "to_phi":
            return cmath.exp(2j * self.theta), cmath.exp(1j * self.theta)
        raise ValueError(f"unknown direction {direction!r}")

    def metric_apply(self, f, direction: str = "to_psi"):
        lam, pref = self._dilation(direction)
        return f.scale_arg(lam, pref)

    def metric_pointwise(self, fn, direction: str = "to_psi"):
        lam, pref = self._dilation(direction)

        def dilated(x):
            return pref * fn(lam * np.asarray(x))

        return dilated

    # -- spectral bookkeeping --------------------------------------------
    def indices(self, nmax: int) -> list[int]:
        return list(range(nmax + 1))

    def shell(self, n) -> int:
        return check_index(n)

    def parse_index(self, parts: tuple[int, ...]) -> int:
        return check_index(parts)


@lru_cache(maxsize=None)
def _family(p: SwansonParams, n: int, sign: int) -> PolyGauss1D:
    e = cmath.exp(sign * 1j * p.theta)
    coeffs = normalized_hermite(n) * e ** np.arange(n + 1)
    pref = cmath.exp(sign * 0.5j * p.theta) / math.pi**0.25
    return PolyGauss1D(pref * coeffs, 0.5 * e * e, 0.0, 0.0)
