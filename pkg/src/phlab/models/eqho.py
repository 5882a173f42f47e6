"""Extended quantum harmonic oscillator.

H = nu/2 (p^2 + x^2) + i sqrt(2) p = nu (B A + gamma), with the
pseudo-bosonic pair A = a - 1/nu, B = a^dagger + 1/nu.  Both eigenfamilies
are Hermite polynomials in x riding on Gaussians displaced by +-sqrt(2)/nu,
and the metric is multiplication by exp(2/nu^2 - 2 sqrt(2) x / nu).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import InvalidParameter
from ..polygauss import PolyGauss1D
from ._common import SQRT2, check_index, linear_op

NAME = "eqho"


@dataclass(frozen=True)
class EqhoParams:
    nu: float

    name = NAME
    dim = 1

    def __post_init__(self):
        nu = float(self.nu)
        if not (nu > 0 and math.isfinite(nu)):
            raise InvalidParameter(f"nu must be strictly positive, got {self.nu!r}")
        object.__setattr__(self, "nu", nu)

    @property
    def shift(self) -> float:
        return SQRT2 / self.nu

    @property
    def gamma(self) -> float:
        return (2.0 + self.nu**2) / (2.0 * self.nu**2)

    @property
    def spacing(self) -> float:
        return self.nu

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.nu

    def eigenvalue(self, n) -> float:
        return self.nu * (check_index(n) + self.gamma)

    def phi(self, n) -> PolyGauss1D:
        return _family(self, check_index(n), +1)

    def psi(self, n) -> PolyGauss1D:
        return _family(self, check_index(n), -1)

    # -- ladder operators ------------------------------------------------
    # a = (x + d/dx)/sqrt2, a^dagger = (x - d/dx)/sqrt2
    def lowering_apply(self, f):
        """A f = (a - 1/nu) f."""
        return linear_op(f, 1 / SQRT2, 1 / SQRT2, -1 / self.nu)

    def raising_apply(self, f):
        """B f = (a^dagger + 1/nu) f."""
        return linear_op(f, 1 / SQRT2, -1 / SQRT2, 1 / self.nu)

    def ladder_apply(self, f, which: str):
        ops = {
            "A": (1 / SQRT2, 1 / SQRT2, -1 / self.nu),
            "B": (1 / SQRT2, -1 / SQRT2, 1 / self.nu),
            "A+": (1 / SQRT2, -1 / SQRT2, -1 / self.nu),
            "B+": (1 / SQRT2, 1 / SQRT2, 1 / self.nu),
        }
        return linear_op(f, *ops[_dagger(which)])

    def hamiltonian_apply(self, f):
        """H f = nu (B A + gamma) f."""
        return self.nu * (self.raising_apply(self.lowering_apply(f)) + self.gamma * f)

    def hamiltonian_adjoint_apply(self, f):
        """H^dagger f = nu (A^dagger B^dagger + gamma) f."""
        return self.nu * (self.ladder_apply(self.ladder_apply(f, "B+"), "A+") + self.gamma * f)

    # -- metric ----------------------------------------------------------
    def metric_weight(self, direction: str = "to_psi") -> tuple[float, float, float]:
        """(da, db, dc) of the multiplication weight for ``mul_gauss``."""
        db = -2.0 * self.shift
        dc = 2.0 / self.nu**2
        if direction == "to_psi":
            return (0.0, db, dc)
        if direction == "to_phi":
            return (0.0, -db, -dc)
        raise ValueError(f"unknown direction {direction!r}")

    def metric_apply(self, f, direction: str = "to_psi"):
        return f.mul_gauss(*self.metric_weight(direction))

    def metric_pointwise(self, fn, direction: str = "to_psi"):
        """Metric applied to a plain callable, for quadrature cross-checks."""
        sign = 1.0 if direction == "to_psi" else -1.0
        nu, s = self.nu, self.shift

        def weighted(x):
            return np.exp(sign * (2.0 / nu**2 - 2.0 * s * x)) * fn(x)

        return weighted

    # -- spectral bookkeeping --------------------------------------------
    def indices(self, nmax: int) -> list[int]:
        return list(range(nmax + 1))

    def shell(self, n) -> int:
        return check_index(n)

    def parse_index(self, parts: tuple[int, ...]) -> int:
        return check_index(parts)


def _dagger(which: str) -> str:
    return which.replace("†", "+").replace("^dagger", "+")


@lru_cache(maxsize=None)
def _family(p: EqhoParams, n: int, sign: int) -> PolyGauss1D:
    """phi (sign=+1) or psi (sign=-1) by repeated raising of the seed.

    The raising operator x - d/dx + sign*sqrt(2)/nu acting on
    P(x) exp(-x^2/2 + sign*sqrt(2) x/nu) is the Hermite step P -> 2xP - P'.
    """
    s = sign * p.shift
    if n == 0:
        seed = PolyGauss1D(np.ones(1), 0.5, s, 0.0)
        pref = math.exp(-sign / p.nu**2) / math.pi**0.25
        return pref * seed
    prev = _family(p, n - 1, sign)
    # (x - d/dx + s) / sqrt(2 n) maps the n-1 state onto the n state
    return linear_op(prev, 1.0, -1.0, s) * (1.0 / math.sqrt(2.0 * n))
