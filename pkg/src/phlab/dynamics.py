"""Metric inner products, spectral diagnostics, evolution and probabilities.

Three scalar products are in play:

* ``Metric.STANDARD``  <f, g>
* ``Metric.PSI``       <f, g>_psi = <f, S_psi g>
* ``Metric.PHI``       <f, g>_phi = <f, S_phi g>

and each can be evaluated three ways.  ``closed_form`` applies the model's
metric as an exact PolyGauss transformation and integrates with Gaussian
moments; ``spectral`` sums expansion coefficients against a biorthogonal
family and watches the tail for growth; ``oracle`` integrates point values
with adaptive quadrature.  The headline phenomenon is that metric norms can
diverge, so divergence is detected (two independent ways) rather than
silently ignored.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import polygauss, quadrature
from .errors import (
    DIVERGENCE_ERRORS,
    DIVERGENT,
    DivergentIntegral,
    DivergentSpectralTail,
    NumericalInconsistency,
    WrongFamily,
)
from .polygauss import GaussSum, PolyGauss1D, PolyGauss2D

FAMILIES = ("phi", "psi")
DEFAULT_NMAX = 64
TAIL_WINDOW = 8
TAIL_GROWTH_FACTOR = 1e6
IMAG_RTOL = 1e-10
PROB_SLACK = 1e-12


class Metric(enum.Enum):
    STANDARD = "standard"
    PSI = "psi"
    PHI = "phi"

    @classmethod
    def parse(cls, value) -> "Metric":
        if isinstance(value, Metric):
            return value
        return cls(str(value).lower())


@dataclass(frozen=True)
class Term:
    coef: complex
    index: object
    family: str


@dataclass(frozen=True)
class StateExpansion:
    """Finite combination of eigenfunctions of one model.

    ``terms`` holds ``Term(coef, index, family)`` entries; indices are
    integers for 1D models and ``(n, l)`` pairs for Landau levels.
    """

    model: object
    terms: tuple

    def __post_init__(self):
        terms = tuple(
            t if isinstance(t, Term) else Term(complex(t[0]), t[1], t[2]) for t in self.terms
        )
        if not terms:
            raise ValueError("a state needs at least one term")
        seen = set()
        clean = []
        for t in terms:
            if t.family not in FAMILIES:
                raise ValueError(f"unknown family {t.family!r}")
            index = self.model.parse_index(t.index if isinstance(t.index, tuple) else (t.index,))
            key = (t.family, index)
            if key in seen:
                raise ValueError(f"duplicate term {t.family}:{index}")
            seen.add(key)
            clean.append(Term(complex(t.coef), index, t.family))
        if all(t.coef == 0 for t in clean):
            raise ValueError("all coefficients are zero")
        object.__setattr__(self, "terms", tuple(clean))

    @classmethod
    def single(cls, model, family: str, index, coef: complex = 1.0) -> "StateExpansion":
        return cls(model, (Term(coef, index, family),))

    @classmethod
    def of(cls, model, *pairs) -> "StateExpansion":
        """Shorthand: ``StateExpansion.of(m, ("phi", 0), ("phi", 1))``."""
        terms = []
        for p in pairs:
            if len(p) == 2:
                terms.append(Term(1.0, p[1], p[0]))
            else:
                terms.append(Term(p[2], p[1], p[0]))
        return cls(model, tuple(terms))

    @property
    def dim(self) -> int:
        return self.model.dim

    def coefficient_map(self) -> dict:
        return {(t.family, t.index): t.coef for t in self.terms}


def _state(model, family: str, index):
    return model.phi(index) if family == "phi" else model.psi(index)


def to_polygauss(s: StateExpansion):
    """Materialize a state as PolyGauss (or GaussSum when cores differ)."""
    total = None
    for t in s.terms:
        if t.coef == 0:
            continue
        piece = t.coef * _state(s.model, t.family, t.index)
        total = piece if total is None else total + piece
    if isinstance(total, GaussSum):
        return total.simplify()
    return total


def evolve(s: StateExpansion, t: float) -> StateExpansion:
    """Schroedinger evolution exp(-iHt) on a phi-family expansion."""
    if any(term.family != "phi" for term in s.terms):
        raise WrongFamily("H is diagonal only on the phi family")
    if t == 0:
        return s
    return StateExpansion(
        s.model,
        tuple(
            Term(term.coef * cmath.exp(-1j * s.model.eigenvalue(term.index) * t), term.index, "phi")
            for term in s.terms
        ),
    )


def _metric_direction(metric: Metric):
    return {Metric.PSI: "to_psi", Metric.PHI: "to_phi"}.get(metric)


def apply_metric(model, f, metric: Metric):
    direction = _metric_direction(metric)
    if direction is None:
        return f
    return model.metric_apply(f, direction)


# -- spectral path --------------------------------------------------------


@lru_cache(maxsize=None)
def _family_overlaps(model, against: str, nmax: int, family: str, index) -> np.ndarray:
    """<against_n, family_index> for every n up to nmax, cached per model."""
    fam = [_state(model, against, n) for n in model.indices(nmax)]
    col = polygauss.inner_batch(fam, _state(model, family, index))
    col.setflags(write=False)
    return col


def _coefficients(s: StateExpansion, against: str, nmax: int) -> np.ndarray:
    out = np.zeros(len(s.model.indices(nmax)), dtype=complex)
    for t in s.terms:
        out += t.coef * _family_overlaps(s.model, against, nmax, t.family, t.index)
    return out


def _blocks(model, indices, values: np.ndarray) -> np.ndarray:
    """Aggregate per-index values into blocks of two consecutive shells.

    Pairing shells keeps the monitor insensitive to parity selection rules,
    which zero out every other coefficient for symmetric states.
    """
    shells = np.array([model.shell(i) for i in indices])
    nblocks = (shells.max() + 1) // 2
    out = np.zeros(nblocks)
    for sh, v in zip(shells, values):
        b = sh // 2
        if b < nblocks:
            out[b] += v
    return out


def tail_grows(increments: Sequence[float], window: int = TAIL_WINDOW,
               factor: float = TAIL_GROWTH_FACTOR) -> bool:
    """Divergence test on a sequence of nonnegative partial-sum increments.

    Declared when the last ``window`` increments are nondecreasing and the
    partial sum exceeds ``factor`` times the first nonzero increment.
    """
    inc = np.asarray(increments, dtype=float)
    if inc.size < window:
        return False
    nz = inc[inc > 0]
    if nz.size == 0:
        return False
    last = inc[-window:]
    monotone = bool(np.all(np.diff(last) >= 0))
    return monotone and inc.sum() > factor * nz[0]


@dataclass(frozen=True)
class SpectralReport:
    """Expansion coefficients of a state against one family."""

    family: str
    indices: list
    coefficients: np.ndarray
    partial_sums: np.ndarray
    block_increments: np.ndarray
    diverging: bool
    residuals: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        return "tail-growth" if self.diverging else "convergent"


def spectral_coefficients(
    f: StateExpansion, family: str = "psi", nmax: int = DEFAULT_NMAX, residual_grid=None
) -> SpectralReport:
    """Coefficients <family_n, f> for all indices up to ``nmax``.

    Against ``psi`` these expand f in the phi family (f = sum <psi_n,f> phi_n);
    against ``phi`` they expand f in the psi family.  When ``residual_grid``
    is given (1D: array of x; 2D: pair of arrays), the partial-sum residual
    max |f - sum| is recorded every 8 shells.  Point values of high-degree
    family members are summed from monomial coefficients, so in double
    precision the residual floors around 1e-8 near n = 50 and then rises
    again even for convergent expansions.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    model = f.model
    indices = model.indices(nmax)
    coeffs = _coefficients(f, family, nmax)
    sq = np.abs(coeffs) ** 2
    blocks = _blocks(model, indices, sq)
    report = SpectralReport(
        family=family,
        indices=indices,
        coefficients=coeffs,
        partial_sums=np.cumsum(sq),
        block_increments=blocks,
        diverging=tail_grows(blocks),
    )
    if residual_grid is not None:
        report.residuals.update(_partial_residuals(f, family, indices, coeffs, residual_grid))
    return report


def _partial_residuals(f, family, indices, coeffs, grid) -> dict:
    model = f.model
    other = "psi" if family == "phi" else "phi"
    target = to_polygauss(f)
    args = grid if isinstance(grid, tuple) else (grid,)
    if len(args) == 2:
        args = np.meshgrid(*args, indexing="ij")
    exact = target(*args)
    acc = np.zeros_like(exact, dtype=complex)
    out = {}
    shells = [model.shell(i) for i in indices]
    for k, (i, c) in enumerate(zip(indices, coeffs)):
        if c != 0:
            acc = acc + c * _state(model, other, i)(*args)
        last_of_shell = k + 1 == len(indices) or shells[k + 1] != shells[k]
        if last_of_shell and shells[k] % 8 == 0:
            out[shells[k]] = float(np.max(np.abs(exact - acc)))
    return out


def _spectral_inner(f: StateExpansion, g: StateExpansion, metric: Metric, nmax: int) -> complex:
    model = f.model
    indices = model.indices(nmax)
    if metric is Metric.PSI:
        cf, cg = _coefficients(f, "psi", nmax), _coefficients(g, "psi", nmax)
    elif metric is Metric.PHI:
        cf, cg = _coefficients(f, "phi", nmax), _coefficients(g, "phi", nmax)
    else:
        # <f, g> = sum_n <f, phi_n> <psi_n, g>
        cf, cg = _coefficients(f, "phi", nmax), _coefficients(g, "psi", nmax)
    terms = np.conj(cf) * cg
    if tail_grows(_blocks(model, indices, np.abs(terms))):
        raise DivergentSpectralTail(
            f"{metric.value} spectral series grows up to nmax={nmax}"
        )
    return complex(terms.sum())


# -- oracle path ----------------------------------------------------------


def _decay_rates(F, G):
    """Smallest real part of the combined quadratic coefficient(s)."""
    fs = F.terms if isinstance(F, GaussSum) else (F,)
    gs = G.terms if isinstance(G, GaussSum) else (G,)
    if isinstance(fs[0], PolyGauss1D):
        return (min((u.a.conjugate() + v.a).real for u in fs for v in gs),)
    return (
        min((u.ax.conjugate() + v.ax).real for u in fs for v in gs),
        min((u.ay.conjugate() + v.ay).real for u in fs for v in gs),
    )


def _oracle_inner(f: StateExpansion, g: StateExpansion, metric: Metric, rtol: float) -> complex:
    model = f.model
    F, G = to_polygauss(f), to_polygauss(g)
    direction = _metric_direction(metric)
    Gm = G if direction is None else model.metric_pointwise(G, direction)
    # Exponent bookkeeping only sets the truncation window.
    rates = _decay_rates(F, apply_metric(model, G, metric))
    if min(rates) <= 0:
        raise DivergentIntegral(f"integrand has no Gaussian decay (rate {min(rates):.3g})")
    if model.dim == 1:
        integrand = lambda x: np.conj(F(x)) * Gm(x)
        scale = _abs_scale_1d(integrand, rates[0])
        val, _ = quadrature.integrate_1d(integrand, rates[0], rtol * scale)
    else:
        integrand = lambda x, y: np.conj(F(x, y)) * Gm(x, y)
        scale = _abs_scale_2d(integrand, *rates)
        val, _ = quadrature.integrate_2d(integrand, rates[0], rates[1], rtol * scale)
    return val


def _abs_scale_1d(fn, rate):
    x = np.linspace(-10, 10, 2001) / math.sqrt(rate)
    return max(float(np.trapezoid(np.abs(fn(x)), x)), 1e-300)


def _abs_scale_2d(fn, rx, ry):
    x = np.linspace(-10, 10, 201) / math.sqrt(rx)
    y = np.linspace(-10, 10, 201) / math.sqrt(ry)
    v = np.abs(fn(x[:, None], y[None, :]))
    return max(float(np.trapezoid(np.trapezoid(v, y, axis=1), x)), 1e-300)


# -- public API -----------------------------------------------------------


def inner_metric(
    f: StateExpansion,
    g: StateExpansion,
    metric=Metric.STANDARD,
    method: str = "closed_form",
    nmax: int = DEFAULT_NMAX,
    rtol: float = 1e-12,
) -> complex:
    """<f, g>_metric by one of ``closed_form``, ``spectral`` or ``oracle``."""
    metric = Metric.parse(metric)
    if f.model != g.model:
        raise ValueError("states belong to different models")
    if method == "closed_form":
        G = apply_metric(g.model, to_polygauss(g), metric)
        return polygauss.inner(to_polygauss(f), G)
    if method == "spectral":
        return _spectral_inner(f, g, metric, nmax)
    if method == "oracle":
        return _oracle_inner(f, g, metric, rtol)
    raise ValueError(f"unknown method {method!r}")


def _real_square(value: complex) -> float:
    if abs(value.imag) > IMAG_RTOL * max(abs(value.real), 1e-300):
        raise NumericalInconsistency(f"squared norm has imaginary part: {value!r}")
    if value.real < 0:
        raise NumericalInconsistency(f"squared norm is negative: {value!r}")
    return value.real


def norm_metric(f: StateExpansion, metric=Metric.STANDARD, method: str = "closed_form",
                nmax: int = DEFAULT_NMAX) -> float:
    return math.sqrt(_real_square(inner_metric(f, f, metric, method, nmax)))


def transition_probability(
    phi0: StateExpansion,
    phif: StateExpansion,
    t: float,
    metric=Metric.STANDARD,
    method: str = "closed_form",
    nmax: int = DEFAULT_NMAX,
) -> float:
    """|<phif, phi(t)>_m|^2 / (||phif||_m^2 ||phi(t)||_m^2), phi(t) = e^{-iHt} phi0.

    Divergent metric norms propagate as DivergentIntegral
    (closed_form/oracle) or DivergentSpectralTail (spectral).
    """
    metric = Metric.parse(metric)
    state = evolve(phi0, t)
    nf = _real_square(inner_metric(phif, phif, metric, method, nmax))
    ns = _real_square(inner_metric(state, state, metric, method, nmax))
    num = inner_metric(phif, state, metric, method, nmax)
    p = abs(num) ** 2 / (nf * ns)
    if p > 1 + PROB_SLACK or not math.isfinite(p):
        raise NumericalInconsistency(f"probability {p!r} outside [0, 1]")
    return min(p, 1.0)


@dataclass(frozen=True)
class ProbabilityCurve:
    """Per-metric probability values on a time grid.

    Entries of ``values[metric]`` are floats or :data:`DIVERGENT`; the
    matching ``errors[metric]`` entry carries the divergence message.
    """

    times: np.ndarray
    values: dict
    errors: dict

    @property
    def metrics(self) -> list:
        return list(self.values)

    def finite(self, metric) -> np.ndarray:
        vals = self.values[Metric.parse(metric)]
        return np.array([v for v in vals if v is not DIVERGENT], dtype=float)

    def all_divergent(self, metric) -> bool:
        return all(v is DIVERGENT for v in self.values[Metric.parse(metric)])


def probability_curve(
    phi0: StateExpansion,
    phif: StateExpansion,
    times: Iterable[float],
    metrics: Iterable = tuple(Metric),
    method: str = "closed_form",
    nmax: int = DEFAULT_NMAX,
) -> ProbabilityCurve:
    times = np.asarray(list(times), dtype=float)
    values, errors = {}, {}
    for m in map(Metric.parse, metrics):
        vals, errs = [], []
        for t in times:
            try:
                vals.append(transition_probability(phi0, phif, float(t), m, method, nmax))
                errs.append(None)
            except DIVERGENCE_ERRORS as exc:
                vals.append(DIVERGENT)
                errs.append(str(exc))
        values[m], errors[m] = vals, errs
    return ProbabilityCurve(times, values, errors)
