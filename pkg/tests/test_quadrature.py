import math

import numpy as np
import pytest

from phlab import polygauss as pg
from phlab.models import EqhoParams, LandauParams
from phlab.quadrature import (
    MAX_DOUBLINGS,
    InvalidDecay,
    ToleranceNotMet,
    _romberg,
    integrate_1d,
    integrate_2d,
)


def test_gaussian():
    val, err = integrate_1d(lambda x: np.exp(-x * x), 1.0, 1e-10)
    assert abs(val - math.sqrt(math.pi)) < 1e-10
    assert err <= 1e-10


def test_odd_integrand():
    val, _ = integrate_1d(lambda x: x * np.exp(-x * x), 1.0, 1e-12)
    assert abs(val) < 1e-12


def test_complex_integrand_shares_nodes():
    val, _ = integrate_1d(lambda x: np.exp(-x * x + 1j * x), 1.0, 1e-12)
    assert abs(val - math.sqrt(math.pi) * math.exp(-0.25)) < 1e-12


def test_displaced_centre():
    val, _ = integrate_1d(lambda x: np.exp(-((x - 6.0) ** 2)), 1.0, 1e-12)
    assert abs(val - math.sqrt(math.pi)) < 1e-12


def test_eqho_biorthogonal_pair():
    m = EqhoParams(2.0)
    f, g = m.phi(1), m.psi(1)
    val, _ = integrate_1d(lambda x: np.conj(f(x)) * g(x), 1.0, 1e-12)
    assert abs(val - 1.0) < 1e-8


def test_invalid_decay():
    with pytest.raises(InvalidDecay):
        integrate_1d(lambda x: np.ones_like(x), 0.0)
    with pytest.raises(InvalidDecay):
        integrate_2d(lambda x, y: x + y, 1.0, -1.0)


def test_stall_raises():
    # A level sequence that oscillates forever must stop at the stall guard.
    levels = (1.0 + 1e-6 * (-1) ** k for k in range(1000))
    with pytest.raises(ToleranceNotMet):
        _romberg(levels, MAX_DOUBLINGS, 1e-12)


def test_refinement_cap():
    levels = (1.0 + 2.0**-k for k in range(1000))  # improving, but too slowly
    with pytest.raises(ToleranceNotMet):
        _romberg(levels, 6, 1e-12)


def test_nonfinite_integrand_raises():
    with pytest.raises(ToleranceNotMet):
        integrate_1d(lambda x: np.where(np.abs(x) > 3, np.inf, np.exp(-x * x)), 1.0)


def test_tolerance_halving_never_worsens_estimate():
    f = lambda x: (1 + x**3) * np.exp(-0.3 * x * x + 0.2j * x)
    errs = [integrate_1d(f, 0.3, tol)[1] for tol in (1e-5, 5e-6, 2.5e-6, 1e-8, 5e-9, 1e-12)]
    assert all(b <= a for a, b in zip(errs, errs[1:]))


def test_2d_gaussian():
    val, _ = integrate_2d(lambda x, y: np.exp(-x * x - y * y), 1.0, 1.0, 1e-10)
    assert abs(val - math.pi) < 1e-9


def test_2d_separable_moment():
    val, _ = integrate_2d(lambda x, y: x * x * y * y * np.exp(-x * x - y * y), 1.0, 1.0, 1e-11)
    assert abs(val - math.pi / 4) < 1e-9


def test_landau_vacua_overlap():
    m = LandauParams(0.1, -0.15)
    f, g = m.phi(0, 0), m.psi(0, 0)
    rx = (f.ax.conjugate() + g.ax).real
    ry = (f.ay.conjugate() + g.ay).real
    val, _ = integrate_2d(lambda x, y: np.conj(f(x, y)) * g(x, y), rx, ry, 1e-11)
    assert abs(val - 1.0) < 1e-8


@pytest.mark.parametrize("n", [0, 2, 5])
def test_agrees_with_closed_form(n):
    m = EqhoParams(1.5)
    f, g = m.psi(n), m.psi(n + 1)
    exact = pg.inner(f, g)
    val, err = integrate_1d(lambda x: np.conj(f(x)) * g(x), 1.0, 1e-10 * max(1, abs(exact)))
    assert abs(val - exact) <= max(1e-8, 10 * err)
