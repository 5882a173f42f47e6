"""Closed-form reference transition probabilities.

These are the comparison targets for the
acceptance suite.  Where a metric norm does not exist the function returns
:data:`~phlab.errors.DIVERGENT` instead of a number, so results compare
structurally with :func:`phlab.dynamics.probability_curve`.
"""

from __future__ import annotations

import math

from .errors import DIVERGENT, InvalidParameter


def _check_nu(nu: float) -> float:
    nu = float(nu)
    if not nu > 0:
        raise InvalidParameter(f"nu must be positive, got {nu!r}")
    return nu


def _check_theta(theta: float) -> float:
    theta = float(theta)
    if not abs(theta) < math.pi / 4:
        raise InvalidParameter(f"|theta| must be below pi/4, got {theta!r}")
    return theta


def _in_I1(theta: float) -> bool:
    return abs(theta) < math.pi / 8


def eqho_constants(nu: float) -> tuple[float, float, float]:
    """(P, P_psi, P_phi) for initial phi_0 and final Psi_0; time independent."""
    nu = _check_nu(nu)
    return 1.0, math.exp(-6.0 / nu**2), math.exp(-2.0 / nu**2)


def eqho_curves(nu: float, t: float) -> tuple[float, float, float]:
    """(P, P_psi, P_phi) at time t for initial phi_0 + phi_1 and final Psi_0."""
    nu = _check_nu(nu)
    c = math.cos(nu * t)
    e6 = math.exp(-6.0 / nu**2)
    base = (1.0 - 2.0 / nu) ** 2
    p = nu**2 / (2.0 * (2.0 + nu**2 + 2.0 * nu * c))
    p_psi = 0.5 * e6 * (base + (4.0 / nu) * (1.0 - c))
    p_phi = 0.5 * nu**2 * e6 * (base + (4.0 / nu) * (1.0 + c)) / (8.0 + nu**2 + 4.0 * nu * c)
    return p, p_psi, p_phi


def swanson_constants(theta: float):
    """(P, P_psi, P_phi) for initial phi_0 and final Psi_0.

    The metric-weighted values exist only for |theta| < pi/8.
    """
    theta = _check_theta(theta)
    c2 = math.cos(2 * theta)
    c4 = math.cos(4 * theta)
    p = c2**2 / (1.0 + c2**2)
    if not _in_I1(theta):
        return p, DIVERGENT, DIVERGENT
    p_psi = math.sqrt(c4) / (2.0 * c2)
    p_phi = c4**1.5 / (c2 * (c4 + 1.0))
    return p, p_psi, p_phi


def swanson_curves(theta: float, t: float):
    """(P, P_psi = P_phi) at time t for initial phi_0 + phi_1, final Psi_0 + Psi_1."""
    theta = _check_theta(theta)
    c2 = math.cos(2 * theta)
    c4 = math.cos(4 * theta)
    ct = math.cos(t / c2)
    p = 2.0 * c2**3 * (1.0 + ct) / (1.0 + c2) ** 2
    if not _in_I1(theta):
        return p, DIVERGENT
    p_metric = c4**1.5 * (1.0 + c2**2 + 2.0 * c2 * ct) / (2.0 * (1.0 + c4) * c2**3)
    return p, p_metric


def landau_p(k1: float, k2: float) -> float:
    num = math.sqrt((1 - 4 * k1**2) ** 3 * (1 - 4 * k2**2) ** 3)
    den = (2 + 3 * k1 - 3 * k2 - 4 * k1 * k2) * (3 + 4 * k1 - 4 * k2 - 4 * k1 * k2)
    return num / den


def landau_r(k1: float, k2: float) -> float:
    return (1 + k1 - k2) / ((1 + 2 * k1) * (1 - 2 * k2))


def landau_g(k1: float, k2: float) -> float:
    num = (1 + 4 * k1) * (1 - 4 * k2)
    den = 6 * (1 + 2 * k1) * (1 - 2 * k2) * (1 + 3 * k1 - 3 * k2 - 8 * k1 * k2)
    if den == 0:
        return math.copysign(math.inf, num)
    return num / den


def landau_curves(k1: float, k2: float, t: float) -> tuple[float, float]:
    """(P, P_psi) at time t for initial phi_00 + phi_10 + phi_01, final Psi_00 + Psi_10."""
    k1, k2 = float(k1), float(k2)
    if not (abs(k1) < 0.5 and abs(k2) < 0.5):
        raise InvalidParameter(f"(k1, k2) must lie in (-1/2, 1/2)^2, got {(k1, k2)!r}")
    c = math.cos(t)
    r = landau_r(k1, k2)
    return 2.0 * (1.0 + c) * landau_p(k1, k2), (1.0 + r * r + 2.0 * r * c) * landau_g(k1, k2)
