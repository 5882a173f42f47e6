import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from phlab import polygauss as pg
from phlab import reference
from phlab.dynamics import (
    Metric,
    StateExpansion,
    Term,
    _real_square,
    evolve,
    inner_metric,
    norm_metric,
    probability_curve,
    spectral_coefficients,
    tail_grows,
    to_polygauss,
    transition_probability,
)
from phlab.errors import (
    DIVERGENT,
    DivergentIntegral,
    DivergentSpectralTail,
    NumericalInconsistency,
    WrongFamily,
)
from phlab.models import EqhoParams, LandauParams, SwansonParams
from phlab.quadrature import integrate_2d

ALL = tuple(Metric)
PI16, PI6 = math.pi / 16, math.pi / 6


def pair(m, initial, final):
    return StateExpansion.of(m, *initial), StateExpansion.of(m, *final)


def eqho_superposition(nu):
    return pair(EqhoParams(nu), [("phi", 0), ("phi", 1)], [("psi", 0)])


def swanson_superposition(theta):
    return pair(SwansonParams(theta), [("phi", 0), ("phi", 1)], [("psi", 0), ("psi", 1)])


def landau_pair(k1, k2):
    return pair(
        LandauParams(k1, k2),
        [("phi", (0, 0)), ("phi", (1, 0)), ("phi", (0, 1))],
        [("psi", (0, 0)), ("psi", (1, 0))],
    )


class TestStateExpansion:
    def test_rejects_duplicates(self):
        with pytest.raises(ValueError):
            StateExpansion.of(EqhoParams(1), ("phi", 0), ("phi", 0))

    def test_same_index_in_both_families_allowed(self):
        s = StateExpansion.of(EqhoParams(1), ("phi", 0), ("psi", 0))
        assert len(s.terms) == 2

    def test_rejects_empty_and_zero(self):
        m = EqhoParams(1)
        with pytest.raises(ValueError):
            StateExpansion(m, ())
        with pytest.raises(ValueError):
            StateExpansion(m, (Term(0, 0, "phi"), Term(0, 1, "phi")))

    def test_rejects_unknown_family_and_bad_index(self):
        m = EqhoParams(1)
        with pytest.raises(ValueError):
            StateExpansion.of(m, ("chi", 0))
        with pytest.raises(ValueError):
            StateExpansion.of(m, ("phi", -1))
        with pytest.raises(ValueError):
            StateExpansion.of(LandauParams(0, 0), ("phi", 3))


class TestToPolyGauss:
    def test_single_term(self):
        m = EqhoParams(2.0)
        assert pg.residual(to_polygauss(StateExpansion.of(m, ("phi", 2))), m.phi(2)) == 0

    def test_degree(self):
        m = EqhoParams(2.0)
        assert to_polygauss(StateExpansion.of(m, ("phi", 0), ("phi", 1))).degree == 1

    def test_landau_state_against_termwise_quadrature(self):
        m = LandauParams(0.1, -0.15)
        s = StateExpansion.of(m, ("phi", (0, 0)), ("phi", (1, 0)), ("phi", (0, 1)))
        f = to_polygauss(s)
        x, y = np.linspace(-3, 3, 7), np.linspace(-2, 4, 5)
        termwise = sum(m.phi(*i)(x[:, None], y[None, :]) for i in ((0, 0), (1, 0), (0, 1)))
        assert np.allclose(f(x[:, None], y[None, :]), termwise, atol=1e-14)
        rx, ry = 2 * f.ax.real, 2 * f.ay.real
        val, _ = integrate_2d(
            lambda u, v: np.abs(sum(m.phi(*i)(u, v) for i in ((0, 0), (1, 0), (0, 1)))) ** 2,
            rx, ry, 1e-12,
        )
        assert abs(pg.inner(f, f) - val) < 1e-9


class TestEvolve:
    def test_identity_at_zero(self):
        a, _ = eqho_superposition(1.0)
        assert evolve(a, 0.0) == a

    def test_wrong_family(self):
        m = EqhoParams(1.0)
        with pytest.raises(WrongFamily):
            evolve(StateExpansion.of(m, ("psi", 0)), 1.0)

    def test_relative_phase(self):
        nu, t = 1.3, 0.77
        a, _ = eqho_superposition(nu)
        c = {term.index: term.coef for term in evolve(a, t).terms}
        assert c[1] / c[0] == pytest.approx(cmath.exp(-1j * nu * t))
        back = evolve(a, 2 * math.pi / nu).coefficient_map()
        assert back[("phi", 1)] / back[("phi", 0)] == pytest.approx(1.0)

    @pytest.mark.parametrize("model", [EqhoParams(1.5), SwansonParams(0.2), LandauParams(0.1, -0.15)])
    def test_single_eigenstate_constant(self, model):
        idx = (1, 0) if model.dim == 2 else 1
        fin = (0, 0) if model.dim == 2 else 0
        a = StateExpansion.of(model, ("phi", idx))
        b = StateExpansion.of(model, ("psi", idx), ("phi", fin))
        c = probability_curve(a, b, np.linspace(0, 5, 6))
        for m in ALL:
            vals = np.array(c.values[m])
            assert np.ptp(vals) < 1e-13


class TestInnerMetric:
    def test_three_methods_agree(self):
        m = EqhoParams(1.0)
        f = StateExpansion.of(m, ("phi", 0))
        vals = [inner_metric(f, f, Metric.PSI, method) for method in ("closed_form", "spectral", "oracle")]
        assert max(abs(u - v) for u in vals for v in vals) < 1e-8
        # ||phi_0||_psi^2 = <phi_0, Psi_0> = 1 with the biorthonormal families.
        assert vals[0] == pytest.approx(1.0, abs=1e-14)

    @pytest.mark.parametrize("model", [EqhoParams(2.0), SwansonParams(PI6), LandauParams(0.1, -0.15)])
    def test_biorthogonal_pair(self, model):
        i, j = ((1, 0), (0, 1)) if model.dim == 2 else (1, 2)
        f = StateExpansion.of(model, ("phi", i))
        assert inner_metric(f, StateExpansion.of(model, ("psi", i))) == pytest.approx(1.0, abs=1e-12)
        assert abs(inner_metric(f, StateExpansion.of(model, ("psi", j)))) < 1e-12

    def test_swanson_divergence_both_detectors(self):
        m = SwansonParams(PI6)
        f = StateExpansion.of(m, ("psi", 0))
        with pytest.raises(DivergentIntegral):
            inner_metric(f, f, Metric.PSI, "closed_form")
        with pytest.raises(DivergentSpectralTail):
            inner_metric(f, f, Metric.PSI, "spectral", 64)
        with pytest.raises(DivergentIntegral):
            inner_metric(f, f, Metric.PSI, "oracle")

    def test_swanson_psi_norm_closed_form(self):
        m = SwansonParams(PI16)
        f = StateExpansion.of(m, ("psi", 0))
        expect = 1 / math.sqrt(math.cos(4 * PI16))
        for method in ("closed_form", "spectral", "oracle"):
            assert inner_metric(f, f, "psi", method).real == pytest.approx(expect, rel=1e-8)

    def test_metric_is_conjugate_symmetric(self):
        a, b = swanson_superposition(PI16)
        for m in ALL[1:]:
            assert inner_metric(a, b, m) == pytest.approx(inner_metric(b, a, m).conjugate(), abs=1e-13)

    def test_models_must_match(self):
        with pytest.raises(ValueError):
            inner_metric(StateExpansion.of(EqhoParams(1), ("phi", 0)), StateExpansion.of(EqhoParams(2), ("phi", 0)))

    def test_unknown_method(self):
        f = StateExpansion.of(EqhoParams(1), ("phi", 0))
        with pytest.raises(ValueError):
            inner_metric(f, f, method="simpson")


class TestNorms:
    def test_against_oracle(self):
        m = EqhoParams(1.2)
        f = StateExpansion.of(m, ("phi", 0), ("psi", 2, 0.5j))
        for metric in ALL:
            assert norm_metric(f, metric) == pytest.approx(norm_metric(f, metric, "oracle"), rel=1e-10)

    def test_ground_state_standard_norms(self):
        for nu in (0.8, 1.0, 3.0):
            m = EqhoParams(nu)
            assert norm_metric(StateExpansion.of(m, ("phi", 0))) == pytest.approx(1.0)
            assert norm_metric(StateExpansion.of(m, ("psi", 0))) ** 2 == pytest.approx(math.exp(4 / nu**2))

    def test_real_square_guard(self):
        assert _real_square(2.0 + 1e-12j) == 2.0
        with pytest.raises(NumericalInconsistency):
            _real_square(1.0 + 1e-6j)
        with pytest.raises(NumericalInconsistency):
            _real_square(-1.0 + 0j)


@given(
    st.lists(st.complex_numbers(min_magnitude=0.1, max_magnitude=3, allow_nan=False, allow_infinity=False), min_size=3, max_size=3),
    st.lists(st.complex_numbers(min_magnitude=0.1, max_magnitude=3, allow_nan=False, allow_infinity=False), min_size=2, max_size=2),
    st.sampled_from(ALL),
    st.sampled_from([EqhoParams(1.0), SwansonParams(PI16), LandauParams(0.1, -0.15)]),
)
def test_cauchy_schwarz(cf, cg, metric, model):
    ids = [(0, 0), (1, 0), (0, 1)] if model.dim == 2 else [0, 1, 2]
    f = StateExpansion(model, tuple(Term(c, i, "phi") for c, i in zip(cf, ids)))
    g = StateExpansion(model, tuple(Term(c, i, "psi") for c, i in zip(cg, ids)))
    lhs = abs(inner_metric(f, g, metric))
    rhs = norm_metric(f, metric) * norm_metric(g, metric)
    assert lhs <= rhs * (1 + 1e-10)


class TestTransitionProbability:
    @pytest.mark.parametrize("model", [EqhoParams(1.0), SwansonParams(PI6), LandauParams(0.3, 0.2)])
    def test_identical_eigenstate(self, model):
        idx = (1, 1) if model.dim == 2 else 2
        a = StateExpansion.of(model, ("phi", idx))
        c = probability_curve(a, a, [0.0, 0.9, 4.0])
        for m in ALL:
            for v in c.values[m]:
                assert v is DIVERGENT or v == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("nu", [1.0, 2.0, 5.0])
    def test_eqho_ground_to_psi_ground(self, nu):
        # All three metrics share exp(-4/nu^2), confirmed by the quadrature oracle.
        m = EqhoParams(nu)
        a, b = pair(m, [("phi", 0)], [("psi", 0)])
        expect = math.exp(-4 / nu**2)
        for metric in ALL:
            for method in ("closed_form", "oracle"):
                p = transition_probability(a, b, 0.4, metric, method)
                assert p == pytest.approx(expect, rel=1e-9)

    @pytest.mark.parametrize("nu", [1.0, 3.0])
    def test_eqho_curves_carry_uniform_factor(self, nu):
        # Each reference curve times the ratio exp(-4/nu^2)/(its exponential prefactor).
        a, b = eqho_superposition(nu)
        ts = np.linspace(0, 2 * math.pi / nu, 13)
        got = probability_curve(a, b, ts)
        ora = probability_curve(a, b, ts[:4], method="oracle")
        scale = np.array([math.exp(-4 / nu**2), math.exp(2 / nu**2), math.exp(2 / nu**2)])
        for j, t in enumerate(ts):
            expect = np.array(reference.eqho_curves(nu, t)) * scale
            row = np.array([got.values[m][j] for m in ALL])
            assert np.allclose(row, expect, rtol=1e-12, atol=0)
            if j < 4:
                assert np.allclose([ora.values[m][j] for m in ALL], row, rtol=1e-9)

    def test_swanson_constant_case(self):
        th = PI16
        a, b = pair(SwansonParams(th), [("phi", 0), ("phi", 1)], [("psi", 0)])
        c = math.cos(2 * th)
        p_ref = reference.swanson_constants(th)
        for method in ("closed_form", "oracle"):
            vals = [transition_probability(a, b, 0.3, m, method) for m in ALL]
            assert vals[0] == pytest.approx(c * c / (1 + c), rel=1e-10)
            assert vals[1] == pytest.approx(p_ref[1], rel=1e-10)
            assert vals[2] == pytest.approx(p_ref[2], rel=1e-10)

    def test_swanson_superposition_metrics_coincide(self):
        a, b = swanson_superposition(PI16)
        c = probability_curve(a, b, np.linspace(0, 7, 15))
        assert np.allclose(c.values[Metric.PSI], c.values[Metric.PHI], atol=1e-14, rtol=0)

    def test_landau_k0(self):
        a, b = landau_pair(0.0, 0.0)
        ts = np.linspace(0, 2 * math.pi, 20)
        c = probability_curve(a, b, ts)
        target = (1 + np.cos(ts)) / 3
        for m in ALL:
            assert np.allclose(c.values[m], target, atol=1e-12)

    def test_landau_outside_quarter(self):
        a, b = landau_pair(0.3, 0.0)
        c = probability_curve(a, b, [0.0, 1.0])
        assert c.all_divergent(Metric.PHI)
        assert all(v is not DIVERGENT for m in ALL[:2] for v in c.values[m])
        assert "Re(ay)" in c.errors[Metric.PHI][0]

    def test_landau_psi_metric_needs_k2_below_quarter(self):
        a, b = landau_pair(0.0, 0.3)
        c = probability_curve(a, b, [0.0])
        assert c.all_divergent(Metric.PSI) and not c.all_divergent(Metric.PHI)

    def test_landau_standard_not_separable(self):
        # 2(1+cos t) p would force P(pi/2) = P(0)/2.
        a, b = landau_pair(0.1, -0.15)
        p0 = transition_probability(a, b, 0.0)
        p1 = transition_probability(a, b, math.pi / 2)
        p2 = transition_probability(a, b, math.pi)
        assert p2 < 1e-14
        assert abs(p1 - p0 / 2) > 1e-3


class TestSpectral:
    def test_lone_coefficient(self):
        m = EqhoParams(2.0)
        r = spectral_coefficients(StateExpansion.of(m, ("phi", 3)), "psi", 12)
        expect = np.zeros(13)
        expect[3] = 1
        assert np.allclose(r.coefficients, expect, atol=1e-12)
        assert r.status == "convergent"

    def test_swanson_convergent(self):
        m = SwansonParams(PI16)
        r = spectral_coefficients(StateExpansion.of(m, ("psi", 0)), "psi", 64, residual_grid=np.linspace(-3, 3, 31))
        assert r.status == "convergent"
        assert r.partial_sums[-1] == pytest.approx(1 / math.sqrt(math.cos(4 * PI16)), rel=1e-8)
        res = [r.residuals[k] for k in sorted(r.residuals)]
        # Monomial evaluation of degree ~50 rotated Hermite functions floors near 1e-8.
        assert res[0] > 0.1 and min(res) < 1e-7

    def test_swanson_tail_growth(self):
        m = SwansonParams(PI6)
        r = spectral_coefficients(StateExpansion.of(m, ("psi", 0)), "psi", 64)
        assert r.status == "tail-growth"
        assert r.partial_sums[-1] > 1e6 * r.partial_sums[0]

    def test_landau_phi_expansion(self):
        m = LandauParams(0.1, -0.15)
        r = spectral_coefficients(StateExpansion.of(m, ("psi", (0, 0))), "psi", 16)
        assert r.status == "convergent"
        assert r.indices[0] == (0, 0)

    def test_tail_monitor(self):
        assert not tail_grows([1.0] * 7)
        assert tail_grows([1.0] + [10.0**k for k in range(1, 9)])
        assert not tail_grows([1.0] + [10.0**k for k in range(1, 9)][::-1])
        assert not tail_grows(np.zeros(10))
        assert not tail_grows([1.0] * 20)  # nondecreasing but partial sum stays small


class TestMethodAgreement:
    FIXTURES = {
        "eqho1": eqho_superposition(1.0),
        "eqho3": eqho_superposition(3.0),
        "swanson": swanson_superposition(PI16),
        "eqho-ground": pair(EqhoParams(2.0), [("phi", 0)], [("psi", 0)]),
    }

    @pytest.mark.parametrize("name", sorted(FIXTURES))
    def test_pairwise(self, name):
        a, b = self.FIXTURES[name]
        ts = [0.0, 0.61, 2.3]
        curves = [probability_curve(a, b, ts, method=meth) for meth in ("closed_form", "spectral", "oracle")]
        for m in ALL:
            vals = np.array([c.values[m] for c in curves], dtype=float)
            assert np.max(np.ptp(vals, axis=0)) < 1e-7

    def test_landau(self):
        a, b = landau_pair(0.1, -0.15)
        vals = np.array(
            [[transition_probability(a, b, 0.7, m, meth) for m in ALL] for meth in ("closed_form", "spectral", "oracle")]
        )
        assert np.max(np.ptp(vals, axis=0)) < 1e-7


class TestInvariants:
    @pytest.mark.parametrize("fixture", ["eqho1", "eqho3", "swanson", "landau"])
    def test_psi_norm_conserved(self, fixture):
        a = {
            "eqho1": eqho_superposition(1.0)[0],
            "eqho3": eqho_superposition(3.0)[0],
            "swanson": swanson_superposition(PI16)[0],
            "landau": landau_pair(0.1, -0.15)[0],
        }[fixture]
        T = a.model.period
        norms = np.array([norm_metric(evolve(a, t), Metric.PSI) for t in np.linspace(0, 2 * T, 40)])
        assert np.ptp(norms) / norms.max() < 1e-9

    def test_standard_norm_not_conserved(self):
        nu = 1.0
        a, _ = eqho_superposition(nu)
        ts = np.linspace(0, 2 * math.pi, 100)
        sq = np.array([norm_metric(evolve(a, t)) ** 2 for t in ts])
        assert np.allclose(sq, 2 + 4 / nu**2 + (4 / nu) * np.cos(nu * ts), rtol=1e-12)
        assert math.sqrt(sq.max() / sq.min()) > 2.2

    @pytest.mark.parametrize(
        "fixture",
        [eqho_superposition(1.0), eqho_superposition(3.0), swanson_superposition(PI16), landau_pair(0.1, -0.15), landau_pair(0.3, 0.0)],
    )
    def test_periodicity_and_range(self, fixture):
        a, b = fixture
        T = 2 * math.pi / a.model.spacing
        ts = np.linspace(0, T, 9)
        c0 = probability_curve(a, b, ts)
        c1 = probability_curve(a, b, ts + T)
        for m in ALL:
            for u, v in zip(c0.values[m], c1.values[m]):
                assert (u is DIVERGENT) == (v is DIVERGENT)
                if u is not DIVERGENT:
                    assert 0 <= u <= 1
                    assert abs(u - v) < 1e-10

    def test_evaluation_order_independent(self):
        a, b = swanson_superposition(PI16)
        ts = np.linspace(0, 5, 11)
        fwd = probability_curve(a, b, ts)
        rev = probability_curve(a, b, ts[::-1])
        for m in ALL:
            assert fwd.values[m] == rev.values[m][::-1]
