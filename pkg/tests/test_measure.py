import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special

from opmonotone.errors import (
    InvalidMeasure,
    LocationOutOfRange,
    NegativeCoefficient,
    NegativeWeight,
    NonIntegrableExponent,
    OverlappingIFSMaps,
    UnknownName,
    ZeroMass,
)
from opmonotone.measure import (
    Atom,
    DensitySpec,
    LoewnerDensity,
    LoewnerMeasureSpec,
    Measure,
    SelfSimilarSpec,
    SmoothFactor,
    compare_measures,
    decompose_measure,
    density,
    dirac,
    from_loewner,
    is_symmetric_measure,
    lebesgue,
    lin_comb,
    make_measure,
    measure_leq,
    normalize,
    pushforward_reflect,
    total_mass,
)

from conftest import DENSITY_TERMS, measures


def mixed():
    return make_measure([(0.5, 0.3)], lebesgue(0.5).ac, SelfSimilarSpec.cantor(0.2))


class TestConstruction:
    def test_dirac_half(self):
        mu = make_measure([(0.5, 1.0)])
        assert mu.atoms == (Atom(0.5, 1.0),)
        assert mu.mass == 1.0

    def test_lebesgue_mass(self):
        assert make_measure([], DensitySpec(1.0, 1.0)).mass == pytest.approx(1.0, abs=1e-15)

    def test_negative_weight(self):
        with pytest.raises(NegativeWeight):
            make_measure([(0.5, -1.0)])

    def test_location_out_of_range(self):
        with pytest.raises(LocationOutOfRange):
            make_measure([(1.5, 1.0)])

    def test_equal_locations_merge_exactly(self):
        mu = make_measure([(0.25, 1.0), (0.25, 0.5), (0.25 + 1e-15, 2.0)])
        assert len(mu.atoms) == 2
        assert {a.t: a.w for a in mu.atoms}[0.25] == 1.5

    def test_zero_weights_dropped(self):
        mu = make_measure([(0.1, 0.0)], lebesgue(0.0).ac or DensitySpec(1, 1, scale=0.0))
        assert mu == Measure()

    @pytest.mark.parametrize("kwargs,exc", [
        (dict(p=0.0, q=1.0), NonIntegrableExponent),
        (dict(p=1.0, q=-0.5), NonIntegrableExponent),
        (dict(p=1.0, q=1.0, support=(0.5, 0.2)), LocationOutOfRange),
        (dict(p=1.0, q=1.0, smooth=SmoothFactor("inv_t")), NonIntegrableExponent),
        (dict(p=0.5, q=1.0, smooth=SmoothFactor("log_mean")), InvalidMeasure),
        (dict(p=1.0, q=1.0, scale=-1.0), NegativeWeight),
    ])
    def test_density_validation(self, kwargs, exc):
        with pytest.raises(exc):
            DensitySpec(**kwargs)

    def test_unknown_smooth(self):
        with pytest.raises(UnknownName):
            SmoothFactor("bessel")

    @pytest.mark.parametrize("maps,exc", [
        (((0.5, 0.0, 1.0),), InvalidMeasure),
        (((0.5, 0.0, 0.5), (0.5, 0.5, 0.5)), OverlappingIFSMaps),
        (((0.5, 0.0, 0.5), (0.4, 0.3, 0.5)), OverlappingIFSMaps),
        (((1 / 3, 0.0, 0.4), (1 / 3, 2 / 3, 0.4)), InvalidMeasure),
        (((1 / 3, 0.0, 0.5), (1 / 3, 0.8, 0.5)), LocationOutOfRange),
    ])
    def test_ifs_validation(self, maps, exc):
        with pytest.raises(exc):
            SelfSimilarSpec(maps)

    def test_measure_is_immutable(self):
        mu = dirac(0.5)
        with pytest.raises(AttributeError):
            mu.atoms = ()


class TestMass:
    def test_half_endpoints(self):
        assert total_mass(make_measure([(0.0, 0.5), (1.0, 0.5)])) == 1.0

    def test_empty(self):
        assert total_mass(make_measure()) == 0.0

    def test_power_half_density(self):
        # B(1/2, 1/2)/pi by QUADPACK with the algebraic weight
        oracle = integrate.quad(lambda t: 1 / math.pi, 0, 1, weight="alg", wvar=(-0.5, -0.5))[0]
        d = DensitySpec(0.5, 0.5, SmoothFactor("power_alpha", alpha=0.5))
        assert total_mass(make_measure(ac=d)) == pytest.approx(oracle, rel=1e-12)

    @pytest.mark.parametrize("alpha", [0.1, 0.25, 0.5, 0.75, 0.9])
    def test_power_family_is_probability(self, alpha):
        d = DensitySpec(alpha, 1 - alpha, SmoothFactor("power_alpha", alpha=alpha))
        assert d.mass == pytest.approx(1.0, rel=1e-12)

    def test_mixed(self):
        assert mixed().mass == pytest.approx(1.0, rel=1e-14)


class TestLinComb:
    def test_half_endpoint_pair(self):
        mu = lin_comb([0.5, 0.5], [dirac(0.0), dirac(1.0)])
        assert sorted((a.t, a.w) for a in mu.atoms) == [(0.0, 0.5), (1.0, 0.5)]

    def test_identity(self):
        nu = mixed()
        assert lin_comb([0.0, 1.0], [dirac(0.3), nu]) == nu

    def test_atomic_sum(self):
        ts, ws = [0.1, 0.4, 0.9], [0.2, 1.5, 0.7]
        mu = lin_comb(ws, [dirac(t) for t in ts])
        assert sorted((a.t, a.w) for a in mu.atoms) == list(zip(ts, ws))

    def test_densities_merge_by_shape(self):
        mu = lin_comb([2.0, 3.0], [lebesgue(), lebesgue()])
        assert len(mu.ac) == 1 and mu.ac[0].scale == 5.0

    def test_negative_coefficient(self):
        with pytest.raises(NegativeCoefficient):
            lin_comb([-1.0], [dirac(0.5)])

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            lin_comb([1.0, 2.0], [dirac(0.5)])

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.tuples(st.floats(0, 5), measures()), min_size=1, max_size=3))
    def test_mass_linear(self, pairs):
        cs, mus = zip(*pairs)
        expected = math.fsum(c * m.mass for c, m in pairs)
        assert lin_comb(cs, mus).mass == pytest.approx(expected, rel=1e-8, abs=1e-14)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.tuples(st.floats(0, 5), st.lists(st.tuples(st.floats(0, 1), st.floats(0, 3)),
                                                         max_size=3, unique_by=lambda a: a[0])),
                    min_size=1, max_size=3))
    def test_atomic_mass_linear(self, pairs):
        cs = [c for c, _ in pairs]
        mus = [make_measure(a) for _, a in pairs]
        expected = math.fsum(c * m.mass for c, m in zip(cs, mus))
        assert lin_comb(cs, mus).mass == pytest.approx(expected, rel=1e-12, abs=1e-300)


class TestReflect:
    def test_dirac(self):
        assert pushforward_reflect(dirac(0.3)).atoms[0].t == pytest.approx(0.7, abs=1e-16)
        assert pushforward_reflect(dirac(1.0)).atoms[0].t == 0.0

    def test_lebesgue_fixed(self):
        assert pushforward_reflect(lebesgue()) == lebesgue()

    @pytest.mark.parametrize("alpha", [0.2, 0.5, 0.7])
    def test_power_density_swaps_exponents(self, alpha):
        d = DensitySpec(alpha, 1 - alpha, SmoothFactor("power_alpha", alpha=alpha))
        r = pushforward_reflect(make_measure(ac=d)).ac[0]
        assert (r.left_exponent, r.right_exponent) == pytest.approx((1 - alpha, alpha))
        ts = np.linspace(0.05, 0.95, 19)
        expected = math.sin(alpha * math.pi) / math.pi * ts ** (-alpha) * (1 - ts) ** (alpha - 1)
        np.testing.assert_allclose(r(ts), expected, rtol=1e-13)

    @settings(max_examples=100, deadline=None)
    @given(measures())
    def test_involution_exact(self, mu):
        assert pushforward_reflect(pushforward_reflect(mu)) == mu

    @settings(max_examples=50, deadline=None)
    @given(measures())
    def test_mass_preserved(self, mu):
        assert pushforward_reflect(mu).mass == pytest.approx(mu.mass, rel=1e-12, abs=1e-300)

    @settings(max_examples=50, deadline=None)
    @given(measures())
    def test_symmetrization(self, mu):
        sym = lin_comb([0.5, 0.5], [mu, pushforward_reflect(mu)])
        assert is_symmetric_measure(sym)


class TestFromLoewner:
    def test_atom_at_one(self):
        mu = from_loewner(LoewnerMeasureSpec(atoms=((1.0, 0.7),)))
        assert mu.atoms == (Atom(0.5, 0.7),)

    def test_atom_at_infinity(self):
        mu = from_loewner(LoewnerMeasureSpec(infinity=2.0))
        assert mu.atoms == (Atom(1.0, 2.0),)

    def test_atom_locations_and_complements(self):
        mu = from_loewner(LoewnerMeasureSpec(atoms=((3.0, 1.0), (0.0, 2.0))))
        locs = {a.t: a.tc for a in mu.atoms}
        assert locs == {0.75: 0.25, 0.0: 1.0}

    @pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
    def test_power_density(self, alpha):
        c = math.sin(alpha * math.pi) / math.pi
        # lam^(alpha-1)/(1+lam) written as lam^(p-1)(1+lam)^(-p-q) with p=alpha, q=1-alpha
        nu = LoewnerMeasureSpec(ac=(LoewnerDensity(alpha, 1 - alpha, SmoothFactor("const", c)),))
        mu = from_loewner(nu)
        ts = np.linspace(0.01, 0.99, 50)
        np.testing.assert_allclose(density(mu, ts), c * ts ** (alpha - 1) * (1 - ts) ** (-alpha),
                                   rtol=1e-12)
        assert nu.total_mass() == pytest.approx(1.0, rel=1e-10)
        assert mu.mass == pytest.approx(nu.total_mass(), rel=1e-8)

    @pytest.mark.parametrize("support", [(0.0, 1.0), (0.5, 4.0), (2.0, math.inf)])
    def test_partial_support_mass(self, support):
        nu = LoewnerMeasureSpec(ac=(LoewnerDensity(0.5, 1.5, support=support),))
        lo, hi = support
        # beta-prime(p, q) on [lo, hi] maps to Beta(p, q) on [lo/(1+lo), hi/(1+hi)]
        t_lo, t_hi = lo / (1 + lo), (1.0 if hi == math.inf else hi / (1 + hi))
        expected = special.beta(0.5, 1.5) * (special.betainc(0.5, 1.5, t_hi)
                                             - special.betainc(0.5, 1.5, t_lo))
        assert nu.total_mass() == pytest.approx(expected, rel=1e-9)
        assert from_loewner(nu).mass == pytest.approx(expected, rel=1e-9)

    def test_evaluate_matches_unit_interval(self):
        from opmonotone.omf import OMFunction, evaluate
        nu = LoewnerMeasureSpec(atoms=((0.5, 1.0),), infinity=0.5,
                                ac=(LoewnerDensity(0.3, 0.7),))
        f = OMFunction(from_loewner(nu))
        for x in (0.1, 1.0, 7.0):
            assert evaluate(f, x) == pytest.approx(nu.evaluate(x), rel=1e-9)

    def test_rejects_smooth_non_constant(self):
        with pytest.raises(InvalidMeasure):
            LoewnerDensity(1.0, 1.0, SmoothFactor("log_mean"))

    def test_rejects_bad_atom(self):
        with pytest.raises(LocationOutOfRange):
            LoewnerMeasureSpec(atoms=((-1.0, 1.0),))


class TestDecompose:
    def test_mixed_masses(self):
        ac, sd, sc = decompose_measure(mixed())
        assert (ac.mass, sd.mass, sc.mass) == pytest.approx((0.5, 0.3, 0.2), rel=1e-14)

    def test_pure_dirac(self):
        parts = decompose_measure(dirac(0.4))
        assert parts.ac == Measure() and parts.sc == Measure() and parts.sd == dirac(0.4)

    def test_lebesgue(self):
        parts = decompose_measure(lebesgue())
        assert parts.ac == lebesgue() and parts.sd.mass == 0 and parts.sc.mass == 0

    @settings(max_examples=50, deadline=None)
    @given(measures())
    def test_recombine_exact(self, mu):
        assert lin_comb([1, 1, 1], decompose_measure(mu)) == mu


class TestSymmetric:
    def test_symmetric_pair(self):
        assert is_symmetric_measure(lin_comb([0.5, 0.5], [dirac(0.3), dirac(0.7)]))

    def test_single_dirac(self):
        assert not is_symmetric_measure(dirac(0.3))

    def test_log_mean_density(self):
        assert is_symmetric_measure(make_measure(ac=DENSITY_TERMS[4]))

    def test_log_mean_formula(self):
        ts = np.linspace(0.01, 0.99, 99)
        expected = 1 / (ts * (1 - ts) * (math.pi ** 2 + np.log(ts / (1 - ts)) ** 2))
        np.testing.assert_allclose(SmoothFactor("log_mean")(ts), expected, rtol=1e-14)

    def test_asymmetric_beta(self):
        assert not is_symmetric_measure(make_measure(ac=DensitySpec(0.3, 0.7)))

    def test_cantor_symmetric(self):
        assert is_symmetric_measure(make_measure(sc=SelfSimilarSpec.cantor()))

    def test_bad_tol(self):
        with pytest.raises(ValueError):
            is_symmetric_measure(dirac(0.5), 0.0)


class TestNormalize:
    def test_scaled_dirac(self):
        mu, m = normalize(dirac(0.5, 2.0))
        assert m == 2.0 and mu == dirac(0.5)

    def test_lebesgue(self):
        mu, m = normalize(lebesgue())
        assert m == pytest.approx(1.0, abs=1e-15)
        assert mu.mass == pytest.approx(1.0, abs=1e-15)

    def test_zero(self):
        with pytest.raises(ZeroMass):
            normalize(make_measure())

    @settings(max_examples=40, deadline=None)
    @given(measures())
    def test_unit_mass(self, mu):
        if mu.mass == 0:
            return
        assert normalize(mu)[0].mass == pytest.approx(1.0, rel=1e-12)


class TestCompare:
    def test_harmonic_vs_arithmetic_incomparable(self):
        f_mu = dirac(0.5)
        g_mu = lin_comb([0.5, 0.5], [dirac(0.0), dirac(1.0)])
        assert compare_measures(f_mu, g_mu) == "incomparable"

    def test_leq_and_geq(self):
        assert compare_measures(dirac(0.5), dirac(0.5, 2.0)) == "leq"
        assert compare_measures(lebesgue(2.0), lebesgue()) == "geq"
        assert compare_measures(mixed(), mixed()) == "equal"

    @settings(max_examples=40, deadline=None)
    @given(measures(), measures())
    def test_sum_dominates(self, mu, nu):
        assert measure_leq(mu, lin_comb([1, 1], [mu, nu]))
