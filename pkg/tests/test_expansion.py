import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from laguerre_lab.errors import DomainError, InvalidParamsError
from laguerre_lab.expansion import (
    Expansion,
    MultiplierSpaceParams,
    analyze,
    apply_multiplier,
    decay_certificate,
    dual,
    lep_range,
    phi_shift,
    projection_at_zero,
    projection_formula_check,
    script_shift,
    space_arithmetic,
    synthesize,
    tag_norm_spec,
    multiplier_weight_range,
    transplant_weight_range,
    transplant,
)
from laguerre_lab.quadrature import weighted_norm
from laguerre_lab.sequences import cesaro_seq, constant, table
from laguerre_lab.special import FAMILIES, SystemTag, laguerre_fn

coeff_vectors = st.lists(st.floats(-3, 3), min_size=1, max_size=17)


class TestAnalyze:
    @pytest.mark.parametrize("family", FAMILIES)
    @pytest.mark.parametrize("alpha", [0.0, 0.5, 2.0])
    def test_basis_function_gives_unit_vector(self, family, alpha):
        tag = SystemTag(family, alpha)
        e = analyze(lambda x: laguerre_fn(tag, 3, x), tag, 6)
        assert np.max(np.abs(e.coeffs - np.eye(7)[3])) <= 1e-10

    def test_examples(self):
        tag = SystemTag("l", 0.0)
        assert np.allclose(analyze(lambda x: np.exp(-x / 2), tag, 4).coeffs, [1, 0, 0, 0, 0], atol=1e-12)
        assert np.allclose(analyze(lambda x: x * np.exp(-x / 2), tag, 4).coeffs, [1, -1, 0, 0, 0], atol=1e-12)

    @pytest.mark.parametrize("family", FAMILIES)
    def test_round_trip(self, family):
        rng = np.random.default_rng(11)
        tag = SystemTag(family, 1.0)
        c = rng.standard_normal(17)
        e = Expansion(tag, c)
        back = analyze(lambda x: synthesize(e, x), tag, 16)
        assert np.max(np.abs(back.coeffs - c)) <= 1e-8

    @pytest.mark.parametrize("family", FAMILIES)
    def test_composite_agrees_with_gauss(self, family):
        tag = SystemTag(family, 1.0)
        e = Expansion(tag, [0.5, -1.0, 0.25, 2.0])
        f = lambda x: synthesize(e, x)  # noqa: E731
        g = analyze(f, tag, 5, tol=1e-9)
        c = analyze(f, tag, 5, tol=1e-8, method="composite", decay=decay_certificate(e))
        assert np.max(np.abs(g.coeffs - c.coeffs)) <= 1e-8

    def test_complex_functions(self):
        tag = SystemTag("psi", 0.5)
        e = Expansion(tag, [1 + 1j, 0.5j, -2])
        back = analyze(lambda x: synthesize(e, x), tag, 4)
        assert np.allclose(back.coeffs, list(e.coeffs) + [0, 0], atol=1e-12)

    def test_composite_needs_certificate(self):
        with pytest.raises(DomainError):
            analyze(np.exp, SystemTag("l", 0.0), 3, method="composite")


class TestSynthesize:
    def test_examples(self):
        tag = SystemTag("l", 0.0)
        assert synthesize(Expansion(tag, [1.0]), 0.0) == 1.0
        assert synthesize(Expansion(tag, np.zeros(5)), 2.0) == 0.0

    def test_shape_is_preserved(self):
        e = Expansion(SystemTag("psi", 0.0), [1.0, 2.0])
        x = np.linspace(0.1, 2, 12).reshape(3, 4)
        assert synthesize(e, x).shape == (3, 4)

    @pytest.mark.parametrize("family", FAMILIES)
    @pytest.mark.parametrize("alpha", [0.0, 1.0])
    def test_parseval(self, family, alpha):
        rng = np.random.default_rng(5)
        tag = SystemTag(family, alpha)
        for _ in range(3):
            e = Expansion(tag, rng.standard_normal(25))
            n = weighted_norm(lambda x: synthesize(e, x), tag_norm_spec(tag), decay_certificate(e), tol=1e-12)
            assert n == pytest.approx(np.linalg.norm(e.coeffs), rel=1e-8)

    @given(coeff_vectors, st.floats(0.01, 20.0))
    @settings(max_examples=40)
    def test_decay_certificate_is_an_envelope(self, c, x):
        for family in FAMILIES:
            tag = SystemTag(family, 0.5)
            e = Expansion(tag, c)
            d = decay_certificate(e)
            assert abs(synthesize(e, x)) <= d.C * math.exp(-d.c * x ** d.sigma) * (1 + 1e-12) + 1e-300


class TestExpansionObject:
    def test_immutable(self):
        e = Expansion(SystemTag("l", 0.0), [1.0, 2.0])
        with pytest.raises(ValueError):
            e.coeffs[0] = 3.0

    def test_json_round_trip(self):
        e = Expansion(SystemTag("phi", 1.5), [1.0, -2.5 + 1j, 0.0])
        rec = json.loads(e.to_json())
        assert rec["family"] == "phi" and rec["alpha"] == 1.5
        back = Expansion.from_json(e.to_json())
        assert back.tag == e.tag
        assert np.array_equal(back.coeffs, e.coeffs)

    def test_csv(self, tmp_path):
        e = Expansion(SystemTag("l", 0.0), [1.0, 2.0])
        path = tmp_path / "c.csv"
        e.to_csv(path)
        assert open(path).read().splitlines()[0] == "k,re,im"


class TestMultipliers:
    def test_identity(self):
        e = Expansion(SystemTag("l", 1.0), [1.0, -2.0, 3.0])
        assert np.array_equal(apply_multiplier(constant(1.0), e).coeffs, e.coeffs)

    def test_projection(self):
        e = Expansion(SystemTag("l", 1.0), [1.0, -2.0, 3.0])
        assert np.array_equal(apply_multiplier(table([1.0]), e).coeffs, [1.0, 0.0, 0.0])

    def test_cesaro(self):
        e = Expansion(SystemTag("l", 0.0), [1.0, 1.0, 1.0])
        assert np.allclose(apply_multiplier(cesaro_seq(2, 1), e).coeffs, [1, 2 / 3, 1 / 3], rtol=1e-15)


class TestTransplant:
    def test_identity_and_round_trip(self):
        e = Expansion(SystemTag("script_l", 2.0), [1.0, 0.5, -0.25])
        assert transplant(e, 2.0) == e
        there = transplant(e, 0.0)
        assert there.tag == SystemTag("script_l", 0.0)
        assert transplant(there, 2.0) == e

    def test_parseval_ratio(self):
        rng = np.random.default_rng(2)
        for _ in range(3):
            e = Expansion(SystemTag("script_l", 2.0), rng.standard_normal(10))
            t = transplant(e, 0.0)
            a = weighted_norm(lambda x: synthesize(t, x), tag_norm_spec(t.tag), decay_certificate(t), tol=1e-12)
            b = weighted_norm(lambda x: synthesize(e, x), tag_norm_spec(e.tag), decay_certificate(e), tol=1e-12)
            assert a / b == pytest.approx(1.0, abs=1e-8)

    def test_wrong_family(self):
        with pytest.raises(DomainError):
            transplant(Expansion(SystemTag("l", 0.0), [1.0]), 1.0)


class TestSpaceArithmetic:
    def test_dual_example(self):
        d = dual(MultiplierSpaceParams(1, 2, 1))
        assert (d.alpha, d.p, d.gamma) == (1, 2, 1)

    @given(st.floats(-0.9, 5), st.floats(1.05, 20), st.floats(0, 1))
    def test_dual_is_involution(self, alpha, p, frac):
        lo, hi = -1, p * (alpha + 1) - 1
        g = lo + (hi - lo) * (0.02 + 0.96 * frac)
        prm = MultiplierSpaceParams(alpha, p, g)
        back = dual(dual(prm))
        assert back.p == pytest.approx(p, rel=1e-12)
        assert back.gamma == pytest.approx(g, rel=1e-9, abs=1e-9)

    def test_shifts(self):
        s = script_shift(2, 2, 0)
        assert (s.alpha, s.p, s.gamma) == (2, 2, 2)
        f = phi_shift(0, 2, 0)
        assert f.gamma == 0.0
        assert space_arithmetic(MultiplierSpaceParams(2, 2, 0), "script-shift") == s

    def test_ranges(self):
        assert multiplier_weight_range(MultiplierSpaceParams(0, 2, 0))
        assert multiplier_weight_range(MultiplierSpaceParams(0, 2, 0.999))
        assert not multiplier_weight_range(MultiplierSpaceParams(0, 4, 2.5))
        assert space_arithmetic(MultiplierSpaceParams(0, 2, 0), "multiplier-range") is True
        assert transplant_weight_range(0, 2, 4, 0)
        assert not transplant_weight_range(0, 2, 4, 3.5)
        assert transplant_weight_range(-0.5, 0, 2, 0.4)
        assert not transplant_weight_range(-0.5, 0, 2, -0.7)
        assert lep_range(1, 2) and not lep_range(1, 5) and lep_range(0, 100)
        assert space_arithmetic(MultiplierSpaceParams(0, 4, 0), "transplant-range", beta=2, delta=0)

    def test_invalid(self):
        with pytest.raises(InvalidParamsError):
            MultiplierSpaceParams(0, 2, 1.5)
        with pytest.raises(InvalidParamsError):
            MultiplierSpaceParams(0, 1, 0)
        with pytest.raises(InvalidParamsError):
            MultiplierSpaceParams(-1, 2, 0)
        with pytest.raises(DomainError):
            space_arithmetic(MultiplierSpaceParams(0, 2, 0), "nonsense")


class TestProjectionFormula:
    def test_examples(self):
        lhs, rhs = projection_formula_check(1, 0, 1, 1.0)
        assert lhs == pytest.approx(1.0, abs=1e-15) and rhs == pytest.approx(1.0, abs=1e-13)
        for mu, nu in ((0, 1), (1.5, 0.3), (2, 4), (2, 0.3)):
            lhs, rhs = projection_formula_check(0, mu, nu, 3.0)
            assert lhs == 1.0 and rhs == pytest.approx(1.0, rel=1e-12)

    @pytest.mark.parametrize("mu,nu", [(0, 1), (0, 2), (1, 0.5)])
    def test_grid(self, mu, nu):
        for k in range(11):
            for x in (0.0, 0.5, 1.0, 4.0):
                lhs, rhs = projection_formula_check(k, mu, nu, x)
                assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(lhs))
            assert projection_formula_check(k, mu, nu, 0.0)[0] == pytest.approx(
                projection_at_zero(k, mu, nu), rel=1e-12)

    @pytest.mark.parametrize("mu,nu", [(0.5, 0.25), (-0.5, 3.0), (2.7, 0.8)])
    def test_fractional_parameters(self, mu, nu):
        for k in (0, 3, 10):
            for x in (0.0, 1.0, 4.0):
                lhs, rhs = projection_formula_check(k, mu, nu, x)
                assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))

    def test_domain(self):
        with pytest.raises(DomainError):
            projection_formula_check(2, 0, 0, 1.0)
