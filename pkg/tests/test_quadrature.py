import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special as sps

from laguerre_lab.errors import DomainError
from laguerre_lab.quadrature import (
    DecayCertificate,
    NormSpec,
    gauss_laguerre_rule,
    gauss_legendre_rule,
    hardy_check,
    tail_cutoff,
    weighted_norm,
)
from laguerre_lab.special import SystemTag, laguerre_fn


class TestGaussLaguerre:
    @pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.3])
    def test_one_point(self, alpha):
        r = gauss_laguerre_rule(1, alpha)
        assert r.nodes[0] == pytest.approx(alpha + 1, rel=1e-14)
        assert r.weights[0] == pytest.approx(math.gamma(alpha + 1), rel=1e-14)

    def test_two_point(self):
        r = gauss_laguerre_rule(2, 0.0)
        s = math.sqrt(2)
        assert np.allclose(r.nodes, [2 - s, 2 + s], rtol=1e-14)
        assert np.allclose(r.weights, [(2 + s) / 4, (2 - s) / 4], rtol=1e-14)
        assert r.integrate(r.nodes ** 3) == pytest.approx(6.0, abs=1e-13)

    @pytest.mark.parametrize("N", [1, 5, 21, 64, 512])
    @pytest.mark.parametrize("alpha", [-0.5, 0.0, 2.5])
    def test_invariants(self, N, alpha):
        r = gauss_laguerre_rule(N, alpha)
        assert np.all(np.diff(r.nodes) > 0)
        assert np.all(r.nodes > 0)
        assert np.all(r.weights >= 0)
        assert r.exactness == 2 * N - 1
        assert np.sum(r.weights) == pytest.approx(math.gamma(alpha + 1), rel=1e-12)

    @pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.0, 2.5])
    def test_moment_exactness(self, alpha):
        N = 20
        r = gauss_laguerre_rule(N, alpha)
        for k in range(2 * N):
            ref = math.exp(math.lgamma(k + alpha + 1))
            assert r.integrate(r.nodes ** k) == pytest.approx(ref, rel=1e-12)

    def test_nodes_against_scipy(self):
        x, w = sps.roots_genlaguerre(40, 0.7)
        r = gauss_laguerre_rule(40, 0.7)
        assert np.allclose(r.nodes, x, rtol=1e-12)
        assert np.allclose(r.weights, w, rtol=1e-9, atol=1e-300)

    def test_domain(self):
        with pytest.raises(DomainError):
            gauss_laguerre_rule(0, 0.0)
        with pytest.raises(DomainError):
            gauss_laguerre_rule(4, -1.0)

    def test_csv_export(self, tmp_path):
        r = gauss_laguerre_rule(3, 0.0)
        path = tmp_path / "rule.csv"
        r.to_csv(path)
        rows = list(csv.reader(open(path)))
        assert rows[0] == ["node", "weight"]
        assert [float(a) for a, _ in rows[1:]] == list(r.nodes)
        assert [float(b) for _, b in rows[1:]] == list(r.weights)


class TestGaussLegendre:
    def test_two_point(self):
        r = gauss_legendre_rule(2, -1, 1)
        assert np.allclose(r.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)], rtol=1e-15)
        assert np.allclose(r.weights, [1, 1], rtol=1e-15)
        assert gauss_legendre_rule(2, 0, 1).integrate(gauss_legendre_rule(2, 0, 1).nodes ** 2) == \
            pytest.approx(1 / 3, abs=1e-14)

    @given(st.integers(1, 50), st.floats(-10, 10), st.floats(0.01, 10))
    def test_length(self, N, a, h):
        r = gauss_legendre_rule(N, a, a + h)
        assert np.sum(r.weights) == pytest.approx(h, rel=1e-13)

    def test_order(self):
        with pytest.raises(DomainError):
            gauss_legendre_rule(3, 1.0, 1.0)


class TestWeightedNorm:
    def test_examples(self):
        d1 = DecayCertificate(1.0, 0.5)
        assert weighted_norm(lambda x: np.exp(-x / 2), NormSpec(2, 0), d1, tol=1e-12) == \
            pytest.approx(1.0, rel=1e-11)
        l00 = lambda x: laguerre_fn(SystemTag("l", 0.0), 0, x)  # noqa: E731
        assert weighted_norm(l00, NormSpec(2, 0), d1, tol=1e-12) == pytest.approx(1.0, rel=1e-11)
        assert weighted_norm(lambda x: np.exp(-x), NormSpec(1, 1), DecayCertificate(1.0, 1.0),
                             tol=1e-12) == pytest.approx(1.0, rel=1e-11)

    @pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.7])
    @pytest.mark.parametrize("gamma", [-0.5, 0.0, 2.0])
    def test_against_gamma_function(self, p, gamma):
        # int (x^a e^{-bx})^p x^gamma dx = Gamma(ap+gamma+1) / (bp)^(ap+gamma+1)
        a, b = 1.5, 0.8
        f = lambda x: x ** a * np.exp(-b * x)  # noqa: E731
        peak = (a / (0.5 * b * math.e)) ** a
        cert = DecayCertificate(peak, 0.5 * b)
        e = a * p + gamma + 1
        ref = (math.gamma(e) / (b * p) ** e) ** (1 / p)
        assert weighted_norm(f, NormSpec(p, gamma), cert, tol=1e-10) == pytest.approx(ref, rel=1e-9)

    def test_mu_alpha_measure(self):
        # ||e^{-x^2/2}||_{2,0} in x^{2alpha+1} dx is (Gamma(alpha+1)/2)^{1/2}
        alpha = 0.7
        spec = NormSpec(2, 0.0, "mu_alpha", alpha)
        got = weighted_norm(lambda x: np.exp(-x * x / 2), spec, DecayCertificate(1, 0.5, 2), tol=1e-12)
        assert got == pytest.approx(math.sqrt(math.gamma(alpha + 1) / 2), rel=1e-11)

    @given(st.floats(-50, 50).filter(lambda c: abs(c) > 1e-6))
    @settings(max_examples=25, deadline=None)
    def test_homogeneity(self, c):
        f = lambda x: x * np.exp(-x / 2)  # noqa: E731
        cert = DecayCertificate(2.0, 0.25)
        spec = NormSpec(2.5, 0.5)
        base = weighted_norm(f, spec, cert, tol=1e-12)
        scaled = weighted_norm(lambda x: c * f(x), spec, cert.scaled(c), tol=1e-12)
        assert scaled == pytest.approx(abs(c) * base, rel=1e-12)

    @given(st.floats(1e-14, 1e-2), st.floats(1, 4), st.floats(-0.9, 3))
    def test_cutoff_monotone_in_tol(self, tol, p, w):
        cert = DecayCertificate(3.0, 0.5, 1.0)
        assert tail_cutoff(cert, p, w, tol / 2) >= tail_cutoff(cert, p, w, tol)

    def test_spec_validation(self):
        with pytest.raises(DomainError):
            NormSpec(0.5)
        with pytest.raises(DomainError):
            NormSpec(2, -1.0)
        with pytest.raises(DomainError):
            NormSpec(2, 0.0, "mu_alpha")
        with pytest.raises(DomainError):
            DecayCertificate(1.0, 0.0)


class TestHardy:
    def test_equality_case(self):
        h = hardy_check(lambda y: np.exp(-y), 1.0, 0.0, DecayCertificate(1.0, 1.0))
        assert h.lhs == pytest.approx(1.0, rel=1e-9)
        assert h.rhs == pytest.approx(1.0, rel=1e-9)
        assert h.constant == 1.0

    def test_zero(self):
        h = hardy_check(lambda y: np.zeros_like(y), 2.0, 1.0, DecayCertificate(0.0, 1.0))
        assert (h.lhs, h.rhs) == (0.0, 0.0)

    def test_p2_delta1(self):
        # lhs^2 = int e^{-2x} x dx = 1/4; rhs^2 = int y^3 e^{-2y} dy = 3/8
        h = hardy_check(lambda y: np.exp(-y), 2.0, 1.0, DecayCertificate(1.0, 1.0))
        assert h.lhs == pytest.approx(0.5, rel=1e-9)
        assert h.rhs == pytest.approx(math.sqrt(3 / 8), rel=1e-9)
        assert h.holds()

    def test_domain(self):
        with pytest.raises(DomainError):
            hardy_check(lambda y: np.exp(-y), 2.0, -1.0, DecayCertificate(1.0, 1.0))
