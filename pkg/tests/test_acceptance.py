"""Acceptance criteria, one test each; every test prints a PASS/FAIL line."""

import csv
import json
import math
import time

import numpy as np
import pytest

from laguerre_lab.expansion import Expansion, MultiplierSpaceParams, analyze, decay_certificate, \
    projection_formula_check, synthesize
from laguerre_lab.probe import (
    ProbeConfig,
    cesaro_growth_experiment,
    dsm_bounds_experiment,
    embedding_experiment,
    kernel_profile_experiment,
    transplantation_experiment,
)
from laguerre_lab.quadrature import DecayCertificate, NormSpec, gauss_laguerre_rule, hardy_check, weighted_norm
from laguerre_lab.semigroup import (
    PoissonState,
    g_sigma,
    poisson_decay,
    poisson_kernel,
    poisson_kernel_closed,
    poisson_means,
    twisted_convolve,
)
from laguerre_lab.sequences import cesaro_frac_diff_closed, cesaro_seq, constant, frac_diff_vec, geometric, \
    oscillating_seq
from laguerre_lab.special import SystemTag, laguerre_fn_table


@pytest.fixture
def verdict(capsys):
    """Print one PASS/FAIL line (visible in captured and uncaptured runs), then assert."""

    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[acceptance {number:2d}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail

    return emit


def test_01_gram_orthonormality(verdict):
    start = time.perf_counter()
    worst = 0.0
    for alpha in (0.0, 0.5, 1.0, 2.5):
        rule = gauss_laguerre_rule(21, alpha)
        # l_j l_k x^alpha = p_j p_k x^alpha e^{-x}, degree 40 <= 2N - 1 = 41
        T = laguerre_fn_table(SystemTag("l", alpha), 20, rule.nodes) * np.exp(rule.nodes / 2)
        G = (T * rule.weights) @ T.T
        worst = max(worst, float(np.max(np.abs(G - np.eye(21)))))
    elapsed = time.perf_counter() - start
    verdict(1, worst <= 1e-10 and elapsed < 5, f"max|G-I| = {worst:.2e} (<= 1e-10), runtime {elapsed:.2f} s (< 5 s)")


def test_02_fractional_differences(verdict):
    geo = 0.0
    for r in (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9):
        for kappa in (0.25, 1.0, 2.5):
            k = np.arange(21)
            got = frac_diff_vec(geometric(r), kappa, 20, tol=1e-10)
            geo = max(geo, float(np.max(np.abs(got - (1 - r) ** kappa * r ** k))))
    ces = 0.0
    for n in range(33):
        for nu in (0.0, 0.5, 1.0, 2.5):
            m = cesaro_seq(n, nu)
            for sp in (0.5, 1.0, 1.5, 2.0):
                got = frac_diff_vec(m, sp, 2 * n)
                ref = np.array([cesaro_frac_diff_closed(n, nu, sp, k) for k in range(2 * n + 1)])
                ces = max(ces, float(np.max(np.abs(got - ref))))
    verdict(2, geo <= 1e-8 and ces <= 1e-10,
            f"geometric identity max err {geo:.2e} (<= 1e-8); Cesaro oracle max err {ces:.2e} (<= 1e-10)")


def test_03_square_function_constant(verdict):
    worst = 0.0
    for alpha in (0.0, 1.0):
        rng = np.random.default_rng(2024 + int(alpha))
        spec = NormSpec(2, 0.0, "mu_alpha", alpha)
        for _ in range(20):
            e = Expansion(SystemTag("psi", alpha), rng.standard_normal(17))
            # (lam_j lam_k)/(lam_j+lam_k)^2 <= 1/4 gives g_1 <= (1/2) sum |c_k psi_k|
            cert = decay_certificate(e).scaled(0.5)
            g = weighted_norm(lambda x: g_sigma(e, 1.0, x), spec, cert, tol=1e-12)
            f = weighted_norm(lambda x: synthesize(e, x), spec, decay_certificate(e), tol=1e-12)
            worst = max(worst, abs(g / f - 0.5))
    verdict(3, worst <= 1e-6, f"max |ratio - 0.5| = {worst:.2e} over 40 expansions (<= 1e-6)")


def test_04_poisson_calibration_and_positivity(verdict):
    cal = 0.0
    points = 0
    for alpha, t, coeffs in ((0.0, 0.3, [1.0, -0.5, 0.25]), (1.0, 0.5, [0.3, 1.0, 0.0, -0.4])):
        tag = SystemTag("psi", alpha)
        e = Expansion(tag, coeffs)
        f = lambda y, e=e: synthesize(e, y)  # noqa: E731
        target = poisson_means(analyze(f, tag, 8), t)
        p = lambda y, a=alpha, t=t: poisson_kernel_closed(a, t, y)  # noqa: E731
        for x in np.linspace(0.25, 2.5, 5):
            conv = twisted_convolve(f, p, x, alpha, decay_certificate(e), poisson_decay(alpha, t))
            cal = max(cal, abs(conv - synthesize(target, x)))
            points += 1
    closed_min = math.inf
    series_ok = True
    y = np.linspace(0.0, 4.0, 81)
    for alpha in (0.0, 1.0):
        for t in np.linspace(0.1, 2.0, 20):
            closed_min = min(closed_min, float(np.min(poisson_kernel_closed(alpha, t, y))))
            val, err = poisson_kernel(PoissonState(alpha, t), y, full_output=True)
            series_ok &= bool(np.all(val > -err)) and bool(np.all(np.abs(val - poisson_kernel_closed(alpha, t, y)) <= err))
    ok = cal <= 1e-5 and points == 10 and closed_min > 0 and series_ok
    verdict(4, ok, f"max |f x p_t - P^t f| = {cal:.2e} at {points} points (<= 1e-5); "
                   f"min p_t on grid = {closed_min:.3e} (> 0); series within certified bound: {series_ok}")


def test_05_transplantation(verdict):
    start = time.perf_counter()
    cfg = ProbeConfig(MultiplierSpaceParams(0.0, 2.0, 0.0), K=32, trials=200, seed=1)
    par = transplantation_experiment(0.0, 2.0, 2.0, 0.0, [8, 16, 32], cfg)
    parseval = max(max(abs(r[1] - 1), abs(r[2] - 1)) for r in par.rows)
    rep = transplantation_experiment(0.0, 2.0, 4.0, 0.0, [8, 16, 32], cfg)
    elapsed = time.perf_counter() - start
    ratios = [r[1] for r in rep.rows]
    ok = parseval <= 1e-8 and rep.metadata["bounded"] and elapsed < 120
    verdict(5, ok, f"p=2 |ratio-1| = {parseval:.2e} (<= 1e-8); p=4 ratios {[round(v, 4) for v in ratios]} "
                   f"bounded={rep.metadata['bounded']} (tail slope {rep.metadata['tail_slope']:.3f}); "
                   f"runtime {elapsed:.1f} s (< 120 s)")


def test_06_cesaro_growth(verdict):
    cfg = ProbeConfig(MultiplierSpaceParams(1.0, 1.1, 1.0), K=16, trials=64, seed=0)
    grow = cesaro_growth_experiment(1.0, 1.1, 0.0, [4, 8, 16, 32], cfg)
    flat = cesaro_growth_experiment(1.0, 1.1, 3.0, [4, 8, 16, 32], cfg)
    ok = grow.metadata["slope"] > 0 and flat.metadata["plateau"]
    verdict(6, ok, f"nu=0 slope {grow.metadata['slope']:.3f} (> 0; lower-bound prediction "
                   f"{grow.metadata['predicted_exponent']:.3f}); nu=3 plateau={flat.metadata['plateau']} "
                   f"(estimates {[round(r[1], 4) for r in flat.rows]})")


def _mixture(rng):
    n = int(rng.integers(1, 4))
    a, b, c = rng.uniform(0, 3, n), rng.uniform(0.5, 3, n), rng.uniform(0.1, 2, n)

    def f(x):
        x = np.asarray(x, dtype=float)
        return sum(ci * x ** ai * np.exp(-bi * x) for ai, bi, ci in zip(a, b, c))

    # x^a e^{-bx} <= (2a/(b e))^a e^{-bx/2}
    peak = np.where(a > 0, (a / (0.5 * b * math.e)) ** a, 1.0)
    return f, DecayCertificate(float(np.sum(c * peak)), float(b.min() / 2))


def test_07_hardy(verdict):
    tol = 1e-10
    violations = 0
    worst = 0.0
    for seed in range(100):
        f, cert = _mixture(np.random.default_rng(seed))
        for p, delta in ((1.0, 0.0), (2.0, 1.0), (3.0, 0.5)):
            h = hardy_check(f, p, delta, cert, tol=tol)
            worst = max(worst, h.lhs / h.bound)
            # both sides carry relative error <= tol; p = 1 is an identity, hence the allowance
            if not h.holds(rtol=4 * tol):
                violations += 1
    verdict(7, violations == 0, f"{violations} violations over 300 checks; max lhs/bound = {worst:.12f}")


def test_08_projection_formula(verdict):
    worst = 0.0
    for mu, nu in ((0, 1), (0, 2), (1, 0.5)):
        for k in range(11):
            for x in (0.0, 0.5, 1.0, 4.0):
                lhs, rhs = projection_formula_check(k, mu, nu, x)
                worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
    verdict(8, worst <= 1e-8, f"max relative disagreement {worst:.2e} (<= 1e-8), nu < 1 path included")


def test_09_kernel_profile(verdict):
    flags = {}
    for alpha in (0.0, 1.0):
        rep = kernel_profile_experiment(alpha)
        for regime in ("above", "below", "large"):
            vals = [r[-1] for r in rep.rows if r[1] == regime]
            flags[(alpha, regime)] = (rep.metadata["bounded"][regime], max(vals))
    ok = all(b for b, _ in flags.values())
    detail = "; ".join(f"a={a:g} {g}: sup {v:.4f}" for (a, g), (_, v) in flags.items())
    verdict(9, ok, detail)


def test_10_dsm_bounds(verdict, tmp_path):
    ok = True
    parts = []
    for alpha in (0.0, 1.0):
        rep = dsm_bounds_experiment(alpha, alpha + 1.5, {"one": constant(1.0), "cesaro_16_2": cesaro_seq(16, 2)})
        path = tmp_path / f"dsm_bounds_{alpha}.csv"
        rep.to_csv(path)
        rows = list(csv.reader(open(path)))
        emitted = rows[0] == rep.columns and len(rows) == 1 + len(rep.rows)
        ok &= bool(rep.metadata["all_bounded"]) and emitted
        sup = max(float(r[3]) for r in rows[1:])
        l2 = max(float(r[4]) for r in rows[1:])
        parts.append(f"alpha={alpha:g}: bounded={rep.metadata['all_bounded']} max sup-ratio {sup:.4f} "
                     f"max L2-ratio {l2:.4f} csv rows {len(rows) - 1}")
    verdict(10, ok, "; ".join(parts))


def test_11_determinism(verdict):
    def runs(workers):
        cfg = ProbeConfig(MultiplierSpaceParams(0.0, 3.0, 0.0), K=16, trials=48, seed=12345, workers=workers)
        return [
            cesaro_growth_experiment(0.0, 3.0, 0.5, [4, 8], cfg).to_csv(),
            transplantation_experiment(0.0, 2.0, 4.0, 0.0, [8, 16], cfg).to_csv(),
            embedding_experiment({"osc": oscillating_seq(1.0, 0.5), "ces": cesaro_seq(8, 1.0)},
                                 0.0, 3.0, 0.0, 1.5, cfg, K_list=[8, 16]).to_csv(),
        ]

    a, b, c = runs(1), runs(1), runs(4)
    same = all(x.encode() == y.encode() == z.encode() for x, y, z in zip(a, b, c))
    cfg = ProbeConfig(MultiplierSpaceParams(0.0, 3.0, 0.0), K=8, trials=8, seed=7)
    j1 = json.loads(cesaro_growth_experiment(0.0, 3.0, 0.5, [4, 8], cfg).to_json())
    j2 = json.loads(cesaro_growth_experiment(0.0, 3.0, 0.5, [4, 8], cfg.with_(workers=3)).to_json())
    for j in (j1, j2):
        j["metadata"].pop("timestamp")
    same_json = j1 == j2
    verdict(11, same and same_json,
            f"CSV byte-identical across repeat and workers=4: {same}; JSON equal modulo timestamp: {same_json}")
