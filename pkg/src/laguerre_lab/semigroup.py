"""Poisson semigroup, square functions and generalised convolutions for the psi system."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sp

from .errors import DomainError, TruncationError
from .expansion import Expansion
from .quadrature import (
    DecayCertificate,
    adaptive_integrate,
    gauss_laguerre_rule,
    gauss_legendre_rule,
    tail_cutoff,
)
from .sequences import MultiplierSeq
from .special import binom_A_seq, bessel_normalized, laguerre_fn_table, theta_distance

TERM_BUDGET = 200_000
THETA_NODES = 128


def _require_alpha(alpha: float) -> None:
    if not alpha >= 0:
        raise DomainError("the psi-system convolution structure needs alpha >= 0")


def _lam(k, alpha):
    return 4.0 * np.asarray(k, dtype=float) + 2.0 * alpha + 2.0


def _log_laguerre_norm(k, alpha):
    """log sqrt(Gamma(k+alpha+1)/k!), the factor turning p_k into L_k."""
    k = np.asarray(k, dtype=float)
    return 0.5 * (sp.gammaln(k + alpha + 1) - sp.gammaln(k + 1))


def kernel_constant(alpha: float) -> float:
    """c_alpha = 2 / Gamma(alpha+1) in the kernel series.

    This is the value for which f x p_t = P^t f with the unit-mass
    translation (tau_x 1 = 1) and dmu_alpha = x^{2alpha+1} dx.
    """
    return 2.0 / math.gamma(alpha + 1)


def certify_truncation(alpha: float, r: float, s: float = 0.0, scale: float = 1.0,
                       tol: float = 1e-12, budget: int = TERM_BUDGET) -> int:
    """Smallest K with sum_{k>K} scale lam_k^s A_k^alpha r^{lam_k} <= tol.

    For alpha >= 0, |L_k^alpha(y^2) e^{-y^2/2}| <= A_k^alpha, so the bound
    controls the tail of any series sum b_k L_k^alpha(y^2) e^{-y^2/2} with
    |b_k| <= scale lam_k^s r^{lam_k}, uniformly in y. The term ratio
    decreases in k, giving a geometric majorant for the tail.
    """
    _require_alpha(alpha)
    if not 0 < r < 1:
        raise DomainError("r must lie in (0, 1)")
    if scale == 0:
        return 0
    s_pos = max(s, 0.0)
    log_r = math.log(r)
    start = 0
    chunk = 1024
    while start < budget:
        k = np.arange(start, start + chunk + 1, dtype=float)
        lam = _lam(k, alpha)
        log_a = (math.log(scale) + s * np.log(lam) + sp.gammaln(k + alpha + 1)
                 - sp.gammaln(alpha + 1) - sp.gammaln(k + 1) + lam * log_r)
        rho = (_lam(k + 1, alpha) / lam) ** s_pos * (k + 1 + alpha) / (k + 1) * r ** 4
        with np.errstate(divide="ignore"):
            log_tail = np.where(rho < 1, log_a - np.log1p(-np.minimum(rho, 1 - 1e-16)), np.inf)
        # tail beyond K is bounded by the majorant starting at K+1
        ok = np.nonzero(log_tail[1:] <= math.log(tol))[0]
        if len(ok):
            return int(start + ok[0])
        start += chunk
    raise TruncationError(f"kernel series needs more than {budget} terms at r = {r}")


@dataclass(frozen=True)
class PoissonState:
    """Poisson kernel at time t, truncated with a certified tail."""

    alpha: float
    t: float
    tail_tol: float = 1e-12
    budget: int = TERM_BUDGET

    def __post_init__(self):
        _require_alpha(self.alpha)
        if not self.t > 0:
            raise DomainError("t must be positive")

    @property
    def r(self) -> float:
        return math.exp(-self.t)

    @property
    def c_alpha(self) -> float:
        return kernel_constant(self.alpha)

    @property
    def K(self) -> int:
        return certify_truncation(self.alpha, self.r, 0.0, self.c_alpha, self.tail_tol, self.budget)


def _laguerre_series(b: np.ndarray, alpha: float, u: np.ndarray) -> np.ndarray:
    """sum_k b_k L_k^alpha(u) e^{-u/2}."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    return _laguerre_series_weighted(b, alpha, u, -0.5 * u)


def poisson_kernel(state: PoissonState, y, full_output: bool = False):
    """p_t(y) = c_alpha sum_k e^{-t lam_k} L_k^alpha(y^2) e^{-y^2/2}.

    With ``full_output`` also returns an absolute error bound: the
    certified tail plus a rounding allowance proportional to
    sum_k |b_k| A_k^alpha, which dominates the terms.
    """
    scalar = np.ndim(y) == 0
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(y < 0):
        raise DomainError("y must be non-negative")
    K = state.K
    k = np.arange(K + 1)
    b = state.c_alpha * np.exp(-state.t * _lam(k, state.alpha))
    out = _laguerre_series(b, state.alpha, y * y)
    if full_output:
        majorant = float(np.sum(b * binom_A_seq(K, state.alpha)))
        err = state.tail_tol + 8 * np.finfo(float).eps * (K + 1) * majorant
        return (float(out[0]) if scalar else out), err
    return float(out[0]) if scalar else out


def poisson_kernel_closed(alpha: float, t: float, y):
    """Closed form of p_t from the Hille-Hardy generating function (w = e^{-4t})."""
    _require_alpha(alpha)
    y = np.asarray(y, dtype=float)
    pref = kernel_constant(alpha) * math.exp(-t * (2 * alpha + 2)) * (-math.expm1(-4 * t)) ** (-alpha - 1)
    out = pref * np.exp(-0.5 * y * y / math.tanh(2 * t))
    return out if out.ndim else float(out)


def poisson_decay(alpha: float, t: float) -> DecayCertificate:
    """Exact envelope of p_t: it is C exp(-coth(2t) y^2 / 2)."""
    C = float(poisson_kernel_closed(alpha, t, 0.0))
    return DecayCertificate(C, 0.5 / math.tanh(2 * t), 2.0)


def poisson_means(e: Expansion, t: float) -> Expansion:
    """P^t: c_k -> e^{-t lam_k} c_k on a psi expansion."""
    if e.tag.family != "psi":
        raise DomainError("Poisson means act on psi expansions")
    if not t >= 0:
        raise DomainError("t must be non-negative")
    k = np.arange(e.K + 1)
    return Expansion(e.tag, np.exp(-t * _lam(k, e.tag.alpha)) * e.coeffs)


# ---------------------------------------------------------------------------
# g_sigma


def _psi_check(e: Expansion) -> None:
    if e.tag.family != "psi":
        raise DomainError("square functions are defined for psi expansions")


def g_sigma(e: Expansion, sigma: float, x):
    """g_sigma(f)(x) from the termwise-integrated closed form.

    g_sigma(f)^2(x) = Gamma(2 sigma) sum_{j,k} v_j conj(v_k) (lam_j + lam_k)^{-2 sigma}
    with v_k = lam_k^sigma c_k psi_k(x).
    """
    _psi_check(e)
    if not sigma >= 1:
        raise DomainError("sigma must be at least 1")
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    lam = _lam(np.arange(e.K + 1), e.tag.alpha)
    M = (lam[:, None] + lam[None, :]) ** (-2 * sigma)
    V = (lam ** sigma * e.coeffs)[:, None] * laguerre_fn_table(e.tag, e.K, x)
    q = np.einsum("jn,jk,kn->n", np.conj(V), M, V).real
    out = np.sqrt(np.maximum(q, 0.0) * math.gamma(2 * sigma))
    return float(out[0]) if scalar else out


def g_sigma_quadrature(e: Expansion, sigma: float, x: float, tol: float = 1e-12) -> float:
    """g_sigma(f)(x) by direct integration over t = |log r| (independent check)."""
    _psi_check(e)
    lam = _lam(np.arange(e.K + 1), e.tag.alpha)
    a = lam ** sigma * e.coeffs * laguerre_fn_table(e.tag, e.K, float(x))[:, 0]

    def F(t):
        d = np.exp(-np.outer(t, lam)) @ a
        return np.abs(d) ** 2 * t ** (2 * sigma - 1)

    lo = 1e-6 / lam[-1]
    hi = 60.0 / lam[0]
    edges = lo * 2.0 ** np.arange(0, math.ceil(math.log2(hi / lo)) + 1)
    val, _ = adaptive_integrate(F, np.concatenate(([0.0], edges)), tol)
    return math.sqrt(max(val, 0.0))


# ---------------------------------------------------------------------------
# translations and convolutions


def _translation_constant(alpha: float) -> float:
    return math.exp(math.lgamma(alpha + 1) - 0.5 * math.log(math.pi) - math.lgamma(alpha + 0.5))


@functools.lru_cache(maxsize=64)
def _theta_rule(nodes: int, alpha: float):
    """Nodes theta and weights for int_0^pi g(theta) sin^{2alpha} theta dtheta.

    With t = cos theta the weight becomes (1-t^2)^{alpha-1/2} dt, so a
    Gauss-Jacobi rule absorbs it exactly, including non-integer powers.
    """
    t, w = sp.roots_jacobi(nodes, alpha - 0.5, alpha - 0.5)
    th = np.arccos(t)
    th.setflags(write=False)
    w.setflags(write=False)
    return th, w


def euclidean_translate(f, x, y, alpha: float, nodes: int = THETA_NODES):
    """tau^E_x f(y) = c int_0^pi f((x,y)_theta) sin^{2alpha} theta dtheta."""
    _require_alpha(alpha)
    th, w = _theta_rule(nodes, float(alpha))
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = theta_distance(x[..., None], y[..., None], th)
    out = _translation_constant(alpha) * (np.asarray(f(d)) @ w)
    return out if np.ndim(out) else float(out)


def twisted_translate(f, x, y, alpha: float, nodes: int = THETA_NODES):
    """tau_x f(y): the Euclidean translation weighted by J_{alpha-1/2}(x y sin theta)."""
    _require_alpha(alpha)
    th, w = _theta_rule(nodes, float(alpha))
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = theta_distance(x[..., None], y[..., None], th)
    z = (x * y)[..., None] * np.sin(th)
    vals = np.asarray(f(d)) * bessel_normalized(alpha - 0.5, z)
    out = _translation_constant(alpha) * (vals @ w)
    return out if np.ndim(out) else float(out)


def twisted_convolve(f, g, x: float, alpha: float, decay_f: DecayCertificate,
                     decay_g: DecayCertificate, tol: float = 1e-10, nodes: int = 32,
                     theta_nodes: int = THETA_NODES, full_output: bool = False):
    """f x g(x) = int_0^inf tau_x f(y) g(y) dmu_alpha(y).

    The y-range is cut where sup|f| * |g| x^{2alpha+1} has tail below tol
    (|tau_x f| <= sup|f| <= decay_f.C); the y-integral uses composite
    Gauss-Legendre panels and is repeated on halved panels for an error
    estimate.
    """
    _require_alpha(alpha)
    w = 2 * alpha + 1
    bound = decay_g.scaled(max(decay_f.C, 1e-300))
    Y = tail_cutoff(bound, 1.0, w, tol)

    def run(width, n):
        edges = np.linspace(0.0, Y, max(2, int(math.ceil(Y / width))) + 1)
        rule = gauss_legendre_rule(n, 0.0, 1.0)
        a, b = edges[:-1, None], edges[1:, None]
        ys = (a + (b - a) * rule.nodes).ravel()
        ws = ((b - a) * rule.weights).ravel()
        tf = twisted_translate(f, x, ys, alpha, theta_nodes)
        return float(np.sum(ws * tf * np.asarray(g(ys)) * ys ** w))

    v1 = run(0.5, nodes)
    v2 = run(0.25, nodes)
    err = abs(v2 - v1) + tol
    if full_output:
        return v2, err
    return v2


# ---------------------------------------------------------------------------
# g_lambda^*


@dataclass(frozen=True)
class GLambdaKernel:
    """K(y) = (1 + y^2)^{-lambda}, dilated by delta_u f(y) = u^{-2(alpha+1)} f(y/u)."""

    lam: float
    alpha: float

    def __post_init__(self):
        _require_alpha(self.alpha)
        if not self.lam > self.alpha + 1:
            raise DomainError(
                f"K is not integrable against dmu_alpha unless lambda > alpha + 1 = {self.alpha + 1}")

    def __call__(self, y):
        return (1.0 + np.asarray(y, dtype=float) ** 2) ** (-self.lam)

    @property
    def mass(self) -> float:
        """int K dmu_alpha = Gamma(alpha+1) Gamma(lambda-alpha-1) / (2 Gamma(lambda))."""
        a, l = self.alpha, self.lam
        return 0.5 * math.exp(math.lgamma(a + 1) + math.lgamma(l - a - 1) - math.lgamma(l))

    def dilated(self, t: float, y):
        """K_t(y) = delta_{sqrt t} K(y)."""
        return t ** (-(self.alpha + 1)) * self(np.asarray(y, dtype=float) / math.sqrt(t))


@dataclass(frozen=True)
class GLambdaResult:
    value: float
    error_estimate: float


def _graded_edges(lo: float, hi: float, anchor: float, width: float) -> np.ndarray:
    """Dyadic edges from ``anchor`` toward 0 and up to 1, then steps of ``width``."""
    edges = [0.0]
    e = anchor
    while e < min(1.0, hi):
        edges.append(e)
        e *= 2
    start = edges[-1] if edges[-1] > 0 else 0.0
    n = max(1, int(math.ceil((hi - start) / width)))
    edges.extend(np.linspace(start, hi, n + 1)[1:])
    return np.unique(np.asarray(edges))


def _composite(edges, n):
    rule = gauss_legendre_rule(n, 0.0, 1.0)
    a, b = edges[:-1, None], edges[1:, None]
    return (a + (b - a) * rule.nodes).ravel(), ((b - a) * rule.weights).ravel()


def g_lambda_star(e: Expansion, kern: GLambdaKernel, x: float, t_min: float = 1e-4,
                  panels: int = 16, nodes: int = 24, full_output: bool = False):
    """g_lambda^*(f)(x) by nested quadrature.

    With t = |log r| and h_t = |d_1 u(., r)|^2,

        g^2(x) = int_0^inf t dt int_0^inf K_t(y) tau^E_x h_t(y) dmu_alpha(y).

    t runs over geometric panels on [t_min, T]; [0, t_min] is replaced by
    its leading term mass(K) h_0(x) t_min^2 / 2 (K_t is an approximate
    identity). The y-grid is dyadic near 0 to resolve K_t and the
    theta-grid is graded toward 0, where (x, y)_theta varies fastest for
    y near x. The error estimate compares against a run at reduced nodes.
    """
    _psi_check(e)
    a = e.tag.alpha
    if abs(a - kern.alpha) > 0:
        raise DomainError("kernel and expansion must share alpha")
    if not np.any(e.coeffs):
        res = GLambdaResult(0.0, 0.0)
        return res if full_output else 0.0
    lam = _lam(np.arange(e.K + 1), a)
    T = 40.0 / lam[0]
    reach = max(float(x), math.sqrt(lam[-1])) + 9.0

    def run(nt, ny, ntheta):
        t_edges = t_min * (T / t_min) ** np.linspace(0, 1, panels + 1)
        ts, wt = _composite(t_edges, nt)
        ys, wy = _composite(_graded_edges(0.0, reach, math.sqrt(t_min) / 16, 0.25), ny)
        th_edges = np.concatenate(([0.0], math.pi * 2.0 ** -np.arange(12, -1, -1)))
        th, wth = _composite(th_edges, ntheta)
        d = theta_distance(float(x), ys[:, None], th[None, :])
        Psi = laguerre_fn_table(e.tag, e.K, d.ravel())  # (K+1, ny*ntheta)
        base = (lam * e.coeffs)[:, None] * Psi
        sinw = np.sin(th) ** (2 * a) * wth * _translation_constant(a)
        total = 0.0
        for t, w_t in zip(ts, wt):
            h = np.abs(np.exp(-t * lam) @ base) ** 2
            tau = h.reshape(len(ys), len(th)) @ sinw
            inner = float(np.sum(wy * kern.dilated(t, ys) * ys ** (2 * a + 1) * tau))
            total += w_t * t * inner
        psi_x = laguerre_fn_table(e.tag, e.K, float(x))[:, 0]
        h0 = abs(np.sum(lam * e.coeffs * psi_x)) ** 2
        return total, kern.mass * h0 * t_min ** 2 / 2

    fine, head = run(nodes, nodes, 16)
    coarse, _ = run(nodes - 8, nodes - 8, 12)
    g2 = max(fine + head, 0.0)
    # the integrand moves on the time scale 1/(2 lam_K): first-order head error
    err2 = abs(fine - coarse) + head * (2 * lam[-1] + 1) * t_min
    err = err2 / (2 * math.sqrt(g2)) if g2 > 0 else err2
    res = GLambdaResult(math.sqrt(g2), float(err))
    return res if full_output else res.value


# ---------------------------------------------------------------------------
# kernel of the weighted estimate for the convolution operators


def homogeneous_theta_integral(x, y, alpha: float, nodes: int = 24) -> float:
    """int_0^pi (x,y)_theta^{-(2alpha+2)} sin^{2alpha} theta dtheta for x != y.

    Panels are graded geometrically from the scale |x-y|/sqrt(xy) at which
    the integrand peaks near theta = 0.
    """
    _require_alpha(alpha)
    x = float(x)
    y = float(y)
    if not (x > 0 and y > 0):
        raise DomainError("x and y must be positive")
    if x == y:
        raise DomainError("the theta-integral diverges at x = y")
    eps = min(abs(x - y) / math.sqrt(x * y), 1.0)
    edges = [0.0]
    e = eps / 4
    while e < math.pi:
        edges.append(e)
        e *= 2
    edges.append(math.pi)
    th, w = _composite(np.asarray(edges), nodes)
    d = theta_distance(x, y, th)
    vals = d ** (-(2 * alpha + 2)) * np.sin(th) ** (2 * alpha)
    return float(np.sum(w * vals))


def homogeneous_kernel(x, y, alpha: float, delta: float, p: float, nodes: int = 24) -> float:
    """K(x,y) = |1 - (x/y)^{2 delta/p}| int_0^pi (x,y)_theta^{-(2alpha+2)} sin^{2alpha} theta dtheta."""
    if x == y:
        return 0.0
    fac = abs(1.0 - (x / y) ** (2 * delta / p))
    if fac == 0:
        return 0.0
    return fac * homogeneous_theta_integral(x, y, alpha, nodes)


# ---------------------------------------------------------------------------
# d_s M kernel


def dsM(m: MultiplierSeq, s: float, r: float, y, alpha: float, tol: float = 1e-12,
        budget: int = TERM_BUDGET):
    """d_sM(y, r) = c_alpha sum_k lam_k^s m_k r^{lam_k} L_k^alpha(y^2) e^{-y^2/2}."""
    _require_alpha(alpha)
    scalar = np.ndim(y) == 0
    y = np.atleast_1d(np.asarray(y, dtype=float))
    b = dsM_coefficients(m, s, r, alpha, tol, budget)
    out = _laguerre_series(b, alpha, y * y)
    return float(out[0]) if scalar else out


def dsM_coefficients(m: MultiplierSeq, s: float, r: float, alpha: float, tol: float = 1e-12,
                     budget: int = TERM_BUDGET) -> np.ndarray:
    """b_k = c_alpha lam_k^s m_k r^{lam_k}, truncated with a certified tail."""
    c = kernel_constant(alpha)
    sup = m.sup_norm()
    if m.kind == "table":
        K = m.support_bound
    else:
        K = certify_truncation(alpha, r, s, c * sup, tol, budget)
    k = np.arange(K + 1)
    lam = _lam(k, alpha)
    return c * lam ** s * m.head(K + 1) * r ** lam


def dsM_weighted_l2(m: MultiplierSeq, s: float, r: float, alpha: float, tol: float = 1e-12) -> float:
    """int_0^inf |y^s d_sM(y, r)|^2 dmu_alpha(y), exactly via Gauss-Laguerre.

    In u = y^2 the integrand is (1/2) u^{s+alpha} e^{-u} |sum_k b_k L_k^alpha(u)|^2,
    a polynomial of degree 2K against the Laguerre weight of parameter
    alpha + s.
    """
    b = dsM_coefficients(m, s, r, alpha, tol)
    K = len(b) - 1
    N = K + 2
    if N > 4096:
        raise TruncationError("d_sM series too long for the exact rule")
    rule = gauss_laguerre_rule(N, alpha + s)
    vals = _laguerre_series_weighted(b, alpha, rule.nodes, 0.5 * rule.log_weights)
    return 0.5 * float(np.sum(np.abs(vals) ** 2))


def _laguerre_series_weighted(b, alpha, u, log_prefactor):
    """sum_k b_k L_k^alpha(u) exp(log_prefactor), streamed through the
    orthonormal recurrence with a running log scale (no table, no overflow)."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    K = len(b) - 1
    coef = np.asarray(b) * np.exp(_log_laguerre_norm(np.arange(K + 1), alpha))
    scale = np.array(log_prefactor, dtype=float) - 0.5 * math.lgamma(alpha + 1.0)
    prev = np.zeros_like(u)
    cur = np.ones_like(u)
    acc = coef[0] * cur
    for k in range(K):
        nxt = ((2 * k + alpha + 1 - u) * cur - math.sqrt(k * (k + alpha)) * prev)
        nxt /= math.sqrt((k + 1) * (k + alpha + 1))
        prev, cur = cur, nxt
        big = np.abs(cur) > 1e100
        if big.any():
            f = np.abs(cur[big])
            cur[big] /= f
            prev[big] /= f
            acc[big] /= f
            scale[big] += np.log(f)
        acc = acc + coef[k + 1] * cur
    with np.errstate(under="ignore"):
        return acc * np.exp(scale)
