"""Quadrature rules and weighted L^p norms on the half line."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg, optimize
from scipy import special as sp

from .errors import DomainError, QuadratureError

PANEL_NODES = 32
GL_MAX_NODES = 4096
_RESCALE = 1e100
_MAX_PANELS = 20000
_MAX_LEVELS = 40


@dataclass(frozen=True)
class QuadRule:
    """Nodes and weights with a declared exactness contract.

    ``weight_convention`` names the measure already absorbed into the
    weights; ``exactness`` is the polynomial degree integrated exactly, or
    ``None`` for composite rules. ``log_weights`` is kept for Gauss rules
    whose smallest weights underflow.
    """

    nodes: np.ndarray
    weights: np.ndarray
    exactness: Optional[int]
    weight_convention: str
    log_weights: Optional[np.ndarray] = None

    def integrate(self, values) -> float:
        return np.dot(np.asarray(values), self.weights)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["node", "weight"])
            for x, w in zip(self.nodes, self.weights):
                wr.writerow([repr(float(x)), repr(float(w))])


def _laguerre_sweep(N: int, alpha: float, x: np.ndarray):
    """One pass of the orthonormal recurrence at the nodes.

    Returns (log sum_{k<N} p_k^2, p_{N-1}/p_N) where p_k are orthonormal
    for x^alpha e^{-x} dx. A running scale keeps everything finite.
    """
    scale = np.full(x.shape, -0.5 * math.lgamma(alpha + 1.0))
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    S = np.ones_like(x)
    for k in range(N):
        nxt = ((2 * k + alpha + 1 - x) * cur - math.sqrt(k * (k + alpha)) * prev)
        nxt /= math.sqrt((k + 1) * (k + alpha + 1))
        prev, cur = cur, nxt
        if k + 1 < N:
            S += cur * cur
        big = np.abs(cur) > _RESCALE
        if big.any():
            f = np.abs(cur[big])
            cur[big] /= f
            prev[big] /= f
            S[big] /= f * f
            scale[big] += np.log(f)
    with np.errstate(divide="ignore"):
        ratio = prev / cur
    return np.log(S) + 2 * scale, ratio


def gauss_laguerre_rule(N: int, alpha: float) -> QuadRule:
    """N-point Gauss rule for int_0^inf q(x) x^alpha e^{-x} dx.

    Nodes are the eigenvalues of the symmetric tridiagonal Jacobi matrix
    (diagonal 2k+alpha+1, off-diagonal sqrt(k(k+alpha))), polished by one
    Newton step on L_N^alpha. Weights come from the Christoffel numbers
    1/sum_k p_k(x)^2, which stay positive and accurate where eigenvector
    components would lose relative precision.
    """
    if not 1 <= N <= GL_MAX_NODES:
        raise DomainError(f"N must lie in [1, {GL_MAX_NODES}]")
    if not alpha > -1:
        raise DomainError("alpha must exceed -1")
    k = np.arange(N, dtype=float)
    diag = 2 * k + alpha + 1
    off = np.sqrt(k[1:] * (k[1:] + alpha))
    try:
        x = linalg.eigh_tridiagonal(diag, off, eigvals_only=True)
    except linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise QuadratureError(f"Jacobi eigenproblem failed: {exc}") from exc
    x = np.sort(x)
    _, rho = _laguerre_sweep(N, alpha, x)
    # x L_N' = N L_N - (N + alpha) L_{N-1};  L_{N-1}/L_N = rho sqrt(N/(N+alpha))
    denom = N - (N + alpha) * rho * math.sqrt(N / (N + alpha))
    with np.errstate(divide="ignore", invalid="ignore"):
        step = np.where(np.isfinite(rho) & (denom != 0), x / denom, 0.0)
    x_new = x - step
    if np.all(np.isfinite(x_new)) and np.all(np.diff(x_new) > 0) and x_new[0] > 0:
        x = x_new
    logS, _ = _laguerre_sweep(N, alpha, x)
    logw = -logS
    if not (np.all(np.isfinite(x)) and np.all(np.diff(x) > 0)):
        raise QuadratureError("Gauss-Laguerre nodes not strictly increasing")
    with np.errstate(under="ignore"):
        w = np.exp(logw)
    return QuadRule(x, w, 2 * N - 1, f"x^{alpha} e^-x dx on (0, inf)", logw)


def gauss_legendre_rule(N: int, a: float = -1.0, b: float = 1.0) -> QuadRule:
    """N-point Gauss-Legendre rule on [a, b], exact to degree 2N-1."""
    if not a < b:
        raise DomainError("need a < b")
    if N < 1:
        raise DomainError("N must be positive")
    t, w = np.polynomial.legendre.leggauss(N)
    h = 0.5 * (b - a)
    return QuadRule(a + h * (t + 1), h * w, 2 * N - 1, f"dx on [{a}, {b}]")


_LEG = {}


def _legendre(n: int):
    if n not in _LEG:
        _LEG[n] = np.polynomial.legendre.leggauss(n)
    return _LEG[n]


# ---------------------------------------------------------------------------
# decay certificates and cutoffs


@dataclass(frozen=True)
class DecayCertificate:
    """Caller's promise |f(x)| <= C exp(-c x^sigma) on (0, inf)."""

    C: float
    c: float
    sigma: float = 1.0

    def __post_init__(self):
        if not (self.C >= 0 and self.c > 0 and self.sigma > 0):
            raise DomainError("decay certificate needs C >= 0, c > 0, sigma > 0")

    def scaled(self, factor: float) -> "DecayCertificate":
        return DecayCertificate(self.C * abs(factor), self.c, self.sigma)

    def times_power(self, a: float) -> "DecayCertificate":
        """Certificate for x^a f(x), a >= 0, at half the decay rate."""
        if a == 0:
            return self
        cc = 0.5 * self.c
        peak = (a / (cc * self.sigma * math.e)) ** (a / self.sigma)
        return DecayCertificate(self.C * peak, cc, self.sigma)

    def antiderivative(self) -> "DecayCertificate":
        """Certificate for F(x) = int_x^inf |f|, at half the decay rate."""
        cc = 0.5 * self.c
        const = math.gamma(1 + 1 / self.sigma) * cc ** (-1 / self.sigma)
        return DecayCertificate(self.C * const, cc, self.sigma)


def tail_bound(cert: DecayCertificate, p: float, w: float, X: float) -> float:
    """Closed-form bound for int_X^inf |f|^p x^w dx under ``cert``."""
    a = p * cert.c
    s = (w + 1) / cert.sigma
    return float(cert.C ** p * sp.gammaincc(s, a * X ** cert.sigma) * math.gamma(s)
                 / (cert.sigma * a ** s))


def tail_cutoff(cert: DecayCertificate, p: float, w: float, abs_tol: float) -> float:
    """Smallest X >= 1 with tail_bound(X) <= abs_tol (monotone in abs_tol)."""
    if tail_bound(cert, p, w, 1.0) <= abs_tol:
        return 1.0
    lo, hi = 0.0, 1.0
    while tail_bound(cert, p, w, math.exp(hi)) > abs_tol:
        lo, hi = hi, 2 * hi
        if hi > 64:
            raise QuadratureError("decay certificate cannot force the tail below tolerance")

    def g(t):
        b = tail_bound(cert, p, w, math.exp(t))
        return math.log(b) - math.log(abs_tol) if b > 0 else -1.0

    t = optimize.brentq(g, lo, hi, xtol=1e-12)
    return math.exp(t) * (1 + 1e-12)


def head_cutoff(cert: DecayCertificate, p: float, w: float, abs_tol: float) -> float:
    """eps <= 1/2 with C^p eps^{w+1}/(w+1) <= abs_tol, bounding int_0^eps."""
    if cert.C == 0:
        return 0.5
    e = (abs_tol * (w + 1) / cert.C ** p) ** (1.0 / (w + 1))
    return min(0.5, e)


def panel_edges(eps: float, X: float, width: float = 1.0) -> np.ndarray:
    """Dyadic edges eps*2^j up to 1, then steps of at most ``width`` up to X."""
    if X <= eps:
        raise DomainError("need eps < X")
    edges = [eps]
    while edges[-1] * 2 < min(1.0, X):
        edges.append(edges[-1] * 2)
    start = edges[-1]
    if X > start:
        n = max(1, int(math.ceil((X - start) / width)))
        edges.extend(np.linspace(start, X, n + 1)[1:])
    return np.asarray(edges, dtype=float)


def composite_rule(edges, weight_exponent: float = 0.0, nodes: int = PANEL_NODES) -> QuadRule:
    """Composite Gauss-Legendre rule on the panels, x^w absorbed into the weights."""
    edges = np.asarray(edges, dtype=float)
    t, w = _legendre(nodes)
    a, b = edges[:-1, None], edges[1:, None]
    h = 0.5 * (b - a)
    x = (a + h * (t + 1)).ravel()
    wt = (h * w).ravel() * x ** weight_exponent
    return QuadRule(x, wt, None, f"x^{weight_exponent} dx on [{edges[0]}, {edges[-1]}]")


def adaptive_integrate(F, edges, abs_tol: float, nodes: int = PANEL_NODES):
    """Integrate F over the panels, bisecting panels whose estimate moves.

    Each panel is compared with the sum over its two halves; a panel is
    accepted when the two differ by at most its width share of ``abs_tol``.
    Returns (value, error_estimate); panels are processed in a fixed
    order so the reduction is deterministic.
    """
    t, w = _legendre(nodes)
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1], edges[1:]
    span = edges[-1] - edges[0]

    def panel_sums(a, b):
        h = 0.5 * (b - a)
        x = a[:, None] + h[:, None] * (t + 1)
        vals = F(x.ravel()).reshape(x.shape)
        return h * (vals @ w), h * (np.abs(vals) @ w)

    coarse, _ = panel_sums(a, b)
    total = 0.0
    err = 0.0
    for _ in range(_MAX_LEVELS):
        if len(a) > _MAX_PANELS:
            raise QuadratureError("adaptive quadrature exceeded its panel budget")
        m = 0.5 * (a + b)
        (left, labs), (right, rabs) = panel_sums(a, m), panel_sums(m, b)
        fine = left + right
        diff = np.abs(fine - coarse)
        # rounding floor: differences below ~100 ulp of int|F| are noise
        ok = diff <= abs_tol * (b - a) / span + 2e-14 * (labs + rabs)
        total += float(np.sum(fine[ok]))
        err += float(np.sum(diff[ok]))
        if ok.all():
            return total, err
        keep = ~ok
        a = np.concatenate((a[keep], m[keep]))
        b = np.concatenate((m[keep], b[keep]))
        coarse = np.concatenate((left[keep], right[keep]))
        order = np.argsort(a, kind="stable")
        a, b, coarse = a[order], b[order], coarse[order]
    total += float(np.sum(coarse))
    err += float(np.sum(np.abs(coarse)))
    return total, err


# ---------------------------------------------------------------------------
# norms


@dataclass(frozen=True)
class NormSpec:
    """Which weighted L^p norm to compute.

    ``measure="plain"``: (int |f|^p x^exponent dx)^{1/p}, exponent = gamma.
    ``measure="mu_alpha"``: (int |f|^p x^{2 exponent} x^{2alpha+1} dx)^{1/p},
    exponent = delta.
    """

    p: float
    exponent: float = 0.0
    measure: str = "plain"
    alpha: Optional[float] = None

    def __post_init__(self):
        if not 1 <= self.p < math.inf:
            raise DomainError("p must lie in [1, inf)")
        if self.measure not in ("plain", "mu_alpha"):
            raise DomainError(f"unknown measure {self.measure!r}")
        if self.measure == "mu_alpha" and self.alpha is None:
            raise DomainError("mu_alpha measure needs alpha")
        if not self.weight_exponent > -1:
            raise DomainError("weight exponent must exceed -1")

    @property
    def weight_exponent(self) -> float:
        if self.measure == "plain":
            return float(self.exponent)
        return 2.0 * self.exponent + 2.0 * self.alpha + 1.0


@dataclass(frozen=True)
class NormInfo:
    value: float
    integral: float
    x_max: float
    eps: float
    error_estimate: float


def integrate_power(f, p: float, w: float, decay: DecayCertificate, tol: float = 1e-10):
    """int_0^inf |f(x)|^p x^w dx with relative error about ``tol``.

    A pilot pass fixes the scale of the integral; head [0, eps] and tail
    [X, inf) are then cut where the decay certificate bounds each by a
    quarter of the error budget, and the rest is integrated adaptively.
    """
    scale = max(decay.C, 1e-300) ** p

    def F(x):
        return np.abs(f(x)) ** p * x ** w

    X0 = tail_cutoff(decay, p, w, tol * scale)
    e0 = head_cutoff(decay, p, w, tol * scale)
    I0, _ = adaptive_integrate(F, panel_edges(e0, X0), tol * scale)
    if I0 <= 0:
        return NormInfo(0.0, 0.0, X0, e0, 0.0)
    target = 0.25 * tol * I0
    X = max(X0, tail_cutoff(decay, p, w, target))
    eps = min(e0, head_cutoff(decay, p, w, target))
    I, err = adaptive_integrate(F, panel_edges(eps, X), target)
    err += tail_bound(decay, p, w, X) + decay.C ** p * eps ** (w + 1) / (w + 1)
    return NormInfo(I ** (1.0 / p), I, X, eps, err)


def weighted_norm(f, spec: NormSpec, decay: DecayCertificate, tol: float = 1e-10,
                  full_output: bool = False):
    """Weighted L^p norm of f on (0, inf) per ``spec``.

    ``decay`` certifies |f(x)| <= C exp(-c x^sigma); it decides where the
    integration range can be cut without exceeding ``tol`` (relative).
    """
    info = integrate_power(f, spec.p, spec.weight_exponent, decay, tol)
    return info if full_output else info.value


# ---------------------------------------------------------------------------
# weighted Hardy inequality


@dataclass(frozen=True)
class HardySides:
    """Both sides of (int (int_x^inf f)^p x^delta dx)^{1/p} <= p/(delta+1) (int (yf)^p y^delta dy)^{1/p}.

    ``rhs`` excludes the constant p/(delta+1); ``bound`` includes it.
    """

    lhs: float
    rhs: float
    constant: float

    @property
    def bound(self) -> float:
        return self.constant * self.rhs

    def holds(self, rtol: float = 0.0) -> bool:
        return self.lhs <= self.bound * (1 + rtol)


def tail_antiderivative(f, decay: DecayCertificate, tol: float = 1e-13, nodes: int = PANEL_NODES):
    """Return a vectorised F(x) = int_x^inf f(y) dy for nonnegative f."""
    X = tail_cutoff(decay, 1.0, 0.0, tol * max(decay.C, 1e-300))
    edges = panel_edges(head_cutoff(decay, 1.0, 0.0, tol * max(decay.C, 1e-300)) / 4, X, 0.5)
    edges = np.concatenate(([0.0], edges))
    t, w = _legendre(nodes)
    a, b = edges[:-1], edges[1:]
    h = 0.5 * (b - a)
    xs = a[:, None] + h[:, None] * (t + 1)
    panel = h * (f(xs.ravel()).reshape(xs.shape) @ w)
    # R[i] = int_{edges[i]}^{X} f
    R = np.concatenate((np.cumsum(panel[::-1])[::-1], [0.0]))

    def F(x):
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        out = np.zeros_like(flat)
        inside = flat < X
        xi = flat[inside]
        i = np.clip(np.searchsorted(edges, xi, side="right") - 1, 0, len(a) - 1)
        hb = 0.5 * (b[i] - xi)
        ys = xi[:, None] + hb[:, None] * (t + 1)
        part = hb * (f(ys.ravel()).reshape(ys.shape) @ w)
        out[inside] = part + R[i + 1]
        return out.reshape(x.shape)

    return F


def hardy_check(f, p: float, delta: float, decay: DecayCertificate, tol: float = 1e-10) -> HardySides:
    """Evaluate both sides of the weighted Hardy inequality for f >= 0."""
    if not delta > -1:
        raise DomainError("delta must exceed -1")
    if not p >= 1:
        raise DomainError("p must be at least 1")
    if decay.C == 0:
        return HardySides(0.0, 0.0, p / (delta + 1))
    F = tail_antiderivative(f, decay)
    lhs = integrate_power(F, p, delta, decay.antiderivative(), tol).value
    rhs = integrate_power(lambda y: y * f(y), p, delta, decay.times_power(1.0), tol).value
    if not (math.isfinite(lhs) and math.isfinite(rhs)):
        raise QuadratureError("Hardy integrals diverged")
    return HardySides(lhs, rhs, p / (delta + 1))
