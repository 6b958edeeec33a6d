"""Analysis, synthesis and multipliers for finite Laguerre expansions."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import special as sp

from .errors import DomainError, InvalidParamsError, QuadratureError
from .quadrature import (
    DecayCertificate,
    NormSpec,
    composite_rule,
    gauss_laguerre_rule,
    gauss_legendre_rule,
    head_cutoff,
    panel_edges,
    tail_cutoff,
)
from .sequences import MultiplierSeq
from .special import SystemTag, binom_A, laguerre_fn_table, laguerre_poly, orthonormal_table


@dataclass(frozen=True, eq=False)
class Expansion:
    """Finite coefficient vector c_0..c_K in a tagged orthonormal system."""

    tag: SystemTag
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs)
        if c.ndim != 1 or len(c) == 0:
            raise DomainError("coefficients must be a non-empty vector")
        if not np.iscomplexobj(c):
            c = c.astype(float)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __eq__(self, other):
        if not isinstance(other, Expansion):
            return NotImplemented
        return self.tag == other.tag and np.array_equal(self.coeffs, other.coeffs)

    __hash__ = None

    @property
    def K(self) -> int:
        return len(self.coeffs) - 1

    def to_json(self) -> str:
        c = self.coeffs
        if np.iscomplexobj(c):
            vals = [[float(v.real), float(v.imag)] for v in c]
        else:
            vals = [float(v) for v in c]
        return json.dumps({"family": self.tag.family, "alpha": self.tag.alpha, "coeffs": vals})

    @classmethod
    def from_json(cls, text: str) -> "Expansion":
        rec = json.loads(text)
        vals = rec["coeffs"]
        if vals and isinstance(vals[0], list):
            c = np.array([complex(a, b) for a, b in vals])
        else:
            c = np.asarray(vals, dtype=float)
        return cls(SystemTag(rec["family"], float(rec["alpha"])), c)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["k", "re", "im"])
            for k, v in enumerate(self.coeffs):
                v = complex(v)
                wr.writerow([k, repr(v.real), repr(v.imag)])


def basis_table(tag: SystemTag, K: int, x) -> np.ndarray:
    """(K+1, n) values of the first K+1 basis functions of ``tag``."""
    return laguerre_fn_table(tag, K, x)


def _compensated_rows(terms: np.ndarray) -> np.ndarray:
    """Neumaier-compensated sum over axis 0."""
    s = np.zeros(terms.shape[1:], dtype=terms.dtype)
    comp = np.zeros_like(s)
    for row in terms:
        t = s + row
        big = np.abs(s) >= np.abs(row)
        comp += np.where(big, (s - t) + row, (row - t) + s)
        s = t
    return s + comp


def synthesize(e: Expansion, x):
    """sum_k c_k b_k(x) with compensated summation."""
    xa = np.asarray(x, dtype=float)
    B = basis_table(e.tag, e.K, xa.ravel())
    val = _compensated_rows(e.coeffs[:, None] * B)
    if not np.iscomplexobj(val):
        val = val.astype(float)
    return val[0] if xa.ndim == 0 else val.reshape(xa.shape)


def _gauss_substitution(tag: SystemTag, u: np.ndarray, logw: np.ndarray):
    """Sample points and log prefactors turning <f, b_k> into a Gauss-Laguerre sum.

    Every system reduces to int q(u) u^alpha e^{-u} du: directly for l and
    script-L, and after u = x^2 for phi and psi.
    """
    a = tag.alpha
    logu = np.log(u)
    lp = logw + 0.5 * u
    if tag.family == "l":
        return u, lp
    if tag.family == "script_l":
        return u, lp - 0.5 * a * logu
    if tag.family == "psi":
        return np.sqrt(u), lp - 0.5 * math.log(2.0)
    return np.sqrt(u), lp - (0.5 * a + 0.25) * logu - 0.5 * math.log(2.0)


def _gauss_coefficients(f, tag: SystemTag, K: int, N: int) -> np.ndarray:
    rule = gauss_laguerre_rule(N, tag.alpha)
    x, lp = _gauss_substitution(tag, rule.nodes, rule.log_weights)
    T = orthonormal_table(K, tag.alpha, rule.nodes, lp)
    return T @ np.asarray(f(x))


def _composite_coefficients(f, tag: SystemTag, K: int, decay: DecayCertificate,
                            tol: float, width: float) -> np.ndarray:
    w = tag.measure_exponent
    X = tail_cutoff(decay, 1.0, w, tol)
    eps = head_cutoff(decay, 1.0, w, tol)
    rule = composite_rule(panel_edges(eps, X, width), w)
    B = basis_table(tag, K, rule.nodes)
    return B @ (rule.weights * np.asarray(f(rule.nodes)))


def analyze(f, tag: SystemTag, K: int, tol: float = 1e-10, method: str = "gauss",
            decay: Optional[DecayCertificate] = None, N: Optional[int] = None) -> Expansion:
    """Coefficients <f, b_k> for k = 0..K in the tag's measure.

    ``method="gauss"`` maps every system onto Gauss-Laguerre quadrature in
    its natural variable; the result is exact when f lies in the span of
    the first N basis functions. Two rule sizes are compared and a
    :class:`QuadratureError` is raised if they disagree by more than tol.
    ``method="composite"`` uses panel Gauss-Legendre with the range cut
    according to ``decay``.
    """
    if K < 0:
        raise DomainError("K must be non-negative")
    if method == "gauss":
        N1 = N or max(2 * (K + 1), 64)
        N2 = N1 + max(16, N1 // 2)
        c1 = _gauss_coefficients(f, tag, K, N1)
        c2 = _gauss_coefficients(f, tag, K, N2)
        diff = float(np.max(np.abs(c1 - c2)))
        if not diff <= tol:
            raise QuadratureError(f"Gauss-Laguerre coefficients unstable: change {diff:.2e} > {tol:.2e}")
        return Expansion(tag, c2)
    if method == "composite":
        if decay is None:
            raise DomainError("composite analysis needs a decay certificate")
        width = 0.25 if tag.quadratic else 1.0
        c1 = _composite_coefficients(f, tag, K, decay, tol, width)
        c2 = _composite_coefficients(f, tag, K, decay, tol, width / 2)
        diff = float(np.max(np.abs(c1 - c2)))
        if not diff <= tol:
            raise QuadratureError(f"composite coefficients unstable: change {diff:.2e} > {tol:.2e}")
        return Expansion(tag, c2)
    raise DomainError(f"unknown method {method!r}")


def apply_multiplier(m: MultiplierSeq, e: Expansion) -> Expansion:
    """Coefficient-wise product m_k c_k, same system."""
    return Expansion(e.tag, m.head(e.K + 1) * e.coeffs)


def transplant(e: Expansion, alpha: float) -> Expansion:
    """Transplant a script-L^beta expansion to script-L^alpha (same coefficients)."""
    if e.tag.family != "script_l":
        raise DomainError("transplantation acts on script-L expansions")
    return Expansion(SystemTag("script_l", alpha), e.coeffs)


def tag_norm_spec(tag: SystemTag, p: float = 2.0) -> NormSpec:
    """The L^p norm in the measure the system is orthonormal for."""
    return NormSpec(p, tag.measure_exponent)


def decay_certificate(e: Expansion) -> DecayCertificate:
    """A certificate |f(x)| <= C exp(-c x^sigma) for the synthesised function.

    Uses |L_k^alpha(x)| <= L_k^alpha(-x) <= 5^k (5/4)^{alpha+1} e^{x/4},
    read off the generating function at w = 1/5.
    """
    tag = e.tag
    a = tag.alpha
    k = np.arange(e.K + 1)
    logc = 0.5 * (np.array([math.lgamma(j + 1) - math.lgamma(j + a + 1) for j in k]))
    C = float(np.sum(np.abs(e.coeffs) * np.exp(logc + k * math.log(5.0))) * 1.25 ** (a + 1))
    if tag.family == "l":
        return DecayCertificate(C, 0.25, 1.0)
    if tag.family == "script_l":
        if a < 0:
            raise DomainError("script-L with alpha < 0 is unbounded at 0")
        return DecayCertificate(C, 0.25, 1.0).times_power(0.5 * a)
    if tag.family == "psi":
        return DecayCertificate(math.sqrt(2.0) * C, 0.25, 2.0)
    return DecayCertificate(math.sqrt(2.0) * C, 0.25, 2.0).times_power(a + 0.5)


# ---------------------------------------------------------------------------
# multiplier-space parameter arithmetic


@dataclass(frozen=True)
class MultiplierSpaceParams:
    """(alpha, p, gamma) naming M^p_{alpha,gamma}; -1 < gamma < p(alpha+1) - 1."""

    alpha: float
    p: float
    gamma: float

    def __post_init__(self):
        if not self.alpha > -1:
            raise InvalidParamsError("alpha must exceed -1")
        if not 1 < self.p < math.inf:
            raise InvalidParamsError("p must lie in (1, inf)")
        if not -1 < self.gamma < self.p * (self.alpha + 1) - 1:
            raise InvalidParamsError(
                f"need -1 < gamma < p(alpha+1)-1 = {self.p * (self.alpha + 1) - 1}, got {self.gamma}")

    @property
    def p_dual(self) -> float:
        return self.p / (self.p - 1)


def dual(params: MultiplierSpaceParams) -> MultiplierSpaceParams:
    """M^p_{alpha,gamma} = M^{p'}_{alpha, alpha p' - gamma p'/p}."""
    q = params.p_dual
    return MultiplierSpaceParams(params.alpha, q, params.alpha * q - params.gamma * q / params.p)


def _shift(alpha, p, gamma, extra):
    if not alpha > -1 or not 1 < p < math.inf or not gamma > -1:
        raise InvalidParamsError("need alpha > -1, 1 < p < inf, gamma > -1")
    return MultiplierSpaceParams(alpha, p, gamma + extra)


def script_shift(alpha: float, p: float, gamma: float) -> MultiplierSpaceParams:
    """script-M^p_{alpha,gamma} = M^p_{alpha, gamma + alpha p/2}."""
    return _shift(alpha, p, gamma, alpha * p / 2)


def phi_shift(alpha: float, p: float, gamma: float) -> MultiplierSpaceParams:
    """Multipliers for the phi system: M^p_{alpha, gamma + alpha p/2 + p/4 - 1/2}."""
    return _shift(alpha, p, gamma, alpha * p / 2 + p / 4 - 0.5)


def multiplier_weight_range(params: MultiplierSpaceParams) -> bool:
    """(alpha+1) max{-p/2,-1} < gamma - alpha < (alpha+1) min{p/2, p-1}, alpha >= 0."""
    a, p, g = params.alpha, params.p, params.gamma
    if a < 0:
        return False
    return (a + 1) * max(-p / 2, -1.0) < g - a < (a + 1) * min(p / 2, p - 1)


def transplant_weight_range(alpha: float, beta: float, p: float, delta: float) -> bool:
    """Weight range of the weighted transplantation inequality."""
    if not (alpha > -1 and beta > -1 and 1 < p < math.inf):
        raise InvalidParamsError("need alpha, beta > -1 and 1 < p < inf")
    eps = min(alpha, beta)
    if eps >= 0:
        return -1 < delta < p - 1
    return -1 - eps * p / 2 < delta < p - 1 + eps * p / 2


def lep_range(alpha: float, p: float) -> bool:
    """(2alpha+2)/(alpha+2) < p < (2alpha+2)/alpha for alpha >= 0."""
    if alpha < 0:
        return False
    upper = math.inf if alpha == 0 else (2 * alpha + 2) / alpha
    return (2 * alpha + 2) / (alpha + 2) < p < upper


def space_arithmetic(params: MultiplierSpaceParams, request: str, **kw):
    """Dispatch a named parameter transform or range test."""
    a, p, g = params.alpha, params.p, params.gamma
    if request == "dual":
        return dual(params)
    if request == "script-shift":
        return script_shift(a, p, g)
    if request == "phi-shift":
        return phi_shift(a, p, g)
    if request == "multiplier-range":
        return multiplier_weight_range(params)
    if request == "transplant-range":
        return transplant_weight_range(a, kw["beta"], p, kw["delta"])
    if request == "lep-range":
        return lep_range(a, p)
    raise DomainError(f"unknown request {request!r}")


# ---------------------------------------------------------------------------
# projection formula


def projection_formula_check(k: int, mu: float, nu: float, x: float, nodes: int = 64):
    """Both sides of L_k^{mu+nu}(x) = G int_0^1 y^mu (1-y)^{nu-1} L_k^mu(yx) dy.

    G = Gamma(k+mu+nu+1)/(Gamma(nu) Gamma(k+mu+1)). For integer mu the
    integral uses Gauss-Legendre, after the substitution y = 1 - u^{1/nu}
    when nu < 1 to remove the endpoint singularity; both integrands are
    then polynomial. For non-integer mu the factor y^mu is not smooth at
    0 and a Gauss-Jacobi rule carrying the whole weight is used instead.
    """
    if not mu > -1 or not nu > 0:
        raise DomainError("need mu > -1 and nu > 0")
    lhs = float(laguerre_poly(k, mu + nu, x))
    G = math.exp(math.lgamma(k + mu + nu + 1) - math.lgamma(nu) - math.lgamma(k + mu + 1))
    if not float(mu).is_integer():
        # weight (1-t)^{nu-1} (1+t)^mu on [-1, 1] with y = (1+t)/2
        t, w = sp.roots_jacobi(nodes, nu - 1, mu)
        y = 0.5 * (1 + t)
        integral = 2.0 ** (-(mu + nu)) * float(np.dot(w, laguerre_poly(k, mu, y * x)))
        return lhs, G * integral
    rule = gauss_legendre_rule(nodes, 0.0, 1.0)
    u = rule.nodes
    if nu < 1:
        y = 1.0 - u ** (1.0 / nu)
        vals = y ** mu * laguerre_poly(k, mu, y * x) / nu
    else:
        y = u
        vals = y ** mu * (1 - y) ** (nu - 1) * laguerre_poly(k, mu, y * x)
    return lhs, G * float(rule.integrate(vals))


def projection_at_zero(k: int, mu: float, nu: float) -> float:
    """Independent value of the left side at x = 0: A_k^{mu+nu}."""
    return binom_A(k, mu + nu)
