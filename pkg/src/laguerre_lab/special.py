"""Scalar and vectorised special functions for Laguerre analysis.

Gamma-type constants, generalised binomial coefficients, Laguerre
polynomials, the four orthonormal Laguerre function systems, the
normalised Bessel function and the angular distance used by the
generalised translations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sp

from .errors import AccuracyError, DomainError

FAMILIES = ("l", "script_l", "phi", "psi")

BESSEL_TERM_BUDGET = 200
BESSEL_Z_MAX = 60.0
# Largest ascending-series term tolerated before cancellation costs more
# than ~1e-14 absolute; beyond it the value comes from scipy's J_beta.
_BESSEL_SERIES_MAX_TERM = 50.0
_RESCALE = 1e100


@dataclass(frozen=True)
class SystemTag:
    """Which orthonormal family a coefficient vector refers to.

    ``family`` is one of ``"l"`` (orthonormal in x^alpha dx),
    ``"script_l"`` (dx), ``"phi"`` (dx) or ``"psi"`` (x^(2alpha+1) dx).
    """

    family: str
    alpha: float

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if not self.alpha > -1:
            raise DomainError(f"alpha must exceed -1, got {self.alpha}")

    @property
    def measure_exponent(self) -> float:
        """Exponent w of the orthogonality measure x^w dx."""
        if self.family == "l":
            return float(self.alpha)
        if self.family == "psi":
            return 2.0 * self.alpha + 1.0
        return 0.0

    @property
    def quadratic(self) -> bool:
        """True for the systems built on L_k(x^2) (phi and psi)."""
        return self.family in ("phi", "psi")


def eigenvalue(k, alpha):
    """lambda_k = 4k + 2alpha + 2, the eigenvalue of psi_k^alpha."""
    return 4 * np.asarray(k, dtype=float) + 2 * alpha + 2


def log_gamma(x):
    """Natural log of Gamma(x) for x > 0 (scalar or array)."""
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("log_gamma requires x > 0")
    if arr.ndim == 0:
        return math.lgamma(float(arr))
    return sp.gammaln(arr)


def binom_A_seq(J: int, delta: float) -> np.ndarray:
    """Return A_0^delta, ..., A_J^delta by the multiplicative recurrence.

    A_j^delta = A_{j-1}^delta (j + delta) / j. Unlike a gamma quotient this
    carries the correct signs for negative delta and produces exact zeros
    when delta is a negative integer.
    """
    if J < 0:
        raise DomainError("J must be non-negative")
    j = np.arange(1, J + 1, dtype=float)
    out = np.empty(J + 1)
    out[0] = 1.0
    out[1:] = np.cumprod((j + delta) / j)
    return out


def binom_A(j: int, delta: float) -> float:
    """Generalised binomial coefficient A_j^delta = Gamma(j+delta+1)/(Gamma(delta+1) j!)."""
    return float(binom_A_seq(int(j), delta)[-1])


def laguerre_poly(k: int, alpha: float, x):
    """Laguerre polynomial L_k^alpha(x) by forward three-term recurrence.

    Uses (n+1) L_{n+1} = (2n + alpha + 1 - x) L_n - (n + alpha) L_{n-1}.
    Unscaled; intended for x <= 200 and k <= 1e4.
    """
    if k < 0:
        raise DomainError("degree must be non-negative")
    x = np.asarray(x, dtype=float)
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    for n in range(k):
        prev, cur = cur, ((2 * n + alpha + 1 - x) * cur - (n + alpha) * prev) / (n + 1)
    return cur if cur.ndim else float(cur)


def laguerre_poly_table(K: int, alpha: float, x) -> np.ndarray:
    """All of L_0^alpha(x), ..., L_K^alpha(x) as a (K+1, *x.shape) array."""
    x = np.asarray(x, dtype=float)
    out = np.empty((K + 1,) + x.shape)
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    out[0] = cur
    for n in range(K):
        prev, cur = cur, ((2 * n + alpha + 1 - x) * cur - (n + alpha) * prev) / (n + 1)
        out[n + 1] = cur
    return out


def orthonormal_table(K: int, alpha: float, u, log_prefactor) -> np.ndarray:
    """Rows exp(log_prefactor) * p_k(u) for k = 0..K.

    p_k = (k!/Gamma(k+alpha+1))^{1/2} L_k^alpha is the orthonormal Laguerre
    polynomial, run through its symmetric recurrence

        sqrt((k+1)(k+alpha+1)) p_{k+1} = (2k+alpha+1-u) p_k - sqrt(k(k+alpha)) p_{k-1}.

    Magnitudes are rescaled into a running log factor, so damping such as
    e^{-u/2} can be supplied through ``log_prefactor`` without overflow.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    scale = np.array(np.broadcast_to(log_prefactor, u.shape), dtype=float)
    scale = scale - 0.5 * math.lgamma(alpha + 1.0)
    out = np.empty((K + 1,) + u.shape)
    prev = np.zeros_like(u)
    cur = np.ones_like(u)
    with np.errstate(under="ignore"):
        out[0] = np.exp(scale)
        for k in range(K):
            nxt = ((2 * k + alpha + 1 - u) * cur - math.sqrt(k * (k + alpha)) * prev)
            nxt /= math.sqrt((k + 1) * (k + alpha + 1))
            prev, cur = cur, nxt
            big = np.abs(cur) > _RESCALE
            if big.any():
                f = np.abs(cur[big])
                cur[big] /= f
                prev[big] /= f
                scale[big] += np.log(f)
            out[k + 1] = cur * np.exp(scale)
    return out


def _family_argument(tag: SystemTag, x: np.ndarray):
    """Map x to (u, log_prefactor) for the family's orthonormal rows."""
    a = tag.alpha
    fam = tag.family
    if np.any(x < 0):
        raise DomainError("Laguerre functions are defined for x >= 0")
    if fam == "phi" and np.any(x <= 0):
        raise DomainError("phi_k^alpha requires x > 0")
    if fam == "script_l" and a < 0 and np.any(x == 0):
        raise DomainError("script-L_k^alpha with alpha < 0 is singular at x = 0")
    with np.errstate(divide="ignore"):
        logx = np.log(x)
    if fam == "l":
        return x, -0.5 * x
    if fam == "script_l":
        lp = -0.5 * x
        if a != 0:
            lp = lp + 0.5 * a * logx
        return x, lp
    u = x * x
    if fam == "psi":
        return u, -0.5 * u + 0.5 * math.log(2.0)
    # phi: script_l(x^2) (2x)^{1/2}
    return u, -0.5 * u + a * logx + 0.5 * (math.log(2.0) + logx)


def laguerre_fn_table(tag: SystemTag, K: int, x) -> np.ndarray:
    """Values of the first K+1 functions of ``tag``'s system, shape (K+1, n)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    u, lp = _family_argument(tag, x)
    return orthonormal_table(K, tag.alpha, u, lp)


def laguerre_fn(tag: SystemTag, k: int, x):
    """Evaluate l_k^alpha, script-L_k^alpha, phi_k^alpha or psi_k^alpha at x.

    The normalisation (k!/Gamma(k+alpha+1))^{1/2} and the exponential
    damping are carried in log space, which keeps k up to 1e4 finite.
    """
    if k < 0:
        raise DomainError("index must be non-negative")
    scalar = np.ndim(x) == 0
    row = laguerre_fn_table(tag, k, x)[k]
    return float(row[0]) if scalar else row


def bessel_normalized(beta: float, z):
    """Normalised Bessel function Gamma(beta+1) J_beta(z) / (z/2)^beta.

    Evaluated by the ascending series sum_m (-z^2/4)^m / (m! (beta+1)_m)
    while its terms stay small enough that cancellation is harmless.
    Larger arguments fall back to scipy's ``jv``. Valid for 0 <= z <= 60;
    beyond that an :class:`AccuracyError` is raised.
    """
    if not beta > -1:
        raise DomainError("beta must exceed -1")
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise DomainError("z must be non-negative")
    if np.any(z > BESSEL_Z_MAX):
        raise AccuracyError(f"bessel_normalized is documented only for z <= {BESSEL_Z_MAX}")
    zz = np.atleast_1d(z)
    out = np.empty_like(zz)
    w = -0.25 * zz * zz
    term = np.ones_like(zz)
    total = np.ones_like(zz)
    peak = np.ones_like(zz)
    done = np.zeros(zz.shape, dtype=bool)
    for m in range(1, BESSEL_TERM_BUDGET + 1):
        term = term * w / (m * (m + beta))
        total += term
        peak = np.maximum(peak, np.abs(term))
        done = np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)
        if np.all(done | (peak > _BESSEL_SERIES_MAX_TERM)):
            break
    series_ok = done & (peak <= _BESSEL_SERIES_MAX_TERM)
    out[series_ok] = total[series_ok]
    rest = ~series_ok
    if rest.any():
        zr = zz[rest]
        logfac = math.lgamma(beta + 1.0) - beta * np.log(zr / 2.0)
        out[rest] = np.exp(logfac) * sp.jv(beta, zr)
        if not np.all(np.isfinite(out[rest])):
            raise AccuracyError("Bessel evaluation did not reach tolerance")
    return out.reshape(z.shape) if z.ndim else float(out[0])


def theta_distance(x, y, theta):
    """(x, y)_theta = (x^2 + y^2 - 2xy cos theta)^{1/2}.

    Written as ((x-y)^2 + 4xy sin^2(theta/2))^{1/2}, which stays accurate
    as theta -> 0 and x -> y.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    s = np.sin(0.5 * np.asarray(theta, dtype=float))
    d = np.sqrt((x - y) ** 2 + 4.0 * x * y * s * s)
    return d if np.ndim(d) else float(d)
