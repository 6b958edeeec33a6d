"""Multiplier sequences, fractional differences and wbv norms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import signal

from .errors import ConvergenceError, DomainError
from .special import binom_A_seq

DEFAULT_N_MAX = 2 ** 12
_J_START = 64
_J_MAX = 2 ** 22


@dataclass(frozen=True)
class MultiplierSeq:
    """A bounded sequence m_0, m_1, ... acting diagonally on coefficients.

    ``kind`` is ``"table"`` (finitely supported, ``values`` holds
    m_0..m_n), ``"closed_form"`` (``func`` maps an integer array k to m_k)
    or ``"sampled"`` (``func`` is a function on (0, inf) and m_k = func(k)).

    ``tail_sup(n)``, when given, must bound sup_{i >= n} |m_i - limit|; it is
    what lets :func:`frac_diff` certify truncation of infinite sums.
    """

    kind: str
    values: Optional[np.ndarray] = None
    func: Optional[Callable[[np.ndarray], np.ndarray]] = None
    limit: Optional[complex] = None
    support_bound: Optional[int] = None
    tail_sup: Optional[Callable[[int], float]] = None
    sup: Optional[float] = None
    at_zero: Optional[complex] = None
    formula_id: Optional[str] = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("table", "closed_form", "sampled"):
            raise DomainError(f"unknown sequence kind {self.kind!r}")
        if self.kind == "table":
            if self.values is None:
                raise DomainError("table sequences need values")
            vals = np.array(self.values)
            vals.setflags(write=False)
            object.__setattr__(self, "values", vals)
            object.__setattr__(self, "support_bound", len(vals) - 1)
            object.__setattr__(self, "limit", 0.0)
        elif self.func is None:
            raise DomainError(f"{self.kind} sequences need func")

    def head(self, n: int) -> np.ndarray:
        """m_0, ..., m_{n-1}."""
        if self.kind == "table":
            out = np.zeros(n, dtype=self.values.dtype)
            m = min(n, len(self.values))
            out[:m] = self.values[:m]
            return out
        k = np.arange(n)
        if self.kind == "closed_form":
            return np.asarray(self.func(k))
        out = np.empty(n, dtype=complex)
        if n:
            out[0] = self.at_zero if self.at_zero is not None else self.func(np.array([0.0]))[0]
            out[1:] = self.func(k[1:].astype(float))
        if np.all(out.imag == 0):
            out = out.real.copy()
        return out

    def __getitem__(self, k: int):
        return self.head(k + 1)[k]

    def sup_norm(self, n: int = 2 * DEFAULT_N_MAX + 1) -> float:
        """||m||_inf: exact for tables, declared or sampled over 0..n-1 otherwise."""
        if self.kind == "table":
            return float(np.max(np.abs(self.values))) if len(self.values) else 0.0
        if self.sup is not None:
            return float(self.sup)
        s = float(np.max(np.abs(self.head(n))))
        if self.limit is not None:
            s = max(s, abs(self.limit))
        return s

    def is_complex(self) -> bool:
        return np.iscomplexobj(self.head(1))

    def to_record(self) -> dict:
        """JSON-ready record {kind, values | formula-id, params}."""
        rec = {"kind": self.kind, "params": dict(self.params)}
        if self.formula_id is not None:
            rec["formula_id"] = self.formula_id
        if self.kind == "table":
            rec["values"] = _encode_values(self.values)
        elif self.formula_id is None:
            raise ValueError("closed-form sequence without formula_id cannot be serialised")
        return rec


def _encode_values(values) -> list:
    vals = np.asarray(values)
    if np.iscomplexobj(vals):
        return [[float(v.real), float(v.imag)] for v in vals]
    return [float(v) for v in vals]


def _decode_values(values) -> np.ndarray:
    if values and isinstance(values[0], (list, tuple)):
        return np.array([complex(a, b) for a, b in values])
    return np.asarray(values, dtype=float)


def table(values) -> MultiplierSeq:
    return MultiplierSeq("table", values=np.asarray(values))


def constant(c: complex = 1.0) -> MultiplierSeq:
    c = float(c) if np.isreal(c) else complex(c)
    return MultiplierSeq(
        "closed_form",
        func=lambda k: np.full(np.shape(k), c),
        limit=c,
        tail_sup=lambda n: 0.0,
        sup=abs(c),
        formula_id="constant",
        params={"c": c} if isinstance(c, float) else {"c": [c.real, c.imag]},
    )


def geometric(r: float) -> MultiplierSeq:
    """m_k = r^k for |r| < 1."""
    if not abs(r) < 1:
        raise DomainError("geometric sequence needs |r| < 1")
    return MultiplierSeq(
        "closed_form",
        func=lambda k: np.power(float(r), np.asarray(k, dtype=float)),
        limit=0.0,
        tail_sup=lambda n: abs(r) ** n,
        sup=1.0,
        formula_id="geometric",
        params={"r": float(r)},
    )


def cesaro_seq(n: int, nu: float) -> MultiplierSeq:
    """Cesaro means m_{n,nu}(k) = A_{n-k}^nu / A_n^nu for k <= n, 0 beyond."""
    if n < 0:
        raise DomainError("n must be non-negative")
    if not nu > -1:
        raise DomainError("nu must exceed -1")
    A = binom_A_seq(n, nu)
    return MultiplierSeq(
        "table",
        values=A[::-1] / A[n],
        formula_id="cesaro",
        params={"n": int(n), "nu": float(nu)},
    )


def cesaro_frac_diff_closed(n: int, nu: float, sp: float, k: int) -> float:
    """Closed form Delta^{s'} m_{n,nu}(k) = A_{n-k}^{nu-s'} / A_n^nu (0 for k > n)."""
    if k > n or k < 0:
        return 0.0
    return float(binom_A_seq(n - k, nu - sp)[-1] / binom_A_seq(n, nu)[-1])


def oscillating_seq(zeta: float, eta: float) -> MultiplierSeq:
    """m(k) = k^{-zeta eta} exp(i k^eta) for k >= 1, with m(0) = 0."""
    if not (zeta > 0 and eta > 0):
        raise DomainError("zeta and eta must be positive")
    e = zeta * eta

    def f(k):
        k = np.asarray(k, dtype=float)
        out = np.zeros(k.shape, dtype=complex)
        pos = k > 0
        kp = k[pos]
        out[pos] = kp ** (-e) * np.exp(1j * kp ** eta)
        return out

    return MultiplierSeq(
        "closed_form",
        func=f,
        limit=0.0,
        tail_sup=lambda n: max(n, 1) ** (-e),
        sup=1.0,
        formula_id="oscillating",
        params={"zeta": float(zeta), "eta": float(eta)},
    )


def sampled(func, *, limit=None, at_zero=None, tail_sup=None, sup=None,
            formula_id=None, params=None) -> MultiplierSeq:
    """m_k = func(k) for a function on (0, inf); m_0 = ``at_zero`` if given."""
    return MultiplierSeq(
        "sampled", func=func, limit=limit, at_zero=at_zero, tail_sup=tail_sup,
        sup=sup, formula_id=formula_id, params=params or {},
    )


def rational_seq() -> MultiplierSeq:
    """Samples of m(x) = x/(1+x)."""
    return sampled(lambda x: x / (1 + x), limit=1.0, at_zero=0.0,
                   tail_sup=lambda n: 1.0 / (1 + n), sup=1.0, formula_id="rational")


def imag_power_seq(tau: float) -> MultiplierSeq:
    """Samples of m(x) = x^{i tau}; m_0 = 1. No limit exists, so only
    integer-order differences are available."""
    return sampled(lambda x: np.exp(1j * tau * np.log(x)), at_zero=1.0, sup=1.0,
                   formula_id="imag_power", params={"tau": float(tau)})


_FORMULAS = {
    "constant": lambda p: constant(complex(*p["c"]) if isinstance(p["c"], list) else p["c"]),
    "geometric": lambda p: geometric(p["r"]),
    "cesaro": lambda p: cesaro_seq(p["n"], p["nu"]),
    "oscillating": lambda p: oscillating_seq(p["zeta"], p["eta"]),
    "rational": lambda p: rational_seq(),
    "imag_power": lambda p: imag_power_seq(p["tau"]),
}


def from_record(rec: dict) -> MultiplierSeq:
    """Inverse of :meth:`MultiplierSeq.to_record`."""
    fid = rec.get("formula_id")
    if rec["kind"] == "table" and "values" in rec:
        return MultiplierSeq("table", values=_decode_values(rec["values"]),
                             formula_id=fid, params=rec.get("params", {}))
    if fid not in _FORMULAS:
        raise DomainError(f"unknown formula id {fid!r}")
    return _FORMULAS[fid](rec.get("params", {}))


# ---------------------------------------------------------------------------
# fractional differences


def _is_integer(s: float) -> bool:
    return float(s).is_integer()


def _difference_plan(m: MultiplierSeq, s: float, tol: float):
    """Choose (J, c): Delta^s m_k = sum_{j<=J} A_j^{-s-1}(m_{k+j} - c) + err, |err| <= tol."""
    if not s > 0:
        raise DomainError("difference order s must be positive")
    if m.kind == "table":
        return m.support_bound, 0.0
    if _is_integer(s):
        return int(s), 0.0
    if m.limit is None and m.tail_sup is None:
        raise ConvergenceError(
            "fractional difference of an infinitely supported sequence needs a known "
            "limit or a tail certificate")
    c = 0.0 if m.limit is None else m.limit
    if m.tail_sup is not None:
        tail = m.tail_sup
    elif m.sup is not None:
        bound = m.sup + abs(c)
        tail = lambda n: bound  # noqa: E731
    else:
        raise ConvergenceError("no tail certificate and no declared sup norm")
    # Past j = floor(s+1) all A_j^{-s-1} share one sign, so their tail mass is
    # |sum_{j<=J} A_j^{-s-1}| = |A_J^{-s}| exactly.
    J = max(_J_START, int(math.floor(s + 1)))
    while J <= _J_MAX:
        if abs(binom_A_seq(J, -s)[-1]) * tail(J + 1) < tol:
            return J, c
        J *= 2
    raise ConvergenceError(f"tail of Delta^{s} not below {tol} within {_J_MAX} terms")


def frac_diff_vec(m: MultiplierSeq, s: float, K: int, tol: float = 1e-12) -> np.ndarray:
    """Delta^s m_k for k = 0..K, each with absolute error <= tol.

    Finitely supported sequences and integer orders are summed exactly.
    Otherwise Delta^s (m - c) is summed (Delta^s kills constants) with a
    truncation certified by the sequence's tail bound.
    """
    J, c = _difference_plan(m, s, tol)
    A = binom_A_seq(J, -s - 1.0)
    if m.kind == "table":
        n = m.support_bound
        v = np.asarray(m.values)
        full = signal.convolve(v[::-1], A)
        out = np.zeros(K + 1, dtype=full.dtype)
        top = min(K, n)
        out[: top + 1] = full[n - np.arange(top + 1)]
        return out
    v = m.head(K + J + 1) - c
    # correlate: out_k = sum_j A_j v_{k+j}
    full = signal.convolve(v[::-1], A)
    L = len(v) - 1
    return full[L - np.arange(K + 1)]


def frac_diff(m: MultiplierSeq, s: float, k: int, tol: float = 1e-12):
    """Delta^s m_k = sum_j A_j^{-s-1} m_{k+j} with absolute error <= tol."""
    J, c = _difference_plan(m, s, tol)
    A = binom_A_seq(J, -s - 1.0)
    if m.kind == "table":
        v = m.head(m.support_bound + 1)
        if k > m.support_bound:
            return 0.0
        seg = v[k:]
        return complex(np.dot(A[: len(seg)], seg)) if np.iscomplexobj(seg) else float(np.dot(A[: len(seg)], seg))
    seg = m.head(k + J + 1)[k:] - c
    val = np.dot(A, seg)
    return complex(val) if np.iscomplexobj(val) else float(val)


# ---------------------------------------------------------------------------
# wbv norms


@dataclass(frozen=True)
class WbvSpec:
    """Parameters of ||m||_{q,s}: sup over 1 <= n <= N_max."""

    q: float = 2.0
    s: float = 1.0
    N_max: int = DEFAULT_N_MAX
    tail_tol: float = 1e-12

    def __post_init__(self):
        if not self.q >= 1:
            raise DomainError("q must lie in [1, inf]")
        if not self.s > 0:
            raise DomainError("s must be positive")
        if self.N_max < 1:
            raise DomainError("N_max must be at least 1")


@dataclass(frozen=True)
class WbvResult:
    """wbv norm with its block profile.

    ``profile[n-1]`` is the n-th block quantity
    (sum_{k=n}^{2n} k^{-1} |k^s Delta^s m_k|^q)^{1/q}. ``saturated`` is set
    when the supremum is attained in the upper half of 1..N_max, a hint
    that N_max is too small.
    """

    norm: float
    sup_norm: float
    profile: np.ndarray
    argmax_n: int
    saturated: bool


def wbv_norm(m: MultiplierSeq, spec: WbvSpec = WbvSpec(), full_output: bool = False):
    """||m||_{q,s} = ||m||_inf + sup_n block_n, n >= 1.

    Blocks start at n = 1 since k^{-1} is undefined at k = 0. For q = inf
    the block is max_{n<=k<=2n} |k^s Delta^s m_k|.
    """
    N = spec.N_max
    d = frac_diff_vec(m, spec.s, 2 * N, spec.tail_tol)
    k = np.arange(1, 2 * N + 1, dtype=float)
    a = k ** spec.s * np.abs(d[1:])
    if math.isinf(spec.q):
        prof = np.array([a[n - 1: 2 * n].max() for n in range(1, N + 1)])
    else:
        w = a ** spec.q / k
        S = np.concatenate(([0.0], np.cumsum(w)))
        n = np.arange(1, N + 1)
        prof = np.maximum(S[2 * n] - S[n - 1], 0.0) ** (1.0 / spec.q)
    if m.kind == "table":
        sup = m.sup_norm()
    else:
        sup = m.sup_norm(2 * N + 1)
    i = int(np.argmax(prof))
    res = WbvResult(
        norm=float(sup + prof[i]),
        sup_norm=float(sup),
        profile=prof,
        argmax_n=i + 1,
        saturated=bool(prof[i] > 0 and i + 1 > N // 2),
    )
    return res if full_output else res.norm


# ---------------------------------------------------------------------------
# continuous criteria and parameter arithmetic


def hormander_quantity(m, m_prime, N_grid=None, nodes: int = 32) -> float:
    """B^2 = sup_x |m(x)|^2 + sup_N int_N^{2N} |m'(x)|^2 x dx.

    Both suprema run over the dyadic grid ``N_grid`` (default 2^-10..2^20);
    each integral uses an ``nodes``-point Gauss-Legendre rule on [N, 2N].
    """
    if N_grid is None:
        N_grid = 2.0 ** np.arange(-10, 21)
    t, w = np.polynomial.legendre.leggauss(nodes)
    sup_m = 0.0
    sup_int = 0.0
    for N in np.asarray(N_grid, dtype=float):
        x = N * (1.5 + 0.5 * t)
        xs = np.concatenate((x, [N, 2 * N]))
        sup_m = max(sup_m, float(np.max(np.abs(m(xs)) ** 2)))
        val = 0.5 * N * float(np.dot(w, np.abs(m_prime(x)) ** 2 * x))
        sup_int = max(sup_int, val)
    return sup_m + sup_int


def critical_index(alpha: float, p: float) -> float:
    """s_c(p) = (2alpha + 2)|1/p - 1/2|."""
    if not alpha > -1:
        raise DomainError("alpha must exceed -1")
    if not 1 <= p < math.inf:
        raise DomainError("p must lie in [1, inf)")
    return (2 * alpha + 2) * abs(1.0 / p - 0.5)
