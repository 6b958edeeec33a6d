"""Operator-norm lower bounds and the numerical experiments built on them."""

from __future__ import annotations

import csv
import io
import json
import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy import linalg

from .errors import DomainError
from .expansion import (
    Expansion,
    MultiplierSpaceParams,
    basis_table,
    decay_certificate,
    multiplier_weight_range,
    transplant_weight_range,
)
from .quadrature import composite_rule, gauss_laguerre_rule, head_cutoff, panel_edges, tail_cutoff
from .semigroup import dsM, dsM_weighted_l2, homogeneous_theta_integral
from .sequences import MultiplierSeq, WbvSpec, cesaro_seq, critical_index, wbv_norm
from .special import SystemTag, orthonormal_table

SEARCHES = ("random", "coordinate-ascent", "power-iteration")
SPAN_TOL = 1e-14
ASCENT_STEPS = (1.0, -1.0, 0.25, -0.25)
SMOOTHING_ORDERS = (1.0, 2.0, 4.0)
GROWTH_SPAN_FACTOR = 4
CHUNK = 16

# ---------------------------------------------------------------------------
# counter-based generator

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def splitmix64(x) -> np.ndarray:
    """The splitmix64 finaliser applied to (x + golden ratio increment)."""
    with np.errstate(over="ignore"):
        z = np.asarray(x, dtype=np.uint64) + _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def uniform_stream(seed: int, trial: int, n: int) -> np.ndarray:
    """n uniforms in (0, 1) for the given trial; depends only on (seed, trial, j).

    Draw j of trial t is splitmix64(splitmix64(seed) ^ (t * 2^32 + j)),
    mapped to (k + 0.5) 2^-53 with k its top 53 bits.
    """
    with np.errstate(over="ignore"):
        key = splitmix64(np.uint64(seed % 2 ** 64))
        ctr = np.uint64(trial) * np.uint64(2 ** 32) + np.arange(n, dtype=np.uint64)
        z = splitmix64(key ^ ctr)
    return ((z >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53


def cauchy_stream(seed: int, trial: int, n: int) -> np.ndarray:
    """Standard Cauchy draws tan(pi (u - 1/2)) from :func:`uniform_stream`."""
    return np.tan(math.pi * (uniform_stream(seed, trial, n) - 0.5))


# ---------------------------------------------------------------------------
# configuration and reports


@dataclass(frozen=True)
class ProbeConfig:
    """How a lower bound is searched for; ``seed`` fixes the whole trial stream."""

    params: MultiplierSpaceParams
    K: int = 16
    trials: int = 64
    seed: int = 0
    search: str = "coordinate-ascent"
    workers: int = 1

    def __post_init__(self):
        if self.K < 4:
            raise DomainError("K must be at least 4")
        if self.trials < 1:
            raise DomainError("need at least one trial")
        if self.search not in SEARCHES:
            raise DomainError(f"search must be one of {SEARCHES}")
        if self.search == "power-iteration" and self.params.p != 2:
            raise DomainError("power-iteration search is only available at p = 2")
        if self.workers < 1:
            raise DomainError("workers must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError("seed must be a 64-bit unsigned integer")

    def to_dict(self) -> dict:
        d = asdict(self)
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "ProbeConfig":
        d = dict(d)
        prm = d.pop("params")
        if not isinstance(prm, MultiplierSpaceParams):
            prm = MultiplierSpaceParams(float(prm["alpha"]), float(prm["p"]), float(prm["gamma"]))
        return cls(prm, **d)

    def with_(self, **kw) -> "ProbeConfig":
        d = asdict(self)
        d["params"] = self.params
        d.update(kw)
        return ProbeConfig(**d)


@dataclass
class ExperimentReport:
    """Rows of an experiment plus metadata; CSV output omits the timestamp."""

    name: str
    columns: list
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(self.columns)
        for row in self.rows:
            wr.writerow([_fmt(v) for v in row])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text

    def to_json(self, path=None) -> str:
        meta = dict(self.metadata)
        meta.setdefault("timestamp", time.strftime("%Y-%m-%dT%H:%M:%S"))
        rec = {
            "name": self.name,
            "columns": list(self.columns),
            "rows": [[_jsonable(v) for v in row] for row in self.rows],
            "metadata": _jsonable(meta),
        }
        text = json.dumps(rec, indent=2)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    return v


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (float, np.floating)):
        f = float(v)
        return f if math.isfinite(f) else str(f)
    if isinstance(v, complex):
        return [v.real, v.imag]
    return v


# ---------------------------------------------------------------------------
# trend diagnostics


@dataclass(frozen=True)
class Trend:
    slope: float
    tail_slope: float
    residual: float
    bounded: bool


def loglog_fit(xs, ys):
    """Least-squares slope and rms residual of log y against log x."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    if len(lx) < 2:
        return float("nan"), float("nan")
    A = np.vstack([lx, np.ones_like(lx)]).T
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    res = ly - A @ coef
    return float(coef[0]), float(np.sqrt(np.mean(res ** 2)))


def trend_diagnostic(xs, ys, tail: int = 3, slope_max: float = 0.1,
                     contraction: float = 0.6) -> Trend:
    """Is y(x) bounded as x grows, judged from the log-log slope of the last points?

    A ratio that converges has tail slope -> 0, a power blow-up x^a has
    slope a, and a logarithmic blow-up has slope about 1/log x, which the
    default threshold 0.1 still flags for x up to about e^10. A tail
    slope above the threshold is still read as bounded when the last
    log-log increment is at most ``contraction`` times the one before
    (geometric convergence) and below 2 * slope_max.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if not np.all(np.isfinite(ys)) or np.any(ys <= 0):
        return Trend(float("nan"), float("nan"), float("nan"), False)
    slope, resid = loglog_fit(xs, ys)
    k = min(tail, len(xs))
    tail_slope, _ = loglog_fit(xs[-k:], ys[-k:])
    bounded = bool(len(xs) >= 2 and tail_slope <= slope_max)
    if not bounded and len(xs) >= 3:
        # increments of log y per unit log x shrinking geometrically also mean convergence
        inc = np.diff(np.log(ys)) / np.diff(np.log(xs))
        bounded = bool(inc[-1] <= contraction * inc[-2] and inc[-1] <= 2 * slope_max)
    return Trend(slope, tail_slope, resid, bounded)


# ---------------------------------------------------------------------------
# norms on a finite span


class SpanNorm:
    """Weighted L^p norms of functions sum_{k<=K} c_k b_k on a fixed rule.

    The composite Gauss-Legendre rule is cut using the decay certificate
    of the largest-envelope basis function, so every element of the span
    is integrated with the same nodes. Prefix norms of a coefficient
    vector come from a cumulative sum over the basis table.
    """

    def __init__(self, tag: SystemTag, K: int, p: float, w: float):
        self.tag, self.K, self.p, self.w = tag, K, p, w
        env = decay_certificate(Expansion(tag, np.eye(K + 1)[K]))
        X = tail_cutoff(env, p, w, SPAN_TOL)
        eps = head_cutoff(env, p, w, SPAN_TOL)
        width = 0.25 if tag.quadratic else 0.5
        self.rule = composite_rule(panel_edges(eps, X, width), w)
        self.B = basis_table(tag, K, self.rule.nodes)

    def values(self, c) -> np.ndarray:
        c = np.asarray(c)
        return c @ self.B[: len(c)]

    def norm_of_values(self, v) -> float:
        return float(np.sum(self.rule.weights * np.abs(v) ** self.p)) ** (1.0 / self.p)

    def prefix_norms(self, c) -> np.ndarray:
        """Norms of sum_{k<n} c_k b_k for n = 1..len(c)."""
        c = np.asarray(c)
        S = np.cumsum(c[:, None] * self.B[: len(c)], axis=0)
        return (np.abs(S) ** self.p @ self.rule.weights) ** (1.0 / self.p)


def _ascent(span_num: SpanNorm, span_den: SpanNorm, mult: np.ndarray, c0: np.ndarray, sweeps: int = 2):
    """Coordinate ascent on ||T c|| / ||c|| by axis perturbations."""
    c = np.array(c0, dtype=complex if np.iscomplexobj(mult) or np.iscomplexobj(c0) else float)
    n = len(c)
    Bn, Bd = span_num.B[:n], span_den.B[:n]
    fnum = (mult * c) @ Bn
    fden = c @ Bd
    best = _safe_ratio(span_num.norm_of_values(fnum), span_den.norm_of_values(fden))
    for _ in range(sweeps):
        for j in range(n):
            scale = max(abs(c[j]), float(np.max(np.abs(c))) / n, 1e-300)
            for step in ASCENT_STEPS:
                d = step * scale
                cand_num = fnum + d * mult[j] * Bn[j]
                cand_den = fden + d * Bd[j]
                r = _safe_ratio(span_num.norm_of_values(cand_num), span_den.norm_of_values(cand_den))
                if r > best:
                    best, fnum, fden = r, cand_num, cand_den
                    c[j] += d
    return best, c


def _safe_ratio(a: float, b: float) -> float:
    return a / b if b > 0 else 0.0


def _structured_vectors(tag: SystemTag, K: int) -> np.ndarray:
    """Kernel vectors b_k(x0) and their Cesaro-smoothed versions.

    The smoothed kernels sum_k (A_{K-k}^nu / A_K^nu) b_k(x0) b_k are
    approximate point masses with controlled L^p norm, the classical
    extremisers for summation operators.
    """
    x0 = 2.0 ** np.arange(-6, 7, 1.0)
    if tag.alpha >= 0 and tag.family in ("l", "psi"):
        x0 = np.concatenate(([0.0], x0))
    if tag.family == "script_l" and tag.alpha < 0:
        x0 = x0[x0 > 0]
    kern = basis_table(tag, K, x0).T
    out = [kern]
    for nu in SMOOTHING_ORDERS:
        out.append(kern * cesaro_seq(K, nu + max(tag.alpha, 0.0)).head(K + 1))
    return np.vstack(out)


@dataclass(frozen=True)
class LowerBound:
    value: float
    per_level: np.ndarray
    method: str
    argmax: Optional[np.ndarray] = None


def _level_ratios(span_num: SpanNorm, span_den: SpanNorm, mult, V, levels) -> np.ndarray:
    """Ratios ||T v_{<=K}|| / ||v_{<=K}|| for every row v of V and K in levels."""
    acc_num = np.zeros((len(V), len(span_num.rule.nodes)), dtype=np.result_type(V, mult, float))
    acc_den = np.zeros((len(V), len(span_den.rule.nodes)), dtype=V.dtype)
    out = np.empty((len(V), len(levels)))
    prev = 0
    w_num, w_den, p = span_num.rule.weights, span_den.rule.weights, span_num.p
    for j, K in enumerate(levels):
        seg = slice(prev, K + 1)
        acc_num += (V[:, seg] * mult[seg]) @ span_num.B[seg]
        acc_den += V[:, seg] @ span_den.B[seg]
        prev = K + 1
        num = (np.abs(acc_num) ** p @ w_num) ** (1 / p)
        den = (np.abs(acc_den) ** p @ w_den) ** (1 / p)
        with np.errstate(divide="ignore", invalid="ignore"):
            out[:, j] = np.where(den > 0, num / den, 0.0)
    return out


def _search(span_num: SpanNorm, span_den: SpanNorm, mult: np.ndarray, cfg: ProbeConfig, K_levels):
    """Shared random/structured/ascent search.

    Returns the running maximum for each K in ``K_levels``: the value at
    level K uses test vectors supported on 0..K only, and levels are
    combined by a running max (a vector for K is admissible for K' > K).
    Trial vectors are processed in fixed chunks so the arithmetic does
    not depend on the number of workers.
    """
    levels = sorted(K_levels)
    K_max = levels[-1]
    n = K_max + 1
    C = np.vstack([cauchy_stream(cfg.seed, t, n) for t in range(cfg.trials)])
    V = np.vstack([C, _structured_vectors(span_den.tag, K_max)])
    chunks = [V[i:i + CHUNK] for i in range(0, len(V), CHUNK)]

    def run(chunk):
        return _level_ratios(span_num, span_den, mult, chunk, levels)

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            R = np.vstack(list(pool.map(run, chunks)))
    else:
        R = np.vstack([run(c) for c in chunks])

    # unit vectors: ratio |m_k| ||num_k|| / ||den_k|| in closed form
    p = span_num.p
    rn = (np.abs(span_num.B) ** p @ span_num.rule.weights) ** (1 / p)
    rd = (np.abs(span_den.B) ** p @ span_den.rule.weights) ** (1 / p)
    unit = np.maximum.accumulate(np.abs(mult) * rn / rd)

    out = {}
    running = 0.0
    argmax = None
    for j, K in enumerate(levels):
        i = int(np.argmax(R[:, j]))
        v = float(R[i, j])
        start = V[i, : K + 1]
        if unit[K] > v:
            k = int(np.argmax(np.abs(mult[: K + 1]) * rn[: K + 1] / rd[: K + 1]))
            v = float(unit[K])
            start = np.eye(K + 1)[k]
        if cfg.search == "coordinate-ascent":
            r, c = _ascent(span_num, span_den, mult[: K + 1], start)
            if r > v:
                v, argmax = r, c
        running = max(running, v)
        out[K] = running
    return out, argmax


def operator_norm_probe(m: MultiplierSeq, cfg: ProbeConfig, K_levels: Optional[Sequence[int]] = None) -> LowerBound:
    """Lower bounds for ||T_m|| on L^p(x^gamma dx), l^alpha system, at each K level."""
    prm = cfg.params
    if not multiplier_weight_range(prm):
        warnings.warn("parameters lie outside the admissible multiplier weight range", stacklevel=2)
    levels = sorted(set(K_levels or [cfg.K]))
    K_max = levels[-1]
    mult = m.head(K_max + 1)
    if prm.p == 2 and (cfg.search == "power-iteration" or prm.gamma == prm.alpha):
        vals = [_p2_exact(mult[: K + 1], prm) for K in levels]
        per = np.maximum.accumulate(np.asarray(vals))
        return LowerBound(float(per[-1]), per, "power-iteration")
    tag = SystemTag("l", prm.alpha)
    span = SpanNorm(tag, K_max, prm.p, prm.gamma)
    out, argmax = _search(span, span, mult, cfg, levels)
    per = np.array([out[K] for K in levels])
    return LowerBound(float(per[-1]), per, cfg.search, argmax)


def _p2_exact(mult: np.ndarray, prm: MultiplierSpaceParams) -> float:
    """Exact norm of T_m on span{l_0..l_K} in L^2(x^gamma dx).

    For gamma = alpha the Gram matrix is the identity and the norm is
    max |m_k|. Otherwise the Gram matrix G_jk = int l_j l_k x^gamma dx is
    exact by Gauss-Laguerre with parameter gamma, and the norm squared is
    the top eigenvalue of D* G D v = mu G v.
    """
    if prm.gamma == prm.alpha or np.all(mult == mult[0]):
        return float(np.max(np.abs(mult)))
    K = len(mult) - 1
    rule = gauss_laguerre_rule(K + 2, prm.gamma)
    # l_j l_k x^gamma = p_j p_k e^{-x} x^gamma: a degree-2K polynomial against the gamma weight
    T = orthonormal_table(K, prm.alpha, rule.nodes, 0.5 * rule.log_weights)
    G = T @ T.T
    D = np.diag(mult)
    A = D.conj().T @ G @ D
    mu = linalg.eigh(A, G, eigvals_only=True)
    return float(math.sqrt(max(mu[-1], 0.0)))


def operator_norm_lower_bound(m: MultiplierSeq, cfg: ProbeConfig) -> float:
    """max over the trial family of ||T_m f|| / ||f||, f in span{l_0..l_K}."""
    return operator_norm_probe(m, cfg).value


# ---------------------------------------------------------------------------
# experiments


def report_metadata(cfg: ProbeConfig, **extra) -> dict:
    d = {"seed": cfg.seed, "K": cfg.K, "trials": cfg.trials, "search": cfg.search,
         "span_tol": SPAN_TOL, "params": asdict(cfg.params)}
    d.update(extra)
    return d


def cesaro_growth_experiment(alpha: float, p: float, nu: float, n_list: Sequence[int],
                             cfg: ProbeConfig) -> ExperimentReport:
    """Lower bounds for ||m_{n,nu}|| on M^p_{alpha,alpha} across n, with a slope fit."""
    prm = MultiplierSpaceParams(alpha, p, alpha)
    cfg = cfg.with_(params=prm)
    rows = []
    ests = []
    for n in n_list:
        K = max(cfg.K, GROWTH_SPAN_FACTOR * int(n))
        lb = operator_norm_probe(cesaro_seq(int(n), nu), cfg.with_(K=K))
        rows.append((int(n), lb.value))
        ests.append(lb.value)
    sc = critical_index(alpha, p)
    predicted = sc - nu - 0.5
    meta = report_metadata(cfg, alpha=alpha, p=p, nu=nu, critical_index=sc, predicted_exponent=predicted)
    if len(rows) >= 2:
        tr = trend_diagnostic(np.asarray(n_list) + 1.0, ests)
        meta.update(slope=tr.slope, fit_residual=tr.residual, tail_slope=tr.tail_slope, plateau=tr.bounded)
    return ExperimentReport("cesaro-growth", ["n", "lower_bound"], rows, meta)


def transplant_span(alpha: float, K: int, p: float, delta: float) -> SpanNorm:
    return SpanNorm(SystemTag("script_l", alpha), K, p, delta)


def _transplant_p2(alpha: float, beta: float, delta: float, K: int) -> float:
    """Exact sup ratio at p = 2 via Gram matrices of both systems in x^delta dx."""
    def gram(a):
        rule = gauss_laguerre_rule(K + 2, a + delta)
        T = orthonormal_table(K, a, rule.nodes, 0.5 * rule.log_weights)
        return T @ T.T
    Ga, Gb = gram(alpha), gram(beta)
    mu = linalg.eigh(Ga, Gb, eigvals_only=True)
    return float(math.sqrt(max(mu[-1], 0.0)))


def transplantation_experiment(alpha: float, beta: float, p: float, delta: float,
                               K_list: Sequence[int], cfg: ProbeConfig) -> ExperimentReport:
    """Observed max and min of ||sum b_k L^alpha_k|| / ||sum b_k L^beta_k|| in L^p(x^delta dx) per K.

    For p != 2 the min comes from searching the reverse ratio, so it is an
    upper estimate of the true infimum.
    """
    inside = transplant_weight_range(alpha, beta, p, delta)
    if not inside:
        warnings.warn("delta lies outside the transplantation weight range", stacklevel=2)
    levels = sorted(set(int(k) for k in K_list))
    if p == 2:
        vals = np.maximum.accumulate([_transplant_p2(alpha, beta, delta, K) for K in levels])
        low = np.minimum.accumulate([1.0 / _transplant_p2(beta, alpha, delta, K) for K in levels])
        rows = [(K, float(v), float(lo)) for K, v, lo in zip(levels, vals, low)]
        method = "gram"
    else:
        K_max = levels[-1]
        num = transplant_span(alpha, K_max, p, delta)
        den = transplant_span(beta, K_max, p, delta)
        ones = np.ones(K_max + 1)
        out, _ = _search(num, den, ones, cfg, levels)
        back, _ = _search(den, num, ones, cfg, levels)
        low = np.minimum.accumulate([_safe_ratio(1.0, back[K]) for K in levels])
        rows = [(K, out[K], float(lo)) for K, lo in zip(levels, low)]
        method = cfg.search
    tr = trend_diagnostic(levels, [r[1] for r in rows])
    meta = report_metadata(cfg, alpha=alpha, beta=beta, p=p, delta=delta, in_range=inside, method=method,
                 tail_slope=tr.tail_slope, bounded=tr.bounded)
    return ExperimentReport("transplant", ["K", "max_ratio", "min_ratio"], rows, meta)


def embedding_experiment(m, alpha: float, p: float, gamma: float, s: float, cfg: ProbeConfig,
                         K_list: Optional[Sequence[int]] = None) -> ExperimentReport:
    """Ratio of the operator-norm lower bound to ||m||_{wbv_{2,s}} over a battery.

    ``m`` is a single sequence or a mapping name -> sequence.
    """
    battery = m if isinstance(m, Mapping) else {"m": m}
    prm = MultiplierSpaceParams(alpha, p, gamma)
    cfg = cfg.with_(params=prm)
    levels = sorted(set(K_list or [cfg.K]))
    rows = []
    flags = {}
    for name, seq in battery.items():
        lb = operator_norm_probe(seq, cfg, levels)
        w = wbv_norm(seq, WbvSpec(q=2, s=s))
        ratios = lb.per_level / w
        for K, est, r in zip(levels, lb.per_level, ratios):
            rows.append((name, K, float(est), float(w), float(r)))
        flags[name] = trend_diagnostic(levels, ratios).bounded if len(levels) > 1 else True
    all_r = [r[-1] for r in rows]
    meta = report_metadata(cfg, alpha=alpha, p=p, gamma=gamma, s=s, max_ratio=max(all_r),
                 bounded=all(flags.values()), bounded_by_sequence=flags)
    return ExperimentReport("embedding", ["sequence", "K", "lower_bound", "wbv_norm", "ratio"], rows, meta)


R_GRID = (0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.97, 0.98, 0.99)


def dsm_bounds_experiment(alpha: float, s: float, sequences: Mapping[str, MultiplierSeq],
                      r_grid: Sequence[float] = R_GRID, y_grid=None) -> ExperimentReport:
    """Normalised sup and weighted-L^2 sizes of d_sM across r.

    ratio_sup = sup_y |d_sM(y,r)| (1-r)^{s+alpha+1} / (r^{2alpha+2} ||m||_inf)
    ratio_l2  = int |y^s d_sM|^2 dmu_alpha (1-r)^{s+alpha+1} / (r^{4alpha+4} ||m||_{2,s}^2)
    """
    if y_grid is None:
        y_grid = np.linspace(0.0, 4.0, 161)
    rows = []
    flags = {}
    for name, m in sequences.items():
        sup = m.sup_norm()
        w = wbv_norm(m, WbvSpec(q=2, s=s))
        ra, rb = [], []
        for r in r_grid:
            d = np.abs(dsM(m, s, r, y_grid, alpha))
            a = float(np.max(d)) * (1 - r) ** (s + alpha + 1) / (r ** (2 * alpha + 2) * sup)
            b = dsM_weighted_l2(m, s, r, alpha) * (1 - r) ** (s + alpha + 1) / (r ** (4 * alpha + 4) * w * w)
            rows.append((alpha, name, float(r), a, b))
            ra.append(a)
            rb.append(b)
        x = 1.0 / (1.0 - np.asarray(r_grid))
        flags[name] = {"sup": trend_diagnostic(x, ra).bounded, "l2": trend_diagnostic(x, rb).bounded}
    meta = {"alpha": alpha, "s": s, "bounded": flags,
            "all_bounded": all(v["sup"] and v["l2"] for v in flags.values())}
    return ExperimentReport("dsm-bounds", ["alpha", "sequence", "r", "ratio_sup", "ratio_l2"], rows, meta)


def kernel_profile_experiment(alpha: float, j_max: int = 30) -> ExperimentReport:
    """The theta-integral at x = 1 scaled by |1-y| near y = 1 and by y^{2alpha+2} for large y."""
    rows = []
    flags = {}
    js = np.arange(1, j_max + 1)
    for regime, ys, scale in (
        ("above", 1 + 2.0 ** -js, 2.0 ** -js),
        ("below", 1 - 2.0 ** -js, 2.0 ** -js),
        ("large", 2.0 ** js, (2.0 ** js) ** (2 * alpha + 2)),
    ):
        vals = [homogeneous_theta_integral(1.0, y, alpha) * sc for y, sc in zip(ys, scale)]
        for j, y, v in zip(js, ys, vals):
            rows.append((alpha, regime, int(j), float(y), v))
        flags[regime] = trend_diagnostic(2.0 ** js, vals).bounded
    meta = {"alpha": alpha, "j_max": j_max, "bounded": flags, "all_bounded": all(flags.values())}
    return ExperimentReport("kernel-profile", ["alpha", "regime", "j", "y", "ratio"], rows, meta)
