"""Command-line interface: ``python -m laguerre_lab <command> ...``."""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings

import numpy as np

from . import expansion as ex
from . import probe as pr
from . import semigroup as sg
from . import sequences as sq
from .errors import DomainError
from .special import SystemTag, laguerre_fn_table

_SEQ_HELP = ("sequence spec: cesaro:n,nu | constant:c | geometric:r | oscillating:zeta,eta | "
             "rational | table:v0,v1,... | @file.json (serialised record)")


def parse_sequence(spec: str) -> sq.MultiplierSeq:
    """Build a MultiplierSeq from a compact command-line spec."""
    if spec.startswith("@"):
        with open(spec[1:]) as fh:
            return sq.from_record(json.load(fh))
    name, _, rest = spec.partition(":")
    args = [a for a in rest.split(",") if a]
    if name == "cesaro":
        return sq.cesaro_seq(int(args[0]), float(args[1]))
    if name == "constant":
        return sq.constant(float(args[0]) if args else 1.0)
    if name == "geometric":
        return sq.geometric(float(args[0]))
    if name == "oscillating":
        return sq.oscillating_seq(float(args[0]), float(args[1]))
    if name == "rational":
        return sq.rational_seq()
    if name == "table":
        return sq.table([float(a) for a in args])
    raise DomainError(f"unknown sequence spec {spec!r}")


def _expr_function(expr: str):
    names = {k: getattr(np, k) for k in ("exp", "sqrt", "log", "sin", "cos", "pi", "abs", "where")}

    def f(x):
        return eval(expr, {"__builtins__": {}}, dict(names, x=x))  # noqa: S307 - user-supplied formula

    return f


def _floats(text: str):
    return [float(v) for v in text.split(",") if v]


def _ints(text: str):
    return [int(v) for v in text.split(",") if v]


def _load_config(path):
    if not path:
        return {}
    with open(path) as fh:
        return json.load(fh)


def _probe_config(args, alpha, p, gamma) -> pr.ProbeConfig:
    cfg = _load_config(args.config)
    base = {"K": args.K, "trials": args.trials, "seed": args.seed, "search": args.search,
            "workers": args.workers}
    base.update({k: v for k, v in cfg.items() if k != "params"})
    prm = cfg.get("params") or {"alpha": alpha, "p": p, "gamma": gamma}
    return pr.ProbeConfig.from_dict(dict(base, params=prm))


def _emit(report: pr.ExperimentReport, args) -> None:
    text = report.to_json() if args.format == "json" else report.to_csv()
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


# ---------------------------------------------------------------------------
# commands


def cmd_eval(args):
    xs = _floats(args.x)
    if args.seq:
        m = parse_sequence(args.seq)
        vals = m.head(args.K + 1)
        rows = [(k, float(np.real(v)), float(np.imag(v))) for k, v in enumerate(vals)]
        return pr.ExperimentReport("eval-sequence", ["k", "re", "im"], rows, {"sequence": args.seq})
    tag = SystemTag(args.family, args.alpha)
    B = laguerre_fn_table(tag, args.k, xs)[args.k]
    rows = [(x, float(v)) for x, v in zip(xs, B)]
    return pr.ExperimentReport("eval", ["x", "value"], rows,
                               {"family": args.family, "alpha": args.alpha, "k": args.k})


def cmd_coeffs(args):
    tag = SystemTag(args.family, args.alpha)
    e = ex.analyze(_expr_function(args.expr), tag, args.K, tol=args.tol)
    rows = [(k, float(np.real(c)), float(np.imag(c))) for k, c in enumerate(e.coeffs)]
    return pr.ExperimentReport("coeffs", ["k", "re", "im"], rows,
                               {"family": args.family, "alpha": args.alpha, "expr": args.expr, "tol": args.tol})


def cmd_multiplier(args):
    m = parse_sequence(args.seq)
    cfg = _probe_config(args, args.alpha, args.p, args.gamma)
    rows = []
    if args.expr:
        e = ex.analyze(_expr_function(args.expr), SystemTag("l", args.alpha), args.K, tol=args.tol)
        out = ex.apply_multiplier(m, e)
        rows = [(k, float(np.real(c)), float(np.real(d))) for k, (c, d) in enumerate(zip(e.coeffs, out.coeffs))]
    lb = pr.operator_norm_lower_bound(m, cfg)
    meta = pr.report_metadata(cfg, sequence=args.seq, sup_norm=m.sup_norm(),
                    wbv_norm=sq.wbv_norm(m, sq.WbvSpec(q=args.q, s=args.s)), lower_bound=lb)
    if not rows:
        rows = [("lower_bound", lb), ("sup_norm", meta["sup_norm"]), ("wbv_norm", meta["wbv_norm"])]
        return pr.ExperimentReport("multiplier", ["quantity", "value"], rows, meta)
    return pr.ExperimentReport("multiplier", ["k", "coeff", "multiplied"], rows, meta)


def cmd_wbv(args):
    m = parse_sequence(args.seq)
    res = sq.wbv_norm(m, sq.WbvSpec(q=args.q, s=args.s, N_max=args.N_max, tail_tol=args.tol), full_output=True)
    rows = [(n, float(v)) for n, v in enumerate(res.profile, start=1)]
    meta = {"sequence": args.seq, "q": args.q, "s": args.s, "norm": res.norm, "sup_norm": res.sup_norm,
            "argmax_n": res.argmax_n, "saturated": res.saturated}
    return pr.ExperimentReport("wbv", ["n", "block_value"], rows, meta)


def cmd_cesaro_growth(args):
    cfg = _probe_config(args, args.alpha, args.p, args.alpha)
    return pr.cesaro_growth_experiment(args.alpha, args.p, args.nu, _ints(args.n), cfg)


def cmd_transplant(args):
    cfg = _probe_config(args, 0.0, 2.0, 0.0)
    return pr.transplantation_experiment(args.alpha, args.beta, args.p, args.delta, _ints(args.K_list), cfg)


def cmd_squarefn(args):
    tag = SystemTag("psi", args.alpha)
    if args.coeffs:
        c = np.asarray(_floats(args.coeffs))
    else:
        c = pr.cauchy_stream(args.seed, 0, args.K + 1)
    e = ex.Expansion(tag, c)
    xs = _floats(args.x)
    rows = []
    if args.kind == "glambda":
        kern = sg.GLambdaKernel(args.lam, args.alpha)
        for x in xs:
            r = sg.g_lambda_star(e, kern, x, full_output=True)
            rows.append((x, r.value, float(r.error_estimate)))
        cols = ["x", "value", "error_estimate"]
    else:
        vals = sg.g_sigma(e, args.sigma, np.asarray(xs))
        rows = [(x, float(v)) for x, v in zip(xs, vals)]
        cols = ["x", "value"]
    meta = {"kind": args.kind, "alpha": args.alpha, "sigma": args.sigma, "lambda": args.lam,
            "seed": args.seed, "K": len(c) - 1}
    return pr.ExperimentReport("squarefn", cols, rows, meta)


def cmd_probe_norm(args):
    m = parse_sequence(args.seq)
    cfg = _probe_config(args, args.alpha, args.p, args.gamma)
    levels = sorted(set(_ints(args.K_list))) if args.K_list else [cfg.K]
    lb = pr.operator_norm_probe(m, cfg, levels)
    rows = [(K, float(v)) for K, v in zip(levels, lb.per_level)]
    return pr.ExperimentReport("probe-norm", ["K", "lower_bound"], rows,
                               pr.report_metadata(cfg, sequence=args.seq, method=lb.method))


def cmd_ranges(args):
    prm = ex.MultiplierSpaceParams(args.alpha, args.p, args.gamma)
    d = ex.dual(prm)
    rows = [
        ("dual", f"p'={d.p!r} gamma'={d.gamma!r}"),
        ("script-shift", repr(ex.script_shift(args.alpha, args.p, args.gamma).gamma)),
        ("phi-shift", repr(ex.phi_shift(args.alpha, args.p, args.gamma).gamma)),
        ("multiplier-range", str(ex.multiplier_weight_range(prm)).lower()),
        ("lep-range", str(ex.lep_range(args.alpha, args.p)).lower()),
    ]
    if args.beta is not None:
        rows.append(("transplant-range", str(ex.transplant_weight_range(args.alpha, args.beta, args.p, args.delta)).lower()))
    return pr.ExperimentReport("ranges", ["request", "result"], rows,
                               {"alpha": args.alpha, "p": args.p, "gamma": args.gamma})


def cmd_kernel_profile(args):
    return pr.kernel_profile_experiment(args.alpha, args.j_max)


def cmd_dsm_bounds(args):
    s = args.s if args.s is not None else args.alpha + 1.5
    seqs = {spec: parse_sequence(spec) for spec in args.seqs.split(";")}
    return pr.dsm_bounds_experiment(args.alpha, s, seqs)


# ---------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--config", help="JSON file mirroring ProbeConfig")
    p.add_argument("--tol", type=float, default=1e-10)


def _probe_flags(p: argparse.ArgumentParser, K: int = 16) -> None:
    p.add_argument("--K", type=int, default=K)
    p.add_argument("--trials", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--search", choices=pr.SEARCHES, default="coordinate-ascent")
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="laguerre_lab", description="Laguerre expansion multiplier lab")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a basis function or a sequence")
    p.add_argument("--family", choices=("l", "script_l", "phi", "psi"), default="l")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--x", default="0.5,1,2")
    p.add_argument("--seq", help=_SEQ_HELP)
    p.add_argument("--K", type=int, default=16, help="sequence terms 0..K")
    _common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("coeffs", help="analyse a formula in x into K+1 coefficients")
    p.add_argument("--expr", required=True, help="numpy expression in x, e.g. 'x*exp(-x/2)'")
    p.add_argument("--family", choices=("l", "script_l", "phi", "psi"), default="l")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--K", type=int, default=8)
    _common(p)
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("multiplier", help="apply a multiplier and report its norms")
    p.add_argument("--seq", required=True, help=_SEQ_HELP)
    p.add_argument("--expr", help="optional function to transform (l system)")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--q", type=float, default=2.0)
    p.add_argument("--s", type=float, default=1.0)
    _probe_flags(p)
    _common(p)
    p.set_defaults(func=cmd_multiplier)

    p = sub.add_parser("wbv", help="wbv_{q,s} norm with its dyadic profile")
    p.add_argument("--seq", required=True, help=_SEQ_HELP)
    p.add_argument("--q", type=float, default=2.0)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--N-max", dest="N_max", type=int, default=sq.DEFAULT_N_MAX)
    _common(p)
    p.set_defaults(func=cmd_wbv, tol=1e-12)

    p = sub.add_parser("cesaro-growth", help="Cesaro-mean norm growth in n")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--p", type=float, default=1.1)
    p.add_argument("--nu", type=float, default=0.0)
    p.add_argument("--n", default="4,8,16,32")
    _probe_flags(p, K=4)
    _common(p)
    p.set_defaults(func=cmd_cesaro_growth)

    p = sub.add_parser("transplant", help="transplantation ratio table")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--p", type=float, default=4.0)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--K-list", dest="K_list", default="8,16,32")
    _probe_flags(p, K=8)
    _common(p)
    p.set_defaults(func=cmd_transplant)

    p = sub.add_parser("squarefn", help="g_sigma or g_lambda^* on an x grid")
    p.add_argument("--kind", choices=("gsigma", "glambda"), default="gsigma")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--lam", type=float, default=2.0)
    p.add_argument("--coeffs", help="psi coefficients c0,c1,...; default: seeded Cauchy draws")
    p.add_argument("--K", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--x", default="0.5,1,1.5")
    _common(p)
    p.set_defaults(func=cmd_squarefn)

    p = sub.add_parser("probe-norm", help="operator-norm lower bound of a multiplier")
    p.add_argument("--seq", required=True, help=_SEQ_HELP)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--K-list", dest="K_list", help="comma-separated K levels")
    _probe_flags(p)
    _common(p)
    p.set_defaults(func=cmd_probe_norm)

    p = sub.add_parser("ranges", help="multiplier-space parameter arithmetic")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--beta", type=float)
    p.add_argument("--delta", type=float, default=0.0)
    _common(p)
    p.set_defaults(func=cmd_ranges)

    p = sub.add_parser("kernel-profile", help="profile ratios of the homogeneous-kernel theta-integral")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--j-max", dest="j_max", type=int, default=30)
    _common(p)
    p.set_defaults(func=cmd_kernel_profile)

    p = sub.add_parser("dsm-bounds", help="normalised size of the d_sM kernel across r")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--s", type=float)
    p.add_argument("--seqs", default="constant:1;cesaro:16,2", help="';'-separated sequence specs")
    _common(p)
    p.set_defaults(func=cmd_dsm_bounds)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            report = args.func(args)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        _emit(report, args)
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        # downstream reader closed early, e.g. `| head`
        sys.stdout = open(os.devnull, "w")
        return 0
    return 0


if __name__ == "__main__":
    sys.exit(main())
