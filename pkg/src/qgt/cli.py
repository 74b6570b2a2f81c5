"""Command-line front end.

    qgt char       characters and principal specializations
    qgt kernel     one-step or multi-step kernel rows
    qgt sample     Monte Carlo chains down the graph
    qgt phi        limit functions, single or multivariate
    qgt verify     exact-identity suites
    qgt experiment convergence | lln | concentration | martin

Every command writes a report ``{config, rows, verdict}`` as JSON (sorted
keys) or CSV.  Exit status: 0 success, 1 verification failure or numeric
error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

import mpmath

from . import suites
from .arith import EvalConfig
from .chars import GroupType, NonnegSignature, Signature, bcd_eval, bcd_principal, group, schur_eval, schur_principal
from .contour import BoundaryPointA, BoundaryPointBC, QuadratureSpec, phiA, phiA_multivar, phiBCD, phiBCD_multivar
from .errors import QGTError
from .experiments import (
    canonical_sequence_A,
    canonical_sequence_BC,
    concentration_experiment,
    convergence_experiment,
    lln_experiment,
    martin_experiment,
)
from .graph import (
    BCGraph,
    SignSequence,
    SymmetricGraph,
    empirical_row,
    kernelA_multi_exact,
    kernelBC_step,
    sample_chains,
)


class UsageError(Exception):
    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError("argv", message)


# ---------------------------------------------------------------- parsing


def parse_rational(text: str, flag: str = "--q") -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(flag, f"expected a rational 'p/r', got {text!r}") from None


def parse_number(text: str, flag: str):
    """Rational when possible, otherwise complex ('1.3+0.2j')."""
    text = text.strip()
    if "j" in text:
        try:
            return complex(text)
        except ValueError:
            raise UsageError(flag, f"bad complex number {text!r}") from None
    return parse_rational(text, flag)


def parse_list(text: str | None, flag: str, conv=int) -> list:
    if text is None or text.strip() == "":
        return []
    try:
        return [conv(p) for p in text.split(",")]
    except ValueError:
        raise UsageError(flag, f"bad list {text!r}") from None


def parse_points(text: str, flag: str) -> list:
    return [parse_number(p, flag) for p in text.split(",")] if text else []


def parse_point_A(text: str) -> BoundaryPointA:
    """left:middle_csv:right@offset"""
    try:
        body, _, offset = text.partition("@")
        left, middle, right = body.split(":")
        return BoundaryPointA(int(left), tuple(parse_list(middle, "--point")), int(offset or 0), int(right))
    except (ValueError, UsageError):
        raise UsageError("--point", f"expected left:middle_csv:right@offset, got {text!r}") from None


def parse_point_BC(text: str) -> BoundaryPointBC:
    try:
        return BoundaryPointBC(tuple(parse_list(text, "--point")))
    except ValueError:
        raise UsageError("--point", f"expected a nondecreasing nonnegative list, got {text!r}") from None


def parse_sigma(text: str) -> SignSequence:
    try:
        return SignSequence.parse(text)
    except ValueError as exc:
        raise UsageError("--sigma", str(exc)) from None


def _family(text: str):
    return "A" if text.upper() == "A" else group(text)


def make_config(args) -> EvalConfig:
    q = parse_rational(args.q, "--q")
    sqrt_q = parse_rational(args.sqrt_q, "--sqrt-q") if args.sqrt_q else None
    try:
        return EvalConfig(q, sqrt_q, args.precision, args.mode)
    except ValueError as exc:
        raise UsageError("--q" if "q must" in str(exc) else "--sqrt-q", str(exc)) from None


def make_quad(args) -> QuadratureSpec:
    return QuadratureSpec(v_nodes=args.v_nodes, u_nodes_per_unit=args.u_nodes_per_unit, tol=args.quad_tol)


def _require_half_powers(cfg: EvalConfig, family) -> None:
    if family is GroupType.B and cfg.exact and cfg.sqrt_q is None:
        raise UsageError("--sqrt-q", "exact mode with type B needs q with a rational square root (or --sqrt-q)")


# ---------------------------------------------------------------- serialization


def _digits(bits: int) -> int:
    return max(15, int(bits * math.log10(2)))


def encode(value, bits: int):
    """Exact -> 'p/r'; real floats -> decimal string; complex -> [re, im]."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    # mpmath numbers from any context (the library uses private contexts)
    if hasattr(value, "_mpf_"):
        return mpmath.nstr(mpmath.mpf(value._mpf_), _digits(bits))
    if hasattr(value, "_mpc_"):
        re, im = value._mpc_
        return [mpmath.nstr(mpmath.mpf(re), _digits(bits)), mpmath.nstr(mpmath.mpf(im), _digits(bits))]
    if isinstance(value, complex):
        return [repr(value.real), repr(value.imag)]
    if isinstance(value, (Signature, tuple, list)):
        return [encode(v, bits) for v in value]
    if isinstance(value, dict):
        return {str(k): encode(v, bits) for k, v in value.items()}
    return str(value)


def sig_label(sig) -> str:
    return ",".join(map(str, sig))


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    for key in sorted(report["config"]):
        buf.write(f"# {key}={json.dumps(report['config'][key], sort_keys=True)}\n")
    buf.write(f"# verdict={report['verdict']}\n")
    rows = report["rows"]
    cols = sorted({k for r in rows for k in r})
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for r in rows:
        writer.writerow([json.dumps(r[c], sort_keys=True) if isinstance(r.get(c), (list, dict)) else r.get(c, "")
                         for c in cols])
    return buf.getvalue()


# ---------------------------------------------------------------- commands


def cmd_char(args, cfg):
    fam = _family(args.family)
    lam = parse_list(args.signature, "--signature")
    if args.principal:
        value = schur_principal(lam, len(lam), cfg) if fam == "A" else bcd_principal(fam, lam, cfg)
        points = "principal"
    else:
        pts = parse_points(args.points, "--points")
        if len(pts) != len(lam):
            raise UsageError("--points", f"{len(pts)} points for a signature of length {len(lam)}")
        if not cfg.exact or any(isinstance(p, complex) for p in pts):
            pts = [cfg.with_mode("float").num(p) for p in pts]
        value = schur_eval(Signature(lam), pts) if fam == "A" else bcd_eval(fam, NonnegSignature(lam), pts)
        points = args.points
    rows = [{"family": args.family.upper(), "signature": sig_label(lam), "points": points, "value": value}]
    return {"family": args.family.upper(), "signature": args.signature, "points": points,
            "principal": args.principal}, rows, True


def _graph(args):
    if args.graph == "symA":
        return SymmetricGraph(parse_sigma(args.sigma))
    if not args.group:
        raise UsageError("--group", "the bc graph needs --group B, C or D")
    return BCGraph(args.group)


def cmd_kernel(args, cfg):
    graph = _graph(args)
    lam = graph.signature(parse_list(args.signature, "--signature"))
    N = len(lam)
    k = N - 1 if args.k is None else args.k
    if not 1 <= k < N:
        raise UsageError("--k", f"need 1 <= k < {N}")
    if isinstance(graph, BCGraph):
        _require_half_powers(cfg, graph.G)
    if k == N - 1:
        row = kernelBC_step(graph.G, lam, cfg, args.method) if isinstance(graph, BCGraph) else graph.step_row(lam, cfg)
        how = "exact" if cfg.exact else "float"
    elif isinstance(graph, SymmetricGraph):
        row = kernelA_multi_exact(lam, k, graph.sigma, cfg)
        how = "exact" if cfg.exact else "float"
    else:
        row = empirical_row(sample_chains(graph, lam, k, args.samples, args.seed, cfg, threads=args.threads))
        how = "monte_carlo"
    rows = [{"mu": sig_label(mu), "mass": p if isinstance(p, Fraction) else getattr(p, "real", p)}
            for mu, p in row.items()]
    config = {"graph": graph.name, "signature": sig_label(lam), "k": k, "method": how}
    if how == "monte_carlo":
        config.update({"samples": args.samples, "seed": args.seed})
    return config, rows, True


def cmd_sample(args, cfg):
    graph = _graph(args)
    lam = graph.signature(parse_list(args.signature, "--signature"))
    if isinstance(graph, BCGraph):
        _require_half_powers(cfg, graph.G)
    if not 1 <= args.k < len(lam):
        raise UsageError("--k", f"need 1 <= k < {len(lam)}")
    found = sample_chains(graph, lam, args.k, args.chains, args.seed, cfg, keep_levels=args.keep_levels,
                          threads=args.threads)
    if args.keep_levels:
        rows = [{"chain": i, "levels": [sig_label(s) for s in chain]} for i, chain in enumerate(found)]
    else:
        counts = {}
        for mu in found:
            counts[mu] = counts.get(mu, 0) + 1
        rows = [{"mu": sig_label(mu), "count": c, "frequency": c / args.chains}
                for mu, c in sorted(counts.items(), key=lambda kv: tuple(kv[0]), reverse=True)]
    config = {"graph": graph.name, "signature": sig_label(lam), "k": args.k, "chains": args.chains,
              "seed": args.seed, "keep_levels": args.keep_levels}
    return config, rows, True


def cmd_phi(args, cfg):
    fam = _family(args.family)
    quad = make_quad(args)
    xs = [complex(x) for x in parse_points(args.x, "--x")]
    if not xs:
        raise UsageError("--x", "at least one point is required")
    if fam == "A":
        t = parse_point_A(args.point)
        value = phiA(t, xs[0], cfg, quad, args.continuation) if len(xs) == 1 else \
            phiA_multivar(t, xs, cfg, quad, args.continuation)
    else:
        y = parse_point_BC(args.point)
        value = phiBCD(fam, y, args.m, xs[0], cfg, quad, args.continuation) if len(xs) == 1 else \
            phiBCD_multivar(fam, y, xs, cfg, quad, args.continuation)
    rows = [{"x": [[repr(x.real), repr(x.imag)] for x in xs], "value": value}]
    config = {"family": args.family.upper(), "point": args.point, "m": args.m, "continuation": args.continuation,
              "quadrature": {"v_nodes": quad.v_nodes, "u_nodes_per_unit": quad.u_nodes_per_unit, "tol": quad.tol}}
    return config, rows, True


_VERIFY_LIMITS = {"contour-A": "max_n", "contour-BC": "max_n", "multivar": "max_n", "structural": "max_n",
                  "stochastic": "max_n", "multistep": "max_n"}


def cmd_verify(args, cfg):
    names = list(suites.SUITES) if args.suite == "all" else [args.suite]
    rows = []
    for name in names:
        kwargs = {}
        if args.max_n is not None and name in _VERIFY_LIMITS:
            kwargs["max_n"] = args.max_n
        if name in ("structural", "stochastic"):
            kwargs["seed"] = args.seed
        rows.extend(suites.SUITES[name](cfg, **kwargs))
    return {"suite": args.suite, "max_n": args.max_n, "seed": args.seed}, rows, suites.passed(rows)


def cmd_experiment(args, cfg):
    fam = _family(args.family)
    point = parse_point_A(args.point) if fam == "A" else parse_point_BC(args.point)
    sigma = parse_sigma(args.sigma)
    if fam != "A":
        _require_half_powers(cfg, fam)
    N_list = parse_list(args.N_list, "--N-list")
    kind = args.kind
    if kind == "convergence":
        xs = parse_points(args.xs, "--xs") or [Fraction(13, 10)] * args.k
        rep = convergence_experiment(fam, point, args.k, [complex(x) for x in xs], N_list or [10, 20, 40], cfg,
                                     make_quad(args), sigma=sigma, tol=args.tol)
    elif kind == "lln":
        rep = lln_experiment(fam, point, args.k_max, args.L, args.samples, args.seed, cfg, sigma=sigma,
                             threshold=args.threshold, threads=args.threads)
    elif kind == "concentration":
        rep = concentration_experiment(fam, point, args.k, N_list or list(range(5, 16)), args.samples, args.seed,
                                       cfg, sigma=sigma, bound=args.bound, threads=args.threads)
    else:
        rep = martin_experiment(fam, point, args.k, N_list or [16, 24, 32, 40], cfg, sigma=sigma, tol=args.tol,
                                samples=args.samples, seed=args.seed, threads=args.threads)
    rows = rep.rows + ([{"notes": rep.notes}] if rep.notes else [])
    config = {"experiment": kind, "parameters": rep.parameters}
    return config, rows, rep.verdict


def canonical(args, cfg):
    fam = _family(args.family)
    if fam == "A":
        lam = canonical_sequence_A(parse_point_A(args.point), parse_sigma(args.sigma), args.N)
    else:
        lam = canonical_sequence_BC(parse_point_BC(args.point), args.N)
    return {"family": args.family.upper(), "point": args.point, "N": args.N}, [{"signature": sig_label(lam)}], True


COMMANDS = {"char": cmd_char, "kernel": cmd_kernel, "sample": cmd_sample, "phi": cmd_phi, "verify": cmd_verify,
            "experiment": cmd_experiment, "canonical": canonical}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--q", default="1/2", help="q in (0, 1) as 'p/r' (default 1/2)")
    common.add_argument("--sqrt-q", default=None, help="exact square root of q, needed for type B in exact mode")
    common.add_argument("--mode", choices=("exact", "float"), default="exact", help="backend (default exact)")
    common.add_argument("--precision", type=int, default=256, help="float precision in bits (default 256)")
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--threads", type=int, default=1, help="worker cap for Monte Carlo (default 1)")
    common.add_argument("--output", default="-", help="report path, '-' for stdout (default)")
    common.add_argument("--format", choices=("json", "csv"), default="json", help="report format (default json)")
    common.add_argument("--v-nodes", type=int, default=64, help="strip quadrature: nodes on the vertical segment")
    common.add_argument("--u-nodes-per-unit", type=int, default=16, help="strip quadrature: density on the strip")
    common.add_argument("--quad-tol", type=float, default=1e-10, help="strip quadrature tolerance")

    parser = _Parser(prog="qgt", description="q-Gelfand-Tsetlin graphs: characters, kernels, limits, experiments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("char", parents=[common], help="evaluate a character")
    p.add_argument("--family", required=True, choices=("A", "B", "C", "D", "a", "b", "c", "d"))
    p.add_argument("--signature", required=True, help="comma-separated parts, largest first")
    p.add_argument("--points", default=None, help="comma-separated points (rationals or complex)")
    p.add_argument("--principal", action="store_true", help="evaluate at the principal q-specialization")

    for name, helptext in (("kernel", "kernel row out of a signature"), ("sample", "sample chains")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--graph", choices=("symA", "bc"), default="symA")
        p.add_argument("--group", choices=("B", "C", "D"), default=None)
        p.add_argument("--sigma", default="+-", help="sign pattern, e.g. '+-' or 'prefix|pattern' (default +-)")
        p.add_argument("--signature", required=True)
        p.add_argument("--k", type=int, default=None if name == "kernel" else 1, help="target level")
        if name == "kernel":
            p.add_argument("--method", choices=("factorized", "enumerate"), default="factorized")
            p.add_argument("--samples", type=int, default=100_000, help="Monte Carlo size for multi-step bc rows")
        else:
            p.add_argument("--chains", type=int, default=1)
            p.add_argument("--keep-levels", action="store_true")

    p = sub.add_parser("phi", parents=[common], help="evaluate a limit function")
    p.add_argument("--family", required=True, choices=("A", "B", "C", "D", "a", "b", "c", "d"))
    p.add_argument("--point", required=True, help="A: left:middle_csv:right@offset; B/C/D: head_csv")
    p.add_argument("--x", required=True, help="comma-separated points; several points give the multivariate form")
    p.add_argument("--m", type=int, default=0, help="single-variable index for B/C/D (default 0)")
    p.add_argument("--continuation", action="store_true", help="evaluate near excluded points by a circle mean")

    p = sub.add_parser("verify", parents=[common], help="run exact-identity suites")
    p.add_argument("--suite", required=True, choices=tuple(suites.SUITES) + ("all",))
    p.add_argument("--max-n", type=int, default=None, help="largest level (suite default when omitted)")

    p = sub.add_parser("experiment", parents=[common], help="run an experiment")
    p.add_argument("kind", choices=("convergence", "lln", "concentration", "martin"))
    p.add_argument("--family", required=True, choices=("A", "B", "C", "D", "a", "b", "c", "d"))
    p.add_argument("--point", required=True)
    p.add_argument("--sigma", default="+-")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--k-max", type=int, default=3)
    p.add_argument("--L", type=int, default=20)
    p.add_argument("--xs", default=None)
    p.add_argument("--N-list", default=None)
    p.add_argument("--samples", type=int, default=5000)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--bound", type=float, default=20.0)
    p.add_argument("--threshold", type=float, default=0.99)

    p = sub.add_parser("canonical", parents=[common], help="canonical stabilizing signature at level N")
    p.add_argument("--family", required=True, choices=("A", "B", "C", "D", "a", "b", "c", "d"))
    p.add_argument("--point", required=True)
    p.add_argument("--sigma", default="+-")
    p.add_argument("--N", type=int, required=True)
    return parser


def _effective_config(args, cfg: EvalConfig) -> dict:
    return {"command": args.command, "q": str(cfg.q), "sqrt_q": None if cfg.sqrt_q is None else str(cfg.sqrt_q),
            "mode": cfg.mode, "precision_bits": cfg.float_precision_bits, "seed": args.seed,
            "threads": args.threads, "format": args.format}


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        cfg = make_config(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return 0 if exc.code in (0, None) else 2
    try:
        extra, rows, ok = COMMANDS[args.command](args, cfg)
        verdict = "pass" if ok else "fail"
        code = 0 if ok else 1
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (QGTError, ArithmeticError, ValueError) as exc:
        name = type(exc).__name__
        print(f"{name}: {exc}", file=sys.stderr)
        extra, rows, verdict, code = {}, [], f"error: {name}: {exc}", 1
    config = {**_effective_config(args, cfg), **extra}
    bits = cfg.float_precision_bits
    report = {"config": encode(config, bits), "rows": [encode(r, bits) for r in rows], "verdict": verdict}
    text = render(report, args.format)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
