"""Command-line interface: gen, verify, example, ode, sweep.

Exit status: 0 when every check passes, 1 when a check fails, 2 on input
errors (unparsable files, inadmissible parameters, invalid ODE data).
"""
from __future__ import annotations

import argparse
import ast
import json
import math
import operator
import sys
from pathlib import Path

import numpy as np

from .body import Ball, Body, make_cutthetip, random_body
from .comparison import integrate, make_profile, ode_compare
from .errors import BodyFileError, RadboundError
from .spaceform import SpaceForm
from .verify import (
    BOUNDARY_SAMPLES, CHAIN_TOL, default_radius_range, rows_to_csv, sweep,
    sweep_plan, verify_body,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
DEMO_SEED = 0


# --- body files -------------------------------------------------------------

def _num(x) -> str:
    return "%.17g" % x


def format_body(body: Body) -> str:
    lines = ["{", f'  "kappa": {body.sf.kappa},', f'  "dim": {body.sf.dim},', '  "balls": [']
    for i, b in enumerate(body.balls):
        center = ", ".join(_num(c) for c in b.center)
        sep = "," if i + 1 < body.n_balls else ""
        lines.append(f'    {{"center": [{center}], "radius": {_num(b.radius)}}}{sep}')
    lines += ["  ]", "}"]
    return "\n".join(lines) + "\n"


def _is_number(x):
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def parse_body(text: str) -> Body:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise BodyFileError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise BodyFileError("top level must be an object with kappa, dim, balls")
    for key in ("kappa", "dim", "balls"):
        if key not in doc:
            raise BodyFileError(f"missing field '{key}'")
    kappa, dim, balls = doc["kappa"], doc["dim"], doc["balls"]
    if kappa not in (0, 1) or isinstance(kappa, bool):
        raise BodyFileError(f"kappa: must be 0 or 1, got {kappa!r}")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 2:
        raise BodyFileError(f"dim: must be an integer >= 2, got {dim!r}")
    if not isinstance(balls, list) or not balls:
        raise BodyFileError("balls: must be a nonempty list")
    sf = SpaceForm(kappa, dim)
    out = []
    for i, b in enumerate(balls):
        if not isinstance(b, dict) or "center" not in b or "radius" not in b:
            raise BodyFileError(f"balls[{i}]: needs 'center' and 'radius'")
        c, r = b["center"], b["radius"]
        if not isinstance(c, list) or len(c) != sf.ambient or not all(_is_number(x) for x in c):
            raise BodyFileError(f"balls[{i}].center: must be {sf.ambient} numbers")
        if not _is_number(r):
            raise BodyFileError(f"balls[{i}].radius: must be a number")
        out.append(Ball(np.array(c, dtype=float), float(r)))
    try:
        return Body(sf, tuple(out))
    except RadboundError as e:
        raise BodyFileError(f"balls: {e}") from None


def read_body(path) -> Body:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise BodyFileError(f"{path}: {e.strerror}") from None
    return parse_body(text)


# --- forcing expressions ------------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_FUNCS = {"sin": math.sin, "cos": math.cos, "exp": math.exp, "sqrt": math.sqrt,
          "log": math.log, "abs": abs, "tanh": math.tanh}
_CONSTS = {"pi": math.pi, "e": math.e}


def parse_forcing(expr: str):
    """Compile an arithmetic expression in ``t`` into a function of t."""
    try:
        tree = ast.parse(expr, mode="eval").body
    except SyntaxError as e:
        raise RadboundError(f"forcing: {e.msg}") from None

    def check(node):
        if isinstance(node, ast.Constant) and _is_number(node.value):
            return
        if isinstance(node, ast.Name) and (node.id == "t" or node.id in _CONSTS):
            return
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            check(node.left)
            check(node.right)
            return
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            check(node.operand)
            return
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords):
            check(node.args[0])
            return
        raise RadboundError(f"forcing: unsupported expression element {ast.dump(node)[:40]}")

    check(tree)

    def ev(node, t):
        if isinstance(node, ast.Constant):
            return float(node.value)
        if isinstance(node, ast.Name):
            return t if node.id == "t" else _CONSTS[node.id]
        if isinstance(node, ast.BinOp):
            return _BINOPS[type(node.op)](ev(node.left, t), ev(node.right, t))
        if isinstance(node, ast.UnaryOp):
            v = ev(node.operand, t)
            return -v if isinstance(node.op, ast.USub) else v
        return _FUNCS[node.func.id](ev(node.args[0], t))

    return lambda t: ev(tree, float(t))


# --- commands ---------------------------------------------------------------

def _write(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _radius_range(args, kappa, A):
    lo, hi = default_radius_range(kappa, A)
    rmin = args.radius_min if args.radius_min is not None else lo
    rmax = args.radius_max if args.radius_max is not None else hi
    if rmax > hi + 1e-15:
        raise RadboundError(
            f"radius range ({rmin}, {rmax}] exceeds the model radius {hi:.17g} for A={A}: "
            "generated bodies would not certify the base-angle bound")
    return rmin, rmax


def _ball_range(text):
    parts = str(text).split(":")
    try:
        lo, hi = (int(parts[0]), int(parts[-1]))
    except ValueError:
        raise RadboundError(f"--balls: expected N or LO:HI, got {text!r}") from None
    if not 1 <= lo <= hi:
        raise RadboundError(f"--balls: need 1 <= LO <= HI, got {text!r}")
    return lo, hi


def cmd_gen(args) -> int:
    A = args.target_A[0]
    rmin, rmax = _radius_range(args, args.kappa, A)
    lo, hi = _ball_range(args.balls)
    rng = np.random.default_rng(DEMO_SEED if args.seed is None else args.seed)
    sf = SpaceForm(args.kappa, args.dim[0])
    texts = []
    for _ in range(args.count):
        n = int(rng.integers(lo, hi + 1))
        texts.append(format_body(random_body(sf, n, rmin, rmax, rng)))
    if args.count == 1 or not args.out:
        _write("".join(texts), args.out)
    else:
        out = Path(args.out)
        for i, t in enumerate(texts):
            (out.parent / f"{out.stem}_{i:04d}{out.suffix or '.json'}").write_text(t)
    return EXIT_OK


def _emit_report(report, args) -> int:
    if args.format == "csv":
        s = report.summary
        row = [0, report.seed, report.body["kappa"], report.body["dim"], len(report.body["balls"]),
               s.A, s.a, s.rad, s.b, s.bound, s.model_R, report.chain.passed, report.profile.passed]
        _write(rows_to_csv([row]), args.out)
    else:
        _write(report.to_json(timings=args.timings) + "\n", args.out)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_verify(args) -> int:
    body = read_body(args.body)
    report = verify_body(body, seed=DEMO_SEED if args.seed is None else args.seed,
                         tol=args.tol, samples=args.samples)
    return _emit_report(report, args)


def cmd_example(args) -> int:
    body = make_cutthetip(args.A, args.a, args.eps)
    report = verify_body(body, seed=DEMO_SEED if args.seed is None else args.seed,
                         tol=args.tol, samples=args.samples)
    return _emit_report(report, args)


def cmd_ode(args) -> int:
    g = parse_forcing(args.forcing)
    t, f = integrate(args.kappa, args.f0, args.df0, g, args.horizon, args.step)
    prof = make_profile(args.kappa, t, f, args.f0, args.df0)
    res = ode_compare(prof)
    doc = {
        "kappa": args.kappa, "f0": args.f0, "df0": args.df0, "forcing": args.forcing,
        "horizon": args.horizon, "status": res.status, "worst_residual": res.worst_residual,
        "worst_t": res.worst_t, "t0": res.t0 if math.isfinite(res.t0) else None,
        "hypothesis_margin": res.hypothesis_margin,
    }
    _write(json.dumps(doc, indent=2) + "\n", args.out)
    return {"pass": EXIT_OK, "fail": EXIT_FAIL}.get(res.status, EXIT_INPUT)


def cmd_sweep(args) -> int:
    if args.seed is None:
        raise RadboundError("sweep needs an explicit --seed")
    lo, hi = _ball_range(args.balls)
    for A in args.target_A:
        _radius_range(args, args.kappa, A)
    plan = sweep_plan(args.kappa, args.dim, args.target_A, args.count, args.seed, (lo, hi),
                      args.radius_min, args.radius_max)
    rows = sweep(plan, workers=args.workers, samples=args.samples, tol=args.tol)
    _write(rows_to_csv(rows), args.out)
    return EXIT_OK if all(r[-1] and r[-2] for r in rows) else EXIT_FAIL


def _floats(text):
    return [float(x) for x in str(text).split(",")]


def _ints(text):
    return [int(x) for x in str(text).split(",")]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="radbound", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--tol", type=float, default=CHAIN_TOL)
        sp.add_argument("--samples", type=int, default=BOUNDARY_SAMPLES,
                        help="boundary samples seeding the global radius solve")
        sp.add_argument("--out", default=None)

    def generation(sp):
        sp.add_argument("--kappa", type=int, choices=(0, 1), default=0)
        sp.add_argument("--dim", type=_ints, default=[2], help="dimension, or comma list for sweep")
        sp.add_argument("--balls", default="2:4", help="ball count N or range LO:HI")
        sp.add_argument("--radius-min", type=float, default=None)
        sp.add_argument("--radius-max", type=float, default=None)
        sp.add_argument("--target-A", type=_floats, default=[1.0],
                        help="base-angle target, or comma list for sweep")
        sp.add_argument("--count", type=int, default=1)

    g = sub.add_parser("gen", help="write random body files")
    common(g)
    generation(g)
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("verify", help="run every check on a body file")
    v.add_argument("body")
    common(v)
    v.add_argument("--format", choices=("report", "csv"), default="report")
    v.add_argument("--timings", action="store_true", help="include runtimes in the report")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("example", help="verify the three-ball body with a cut tip")
    e.add_argument("--A", type=float, default=1.0)
    e.add_argument("--a", type=float, default=0.5)
    e.add_argument("--eps", type=float, default=0.1)
    common(e)
    e.add_argument("--format", choices=("report", "csv"), default="report")
    e.add_argument("--timings", action="store_true")
    e.set_defaults(func=cmd_example)

    o = sub.add_parser("ode", help="integrate f'' + kappa f = forcing and run the comparison")
    o.add_argument("--kappa", type=int, choices=(0, 1), default=1)
    o.add_argument("--f0", type=float, default=0.0)
    o.add_argument("--df0", type=float, default=0.0)
    o.add_argument("--forcing", default="1")
    o.add_argument("--horizon", type=float, default=3.0)
    o.add_argument("--step", type=float, default=1e-3)
    o.add_argument("--out", default=None)
    o.set_defaults(func=cmd_ode)

    s = sub.add_parser("sweep", help="chain results for a seeded batch of random bodies, as CSV")
    common(s)
    generation(s)
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_sweep, count=100)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        return args.func(args)
    except RadboundError as e:
        print(f"radbound {args.command}: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
