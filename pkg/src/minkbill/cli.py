"""Command-line front end: ``minkbill <command> ...``.

Exit status is 0 on success, 2 for invalid input (one-line reason on stderr)
and 1 for internal errors.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import capacity as cap
from . import figures, flow, products
from .errors import BilliardError, CornerHit, InternalError, UndefinedCone, UnfoldUnsupported
from .geometry import DEFAULT_EPS, read_polygon

EXIT_OK, EXIT_INTERNAL, EXIT_INVALID = 0, 1, 2


class UsageError(Exception):
    """Invalid command-line input; reported with exit status 2."""


@dataclass
class RunReport:
    command: list
    seed: int
    inputs: dict = field(default_factory=dict)  # path -> sha256
    results: dict = field(default_factory=dict)
    method: str | None = None
    wall_time: float = 0.0

    def to_dict(self) -> dict:
        out = {"command": self.command, "seed": self.seed, "inputs": self.inputs}
        if self.method is not None:
            out["method"] = self.method
        out.update(self.results)
        out["wall_time"] = self.wall_time
        return out


def fmt(x: float) -> str:
    return f"{x:.10f}"


def _digest(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _polygon(report: RunReport, path: str, eps: float):
    P = read_polygon(path, eps)
    report.inputs[path] = _digest(path)
    return P


def _pair(text: str, what: str) -> np.ndarray:
    try:
        x, y = (float(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"{what} must be 'x,y', got {text!r}") from None
    return np.array([x, y])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


# ---------------------------------------------------------------------------
# commands; each returns the lines to print in plain mode


def cmd_capacity(args, report):
    K = _polygon(report, args.k, args.eps)
    T = _polygon(report, args.t, args.eps)
    if args.method == "exact":
        res = cap.min_curve_exact(K, T)
    else:
        res = cap.min_curve_grid(K, T, args.grid_n)
    report.method = res.method
    report.results.update(res.to_dict())
    report.results["systolic_ratio"] = cap.systolic_ratio(K, T, res.value)
    return [fmt(res.value)]


def cmd_systole(args, report):
    K = _polygon(report, args.k, args.eps)
    T = _polygon(report, args.t, args.eps)
    res = cap.min_curve_exact(K, T)
    s = cap.systolic_ratio(K, T, res.value)
    report.method = res.method
    report.results.update(res.to_dict())
    report.results["systolic_ratio"] = s
    return [fmt(s)]


def _trajectory(args, report):
    K = _polygon(report, args.k, args.eps)
    T = _polygon(report, args.t, args.eps)
    q0 = _pair(args.q0, "--q0")
    p0 = _pair(args.p0, "--p0") if args.p0 else None
    d = _pair(args.dir, "--dir") if args.dir else None
    s0 = flow.initial_state(K, T, q0, direction=d, p0=p0)
    return K, T, flow.simulate(K, T, s0, args.max_bounces, on_corner="record")


def cmd_simulate(args, report):
    K, T, tr = _trajectory(args, report)
    report.results["trajectory"] = tr.to_dict()
    lines = [f"verdict {tr.verdict}"]
    if tr.periodic:
        lines += [f"period {tr.period}", f"tlength {fmt(tr.tlength)}", f"action {fmt(tr.action)}"]
    elif tr.verdict == "corner-hit":
        lines.append(f"step {tr.step}")
    if args.svg:
        if len(tr.q) < 2:
            raise UsageError("trajectory has fewer than two bounce points; nothing to draw")
        figures.trajectory(K, tr.q, T, tr.p).write(args.svg)
        lines.append(f"svg {args.svg}")
    return lines


def cmd_classes(args, report):
    K = _polygon(report, args.k, args.eps)
    T = _polygon(report, args.t, args.eps)
    rep = flow.length_classes(K, T, args.starts, args.seed, include_midpoints=args.midpoints)
    rows = [(c.period, c.tlength, c.count) for c in rep.classes]
    report.results.update(
        {
            "classes": [{"period": p, "tlength": t, "count": n} for p, t, n in rows],
            "corner_hits": rep.corner_hits,
            "open": rep.open_orbits,
        }
    )
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["period", "tlength", "count"])
            for p, t, n in rows:
                w.writerow([p, repr(t), n])
    lines = ["period,tlength,count"] + [f"{p},{fmt(t)},{n}" for p, t, n in rows]
    lines.append(f"corner_hits {rep.corner_hits}")
    return lines


def cmd_sweep(args, report):
    polys = [_polygon(report, getattr(args, a), args.eps) for a in ("lk", "lt", "ck", "ct")]
    res = cap.interpolation_sweep(*polys, steps=args.steps)
    report.results.update(
        {
            "table": [{"lambda": lam, "sys": s} for lam, s in res.table],
            "root": res.root,
            "sys_at_root": res.sys_at_root,
            "bracket": list(res.bracket),
        }
    )
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["lambda", "sys"])
            for lam, s in res.table:
                w.writerow([repr(lam), repr(s)])
    lines = ["lambda,sys"] + [f"{fmt(lam)},{fmt(s)}" for lam, s in res.table]
    lines += [f"root {fmt(res.root)}", f"sys_at_root {fmt(res.sys_at_root)}"]
    return lines


def _exponent(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"exponent must be a number or 'inf', got {text!r}") from None


def cmd_products(args, report):
    if args.what == "factor":
        v = products.volume_factor(args.m, args.n, _exponent(args.p))
        report.results["volume_factor"] = v
        return [fmt(v)]
    if args.what == "kntn":
        fam = products.construct_KnTn(args.n)
        report.results.update(fam.to_dict())
        return [
            f"n {fam.n}",
            f"l {fmt(fam.l)}",
            f"vol_K {fmt(fam.K.volume)}",
            f"vol_T {fmt(fam.T.volume)}",
            f"predicted_sys {fmt(fam.predicted_sys)}",
            f"sys_from_volumes {fmt(fam.sys_from_volumes)}",
            "capacity asserted",
        ]
    spec = products.read_spec(args.spec)
    report.inputs[args.spec] = _digest(args.spec)
    mc = products.mc_volume(spec, args.samples, args.seed)
    report.results.update(mc.to_dict())
    report.results["analytic_volume"] = spec.volume
    return [
        f"estimate {fmt(mc.estimate)}",
        f"ci99 {fmt(mc.low)} {fmt(mc.high)}",
        f"analytic {fmt(spec.volume)}",
    ]


def cmd_figure(args, report):
    kind = args.kind
    if kind == "product-pair":
        fig = figures.emit_figure(kind, K=_polygon(report, args.k, args.eps), T=_polygon(report, args.t, args.eps))
    elif kind in ("trajectory", "unfolding"):
        if not args.q0:
            raise UsageError(f"figure {kind} needs --q0 and --dir or --p0")
        K, T, tr = _trajectory(args, report)
        if not tr.periodic:
            raise UsageError(f"orbit is not periodic ({tr.verdict})")
        if kind == "trajectory":
            fig = figures.emit_figure(kind, K=K, q=tr.q, T=T, p=tr.p)
        else:
            u = flow.unfold(K, tr)
            fig = figures.emit_figure(kind, copies=u.copies, points=u.points)
    else:
        K = _polygon(report, args.k, args.eps)
        T = _polygon(report, args.t, args.eps)
        curves = minimal_family(K, T)
        fig = figures.emit_figure(kind, K=K, curves=curves)
    fig.write(args.out)
    report.results.update({"svg": args.out, "paths": fig.paths, "polylines": fig.polylines})
    return [f"svg {args.out}", f"paths {fig.paths}", f"polylines {fig.polylines}"]


def minimal_family(K, T, per_class: int = 3) -> list:
    """Minimal curves of every vertex-to-edge and edge-to-edge 2-cycle class attaining the capacity."""
    best = cap.min_curve_exact(K, T)
    tie = 1e-9 * K.scale * T.scale
    curves = [best.minimizer.points]
    for slots in cap.two_cycle_classes(K):
        lam, vals = cap._class_minimum(T, slots)
        if not len(vals) or vals.min() > best.value + tie:
            continue
        pts = cap._slots_points(slots, lam[vals <= best.value + tie])
        for c in pts[:: max(1, len(pts) // per_class)][:per_class]:
            if not any(len(c) == len(d) and np.allclose(c, d) for d in curves):
                curves.append(c)
    return curves


# ---------------------------------------------------------------------------
# parser


def _add_globals(p: argparse.ArgumentParser, suppress: bool):
    dflt = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)  # noqa: E731
    p.add_argument("--json", action="store_true", default=dflt(False), help="print a JSON report")
    p.add_argument("--seed", type=int, default=dflt(0), help="seed for randomized commands (default 0)")
    p.add_argument("--eps", type=float, default=dflt(DEFAULT_EPS), help="geometric tolerance")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="minkbill", description="Minkowski billiards and EHZ capacities of K x T.")
    _add_globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    _add_globals(common, suppress=True)

    def body_pair(p):
        p.add_argument("--k", required=True, help="polygon JSON for K")
        p.add_argument("--t", required=True, help="polygon JSON for T")

    def start(p, required):
        p.add_argument("--q0", required=required, help="start point on the boundary of K, 'x,y'")
        g = p.add_mutually_exclusive_group()
        g.add_argument("--dir", help="initial direction; p0 becomes the midpoint of the best-aligned T edge")
        g.add_argument("--p0", help="initial momentum on the boundary of T, 'x,y'")
        p.add_argument("--max-bounces", type=int, default=10000)

    p = sub.add_parser("capacity", parents=[common], help="EHZ capacity of K x T")
    body_pair(p)
    p.add_argument("--method", choices=("exact", "grid"), default="exact")
    p.add_argument("--grid-n", type=int, default=200, help="samples per edge for --method grid")
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("systole", parents=[common], help="systolic ratio of K x T")
    body_pair(p)
    p.set_defaults(func=cmd_systole)

    p = sub.add_parser("simulate", parents=[common], help="run the billiard flow from one start")
    body_pair(p)
    start(p, True)
    p.add_argument("--svg", help="write the orbit as SVG")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("classes", parents=[common], help="cluster orbit lengths over random starts")
    body_pair(p)
    p.add_argument("--starts", type=int, default=200)
    p.add_argument("--midpoints", action="store_true", help="also run the edge-midpoint starts")
    p.add_argument("--out", help="CSV output (period,tlength,count)")
    p.set_defaults(func=cmd_classes)

    p = sub.add_parser("sweep", parents=[common], help="systolic ratio along a Minkowski interpolation")
    for name in ("lk", "lt", "ck", "ct"):
        p.add_argument(f"--{name}", required=True)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--out", help="CSV output (lambda,sys)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("products", parents=[common], help="p-product bookkeeping")
    psub = p.add_subparsers(dest="what", required=True)
    q = psub.add_parser("factor", parents=[common], help="volume factor of an m- and n-dimensional p-product")
    q.add_argument("m", type=int)
    q.add_argument("n", type=int)
    q.add_argument("p")
    q = psub.add_parser("kntn", parents=[common], help="the K_n x T_n family")
    q.add_argument("--n", type=int, required=True)
    q = psub.add_parser("mcvol", parents=[common], help="Monte-Carlo volume of a product spec")
    q.add_argument("--spec", required=True)
    q.add_argument("--samples", type=int, default=10**6)
    p.set_defaults(func=cmd_products)

    p = sub.add_parser("figure", parents=[common], help="write an SVG figure")
    p.add_argument("kind", choices=figures.KINDS)
    p.add_argument("--k", required=True)
    p.add_argument("--t", required=True)
    start(p, False)
    p.add_argument("--out", required=True, help="SVG output path")
    p.set_defaults(func=cmd_figure)
    return parser


def _fail(code: int, message: str) -> int:
    print(f"minkbill: error: {' '.join(str(message).split())}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    report = RunReport(command=list(sys.argv[1:] if argv is None else argv), seed=args.seed)
    t0 = time.perf_counter()
    try:
        lines = args.func(args, report)
    except (UsageError, CornerHit, UndefinedCone, UnfoldUnsupported) as exc:
        return _fail(EXIT_INVALID, exc)
    except InternalError as exc:
        return _fail(EXIT_INTERNAL, f"internal error: {exc}")
    except (BilliardError, ValueError) as exc:
        return _fail(EXIT_INVALID, exc)
    except OSError as exc:
        return _fail(EXIT_INVALID, f"{exc.filename or ''}: {exc.strerror or exc}")
    except Exception as exc:  # noqa: BLE001
        return _fail(EXIT_INTERNAL, f"internal error: {type(exc).__name__}: {exc}")
    report.wall_time = time.perf_counter() - t0
    if args.json:
        print(json.dumps(_jsonable(report.to_dict()), indent=2))
    else:
        print("\n".join(lines))
    return EXIT_OK
