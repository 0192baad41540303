"""Command-line front end.

Data goes to stdout, diagnostics to stderr. Exit codes: 0 success,
1 evaluation or bound failure, 2 invalid input.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import harness, shapes
from .errors import BudgetExceeded, GeometryError, PolyffError
from .mesh import Polygon, detect_symmetry, dumps, load, scale
from .polygon import EvalConfig, ff_polygon
from .polyhedron import ff_polyhedron


def _floats(text: str, sizes) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if len(vals) not in sizes:
        raise argparse.ArgumentTypeError(f"expected {' or '.join(map(str, sizes))} numbers, got {len(vals)}")
    return vals


def vec3(text):
    return _floats(text, (3,))


def vec3or6(text):
    return _floats(text, (3, 6))


def _shape(spec: str):
    """A shape file, or the name of a built-in shape with default parameters."""
    if Path(spec).exists():
        return load(spec)
    if spec in shapes.SUITE:
        return shapes.suite()[spec]
    if spec in shapes.CONSTRUCTORS:
        return shapes.make(spec)
    raise GeometryError(f"no shape file or built-in shape named {spec!r}")


def _config(args) -> EvalConfig:
    return EvalConfig(args.threshold_c, args.threshold_cpar, args.threshold_C, args.max_order)


def _q(args) -> np.ndarray:
    q = np.array(args.q, dtype=complex)
    if args.qi is not None:
        q = q + 1j * np.array(args.qi)
    return q


def _evaluate(fig, q, cfg, symmetric: bool):
    pairing = detect_symmetry(fig) if symmetric else None
    if isinstance(fig, Polygon):
        return ff_polygon(q, fig, cfg, pairing)
    return ff_polyhedron(q, fig, cfg, pairing)


def fmt_complex(z: complex) -> str:
    sign = "-" if np.signbit(z.imag) else "+"
    return f"{z.real!r} {sign} {abs(z.imag)!r}i"


def cmd_ff(args) -> int:
    fig = _shape(args.shape)
    res = _evaluate(fig, _q(args), _config(args), not args.no_symmetry)
    print(f"{fmt_complex(res.value)}, method={res.method.name}, terms={res.terms_used}")
    return 0


def cmd_sweep(args) -> int:
    fig = _shape(args.shape)
    cfg = _config(args)
    d = np.array(args.qdir[:3], dtype=complex)
    if len(args.qdir) == 6:
        d = d + 1j * np.array(args.qdir[3:])
    d = d / np.sqrt(np.sum(np.abs(d) ** 2))
    if args.log and args.qmin <= 0:
        print("error: --qmin must be positive for a log grid", file=sys.stderr)
        return 2
    if args.points == 1:
        grid = np.array([args.qmin])
    elif args.log:
        grid = np.logspace(np.log10(args.qmin), np.log10(args.qmax), args.points)
    else:
        grid = np.linspace(args.qmin, args.qmax, args.points)
    symmetric = not args.no_symmetry
    out = ["q,re,im,abs,method,terms"]
    for m in map(float, grid):
        res = _evaluate(fig, m * d, cfg, symmetric)
        v = res.value
        out.append(f"{m!r},{v.real!r},{v.imag!r},{abs(v)!r},{res.method.name},{res.terms_used}")
    print("\n".join(out))
    return 0


def cmd_validate(args) -> int:
    try:
        fig = load(args.shape)
    except GeometryError as exc:
        print(f"invalid: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    info = {"name": fig.name, "vertices": len(fig.vertices), "a": fig.a}
    if isinstance(fig, Polygon):
        info.update(kind="polygon", area=fig.area)
    else:
        d = fig.diagnostics
        info.update(kind="polyhedron", faces=len(fig.faces), volume=fig.volume, closure_residual=d.closure_residual)
    sym = detect_symmetry(fig)
    info["symmetry"] = None if sym is None else sym.kind
    print(json.dumps(info, indent=1))
    return 0


def _param(text: str):
    key, sep, val = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        num = float(val)
    except ValueError:
        return key, val
    return key, int(num) if key == "J" else num


def cmd_make(args) -> int:
    fig = shapes.make(args.name, **dict(args.param))
    if args.circumradius is not None:
        fig = scale(fig, args.circumradius / fig.a)
    text = dumps(fig)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return 0


def cmd_selftest(args) -> int:
    report = harness.selftest(args.suite, _config(args))
    if args.json:
        print(harness.report_json(report))
    else:
        for name, r in report.items():
            for row in r["rows"]:
                extra = ""
                if name == "continuity":
                    extra = f"  q={row['q_threshold']!r} {row['method_below']}/{row['terms_below']} -> {row['method_above']}/{row['terms_above']}"
                print(f"{name}\t{row['delta']:.3e}\t{row['label']}{extra}")
            status = "PASS" if r["passed"] else "FAIL"
            print(f"{status} {name}: worst delta {r['worst']:.3e} (bound {r['bound']:.0e}) at {r['offender']}")
    failed = [n for n, r in report.items() if not r["passed"]]
    for n in failed:
        print(f"{n} bound exceeded by {report[n]['offender']}", file=sys.stderr)
    return 1 if failed else 0


def cmd_oracle(args) -> int:
    from . import oracle

    fig = _shape(args.shape)
    q = _q(args)
    lib = _evaluate(fig, q, _config(args), False).value
    if isinstance(fig, Polygon):
        ref = oracle.quad_polygon(q, fig, args.tol)
    elif args.mc:
        ref = oracle.mc_polyhedron(q, fig, args.mc, args.seed)
    else:
        ref = oracle.quad_polyhedron(q, fig, args.tol)
    dev = abs(lib - ref.value) / max(abs(ref.value), 1e-300)
    print("library,oracle,rel_deviation,est_error")
    print(f"{fmt_complex(lib)},{fmt_complex(ref.value)},{dev!r},{ref.est_error!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polyff", description="Form factors of polygons and polyhedra.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, q=True):
        sp.add_argument("--shape", required=True, help="shape file (JSON) or built-in shape name")
        if q:
            sp.add_argument("--q", type=vec3, default=[0.0, 0.0, 0.0], help="real part of q: qx,qy,qz")
            sp.add_argument("--qi", type=vec3, default=None, help="imaginary part of q")

    def thresholds(sp):
        d = EvalConfig()
        sp.add_argument("--threshold-c", type=float, default=d.c)
        sp.add_argument("--threshold-cpar", type=float, default=d.c_par)
        sp.add_argument("--threshold-C", type=float, default=d.C)
        sp.add_argument("--max-order", type=int, default=d.max_order)

    sp = sub.add_parser("ff", help="evaluate at one wavevector")
    common(sp)
    thresholds(sp)
    sp.add_argument("--no-symmetry", action="store_true", help="skip the inversion-symmetry fast path")
    sp.set_defaults(func=cmd_ff)

    sp = sub.add_parser("sweep", help="CSV along a ray q = t * qdir")
    common(sp, q=False)
    sp.add_argument("--qdir", type=vec3or6, required=True, help="direction: re3 or re3,im3")
    sp.add_argument("--qmin", type=float, required=True)
    sp.add_argument("--qmax", type=float, required=True)
    sp.add_argument("--points", type=int, default=100)
    sp.add_argument("--log", action="store_true", help="log-spaced grid")
    sp.add_argument("--no-symmetry", action="store_true")
    thresholds(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("validate", help="check a shape file")
    sp.add_argument("--shape", required=True)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("make", help="write a built-in shape as a shape file")
    sp.add_argument("name", choices=sorted(shapes.CONSTRUCTORS))
    sp.add_argument("--param", type=_param, action="append", default=[], metavar="KEY=VALUE")
    sp.add_argument("--circumradius", type=float, default=None, help="rescale to this circumradius")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_make)

    sp = sub.add_parser("selftest", help="run internal-consistency suites")
    sp.add_argument("suite", choices=harness.SUITES + ("all",))
    sp.add_argument("--json", action="store_true")
    thresholds(sp)
    sp.set_defaults(func=cmd_selftest)

    sp = sub.add_parser("oracle", help="compare against direct numerical integration")
    common(sp)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--mc", type=int, default=0, help="use Monte Carlo with this many samples")
    sp.add_argument("--seed", type=int, default=0)
    thresholds(sp)
    sp.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (GeometryError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except PolyffError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
