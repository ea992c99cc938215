"""Command-line entry point: ``dirpoly <group> <command> [options]``."""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import platform
import sys
import time
from fractions import Fraction
from math import factorial
from typing import Any, List, Optional, Sequence

from . import __version__
from .exactnum import PiecewisePoly, Poly, format_rational, rational_to_json

FORMATS = ("json", "csv", "latex")


# ---------------------------------------------------------------------------
# serialization


def _default(o: Any):
    if isinstance(o, Fraction):
        return rational_to_json(o)
    if hasattr(o, "item"):
        return o.item()
    if hasattr(o, "tolist"):
        return o.tolist()
    if hasattr(o, "to_json"):
        return o.to_json()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def to_json_text(obj: Any) -> str:
    return json.dumps(obj, default=_default, separators=(",", ":")) + "\n"


def _cell(v: Any) -> Any:
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, (list, tuple, dict)):
        return json.dumps(v, default=_default, separators=(",", ":"))
    return v


def to_csv_text(rows: Sequence[dict]) -> str:
    import csv
    import io
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\r\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _cell(v) for k, v in r.items()})
    return buf.getvalue()


def latex_poly(p: Poly, var: str = r"\alpha") -> str:
    terms = []
    for i in range(p.degree, -1, -1):
        c = p.coeffs[i]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        num = (f"{a.numerator}" if a.denominator == 1
               else rf"\frac{{{a.numerator}}}{{{a.denominator}}}")
        if i == 0:
            body = num
        else:
            power = var if i == 1 else f"{var}^{{{i}}}"
            body = power if a == 1 else num + power
        terms.append((sign, body))
    if not terms:
        return "0"
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        out += sign + body
    return out


def latex_piecewise(f: PiecewisePoly, lhs: str) -> str:
    lines = []
    for a, b, p in f.segments():
        lines.append(rf"  {latex_poly(p)} & \text{{if }} {format_rational(a)} \le \alpha < {format_rational(b)} \\")
    if f.breakpoints:
        last = format_rational(f.breakpoints[-1])
        lines.append(rf"  {latex_poly(f.tail)} & \text{{if }} {last} \le \alpha")
    body = "\n".join(lines)
    return f"{lhs} = \\begin{{cases}}\n{body}\n\\end{{cases}}\n"


def piecewise_rows(f: PiecewisePoly) -> List[dict]:
    rows = []
    segs = [(a, b, p) for a, b, p in f.segments()]
    if f.breakpoints:
        segs.append((f.breakpoints[-1], None, f.tail))
    for i, (a, b, p) in enumerate(segs):
        for d, c in enumerate(p.coeffs):
            rows.append({"piece": i, "lo": format_rational(a),
                         "hi": "inf" if b is None else format_rational(b),
                         "degree": d, "coefficient": format_rational(c)})
    return rows


def render(obj: Any, fmt: str) -> str:
    if fmt == "csv":
        rows = obj if isinstance(obj, list) else [obj]
        return to_csv_text([r if isinstance(r, dict) else {"value": r} for r in rows])
    if fmt == "latex":
        raise ValueError("latex output is only available for poly commands")
    return to_json_text(obj)


# ---------------------------------------------------------------------------
# argument helpers


def int_list(spec: str) -> List[int]:
    """``"3"``, ``"1,4,9"`` or the inclusive range ``"0..24"``."""
    out: List[int] = []
    for part in spec.split(","):
        part = part.strip()
        if ".." in part:
            a, b = part.split("..")
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(float(part)))
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def float_list(spec: str) -> List[float]:
    return [float(s) for s in spec.split(",") if s.strip()]


def int_value(spec: str) -> int:
    v = float(spec)
    if v != int(v):
        raise argparse.ArgumentTypeError(f"{spec} is not an integer")
    return int(v)


# ---------------------------------------------------------------------------
# commands


def cmd_poly(args) -> Any:
    from . import momentpoly
    k = args.k
    if args.what == "p":
        if args.r is None:
            raise SystemExit("poly p needs --r")
        p = momentpoly.compute_P(args.r, k)
        if args.format == "latex":
            return rf"P_{{{args.r},{k}}}(\alpha) = {latex_poly(p)}" + "\n"
        if args.format == "csv":
            return [{"degree": d, "coefficient": format_rational(c)} for d, c in enumerate(p.coeffs)]
        return p.to_json()
    f = momentpoly.compute_Mk(k) if args.what == "mk" else momentpoly.compute_gamma(k)
    if args.format == "latex":
        if args.what == "mk":
            kk = k * k
            return latex_piecewise(f.scale(factorial(kk)), rf"{kk}!\,M_{{{k}}}(\alpha)")
        return latex_piecewise(f, rf"\gamma_{{{k}}}(\alpha)")
    if args.format == "csv":
        return piecewise_rows(f)
    return f.to_json()


def cmd_rmt(args) -> Any:
    import numpy as np
    from . import rmt, schur
    if args.what == "sample":
        rng = np.random.default_rng(args.seed)
        rows = []
        for i in range(args.count):
            ang = rmt.haar_sample(args.N, rng)
            rows.append({"sample": i, "theta": [float(t) for t in np.sort(ang.theta)]})
        return rows
    if args.what == "exact":
        return [{"k": args.k, "n": n, "N": args.N, "value": schur.exact_Ik(args.k, n, args.N)}
                for n in args.n]
    if args.what == "mc":
        rows = []
        for n in args.n:
            est = rmt.mc_Ik(args.k, n, args.N, args.samples, args.seed, args.workers)
            rows.append({"k": args.k, "n": n, "N": args.N, "mean": est.mean,
                         "stderr": est.stderr, "samples": est.samples,
                         "seed": est.seed, "workers": est.workers})
        return rows
    if args.what == "ffik":
        rows = rmt.check_ffik(args.k, args.N, args.n)
        for r in rows:
            r["scaled_diff_exact"] = format_rational(r["scaled_diff_exact"])
        return rows
    if args.what == "fn":
        return {"k": args.k, "N": args.N, "coefficients": schur.fN_coeffs(args.k, args.N)}
    raise SystemExit(2)


def cmd_ffield(args) -> Any:
    from . import ffield
    if args.what == "variance":
        if args.method == "enumerate":
            res = ffield.ff_variance_enumerate(args.q, args.k, args.n, args.h)
        else:
            res = ffield.ff_variance(args.q, args.k, args.n, args.h)
        row = res.to_json()
        row["normalized"] = format_rational(res.normalized)
        return row
    return ffield.ff_variance_sweep(args.k, args.n, args.h, args.q_list)


def cmd_nf(args) -> Any:
    from .arith import euler, sieve, stats
    if args.what == "sieve":
        tab = sieve.sieve_dk(args.k, args.X)
        out = {"k": args.k, "X": args.X, "checksum": tab.checksum(),
               "total": int(tab.values.sum())}
        if args.values:
            out["values"] = tab.values.tolist()
        return out
    if args.what == "variance":
        rows = []
        for X in args.X:
            for a in args.alpha:
                rows.append(stats.short_interval_variance(args.k, X, a, pmax=args.pmax).to_json())
        return rows
    if args.what == "ap":
        rows = []
        for q in args.q:
            Xs = args.X or [round(q ** a) for a in args.alpha]
            for X in Xs:
                rows.append(stats.ap_variance(args.k, X, q, pmax=args.pmax).to_json())
        return rows
    if args.what == "dirichlet":
        return [stats.dirichlet_mean_square(args.k, args.T, a, pmax=args.pmax).to_json()
                for a in args.alpha]
    if args.what == "ak":
        import mpmath
        if args.q is not None:
            r = euler.compute_ak_q(args.k, args.q, args.pmax)
        else:
            r = euler.compute_ak(args.k, args.pmax)
        return {"k": args.k, "q": args.q, "pmax": r.pmax,
                "value": mpmath.nstr(r.value, 25), "tail_bound": r.tail_bound}
    raise SystemExit(2)


def cmd_verify(args) -> Any:
    from .verify import run_suite
    gates = run_suite(args.suite, seed=args.seed, workers=args.workers)
    args._failed = not all(g.passed for g in gates)
    args._timings = {g.name: round(g.seconds, 3) for g in gates}
    return [{"gate": g.name, "passed": g.passed, "measured": g.measured,
             "required": g.required} for g in gates]


# ---------------------------------------------------------------------------
# parser


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    p.add_argument("--seed", type=int, help="base seed for Monte Carlo streams")
    p.add_argument("--workers", type=int, help="worker processes (default: CPU count)")
    p.add_argument("--format", choices=FORMATS, help="output format (default json)")
    p.add_argument("--out", help="write output to this file instead of stdout")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="dirpoly", parents=[common],
                                 description="Moment polynomials, CUE integrals and divisor-sum variances.")
    ap.add_argument("--version", action="version", version=f"dirpoly {__version__}")
    sub = ap.add_subparsers(dest="group", required=True)

    poly = sub.add_parser("poly", parents=[common], help="exact piecewise polynomials")
    poly.add_argument("what", choices=("mk", "gamma", "p"))
    poly.add_argument("--k", type=int, required=True)
    poly.add_argument("--r", type=int)
    poly.set_defaults(func=cmd_poly)

    ver = sub.add_parser("verify", parents=[common], help="run an invariant suite")
    ver.add_argument("--suite", choices=("exact", "rmt", "ffield", "nf", "all"), default="all")
    ver.set_defaults(func=cmd_verify)

    rm = sub.add_parser("rmt", parents=[common], help="unitary matrix integrals")
    rm.add_argument("what", choices=("sample", "exact", "mc", "ffik", "fn"))
    rm.add_argument("--k", type=int, default=1)
    rm.add_argument("--N", type=int, required=True)
    rm.add_argument("--n", type=int_list, default=[0])
    rm.add_argument("--samples", type=int_value, default=100_000)
    rm.add_argument("--count", type=int, default=1)
    rm.set_defaults(func=cmd_rmt)

    ff = sub.add_parser("ffield", parents=[common], help="function-field variances")
    ff.add_argument("what", choices=("variance", "sweep"))
    ff.add_argument("--q", dest="q_list", type=int_list, required=True)
    ff.add_argument("--k", type=int, required=True)
    ff.add_argument("--n", type=int, required=True)
    ff.add_argument("--h", type=int, required=True)
    ff.add_argument("--method", choices=("convolution", "enumerate"), default="convolution")
    ff.set_defaults(func=cmd_ffield)

    nf = sub.add_parser("nf", parents=[common], help="number-field statistics")
    nf.add_argument("what", choices=("sieve", "variance", "ap", "dirichlet", "ak"))
    nf.add_argument("--k", type=int, required=True)
    nf.add_argument("--X", type=lambda s: [int_value(v) for v in s.split(",")])
    nf.add_argument("--alpha", type=float_list, default=[1.5])
    nf.add_argument("--q", type=lambda s: int_list(s))
    nf.add_argument("--T", type=float, default=1e4)
    nf.add_argument("--pmax", type=int_value, default=10 ** 6)
    nf.add_argument("--values", action="store_true", help="include the sieve table")
    nf.set_defaults(func=cmd_nf)
    return ap


def _fix_args(args, parser) -> None:
    args.seed = getattr(args, "seed", 0)
    args.workers = getattr(args, "workers", None) or os.cpu_count() or 1
    args.format = getattr(args, "format", "json")
    args.out = getattr(args, "out", None)
    if args.group == "ffield" and args.what == "variance":
        if len(args.q_list) != 1:
            parser.error("ffield variance takes a single --q")
        args.q = args.q_list[0]
    if args.group == "nf":
        if args.what in ("sieve",) and (not args.X or len(args.X) != 1):
            parser.error("nf sieve takes a single --X")
        if args.what == "sieve":
            args.X = args.X[0]
        if args.what == "variance" and not args.X:
            parser.error("nf variance needs --X")
        if args.what == "ap" and not args.q:
            parser.error("nf ap needs --q")
        if args.what == "ak" and args.q is not None:
            if len(args.q) != 1:
                parser.error("nf ak takes a single --q")
            args.q = args.q[0]


def _versions() -> dict:
    import mpmath
    import numpy
    return {"dirpoly": __version__, "numpy": numpy.__version__,
            "mpmath": mpmath.__version__, "python": platform.python_version()}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    _fix_args(args, parser)
    args._failed = False
    if args.format == "latex" and args.group != "poly":
        parser.error("--format latex is only available for poly commands")
    t0 = time.perf_counter()
    try:
        result = args.func(args)
    except (ValueError, MemoryError, OverflowError, KeyError) as exc:
        print(f"dirpoly: error: {exc}", file=sys.stderr)
        return 1
    text = result if isinstance(result, str) else render(result, args.format)
    data = text.encode()
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()
    manifest = {
        "command": ["dirpoly"] + argv,
        "seed": args.seed,
        "workers": args.workers,
        "versions": _versions(),
        "wall_time": round(time.perf_counter() - t0, 3),
        "output_sha256": hashlib.sha256(data).hexdigest(),
    }
    if getattr(args, "_timings", None):
        manifest["gate_seconds"] = args._timings
    if args.group == "nf" and args.what in ("sieve", "variance", "ap"):
        from .arith.zeta import STIELTJES
        manifest["stieltjes_digits"] = min(len(s.lstrip("-0.")) for s in STIELTJES)
    mtext = json.dumps(manifest, indent=1) + "\n"
    if args.out:
        with open(args.out + ".manifest.json", "w") as fh:
            fh.write(mtext)
    else:
        sys.stderr.write(mtext)
    return 1 if args._failed else 0


if __name__ == "__main__":
    sys.exit(main())
