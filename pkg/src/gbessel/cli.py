"""Command-line front end: ``gbessel <subcommand> ...``.

Exit codes: 0 success, 2 invalid input, 3 accuracy or regime failure,
4 degenerate algebra.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import (
    LARGE_ARG,
    LARGE_ORDER,
    classify_point,
    compare_estimate,
    comparison_csv,
    decay_rate_probe,
    stationary_points,
)
from .bifurcation import (
    NU,
    curve_csv,
    large_arg_surfaces,
    large_order_surfaces,
    mt_surfaces,
    sample_surface,
    schlomilch_boundaries,
    validate_surface_point,
)
from .core import (
    ORACLE,
    HarmonicCoefficients,
    QuadratureSpec,
    check_coprime,
    eval_batch,
    eval_mtgbf_with_nodes,
)
from .errors import AccuracyError, GBesselError, InvalidInputError
from .pde import pde_suite, reports_csv
from .series import (
    F1,
    F2,
    F3,
    KAPTEYN,
    SCHLOMILCH,
    kapteyn_moment,
    neumann_moment,
    schlomilch_moment,
)


# parsing helpers ------------------------------------------------------------------


def _floats(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise InvalidInputError(f"not a comma-separated list of numbers: {text!r}") from exc


def _ints(text: str) -> list:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise InvalidInputError(f"not a comma-separated list of integers: {text!r}") from exc


def _range(text: str) -> tuple:
    """``min:max:steps`` with ``steps >= 2``; ``min == max`` repeats one value."""
    parts = text.split(":")
    if len(parts) != 3:
        raise InvalidInputError(f"range must be min:max:steps, got {text!r}")
    try:
        lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise InvalidInputError(f"malformed range {text!r}") from exc
    if steps < 2 or not lo <= hi or not (math.isfinite(lo) and math.isfinite(hi)):
        raise InvalidInputError(f"range needs finite min <= max and steps >= 2, got {text!r}")
    return lo, hi, steps


def _sparse(text: str) -> HarmonicCoefficients:
    entries = {}
    for item in text.split(","):
        parts = item.split(":")
        if len(parts) not in (2, 3):
            raise InvalidInputError(f"harmonic must be k:x or k:x:y, got {item!r}")
        try:
            k, x = int(parts[0]), float(parts[1])
            y = float(parts[2]) if len(parts) == 3 else 0.0
        except ValueError as exc:
            raise InvalidInputError(f"malformed harmonic {item!r}") from exc
        if k in entries:
            raise InvalidInputError(f"harmonic {k} given twice")
        entries[k] = (x, y)
    return HarmonicCoefficients.from_mapping(entries)


def coefficients(args) -> HarmonicCoefficients:
    """Build the phase from ``--h`` or from ``--p/--x/--y``."""
    if getattr(args, "h", None):
        if args.x or args.y or args.p:
            raise InvalidInputError("--h cannot be combined with --p/--x/--y")
        return _sparse(args.h)
    x = _floats(args.x) if args.x else []
    y = _floats(getattr(args, "y", None)) if getattr(args, "y", None) else []
    p = _ints(args.p) if args.p else list(range(1, max(len(x), len(y)) + 1))
    if any(v and len(v) != len(p) for v in (x, y)):
        raise InvalidInputError("--x/--y must list one value per index in --p")
    return HarmonicCoefficients.from_arrays(x or [0.0] * len(p), y or None, p)


def _is_mt(args, h: HarmonicCoefficients) -> bool:
    return bool(getattr(args, "y", None)) or not h.is_pure_sine


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _num(v: float) -> str:
    return format(float(v), ".17g")


def _spec(args) -> QuadratureSpec:
    if getattr(args, "oracle", False):
        return ORACLE
    return QuadratureSpec(node_count=getattr(args, "nodes", None))


# subcommands ----------------------------------------------------------------------


def cmd_eval(args) -> int:
    h = coefficients(args)
    if not _is_mt(args, h):
        check_coprime(h)
    value, nodes = eval_mtgbf_with_nodes(h, args.n, _spec(args))
    if not _is_mt(args, h) and abs(value.imag) >= 1e-12:
        raise AccuracyError(f"imaginary residue {value.imag:.3e} of a real GBF", (value,))
    if args.json:
        payload = {"indices": list(h.indices), "n": args.n, "re": value.real, "im": value.imag,
                   "nodes": nodes}
        _emit(json.dumps(payload), None)
    elif _is_mt(args, h):
        _emit(f"{value.real!r} {value.imag!r} nodes={nodes}", None)
    else:
        _emit(f"{value.real!r} nodes={nodes}", None)
    return 0


def cmd_grid(args) -> int:
    p = _ints(args.p)
    if len(p) != 2:
        raise InvalidInputError("grid needs exactly two indices: one axis per argument")
    check_coprime(HarmonicCoefficients.from_gbf(p, [1.0, 1.0]))
    (x0, x1, nx), (y0, y1, ny) = _range(args.x), _range(args.y)
    xs, ys = np.linspace(x0, x1, nx), np.linspace(y0, y1, ny)
    # row-major: y outer, x inner
    X, Y = np.meshgrid(xs, ys)
    pts = np.stack([X.ravel(), Y.ravel()], axis=1)
    values, counts = eval_batch(p, pts, None, args.n)
    if args.format == "json":
        payload = {
            "indices": p,
            "order": args.n,
            "axes": [{"name": "x", "min": x0, "max": x1, "steps": nx},
                     {"name": "y", "min": y0, "max": y1, "steps": ny}],
            "values": [[float(v.real), float(v.imag)] for v in values],
            "meta": {"nodes": int(counts.max()), "version": __version__},
        }
        _emit(json.dumps(payload), args.output)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y", "abs"])
        for (a, b), v in zip(pts, values):
            w.writerow([_num(a), _num(b), _num(abs(v))])
        _emit(buf.getvalue(), args.output)
    return 0


def _parse_box(text: str) -> list:
    box = []
    for part in text.split(","):
        lo, _, hi = part.partition(":")
        try:
            box.append((float(lo), float(hi)))
        except ValueError as exc:
            raise InvalidInputError(f"box must be lo:hi[,lo:hi], got {text!r}") from exc
    return box


def _family_output(fam, args) -> None:
    if args.format == "json":
        _emit(json.dumps(fam.to_json(), indent=2), args.output)
    else:
        _emit(fam.to_text(), args.output)
    if args.sample is not None:
        if not args.box:
            raise InvalidInputError("--sample needs --box")
        box = _parse_box(args.box)
        chunks = []
        for entry in fam.entries:
            free = [v for v in entry.poly.used_vars() if v != NU]
            if len(free) != len(box):
                continue
            pts = sample_surface(entry.poly, args.sample, box, args.resolution, free=free)
            chunks.append(curve_csv(pts, entry.poly, free))
        _emit("".join(chunks), args.curves)


def cmd_bifurcation(args) -> int:
    regime = args.regime
    if args.mt:
        fam = mt_surfaces(_ints(args.p), "large-order" if regime == "large-order" else "large-arg")
    elif regime == "large-order":
        fam = large_order_surfaces(_ints(args.p))
    else:
        fam = large_arg_surfaces(_ints(args.p))
    if args.validate:
        point = _floats(args.validate)
        report = validate_surface_point(_ints(args.p), args.sample or 0.0, point)
        _emit(json.dumps(report.to_json()), None)
        return 0
    _family_output(fam, args)
    return 0


def cmd_boundaries(args) -> int:
    fam = schlomilch_boundaries(_ints(args.p) if args.p else (), _ints(args.cos) if args.cos else ())
    _family_output(fam, args)
    return 0


def cmd_pde(args) -> int:
    orders = range(args.max_order + 1)
    reports = pde_suite(seed=args.seed, count=args.count, box=args.box, orders=orders)
    _emit(reports_csv(reports), args.output)
    worst = max(r.relative for r in reports)
    print(f"{len(reports)} residuals, worst relative {worst:.3e}", file=sys.stderr)
    return 0


def cmd_series(args) -> int:
    h = coefficients(args)
    N = args.N
    if args.kind in (F1, F2, F3):
        report = neumann_moment(args.kind, h, args.ell, N)
    elif args.kind == KAPTEYN:
        report = kapteyn_moment(h, args.ell, N)
    else:
        report = schlomilch_moment(h, args.m, args.ell, N)
    if args.json:
        _emit(json.dumps(report.to_json()), args.output)
    else:
        _emit(report.to_text(), args.output)
    return 0


def cmd_asym(args) -> int:
    h = coefficients(args)
    regime = LARGE_ORDER if args.regime == "large-order" else LARGE_ARG
    if regime == LARGE_ARG and args.n != int(args.n):
        raise InvalidInputError("the large-argument regime needs an integer order")
    if args.classify:
        _emit(classify_point(h, args.n), None)
        return 0
    if args.probe:
        rep = decay_rate_probe(h, args.n, _floats(args.t))
        _emit(json.dumps({"regime": rep.regime, "slope": rep.slope, "against": rep.fit_against,
                          "t": list(rep.t), "amplitude": list(rep.amplitude)}), args.output)
        return 0
    pts = stationary_points(h, args.n, regime)
    for w in pts.warnings:
        print(f"warning: {w}", file=sys.stderr)
    rows = compare_estimate(h, args.n, _floats(args.t), regime)
    _emit(comparison_csv(rows), args.output)
    return 0


# argument parser --------------------------------------------------------------------


def _add_coefficients(sp, with_y=True):
    sp.add_argument("--p", help="comma-separated harmonic indices")
    sp.add_argument("--x", help="sine coefficients, aligned with --p")
    if with_y:
        sp.add_argument("--y", help="cosine coefficients, aligned with --p")
    sp.add_argument("--h", help="sparse harmonics k:x:y,k:x:y")


def _add_family_output(sp):
    sp.add_argument("--format", choices=("text", "json"), default="text")
    sp.add_argument("--output", help="write the surfaces here instead of stdout")
    sp.add_argument("--sample", type=float, metavar="NU", help="sample the zero sets at this nu")
    sp.add_argument("--box", help="sampling box lo:hi,lo:hi")
    sp.add_argument("--resolution", type=int, default=200)
    sp.add_argument("--curves", help="CSV path for sampled points (stdout if omitted)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gbessel", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("eval", help="evaluate one GBF or MT-GBF value")
    _add_coefficients(sp)
    sp.add_argument("--n", type=int, default=0)
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--nodes", type=int, help="fixed trapezoid node count")
    sp.add_argument("--oracle", action="store_true", help="self-refining quadrature")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("grid", help="|J_n| of a two-index GBF over a box")
    sp.add_argument("--p", required=True)
    sp.add_argument("--n", type=int, default=0)
    sp.add_argument("--x", required=True, help="min:max:steps")
    sp.add_argument("--y", required=True, help="min:max:steps")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--output")
    sp.set_defaults(func=cmd_grid)

    sp = sub.add_parser("bifurcation", help="bifurcation surfaces as exact polynomials")
    sp.add_argument("--p", required=True)
    sp.add_argument("--regime", choices=("large-arg", "large-order"), default="large-order")
    sp.add_argument("--mt", action="store_true", help="sine and cosine slots at every index")
    sp.add_argument("--validate", metavar="X,Y", help="check a surface point (nu from --sample)")
    _add_family_output(sp)
    sp.set_defaults(func=cmd_bifurcation)

    sp = sub.add_parser("boundaries", help="smoothness boundaries of the Schlomilch series")
    sp.add_argument("--p", help="sine indices")
    sp.add_argument("--cos", help="cosine indices")
    _add_family_output(sp)
    sp.set_defaults(func=cmd_boundaries)

    sp = sub.add_parser("pde-residual", help="seeded residual suite of the differential identities")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=100)
    sp.add_argument("--box", type=float, default=5.0)
    sp.add_argument("--max-order", type=int, default=5)
    sp.add_argument("--output")
    sp.set_defaults(func=cmd_pde)

    sp = sub.add_parser("series", help="series moments: closed form against direct sum")
    _add_coefficients(sp)
    sp.add_argument("--kind", choices=(F1, F2, F3, KAPTEYN, SCHLOMILCH), required=True)
    sp.add_argument("--ell", type=int, default=0)
    sp.add_argument("--m", type=int, default=0, help="fixed order of the Schlomilch series")
    sp.add_argument("--N", type=int, help="truncation (automatic if omitted)")
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--output")
    sp.set_defaults(func=cmd_series)

    sp = sub.add_parser("asym", help="stationary-phase estimate against quadrature")
    _add_coefficients(sp)
    sp.add_argument("--n", type=float, default=0.0, help="order (large-arg) or order ratio")
    sp.add_argument("--t", default="20,40,80,160", help="comma-separated scales")
    sp.add_argument("--regime", choices=("large-arg", "large-order"), default="large-arg")
    sp.add_argument("--classify", action="store_true", help="print the decay regime only")
    sp.add_argument("--probe", action="store_true", help="fit the decay slope over --t")
    sp.add_argument("--output")
    sp.set_defaults(func=cmd_asym)
    return parser


def _glue_negative_values(argv):
    # argparse reads "-20:20:401" as an option; bind it to the flag before it
    out = []
    for tok in argv:
        if (out and out[-1].startswith("--") and "=" not in out[-1]
                and len(tok) > 1 and tok[0] == "-" and (tok[1].isdigit() or tok[1] == ".")):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_glue_negative_values(argv))
    try:
        return args.func(args)
    except GBesselError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
