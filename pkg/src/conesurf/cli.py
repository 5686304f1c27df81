"""Command line interface.

Exit codes:

    0  success / PASS
    1  bad input, usage or I/O error (JSON on stderr)
    2  FAIL verdict
    3  INCONCLUSIVE verdict
    4  flip limit exceeded
    5  a checked invariant failed (Voronoi cell properties, oracle agreement)
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys

from .errors import ConeSurfError, FlipError

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FAIL = 2
EXIT_INCONCLUSIVE = 3
EXIT_FLIP_LIMIT = 4
EXIT_INVARIANT = 5

_STATUS_EXIT = {"PASS": EXIT_OK, "FAIL": EXIT_FAIL, "INCONCLUSIVE": EXIT_INCONCLUSIVE}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which would read as a FAIL verdict.
    def error(self, message):
        raise _UsageError(message)


def parse_angle(text):
    """Radians, with ``pi`` sugar: ``0.8pi``, ``0.8*pi``, ``pi`` or ``2.51``."""
    s = text.strip().lower().replace(" ", "")
    m = re.fullmatch(r"([0-9.eE+-]*)\*?(pi|π)", s)
    try:
        if m:
            coef = m.group(1)
            return (float(coef) if coef not in ("", "+") else 1.0) * math.pi
        return float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot read angle {text!r}") from None


def _emit_error(code, message, **details):
    out = {"error": code, "message": message}
    if details:
        out["details"] = details
    sys.stderr.write(json.dumps(out, sort_keys=True, default=str) + "\n")


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load(path):
    from .scs import parse_scs

    with open(path, encoding="utf-8") as fh:
        return parse_scs(fh.read())


def _build(path, strict=False):
    return _load(path).build(strict=strict)


# subcommands ---------------------------------------------------------------


def cmd_validate(args):
    from .report import build_report, dumps
    from .validator import is_extra_large

    surface = _build(args.file, args.strict)
    verdict = is_extra_large(surface, args.resolution, args.seed)
    _write(args.json, dumps(build_report(surface, verdict)))
    return _STATUS_EXIT[verdict.status]


def cmd_delaunay(args):
    from .delaunay import delaunay_flip, global_empty_disk_check
    from .report import build_report, delaunay_block, dumps
    from .scs import serialize_scs
    from .validator import is_extra_large

    surface = _build(args.file)
    verdict = is_extra_large(surface, args.resolution, args.seed)
    if verdict.status != "PASS" and not args.force:
        _emit_error("NOT_VALIDATED", f"input is not extra large (status {verdict.status}); use --force")
        if args.report:
            _write(args.report, dumps(build_report(surface, verdict)))
        return _STATUS_EXIT[verdict.status]
    dt = delaunay_flip(surface, max_flips=args.max_flips, force=True)
    _write(args.output, serialize_scs(dt.surface, comment="intrinsic Delaunay triangulation"))
    if args.report:
        rep = build_report(surface, verdict, delaunay_block(dt, global_empty_disk_check(dt)))
        _write(args.report, dumps(rep))
    return EXIT_OK


def cmd_voronoi(args):
    from .pipeline import run_voronoi
    from .report import dumps
    from .svg import svg_diagram

    surface = _build(args.file)
    res = run_voronoi(surface, args.resolution, args.samples, args.force, args.seed, args.max_flips)
    _write(args.json, dumps(res.report))
    if res.diagram is None:
        _emit_error("NOT_VALIDATED", f"input is not extra large (status {res.verdict.status}); use --force")
        return _STATUS_EXIT[res.verdict.status]
    if args.svg:
        os.makedirs(args.svg, exist_ok=True)
        for name, text in sorted(svg_diagram(res.diagram).items()):
            with open(os.path.join(args.svg, name), "w", encoding="utf-8") as fh:
                fh.write(text)
    if res.verdict.status == "PASS" and not res.invariants_ok:
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_gen(args):
    from . import generators as G
    from .scs import serialize_scs

    fam = args.family
    if fam == "tetra":
        surface = G.tetra(args.angle)
        note = f"tetra --angle {args.angle!r}"
    elif fam == "octa-sphere":
        surface = G.octa_sphere()
        note = "octa-sphere"
    elif fam == "waist":
        surface = G.waist(args.leg, args.apex)
        note = f"waist --leg {args.leg!r} --apex {args.apex!r}"
    else:
        surface = G.perturb(_build(args.file), args.eps, args.seed)
        note = f"perturb --eps {args.eps!r} --seed {args.seed}"
    _write(args.output, serialize_scs(surface, comment=note))
    return EXIT_OK


def cmd_oracle(args):
    from .pipeline import run_oracle
    from .report import dumps

    surface = _build(args.file)
    verdict, part, series, rep = run_oracle(surface, args.k, args.pairs, args.samples, args.seed,
                                            resolution=args.resolution, force=args.force)
    _write(args.json, dumps(rep))
    if part is None:
        _emit_error("NOT_VALIDATED", f"input is not extra large (status {verdict.status}); use --force")
        return _STATUS_EXIT[verdict.status]
    ok = part.agreement == 1.0 and series.min_signed_gap >= -1e-9
    return EXIT_OK if ok else EXIT_INVARIANT


# parser --------------------------------------------------------------------


def build_parser():
    from .validator import DEFAULT_RESOLUTION

    p = _Parser(prog="conesurf", description="Extra-large spherical cone surfaces: validation, "
                "intrinsic Delaunay triangulation and Voronoi cells. All angles and lengths in radians.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, validate=True):
        sp.add_argument("file", help=".scs input")
        if validate:
            sp.add_argument("--resolution", type=int, default=DEFAULT_RESOLUTION,
                            help="number of loop-search basepoints (default %(default)s)")
            sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("validate", help="check extra-largeness; prints the verdict report")
    common(sp)
    sp.add_argument("--strict", action="store_true", help="reject smooth vertices (cone angle 2pi)")
    sp.add_argument("--json", default="-", help="report path (default stdout)")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("delaunay", help="flip to the intrinsic Delaunay triangulation")
    common(sp)
    sp.add_argument("-o", "--output", default="-", help="output .scs (default stdout)")
    sp.add_argument("--report", help="JSON report path")
    sp.add_argument("--force", action="store_true", help="run even if the input does not validate")
    sp.add_argument("--max-flips", type=int, default=None)
    sp.set_defaults(func=cmd_delaunay)

    sp = sub.add_parser("voronoi", help="validate, triangulate, dualize and verify the cells")
    common(sp)
    sp.add_argument("--json", default="-", help="report path (default stdout)")
    sp.add_argument("--svg", metavar="DIR", help="write one SVG per cell into DIR")
    sp.add_argument("--samples", type=int, default=100, help="star-shapedness segments per cell")
    sp.add_argument("--force", action="store_true")
    sp.add_argument("--max-flips", type=int, default=None)
    sp.set_defaults(func=cmd_voronoi)

    sp = sub.add_parser("gen", help="write a generated instance")
    fams = sp.add_subparsers(dest="family", required=True, parser_class=_Parser)
    f = fams.add_parser("tetra", help="four equilateral triangles glued as a tetrahedron")
    f.add_argument("--angle", type=parse_angle, default=0.8 * math.pi,
                   help="triangle angle, e.g. 0.8pi; cone angles are 3x this")
    f = fams.add_parser("octa-sphere", help="round sphere cut into octants")
    f = fams.add_parser("perturb", help="random edge-length perturbation of a file")
    f.add_argument("file")
    f.add_argument("--eps", type=float, default=0.02)
    f.add_argument("--seed", type=int, default=0)
    f = fams.add_parser("waist", help="doubled isosceles triangle with a short loop")
    f.add_argument("--leg", type=float, default=2.2)
    f.add_argument("--apex", type=float, default=0.4)
    for f in fams.choices.values():
        f.add_argument("-o", "--output", default="-")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("oracle-check", help="compare against the refined-graph oracle")
    common(sp)
    sp.add_argument("--k", type=int, default=16, help="subdivision level")
    sp.add_argument("--pairs", type=int, default=50, help="random pairs for the convergence check")
    sp.add_argument("--samples", type=int, default=10000, help="partition samples")
    sp.add_argument("--json", default="-")
    sp.add_argument("--force", action="store_true")
    sp.set_defaults(func=cmd_oracle)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as err:
        _emit_error("USAGE", str(err))
        return EXIT_ERROR
    except FlipError as err:
        sys.stderr.write(json.dumps(err.to_dict(), sort_keys=True, default=str) + "\n")
        return EXIT_FLIP_LIMIT if err.code == "FLIP_LIMIT_EXCEEDED" else EXIT_ERROR
    except ConeSurfError as err:
        sys.stderr.write(json.dumps(err.to_dict(), sort_keys=True, default=str) + "\n")
        return EXIT_ERROR
    except (OSError, ValueError) as err:
        _emit_error(type(err).__name__.upper(), str(err))
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
