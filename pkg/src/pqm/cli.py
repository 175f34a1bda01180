"""
pqm: command line access to the tangle-invariant toolkit.

Subcommands operate on module files (JSON) and print JSON reports with
sorted keys; all gradings are the stored doubled integers.  Exit codes:
0 success, 1 mathematical failure (invalid module, engine disagreement),
2 usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import curvekit, morcx, pairkit, pqalg, tanglezoo
from .pqmod import PqModule


class MathFailure(Exception):
    pass


def _usage(msg: str) -> SystemExit:
    print(f"pqm: {msg}", file=sys.stderr)
    return SystemExit(2)


def _load(path: str) -> PqModule:
    try:
        with open(path) as fh:
            return PqModule.loads(fh.read())
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise _usage(f"cannot read module {path!r}: {exc}") from exc


def _emit(doc, out: str | None) -> None:
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _module_doc(m: PqModule) -> dict:
    return m.to_json()


def _table_doc(table) -> list:
    return table.to_json()


def _curves_doc(cs) -> list:
    return [lp.to_json() for lp in cs]


# ---------------------------------------------------------------------------
# svg rendering


def _svg(cs) -> str:
    """Draw a curve set in the square with corner punctures: front chords
    solid, back chords dashed; strand offsets spread parallel arcs."""
    size = 400
    # arcs from the centre of each edge towards the corner punctures:
    # place the four arcs at edge midpoints of the square
    arc_xy = {1: (0, size / 2), 2: (size / 2, size), 3: (size, size / 2),
              4: (size / 2, 0)}
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" '
        f'height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white" '
        'stroke="black"/>',
    ]
    for cx, cy in ((0, 0), (0, size), (size, 0), (size, size)):
        lines.append(f'<circle cx="{cx}" cy="{cy}" r="4" fill="black"/>')
    for s, (x, y) in arc_xy.items():
        lines.append(f'<text x="{x}" y="{y}" font-size="12">'
                     f"{pqalg.SITE_NAMES[s]}</text>")
    for k, lp in enumerate(cs):
        mlen = len(lp.word)
        for t in range(mlen):
            s1 = lp.word[t][0]
            s2 = lp.word[(t + 1) % mlen][0]
            face = lp.word[t][1]
            (x1, y1), (x2, y2) = arc_xy[s1], arc_xy[s2]
            off = 6 * (k + 1) + t
            mx, my = (x1 + x2) / 2, (y1 + y2) / 2
            bend = off if face == pqalg.FRONT else -off
            dash = "" if face == pqalg.FRONT else ' stroke-dasharray="6,4"'
            lines.append(
                f'<path d="M {x1} {y1} Q {mx + bend} {my + bend} {x2} {y2}"'
                f' fill="none" stroke="black"{dash}/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# subcommands


def _cmd_check(args) -> int:
    m = _load(args.module)
    errs = m.validate()
    _emit({"module": m.name, "valid": not errs, "errors": errs,
           "generators": len(m.gens), "arrows": len(m.arrows)}, args.output)
    return 1 if errs else 0


def _cmd_reduce(args) -> int:
    m = _load(args.module)
    if m.validate():
        raise MathFailure(f"module {m.name!r} is invalid")
    _emit(_module_doc(m.reduce()), args.output)
    return 0


def _cmd_curves(args) -> int:
    m = _load(args.module)
    if m.validate():
        raise MathFailure(f"module {m.name!r} is invalid")
    cs = curvekit.curves(m)
    if args.svg:
        with open(args.svg, "w") as fh:
            fh.write(_svg(cs))
    _emit({"module": m.name, "loops": _curves_doc(cs)}, args.output)
    return 0


def _pair_once(m1: PqModule, m2: PqModule, engine: str) -> dict:
    results = {}
    engines = ("box", "mor", "curves") if engine == "all" else (engine,)
    for eng in engines:
        if eng == "box":
            r = pairkit.box_pair(m1, m2)
            results["box"] = {
                "table": _table_doc(r["table"]),
                "total": r["table"].total(),
                "stabilization_exponent": r["stabilization_exponent"],
                "components": r["components"],
                "alexander_solved": r["alexander_solved"],
            }
        elif eng == "mor":
            r = pairkit.mor_pair(m1, m2)
            results["mor"] = {
                "table": _table_doc(r["table"]),
                "total": r["table"].total(),
                "stabilization_exponent": r["stabilization_exponent"],
                "components": r["components"],
            }
        else:
            r = pairkit.curves_pair(m1, m2)
            results["curves"] = {
                "total": r["total"],
                "pairs": r["pairs"],
                "stabilization_exponent": r["stabilization_exponent"],
                "components": r["components"],
            }
    totals = {eng: doc["total"] for eng, doc in results.items()}
    if len(set(totals.values())) > 1:
        raise MathFailure(f"engine disagreement: {totals}")
    return results


def _cmd_pair(args) -> int:
    if args.batch:
        with open(args.batch) as fh:
            jobs = json.load(fh)
        out = []
        for f1, f2 in jobs:
            out.append({"pair": [f1, f2],
                        "result": _pair_once(_load(f1), _load(f2),
                                             args.engine)})
        _emit(out, args.output)
        return 0
    if not (args.module and args.module2):
        raise _usage("pair: need two module files or --batch")
    _emit(_pair_once(_load(args.module), _load(args.module2), args.engine),
          args.output)
    return 0


# A closure is named by the pair of corners the closing arcs hug: "a,c"
# joins the d-a and b-c ends, "b,d" joins a-b and c-d.
_SITE_ROTATION = {"a,c": 1, "c,a": 1, "b,d": 0, "d,b": 0}


def _cmd_close(args) -> int:
    m = _load(args.module)
    if m.validate():
        raise MathFailure(f"module {m.name!r} is invalid")
    key = args.sites.strip().lower()
    if key not in _SITE_ROTATION:
        raise _usage(f"close: bad --sites {args.sites!r}")
    r = pairkit.omega_close(m, rotation=_SITE_ROTATION[key])
    _emit({"module": m.name, "table": _table_doc(r["table"]),
           "total": r["table"].total(), "case": r["case"],
           "stabilization_exponent": r["stabilization_exponent"]},
          args.output)
    return 0


def _cmd_mor(args) -> int:
    m1, m2 = _load(args.module), _load(args.module2)
    table = morcx.mor_homology(m1.reduce(), m2.reduce())
    _emit({"table": _table_doc(table), "total": table.total()}, args.output)
    return 0


def _cmd_equiv(args) -> int:
    m1, m2 = _load(args.module), _load(args.module2)
    eq = curvekit.equivalent(m1, m2)
    _emit({"equivalent": eq}, args.output)
    return 0 if eq else 1


def _cmd_build(args) -> int:
    try:
        m = tanglezoo.build(args.spec)
    except ValueError as exc:
        raise _usage(f"build: {exc}") from exc
    _emit(_module_doc(m), args.output)
    return 0


def _cmd_mirror(args) -> int:
    m = _load(args.module)
    if m.validate():
        raise MathFailure(f"module {m.name!r} is invalid")
    _emit(_module_doc(m.reduce().mirror()), args.output)
    return 0


def _cmd_reverse(args) -> int:
    m = _load(args.module)
    if m.validate():
        raise MathFailure(f"module {m.name!r} is invalid")
    _emit(_module_doc(m.reverse()), args.output)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pqm", description="tangle invariants over the arc algebra")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, nmod=1, **extra):
        p = sub.add_parser(name)
        if nmod >= 1:
            p.add_argument("module", nargs="?" if extra.get("optional_mod")
                           else None)
        if nmod >= 2:
            p.add_argument("module2", nargs="?" if extra.get("optional_mod")
                           else None)
        p.add_argument("-o", "--output", default=None)
        p.set_defaults(fn=fn)
        return p

    add("check", _cmd_check)
    add("reduce", _cmd_reduce)
    p = add("curves", _cmd_curves)
    p.add_argument("--svg", default=None)
    p = add("pair", _cmd_pair, nmod=2, optional_mod=True)
    p.add_argument("--engine", choices=["box", "mor", "curves", "all"],
                   default="box")
    p.add_argument("--batch", default=None)
    p = add("close", _cmd_close)
    p.add_argument("--sites", default="a,c")
    add("mor", _cmd_mor, nmod=2)
    add("equiv", _cmd_equiv, nmod=2)
    p = sub.add_parser("build")
    p.add_argument("spec")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(fn=_cmd_build)
    add("mirror", _cmd_mirror)
    add("reverse", _cmd_reverse)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except MathFailure as exc:
        print(f"pqm: {exc}", file=sys.stderr)
        return 1
    except (AssertionError, RuntimeError, ValueError) as exc:
        print(f"pqm: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
