"""
Pairing engines: gluing two 4-ended tangles into a link and computing the
link Floer homology of the result three independent ways.

* box_pair: box tensor with the standard pairing bimodule (type AA on two
  sides), homology of the resulting complex;
* morphism pairing: homology of Mor(mirror(m1), m2) (in morcx, wrapped
  here for convenience);
* lagrangian_pair: geometric intersection numbers of the curve invariants.

All engines produce CFL(L) (x) V^i where i = 2 - |L| and |L| is the number
of link components of the glued closure.
"""

from __future__ import annotations

from . import curvekit, f2lin, morcx, pqalg
from .pqalg import BasisPath, Matching, _m4, idem, parse_path, ppath, qpath
from .pqmod import GradedTable, PqModule

# ---------------------------------------------------------------------------
# the pairing bimodule


class PairGen:
    __slots__ = ("name", "red", "blue", "delta2", "alex_paths")

    def __init__(self, name, delta2, alex_paths):
        self.name = name
        self.red = pqalg.NAME_SITES[name[0]]
        self.blue = pqalg.NAME_SITES[name[1]]
        self.delta2 = delta2
        # Alexander grading as a formal sum of path gradings: list of
        # (sign, path) evaluated against the blue (second factor) matching.
        self.alex_paths = alex_paths

    def alex2(self, matching: Matching):
        acc = [0] * matching.ncolours
        for sign, path in self.alex_paths:
            for k, w in enumerate(path.alexander2(matching)):
                acc[k] += sign * w
        return tuple(acc)


def standard_p():
    """Generators and actions of the pairing bimodule.

    Returns (gens, actions); actions are (src, tgt, red label, blue label)
    with idempotents allowed on one side.  Red labels act on the reversed
    first factor, blue labels on the second.
    """
    q2, q3, q4 = qpath(1, 1), qpath(2, 1), qpath(3, 1)
    p1, p2, p4 = ppath(1, 1), ppath(2, 1), ppath(4, 1)
    gens = {
        "aa": PairGen("aa", 0, []),
        "bb": PairGen("bb", 0, []),
        "dd": PairGen("dd", 2, []),
        "cc": PairGen("cc", 2, []),
        "ab": PairGen("ab", 1, [(1, q2)]),
        "ba": PairGen("ba", 1, [(1, p2)]),
        "dc": PairGen("dc", 1, [(-1, q4)]),
        "cd": PairGen("cd", 1, [(-1, p4)]),
    }
    i = idem
    actions = [
        ("aa", "ab", i(1), q2),
        ("aa", "ba", q2, i(1)),
        ("bb", "ba", i(2), p2),
        ("bb", "ab", p2, i(2)),
        ("dc", "dd", i(4), q4),
        ("cd", "dd", q4, i(3)),
        ("dc", "cc", p4, i(3)),
        ("cd", "cc", i(3), p4),
        ("ab", "dc", p1, q3),
        ("ba", "cd", q3, p1),
        ("ab", "dd", p1, qpath(2, 2)),
        ("aa", "dc", p1, qpath(1, 2)),
        ("aa", "dd", qpath(1, 3), p1),
        ("aa", "dd", p1, qpath(1, 3)),
        ("bb", "dd", qpath(2, 2), ppath(2, 2)),
        ("bb", "dd", ppath(2, 2), qpath(2, 2)),
        ("aa", "cc", qpath(1, 2), ppath(1, 2)),
        ("aa", "cc", ppath(1, 2), qpath(1, 2)),
        ("bb", "cc", q3, ppath(2, 3)),
        ("bb", "cc", ppath(2, 3), q3),
        ("bb", "dc", ppath(2, 2), q3),
        ("bb", "cd", q3, ppath(2, 2)),
        ("ba", "dd", qpath(2, 2), p1),
        ("ba", "cc", q3, ppath(1, 2)),
        ("ab", "cc", ppath(1, 2), q3),
        ("aa", "cd", qpath(1, 2), p1),
    ]
    return gens, actions


def _fix_actions(gens, actions):
    """Sanity-fix the action list: idempotents must sit at the right site
    and each label's endpoints must match the generator sites."""
    out = []
    for src, tgt, red, blue in actions:
        gs, gt = gens[src], gens[tgt]
        if red.kind == "i":
            red = idem(gs.red)
        if blue.kind == "i":
            blue = idem(gs.blue)
        assert red.source == gs.red and red.target == gt.red, \
            (src, tgt, str(red))
        assert blue.source == gs.blue and blue.target == gt.blue, \
            (src, tgt, str(blue))
        # degree check: each action raises delta2 by 2 in total
        used = sum(2 - lab.length for lab in (red, blue) if lab.kind != "i")
        assert used + gt.delta2 - gs.delta2 == 2, (src, tgt)
        out.append((src, tgt, red, blue))
    return out


# ---------------------------------------------------------------------------
# link components and Alexander signs


def link_components(matching1: Matching, matching2: Matching):
    """Cycles of the union of the two matchings; each component records the
    colour indices it contains from either factor."""
    edges = []
    for k, (i, o) in enumerate(matching1.pairs):
        edges.append((i, o, (1, k)))
    for k, (i, o) in enumerate(matching2.pairs):
        edges.append((i, o, (2, k)))
    site_edges: dict[int, list] = {s: [] for s in pqalg.SITES}
    for a, b, tag in edges:
        site_edges[a].append((b, tag))
        site_edges[b].append((a, tag))
    seen_tags = set()
    comps = []
    for a, b, tag in edges:
        if tag in seen_tags:
            continue
        comp_sites = set()
        comp_tags = []
        stack = [a]
        visited = set()
        while stack:
            s = stack.pop()
            if s in visited:
                continue
            visited.add(s)
            comp_sites.add(s)
            for s2, t2 in site_edges[s]:
                if t2 not in seen_tags:
                    seen_tags.add(t2)
                    comp_tags.append(t2)
                stack.append(s2)
        comps.append((min(comp_sites), sorted(comp_tags)))
    comps.sort()
    return [tags for _s, tags in comps]


def stabilization_exponent(m1: PqModule, m2: PqModule):
    """(i, |L|) for the glued link: CFL comes tensored with V^i, i = 2-|L|."""
    comps = link_components(m1.matching, m2.matching)
    return 2 - len(comps), len(comps)


def _solve_signs(matching1: Matching, matching2: Matching):
    """Orientation signs per tangle colour making the glued strands into
    consistently oriented link components, or None when impossible.

    At every site the strand of the first factor flows into the strand of
    the second, so aligned colours must point oppositely through the
    puncture.  Returns (components, s1, s2).
    """
    comps = link_components(matching1, matching2)

    def eps(matching, colour, site):
        i, o = matching.pairs[colour]
        return 1 if site == i else -1

    s1: dict[int, int] = {}
    s2: dict[int, int] = {}
    for tags in comps:
        # anchor: the first second-factor colour in the component is +1
        anchor = next(t for t in tags if t[0] == 2)
        s2[anchor[1]] = 1
        pending = [anchor]
        fixed = {anchor}
        while pending:
            fac, col = pending.pop()
            matching = matching1 if fac == 1 else matching2
            store = s1 if fac == 1 else s2
            for site in matching.pairs[col]:
                other_fac = 3 - fac
                other_m = matching1 if other_fac == 1 else matching2
                other_col = other_m.colour_of(site)
                # s1 * eps1 = s2 * eps2 at every site (the reversal of the
                # first factor already flips its strand orientations)
                e_self = eps(matching, col, site)
                e_other = eps(other_m, other_col, site)
                val = store[col] * e_self * e_other
                other_store = s1 if other_fac == 1 else s2
                if other_col in other_store:
                    if other_store[other_col] != val:
                        return None
                else:
                    other_store[other_col] = val
                    if (other_fac, other_col) not in fixed:
                        fixed.add((other_fac, other_col))
                        pending.append((other_fac, other_col))
    return comps, s1, s2


# ---------------------------------------------------------------------------
# box tensor pairing


def box_pair(m1: PqModule, m2: PqModule, use_mirror: bool = False) -> dict:
    """Pair two tangle invariants by the box tensor with the standard
    bimodule.  The first factor is reversed internally (or mirrored, with
    the flag, for the Mor-style convention)."""
    if m1.killed or m2.killed:
        raise ValueError("pairing needs full-algebra modules")
    r1 = m1.reduce().mirror() if use_mirror else m1.reduce().reverse()
    m2 = m2.reduce()
    gens, actions = standard_p()
    actions = _fix_actions(gens, actions)

    triples = []
    for pg in gens.values():
        for x in r1.gens.values():
            if x.site != pg.red:
                continue
            for y in m2.gens.values():
                if y.site == pg.blue:
                    triples.append((x.id, pg.name, y.id))
    delta2 = {}
    for (x, pgn, y) in triples:
        delta2[(x, pgn, y)] = (r1.gens[x].delta2 + gens[pgn].delta2
                               + m2.gens[y].delta2)

    # Alexander refinements per link component, when orientations glue
    solved = _solve_signs(r1.matching, m2.matching)
    if solved is not None:
        comps, s1, s2 = solved

        def alex(trip):
            x, pgn, y = trip
            a1 = r1.gens[x].alex2
            a2 = m2.gens[y].alex2
            ap = gens[pgn].alex2(m2.matching)
            out = []
            for tags in comps:
                tot = 0
                for fac, col in tags:
                    if fac == 1:
                        tot += s1[col] * a1[col]
                    else:
                        tot += s2[col] * (a2[col] + ap[col])
                out.append(tot)
            return tuple(out)
    else:
        def alex(trip):
            return ()

    # the differential: one bimodule action paired with matching arrows
    def moves(trip):
        x, pgn, y = trip
        out = set()
        for src, tgt, red, blue in actions:
            if src != pgn:
                continue
            xs = ([(x, 1)] if red.kind == "i" else
                  [(x2, 1) for (x0, x2), lab in r1.arrows.items()
                   if x0 == x and red in lab.paths])
            ys = ([(y, 1)] if blue.kind == "i" else
                  [(y2, 1) for (y0, y2), lab in m2.arrows.items()
                   if y0 == y and blue in lab.paths])
            for x2, _ in xs:
                for y2, _ in ys:
                    out ^= {(x2, tgt, y2)}
        return out

    by_deg: dict[int, list] = {}
    for t in triples:
        by_deg.setdefault(delta2[t], []).append(t)
    # d^2 = 0 check and homology per (degree, alexander) class
    images = {t: moves(t) for t in triples}
    for t, img in images.items():
        sq: set = set()
        for t2 in img:
            assert delta2[t2] == delta2[t] + 2, (t, t2)
            assert alex(t2) == alex(t), f"pairing breaks Alexander: {t}->{t2}"
            sq ^= images[t2]
        assert not sq, f"pairing differential does not square to zero at {t}"

    table = GradedTable()
    degrees = sorted(by_deg)
    for d in degrees:
        classes = sorted({alex(t) for t in by_deg[d]})
        for cls in classes:
            here = [t for t in by_deg[d] if alex(t) == cls]
            below = [t for t in by_deg.get(d - 2, []) if alex(t) == cls]
            above = by_deg.get(d + 2, [])
            idx_above = {t: i for i, t in enumerate(above)}
            a_out = f2lin.zeros(len(above), len(here))
            for j, t in enumerate(here):
                for t2 in images[t]:
                    a_out[idx_above[t2], j] ^= 1
            idx_here = {t: i for i, t in enumerate(here)}
            a_in = f2lin.zeros(len(here), len(below))
            for j, t in enumerate(below):
                for t2 in images[t]:
                    if t2 in idx_here:
                        a_in[idx_here[t2], j] ^= 1
            h = f2lin.kernel_dim(a_out) - f2lin.rank(a_in)
            if h:
                table.add(d, cls, h)

    i, ncomp = stabilization_exponent(m1, m2)
    return {
        "table": table,
        "stabilization_exponent": i,
        "components": ncomp,
        "alexander_solved": solved is not None,
    }


# ---------------------------------------------------------------------------
# morphism pairing


def mor_pair(m1: PqModule, m2: PqModule,
             window_cap: int | None = None) -> dict:
    """Pairing through H(Mor(mirror(m1), m2))."""
    mr1 = m1.reduce().mirror()
    table = morcx.mor_homology(mr1, m2.reduce(), window_cap=window_cap)
    i, ncomp = stabilization_exponent(m1, m2)
    return {"table": table, "stabilization_exponent": i, "components": ncomp}


# ---------------------------------------------------------------------------
# geometric pairing


def lagrangian_pair(c1, c2) -> dict:
    """Total intersection count of two curve sets.

    Non-parallel loops contribute rank * rank * min_intersection of the
    words.  Parallel ones contribute twice the local-system correction,
    plus two crossings per self-crossing of the underlying curve: pushing
    one copy off the other turns every self-crossing into a pair of
    honest intersection points between the copies.
    """
    pairs = []
    total = 0
    for i1, l1 in enumerate(c1):
        for i2, l2 in enumerate(c2):
            if curvekit.words_parallel(l1.word, l2.word):
                d = (2 * f2lin.parallel_correction(l1.local_system(),
                                                   l2.local_system())
                     + 2 * curvekit.self_intersections(l1.word)
                     * l1.rank * l2.rank)
            else:
                d = (l1.rank * l2.rank
                     * curvekit.min_intersection(l1.word, l2.word))
            pairs.append({"loops": [i1, i2], "dim": d})
            total += d
    return {"total": total, "pairs": pairs}


def curves_pair(m1: PqModule, m2: PqModule) -> dict:
    c1 = curvekit.curves(m1.reduce().mirror())
    c2 = curvekit.curves(m2)
    out = lagrangian_pair(c1, c2)
    i, ncomp = stabilization_exponent(m1, m2)
    out.update(stabilization_exponent=i, components=ncomp)
    return out


def min_intersection(w1, w2) -> int:
    return curvekit.min_intersection(w1, w2)


# ---------------------------------------------------------------------------
# closing off one tangle


_OMEGA_ONE = {("p", 1), ("p", 2), ("q", 3), ("q", 4)}


def omega_close(m: PqModule, rotation: int = 1) -> dict:
    """Close a tangle with two parallel arcs and take homology of the
    resulting complex.  The default (rotation 1) joins the d-a and b-c
    ends, the arcs hugging the a and c corners; rotation 0 joins a-b
    and c-d instead.

    The closure functional keeps the letters parallel to the new arcs
    (p1, p2, q3, q4 after rotation) and kills the others; generators pick
    up site-dependent grading shifts.
    """
    m = m.reduce()
    r = rotation % 4

    def omega(path: BasisPath) -> int:
        for i in path.letters():
            if (path.kind, _m4(i - r)) not in _OMEGA_ONE:
                return 0
        return 1

    # Grading shifts per site, solved from the surviving letters: along a
    # kept letter the shifted delta must step by one chord length and the
    # shifted Alexander grading must be constant.
    def shifts(site):
        base = _m4(site - r)
        zero = (0,) * m.matching.ncolours
        if base == 1:
            return 1, BasisPath("p", _m4(2 + r), 1).alexander2(m.matching)
        if base == 3:
            return 1, BasisPath("q", _m4(2 + r), 1).alexander2(m.matching)
        if base == 4:
            return 2, zero
        return 0, zero

    joins = [(_m4(1 + r), _m4(2 + r)), (_m4(3 + r), _m4(4 + r))]
    if m.matching.collapsed:
        comps = None
    else:
        comps = link_components(m.matching,
                                Matching(pairs=joins))
    gens = {}
    for g in m.gens.values():
        dd, da = shifts(g.site)
        gens[g.id] = (g.delta2 + dd, tuple(a + x for a, x in zip(g.alex2, da)))

    if comps is not None:
        # Orient the closed-up strands consistently: each closure arc must
        # connect an inward and an outward tangle end, reversing (negating
        # the Alexander coordinate of) a strand colour where needed.  The
        # anchoring matches the box-tensor pairing against a trivial tangle.
        solved = _solve_signs(m.matching.reversed(), Matching(pairs=joins))
        assert solved is not None, "closure is not orientable"
        _, s1, _s2 = solved
        sg = tuple(-s1[k] for k in range(m.matching.ncolours))
        # group the Alexander coordinates by closed-up link component, in
        # the same order the box-tensor pairing reports them
        groups = [[k for fac, k in tags if fac == 1] for tags in comps]
        gens = {g: (d, tuple(sum(sg[k] * a[k] for k in grp)
                             for grp in groups))
                for g, (d, a) in gens.items()}

    case = 2 if comps is not None and len(comps) == 1 else 1

    images: dict[str, set] = {g: set() for g in gens}
    for (x, y), lab in m.arrows.items():
        n = sum(omega(p) for p in lab.paths) % 2
        if n:
            images[x] ^= {y}
    for x, img in images.items():
        sq: set = set()
        for y in img:
            assert gens[y][0] == gens[x][0] + 2, "closure breaks delta"
            assert gens[y][1] == gens[x][1], "closure breaks alexander"
            sq ^= images[y]
        assert not sq, "closure differential does not square to zero"

    by_deg: dict[int, list] = {}
    for g, (d, _a) in gens.items():
        by_deg.setdefault(d, []).append(g)
    table = GradedTable()
    for d in sorted(by_deg):
        classes = sorted({gens[g][1] for g in by_deg[d]})
        for cls in classes:
            here = [g for g in by_deg[d] if gens[g][1] == cls]
            below = [g for g in by_deg.get(d - 2, []) if gens[g][1] == cls]
            above = by_deg.get(d + 2, [])
            ia = {g: i for i, g in enumerate(above)}
            a_out = f2lin.zeros(len(above), len(here))
            for j, g in enumerate(here):
                for y in images[g]:
                    a_out[ia[y], j] ^= 1
            ih = {g: i for i, g in enumerate(here)}
            a_in = f2lin.zeros(len(here), len(below))
            for j, g in enumerate(below):
                for y in images[g]:
                    if y in ih:
                        a_in[ih[y], j] ^= 1
            h = f2lin.kernel_dim(a_out) - f2lin.rank(a_in)
            if h:
                table.add(d, cls, h)
    return {"table": table, "case": case,
            "stabilization_exponent": 1 if case == 2 else 0}
