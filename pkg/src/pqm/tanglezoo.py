"""
A zoo of tangle invariants: the trivial tangles, single crossings, twist
regions, (2n, -2m-1)-pretzel tangles, rational tangles of arbitrary slope,
figure-eight-like cone tangles, site relabelling symmetries and the skein
exact-triangle morphisms.
"""

from __future__ import annotations

from fractions import Fraction

from . import curvekit
from .pqalg import (
    BACK,
    FRONT,
    Matching,
    _m4,
    idem,
    ppath,
    qpath,
)
from .pqmod import Morphism, PqModule

MATCH_ODD = Matching(pairs=[(2, 4), (3, 1)])
MATCH_EVEN = Matching(pairs=[(2, 1), (3, 4)])
MATCH_ZERO = Matching(pairs=[(1, 2), (3, 4)])
MATCH_INF = Matching(pairs=[(2, 3), (4, 1)])
# one closed component through all four ends, single variable
WEIGHTS_LOOP = Matching(weights={1: -1, 2: 1, 3: 1, 4: -1})


def zero_tangle() -> PqModule:
    m = PqModule("zero", MATCH_ZERO)
    m.add_gen("b", "b", 0, (0, 0))
    m.add_gen("d", "d", 0, (0, 0))
    m.add_arrow("d", "b", ppath(4, 2))
    m.add_arrow("d", "b", qpath(4, 2))
    m.add_arrow("b", "d", ppath(2, 2))
    m.add_arrow("b", "d", qpath(2, 2))
    return m.check()


def inf_tangle() -> PqModule:
    m = PqModule("inf", MATCH_INF)
    m.add_gen("a", "a", 0, (0, 0))
    m.add_gen("c", "c", 0, (0, 0))
    m.add_arrow("a", "c", ppath(1, 2))
    m.add_arrow("a", "c", qpath(1, 2))
    m.add_arrow("c", "a", ppath(3, 2))
    m.add_arrow("c", "a", qpath(3, 2))
    return m.check()


def crossing_plus() -> PqModule:
    m = PqModule("x+", MATCH_ODD)
    m.add_gen("a", "a", 0, (1, -1))
    m.add_gen("d", "d", 1, (1, 1))
    m.add_gen("b", "b", 1, (-1, -1))
    m.add_gen("c", "c", 0, (-1, 1))
    m.add_arrow("d", "a", ppath(4, 3))
    m.add_arrow("b", "a", qpath(2, 3))
    m.add_arrow("a", "d", ppath(1, 1))
    m.add_arrow("c", "d", qpath(3, 1))
    m.add_arrow("c", "b", ppath(3, 1))
    m.add_arrow("a", "b", qpath(1, 1))
    m.add_arrow("b", "c", ppath(2, 3))
    m.add_arrow("d", "c", qpath(4, 3))
    return m.check()


def crossing_minus() -> PqModule:
    return crossing_plus().mirror(name="x-").check()


def twist_tangle(n: int) -> PqModule:
    """The invariant of a vertical region of n half-twists (n != 0)."""
    if n == 0:
        raise ValueError("twist region needs n != 0")
    if n < 0:
        return twist_tangle(-n).mirror(name=f"twist:{n}").check()
    m = PqModule(f"twist:{n}", MATCH_ODD if n % 2 else MATCH_EVEN)
    m.add_gen("b", "b", 0, (-n, -n))
    m.add_gen("d", "d", 0, (n, n))
    chains = {}
    for chain, start_site, off in (("A", 3, -1), ("B", 1, 1)):
        ids = []
        for k in range(n):
            e = 1 - n + 2 * k
            site = start_site if k % 2 == 0 else 4 - start_site
            gid = f"{chain}{k}"
            m.add_gen(gid, site, -1, (e + off, e - off))
            ids.append((gid, site))
        chains[chain] = ids
    for ids in chains.values():
        first, fsite = ids[0]
        if fsite == 3:  # c-type end at b
            m.add_arrow(first, "b", ppath(3, 1))
            m.add_arrow("b", first, ppath(2, 3))
        else:  # a-type end at b
            m.add_arrow(first, "b", qpath(1, 1))
            m.add_arrow("b", first, qpath(2, 3))
        last, lsite = ids[-1]
        if lsite == 3:  # c-type end at d
            m.add_arrow(last, "d", qpath(3, 1))
            m.add_arrow("d", last, qpath(4, 3))
        else:  # a-type end at d
            m.add_arrow(last, "d", ppath(1, 1))
            m.add_arrow("d", last, ppath(4, 3))
        for (lo, lo_site), (hi, _hi_site) in zip(ids, ids[1:]):
            if lo_site == 3:  # q-link c -> a
                m.add_arrow(lo, hi, qpath(3, 2))
                m.add_arrow(hi, lo, qpath(1, 2))
            else:  # p-link a -> c
                m.add_arrow(lo, hi, ppath(1, 2))
                m.add_arrow(hi, lo, ppath(3, 2))
    return m.check()


def skein_morphism(n: int) -> Morphism:
    """The skein triangle map twist(n) -> twist(-n) (collapsed Alexander);
    its cone is the 2n-twisted zero tangle, i.e. zero (x) V(t^n, t^-n)."""
    if n <= 0:
        raise ValueError("skein morphism needs n >= 1")
    src = twist_tangle(n).collapsed()
    tgt = twist_tangle(-n).collapsed()
    f = Morphism(src, tgt)
    f.add("b", "d", ppath(2, 2))
    f.add("b", "d", qpath(2, 2))
    f.add("d", "b", ppath(4, 2))
    f.add("d", "b", qpath(4, 2))
    # chain generators pair up by site and Alexander grading
    for gid, g in src.gens.items():
        if gid in ("b", "d"):
            continue
        partners = [h.id for h in tgt.gens.values()
                    if h.id not in ("b", "d")
                    and h.site == g.site and h.alex2 == g.alex2]
        assert len(partners) == 1, (gid, partners)
        f.add(gid, partners[0], idem(g.site))
    return f


def fig8_tangle(variant: str) -> PqModule:
    """The two clasp-like tangles arising as cones of the singular-crossing
    resolution maps (single-variable Alexander grading)."""
    m = PqModule(f"fig8:{variant}", WEIGHTS_LOOP)
    if variant == "a":
        m.add_gen("a", "a", 0, (0,))
        m.add_gen("b+", "b", -1, (2,))
        m.add_gen("b-", "b", 1, (-2,))
        m.add_gen("c", "c", 0, (0,))
        m.add_arrow("b-", "a", qpath(2, 3))
        m.add_arrow("a", "b-", qpath(1, 1))
        m.add_arrow("b+", "a", ppath(2, 1))
        m.add_arrow("a", "b+", ppath(1, 3))
        m.add_arrow("b+", "c", qpath(2, 1))
        m.add_arrow("c", "b+", qpath(3, 3))
        m.add_arrow("b-", "c", ppath(2, 3))
        m.add_arrow("c", "b-", ppath(3, 1))
    elif variant == "b":
        m.add_gen("a", "a", 0, (0,))
        m.add_gen("d+", "d", 1, (2,))
        m.add_gen("d-", "d", -1, (-2,))
        m.add_gen("c", "c", 0, (0,))
        m.add_arrow("d-", "a", qpath(4, 1))
        m.add_arrow("a", "d-", qpath(1, 3))
        m.add_arrow("d+", "a", ppath(4, 3))
        m.add_arrow("a", "d+", ppath(1, 1))
        m.add_arrow("d+", "c", qpath(4, 3))
        m.add_arrow("c", "d+", qpath(3, 1))
        m.add_arrow("d-", "c", ppath(4, 1))
        m.add_arrow("c", "d-", ppath(3, 3))
    else:
        raise ValueError(f"unknown fig8 variant {variant!r}")
    return m.check()


def singular_resolution() -> PqModule:
    """The trivial-tangle module appearing as the target of the two
    singular-crossing resolution maps (single variable)."""
    m = PqModule("singular", WEIGHTS_LOOP)
    m.add_gen("d", "d", 1, (2,))
    m.add_gen("a", "a", 0, (0,))
    m.add_gen("c", "c", 0, (0,))
    m.add_gen("b", "b", 1, (-2,))
    m.add_arrow("c", "d", qpath(3, 1))
    m.add_arrow("d", "c", qpath(4, 3))
    m.add_arrow("d", "a", ppath(4, 3))
    m.add_arrow("a", "d", ppath(1, 1))
    m.add_arrow("c", "b", ppath(3, 1))
    m.add_arrow("b", "c", ppath(2, 3))
    m.add_arrow("a", "b", qpath(1, 1))
    m.add_arrow("b", "a", qpath(2, 3))
    return m.check()


def singular_cone(variant: str) -> PqModule:
    """Cone of a singular-crossing resolution map; homotopy equivalent to
    the matching fig8 tangle."""
    tgt = singular_resolution()
    src = PqModule(f"clasp:{variant}", WEIGHTS_LOOP)
    if variant == "a":
        src.add_gen("d", "d", -1, (2,))
        src.add_gen("b", "b", -1, (2,))
    elif variant == "b":
        src.add_gen("d", "d", -1, (-2,))
        src.add_gen("b", "b", -1, (-2,))
    else:
        raise ValueError(f"unknown variant {variant!r}")
    src.add_arrow("d", "b", ppath(4, 2))
    src.add_arrow("d", "b", qpath(4, 2))
    src.add_arrow("b", "d", ppath(2, 2))
    src.add_arrow("b", "d", qpath(2, 2))
    src.check()
    f = Morphism(src, tgt)
    if variant == "a":
        f.add("d", "d", idem(4))
        f.add("b", "a", ppath(2, 1))
        f.add("b", "c", qpath(2, 1))
    else:
        f.add("b", "b", idem(2))
        f.add("d", "c", ppath(4, 1))
        f.add("d", "a", qpath(4, 1))
    from .pqmod import mapping_cone
    return mapping_cone(f, name=f"singular-cone:{variant}").check()


def pretzel_tangle(n: int, m: int) -> PqModule:
    """The (2n, -2m-1)-pretzel tangle invariant (n, m >= 1)."""
    if n < 1 or m < 1:
        raise ValueError("pretzel parameters must be >= 1")
    mod = PqModule(f"pretzel:{n},{m}", MATCH_EVEN)
    width, height = 2 * n, 2 * m + 1

    def alpha(i, j):
        if i % 2:  # i = 2k+1
            k = (i - 1) // 2
            return (n - 1 - 2 * k, -n - 2 * m + 2 * (j - 1) + 2 * k)
        k = (i - 2) // 2
        return (n - 1 - 2 * k, -n - 2 * m + 2 * j + 2 * k)

    raw: dict[str, tuple] = {}
    sites: dict[str, int] = {}
    deltas: dict[str, int] = {}

    def put(gid, site, delta2, a):
        raw[gid] = a
        sites[gid] = site
        deltas[gid] = delta2

    for i in range(1, width + 1):
        for j in range(1, height + 1):
            put(f"a{i}y{j}", 1, -3, alpha(i, j))
            off = (1, 1) if i % 2 else (-1, -1)
            put(f"x{i}c{j}", 3, -3,
                tuple(x + o for x, o in zip(alpha(i, j), off)))
    for j in range(2, height + 1):
        put(f"d'y{j}", 4, -2,
            tuple(x + o for x, o in zip(alpha(1, j), (1, 0))))
    for i in range(2, width + 1):
        put(f"x{i}d", 4, -4,
            tuple(x + o for x, o in zip(alpha(i - 1, 1), (-1, 0))))
    for i in range(1, width):
        put(f"x{i}b", 2, -4,
            tuple(x + o for x, o in zip(alpha(i + 1, height), (1, 0))))
    for j in range(1, height):
        put(f"b'y{j}", 2, -2,
            tuple(x + o for x, o in zip(alpha(width, j), (-1, 0))))

    # center each Alexander coordinate and store doubled
    shifts = []
    for k in range(2):
        vals = [a[k] for a in raw.values()]
        shifts.append(Fraction(min(vals) + max(vals), 2))
    for gid, a in raw.items():
        doubled = tuple(int(2 * (x - s)) for x, s in zip(a, shifts))
        mod.add_gen(gid, sites[gid], deltas[gid], doubled)

    edges = []
    edges.append(("x1c1", "a1y1", "p"))
    for j in range(2, height + 1):
        edges.append((f"d'y{j}", f"a1y{j}", "p"))
    for i in range(2, width + 1):
        for j in range(1, height):
            edges.append((f"x{i - 1}c{j + 1}", f"a{i}y{j}", "p"))
    for i in range(2, width + 1):
        edges.append((f"x{i - 1}b", f"a{i}y{height}", "p"))
    for i in range(2, width + 1):
        edges.append((f"x{i}d", f"x{i}c1", "p"))
    for j in range(2, height + 1):
        edges.append((f"x{width}c{j}", f"b'y{j - 1}", "p"))
    for j in range(1, height):
        edges.append((f"x1c{j}", f"d'y{j + 1}", "q"))
    for i in range(2, width + 1):
        for j in range(1, height):
            edges.append((f"x{i}c{j}", f"a{i - 1}y{j + 1}", "q"))
    for i in range(1, width):
        edges.append((f"x{i}b", f"x{i}c{height}", "q"))
    for i in range(2, width + 1):
        edges.append((f"x{i}d", f"a{i - 1}y1", "q"))
    for j in range(1, height):
        edges.append((f"b'y{j}", f"a{width}y{j}", "q"))
    edges.append((f"x{width}c{height}", f"a{width}y{height}", "q"))

    # Strings of same-weight a/c generators run past the d- and b-corner
    # staircases without crossing each other; at every second step of each
    # staircase this exchanges the partners of the two parallel strands.
    def swap(old1, old2, new1, new2):
        edges[edges.index(old1)] = new1
        edges[edges.index(old2)] = new2

    for i in range(3, width + 1, 2):
        swap((f"x{i}d", f"x{i}c1", "p"),
             (f"x{i - 1}c2", f"a{i}y1", "p"),
             (f"x{i}d", f"x{i - 1}c2", "p"),
             (f"x{i}c1", f"a{i}y1", "p"))
    for i in range(2, width, 2):
        swap((f"x{i}b", f"x{i}c{height}", "q"),
             (f"x{i + 1}c{height - 1}", f"a{i}y{height}", "q"),
             (f"x{i}b", f"x{i + 1}c{height - 1}", "q"),
             (f"x{i}c{height}", f"a{i}y{height}", "q"))

    for g, h, kind in edges:
        for src, tgt in ((g, h), (h, g)):
            length = 2 + deltas[src] - deltas[tgt]
            path = (ppath(sites[src], length) if kind == "p"
                    else qpath(sites[src], length))
            mod.add_arrow(src, tgt, path)
    return mod.check()


# ---------------------------------------------------------------------------
# rational tangles


def rational_tangle(p: int, q: int) -> PqModule:
    """The tangle of slope p/q, built as the embedded pillowcase line of
    direction (p, q) through the half-integer point between the d and b
    ends; closures of grid lines spell the loop word directly."""
    from math import gcd

    if q < 0:
        p, q = -p, -q
    if q == 0 and p == 0:
        raise ValueError("slope 0/0 is not a tangle")
    g = gcd(abs(p), abs(q)) or 1
    p, q = p // g, q // g
    word = _line_word(p, q)
    if q % 2 == 0:
        matching = MATCH_INF
    elif p % 2 == 0:
        matching = MATCH_EVEN
    else:
        matching = MATCH_ODD
    anchor_alex = _close_alexander(word, matching)
    mod = curvekit.build_from_loops(
        [curvekit.Loop(word, ((1, 1),), 0, anchor_alex)], matching,
        name=f"rational:{p}/{q}")
    return mod.check()


def _line_word(p: int, q: int):
    """Crossing word of the (p, q) line on the pillowcase.

    Vertical grid lines carry the a (odd x) and c (even x) arcs, horizontal
    ones d (even y) and b (odd y); faces chequerboard with the front face on
    even parity squares.  A small generic offset of the basepoint avoids
    running through corners.
    """
    steps = 2 * (abs(p) + abs(q))
    big = 64 * (abs(p) + abs(q) + 1)
    x = Fraction(1, 2) + Fraction(1, big * big)
    y = Fraction(1, big * big * big)
    crossings = []
    for _ in range(steps):
        tx = _next_grid_time(x, p)
        ty = _next_grid_time(y, q)
        assert tx != ty, "line runs through a corner"
        t = min(v for v in (tx, ty) if v is not None)
        midx, midy = x + Fraction(p) * t / 2, y + Fraction(q) * t / 2
        face = FRONT if (_floor(midx) + _floor(midy)) % 2 == 0 else BACK
        x, y = x + p * t, y + q * t
        if t == tx:
            site = 1 if int(x) % 2 else 3  # vertical line: a or c
        else:
            site = 4 if int(y) % 2 == 0 else 2  # horizontal: d or b
        # record the face of the segment arriving at this crossing
        crossings.append((site, face))
    # word[t] = (site of strand t, face of the step leaving it)
    word = tuple((crossings[t][0], crossings[(t + 1) % steps][1])
                 for t in range(steps))
    return word


def _floor(f: Fraction) -> int:
    return f.numerator // f.denominator


def _next_grid_time(pos: Fraction, speed: int):
    """Time until the coordinate hits the next integer grid line."""
    if speed == 0:
        return None
    if speed > 0:
        nxt = _floor(pos) + 1
    else:
        nxt = _floor(pos) if pos != _floor(pos) else _floor(pos) - 1
    return Fraction(nxt - pos, speed)


def _close_alexander(word, matching):
    """Anchor Alexander grading: the loop closes for any anchor, so pick
    zero and recenter is left to consumers."""
    zero = (0,) * matching.ncolours
    curvekit.word_gradings(word, 0, zero, matching)
    return zero


# ---------------------------------------------------------------------------
# relabelling symmetries


def relabel_sites(mod: PqModule, perm: dict[int, int],
                  name: str | None = None) -> PqModule:
    """Transport a module along a symmetry of the parametrized boundary:
    rotations keep p/q kinds, reflections exchange them.  Any other site
    permutation is rejected."""
    perm = {int(k): int(v) for k, v in perm.items()}
    if sorted(perm) != [1, 2, 3, 4] or sorted(perm.values()) != [1, 2, 3, 4]:
        raise ValueError("perm must be a site permutation")
    if all(perm[s] == _m4(s + perm[1] - 1) for s in (1, 2, 3, 4)):
        rotation = True
    elif all(perm[s] == _m4(perm[1] + 1 - s) for s in (1, 2, 3, 4)):
        rotation = False
    else:
        raise ValueError("perm is not a symmetry of the 4-ended boundary")
    out = PqModule(name or f"relabel({mod.name})",
                   mod.matching.relabel(perm), mod.killed)
    for g in mod.gens.values():
        out.add_gen(g.id, perm[g.site], g.delta2, g.alex2)
    for (x, y), lab in mod.arrows.items():
        for path in lab.paths:
            if path.kind == "i":
                new = idem(perm[path.start])
            elif rotation:
                new = type(path)(path.kind, perm[path.start], path.length)
            else:
                kind = {"p": "q", "q": "p"}[path.kind]
                new = type(path)(kind, perm[path.start], path.length)
            out.add_arrow(x, y, new)
    return out.check()


def mutation(mod: PqModule, name: str | None = None) -> PqModule:
    """Rotation by a half turn: a <-> c, b <-> d."""
    return relabel_sites(mod, {1: 3, 2: 4, 3: 1, 4: 2}, name=name)


# ---------------------------------------------------------------------------
# named builders


def build(spec: str) -> PqModule:
    """Build a tangle invariant from a short spec string.

    Formats: "zero", "inf", "x+", "x-", "twist:n", "pretzel:n,m",
    "rational:p/q", "fig8:a", "fig8:b".
    """
    spec = spec.strip()
    if spec == "zero":
        return zero_tangle()
    if spec == "inf":
        return inf_tangle()
    if spec == "x+":
        return crossing_plus()
    if spec == "x-":
        return crossing_minus()
    if spec.startswith("twist:"):
        return twist_tangle(int(spec.split(":", 1)[1]))
    if spec.startswith("pretzel:"):
        n, m = (int(t) for t in spec.split(":", 1)[1].split(","))
        return pretzel_tangle(n, m)
    if spec.startswith("rational:"):
        frac = spec.split(":", 1)[1]
        if "/" in frac:
            p, q = (int(t) for t in frac.split("/"))
        else:
            p, q = int(frac), 1
        return rational_tangle(p, q)
    if spec.startswith("fig8:"):
        return fig8_tangle(spec.split(":", 1)[1])
    raise ValueError(f"unknown tangle spec {spec!r}")


ALL_BUILDERS = ("zero", "inf", "x+", "x-", "twist:1", "twist:2", "twist:3",
                "twist:-1", "twist:-2", "pretzel:1,1", "pretzel:2,1",
                "fig8:a", "fig8:b", "rational:1/2", "rational:3/2")
