"""
Curved complexes over the arc algebra: generators, arrows, validation,
reduction and the standard functors (mirror, reverse, shift, cone, collapse).

A module is a finite set of generators, each sitting at a site of the
4-punctured sphere with a doubled delta grading and a doubled Alexander
vector, together with F2 arrows labelled by algebra elements.  Validity means
every label respects idempotents and both gradings, and the square of the
differential is the curvature (p^4 + q^4, reduced modulo any killed letters)
times the identity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import pqalg
from .pqalg import (
    SITES,
    SITE_NAMES,
    NAME_SITES,
    AlgElem,
    BasisPath,
    Matching,
    curvature,
    kill_letters,
    parse_path,
)


@dataclass(frozen=True)
class Generator:
    id: str
    site: int
    delta2: int
    alex2: tuple[int, ...]

    def __post_init__(self):
        assert self.site in SITES
        object.__setattr__(self, "alex2", tuple(int(a) for a in self.alex2))


class PqModule:
    """A curved type-D module over the arc algebra."""

    def __init__(self, name: str, matching: Matching, killed=()):
        self.name = name
        self.matching = matching
        self.killed = frozenset(killed)
        self.gens: dict[str, Generator] = {}
        self.arrows: dict[tuple[str, str], AlgElem] = {}

    # -- construction -----------------------------------------------------

    def add_gen(self, gid: str, site, delta2: int, alex2) -> Generator:
        if isinstance(site, str):
            site = NAME_SITES[site]
        if gid in self.gens:
            raise ValueError(f"duplicate generator {gid!r}")
        g = Generator(gid, site, int(delta2), tuple(alex2))
        if len(g.alex2) != self.matching.ncolours:
            raise ValueError(f"{gid}: alexander vector has wrong length")
        self.gens[gid] = g
        return g

    def add_arrow(self, frm: str, to: str, label: AlgElem | BasisPath) -> None:
        if isinstance(label, BasisPath):
            label = AlgElem([label])
        label = kill_letters(label, self.killed)
        if not label:
            return
        key = (frm, to)
        acc = self.arrows.get(key, pqalg.ZERO) + label
        if acc:
            self.arrows[key] = acc
        else:
            self.arrows.pop(key, None)

    def mul(self, a: AlgElem, b: AlgElem) -> AlgElem:
        return kill_letters(a * b, self.killed)

    # -- views ------------------------------------------------------------

    def __len__(self):
        return len(self.gens)

    def gen_ids(self) -> list[str]:
        return list(self.gens)

    def arrows_from(self, gid: str):
        return [(k[1], v) for k, v in self.arrows.items() if k[0] == gid]

    def arrows_to(self, gid: str):
        return [(k[0], v) for k, v in self.arrows.items() if k[1] == gid]

    def copy(self, name: str | None = None) -> "PqModule":
        out = PqModule(name or self.name, self.matching, self.killed)
        out.gens = dict(self.gens)
        out.arrows = dict(self.arrows)
        return out

    def renamed(self, fn, name: str | None = None) -> "PqModule":
        out = PqModule(name or self.name, self.matching, self.killed)
        for g in self.gens.values():
            out.add_gen(fn(g.id), g.site, g.delta2, g.alex2)
        for (x, y), lab in self.arrows.items():
            out.add_arrow(fn(x), fn(y), lab)
        return out

    def graded_table(self) -> "GradedTable":
        t = GradedTable()
        for g in self.gens.values():
            t.add(g.delta2, g.alex2)
        return t

    # -- validation -------------------------------------------------------

    def validate(self) -> list[str]:
        errs: list[str] = []
        for (x, y), lab in self.arrows.items():
            if x not in self.gens or y not in self.gens:
                errs.append(f"arrow {x}->{y}: unknown generator")
                continue
            gx, gy = self.gens[x], self.gens[y]
            for path in lab.paths:
                if path.source != gx.site or path.target != gy.site:
                    errs.append(f"arrow {x}->{y}: label {path} has wrong "
                                f"idempotents for sites {gx.site}->{gy.site}")
                if gy.delta2 - gx.delta2 + path.delta2 != 2:
                    errs.append(f"arrow {x}->{y}: label {path} breaks the "
                                "delta grading")
                pa = path.alexander2(self.matching)
                if any(b - a + w for a, b, w in zip(gx.alex2, gy.alex2, pa)):
                    errs.append(f"arrow {x}->{y}: label {path} breaks the "
                                "alexander grading")
        if errs:
            return errs
        curv = kill_letters(curvature(), self.killed)
        by_src: dict[str, list[tuple[str, AlgElem]]] = {g: [] for g in self.gens}
        for (x, y), lab in self.arrows.items():
            by_src[x].append((y, lab))
        for x in self.gens:
            acc: dict[str, AlgElem] = {}
            for y, first in by_src[x]:
                for z, second in by_src[y]:
                    prod = self.mul(second, first)
                    if prod:
                        acc[z] = acc.get(z, pqalg.ZERO) + prod
            site = self.gens[x].site
            want = AlgElem(p for p in curv.paths if p.source == site)
            for z, total in acc.items():
                expect = want if z == x else pqalg.ZERO
                if total != expect:
                    errs.append(f"d^2 at {x}->{z}: got {total}, "
                                f"expected {expect}")
        return errs

    def check(self) -> "PqModule":
        errs = self.validate()
        if errs:
            raise ValueError(f"invalid module {self.name!r}: " + "; ".join(errs))
        return self

    # -- reduction ---------------------------------------------------------

    def reduce(self) -> "PqModule":
        """Cancel all invertible (idempotent-labelled) arrows."""
        out = self.copy()
        while True:
            target = None
            for key in sorted(out.arrows):
                lab = out.arrows[key]
                if len(lab.paths) == 1 and next(iter(lab.paths)).kind == "i":
                    target = key
                    break
            if target is None:
                return out
            out._cancel(*target)

    def _cancel(self, y1: str, y2: str) -> None:
        incoming = [(z, lab) for (z, t), lab in self.arrows.items()
                    if t == y2 and z not in (y1, y2)]
        outgoing = [(z, lab) for (f, z), lab in self.arrows.items()
                    if f == y1 and z not in (y1, y2)]
        self.arrows = {k: v for k, v in self.arrows.items()
                       if y1 not in k and y2 not in k}
        del self.gens[y1]
        del self.gens[y2]
        for z, c in incoming:
            for z2, b in outgoing:
                self.add_arrow(z, z2, self.mul(b, c))

    # -- functors ------------------------------------------------------------

    def mirror(self, name: str | None = None) -> "PqModule":
        """The mirror: gradings negate, each label is replaced by the
        complementary path through the other face."""
        out = PqModule(name or f"mr({self.name})", self.matching, self.killed)
        for g in self.gens.values():
            out.add_gen(g.id, g.site, -g.delta2, tuple(-a for a in g.alex2))
        for (x, y), lab in self.arrows.items():
            paths = []
            for p in lab.paths:
                if p.kind == "i":
                    raise ValueError("mirror of an unreduced identity arrow")
                kind = "q" if p.kind == "p" else "p"
                paths.append(BasisPath(kind, p.start, 4 - p.length))
            out.add_arrow(x, y, AlgElem(paths))
        return out

    def reverse(self, name: str | None = None) -> "PqModule":
        """Reverse all strand orientations: Alexander gradings negate and the
        matching swaps inward/outward ends; arrows are untouched."""
        out = PqModule(name or f"rr({self.name})", self.matching.reversed(),
                       self.killed)
        for g in self.gens.values():
            out.add_gen(g.id, g.site, g.delta2, tuple(-a for a in g.alex2))
        out.arrows = dict(self.arrows)
        return out

    def shifted(self, ddelta2: int = 0, dalex2=None,
                name: str | None = None) -> "PqModule":
        if dalex2 is None:
            dalex2 = (0,) * self.matching.ncolours
        out = PqModule(name or self.name, self.matching, self.killed)
        for g in self.gens.values():
            out.add_gen(g.id, g.site, g.delta2 + ddelta2,
                        tuple(a + d for a, d in zip(g.alex2, dalex2)))
        out.arrows = dict(self.arrows)
        return out

    def collapsed(self, name: str | None = None) -> "PqModule":
        """Single-variable Alexander grading t = t1 t2."""
        if self.matching.collapsed:
            return self.copy(name)
        out = PqModule(name or self.name, self.matching.collapse(), self.killed)
        for g in self.gens.values():
            out.add_gen(g.id, g.site, g.delta2, (sum(g.alex2),))
        out.arrows = dict(self.arrows)
        return out

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        doc = {
            "name": self.name,
            "matching": self.matching.to_json(),
            "generators": [
                {"id": g.id, "site": SITE_NAMES[g.site], "delta2": g.delta2,
                 "alex2": list(g.alex2)}
                for g in self.gens.values()
            ],
            "arrows": [
                {"from": x, "to": y,
                 "label": [str(p) for p in sorted(lab.paths)]}
                for (x, y), lab in sorted(self.arrows.items())
            ],
        }
        if self.killed:
            doc["algebra"] = {"kill": sorted(f"{k}{i}" for k, i in self.killed)}
        return doc

    @staticmethod
    def from_json(doc: dict) -> "PqModule":
        matching = Matching.from_json(doc["matching"])
        killed = ()
        if "algebra" in doc and doc["algebra"].get("kill"):
            killed = [pqalg.parse_letter(t) for t in doc["algebra"]["kill"]]
        m = PqModule(doc.get("name", "module"), matching, killed)
        for g in doc["generators"]:
            m.add_gen(g["id"], g["site"], g["delta2"], g["alex2"])
        for a in doc["arrows"]:
            src_site = m.gens[a["from"]].site
            lab = AlgElem(parse_path(t, site_hint=src_site) for t in a["label"])
            m.add_arrow(a["from"], a["to"], lab)
        return m

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"

    @staticmethod
    def loads(text: str) -> "PqModule":
        return PqModule.from_json(json.loads(text))

    def __repr__(self):
        return (f"PqModule({self.name!r}, {len(self.gens)} gens, "
                f"{len(self.arrows)} arrows)")


class Morphism:
    """An F2 map between modules with components labelled in the algebra.

    Components are stored as (src_gen, tgt_gen) -> AlgElem, labels living in
    iota_{site(tgt)} . Ad . iota_{site(src)} like module arrows.
    """

    def __init__(self, src: PqModule, tgt: PqModule, components=None):
        self.src = src
        self.tgt = tgt
        self.components: dict[tuple[str, str], AlgElem] = {}
        for key, lab in (components or {}).items():
            self.add(key[0], key[1], lab)

    def add(self, x: str, y: str, label) -> None:
        if isinstance(label, BasisPath):
            label = AlgElem([label])
        label = kill_letters(label, self.src.killed)
        if not label:
            return
        acc = self.components.get((x, y), pqalg.ZERO) + label
        if acc:
            self.components[(x, y)] = acc
        else:
            self.components.pop((x, y), None)


def mapping_cone(f: Morphism, name: str | None = None) -> PqModule:
    """Cone of a degree-raising morphism (delta2-degree 2 components).

    Source generators keep their ids with suffix "/s", target with "/t";
    validity (including d^2 = curvature) is checked by the caller's
    validate(), which enforces that f is a chain map of the right degree.
    """
    src, tgt = f.src, f.tgt
    if src.matching._w != tgt.matching._w:
        raise ValueError("cone factors must share Alexander weights")
    out = PqModule(name or f"cone({src.name})", src.matching,
                   src.killed | tgt.killed)
    for g in src.gens.values():
        out.add_gen(g.id + "/s", g.site, g.delta2, g.alex2)
    for g in tgt.gens.values():
        out.add_gen(g.id + "/t", g.site, g.delta2, g.alex2)
    for (x, y), lab in src.arrows.items():
        out.add_arrow(x + "/s", y + "/s", lab)
    for (x, y), lab in tgt.arrows.items():
        out.add_arrow(x + "/t", y + "/t", lab)
    for (x, y), lab in f.components.items():
        out.add_arrow(x + "/s", y + "/t", lab)
    return out


def tensor_v(m: PqModule, gradings, name: str | None = None) -> PqModule:
    """Tensor with a graded F2 vector space: one shifted copy of m per
    (delta2, alex2) pair in gradings, e.g. ((0, (2,)), (0, (-2,)))."""
    gradings = list(gradings)
    out = PqModule(name or f"{m.name}(x)V", m.matching, m.killed)
    for k, (dd2, da2) in enumerate(gradings):
        shift = m.shifted(dd2, tuple(da2)).renamed(lambda g, k=k: f"{g}#{k}")
        for g in shift.gens.values():
            out.add_gen(g.id, g.site, g.delta2, g.alex2)
        for (x, y), lab in shift.arrows.items():
            out.add_arrow(x, y, lab)
    return out


def clean_up(m: PqModule, h: Morphism, name: str | None = None) -> PqModule:
    """Basis change by 1 + h (h a degree-preserving endomorphism with
    h^2 = 0): the differential becomes (1+h) d (1+h)."""
    if h.src is not m or h.tgt is not m:
        raise ValueError("clean_up needs an endomorphism of m")
    for (x, y), lab in h.components.items():
        for (y2, z), lab2 in h.components.items():
            if y2 == y and m.mul(lab2, lab):
                raise ValueError("clean_up needs h^2 = 0")
    out = m.copy(name)
    # d' = d + h d + d h + h d h
    for (x, y), dlab in m.arrows.items():
        for (y2, z), hlab in h.components.items():
            if y2 == y:
                out.add_arrow(x, z, m.mul(hlab, dlab))
        for (w, x2), hlab in h.components.items():
            if x2 == x:
                out.add_arrow(w, y, m.mul(dlab, hlab))
        for (y2, z), h2 in h.components.items():
            if y2 != y:
                continue
            for (w, x2), h1 in h.components.items():
                if x2 == x:
                    out.add_arrow(w, z, m.mul(h2, m.mul(dlab, h1)))
    return out.check()


def quotient_module(m: PqModule, killed, name: str | None = None) -> PqModule:
    """Push a module to the quotient algebra with the given letters killed."""
    killed = frozenset(pqalg.parse_letter(k) if isinstance(k, str) else
                       (k[0], int(k[1])) for k in killed)
    out = PqModule(name or m.name, m.matching, m.killed | killed)
    out.gens = dict(m.gens)
    for (x, y), lab in m.arrows.items():
        out.add_arrow(x, y, lab)
    return out


class GradedTable:
    """Dimension counts indexed by (delta2, alex2 vector)."""

    def __init__(self, counts=None):
        self.counts: dict[tuple[int, tuple[int, ...]], int] = {}
        for key, n in (counts or {}).items():
            self.add(key[0], key[1], n)

    def add(self, delta2: int, alex2, n: int = 1) -> None:
        key = (int(delta2), tuple(int(a) for a in alex2))
        self.counts[key] = self.counts.get(key, 0) + n
        if self.counts[key] == 0:
            del self.counts[key]

    def total(self) -> int:
        return sum(self.counts.values())

    def __eq__(self, other):
        return isinstance(other, GradedTable) and self.counts == other.counts

    def __repr__(self):
        return f"GradedTable({dict(sorted(self.counts.items()))})"

    def normalized(self) -> "GradedTable":
        """Shift delta2 so the minimum is 0 and center each Alexander
        coordinate (gradings are only relative)."""
        if not self.counts:
            return GradedTable()
        dmin = min(d for d, _ in self.counts)
        ncoord = len(next(iter(self.counts))[1])
        shifts = []
        for k in range(ncoord):
            vals = [a[k] for _, a in self.counts]
            shifts.append((min(vals) + max(vals)) // 2)
        out = GradedTable()
        for (d, a), n in self.counts.items():
            out.add(d - dmin, tuple(x - s for x, s in zip(a, shifts)), n)
        return out

    def tensor_v(self, power: int = 1) -> "GradedTable":
        """Tensor with V = F2 (delta 0) + F2 (delta 1), Alexander trivial."""
        out = self
        for _ in range(power):
            nxt = GradedTable()
            for (d, a), n in out.counts.items():
                nxt.add(d, a, n)
                nxt.add(d + 2, a, n)
            out = nxt
        return out

    def collapsed(self) -> "GradedTable":
        out = GradedTable()
        for (d, a), n in self.counts.items():
            out.add(d, (sum(a),), n)
        return out

    def delta_totals(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for (d, _), n in self.counts.items():
            out[d] = out.get(d, 0) + n
        return out

    def to_json(self) -> list:
        return [
            {"delta2": d, "alex2": list(a), "dim": n}
            for (d, a), n in sorted(self.counts.items())
        ]

    @staticmethod
    def from_json(rows) -> "GradedTable":
        out = GradedTable()
        for r in rows:
            out.add(r["delta2"], r["alex2"], r["dim"])
        return out
