"""
Exact arithmetic in the arc algebra of the 4-punctured sphere.

The algebra is the path algebra of the 4-cycle quiver on sites 1..4
(displayed a,b,c,d) with two families of arrows: p_i (site i -> i-1) and
q_i (site i-1 -> i), subject to p_i q_i = 0 = q_i p_i.  The standard basis
consists of the idempotents, the pure p-paths and the pure q-paths; a basis
path is stored canonically as (kind, source site, length).

Gradings: every p_i, q_i has delta 1/2 (stored doubled: delta2 = length).
Alexander weights per colour: the letter at the colour's inward site counts
+1, at its outward site -1 (stored doubled).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering

SITES = (1, 2, 3, 4)
SITE_NAMES = {1: "a", 2: "b", 3: "c", 4: "d"}
NAME_SITES = {v: k for k, v in SITE_NAMES.items()}

# face boundary cycles: the front face is carried by the p-letters
# (a->d->c->b->a via p1,p4,p3,p2), the back face by the q-letters
# (d->a->b->c->d via q1,q2,q3,q4).
FRONT, BACK = "F", "B"
FACES = (FRONT, BACK)


def _m4(i: int) -> int:
    return ((i - 1) % 4) + 1


@total_ordering
@dataclass(frozen=True)
class BasisPath:
    """A standard basis path: kind 'i' (idempotent), 'p' or 'q'.

    start is the source site; a p-path of length l runs start -> start-l,
    a q-path runs start -> start+l (sites mod 4).
    """

    kind: str
    start: int
    length: int

    def __post_init__(self):
        assert self.kind in ("i", "p", "q")
        assert self.start in SITES
        assert self.length >= 0
        assert (self.length == 0) == (self.kind == "i")

    @property
    def source(self) -> int:
        return self.start

    @property
    def target(self) -> int:
        if self.kind == "p":
            return _m4(self.start - self.length)
        if self.kind == "q":
            return _m4(self.start + self.length)
        return self.start

    def letters(self) -> tuple[int, ...]:
        """Letter indices in application order (first applied first)."""
        if self.kind == "p":
            return tuple(_m4(self.start - k) for k in range(self.length))
        if self.kind == "q":
            return tuple(_m4(self.start + k + 1) for k in range(self.length))
        return ()

    @property
    def delta2(self) -> int:
        return self.length

    def alexander2(self, matching: "Matching") -> tuple[int, ...]:
        acc = [0] * matching.ncolours
        for i in self.letters():
            for k, w in enumerate(matching.weight(i)):
                acc[k] += w
        return tuple(2 * a for a in acc)

    def __str__(self) -> str:
        if self.kind == "i":
            return f"1@{self.start}"
        if self.kind == "p":
            # printed ascending along the quiver: p_{(s-l+1)...s}
            idx = [_m4(self.start - self.length + 1 + k) for k in range(self.length)]
            return "p" + "".join(str(i) for i in idx)
        idx = [_m4(self.start + self.length - k) for k in range(self.length)]
        return "q" + "".join(str(i) for i in idx)

    def _key(self):
        return (self.kind, self.start, self.length)

    def __lt__(self, other):
        return self._key() < other._key()


def idem(site: int) -> BasisPath:
    return BasisPath("i", site, 0)


def ppath(source: int, length: int) -> BasisPath:
    return BasisPath("p", source, length)


def qpath(source: int, length: int) -> BasisPath:
    return BasisPath("q", source, length)


def multiply_paths(a: BasisPath, b: BasisPath) -> BasisPath | None:
    """Product a*b (b applied first); None when zero."""
    if b.kind == "i":
        return a if a.source == b.start else None
    if a.kind == "i":
        return b if b.target == a.start else None
    if a.kind != b.kind:
        return None
    if a.source != b.target:
        return None
    return BasisPath(a.kind, b.start, a.length + b.length)


class AlgElem:
    """An F2-linear combination of basis paths (a frozenset, xor addition)."""

    __slots__ = ("paths",)

    def __init__(self, paths=()):
        self.paths = frozenset(paths)

    def __add__(self, other: "AlgElem") -> "AlgElem":
        return AlgElem(self.paths ^ other.paths)

    def __mul__(self, other: "AlgElem") -> "AlgElem":
        acc: set[BasisPath] = set()
        for x in self.paths:
            for y in other.paths:
                z = multiply_paths(x, y)
                if z is not None:
                    acc ^= {z}
        return AlgElem(acc)

    def __eq__(self, other) -> bool:
        return isinstance(other, AlgElem) and self.paths == other.paths

    def __hash__(self):
        return hash(self.paths)

    def __bool__(self) -> bool:
        return bool(self.paths)

    def __iter__(self):
        return iter(sorted(self.paths))

    def __len__(self):
        return len(self.paths)

    def __repr__(self):
        return f"AlgElem({self})"

    def __str__(self):
        if not self.paths:
            return "0"
        return "+".join(str(p) for p in sorted(self.paths))

    def delta2(self) -> int:
        """Common doubled delta degree; raises on non-homogeneous elements."""
        degs = {p.delta2 for p in self.paths}
        if len(degs) != 1:
            raise ValueError(f"non-homogeneous delta: {self}")
        return degs.pop()

    def alexander2(self, matching: "Matching") -> tuple[int, ...]:
        vals = {p.alexander2(matching) for p in self.paths}
        if len(vals) != 1:
            raise ValueError(f"non-homogeneous alexander: {self}")
        return vals.pop()


ZERO = AlgElem()


def elem(*paths) -> AlgElem:
    return AlgElem(paths)


def curvature() -> AlgElem:
    """The central element p^4 + q^4 (one p-cycle and one q-cycle per site)."""
    return AlgElem([ppath(s, 4) for s in SITES] + [qpath(s, 4) for s in SITES])


def shortest_path(face: str, frm: int, to: int) -> BasisPath:
    """The shortest basis path between two distinct sides of a face."""
    if frm == to:
        raise ValueError("shortest_path: sides must be distinct")
    if face == FRONT:
        return ppath(frm, (frm - to) % 4)
    if face == BACK:
        return qpath(frm, (to - frm) % 4)
    raise ValueError(f"unknown face {face!r}")


def chord_length(face: str, frm: int, to: int) -> int:
    return shortest_path(face, frm, to).length


def kill_letters(a: AlgElem, killed) -> AlgElem:
    """Quotient map sending every killed elementary letter to zero.

    killed is an iterable of (kind, index) pairs, e.g. {("p", 3), ("q", 1)}.
    """
    killed = set(killed)
    keep = []
    for path in a.paths:
        if path.kind == "i":
            keep.append(path)
            continue
        if any((path.kind, i) in killed for i in path.letters()):
            continue
        keep.append(path)
    return AlgElem(keep)


def parse_letter(text: str) -> tuple[str, int]:
    text = text.strip()
    if len(text) != 2 or text[0] not in "pq" or text[1] not in "1234":
        raise ValueError(f"bad letter {text!r}")
    return (text[0], int(text[1]))


def parse_path(text: str, site_hint: int | None = None) -> BasisPath:
    """Parse "1", "1@3", "p12", "q432" into a basis path."""
    text = text.strip()
    if text == "1":
        if site_hint is None:
            raise ValueError("bare idempotent needs a site")
        return idem(site_hint)
    if text.startswith("1@"):
        return idem(int(text[2:]))
    kind = text[0]
    if kind not in ("p", "q") or not text[1:].isdigit():
        raise ValueError(f"bad path {text!r}")
    idx = [int(ch) for ch in text[1:]]
    if not idx or not all(i in SITES for i in idx):
        raise ValueError(f"bad path {text!r}")
    if kind == "p":
        # printed ascending: source is the last index
        path = ppath(idx[-1], len(idx))
    else:
        # printed descending: source is (first printed) - length
        path = qpath(_m4(idx[-1] - 1), len(idx))
    if str(path) != text:
        raise ValueError(f"non-contiguous path {text!r}")
    return path


class Matching:
    """Alexander weight data for the two colours t1, t2.

    Bivariate form: two ordered site pairs (inward end first) partitioning
    the four sites.  Collapsed (univariate) form: a single weight per site in
    the first coordinate, used for single-variable Alexander gradings.
    """

    def __init__(self, pairs=None, weights=None, colours=("t1", "t2")):
        self.pairs = None
        self.colours = tuple(colours)
        if pairs is not None:
            pairs = tuple((int(i), int(o)) for i, o in pairs)
            flat = [s for pr in pairs for s in pr]
            if sorted(flat) != [1, 2, 3, 4]:
                raise ValueError(f"matching must partition the sites: {pairs}")
            self.pairs = pairs
            self._w = {s: [0, 0] for s in SITES}
            for k, (i, o) in enumerate(pairs):
                self._w[i][k] += 1
                self._w[o][k] -= 1
        elif weights is not None:
            if len(colours) == 2:
                self.colours = (colours[0],)
            self._w = {s: [int(weights[s])] for s in SITES}
            if sum(w[0] for w in self._w.values()) != 0:
                raise ValueError("collapsed weights must sum to zero")
        else:
            raise ValueError("need pairs or weights")

    @property
    def collapsed(self) -> bool:
        return self.pairs is None

    @property
    def ncolours(self) -> int:
        return len(self.colours)

    def weight(self, site: int) -> tuple[int, ...]:
        return tuple(self._w[site])

    def reversed(self) -> "Matching":
        if self.collapsed:
            return Matching(weights={s: -self._w[s][0] for s in SITES},
                            colours=self.colours)
        return Matching(pairs=[(o, i) for i, o in self.pairs], colours=self.colours)

    def collapse(self) -> "Matching":
        if self.collapsed:
            return self
        return Matching(weights={s: self._w[s][0] + self._w[s][1] for s in SITES},
                        colours=("t",))

    def relabel(self, perm: dict[int, int]) -> "Matching":
        if self.collapsed:
            return Matching(weights={perm[s]: self._w[s][0] for s in SITES},
                            colours=self.colours)
        return Matching(pairs=[(perm[i], perm[o]) for i, o in self.pairs],
                        colours=self.colours)

    def colour_of(self, site: int) -> int:
        """Index of the colour whose strand touches the site (bivariate only)."""
        for k, pr in enumerate(self.pairs):
            if site in pr:
                return k
        raise KeyError(site)

    def __eq__(self, other):
        return (isinstance(other, Matching) and self._w == other._w
                and self.pairs == other.pairs)

    def __repr__(self):
        if self.collapsed:
            return f"Matching(weights={ {s: self._w[s][0] for s in SITES} })"
        return f"Matching(pairs={self.pairs!r})"

    def to_json(self):
        if self.collapsed:
            return {"weights": {str(s): self._w[s][0] for s in SITES},
                    "colours": list(self.colours)}
        return {"pairs": [list(pr) for pr in self.pairs],
                "colours": list(self.colours)}

    @staticmethod
    def from_json(doc) -> "Matching":
        if "weights" in doc:
            colours = tuple(doc.get("colours", ("t",)))
            return Matching(weights={int(k): v for k, v in doc["weights"].items()},
                            colours=colours)
        colours = tuple(doc.get("colours", ("t1", "t2")))
        return Matching(pairs=doc["pairs"], colours=colours)


def all_paths_between(src_site: int, tgt_site: int, length: int) -> list[BasisPath]:
    """Basis paths of a given length from src to tgt (0, 1 or 2 of them)."""
    if length == 0:
        return [idem(src_site)] if src_site == tgt_site else []
    out = []
    if _m4(src_site - length) == tgt_site:
        out.append(ppath(src_site, length))
    if _m4(src_site + length) == tgt_site:
        out.append(qpath(src_site, length))
    return out
