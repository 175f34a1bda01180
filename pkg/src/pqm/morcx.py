"""
Homology of the complex of module morphisms.

Mor(M, N) is spanned by triples (x, y, a) with x a generator of M, y of N
and a a basis path in iota_{site(y)} . Ad . iota_{site(x)}.  The triple sits
in doubled degree delta2(y) - delta2(x) + |a|, and the differential
D(f) = d_N f + f d_M raises that degree by 2 (the curvature terms cancel
because the curvature is central and we work over F2).

Each degree is finite-dimensional but the degrees are unbounded above, so
homology is computed over a window that is grown until the support is
flanked by two consecutive empty degrees.
"""

from __future__ import annotations

import os

from . import f2lin, pqalg
from .pqalg import AlgElem, kill_letters
from .pqmod import GradedTable, Morphism, PqModule

WINDOW_CAP_ENV = "PQM_WINDOW_CAP"
DEFAULT_WINDOW_CAP = 16


def mor_basis(m: PqModule, n: PqModule, degree2: int) -> list[tuple]:
    """Basis triples (x_id, y_id, path) in one doubled degree."""
    killed = m.killed | n.killed
    out = []
    for x in m.gens.values():
        for y in n.gens.values():
            length = degree2 - y.delta2 + x.delta2
            if length < 0:
                continue
            for p in pqalg.all_paths_between(x.site, y.site, length):
                if kill_letters(AlgElem([p]), killed):
                    out.append((x.id, y.id, p))
    return out


def _apply_d_triple(m: PqModule, n: PqModule, triple: tuple) -> set[tuple]:
    """D of a basis triple, as a set of basis triples (F2 coefficients)."""
    x, y, path = triple
    killed = m.killed | n.killed
    a = AlgElem([path])
    acc: set[tuple] = set()
    for (s, t), lab in n.arrows.items():
        if s != y:
            continue
        for p in kill_letters(lab * a, killed).paths:
            acc ^= {(x, t, p)}
    for (s, t), lab in m.arrows.items():
        if t != x:
            continue
        for p in kill_letters(a * lab, killed).paths:
            acc ^= {(s, y, p)}
    return acc


def apply_d(f: Morphism) -> Morphism:
    """The morphism differential D(f) = d_N f + f d_M."""
    m, n = f.src, f.tgt
    out = Morphism(m, n)
    for (x, y), lab in f.components.items():
        for p in lab.paths:
            for (x2, y2, p2) in _apply_d_triple(m, n, (x, y, p)):
                out.add(x2, y2, AlgElem([p2]))
    return out


def compose(g: Morphism, f: Morphism) -> Morphism:
    """g after f (components multiply with f applied first)."""
    if g.src is not f.tgt and g.src.gens != f.tgt.gens:
        raise ValueError("compose: middle modules disagree")
    out = Morphism(f.src, g.tgt)
    for (x, y), flab in f.components.items():
        for (y2, z), glab in g.components.items():
            if y2 == y:
                out.add(x, z, kill_letters(glab * flab,
                                           f.src.killed | g.tgt.killed))
    return out


def is_cycle(f: Morphism) -> bool:
    return not apply_d(f).components


def _alex_of(m: PqModule, n: PqModule, triple, alex_fn):
    if alex_fn is None:
        return ()
    return tuple(alex_fn(m.gens[triple[0]], n.gens[triple[1]], triple[2]))


def mor_homology(m: PqModule, n: PqModule, alex_fn=None,
                 window_cap: int | None = None,
                 d_lo: int | None = None,
                 d_hi: int | None = None) -> GradedTable:
    """Homology of Mor(m, n) as a graded dimension table.

    alex_fn(gen_m, gen_n, path) -> Alexander vector refines the grading;
    it must be preserved by D (asserted).  Without it the table is graded
    by delta2 only (empty Alexander vectors).

    The window [d_lo, d_hi] defaults to the full generator span and is
    grown upward until the homology support is flanked by two consecutive
    empty degrees; failing to stabilize within the cap is a hard error.
    """
    if window_cap is None:
        window_cap = int(os.environ.get(WINDOW_CAP_ENV, DEFAULT_WINDOW_CAP))
    deltas = [yg.delta2 - xg.delta2
              for xg in m.gens.values() for yg in n.gens.values()]
    if not deltas:
        return GradedTable()
    lo = min(deltas) if d_lo is None else d_lo
    hi = max(deltas) + 3 if d_hi is None else d_hi

    bases: dict[int, list] = {}
    mats: dict[int, f2lin.mat] = {}

    def basis(d):
        if d not in bases:
            bases[d] = mor_basis(m, n, d)
        return bases[d]

    def dmat(d):
        """Matrix of D from degree d to d+2 (rows = target, cols = source)."""
        if d in mats:
            return mats[d]
        src, tgt = basis(d), basis(d + 2)
        idx = {t: i for i, t in enumerate(tgt)}
        a = f2lin.zeros(len(tgt), len(src))
        for j, trip in enumerate(src):
            for img in _apply_d_triple(m, n, trip):
                a[idx[img], j] ^= 1
                if alex_fn is not None:
                    assert _alex_of(m, n, img, alex_fn) == \
                        _alex_of(m, n, trip, alex_fn), \
                        "Alexander functional not preserved by D"
        mats[d] = a
        return a

    def homology_at(d) -> dict[tuple, int]:
        """Per-Alexander-class homology dimensions in one degree."""
        classes = sorted({_alex_of(m, n, t, alex_fn) for t in basis(d)})
        out = {}
        for cls in classes:
            cols_in = [j for j, t in enumerate(basis(d - 2))
                       if _alex_of(m, n, t, alex_fn) == cls]
            cols_here = [j for j, t in enumerate(basis(d))
                         if _alex_of(m, n, t, alex_fn) == cls]
            a_out = dmat(d)[:, cols_here]
            a_in = dmat(d - 2)[:, cols_in] if cols_in else \
                f2lin.zeros(len(basis(d)), 0)
            h = f2lin.kernel_dim(a_out) - f2lin.rank(a_in)
            if h:
                out[cls] = h
        return out

    grown = 0
    while True:
        table = GradedTable()
        for d in range(lo, hi + 1):
            for cls, hdim in homology_at(d).items():
                table.add(d, cls, hdim)
        top = {d for (d, _) in table.counts}
        if not top or max(top) <= hi - 2:
            return table
        hi += 2
        grown += 1
        if grown > window_cap:
            raise RuntimeError("morphism homology window exceeded cap; "
                               f"raise ${WINDOW_CAP_ENV}")


def mor_homology_window(m: PqModule, n: PqModule,
                        d_lo: int | None = None, d_hi: int | None = None,
                        alex_fn=None,
                        window_cap: int | None = None) -> GradedTable:
    """Windowed morphism homology; see mor_homology."""
    return mor_homology(m, n, alex_fn=alex_fn, window_cap=window_cap,
                        d_lo=d_lo, d_hi=d_hi)
