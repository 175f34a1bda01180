"""
Peculiar-module invariants of 4-ended tangles: curved complexes over the
arc algebra of the 4-punctured sphere, their classification by immersed
curves with local systems, and link Floer homology of glued tangles.
"""

from . import curvekit, f2lin, morcx, pairkit, pqalg, pqmod, tanglezoo
from .curvekit import (
    Loop,
    Precurve,
    build_from_loops,
    canonical_form,
    curves,
    equivalent,
    extract_loops,
    from_precurve,
    is_embedded,
    lift_from_quotient,
    make_simply_faced,
    simplify_arrows,
    to_precurve,
)
from .morcx import apply_d, compose, is_cycle, mor_basis, mor_homology, \
    mor_homology_window
from .pairkit import (
    box_pair,
    curves_pair,
    lagrangian_pair,
    min_intersection,
    mor_pair,
    omega_close,
    stabilization_exponent,
    standard_p,
)
from .pqalg import AlgElem, BasisPath, Matching, idem, ppath, qpath
from .pqmod import (
    GradedTable,
    Generator,
    Morphism,
    PqModule,
    clean_up,
    mapping_cone,
    quotient_module,
    tensor_v,
)
from .tanglezoo import build, mutation, rational_tangle, relabel_sites, \
    skein_morphism

__all__ = [
    "AlgElem", "BasisPath", "GradedTable", "Generator", "Loop", "Matching",
    "Morphism", "PqModule", "Precurve", "apply_d", "box_pair", "build",
    "build_from_loops", "canonical_form", "clean_up", "compose", "curves",
    "curves_pair", "equivalent", "extract_loops", "from_precurve", "idem",
    "is_cycle", "is_embedded", "lagrangian_pair", "lift_from_quotient",
    "make_simply_faced", "mapping_cone", "min_intersection", "mor_basis",
    "mor_homology", "mor_homology_window", "mor_pair", "mutation",
    "omega_close", "ppath", "qpath", "quotient_module", "rational_tangle",
    "relabel_sites", "simplify_arrows", "skein_morphism",
    "stabilization_exponent", "standard_p", "tensor_v", "to_precurve",
    "curvekit", "f2lin", "morcx", "pairkit", "pqalg", "pqmod", "tanglezoo",
]
