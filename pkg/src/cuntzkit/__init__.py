"""Symbolic and finite-level numerical workbench for the Cuntz algebra O_d."""
from __future__ import annotations

from .levels import (
    LevelMatrix,
    ShiftSystem,
    connect_projections,
    embed_level,
    lift_level,
    op_norm,
    polar_unitary,
    shift_level,
    support_projection,
    unitary_path,
)
from .states import (
    CuntzStateSpec,
    ProductStateSpec,
    StateHandle,
    compose_endo,
    disjointness_defect,
    eval_cuntz,
    eval_product,
    evaluate_state,
    purity_defect_level,
)
from .parsing import ParseError, format_element, parse_element
from .words import (
    AlgebraElement,
    CongruenceError,
    DimensionMismatch,
    PrefixFreeSet,
    Word,
    adjoint,
    apply_endo,
    canonical_endo,
    canonicalize,
    close,
    compress,
    cylinder_equivalence,
    endo_unitary,
    expect_uhf,
    gauge_rotate,
    is_unitary,
    multiply,
    reduce_word_product,
    unitary_rotate,
)

__version__ = "0.1.0"

__all__ = [
    "adjoint",
    "AlgebraElement",
    "apply_endo",
    "canonical_endo",
    "canonicalize",
    "close",
    "compose_endo",
    "compress",
    "CongruenceError",
    "connect_projections",
    "CuntzStateSpec",
    "cylinder_equivalence",
    "DimensionMismatch",
    "disjointness_defect",
    "embed_level",
    "endo_unitary",
    "eval_cuntz",
    "eval_product",
    "evaluate_state",
    "expect_uhf",
    "format_element",
    "gauge_rotate",
    "is_unitary",
    "LevelMatrix",
    "lift_level",
    "multiply",
    "op_norm",
    "parse_element",
    "ParseError",
    "polar_unitary",
    "PrefixFreeSet",
    "ProductStateSpec",
    "purity_defect_level",
    "reduce_word_product",
    "shift_level",
    "ShiftSystem",
    "StateHandle",
    "support_projection",
    "unitary_path",
    "unitary_rotate",
    "Word",
]
