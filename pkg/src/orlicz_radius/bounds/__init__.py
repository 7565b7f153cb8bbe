"""Inequality catalogue and evaluation.

>>> from orlicz_radius.bounds import BoundCase, evaluate_bound
>>> ev = evaluate_bound(BoundCase("cor_N222"), [[0, 1], [0, 0]])
>>> [round(v, 5) for v in ev.chain], ev.status
([0.5, 0.78747, 1.0], 'pass')
"""

from .catalogue import (
    CATALOGUE,
    OPERATOR_CASES,
    PAIR_CASES,
    VECTOR_CASES,
    BoundCase,
    CaseError,
    catalogue_rows,
    default_grid,
    expand_grid,
    make_case,
)
from .chains import ChainValues, log_mix, nilpotent_constant
from .evaluate import (
    DEFAULT_TOL_ABS,
    DEFAULT_TOL_REL,
    BatchEvaluation,
    BoundEvaluation,
    Tolerance,
    check_vector_lemma,
    evaluate_batch,
    evaluate_bound,
    evaluate_vector_batch,
    link_ratios,
    needs_normalization,
    normalization,
)
from .quantities import SUITE_GRID, Quantities

__all__ = [
    "CATALOGUE",
    "OPERATOR_CASES",
    "PAIR_CASES",
    "VECTOR_CASES",
    "BoundCase",
    "CaseError",
    "catalogue_rows",
    "default_grid",
    "expand_grid",
    "make_case",
    "ChainValues",
    "log_mix",
    "nilpotent_constant",
    "DEFAULT_TOL_ABS",
    "DEFAULT_TOL_REL",
    "BatchEvaluation",
    "BoundEvaluation",
    "Tolerance",
    "check_vector_lemma",
    "evaluate_batch",
    "evaluate_bound",
    "evaluate_vector_batch",
    "link_ratios",
    "needs_normalization",
    "normalization",
    "SUITE_GRID",
    "Quantities",
]
