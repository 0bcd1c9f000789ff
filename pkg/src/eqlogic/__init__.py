"""Checkers for CCS processes, Hennessy-Milner logic, regular programs,
propositional dynamic logic and Kleene algebra, plus bounded tests of the
correspondences between them."""

from .bisim import BisimVerdict, bisimilar, bisimilar_naive, distinguishing_formula
from .ccs import build_lts, parse_process, traces
from .errors import (
    BudgetExceeded,
    CorrespondenceViolation,
    EqlogicError,
    GrammarError,
    InternalError,
    ParseError,
    RichTestRejected,
    StateBlowup,
    UnknownPrimitive,
    UnknownProposition,
    UnknownState,
)
from .hml import parse_hml, satisfies
from .pdl import KripkeStructure, parse_pdl, pdl_satisfies, valid_in
from .regprog import Interpretation, eval_relation, parse_program

__all__ = [
    "BisimVerdict", "BudgetExceeded", "CorrespondenceViolation", "EqlogicError", "GrammarError",
    "InternalError", "Interpretation", "KripkeStructure", "ParseError", "RichTestRejected",
    "StateBlowup", "UnknownPrimitive", "UnknownProposition", "UnknownState", "bisimilar",
    "bisimilar_naive", "build_lts", "distinguishing_formula", "eval_relation", "parse_hml",
    "parse_pdl", "parse_process", "parse_program", "pdl_satisfies", "satisfies", "traces", "valid_in",
]
