"""Metamath databases: parsing, proof checking, formula parsing and KB extraction."""

from .database import Database, Frame, MetamathError, Statement, mm_parse, mm_read
from .extract import DG_PRESENTATION, dependency_closure, extract_kb, present, statement_clause
from .proof import (
    ProofError, VerifyReport, decode_compressed_proof, decode_numbers, proof_steps,
    referenced_labels, replay, verify_database,
)
from .syntax import (
    AmbiguousParse, FormulaParseError, SyntaxGrammar, SyntaxRule, build_syntax_grammar,
    parse_formula, unparse,
)

__all__ = [
    "Database", "Frame", "MetamathError", "Statement", "mm_parse", "mm_read",
    "DG_PRESENTATION", "dependency_closure", "extract_kb", "present", "statement_clause",
    "ProofError", "VerifyReport", "decode_compressed_proof", "decode_numbers", "proof_steps",
    "referenced_labels", "replay", "verify_database",
    "AmbiguousParse", "FormulaParseError", "SyntaxGrammar", "SyntaxRule",
    "build_syntax_grammar", "parse_formula", "unparse",
]
