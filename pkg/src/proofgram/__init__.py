"""Proof grammars: extraction, verification, compression and statistics of proof terms."""

__version__ = "0.1.0"

from .terms import (  # noqa: E402
    KB, Clause, Fn, Node, Param, Production, ProofGrammar, Var, clause_metrics, expand,
    is_linear, substitute_params, term_size, validate_grammar, value,
)

__all__ = [
    "__version__", "KB", "Clause", "Fn", "Node", "Param", "Production", "ProofGrammar", "Var",
    "clause_metrics", "expand", "is_linear", "substitute_params", "term_size",
    "validate_grammar", "value",
]
