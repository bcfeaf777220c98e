"""Connection-method reasoning for the description logic ALCH with typicality."""

__version__ = "0.1.0"

from .kb_syntax import (  # noqa: E402
    KnowledgeBase, ParseError, Signature, format_kb, parse_concept, parse_kb,
    parse_query, parse_role,
)
from .fol import pi_axiom, pi_kb  # noqa: E402
from .matrix import Matrix, build_query_matrix, delta  # noqa: E402
from .calculus import Budget, Verdict, check_proof, entails, inconsistent, prove  # noqa: E402
from .oracle import (  # noqa: E402
    BiOrderedInterpretation, check_model, enumerate_interpretations, find_countermodel,
    find_model, ground_matrix_valid,
)

__all__ = [
    "KnowledgeBase", "ParseError", "Signature", "format_kb", "parse_concept", "parse_kb",
    "parse_query", "parse_role", "pi_axiom", "pi_kb", "Matrix", "build_query_matrix",
    "delta", "Budget", "Verdict", "check_proof", "entails", "inconsistent", "prove",
    "BiOrderedInterpretation", "check_model", "enumerate_interpretations",
    "find_countermodel", "find_model", "ground_matrix_valid",
]
