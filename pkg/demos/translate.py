"""From a knowledge base to first-order logic and to a matrix.

Run: python3 demos/translate.py
"""

from _common import banner, load
from dlcm.fol import format_formula, pi_kb
from dlcm.kb_syntax import format_kb, parse_query
from dlcm.matrix import build_query_matrix

kb = load("sample.kb")

banner("The knowledge base")
print(format_kb(kb))

# Typicality *A is read as "the most normal A's": the A's with no A below
# them in the preference order. The translation makes that order explicit.
banner("First-order reading (order axioms included at the end)")
print(format_formula(pi_kb(kb)))

# The matrix is built directly from the description logic, without going
# through the formula: the negated KB plus the (non-negated) query.
banner("Matrix for the query A(a)")
m = build_query_matrix(kb, parse_query("A(a)"))
for clause in m:
    print(f"{clause.origin:22} {clause}")
print("\nHerbrand functions:", m.functions)
