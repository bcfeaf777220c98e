"""A connection proof, printed two ways and then checked independently.

Run: python3 demos/prove.py
"""

from _common import banner, load
from dlcm.calculus import check_proof, entails, format_connections, format_tree
from dlcm.kb_syntax import parse_query

kb = load("sample.kb")
result = entails(kb, parse_query("A(a)"))
print("verdict:", result.verdict.value)

banner("Connections in the order they were made")
print(format_connections(result.proof, result.sigma))

banner("The same proof as a derivation tree")
print(format_tree(result.proof, result.sigma))

# The checker re-derives every rule application from the tree alone.
print("\nchecker accepts the proof:", check_proof(result.proof, result.matrix))
