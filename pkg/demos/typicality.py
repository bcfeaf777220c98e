"""Typicality is not inherited by every member of a concept.

From "typical A's are B's" and "a is an A" nothing follows about a being
a B: a may be an atypical A. The proof search has to notice that it is
going round in circles, which is what blocking is for.

Run: python3 demos/typicality.py
"""

from _common import banner, load
from dlcm.calculus import entails
from dlcm.kb_syntax import KnowledgeBase, parse_query
from dlcm.oracle import find_countermodel, format_interpretation

print("*A [= A holds in every KB:",
      entails(KnowledgeBase(), parse_query("*A [= A"), include_order_axioms=False).verdict.value)

kb = load("typical.kb")
r = entails(kb, parse_query("B(a)"))
print("B(a) from {*A [= B, A(a)}:", r.verdict.value)

banner("A countermodel: a sits above a more typical A")
print(format_interpretation(find_countermodel(kb, parse_query("B(a)"), 2)))
