"""Defeasible conclusions about Hermione.

Typical muggles are not wizards, yet Hermione is a muggle who turns out to
be a wizard. The reasoner concludes that she is a wizard and therefore not
a typical muggle, without concluding that she is not a muggle.

Run: python3 demos/defeasible.py
"""

from _common import banner, load
from dlcm.calculus import entails
from dlcm.kb_syntax import parse_query
from dlcm.oracle import find_countermodel, format_interpretation

kb = load("harry.kb")

for text in ("Wizard(hermione)", "~*Muggle(hermione)", "~Muggle(hermione)", "Muggle(ron)"):
    r = entails(kb, parse_query(text))
    print(f"{text:22} {r.verdict.value}")

# A negative answer is backed by a small model where the query fails.
banner("Why ~Muggle(hermione) does not follow")
print(format_interpretation(find_countermodel(kb, parse_query("~Muggle(hermione)"), 2)))
