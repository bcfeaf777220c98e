"""Consistency checks, cross-checked against brute-force model search.

Run: python3 demos/consistency.py
"""

from _common import load
from dlcm.calculus import inconsistent
from dlcm.oracle import find_model

for name in ("clash.kb", "harry.kb", "sample.kb"):
    kb = load(name)
    verdict = inconsistent(kb).verdict.value
    model = find_model(kb, 2)
    if model:
        n = len(model.domain)
        found = f"model with {n} object{'s' if n > 1 else ''}"
    else:
        found = "no model up to 2 objects"
    print(f"{name:10} {verdict:13} oracle: {found}")
