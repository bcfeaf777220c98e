"""Shared test utilities."""

import itertools
import re

from dlcm.fol import Var
from dlcm.matrix import format_clause


SAMPLE_KB = "tbox: some s.B [= *A\nrbox: *r [= s\nabox:\n*r(a,b)\nB(b)"
FG = {"h1": "f", "h2": "g"}

ORDER = [
    {"x < y", "y < z", "~(x < z)"},
    {"x < x"},
    {"x < y", "y < x"},
    {"(x,y) << (z,k)", "(z,k) << (m,n)", "~((x,y) << (m,n))"},
    {"(x,y) << (x,y)"},
    {"(x,y) << (z,k)", "(z,k) << (x,y)"},
]

REFERENCE = [
    {"s(x,y)", "B(y)", "~A(x)"},
    {"s(x,y)", "B(y)", "x' < x", "A(x')"},
    {"r(x,y)", "~((f(x),g(y)) << (x,y))", "~s(x,y)"},
    {"r(x,y)", "~r(f(x),g(y))", "~s(x,y)"},
    {"r(x,y)", "(x',y') << (f(x),g(y))", "r(x',y')", "~s(x,y)"},
    {"~r(a,b)"},
    {"(x',y') << (a,b)", "r(x',y')"},
    {"~B(b)"},
    {"A(a)"},
]


def render(clause, names=(), functions=None):
    """Literal strings of ``clause`` after renaming variables to ``names``
    (in the order the variables are given) and function symbols."""
    text = [str(l) for l in clause.substitute(dict(names)).literals] if names else \
        [str(l) for l in clause]
    for old, new in (functions or {}).items():
        text = [re.sub(rf"\b{old}\(", f"{new}(", t) for t in text]
    return frozenset(text)


def is_variant(clause, expected, functions=None):
    """True if some bijective variable renaming turns ``clause`` into the
    literal strings ``expected`` (which use names like x, y, x')."""
    expected = frozenset(expected)
    ours = sorted(clause.variables(), key=lambda v: v.name)
    wanted = sorted({m for e in expected for m in re.findall(r"\b[xyzkmn]'?(?![\w(])", e)})
    if len(ours) != len(wanted):
        return False
    for perm in itertools.permutations(wanted):
        mapping = [(v, Var(w)) for v, w in zip(ours, perm)]
        if render(clause, mapping, functions) == expected:
            return True
    return False


def show(m):
    return "\n".join(format_clause(c) for c in m)
