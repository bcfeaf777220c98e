"""DNF matrices and the translations that produce them.

A matrix is a list of clauses; each clause is a conjunction of literals
and the matrix as a whole is their (existentially closed) disjunction.
Universal quantifiers are removed by Herbrandisation while translating:
fresh function symbols are named ``h1, h2, ...`` and fresh constants
``c1, c2, ...``, in translation order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Optional, Sequence

from .fol import (
    ConceptAtom, Exists, FAnd, FOr, FNot, Fn, Forall, Formula, Ind, LessAtom,
    Lit, LLessAtom, Literal, RoleAtom, Term, Var, neg, pos,
)
from .kb_syntax import (
    All, And, Atom, Axiom, ConceptAssertion, ConceptExpr, GCI, KnowledgeBase,
    NegRole, Not, Or, RIA, Role, RoleAssertion, RoleExpr, Signature, Some, Typ,
    TypRole, normalize, normalize_axiom, normalize_kb, normalize_role,
)

__all__ = [
    "Clause", "Matrix", "Fresh", "clausal_union", "apply_fn", "matrix_of_formula",
    "rho_role", "rho_concept", "delta", "query_clauses", "build_query_matrix",
    "order_clauses", "paths", "copy_clause", "is_complementary_path",
    "format_clause", "format_matrix",
]


@dataclass(frozen=True)
class Clause:
    literals: tuple
    origin: str = ""
    copy_index: int = 0

    def __post_init__(self):
        lits = tuple(sorted(set(self.literals), key=Literal.sort_key))
        object.__setattr__(self, "literals", lits)

    def __iter__(self):
        return iter(self.literals)

    def __len__(self):
        return len(self.literals)

    def variables(self) -> set:
        out: set = set()
        for lit in self.literals:
            out |= lit.variables()
        return out

    def is_ground(self) -> bool:
        return not self.variables()

    def substitute(self, m) -> "Clause":
        return replace(self, literals=tuple(l.substitute(m) for l in self.literals))

    def __str__(self):
        return format_clause(self)


@dataclass(frozen=True)
class Matrix:
    clauses: tuple
    functions: dict = field(default_factory=dict, compare=False, hash=False)
    signature: Signature = field(default_factory=Signature, compare=False, hash=False)

    def __iter__(self):
        return iter(self.clauses)

    def __len__(self):
        return len(self.clauses)

    def __getitem__(self, i):
        return self.clauses[i]

    def __str__(self):
        return format_matrix(self)


def format_clause(c) -> str:
    lits = c.literals if isinstance(c, Clause) else c
    return "{ " + ", ".join(map(str, lits)) + " }"


def format_matrix(m: Iterable) -> str:
    return "\n".join(format_clause(c) for c in m)


class Fresh:
    """Source of fresh variables, Herbrand functions and constants.

    ``functions`` records every introduced symbol with its arity.
    """

    def __init__(self):
        self._vars = 0
        self._fns = 0
        self._consts = 0
        self.functions: dict = {}

    def var(self) -> Var:
        self._vars += 1
        return Var(f"v{self._vars}")

    def function(self, arity: int) -> str:
        self._fns += 1
        name = f"h{self._fns}"
        self.functions[name] = arity
        return name

    def constant(self) -> Fn:
        self._consts += 1
        name = f"c{self._consts}"
        self.functions[name] = 0
        return Fn(name, ())


# Raw matrices (lists of frozensets of literals) are used while translating;
# ``Clause``/``Matrix`` are the finished product.

def _dedup(clauses: Iterable) -> list:
    seen = set()
    out = []
    for c in clauses:
        c = frozenset(c)
        if c not in seen:
            seen.add(c)
            out.append(c)
    return out


def _contradictory(c: frozenset) -> bool:
    return any(l.negate() in c for l in c)


def clausal_union(m1: Iterable, m2: Iterable) -> list:
    """All pairwise unions of a clause of ``m1`` with a clause of ``m2``.

    Unions containing a literal together with its complement are dropped:
    such a conjunction is false and contributes nothing to the disjunction.
    """
    m2 = [frozenset(c) for c in m2]
    out = []
    for c1 in m1:
        for c2 in m2:
            u = frozenset(c1) | c2
            if not _contradictory(u):
                out.append(u)
    return _dedup(out)


def _union(*ms) -> list:
    return _dedup(itertools.chain.from_iterable(ms))


def apply_fn(f: str, s: Sequence, fresh: Optional[Fresh] = None) -> Term:
    """Herbrand term for a universal quantifier under the variables ``s``.

    With no enclosing existential variables the result is a fresh constant.
    """
    if not s:
        return (fresh or Fresh()).constant()
    return Fn(f, tuple(s))


def _herbrand(s: Sequence, fresh: Fresh) -> Term:
    if not s:
        return fresh.constant()
    return Fn(fresh.function(len(s)), tuple(s))


def _subst_raw(m: list, mapping: dict) -> list:
    return _dedup(frozenset(l.substitute(mapping) for l in c) for c in m)


def matrix_of_formula(f: Formula, s: Sequence = (), fresh: Optional[Fresh] = None) -> list:
    """Clausal DNF of an NNF formula, Herbrandising universals on the way."""
    fresh = fresh or Fresh()
    s = tuple(s)
    if isinstance(f, Lit):
        return [frozenset([f.literal])]
    if isinstance(f, FOr):
        return _union(matrix_of_formula(f.left, s, fresh), matrix_of_formula(f.right, s, fresh))
    if isinstance(f, FAnd):
        return clausal_union(matrix_of_formula(f.left, s, fresh),
                             matrix_of_formula(f.right, s, fresh))
    if isinstance(f, Exists):
        return matrix_of_formula(f.body, s + (f.var,), fresh)
    if isinstance(f, Forall):
        term = _herbrand(s, fresh)
        return _subst_raw(matrix_of_formula(f.body, s, fresh), {f.var: term})
    if isinstance(f, FNot):
        raise ValueError("matrix_of_formula expects negation normal form")
    raise TypeError(f"not a formula: {f!r}")


# ------------------------------------------------------ direct translation

def _unit(lit: Literal) -> list:
    return [frozenset([lit])]


def rho_role(r: RoleExpr, t: Term, u: Term, fresh: Optional[Fresh] = None) -> list:
    fresh = fresh or Fresh()
    if isinstance(r, Role):
        return _unit(pos(RoleAtom(r.name, t, u)))
    if isinstance(r, TypRole):
        f, g = fresh.function(1), fresh.function(1)
        ft, gu = Fn(f, (t,)), Fn(g, (u,))
        return clausal_union(
            rho_role(r.inner, t, u, fresh),
            _union(_unit(neg(LLessAtom(ft, gu, t, u))),
                   rho_role(NegRole(r), ft, gu, fresh)))
    inner = r.inner
    if isinstance(inner, Role):
        return _unit(neg(RoleAtom(inner.name, t, u)))
    if isinstance(inner, NegRole):
        return rho_role(inner.inner, t, u, fresh)
    # not-typical: not in the role, or some pair below it is
    x, y = fresh.var(), fresh.var()
    return _union(rho_role(NegRole(inner.inner), t, u, fresh),
                  clausal_union(_unit(pos(LLessAtom(x, y, t, u))),
                                rho_role(inner.inner, x, y, fresh)))


def rho_concept(d: ConceptExpr, t: Term, s: Sequence = (), fresh: Optional[Fresh] = None) -> list:
    fresh = fresh or Fresh()
    s = tuple(s)
    if isinstance(d, Atom):
        return _unit(pos(ConceptAtom(d.name, t)))
    if isinstance(d, And):
        return clausal_union(rho_concept(d.left, t, s, fresh), rho_concept(d.right, t, s, fresh))
    if isinstance(d, Or):
        return _union(rho_concept(d.left, t, s, fresh), rho_concept(d.right, t, s, fresh))
    if isinstance(d, Some):
        x = fresh.var()
        return clausal_union(rho_role(d.role, t, x, fresh),
                             rho_concept(d.concept, x, s + (x,), fresh))
    if isinstance(d, All):
        h = _herbrand(s, fresh)
        return _union(rho_role(NegRole(d.role), t, h, fresh), rho_concept(d.concept, h, s, fresh))
    if isinstance(d, Typ):
        h = _herbrand(s, fresh)
        return clausal_union(
            rho_concept(d.inner, t, s, fresh),
            _union(_unit(neg(LessAtom(h, t))), rho_concept(Not(d), h, s, fresh)))
    if not isinstance(d, Not):
        raise TypeError(f"not a normalised concept expression: {d!r}")
    e = d.inner
    if isinstance(e, Atom):
        return _unit(neg(ConceptAtom(e.name, t)))
    if isinstance(e, Not):
        return rho_concept(e.inner, t, s, fresh)
    if isinstance(e, And):
        return _union(rho_concept(Not(e.left), t, s, fresh), rho_concept(Not(e.right), t, s, fresh))
    if isinstance(e, Or):
        return clausal_union(rho_concept(Not(e.left), t, s, fresh),
                             rho_concept(Not(e.right), t, s, fresh))
    if isinstance(e, Some):
        h = _herbrand(s, fresh)
        return _union(rho_role(NegRole(e.role), t, h, fresh),
                      rho_concept(Not(e.concept), h, s, fresh))
    if isinstance(e, All):
        x = fresh.var()
        return clausal_union(rho_role(e.role, t, x, fresh),
                             rho_concept(Not(e.concept), x, s + (x,), fresh))
    if isinstance(e, Typ):
        x = fresh.var()
        return _union(rho_concept(Not(e.inner), t, s, fresh),
                      clausal_union(_unit(pos(LessAtom(x, t))),
                                    rho_concept(e.inner, x, s + (x,), fresh)))
    raise TypeError(f"not a normalised concept expression: {d!r}")


def order_clauses() -> list:
    """Clauses for the negated strict-partial-order axioms of < and <<."""
    x, y, z, k, m, n = (Var(v) for v in "xyzkmn")
    return [
        frozenset([pos(LessAtom(x, y)), pos(LessAtom(y, z)), neg(LessAtom(x, z))]),
        frozenset([pos(LessAtom(x, x))]),
        frozenset([pos(LessAtom(x, y)), pos(LessAtom(y, x))]),
        frozenset([pos(LLessAtom(x, y, z, k)), pos(LLessAtom(z, k, m, n)),
                   neg(LLessAtom(x, y, m, n))]),
        frozenset([pos(LLessAtom(x, y, x, y))]),
        frozenset([pos(LLessAtom(x, y, z, k)), pos(LLessAtom(z, k, x, y))]),
    ]


_ORDER_ORIGINS = ("order:<-transitive", "order:<-irreflexive", "order:<-asymmetric",
                  "order:<<-transitive", "order:<<-irreflexive", "order:<<-asymmetric")


def _axiom_clauses(kb: KnowledgeBase, fresh: Fresh) -> list:
    """(origin, raw clauses) for every axiom of a normalised KB."""
    out = []
    for i, ax in enumerate(kb.tbox):
        x = fresh.var()
        out.append((f"tbox[{i}]", rho_concept(And(ax.lhs, normalize(Not(ax.rhs))), x, (x,), fresh)))
    for i, ax in enumerate(kb.rbox):
        x, y = fresh.var(), fresh.var()
        out.append((f"rbox[{i}]", clausal_union(rho_role(ax.lhs, x, y, fresh),
                                                 rho_role(normalize_role(NegRole(ax.rhs)), x, y, fresh))))
    for i, ax in enumerate(kb.abox):
        if isinstance(ax, ConceptAssertion):
            cl = rho_concept(normalize(Not(ax.concept)), Ind(ax.individual), (), fresh)
        else:
            a, b = ax.individuals
            cl = rho_role(normalize_role(NegRole(ax.role)), Ind(a), Ind(b), fresh)
        out.append((f"abox[{i}]", cl))
    return out


def query_clauses(q: Axiom, fresh: Optional[Fresh] = None) -> list:
    """Raw clauses for a (non-negated) query axiom."""
    fresh = fresh or Fresh()
    q = normalize_axiom(q)
    if isinstance(q, ConceptAssertion):
        return rho_concept(q.concept, Ind(q.individual), (), fresh)
    if isinstance(q, RoleAssertion):
        a, b = q.individuals
        return rho_role(q.role, Ind(a), Ind(b), fresh)
    if isinstance(q, GCI):
        c = fresh.constant()
        return _union(rho_concept(normalize(Not(q.lhs)), c, (), fresh),
                      rho_concept(q.rhs, c, (), fresh))
    if isinstance(q, RIA):
        c1, c2 = fresh.constant(), fresh.constant()
        return _union(rho_role(normalize_role(NegRole(q.lhs)), c1, c2, fresh),
                      rho_role(q.rhs, c1, c2, fresh))
    raise TypeError(f"not an axiom: {q!r}")


def _standardize(groups: list, fresh: Fresh, signature: Signature) -> Matrix:
    """Give every clause its own variables (x1, x2, ... in clause order)."""
    clauses = []
    n = 0
    for origin, raw in groups:
        for lits in raw:
            pre = sorted(lits, key=Literal.sort_key)
            mapping = {}
            for lit in pre:
                for arg in lit.atom.args:
                    for v in _vars_in_order(arg):
                        if v not in mapping:
                            n += 1
                            mapping[v] = Var(f"x{n}")
            clauses.append(Clause(tuple(l.substitute(mapping) for l in pre), origin))
    return Matrix(tuple(clauses), dict(fresh.functions), signature)


def _vars_in_order(t: Term) -> Iterator[Var]:
    if isinstance(t, Var):
        yield t
    elif isinstance(t, Fn):
        for a in t.args:
            yield from _vars_in_order(a)


def _order_group(include: bool) -> list:
    if not include:
        return []
    return [(origin, [c]) for origin, c in zip(_ORDER_ORIGINS, order_clauses())]


def delta(kb: KnowledgeBase, include_order_axioms: bool = True) -> Matrix:
    """Matrix of the negated knowledge base."""
    kb = normalize_kb(kb)
    fresh = Fresh()
    groups = _axiom_clauses(kb, fresh) + _order_group(include_order_axioms)
    return _standardize(groups, fresh, kb.signature)


def build_query_matrix(kb: KnowledgeBase, q: Axiom, include_order_axioms: bool = True) -> Matrix:
    """Matrix whose validity means ``kb`` entails ``q``: the negated KB
    clauses, then the query clauses (origin ``query``), then order axioms."""
    kb = normalize_kb(kb)
    fresh = Fresh()
    groups = _axiom_clauses(kb, fresh)
    groups.append(("query", query_clauses(q, fresh)))
    groups += _order_group(include_order_axioms)
    return _standardize(groups, fresh, kb.signature)


def paths(m: Iterable) -> Iterator[frozenset]:
    """Lazily enumerate every selection of one literal per clause."""
    lits = [tuple(c) for c in m]
    for choice in itertools.product(*lits):
        yield frozenset(choice)


def is_complementary_path(path: Iterable) -> bool:
    p = set(path)
    return any(l.negate() in p for l in p)


def copy_clause(c: Clause, i: int) -> Clause:
    """The ``i``-th copy of a clause: variables renamed to ``<name>_<i>``."""
    if i < 1:
        raise ValueError("copy index starts at 1")
    if c.is_ground():
        return replace(c, copy_index=i)
    mapping = {v: Var(f"{v.name}_{i}") for v in c.variables()}
    return Clause(tuple(l.substitute(mapping) for l in c.literals), c.origin, i)
