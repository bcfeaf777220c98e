"""First-order fragment used as the semantic target of ALCH•.

Terms are variables, individual names, and function applications (a
nullary application is a fresh constant).  Literals carry their polarity
as a flag.  ``pi_concept``/``pi_role``/``pi_kb`` translate ALCH• into this
fragment; ``evaluate`` decides satisfaction over a finite interpretation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

from .kb_syntax import (
    All, And, Atom, Axiom, Bottom, ConceptAssertion, ConceptExpr, GCI,
    KnowledgeBase, NegRole, Not, Or, RIA, Role, RoleAssertion, RoleExpr, Some,
    Top, Typ, TypRole, normalize,
)

# ------------------------------------------------------------------ terms


@dataclass(frozen=True, order=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True, order=True)
class Ind:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True, order=True)
class Fn:
    name: str
    args: tuple = ()

    # hash and groundness are cached: proof search hashes deep terms a lot
    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.name, self.args))
            object.__setattr__(self, "_hash", h)
        return h

    @property
    def ground(self) -> bool:
        g = self.__dict__.get("_ground")
        if g is None:
            g = all(isinstance(a, Ind) or (isinstance(a, Fn) and a.ground) for a in self.args)
            object.__setattr__(self, "_ground", g)
        return g

    def __str__(self):
        if not self.args:
            return self.name
        return f"{self.name}({','.join(map(str, self.args))})"


Term = Union[Var, Ind, Fn]


def term_vars(t: Term) -> set:
    if isinstance(t, Var):
        return {t}
    if isinstance(t, Fn):
        out: set = set()
        for a in t.args:
            out |= term_vars(a)
        return out
    return set()


def subst_term(t: Term, m: Mapping) -> Term:
    """Apply a variable mapping once (not to a fixpoint)."""
    if isinstance(t, Var):
        return m.get(t, t)
    if isinstance(t, Fn) and t.args and not t.ground:
        return Fn(t.name, tuple(subst_term(a, m) for a in t.args))
    return t


# ---------------------------------------------------------------- literals


@dataclass(frozen=True)
class ConceptAtom:
    name: str
    arg: Term

    @property
    def args(self) -> tuple:
        return (self.arg,)

    def key(self):
        return ("C", self.name)

    def with_args(self, args) -> "ConceptAtom":
        return ConceptAtom(self.name, args[0])

    def __str__(self):
        return f"{self.name}({self.arg})"


@dataclass(frozen=True)
class RoleAtom:
    name: str
    left: Term
    right: Term

    @property
    def args(self) -> tuple:
        return (self.left, self.right)

    def key(self):
        return ("R", self.name)

    def with_args(self, args) -> "RoleAtom":
        return RoleAtom(self.name, args[0], args[1])

    def __str__(self):
        return f"{self.name}({self.left},{self.right})"


@dataclass(frozen=True)
class LessAtom:
    left: Term
    right: Term

    @property
    def args(self) -> tuple:
        return (self.left, self.right)

    def key(self):
        return ("<",)

    def with_args(self, args) -> "LessAtom":
        return LessAtom(args[0], args[1])

    def __str__(self):
        return f"{self.left} < {self.right}"


@dataclass(frozen=True)
class LLessAtom:
    """``(t1,u1) << (t2,u2)``: the pair order."""
    t1: Term
    u1: Term
    t2: Term
    u2: Term

    @property
    def args(self) -> tuple:
        return (self.t1, self.u1, self.t2, self.u2)

    def key(self):
        return ("<<",)

    def with_args(self, args) -> "LLessAtom":
        return LLessAtom(*args)

    def __str__(self):
        return f"({self.t1},{self.u1}) << ({self.t2},{self.u2})"


AtomT = Union[ConceptAtom, RoleAtom, LessAtom, LLessAtom]


@dataclass(frozen=True)
class Literal:
    atom: AtomT
    positive: bool = True

    def negate(self) -> "Literal":
        return Literal(self.atom, not self.positive)

    def substitute(self, m: Mapping) -> "Literal":
        return Literal(self.atom.with_args(tuple(subst_term(a, m) for a in self.atom.args)),
                       self.positive)

    def variables(self) -> set:
        out: set = set()
        for a in self.atom.args:
            out |= term_vars(a)
        return out

    def sort_key(self):
        return (self.atom.key(), tuple(str(a) for a in self.atom.args), not self.positive)

    def __str__(self):
        if self.positive:
            return str(self.atom)
        if isinstance(self.atom, (LessAtom, LLessAtom)):
            return f"~({self.atom})"
        return f"~{self.atom}"


def pos(atom: AtomT) -> Literal:
    return Literal(atom, True)


def neg(atom: AtomT) -> Literal:
    return Literal(atom, False)


# ---------------------------------------------------------------- formulas


@dataclass(frozen=True)
class Lit:
    literal: Literal


@dataclass(frozen=True)
class FAnd:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class FOr:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class FNot:
    inner: "Formula"


@dataclass(frozen=True)
class Exists:
    var: Var
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: Var
    body: "Formula"


Formula = Union[Lit, FAnd, FOr, FNot, Exists, Forall]


def conj(*fs: Formula) -> Formula:
    """Right-nested conjunction of one or more formulas."""
    if not fs:
        raise ValueError("empty conjunction")
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = FAnd(f, out)
    return out


def conjuncts(f: Formula) -> list:
    if isinstance(f, FAnd):
        return conjuncts(f.left) + conjuncts(f.right)
    return [f]


def forall(vars_, body: Formula) -> Formula:
    for v in reversed(vars_):
        body = Forall(v, body)
    return body


def format_formula(f: Formula) -> str:
    """Fully parenthesised ASCII rendering."""
    if isinstance(f, Lit):
        return str(f.literal)
    if isinstance(f, FAnd):
        return f"({format_formula(f.left)} & {format_formula(f.right)})"
    if isinstance(f, FOr):
        return f"({format_formula(f.left)} | {format_formula(f.right)})"
    if isinstance(f, FNot):
        if isinstance(f.inner, Lit):
            return str(f.inner.literal.negate())
        return f"~{format_formula(f.inner)}"
    if isinstance(f, Exists):
        return f"(exists {f.var}. {format_formula(f.body)})"
    if isinstance(f, Forall):
        return f"(forall {f.var}. {format_formula(f.body)})"
    raise TypeError(f"not a formula: {f!r}")


def free_vars(f: Formula) -> set:
    if isinstance(f, Lit):
        return f.literal.variables()
    if isinstance(f, (FAnd, FOr)):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, FNot):
        return free_vars(f.inner)
    return free_vars(f.body) - {f.var}


def nnf(f: Formula, negate: bool = False) -> Formula:
    """Negation normal form; negation survives only as literal polarity."""
    if isinstance(f, Lit):
        return Lit(f.literal.negate()) if negate else f
    if isinstance(f, FNot):
        return nnf(f.inner, not negate)
    if isinstance(f, FAnd):
        cls = FOr if negate else FAnd
        return cls(nnf(f.left, negate), nnf(f.right, negate))
    if isinstance(f, FOr):
        cls = FAnd if negate else FOr
        return cls(nnf(f.left, negate), nnf(f.right, negate))
    if isinstance(f, Exists):
        cls = Forall if negate else Exists
        return cls(f.var, nnf(f.body, negate))
    if isinstance(f, Forall):
        cls = Exists if negate else Forall
        return cls(f.var, nnf(f.body, negate))
    raise TypeError(f"not a formula: {f!r}")


# ------------------------------------------------------------- translation


class FreshVars:
    """Deterministic fresh variable source: x1, y1, x2, ... per run."""

    def __init__(self):
        self.count = 0

    def pair(self) -> tuple:
        self.count += 1
        return Var(f"x{self.count}"), Var(f"y{self.count}")

    def one(self, prefix: str = "y") -> Var:
        self.count += 1
        return Var(f"{prefix}{self.count}")


def pi_role(r: RoleExpr, t: Term, u: Term, fresh: Optional[FreshVars] = None) -> Formula:
    fresh = fresh or FreshVars()
    if isinstance(r, Role):
        return Lit(pos(RoleAtom(r.name, t, u)))
    if isinstance(r, TypRole):
        x, y = fresh.pair()
        below = Lit(neg(LLessAtom(x, y, t, u)))
        return FAnd(pi_role(r.inner, t, u, fresh),
                    Forall(x, Forall(y, FOr(below, pi_role(NegRole(r.inner), x, y, fresh)))))
    inner = r.inner
    if isinstance(inner, Role):
        return Lit(neg(RoleAtom(inner.name, t, u)))
    if isinstance(inner, NegRole):
        return pi_role(inner.inner, t, u, fresh)
    # negated typicality
    x, y = fresh.pair()
    return FOr(pi_role(NegRole(inner.inner), t, u, fresh),
               Exists(x, Exists(y, FAnd(Lit(pos(LLessAtom(x, y, t, u))),
                                        pi_role(inner, x, y, fresh)))))


def pi_concept(d: ConceptExpr, t: Term, fresh: Optional[FreshVars] = None) -> Formula:
    """Translate a concept; negated compounds are rewritten by duality."""
    fresh = fresh or FreshVars()
    if isinstance(d, (Top, Bottom)):
        return pi_concept(normalize(d), t, fresh)
    if isinstance(d, Atom):
        return Lit(pos(ConceptAtom(d.name, t)))
    if isinstance(d, And):
        return FAnd(pi_concept(d.left, t, fresh), pi_concept(d.right, t, fresh))
    if isinstance(d, Or):
        return FOr(pi_concept(d.left, t, fresh), pi_concept(d.right, t, fresh))
    if isinstance(d, Some):
        y = fresh.one()
        return Exists(y, FAnd(pi_role(d.role, t, y, fresh), pi_concept(d.concept, y, fresh)))
    if isinstance(d, All):
        y = fresh.one()
        return Forall(y, FOr(pi_role(NegRole(d.role), t, y, fresh),
                             pi_concept(d.concept, y, fresh)))
    if isinstance(d, Typ):
        y = fresh.one()
        return FAnd(pi_concept(d.inner, t, fresh),
                    Forall(y, FOr(Lit(neg(LessAtom(y, t))),
                                  pi_concept(Not(d.inner), y, fresh))))
    if not isinstance(d, Not):
        raise TypeError(f"not a concept expression: {d!r}")
    e = d.inner
    if isinstance(e, (Top, Bottom)):
        return pi_concept(normalize(d), t, fresh)
    if isinstance(e, Atom):
        return Lit(neg(ConceptAtom(e.name, t)))
    if isinstance(e, Not):
        return pi_concept(e.inner, t, fresh)
    if isinstance(e, And):
        return FOr(pi_concept(Not(e.left), t, fresh), pi_concept(Not(e.right), t, fresh))
    if isinstance(e, Or):
        return FAnd(pi_concept(Not(e.left), t, fresh), pi_concept(Not(e.right), t, fresh))
    if isinstance(e, Some):
        return pi_concept(All(e.role, Not(e.concept)), t, fresh)
    if isinstance(e, All):
        return pi_concept(Some(e.role, Not(e.concept)), t, fresh)
    # negated typicality
    y = fresh.one()
    return FOr(pi_concept(Not(e.inner), t, fresh),
               Exists(y, FAnd(Lit(pos(LessAtom(y, t))), pi_concept(e, y, fresh))))


def order_axioms(fresh: Optional[FreshVars] = None) -> list:
    """The six strict-partial-order conjuncts for < and <<."""
    x, y, z, k, m, n = (Var(v) for v in ("x", "y", "z", "k", "m", "n"))
    less = lambda a, b: Lit(pos(LessAtom(a, b)))
    lless = lambda a, b, c, d: Lit(pos(LLessAtom(a, b, c, d)))
    return [
        forall([x, y, z], FOr(FNot(FAnd(less(x, y), less(y, z))), less(x, z))),
        forall([x], FNot(less(x, x))),
        forall([x, y], FOr(FNot(less(x, y)), FNot(less(y, x)))),
        forall([x, y, z, k, m, n],
               FOr(FNot(FAnd(lless(x, y, z, k), lless(z, k, m, n))), lless(x, y, m, n))),
        forall([x, y], FNot(lless(x, y, x, y))),
        forall([x, y, z, k], FOr(FNot(lless(x, y, z, k)), FNot(lless(z, k, x, y)))),
    ]


def pi_axiom(ax: Axiom, fresh: Optional[FreshVars] = None) -> Formula:
    fresh = fresh or FreshVars()
    if isinstance(ax, ConceptAssertion):
        return pi_concept(ax.concept, Ind(ax.individual), fresh)
    if isinstance(ax, RoleAssertion):
        a, b = ax.individuals
        return pi_role(ax.role, Ind(a), Ind(b), fresh)
    if isinstance(ax, GCI):
        x = fresh.one("x")
        return Forall(x, pi_concept(Or(Not(ax.lhs), ax.rhs), x, fresh))
    if isinstance(ax, RIA):
        x, y = fresh.pair()
        return Forall(x, Forall(y, FOr(pi_role(NegRole(ax.lhs), x, y, fresh),
                                       pi_role(ax.rhs, x, y, fresh))))
    raise TypeError(f"not an axiom: {ax!r}")


def pi_kb(kb: KnowledgeBase, fresh: Optional[FreshVars] = None) -> Formula:
    """Conjunction of assertion, inclusion and order-axiom translations."""
    fresh = fresh or FreshVars()
    concept_asserts = [a for a in kb.abox if isinstance(a, ConceptAssertion)]
    role_asserts = [a for a in kb.abox if isinstance(a, RoleAssertion)]
    parts = [pi_axiom(a, fresh) for a in concept_asserts + role_asserts + list(kb.tbox) + list(kb.rbox)]
    return conj(*parts, *order_axioms())


# --------------------------------------------------------------- semantics


@dataclass
class FolInterpretation:
    """Finite first-order interpretation.

    Missing concept/role names are read as empty tables.  ``functions``
    maps a symbol to a dict from argument tuples to objects; nullary
    symbols use the key ``()``.
    """
    domain: tuple
    individuals: dict = field(default_factory=dict)
    concepts: dict = field(default_factory=dict)
    roles: dict = field(default_factory=dict)
    less: frozenset = frozenset()
    lless: frozenset = frozenset()
    functions: dict = field(default_factory=dict)

    def term(self, t: Term, env: Mapping):
        if isinstance(t, Var):
            if t not in env:
                raise KeyError(f"unbound variable {t}")
            return env[t]
        if isinstance(t, Ind):
            return self.individuals[t.name]
        vals = tuple(self.term(a, env) for a in t.args)
        return self.functions[t.name][vals]

    def atom(self, a: AtomT, env: Mapping) -> bool:
        vals = tuple(self.term(x, env) for x in a.args)
        if isinstance(a, ConceptAtom):
            return vals[0] in self.concepts.get(a.name, ())
        if isinstance(a, RoleAtom):
            return vals in self.roles.get(a.name, ())
        if isinstance(a, LessAtom):
            return vals in self.less
        return ((vals[0], vals[1]), (vals[2], vals[3])) in self.lless


def evaluate(f: Formula, interp: FolInterpretation, env: Optional[Mapping] = None) -> bool:
    env = dict(env or {})
    if isinstance(f, Lit):
        return interp.atom(f.literal.atom, env) == f.literal.positive
    if isinstance(f, FNot):
        return not evaluate(f.inner, interp, env)
    if isinstance(f, FAnd):
        return evaluate(f.left, interp, env) and evaluate(f.right, interp, env)
    if isinstance(f, FOr):
        return evaluate(f.left, interp, env) or evaluate(f.right, interp, env)
    if isinstance(f, Exists):
        return any(evaluate(f.body, interp, {**env, f.var: o}) for o in interp.domain)
    if isinstance(f, Forall):
        return all(evaluate(f.body, interp, {**env, f.var: o}) for o in interp.domain)
    raise TypeError(f"not a formula: {f!r}")


def transitive_closure(rel) -> frozenset:
    closure = set(rel)
    while True:
        extra = {(a, d) for (a, b) in closure for (c, d) in closure if b == c} - closure
        if not extra:
            return frozenset(closure)
        closure |= extra
