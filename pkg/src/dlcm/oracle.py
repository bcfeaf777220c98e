"""Brute-force semantics used as a test oracle.

Finite bi-ordered interpretations are enumerated in a fixed mixed-radix
order.  ``check_model`` is the readable scalar evaluator; the countermodel
search evaluates whole batches of interpretations at once with numpy,
encoding each concept extension as an n-bit mask and each role extension
as an n*n-bit mask (bit ``i*n + j`` stands for the pair ``(i, j)``).
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

import numpy as np

from .fol import FolInterpretation, Term, transitive_closure
from .kb_syntax import (
    GCI, RIA, All, And, Atom, Axiom, Bottom, ConceptAssertion, ConceptExpr,
    KnowledgeBase, Not, NegRole, Or, Role, RoleAssertion, RoleExpr, Signature,
    Some, Top, Typ, TypRole, signature_of,
)

__all__ = [
    "BiOrderedInterpretation", "concept_extension", "role_extension",
    "satisfies", "check_model", "strict_partial_orders",
    "enumerate_interpretations", "count_interpretations", "find_countermodel",
    "find_model", "ground_matrix_valid", "all_paths_complementary",
    "to_fol", "from_fol", "format_interpretation", "MAX_DOMAIN",
]

MAX_DOMAIN = 3
MAX_SPACE = 1 << 28     # interpretations per domain size the batch search will scan
_CHUNK = 1 << 16


@dataclass(frozen=True)
class BiOrderedInterpretation:
    """Domain elements are the integers ``0 .. n-1``."""
    domain: tuple
    individuals: dict = field(default_factory=dict)
    concepts: dict = field(default_factory=dict)
    roles: dict = field(default_factory=dict)
    less: frozenset = frozenset()
    lless: frozenset = frozenset()

    def is_valid(self) -> bool:
        return _is_strict_order(self.less) and _is_strict_order(self.lless)

    def __hash__(self):
        return hash((self.domain, self.less, self.lless))


def _is_strict_order(rel) -> bool:
    rel = set(rel)
    if any(a == b for a, b in rel):
        return False
    if any((b, a) in rel for a, b in rel):
        return False
    return all((a, d) in rel for (a, b) in rel for (c, d) in rel if b == c)


def _minimal(ext, order) -> frozenset:
    return frozenset(x for x in ext if not any((y, x) in order for y in ext))


def role_extension(r: RoleExpr, o: BiOrderedInterpretation) -> frozenset:
    if isinstance(r, Role):
        return frozenset(o.roles.get(r.name, ()))
    if isinstance(r, NegRole):
        full = {(a, b) for a in o.domain for b in o.domain}
        return frozenset(full - role_extension(r.inner, o))
    if isinstance(r, TypRole):
        return _minimal(role_extension(r.inner, o), o.lless)
    raise TypeError(f"not a role: {r!r}")


def concept_extension(c: ConceptExpr, o: BiOrderedInterpretation) -> frozenset:
    dom = frozenset(o.domain)
    if isinstance(c, Atom):
        return frozenset(o.concepts.get(c.name, ()))
    if isinstance(c, Top):
        return dom
    if isinstance(c, Bottom):
        return frozenset()
    if isinstance(c, Not):
        return dom - concept_extension(c.inner, o)
    if isinstance(c, And):
        return concept_extension(c.left, o) & concept_extension(c.right, o)
    if isinstance(c, Or):
        return concept_extension(c.left, o) | concept_extension(c.right, o)
    if isinstance(c, Some):
        r, e = role_extension(c.role, o), concept_extension(c.concept, o)
        return frozenset(x for x in dom if any((x, y) in r for y in e))
    if isinstance(c, All):
        r, e = role_extension(c.role, o), concept_extension(c.concept, o)
        return frozenset(x for x in dom if all(y in e for y in dom if (x, y) in r))
    if isinstance(c, Typ):
        return _minimal(concept_extension(c.inner, o), o.less)
    raise TypeError(f"not a concept: {c!r}")


def satisfies(o: BiOrderedInterpretation, ax: Axiom) -> bool:
    if isinstance(ax, GCI):
        return concept_extension(ax.lhs, o) <= concept_extension(ax.rhs, o)
    if isinstance(ax, RIA):
        return role_extension(ax.lhs, o) <= role_extension(ax.rhs, o)
    if isinstance(ax, ConceptAssertion):
        return o.individuals[ax.individual] in concept_extension(ax.concept, o)
    if isinstance(ax, RoleAssertion):
        a, b = ax.individuals
        return (o.individuals[a], o.individuals[b]) in role_extension(ax.role, o)
    raise TypeError(f"not an axiom: {ax!r}")


def check_model(o: BiOrderedInterpretation, k) -> bool:
    """Whether ``o`` satisfies every axiom of ``k`` (a KB or an axiom iterable)."""
    axioms = k.axioms if isinstance(k, KnowledgeBase) else tuple(k)
    return all(satisfies(o, ax) for ax in axioms)


# ------------------------------------------------------------ enumeration

@functools.lru_cache(maxsize=None)
def strict_partial_orders(k: int) -> tuple:
    """All strict partial orders on ``{0..k-1}``, as frozensets of pairs.

    Found by filtering every irreflexive relation for transitivity;
    asymmetry then follows.  The empty order comes first.
    """
    off = [(a, b) for a in range(k) for b in range(k) if a != b]
    out = []
    for mask in range(1 << len(off)):
        rel = {off[i] for i in range(len(off)) if mask >> i & 1}
        if all((a, d) in rel for (a, b) in rel for (c, d) in rel if b == c):
            out.append(frozenset(rel))
    return tuple(out)


@functools.lru_cache(maxsize=None)
def _pair_orders(n: int, enumerate_all: bool) -> tuple:
    """Orders on domain pairs, mapped back from orders on pair indices."""
    if not enumerate_all or n > 2:
        return (frozenset(),)
    pairs = [(i, j) for i in range(n) for j in range(n)]
    return tuple(frozenset((pairs[p], pairs[q]) for p, q in rel)
                 for rel in strict_partial_orders(n * n))


def _check_bound(max_domain: int, allow_large: bool) -> None:
    if max_domain < 0:
        raise ValueError("max_domain must be non-negative")
    if max_domain > MAX_DOMAIN and not allow_large:
        raise ValueError(f"max_domain {max_domain} exceeds {MAX_DOMAIN}; pass allow_large=True")


class _Space:
    """Mixed-radix layout of all interpretations of one domain size.

    Digit order, least significant first: concept masks, role masks,
    individual images, order on objects, order on pairs.
    """

    def __init__(self, sig: Signature, n: int, role_orders: bool):
        self.n = n
        self.concepts = sorted(sig.concepts)
        self.roles = sorted(sig.roles)
        self.individuals = sorted(sig.individuals)
        self.orders = strict_partial_orders(n)
        self.pair_orders = _pair_orders(n, role_orders)
        self.radices = ([1 << n] * len(self.concepts) + [1 << (n * n)] * len(self.roles)
                        + [n] * len(self.individuals)
                        + [len(self.orders), len(self.pair_orders)])
        self.size = math.prod(self.radices)
        # predecessor masks: pred[o, i] has bit j iff j < i under order o
        self.pred = np.zeros((len(self.orders), max(n, 1)), dtype=np.int64)
        for oi, rel in enumerate(self.orders):
            for a, b in rel:
                self.pred[oi, b] |= 1 << a
        nn = n * n
        self.lpred = np.zeros((len(self.pair_orders), max(nn, 1)), dtype=np.int64)
        for oi, rel in enumerate(self.pair_orders):
            for (a, b), (c, d) in rel:
                self.lpred[oi, c * n + d] |= 1 << (a * n + b)

    def digits(self, idx):
        out = []
        for r in self.radices:
            out.append(idx % r)
            idx = idx // r
        return out

    def decode(self, idx: int) -> BiOrderedInterpretation:
        d = self.digits(idx)
        n, k = self.n, 0
        concepts, roles, inds = {}, {}, {}
        for c in self.concepts:
            concepts[c] = frozenset(i for i in range(n) if d[k] >> i & 1)
            k += 1
        for r in self.roles:
            roles[r] = frozenset((i // n, i % n) for i in range(n * n) if d[k] >> i & 1)
            k += 1
        for a in self.individuals:
            inds[a] = d[k]
            k += 1
        return BiOrderedInterpretation(tuple(range(n)), inds, concepts, roles,
                                       self.orders[d[k]], self.pair_orders[d[k + 1]])


def _signature(k, q: Optional[Axiom] = None) -> Signature:
    if isinstance(k, KnowledgeBase):
        sig = k.signature.union(signature_of(*k.axioms))
        axioms = k.axioms
    else:
        axioms = tuple(k)
        sig = signature_of(*axioms)
    if q is not None:
        sig = sig.union(signature_of(q))
    return sig


def _role_exprs(ax: Axiom) -> Iterator[RoleExpr]:
    def roles_in(c):
        if isinstance(c, (Some, All)):
            yield c.role
            yield from roles_in(c.concept)
        elif isinstance(c, (Not, Typ)):
            yield from roles_in(c.inner)
        elif isinstance(c, (And, Or)):
            yield from roles_in(c.left)
            yield from roles_in(c.right)

    if isinstance(ax, GCI):
        yield from roles_in(ax.lhs)
        yield from roles_in(ax.rhs)
    elif isinstance(ax, RIA):
        yield ax.lhs
        yield ax.rhs
    elif isinstance(ax, ConceptAssertion):
        yield from roles_in(ax.concept)
    else:
        yield ax.role


def _has_typ_role(axioms) -> bool:
    def typ(r):
        return isinstance(r, TypRole) or (isinstance(r, NegRole) and typ(r.inner))
    return any(typ(r) for ax in axioms for r in _role_exprs(ax))


def count_interpretations(signature: Signature, max_domain: int, role_orders: bool = True,
                          allow_large: bool = False) -> int:
    _check_bound(max_domain, allow_large)
    return sum(_Space(signature, n, role_orders).size for n in range(1, max_domain + 1))


def enumerate_interpretations(signature: Signature, max_domain: int, role_orders: bool = True,
                              allow_large: bool = False) -> Iterator[BiOrderedInterpretation]:
    """Every interpretation of ``signature`` with 1..max_domain objects.

    Orders on pairs are enumerated only for domains of size at most 2 (and
    only when ``role_orders``); larger domains use the empty pair order.
    """
    _check_bound(max_domain, allow_large)
    for n in range(1, max_domain + 1):
        space = _Space(signature, n, role_orders)
        for idx in range(space.size):
            o = space.decode(idx)
            assert o.is_valid()
            yield o


# ---------------------------------------------------------- batch evaluation

class _Batch:
    def __init__(self, space: _Space, idx: np.ndarray):
        self.s = space
        n = space.n
        self.full = np.int64((1 << n) - 1)
        self.fullsq = np.int64((1 << (n * n)) - 1)
        d = space.digits(idx)
        k = 0
        self.concepts, self.roles, self.inds = {}, {}, {}
        for c in space.concepts:
            self.concepts[c] = d[k]
            k += 1
        for r in space.roles:
            self.roles[r] = d[k]
            k += 1
        for a in space.individuals:
            self.inds[a] = d[k]
            k += 1
        self.pred = [space.pred[d[k], i] for i in range(n)]
        self.lpred = [space.lpred[d[k + 1], p] for p in range(n * n)]
        self.zero = np.zeros_like(idx)

    def role(self, r: RoleExpr) -> np.ndarray:
        if isinstance(r, Role):
            return self.roles[r.name]
        if isinstance(r, NegRole):
            return ~self.role(r.inner) & self.fullsq
        if isinstance(r, TypRole):
            return _minimal_bits(self.role(r.inner), self.lpred)
        raise TypeError(f"not a role: {r!r}")

    def concept(self, c: ConceptExpr) -> np.ndarray:
        n = self.s.n
        if isinstance(c, Atom):
            return self.concepts[c.name]
        if isinstance(c, Top):
            return self.zero | self.full
        if isinstance(c, Bottom):
            return self.zero
        if isinstance(c, Not):
            return ~self.concept(c.inner) & self.full
        if isinstance(c, And):
            return self.concept(c.left) & self.concept(c.right)
        if isinstance(c, Or):
            return self.concept(c.left) | self.concept(c.right)
        if isinstance(c, (Some, All)):
            r, e = self.role(c.role), self.concept(c.concept)
            out = self.zero.copy()
            for i in range(n):
                row = (r >> (i * n)) & self.full
                hit = (row & e) != 0 if isinstance(c, Some) else (row & ~e & self.full) == 0
                out |= hit.astype(np.int64) << i
            return out
        if isinstance(c, Typ):
            return _minimal_bits(self.concept(c.inner), self.pred)
        raise TypeError(f"not a concept: {c!r}")

    def holds(self, ax: Axiom) -> np.ndarray:
        n = self.s.n
        if isinstance(ax, GCI):
            return (self.concept(ax.lhs) & ~self.concept(ax.rhs)) == 0
        if isinstance(ax, RIA):
            return (self.role(ax.lhs) & ~self.role(ax.rhs)) == 0
        if isinstance(ax, ConceptAssertion):
            return ((self.concept(ax.concept) >> self.inds[ax.individual]) & 1) == 1
        if isinstance(ax, RoleAssertion):
            a, b = ax.individuals
            bit = self.inds[a] * n + self.inds[b]
            return ((self.role(ax.role) >> bit) & 1) == 1
        raise TypeError(f"not an axiom: {ax!r}")


def _minimal_bits(ext: np.ndarray, pred: list) -> np.ndarray:
    out = np.zeros_like(ext)
    for i, p in enumerate(pred):
        keep = ((ext >> i) & 1).astype(bool) & ((p & ext) == 0)
        out |= keep.astype(np.int64) << i
    return out


def _search(axioms, q: Optional[Axiom], sig: Signature, max_domain: int,
            allow_large: bool) -> Optional[BiOrderedInterpretation]:
    _check_bound(max_domain, allow_large)
    every = tuple(axioms) + ((q,) if q is not None else ())
    role_orders = _has_typ_role(every)
    for n in range(1, max_domain + 1):
        space = _Space(sig, n, role_orders)
        if space.size > MAX_SPACE and not allow_large:
            raise ValueError(f"{space.size} interpretations of size {n} exceed the guard "
                             f"of {MAX_SPACE}; lower max_domain or pass allow_large=True")
        for lo in range(0, space.size, _CHUNK):
            idx = np.arange(lo, min(lo + _CHUNK, space.size), dtype=np.int64)
            batch = _Batch(space, idx)
            ok = np.ones(len(idx), dtype=bool)
            for ax in axioms:
                ok &= batch.holds(ax)
                if not ok.any():
                    break
            if q is not None and ok.any():
                ok &= ~batch.holds(q)
            hits = np.flatnonzero(ok)
            if hits.size:
                return space.decode(int(idx[hits[0]]))
    return None


def find_countermodel(k, q: Axiom, max_domain: int = MAX_DOMAIN,
                      allow_large: bool = False) -> Optional[BiOrderedInterpretation]:
    """First enumerated model of ``k`` that falsifies ``q``.

    ``None`` only means that no countermodel exists up to ``max_domain``.
    """
    axioms = k.axioms if isinstance(k, KnowledgeBase) else tuple(k)
    return _search(axioms, q, _signature(k, q), max_domain, allow_large)


def find_model(k, max_domain: int = MAX_DOMAIN,
               allow_large: bool = False) -> Optional[BiOrderedInterpretation]:
    axioms = k.axioms if isinstance(k, KnowledgeBase) else tuple(k)
    return _search(axioms, None, _signature(k), max_domain, allow_large)


# ------------------------------------------------------- ground validity

def all_paths_complementary(clauses) -> bool:
    """Every selection of one literal per clause contains some L and ~L."""
    clauses = [tuple(c) for c in clauses]

    def walk(i: int, path: frozenset) -> bool:
        if i == len(clauses):
            return False
        for lit in clauses[i]:
            if lit.negate() in path:
                continue
            if not walk(i + 1, path | {lit}):
                return False
        return True

    return walk(0, frozenset())


def _ground_instances(clause, terms: list) -> list:
    lits = tuple(clause)
    vs = sorted({v for l in lits for v in l.variables()}, key=lambda v: v.name)
    if not vs:
        return [frozenset(lits)]
    out = []
    for combo in itertools.product(terms, repeat=len(vs)):
        m = dict(zip(vs, combo))
        inst = frozenset(l.substitute(m) for l in lits)
        if inst not in out:
            out.append(inst)
    return out


def ground_matrix_valid(m, ground_terms: Iterable[Term], copy_bound: int = 1,
                        max_candidates: int = 200_000) -> bool:
    """Whether some instantiation with at most ``copy_bound`` copies per
    clause, drawn from ``ground_terms``, makes every path complementary.

    Extra clauses never open a closed path, so it suffices to try sets of
    exactly ``min(copy_bound, #instances)`` distinct instances per clause.
    """
    terms = sorted(set(ground_terms), key=str)
    per_clause = []
    for c in m:
        inst = _ground_instances(c, terms)
        if not inst:
            # a non-ground clause with no terms to instantiate it contributes nothing
            continue
        per_clause.append(list(itertools.combinations(inst, min(copy_bound, len(inst)))))
    total = math.prod(len(p) for p in per_clause)
    if total > max_candidates:
        raise ValueError(f"{total} instantiations exceed the guard of {max_candidates}")
    for choice in itertools.product(*per_clause):
        if all_paths_complementary([c for group in choice for c in group]):
            return True
    return False


# ------------------------------------------------------------- conversions

def to_fol(o: BiOrderedInterpretation) -> FolInterpretation:
    return FolInterpretation(o.domain, dict(o.individuals), dict(o.concepts), dict(o.roles),
                             frozenset(o.less), frozenset(o.lless))


def from_fol(i: FolInterpretation) -> BiOrderedInterpretation:
    """Read a first-order structure as a bi-ordered interpretation.

    The orders are closed transitively, which changes nothing when the
    structure satisfies the order axioms.
    """
    index = {x: k for k, x in enumerate(i.domain)}
    return BiOrderedInterpretation(
        tuple(range(len(i.domain))),
        {a: index[x] for a, x in i.individuals.items()},
        {c: frozenset(index[x] for x in ext) for c, ext in i.concepts.items()},
        {r: frozenset((index[x], index[y]) for x, y in ext) for r, ext in i.roles.items()},
        transitive_closure((index[x], index[y]) for x, y in i.less),
        transitive_closure(((index[a], index[b]), (index[c], index[d]))
                           for (a, b), (c, d) in i.lless),
    )


def format_interpretation(o: BiOrderedInterpretation) -> str:
    def obj(x):
        return f"o{x + 1}"

    def objs(xs):
        return "{" + ", ".join(obj(x) for x in sorted(xs)) + "}"

    def pairs(xs):
        return "{" + ", ".join(f"({obj(a)},{obj(b)})" for a, b in sorted(xs)) + "}"

    lines = ["domain      " + objs(o.domain)]
    for a in sorted(o.individuals):
        lines.append(f"individual  {a} -> {obj(o.individuals[a])}")
    for c in sorted(o.concepts):
        lines.append(f"concept     {c} = {objs(o.concepts[c])}")
    for r in sorted(o.roles):
        lines.append(f"role        {r} = {pairs(o.roles[r])}")
    lines.append("less        " + ("{" + ", ".join(f"{obj(a)}<{obj(b)}" for a, b in sorted(o.less)) + "}"))
    lines.append("lless       " + ("{" + ", ".join(
        f"({obj(a)},{obj(b)})<<({obj(c)},{obj(d)})" for (a, b), (c, d) in sorted(o.lless)) + "}"))
    return "\n".join(lines)
