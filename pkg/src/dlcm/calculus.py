"""Connection calculus: Start, Reduction, Extension and Axiom.

The search is depth first.  Reduction is tried before Extension, clauses
are tried in matrix order, and every Extension into a non-ground clause
uses a fresh copy.  Two blocking conditions prune the search:

* a literal already on the active path may not be added again (case 1);
* the n-th copy of a clause on a branch (n >= 2) is refused when the first
  new term it introduces carries no concept that the previous copy's new
  term does not already carry (case 2).

Copies per clause on a branch are bounded; the bound is raised by
iterative deepening (1, 2, 4, ... up to ``Budget.max_copies``).  A search
that finishes without ever hitting a bound is a definitive negative.
"""

from __future__ import annotations

import enum
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .fol import ConceptAtom, Fn, Ind, Literal, Term, Var, term_vars
from .kb_syntax import Axiom, KnowledgeBase
from .matrix import Clause, Matrix, build_query_matrix, copy_clause, delta

__all__ = [
    "Substitution", "unify_terms", "unify_complement", "concept_set", "is_blocked",
    "RuleKind", "ProofTree", "Budget", "Outcome", "ProveResult", "prove",
    "check_proof", "proof_substitution", "used_copies", "Verdict",
    "EntailmentResult", "entails", "inconsistent",
    "format_connections", "format_tree",
]


class Substitution(Mapping):
    """Immutable variable-to-term map.

    Bindings are stored triangularly (a bound term may mention variables
    bound later) and resolved on lookup, so extending a substitution costs
    one dictionary copy.  Seen as a Mapping it is idempotent: every value
    is fully resolved.
    """

    __slots__ = ("_b", "_memo")

    def __init__(self, bindings: Optional[dict] = None):
        self._b = dict(bindings or {})
        self._memo = {}

    def __getitem__(self, v):
        return self.term(self._b[v])

    def __iter__(self):
        return iter(self._b)

    def __len__(self):
        return len(self._b)

    def __contains__(self, v):
        return v in self._b

    def __repr__(self):
        return f"Substitution({self})"

    def __str__(self):
        items = sorted(self.items(), key=lambda kv: kv[0].name)
        return "{" + ", ".join(f"{v}/{t}" for v, t in items) + "}"

    def term(self, t: Term) -> Term:
        if isinstance(t, Ind) or not self._b or (isinstance(t, Fn) and t.ground):
            return t
        r = self._memo.get(t)
        if r is None:
            if isinstance(t, Var):
                b = self._b.get(t)
                r = t if b is None else self.term(b)
            else:
                args = tuple(self.term(a) for a in t.args)
                r = t if args == t.args else Fn(t.name, args)
            self._memo[t] = r
        return r

    def literal(self, lit: Literal) -> Literal:
        args = tuple(self.term(a) for a in lit.atom.args)
        return lit if args == lit.atom.args else Literal(lit.atom.with_args(args), lit.positive)

    def bind(self, v: Var, t: Term) -> "Substitution":
        """Extend with ``v -> t``; ``v`` must be unbound and not occur in ``self.term(t)``."""
        new = Substitution.__new__(Substitution)
        new._b = dict(self._b)
        new._b[v] = t
        new._memo = {}
        return new

    def is_idempotent(self) -> bool:
        bound = set(self._b)
        return all(not (term_vars(t) & bound) for t in self.values())

    def delta(self, older: "Substitution") -> dict:
        """Bindings of self that are new relative to ``older``, resolved."""
        return {v: self.term(t) for v, t in self._b.items() if v not in older._b}


EMPTY = Substitution()


def _occurs(v: Var, t: Term) -> bool:
    if t == v:
        return True
    return isinstance(t, Fn) and any(_occurs(v, a) for a in t.args)


def unify_terms(pairs, sigma: Substitution = EMPTY) -> Optional[Substitution]:
    """Most general extension of ``sigma`` unifying each pair (with occurs check)."""
    stack = list(pairs)
    while stack:
        a, b = stack.pop()
        a, b = sigma.term(a), sigma.term(b)
        if a == b:
            continue
        if isinstance(b, Var) and not isinstance(a, Var):
            a, b = b, a
        if isinstance(a, Var):
            if _occurs(a, b):
                return None
            sigma = sigma.bind(a, b)
        elif isinstance(a, Fn) and isinstance(b, Fn) and a.name == b.name \
                and len(a.args) == len(b.args):
            stack.extend(zip(a.args, b.args))
        else:
            return None
    return sigma


def unify_complement(l1: Literal, l2: Literal, sigma: Substitution = EMPTY) -> Optional[Substitution]:
    """Extend ``sigma`` so that ``l1`` and ``l2`` become complementary."""
    if l1.positive == l2.positive or l1.atom.key() != l2.atom.key():
        return None
    return unify_terms(zip(l1.atom.args, l2.atom.args), sigma)


def concept_set(t: Term, path, sigma: Substitution = EMPTY) -> frozenset:
    """Polarity-tagged concept names asserted of ``sigma(t)`` on ``sigma(path)``."""
    target = sigma.term(t)
    out = set()
    for lit in path:
        if isinstance(lit.atom, ConceptAtom) and sigma.term(lit.atom.arg) == target:
            out.add((lit.positive, lit.atom.name))
    return frozenset(out)


def is_blocked(lit: Literal, path, sigma: Substitution = EMPTY,
               term: Optional[Term] = None, previous: Optional[Term] = None) -> bool:
    """Blocking test for adding ``lit`` to ``path``.

    ``term`` is the distinguished new term of the copy ``lit`` comes from
    and ``previous`` that of the previous copy of the same clause on the
    branch; both are ``None`` for a first copy.
    """
    key, target = lit.atom.key(), None
    resolve = sigma.term
    for p in path:
        if p.positive == lit.positive and p.atom.key() == key:
            if target is None:
                target = [resolve(a) for a in lit.atom.args]
            if all(resolve(a) == b for a, b in zip(p.atom.args, target)):
                return True
    if term is None or previous is None:
        return False
    extended = list(path) + [lit]
    return concept_set(term, extended, sigma) <= concept_set(previous, extended, sigma)


# ------------------------------------------------------------- proof trees

class RuleKind(enum.Enum):
    AXIOM = "Ax"
    START = "St"
    REDUCTION = "Red"
    EXTENSION = "Ext"


@dataclass(frozen=True)
class ProofTree:
    kind: RuleKind
    goal: tuple
    path: tuple
    connection: Optional[tuple] = None      # (goal literal, path/clause literal)
    delta: dict = field(default_factory=dict)
    clause: Optional[Clause] = None        # copy entered by Start/Extension
    source: Optional[int] = None           # index of that clause in the matrix
    children: tuple = ()

    def nodes(self) -> Iterator["ProofTree"]:
        yield self
        for c in self.children:
            yield from c.nodes()

    def connections(self) -> list:
        return [n for n in self.nodes() if n.connection is not None]


@dataclass(frozen=True)
class Budget:
    max_copies: int = 8
    max_depth: int = 512
    max_steps: int = 20_000      # Reduction/Extension attempts over all deepening rounds


class _OutOfSteps(Exception):
    pass


class Outcome(enum.Enum):
    PROVED = "proved"
    EXHAUSTED = "exhausted"      # definitive: no proof exists under blocking
    BUDGET = "budget"            # a copy or depth bound was hit


@dataclass
class ProveResult:
    outcome: Outcome
    tree: Optional[ProofTree] = None
    sigma: Optional[Substitution] = None
    copy_limit: int = 0


class _Search:
    def __init__(self, matrix: Matrix, copy_limit: int, max_depth: int, steps_left: int):
        self.m = matrix
        self.copy_limit = copy_limit
        self.max_depth = max_depth
        self.steps_left = steps_left
        self.counter = [0] * len(matrix)
        self.ground = [c.is_ground() for c in matrix]
        self.budget_hit = False
        # complementary-candidate index: (atom key, polarity) -> [(clause, literal)]
        self.index: dict = {}
        for ci, c in enumerate(matrix):
            for li, lit in enumerate(c.literals):
                self.index.setdefault((lit.atom.key(), lit.positive), []).append((ci, li))

    def _tick(self) -> None:
        self.steps_left -= 1
        if self.steps_left < 0:
            raise _OutOfSteps

    def fresh_copy(self, ci: int) -> Clause:
        if self.ground[ci]:
            return self.m[ci]
        self.counter[ci] += 1
        return copy_clause(self.m[ci], self.counter[ci])

    def start(self, ci: int) -> Iterator[tuple]:
        copy = self.fresh_copy(ci)
        t = _first_new_term(copy.literals, (), EMPTY)
        branch = {} if self.ground[ci] or t is None else {ci: (t,)}
        for sigma, sub in self.prove(copy.literals, (), EMPTY, branch):
            yield sigma, ProofTree(RuleKind.START, (), (), clause=copy, source=ci, children=(sub,))

    def prove(self, goal: tuple, path: tuple, sigma: Substitution, branch: dict) -> Iterator[tuple]:
        if not goal:
            yield sigma, ProofTree(RuleKind.AXIOM, goal, path)
            return
        if len(path) >= self.max_depth:
            self.budget_hit = True
            return
        l1, rest = goal[0], goal[1:]
        if is_blocked(l1, path, sigma):
            return

        for p in path:
            s2 = unify_complement(l1, p, sigma)
            if s2 is None:
                continue
            self._tick()
            for s3, sub in self.prove(rest, path, s2, branch):
                yield s3, ProofTree(RuleKind.REDUCTION, goal, path, (l1, p),
                                    s2.delta(sigma), children=(sub,))

        new_path = path + (l1,)
        for ci, li in self.index.get((l1.atom.key(), not l1.positive), ()):
            if unify_complement(l1, self.m[ci].literals[li], sigma) is None:
                continue
            self._tick()
            copy = self.fresh_copy(ci)
            l2 = copy.literals[li]
            s2 = unify_complement(l1, l2, sigma)
            if s2 is None:
                continue
            others = copy.literals[:li] + copy.literals[li + 1:]
            if any(is_blocked(l, new_path, s2) for l in others):
                continue
            sub_branch = branch
            if not self.ground[ci]:
                earlier = branch.get(ci, ())
                t = _first_new_term(copy.literals, new_path, s2)
                # a copy adding no new term only adds literals over known
                # terms; regularity bounds those, so it is not counted
                if t is not None:
                    if earlier and is_blocked(l2, new_path, s2, t, earlier[-1]):
                        continue
                    if len(earlier) >= self.copy_limit:
                        self.budget_hit = True
                        continue
                    sub_branch = {**branch, ci: earlier + (t,)}
            for s3, left in self.prove(others, new_path, s2, sub_branch):
                for s4, right in self.prove(rest, path, s3, branch):
                    yield s4, ProofTree(RuleKind.EXTENSION, goal, path, (l1, l2),
                                        s2.delta(sigma), copy, ci, (left, right))


def _first_new_term(literals, path, sigma: Substitution) -> Optional[Term]:
    """First argument term of the copy that does not occur on the path."""
    order = []
    for lit in literals:
        for a in lit.atom.args:
            a = sigma.term(a)
            if a not in order:
                order.append(a)
    unseen = set(order)
    for p in path:
        for a in p.atom.args:
            unseen.discard(sigma.term(a))
        if not unseen:
            return None
    return next((a for a in order if a in unseen), None)


def _apart(m: Matrix, taken: set) -> Matrix:
    """Rename clause variables when clauses share variables with each other
    or with ``taken``; copies are named per clause and would otherwise clash."""
    seen = set(taken)
    clash = False
    for c in m:
        vs = c.variables()
        if vs & seen:
            clash = True
            break
        seen |= vs
    if not clash:
        return m
    clauses = tuple(
        c.substitute({v: Var(f"{v.name}.{i}") for v in c.variables()}) for i, c in enumerate(m))
    return Matrix(clauses, m.functions, m.signature)


def _limits(max_copies: int) -> list:
    out, n = [], 1
    while n < max_copies:
        out.append(n)
        n *= 2
    out.append(max_copies)
    return out


def prove(matrix: Matrix, start: Optional[list] = None, budget: Budget = Budget(),
          goal: Optional[tuple] = None, path: tuple = (),
          sigma: Substitution = EMPTY) -> ProveResult:
    """Search for a connection proof.

    With ``goal=None`` the search begins with the Start rule, trying the
    clause indices in ``start`` (default: all, in matrix order).  Otherwise
    it proves the given sub-goal against ``path`` and returns the subtree.
    """
    order = list(range(len(matrix))) if start is None else list(start)
    taken = {v for lit in (goal or ()) + tuple(path) for v in lit.variables()}
    matrix = _apart(matrix, taken)
    steps = budget.max_steps
    for limit in _limits(budget.max_copies):
        search = _Search(matrix, limit, budget.max_depth, steps)
        try:
            if goal is not None:
                found = next(search.prove(tuple(goal), tuple(path), sigma, {}), None)
                if found is not None:
                    return ProveResult(Outcome.PROVED, found[1], found[0], limit)
            else:
                for ci in order:
                    found = next(search.start(ci), None)
                    if found is not None:
                        return ProveResult(Outcome.PROVED, found[1], found[0], limit)
        except _OutOfSteps:
            return ProveResult(Outcome.BUDGET, copy_limit=limit)
        if not search.budget_hit:
            return ProveResult(Outcome.EXHAUSTED, copy_limit=limit)
        steps = search.steps_left
    return ProveResult(Outcome.BUDGET, copy_limit=budget.max_copies)


# ------------------------------------------------------------ proof checker

def proof_substitution(tree: ProofTree) -> Optional[Substitution]:
    """Compose all bindings recorded in the tree; None if they are cyclic
    or bind a variable twice inconsistently."""
    raw: dict = {}
    for n in tree.nodes():
        for v, t in n.delta.items():
            if v in raw and raw[v] != t:
                return None
            raw[v] = t
    resolved: dict = {}

    def resolve(t, seen):
        if isinstance(t, Var):
            if t in seen:
                raise ValueError("cyclic")
            if t in resolved:
                return resolved[t]
            if t in raw:
                r = resolve(raw[t], seen | {t})
                resolved[t] = r
                return r
            return t
        if isinstance(t, Fn) and t.args:
            return Fn(t.name, tuple(resolve(a, seen) for a in t.args))
        return t

    try:
        for v in raw:
            resolve(v, frozenset())
    except ValueError:
        return None
    return Substitution(resolved)


def _is_variant(copy: Clause, original: Clause) -> bool:
    """``copy`` equals ``original`` up to an injective variable renaming."""
    if len(copy.literals) != len(original.literals):
        return False
    mapping: dict = {}

    def match_term(a, b) -> bool:
        if isinstance(b, Var):
            if not isinstance(a, Var):
                return False
            if b in mapping:
                return mapping[b] == a
            if a in mapping.values():
                return False
            mapping[b] = a
            return True
        if isinstance(b, Fn):
            return isinstance(a, Fn) and a.name == b.name and len(a.args) == len(b.args) \
                and all(match_term(x, y) for x, y in zip(a.args, b.args))
        return a == b

    def search(remaining_orig, remaining_copy) -> bool:
        if not remaining_orig:
            return True
        o = remaining_orig[0]
        for i, c in enumerate(remaining_copy):
            if c.positive != o.positive or c.atom.key() != o.atom.key():
                continue
            saved = dict(mapping)
            if all(match_term(x, y) for x, y in zip(c.atom.args, o.atom.args)) and \
                    search(remaining_orig[1:], remaining_copy[:i] + remaining_copy[i + 1:]):
                return True
            mapping.clear()
            mapping.update(saved)
        return False

    return search(list(original.literals), list(copy.literals))


def _without(goal: tuple, lit: Literal) -> set:
    s = set(goal)
    s.discard(lit)
    return s


def check_proof(tree: ProofTree, m: Matrix) -> bool:
    """Independent validation of a proof tree against a matrix."""
    sigma = proof_substitution(tree)
    if sigma is None or not sigma.is_idempotent():
        return False
    copy_vars: dict = {}

    def entered(node) -> bool:
        if node.clause is None or node.source is None or not 0 <= node.source < len(m):
            return False
        if not _is_variant(node.clause, m[node.source]):
            return False
        key = (node.source, node.clause.copy_index)
        vs = frozenset(node.clause.variables())
        if key in copy_vars and copy_vars[key] != vs:
            return False
        copy_vars[key] = vs
        return True

    def complementary(l1, l2) -> bool:
        return l1.positive != l2.positive and sigma.literal(l1).atom == sigma.literal(l2).atom

    def check(node) -> bool:
        k = node.kind
        if k is RuleKind.AXIOM:
            return not node.goal and not node.children
        if k is RuleKind.START:
            if node.goal or node.path or len(node.children) != 1 or not entered(node):
                return False
            child = node.children[0]
            return set(child.goal) == set(node.clause.literals) and not child.path \
                and check(child)
        if node.connection is None:
            return False
        l1, l2 = node.connection
        if l1 not in node.goal or not complementary(l1, l2):
            return False
        if k is RuleKind.REDUCTION:
            if l2 not in node.path or len(node.children) != 1:
                return False
            child = node.children[0]
            return set(child.goal) == _without(node.goal, l1) \
                and set(child.path) == set(node.path) and check(child)
        if k is RuleKind.EXTENSION:
            if len(node.children) != 2 or not entered(node) or l2 not in node.clause.literals:
                return False
            left, right = node.children
            return set(left.goal) == _without(node.clause.literals, l2) \
                and set(left.path) == set(node.path) | {l1} \
                and set(right.goal) == _without(node.goal, l1) \
                and set(right.path) == set(node.path) \
                and check(left) and check(right)
        return False

    if tree.kind is not RuleKind.START or not check(tree):
        return False
    keys = list(copy_vars)
    for i, a in enumerate(keys):
        for b in keys[i + 1:]:
            if copy_vars[a] & copy_vars[b]:
                return False
    return True


def used_copies(tree: ProofTree) -> list:
    """Distinct clause copies entered by the proof, in tree order."""
    seen = {}
    for n in tree.nodes():
        if n.clause is not None:
            seen.setdefault((n.source, n.clause.copy_index), n.clause)
    return list(seen.values())


# -------------------------------------------------------------- front ends

class Verdict(enum.Enum):
    PROVED = "proved"
    NOT_PROVED = "not-proved"
    INCONSISTENT = "inconsistent"
    CONSISTENT = "consistent"
    INCONCLUSIVE = "inconclusive"


@dataclass
class EntailmentResult:
    verdict: Verdict
    matrix: Matrix
    proof: Optional[ProofTree] = None
    sigma: Optional[Substitution] = None

    def __bool__(self):
        return self.verdict in (Verdict.PROVED, Verdict.INCONSISTENT)


def entails(kb: KnowledgeBase, q: Axiom, budget: Budget = Budget(),
            include_order_axioms: bool = True) -> EntailmentResult:
    """Decide whether ``kb`` preferentially entails ``q``; query clauses
    are tried as start clauses first."""
    m = build_query_matrix(kb, q, include_order_axioms)
    query = [i for i, c in enumerate(m) if c.origin == "query"]
    start = query + [i for i in range(len(m)) if i not in query]
    r = prove(m, start, budget)
    if r.outcome is Outcome.PROVED:
        return EntailmentResult(Verdict.PROVED, m, r.tree, r.sigma)
    if r.outcome is Outcome.EXHAUSTED:
        return EntailmentResult(Verdict.NOT_PROVED, m)
    return EntailmentResult(Verdict.INCONCLUSIVE, m)


def inconsistent(kb: KnowledgeBase, budget: Budget = Budget(),
                 include_order_axioms: bool = True) -> EntailmentResult:
    m = delta(kb, include_order_axioms)
    r = prove(m, None, budget)
    if r.outcome is Outcome.PROVED:
        return EntailmentResult(Verdict.INCONSISTENT, m, r.tree, r.sigma)
    if r.outcome is Outcome.EXHAUSTED:
        return EntailmentResult(Verdict.CONSISTENT, m)
    return EntailmentResult(Verdict.INCONCLUSIVE, m)


# ---------------------------------------------------------------- printing

def format_connections(tree: ProofTree, sigma: Optional[Substitution] = None) -> str:
    """Numbered connections in search order, then the final substitution."""
    sigma = sigma if sigma is not None else proof_substitution(tree)
    lines = []
    for i, n in enumerate(tree.connections(), start=1):
        l1, l2 = n.connection
        label = f" {Substitution(n.delta)}" if n.delta else ""
        lines.append(f"{i}. {l1} -- {l2}  [{n.kind.value}]{label}")
    lines.append(f"sigma = {sigma}")
    return "\n".join(lines)


def _set(lits) -> str:
    return "{" + ", ".join(map(str, lits)) + "}"


def format_tree(tree: ProofTree, sigma: Optional[Substitution] = None) -> str:
    """Indented sequent-style derivation, conclusion first."""
    sigma = sigma if sigma is not None else proof_substitution(tree)
    lines = []

    def walk(n, depth):
        goal = "e" if n.kind is RuleKind.START else _set(n.goal)
        path = "e" if n.kind is RuleKind.START else _set(n.path)
        extra = ""
        if n.connection is not None:
            extra = f"   <{n.connection[0]} -- {n.connection[1]}>"
        lines.append(f"{'  ' * depth}[{n.kind.value}] {goal}, M, {path}{extra}")
        for c in n.children:
            walk(c, depth + 1)

    walk(tree, 0)
    lines.append(f"sigma = {sigma}")
    return "\n".join(lines)
