import dataclasses
import random

import pytest
from hypothesis import given, settings, strategies as st

from dlcm.calculus import (
    EMPTY, Budget, Outcome, RuleKind, Substitution, Verdict, check_proof,
    concept_set, entails, format_connections, format_tree, inconsistent, is_blocked, prove,
    unify_complement, used_copies,
)
from dlcm.fol import ConceptAtom, Fn, Ind, LessAtom, RoleAtom, Var, neg, pos
from dlcm.kb_syntax import KnowledgeBase, parse_kb, parse_query
from dlcm.matrix import Clause, Matrix, build_query_matrix
from dlcm.oracle import all_paths_complementary
from generators import random_ground_matrix, random_kb

a, b = Ind("a"), Ind("b")
x1, y1 = Var("x1"), Var("y1")
A = lambda t: pos(ConceptAtom("A", t))
B = lambda t: pos(ConceptAtom("B", t))

SAMPLE_KB = parse_kb("tbox: some s.B [= *A\nrbox: *r [= s\nabox:\n*r(a,b)\nB(b)")
WIZARDS = parse_kb("""
tbox:
*Muggle [= ~Wizard
PBWizard [= all knows.Wizard
rbox:
dates [= *knows
abox:
Muggle(hermione)
PBWizard(ron)
dates(ron,hermione)
""")
TYPICAL = parse_kb("tbox: *A [= B\nabox: A(a)")


def matrix(*clauses):
    return Matrix(tuple(Clause(tuple(c)) for c in clauses))


class TestUnifyComplement:
    def test_binds_variable(self):
        assert dict(unify_complement(A(a), A(x1).negate())) == {x1: a}

    def test_same_polarity(self):
        assert unify_complement(A(a), A(a)) is None

    def test_different_predicates(self):
        assert unify_complement(A(a), B(a).negate()) is None

    def test_occurs_check(self):
        l1 = pos(RoleAtom("r", x1, y1))
        l2 = neg(RoleAtom("r", Fn("h1", (x1,)), b))
        assert unify_complement(l1, l2) is None

    def test_extends_existing(self):
        s = Substitution({y1: b})
        out = unify_complement(pos(RoleAtom("r", x1, y1)), neg(RoleAtom("r", a, b)), s)
        assert dict(out) == {x1: a, y1: b}
        assert unify_complement(pos(RoleAtom("r", x1, y1)), neg(RoleAtom("r", a, a)), s) is None

    @settings(max_examples=200)
    @given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5)), max_size=8))
    def test_idempotence_is_preserved(self, pairs):
        terms = [a, b, x1, y1, Fn("f", (x1,)), Fn("g", (Var("z"),))]
        sigma = EMPTY
        for i, j in pairs:
            nxt = unify_complement(A(terms[i]), A(terms[j]).negate(), sigma)
            if nxt is not None:
                sigma = nxt
                assert sigma.is_idempotent()
                assert sigma.literal(A(terms[i])) == sigma.literal(A(terms[j]))


class TestConceptSet:
    def test_filters_concepts_of_term(self):
        path = [A(a), B(a).negate(), pos(RoleAtom("r", a, b))]
        assert concept_set(a, path) == {(True, "A"), (False, "B")}

    def test_substitution_first(self):
        assert concept_set(x1, [A(a)], Substitution({x1: a})) == {(True, "A")}

    def test_other_term(self):
        assert concept_set(b, [A(a)]) == frozenset()


class TestBlocking:
    def test_literal_on_path(self):
        assert is_blocked(A(x1), [A(a)], Substitution({x1: a}))

    def test_first_copy_not_blocked(self):
        assert not is_blocked(A(x1), [B(a)], EMPTY, x1, None)

    def test_opposite_polarity_is_not_repetition(self):
        assert not is_blocked(A(a), [A(a).negate()])

    def test_second_copy_with_no_new_concepts(self):
        c1, c2 = Var("v1"), Var("v2")
        path = [A(a), pos(LessAtom(c1, a)), A(c1)]
        assert is_blocked(pos(LessAtom(c2, c1)), path, EMPTY, c2, c1)

    def test_second_copy_with_a_new_concept(self):
        c1, c2 = Var("v1"), Var("v2")
        path = [A(a), pos(LessAtom(c1, a)), A(c1)]
        assert not is_blocked(B(c2), path, EMPTY, c2, c1)

    def test_typicality_trace_blocks_the_recopy(self):
        # the x' < x clause of *A [= B is re-entered and then blocked
        r = entails(TYPICAL, parse_query("B(a)"))
        assert r.verdict is Verdict.NOT_PROVED

    @settings(max_examples=300)
    @given(st.data())
    def test_repetition_is_monotone(self, data):
        lits = [A(a), A(b), B(a), A(x1), B(x1), A(a).negate(), B(y1).negate()]
        path = data.draw(st.lists(st.sampled_from(lits), max_size=4))
        extra = data.draw(st.lists(st.sampled_from(lits), max_size=3))
        lit = data.draw(st.sampled_from(lits))
        sigma = data.draw(st.sampled_from([EMPTY, Substitution({x1: a}), Substitution({y1: a})]))
        if is_blocked(lit, path, sigma):
            assert is_blocked(lit, path + extra, sigma)

    @settings(max_examples=300)
    @given(st.data())
    def test_copy_blocking_is_monotone_in_literals_off_the_new_term(self, data):
        t, prev = Var("v2"), Var("v1")
        lits = [A(a), A(prev), B(prev), A(t), B(t).negate(), pos(LessAtom(t, prev))]
        path = data.draw(st.lists(st.sampled_from(lits), max_size=4))
        lit = data.draw(st.sampled_from(lits))
        extra = data.draw(st.lists(st.sampled_from([A(a), A(prev), B(prev), B(b)]), max_size=3))
        if is_blocked(lit, path, EMPTY, t, prev):
            assert is_blocked(lit, path + extra, EMPTY, t, prev)

    def test_copy_blocking_can_lapse_on_a_longer_path(self):
        # a longer path may give the new term a concept the previous one lacks
        t, prev = Var("v2"), Var("v1")
        path = [A(prev), pos(LessAtom(t, prev))]
        assert is_blocked(A(t), path, EMPTY, t, prev)
        assert not is_blocked(A(t), path + [B(t)], EMPTY, t, prev)


class TestProve:
    def test_axiom_for_empty_goal(self):
        r = prove(matrix([A(a)]), goal=())
        assert r.outcome is Outcome.PROVED and r.tree.kind is RuleKind.AXIOM

    def test_single_positive_unit_has_no_proof(self):
        assert prove(matrix([A(a)])).outcome is Outcome.EXHAUSTED

    def test_complementary_units(self):
        m = matrix([A(a)], [A(a).negate()])
        r = prove(m)
        assert r.outcome is Outcome.PROVED and check_proof(r.tree, m)

    def test_sample_proof(self):
        r = entails(SAMPLE_KB, parse_query("A(a)"))
        assert r.verdict is Verdict.PROVED
        assert len(r.proof.connections()) == 8
        assert check_proof(r.proof, r.matrix)
        grounded = {str(r.sigma.literal(l)) for c in used_copies(r.proof) for l in c}
        assert {"s(a,b)", "~s(a,b)", "(h1(a),h2(b)) << (a,b)", "r(h1(a),h2(b))"} <= grounded

    def test_step_budget_is_inconclusive(self):
        r = prove(build_query_matrix(WIZARDS, parse_query("~Muggle(hermione)")),
                  budget=Budget(max_steps=10))
        assert r.outcome is Outcome.BUDGET

    def test_clauses_sharing_variables_are_kept_apart(self):
        m = matrix([A(x1).negate(), pos(ConceptAtom("B", Fn("f", (x1,))))], [A(a)],
                   [B(x1).negate(), A(x1)])
        assert prove(m).outcome is Outcome.EXHAUSTED
        m = matrix([A(x1).negate(), B(x1)], [A(a)], [B(x1).negate()])
        r = prove(m)
        assert r.outcome is Outcome.PROVED and check_proof(r.tree, m)

    def test_goal_variables_do_not_capture_clause_variables(self):
        m = matrix([A(Fn("f", (x1,))).negate()])
        r = prove(m, goal=(A(x1),))
        assert r.outcome is Outcome.PROVED
        assert r.sigma.term(x1) != Fn("f", (x1,))

    @settings(max_examples=300, deadline=None)
    @given(st.randoms(use_true_random=False))
    def test_ground_completeness(self, rnd):
        clauses = random_ground_matrix(rnd)
        m = matrix(*clauses)
        r = prove(m)
        assert r.outcome is not Outcome.BUDGET
        assert (r.outcome is Outcome.PROVED) == all_paths_complementary(clauses)
        if r.tree is not None:
            assert check_proof(r.tree, m)


def _soundness_sample():
    rng = random.Random(11)
    out = []
    while len(out) < 40:
        kb = random_kb(rng, 3)
        q = random_kb(rng, 1).axioms[0]
        r = entails(kb, q, Budget(max_steps=3000))
        if r.verdict is Verdict.PROVED:
            out.append(r)
    return out


@pytest.fixture(scope="module")
def proofs():
    return _soundness_sample()


@pytest.fixture(scope="module")
def sample():
    return entails(SAMPLE_KB, parse_query("A(a)"))


class TestSoundness:
    def test_checker_accepts_prover_output(self, proofs):
        assert all(check_proof(r.proof, r.matrix) for r in proofs)

    def test_grounded_used_copies_are_valid(self, proofs):
        for r in proofs:
            copies = used_copies(r.proof)
            ground = {v: a for c in copies for v in c.variables()}
            rows = [[r.sigma.literal(l).substitute(ground) for l in c] for c in copies]
            assert all_paths_complementary(rows)


def _replace(tree, pick, new):
    """Rebuild ``tree`` with the first node satisfying ``pick`` replaced by ``new(node)``."""
    done = []

    def walk(n):
        if not done and pick(n):
            done.append(n)
            return new(n)
        return dataclasses.replace(n, children=tuple(walk(c) for c in n.children))

    out = walk(tree)
    assert done
    return out


class TestCheckProof:
    def test_accepts(self, sample):
        assert check_proof(sample.proof, sample.matrix)

    def test_rejects_non_complementary_reduction(self, sample):
        def bad(n):
            other = next(p for p in n.path if p.positive == n.connection[0].positive)
            return dataclasses.replace(n, connection=(n.connection[0], other))
        tree = _replace(sample.proof, lambda n: n.kind is RuleKind.REDUCTION, bad)
        assert not check_proof(tree, sample.matrix)

    def test_rejects_non_axiom_leaf(self, sample):
        tree = _replace(sample.proof, lambda n: n.kind is RuleKind.AXIOM,
                        lambda n: dataclasses.replace(n, kind=RuleKind.REDUCTION))
        assert not check_proof(tree, sample.matrix)

    def test_rejects_wrong_matrix(self, sample):
        other = build_query_matrix(SAMPLE_KB, parse_query("B(a)"))
        assert not check_proof(sample.proof, other)

    def test_rejects_dropped_goal(self, sample):
        tree = _replace(sample.proof, lambda n: n.kind is RuleKind.EXTENSION,
                        lambda n: dataclasses.replace(n, children=n.children[:1]))
        assert not check_proof(tree, sample.matrix)


class TestFrontEnds:
    def test_clash_is_inconsistent(self):
        r = inconsistent(parse_kb("abox:\nA(a)\n~A(a)"))
        assert r.verdict is Verdict.INCONSISTENT and check_proof(r.proof, r.matrix)

    def test_empty_kb_is_consistent(self):
        assert inconsistent(KnowledgeBase()).verdict is Verdict.CONSISTENT

    def test_wizards_are_consistent(self):
        assert inconsistent(WIZARDS).verdict is Verdict.CONSISTENT

    def test_typicality_tautology(self):
        r = entails(KnowledgeBase(), parse_query("*A [= A"), include_order_axioms=False)
        assert r.verdict is Verdict.PROVED and check_proof(r.proof, r.matrix)

    def test_typical_instance_not_entailed(self):
        assert entails(TYPICAL, parse_query("B(a)")).verdict is Verdict.NOT_PROVED

    @pytest.mark.parametrize("query, verdict", [
        ("Wizard(hermione)", Verdict.PROVED),
        ("~*Muggle(hermione)", Verdict.PROVED),
        ("~Muggle(hermione)", Verdict.NOT_PROVED),
    ])
    def test_wizards(self, query, verdict):
        assert entails(WIZARDS, parse_query(query)).verdict is verdict

    def test_truthiness(self):
        assert entails(SAMPLE_KB, parse_query("A(a)"))
        assert not entails(TYPICAL, parse_query("B(a)"))

    def test_printers(self):
        r = entails(SAMPLE_KB, parse_query("A(a)"))
        text = format_connections(r.proof, r.sigma)
        assert text.splitlines()[0].startswith("1. A(a) -- ~A(")
        assert text.splitlines()[-1].startswith("sigma = {")
        tree = format_tree(r.proof, r.sigma)
        assert tree.splitlines()[0].startswith("[St]")
        extensions = sum(n.kind is RuleKind.EXTENSION for n in r.proof.nodes())
        assert sum("[Ax]" in l for l in tree.splitlines()) == extensions + 1
