import pytest
from hypothesis import given, settings, strategies as st

from dlcm.fol import (
    ConceptAtom, Exists, FAnd, FNot, FOr, Fn, FolInterpretation, Forall, Ind, Lit,
    RoleAtom, Var, evaluate, neg, nnf, pos,
)
from dlcm.kb_syntax import KnowledgeBase, parse_concept, parse_kb, parse_query, parse_role
from dlcm.matrix import (
    Clause, Fresh, apply_fn, build_query_matrix, clausal_union, copy_clause, delta,
    format_matrix, matrix_of_formula, paths, rho_concept, rho_role,
)
from helpers import FG, REFERENCE, SAMPLE_KB, ORDER, is_variant, render
from strategies import kbs

a, b = Ind("a"), Ind("b")
x, y = Var("x"), Var("y")
A = lambda t: pos(ConceptAtom("A", t))
B = lambda t: pos(ConceptAtom("B", t))

def strs(m):
    return {frozenset(str(l) for l in c) for c in m}


class TestClausalUnion:
    def test_product(self):
        assert set(clausal_union([{A(a)}], [{B(a)}, {B(b)}])) == {
            frozenset({A(a), B(a)}), frozenset({A(a), B(b)})}

    def test_empty(self):
        assert clausal_union([], [{A(a)}]) == []
        assert clausal_union([{A(a)}], []) == []

    def test_contradictory_unions_dropped(self):
        assert clausal_union([{A(a)}], [{A(a).negate()}, {B(a)}]) == [frozenset({A(a), B(a)})]

    def test_typical_role_rows(self):
        fresh = Fresh()
        typ = rho_role(parse_role("*r"), x, y, fresh)
        rows = clausal_union(typ, [{neg(RoleAtom("s", x, y))}])
        assert len(rows) == 3
        for want in REFERENCE[2:5]:
            assert any(is_variant(Clause(tuple(c)), want, FG) for c in rows)

    @given(st.lists(st.frozensets(st.sampled_from([A(a), B(a), A(b)]), min_size=1), max_size=4),
           st.lists(st.frozensets(st.sampled_from([B(b), A(a), B(a)]), min_size=1), max_size=4))
    def test_cardinality(self, m1, m2):
        out = clausal_union(m1, m2)
        assert len(out) <= len(m1) * len(m2)
        assert len(set(out)) == len(out)


class TestApplyFn:
    def test_constant_for_empty_string(self):
        assert apply_fn("f", ()) == Fn("c1", ())

    def test_arguments(self):
        assert apply_fn("f", (x,)) == Fn("f", (x,))
        assert apply_fn("g", (x, y)) == Fn("g", (x, y))

    def test_constants_are_fresh(self):
        fresh = Fresh()
        assert apply_fn("f", (), fresh) != apply_fn("f", (), fresh)
        assert fresh.functions == {"c1": 0, "c2": 0}


class TestMatrixOfFormula:
    def test_literal(self):
        assert matrix_of_formula(Lit(A(a))) == [frozenset({A(a)})]

    def test_existential_conjunction(self):
        f = Exists(x, FAnd(Lit(A(x)), Lit(B(x))))
        assert matrix_of_formula(f) == [frozenset({A(x), B(x)})]

    def test_universal_at_top_is_a_constant(self):
        fresh = Fresh()
        assert matrix_of_formula(Forall(x, Lit(A(x))), (), fresh) == [frozenset({A(Fn("c1", ()))})]
        assert fresh.functions == {"c1": 0}

    def test_universal_under_existential(self):
        f = Exists(y, Forall(x, Lit(pos(RoleAtom("r", y, x)))))
        assert strs(matrix_of_formula(f)) == {frozenset({"r(y,h1(y))"})}

    def test_rejects_non_nnf(self):
        with pytest.raises(ValueError):
            matrix_of_formula(FNot(Lit(A(a))))

    @settings(max_examples=200)
    @given(st.data())
    def test_dnf_reading_matches_formula(self, data):
        f = data.draw(_ground_formulas)
        m = matrix_of_formula(nnf(f))
        table = data.draw(st.sets(st.sampled_from(["a", "b"])))
        rtable = data.draw(st.sets(st.sampled_from([(0, 0), (0, 1), (1, 0), (1, 1)])))
        i = FolInterpretation((0, 1), {"a": 0, "b": 1}, {"A": {0 if n == "a" else 1 for n in table}},
                              {"r": set(rtable)})
        dnf = any(all(evaluate(Lit(l), i) for l in c) for c in m)
        assert dnf == evaluate(f, i)


_ground_atoms = st.sampled_from([
    Lit(A(a)), Lit(A(b)), Lit(pos(RoleAtom("r", a, b))), Lit(pos(RoleAtom("r", b, b)))])
_ground_formulas = st.recursive(
    _ground_atoms,
    lambda inner: st.one_of(st.builds(FAnd, inner, inner), st.builds(FOr, inner, inner),
                            st.builds(FNot, inner)),
    max_leaves=8)


class TestRho:
    def test_negated_role(self):
        assert strs(rho_role(parse_role("~r"), a, b)) == {frozenset({"~r(a,b)"})}

    def test_negated_typical_role(self):
        m = rho_role(parse_role("~*r"), a, b)
        assert len(m) == 2
        assert is_variant(Clause(tuple(m[0])), REFERENCE[5])
        assert is_variant(Clause(tuple(m[1])), REFERENCE[6])

    def test_typical_role(self):
        fresh = Fresh()
        m = rho_role(parse_role("*r"), x, y, fresh)
        want = [{"r(x,y)", "~((f(x),g(y)) << (x,y))"}, {"r(x,y)", "~r(f(x),g(y))"},
                {"r(x,y)", "(x',y') << (f(x),g(y))", "r(x',y')"}]
        assert len(m) == 3
        for c, w in zip(m, want):
            assert render(Clause(tuple(c)), [], FG) - {"r(x,y)"} <= frozenset(w) or \
                is_variant(Clause(tuple(c)), w, FG)
        assert fresh.functions == {"h1": 1, "h2": 1}

    def test_atomic_concept(self):
        assert rho_concept(parse_concept("A"), a) == [frozenset({A(a)})]

    def test_sample_rows_one_and_two(self):
        m = rho_concept(parse_concept("some s.B & ~*A"), x, (x,))
        assert len(m) == 2
        assert is_variant(Clause(tuple(m[0])), REFERENCE[0])
        assert is_variant(Clause(tuple(m[1])), REFERENCE[1])

    def test_de_morgan_split(self):
        assert strs(rho_concept(parse_concept("~(A & B)"), a)) == {
            frozenset({"~A(a)"}), frozenset({"~B(a)"})}

    def test_universal_uses_a_skolem_term(self):
        fresh = Fresh()
        m = rho_concept(parse_concept("all r.A"), x, (x,), fresh)
        assert strs(m) == {frozenset({"~r(x,h1(x))"}), frozenset({"A(h1(x))"})}


class TestDelta:
    def test_empty_kb(self):
        m = delta(KnowledgeBase())
        assert len(m) == 6
        for c, want in zip(m, ORDER):
            assert is_variant(c, want)

    def test_without_order_axioms(self):
        assert len(delta(KnowledgeBase(), include_order_axioms=False)) == 0

    def test_single_assertion(self):
        m = delta(parse_kb("abox: A(a)"))
        assert [render(c) for c in m][0] == {"~A(a)"}
        assert len(m) == 7

    def test_sample_matrix(self):
        m = build_query_matrix(parse_kb(SAMPLE_KB), parse_query("A(a)"))
        assert len(m) == 15
        for c, want in zip(m, REFERENCE + ORDER):
            assert is_variant(c, want, FG), (str(c), want)
        assert m.functions == {"h1": 1, "h2": 1}

    def test_query_gci(self):
        m = build_query_matrix(KnowledgeBase(), parse_query("*A [= A"))
        assert [render(c) for c in m][:3] == [{"~A(c1)"}, {"x1 < c1", "A(x1)"}, {"A(c1)"}]
        assert len(m) == 9

    def test_query_already_asserted(self):
        m = build_query_matrix(parse_kb("abox: A(a)"), parse_query("A(a)"), False)
        assert [render(c) for c in m] == [{"~A(a)"}, {"A(a)"}]

    @settings(max_examples=50, deadline=None)
    @given(kbs(max_axioms=3))
    def test_variables_are_clause_local(self, kb):
        m = delta(kb)
        seen = set()
        for c in m:
            vs = c.variables()
            assert not vs & seen
            seen |= vs

    @settings(max_examples=50, deadline=None)
    @given(kbs(max_axioms=3))
    def test_function_registry(self, kb):
        m = delta(kb)
        used = {}
        for c in m:
            for l in c:
                for t in l.atom.args:
                    _collect(t, used)
        assert used == {k: v for k, v in m.functions.items() if k in used}
        # symbols whose clauses were all contradictory stay registered
        assert set(used) <= set(m.functions)
        for c in m:
            assert not any(l.negate() in c.literals for l in c)


def _collect(t, out):
    if isinstance(t, Fn):
        out[t.name] = len(t.args)
        for u in t.args:
            _collect(u, out)


class TestPaths:
    def test_single_path(self):
        assert list(paths([{A(a)}, {B(a)}])) == [frozenset({A(a), B(a)})]

    def test_two_paths(self):
        assert set(paths([(A(a), A(b)), (B(a),)])) == {frozenset({A(a), B(a)}), frozenset({A(b), B(a)})}

    def test_sample_prefix(self):
        m = build_query_matrix(parse_kb(SAMPLE_KB), parse_query("A(a)"))
        assert sum(1 for _ in paths(m.clauses[:2])) == 3 * 4


class TestCopyClause:
    def test_renames_variables(self):
        c = copy_clause(Clause((A(x),)), 1)
        assert render(c) == {"A(x_1)"} and c.copy_index == 1

    def test_ground_clause_keeps_literals(self):
        c = Clause((neg(RoleAtom("r", a, b)),))
        d = copy_clause(c, 2)
        assert d.literals == c.literals and d.copy_index == 2

    def test_renaming_is_consistent(self):
        m = build_query_matrix(parse_kb(SAMPLE_KB), parse_query("A(a)"))
        c = copy_clause(m[1], 1)
        assert is_variant(c, REFERENCE[1])
        assert not c.variables() & m[1].variables()

    def test_index_must_be_positive(self):
        with pytest.raises(ValueError):
            copy_clause(Clause((A(x),)), 0)


def test_format_matrix_is_one_clause_per_line():
    m = delta(parse_kb("abox: A(a)"), include_order_axioms=False)
    assert format_matrix(m) == "{ ~A(a) }"
