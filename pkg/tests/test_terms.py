import pickle
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import EX6_D, EX6_G2, C, T, grammar, random_term, tuple_size, to_tuple
from proofgram.terms import (
    Clause, Fn, Node, Param, Production, ProofGrammar, Var, clause_metrics, expand,
    is_linear, param_occurrences, postorder, substitute_params, term_size, validate_grammar,
    value,
)


class TestHashConsing:
    def test_nodes_are_interned(self):
        assert Node("D", [Node("ax-1"), Param(1)]) is T("D(ax-1,$1)")
        assert Fn("i", [Var("x"), Var("y")]) is Fn("i", (Var("x"), Var("y")))

    def test_pickle_roundtrip_keeps_identity(self):
        t = T(EX6_D)
        assert pickle.loads(pickle.dumps(t)) is t
        f = C("i(?x,i(?y,?x))").head
        assert pickle.loads(pickle.dumps(f)) is f

    def test_param_index_positive(self):
        with pytest.raises(ValueError):
            Param(0)

    def test_postorder_children_first_and_distinct(self):
        t = T("D(D(ax-1,ax-1),D(ax-1,ax-1))")
        seen = list(postorder(t))
        assert seen[-1] is t
        assert len(seen) == len(set(seen)) == 3


class TestTermSize:
    @pytest.mark.parametrize("text,size", [
        ("$1", 0), ("ax-1", 0), ("G(ax-1)", 1), ("D(G(ax-1),ax-2)", 3), (EX6_D, 10),
    ])
    def test_examples(self, text, size):
        assert term_size(T(text)) == size

    def test_formula_terms(self):
        assert term_size(C("i(?x,i(?y,?x))").head) == 4
        assert term_size(Var("x")) == 0

    def test_matches_tree_oracle_on_random_terms(self):
        rng = random.Random(5)
        for _ in range(300):
            t = random_term(rng, {"D": 2, "G": 1, "a": 0, "b": 0}, 6, 2)
            assert term_size(t) == tuple_size(to_tuple(t))


class TestClauseMetrics:
    @pytest.mark.parametrize("text,expected", [
        ("i(?x1,i(?x2,?x1))", (2, 2)),
        ("?x", (0, 0)),
        ("i(?x,?y) <- i(?x,?y)", (2, 1)),
        ("c", (0, 0)),
        ("n(c) <- ?x", (1, 1)),
    ])
    def test_examples(self, text, expected):
        assert clause_metrics(C(text)) == expected


class TestLinearity:
    @pytest.mark.parametrize("text,linear", [
        ("D($1,ax-1)", True),
        ("D($1,D(D($1,ax-1),ax-1))", False),
        ("ax-1", True),
        ("D($2,$1)", True),
    ])
    def test_examples(self, text, linear):
        assert is_linear(T(text)) is linear

    def test_occurrence_counts(self):
        assert param_occurrences(T("D($1,D(D($1,$2),ax-1))")) == {1: 2, 2: 1}

    def test_subterms_of_linear_terms_are_linear(self):
        rng = random.Random(11)
        for _ in range(300):
            t = random_term(rng, {"D": 2, "G": 1, "a": 0}, 5, 3)
            if is_linear(t):
                assert all(is_linear(s) for s in postorder(t))


class TestSubstitution:
    @pytest.mark.parametrize("d,args,out", [
        ("D($1,ax-1)", ["ax-2"], "D(ax-2,ax-1)"),
        ("D($1,D(D($1,ax-1),ax-1))", ["ax-1"], "D(ax-1,D(D(ax-1,ax-1),ax-1))"),
        ("ax-1", [], "ax-1"),
        ("D($2,$1)", ["ax-1", "G(ax-2)"], "D(G(ax-2),ax-1)"),
    ])
    def test_examples(self, d, args, out):
        assert substitute_params(T(d), [T(a) for a in args]) is T(out)

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            substitute_params(T("D($1,$2)"), [T("ax-1")])

    def test_ground_iff_ground_args(self):
        d = T("D($1,$2)")
        assert substitute_params(d, [T("a"), T("b")]).ground
        assert not substitute_params(d, [T("a"), T("$1")]).ground

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 10 ** 6))
    def test_edge_count_additivity(self, seed):
        rng = random.Random(seed)
        sym = {"D": 2, "G": 1, "a": 0, "b": 0}
        d = random_term(rng, sym, 5, 3)
        args = [random_term(rng, sym, 3, 0) for _ in range(3)]
        occ = param_occurrences(d)
        want = term_size(d) + sum(n * term_size(args[i - 1]) for i, n in occ.items())
        assert term_size(substitute_params(d, args)) == want


class TestGrammar:
    def test_structure(self):
        G = grammar(EX6_G2)
        assert G.nonterminals == ["p2", "p1", "Start"]
        assert G.size == 7
        assert "p1" in G and "q" not in G
        assert G["p2"].arity == 1 and G.index("Start") == 2

    def test_duplicate_nonterminal_reported(self):
        G = ProofGrammar([Production("p", 0, T("a")), Production("p", 0, T("b"))])
        assert any("duplicate" in e for e in validate_grammar(G).errors)

    def test_validate_example6(self, base3):
        rep = validate_grammar(grammar(EX6_G2), {k: base3[k] for k in ("D", "ax-1")})
        assert rep.ok and not rep.warnings
        assert rep.terminals == {"D", "ax-1"}

    def test_ordering_violation(self, base3):
        G = ProofGrammar([Production("p1", 0, T("p2(ax-1)")), Production("p2", 1, T("$1"))])
        rep = validate_grammar(G, base3)
        assert any("ordering" in e for e in rep.errors)

    def test_unused_parameter_warning(self, base3):
        rep = validate_grammar(grammar([("q", 2, "D($1,$1)")]), base3)
        assert rep.ok
        assert any("unused parameter $2" in w for w in rep.warnings)

    @pytest.mark.parametrize("rows,needle", [
        ([("q", 1, "D($2,ax-1)")], "exceeds arity"),
        ([("q", 0, "D(ax-1)")], "arity mismatch"),
        ([("q", 0, "nope")], "undeclared terminal"),
    ])
    def test_errors(self, base3, rows, needle):
        rep = validate_grammar(grammar(rows), base3)
        assert any(needle in e for e in rep.errors)

    def test_value_and_expand(self):
        G = grammar(EX6_G2)
        assert value(G, "Start") is T(EX6_D)
        assert value(G, "p2") is T("D(ax-1,$1)")
        assert expand(G, T("p2(p1)")) is T("D(ax-1,D(ax-1,ax-1))")

    def test_clause_repr(self):
        F = Clause(Var("y"), (Fn("i", (Var("x"), Var("y"))), Var("x")))
        assert repr(F) == "?y <- i(?x,?y), ?x"
