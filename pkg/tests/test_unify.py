import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import C, T
from proofgram.terms import Clause, Fn, Var
from proofgram.unify import apply, canonical, match_clause, mgu, rename_apart, term_vars

X, Y, Z = Var("x"), Var("y"), Var("z")
a, b = Fn("a"), Fn("b")


def f(*args):
    return Fn("f", args)


def g(t):
    return Fn("g", (t,))


class TestMgu:
    def test_binding(self):
        assert mgu([[X, f(a, a)]]) == {X: f(a, a)}

    def test_occurs_check(self):
        assert mgu([[X, f(X, a)]]) is None

    def test_clash(self):
        assert mgu([[f(X, a), f(b, b)]]) is None

    def test_sets_of_three(self):
        s = mgu([[X, Y, f(a, Z)], [Z, b]])
        assert apply(s, X) is apply(s, Y) is f(a, b)

    def test_empty_and_trivial(self):
        assert mgu([]) == {}
        assert mgu([[X]]) == {}
        assert mgu([[f(X, a), f(X, a)]]) == {}

    def test_indirect_cycle(self):
        assert mgu([[X, f(Y, a)], [Y, f(X, b)]]) is None

    def test_app_clash_of_undefined_example(self, base3):
        # D(D(ax-2,ax-2),ax-2): the inner D needs ax-2's head as the
        # antecedent of an ax-2 instance, which forces a cycle
        from proofgram.cddc import mgt
        assert mgt(T("D(D(ax-2,ax-2),ax-2)"), base3).clause is None
        assert mgt(T("D(ax-2,ax-2)"), base3).clause is not None

    def test_idempotent(self):
        s = mgu([[f(X, Y), f(Y, g(Z))]])
        for v in (X, Y, Z):
            assert apply(s, apply(s, v)) is apply(s, v)
        rng = set(itertools.chain.from_iterable(term_vars(t) for t in s.values()))
        assert not rng & set(s)


class TestApply:
    def test_basic(self):
        assert apply({X: a}, f(X, Y)) is f(a, Y)
        assert apply({}, f(X, Y)) is f(X, Y)

    def test_clause(self):
        F = Clause(X, (f(X, Y),))
        assert apply({X: a}, F) == Clause(a, (f(a, Y),))

    def test_example5_substitution_leaves_head(self):
        A = C("i(i(?y1,i(?y2,?y1)),i(?y3,i(?y4,?y3)))").head
        sigma = {Var("x1"): C("i(?y3,i(?y4,?y3))").head,
                 Var("x2"): C("i(?y1,i(?y2,?y1))").head}
        assert apply(sigma, A) is A


class TestMatchClause:
    def test_strict_instance(self):
        F = C("i(i(?x,?y),i(?z,i(?x,?y)))")
        F2 = C("i(?x,i(?y,?x))")
        m = match_clause(F, F2)
        assert m.instance is not None and m.strict and not m.variant

    def test_variant(self):
        F = C("i(?x1,i(?x2,?x1))")
        m = match_clause(F, C("i(?a,i(?b,?a))"))
        assert m.variant and not m.strict

    def test_permutation(self):
        F = C("h(?x,?y) <- p(?x), q(?y)")
        F2 = C("h(?u,?v) <- q(?v), p(?u)")
        assert match_clause(F, F2, "ordered").instance is None
        m = match_clause(F, F2, "mod-permutation")
        assert m.variant
        assert m.permutation == (1, 0)

    def test_body_length_mismatch(self):
        assert match_clause(C("?x <- ?y"), C("?x")).instance is None

    def test_not_instance(self):
        assert match_clause(C("i(?x,?y)"), C("i(?x,?x)")).instance is None

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            match_clause(C("?x"), C("?x"), "bogus")

    def test_canonical_and_rename_apart(self):
        F = C("i(?q,?p) <- ?p")
        assert repr(canonical(F)) == "i(?x1,?x2) <- ?x2"
        R = rename_apart(F)
        assert not set(term_vars(R.head)) & {Var("p"), Var("q")}
        assert match_clause(R, F).variant


# ---------------------------------------------------------------------------
# brute-force most-generality on small Herbrand instances

VARS = [X, Y, Z]
HERBRAND = [a, b] + [f(s, t) for s in (a, b) for t in (a, b)]


def terms(depth):
    leaves = st.sampled_from(VARS + [a, b])
    if depth == 0:
        return leaves
    sub = terms(depth - 1)
    return st.one_of(leaves, st.builds(f, sub, sub), st.builds(g, sub))


def ground_unifiers(s, t):
    for vals in itertools.product(HERBRAND, repeat=len(VARS)):
        theta = dict(zip(VARS, vals))
        if apply(theta, s) is apply(theta, t):
            yield theta


def check_most_general(s, t):
    sigma = mgu([[s, t]])
    found = list(ground_unifiers(s, t))
    if sigma is None:
        assert not found
        return
    assert apply(sigma, s) is apply(sigma, t)
    # every enumerated unifier factors through sigma: theta = sigma;theta
    for theta in found:
        for v in VARS:
            assert apply(theta, apply(sigma, v)) is apply(theta, v)


class TestMguMostGeneral:
    @settings(max_examples=300, deadline=None)
    @given(terms(3), terms(3))
    def test_against_enumeration(self, s, t):
        check_most_general(s, t)

    @settings(max_examples=200, deadline=None)
    @given(terms(2), terms(2), terms(2), terms(2))
    def test_variant_iff_mutual_instance(self, h1, b1, h2, b2):
        F, F2 = Clause(h1, (b1,)), Clause(h2, (b2,))
        fwd = match_clause(F, F2).instance is not None
        back = match_clause(F2, F).instance is not None
        assert match_clause(F, F2).variant == (fwd and back)
