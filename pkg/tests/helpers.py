"""Independent oracles and generators shared by the test modules.

The oracles here are deliberately naive (plain recursion, tuples instead of
hash-consed nodes) so they do not share code paths with the package.
"""

import random

from proofgram.pgt import parse_clause, parse_proof_term
from proofgram.terms import Node, Param, Production, ProofGrammar

T = parse_proof_term
C = parse_clause

EX3_BASE_TEXT = {
    "D": "?y <- i(?x,?y), ?x",
    "ax-1": "i(?x1,i(?x2,?x1))",
    "ax-2": "i(i(?x1,i(?x2,?x3)),i(i(?x1,?x2),i(?x1,?x3)))",
}

# Example 6 term and grammars
EX6_D = "D(ax-1,D(ax-1,D(D(ax-1,ax-1),D(ax-1,ax-1))))"
EX6_G1 = [("p1", 0, "D(ax-1,ax-1)"), ("Start", 0, "D(ax-1,D(ax-1,D(p1,p1)))")]
EX6_G2 = [("p2", 1, "D(ax-1,$1)"), ("p1", 0, "p2(ax-1)"), ("Start", 0, "p2(p2(D(p1,p1)))")]


def ex3_base():
    return {k: C(v) for k, v in EX3_BASE_TEXT.items()}


def grammar(rows):
    return ProofGrammar(Production(n, a, T(r)) for n, a, r in rows)


# ---------------------------------------------------------------------------
# naive tuple terms: ('name', (kids...)) or ('$', index)

def to_tuple(t):
    if t.__class__ is Param:
        return ("$", t.index)
    return (t.name, tuple(to_tuple(c) for c in t.children))


def tuple_size(t):
    if t[0] == "$":
        return 0
    return len(t[1]) + sum(tuple_size(c) for c in t[1])


def tuple_subst(t, args):
    if t[0] == "$":
        return args[t[1] - 1]
    return (t[0], tuple(tuple_subst(c, args) for c in t[1]))


def naive_expand(G: ProofGrammar, name: str):
    """Literal expansion of ``name`` applied to its own parameters."""
    rules = {p.nonterminal: to_tuple(p.rhs) for p in G.productions}
    done = {}

    def go(t):
        if t[0] == "$":
            return t
        kids = tuple(go(c) for c in t[1])
        if t[0] in rules:
            return tuple_subst(val(t[0]), kids)
        return (t[0], kids)

    def val(n):
        if n not in done:
            done[n] = go(rules[n])
        return done[n]

    return val(name)


def naive_unfold_size(G: ProofGrammar, name: str) -> int:
    """|G'| after deleting ``name`` and unfolding it in every RHS."""
    rules = {p.nonterminal: to_tuple(p.rhs) for p in G.productions}
    d = rules[name]

    def unf(t):
        if t[0] == "$":
            return t
        kids = tuple(unf(c) for c in t[1])
        if t[0] == name:
            return tuple_subst(d, kids)
        return (t[0], kids)

    return sum(tuple_size(unf(r)) for n, r in rules.items() if n != name)


# ---------------------------------------------------------------------------
# generators

TERMINALS = {"D": 2, "G": 1, "ax-1": 0, "ax-2": 0, "ax-3": 0}


def random_term(rng: random.Random, symbols: dict, depth: int, arity: int, leaf_p=0.3):
    """Random proof term over ``symbols`` (name -> arity) with params $1..$arity."""
    leaves = [n for n, a in symbols.items() if a == 0]
    if depth == 0 or rng.random() < leaf_p:
        if arity and rng.random() < 0.5:
            return Param(rng.randint(1, arity))
        return Node(rng.choice(leaves))
    inner = [n for n, a in symbols.items() if a > 0]
    f = rng.choice(inner)
    return Node(f, [random_term(rng, symbols, depth - 1, arity, leaf_p)
                    for _ in range(symbols[f])])


def random_grammar(rng: random.Random, n_prods: int, max_arity: int = 3, depth: int = 4,
                   terminals=None) -> ProofGrammar:
    """Acyclic grammar whose RHSs mix terminals, earlier nonterminals and params.

    Every declared parameter occurs at least once, so all productions are
    well formed in the strict sense.
    """
    symbols = dict(terminals or TERMINALS)
    prods = []
    for i in range(n_prods):
        arity = rng.randint(0, max_arity)
        for _ in range(50):
            rhs = random_term(rng, symbols, depth, arity)
            used = {s.index for s in _params(rhs)}
            if used == set(range(1, arity + 1)) and rhs.__class__ is Node:
                break
        else:
            arity = 0
            rhs = random_term(rng, {k: v for k, v in symbols.items()}, depth, 0)
        name = f"q{i}"
        prods.append(Production(name, arity, rhs))
        symbols[name] = arity
    return ProofGrammar(prods)


def _params(t):
    if t.__class__ is Param:
        yield t
    else:
        for c in t.children:
            yield from _params(c)
