"""Nonlinear compression: identify two parameters that receive equal arguments."""

from __future__ import annotations

from collections import Counter
from typing import Iterable, Mapping, Optional

from ..terms import Clause, Node, Param, Production, ProofGrammar, postorder, substitute_params
from .metrics import save_values
from .prune import prune

__all__ = ["nonlinear_compress", "GUARDS", "guard_ok"]

GUARDS = ("none", "mgt-defined", "mgt-subsumes")


def _equal_pairs(kids) -> list:
    out = []
    for a in range(len(kids)):
        for b in range(a + 1, len(kids)):
            if kids[a] is kids[b]:
                out.append((a + 1, b + 1))
    return out


def _candidates(G: ProofGrammar) -> dict:
    """(nonterminal, a, b) -> number of RHS nodes p(..t..t..) with V_a, V_b getting t."""
    found: Counter = Counter()
    for p in G.productions:
        for s in postorder(p.rhs):
            if s.__class__ is Node and len(s.children) >= 2 and s.name in G:
                for a, b in _equal_pairs(s.children):
                    found[(s.name, a, b)] += 1
    return found


def _identify(G: ProofGrammar, name: str, a: int, b: int, new: str) -> ProofGrammar:
    p = G[name]
    n = p.arity
    args = [Param(k) if k < b else (Param(a) if k == b else Param(k - 1))
            for k in range(1, n + 1)]
    pnew = Production(new, n - 1, substitute_params(p.rhs, args))
    prods = []
    for q in G.productions:
        memo: dict = {}
        for s in postorder(q.rhs):
            if s.__class__ is Param:
                memo[s] = s
                continue
            kids = [memo[c] for c in s.children]
            if s.name == name and kids[a - 1] is kids[b - 1]:
                memo[s] = Node(new, kids[:b - 1] + kids[b:])
            else:
                memo[s] = Node(s.name, kids)
        prods.append(Production(q.nonterminal, q.arity, memo[q.rhs]))
        if q.nonterminal == name:
            prods.append(pnew)
    return ProofGrammar(prods)


def guard_ok(G: ProofGrammar, guard: str, base=None, theorems: Optional[Mapping] = None,
             defined_before: Optional[set] = None) -> bool:
    """Check a nonlinear-compression guard on grammar G."""
    if guard == "none":
        return True
    from ..cddc import grammar_mgt
    from ..unify import match_clause
    gm = grammar_mgt(G, base, refined=True)
    if guard == "mgt-defined":
        want = defined_before if defined_before is not None else set(gm)
        return all(gm.get(n) is not None for n in want if n in gm)
    if guard == "mgt-subsumes":
        for n, F in (theorems or {}).items():
            if n not in gm:
                continue
            M = gm[n]
            if M is None or match_clause(F, M).instance is None:
                return False
        return True
    raise ValueError(f"unknown guard {guard!r}; expected one of {GUARDS}")


def nonlinear_compress(G: ProofGrammar, protected: Iterable[str] = (), guard: str = "none",
                       base=None, theorems: Optional[Mapping[str, Clause]] = None,
                       prefix: str = "n") -> ProofGrammar:
    """Repeatedly replace p(..t..t..) by p'(..t..) with p' having one parameter less.

    Candidates are taken lowest save-value first.  A step is kept only if,
    after pruning, the grammar is strictly smaller and the guard holds;
    otherwise it is rolled back and the candidate skipped.
    """
    if guard not in GUARDS:
        raise ValueError(f"unknown guard {guard!r}; expected one of {GUARDS}")
    if guard != "none" and base is None:
        raise ValueError(f"guard {guard!r} needs a presupposition base")
    protected = set(protected)
    defined_before = None
    if guard == "mgt-defined":
        from ..cddc import grammar_mgt
        defined_before = {n for n, c in grammar_mgt(G, base, refined=True).items()
                          if c is not None}
    skip: set = set()
    taken = set(G.nonterminals)
    k = 0
    while True:
        cands = {key: c for key, c in _candidates(G).items() if key not in skip}
        if not cands:
            return G
        sav = save_values(G)
        pos = {n: i for i, n in enumerate(G.nonterminals)}
        name, a, b = min(cands, key=lambda t: (sav[t[0]], pos[t[0]], -cands[t], t[1], t[2]))
        while True:
            k += 1
            new = f"{prefix}{k}"
            if new not in taken:
                break
        G2 = _identify(G, name, a, b, new)
        G2 = prune(G2, protected)
        if G2.size < G.size and guard_ok(G2, guard, base, theorems, defined_before):
            taken.add(new)
            if defined_before is not None:
                defined_before.add(new)
            G = G2
        else:
            skip.add((name, a, b))
