"""Same-value reduction and MGT-based reduction of proof grammars."""

from __future__ import annotations

from typing import Iterable, Mapping, Optional

from ..terms import Clause, Node, Param, Production, ProofGrammar, postorder, value
from ..unify import _compatible, match_clause
from .metrics import GrammarMetrics, users
from .prune import prune

__all__ = ["DigestCollision", "same_value_reduce", "mgt_reduce", "rename_references",
           "reachable"]


class DigestCollision(RuntimeError):
    """Two different values produced the same digest (or a merge was wrong)."""


def rename_references(G: ProofGrammar, rewrite: Mapping[str, tuple]) -> ProofGrammar:
    """Rewrite q(t1..tn) to p(s1..sn) for ``rewrite[q] = (p, perm)``, s[perm[j]] = t[j].

    ``perm`` may be None for the identity.
    """
    prods = []
    for q in G.productions:
        memo: dict = {}
        for s in postorder(q.rhs):
            if s.__class__ is Param:
                memo[s] = s
                continue
            kids = [memo[c] for c in s.children]
            r = rewrite.get(s.name)
            if r is None:
                memo[s] = Node(s.name, kids)
            else:
                p, perm = r
                if perm is not None:
                    new = [None] * len(kids)
                    for j, k in enumerate(perm):
                        new[k] = kids[j]
                    kids = new
                memo[s] = Node(p, kids)
        prods.append(Production(q.nonterminal, q.arity, memo[q.rhs]))
    return ProofGrammar(prods)


def reachable(G: ProofGrammar, roots: Iterable[str]) -> set:
    out: set = set()
    todo = [r for r in roots if r in G]
    while todo:
        n = todo.pop()
        if n in out:
            continue
        out.add(n)
        for s in postorder(G[n].rhs):
            if s.__class__ is Node and s.name in G and s.name not in out:
                todo.append(s.name)
    return out


def same_value_reduce(G: ProofGrammar, protected: Iterable[str] = (),
                      edge_budget: int = 10 ** 5) -> ProofGrammar:
    """Merge nonterminals with equal arity and equal value, keeping the earliest.

    Protected nonterminals are never removed.  Merges whose expansions have
    at most ``edge_budget`` edges are checked by literal expansion.
    """
    protected = set(protected)
    gm = GrammarMetrics(G)
    first: dict = {}
    alias: dict = {}
    for p in G.productions:
        key = (p.arity, gm.digest(p.nonterminal))
        keep = first.setdefault(key, p.nonterminal)
        if keep != p.nonterminal and p.nonterminal not in protected:
            alias[p.nonterminal] = keep
    if not alias:
        return G
    memo: dict = {}
    for n, keep in alias.items():
        if gm.size(n) <= edge_budget and gm.size(keep) <= edge_budget:
            if value(G, n, memo) is not value(G, keep, memo):
                raise DigestCollision(f"{n} and {keep} share a digest but differ")
    G2 = rename_references(G, {n: (k, None) for n, k in alias.items()})
    G2 = ProofGrammar(p for p in G2.productions if p.nonterminal not in alias)
    if protected:
        live = reachable(G2, protected)
        G2 = ProofGrammar(p for p in G2.productions if p.nonterminal in live)
    return G2


def mgt_reduce(G: ProofGrammar, B: Mapping[str, Clause], protected: Iterable[str] = (),
               mode: str = "mod-permutation", max_rounds: Optional[int] = None) -> ProofGrammar:
    """Redirect references of q to an earlier p whose grammar-MGT subsumes q's.

    Requires equal arity, p before every user of q, q unprotected.  Variants
    are preferred over strict subsumers, then the earliest p; of two
    variants the earlier one is kept.  The argument
    order follows the matching body permutation.  Rounds repeat, with
    pruning in between, until nothing changes.
    """
    from ..cddc import grammar_mgt
    protected = set(protected)
    rounds = 0
    while max_rounds is None or rounds < max_rounds:
        rounds += 1
        gm = grammar_mgt(G, B, refined=True)
        pos = {n: i for i, n in enumerate(G.nonterminals)}
        us = users(G)
        by_arity: dict = {}
        for p in G.productions:
            if gm[p.nonterminal] is not None:
                by_arity.setdefault(p.arity, []).append(p.nonterminal)
        rewrite: dict = {}
        targets: set = set()
        for q in G.nonterminals:
            Fq = gm[q]
            if q in protected or Fq is None or not us[q] or q in targets:
                continue
            first_use = min(pos[u] for u in us[q])
            best = None
            for p in by_arity.get(G[q].arity, ()):
                if pos[p] >= first_use:
                    break
                if p == q or p in rewrite:
                    continue
                Fp = gm[p]
                if not _compatible(Fp.head, Fq.head):
                    continue
                m = match_clause(Fq, Fp, mode)
                if m.instance is None:
                    continue
                if m.variant:
                    if pos[p] > pos[q]:
                        # the later variant is redirected here on its own turn
                        continue
                    best = (p, m.permutation)
                    break
                if best is None:
                    best = (p, m.permutation)
            if best is not None:
                rewrite[q] = best
                targets.add(best[0])
        if not rewrite:
            return G
        G = prune(rename_references(G, rewrite), protected)
    return G
