"""Save-value pruning: unfold productions that do not pay for themselves."""

from __future__ import annotations

import heapq
from typing import Iterable

from ..terms import Node, Production, ProofGrammar, postorder
from .metrics import _name_counts, _profile, gain_in, unfold

__all__ = ["prune", "MutableGrammar"]


class MutableGrammar:
    """Ordered productions with a reverse-reference index, for in-place rewriting."""

    def __init__(self, G: ProofGrammar):
        self.order: list[str] = [p.nonterminal for p in G.productions]
        self.prods: dict[str, Production] = {p.nonterminal: p for p in G.productions}
        self.users: dict[str, set] = {n: set() for n in self.order}
        for p in G.productions:
            for q in self._mentions(p.rhs):
                self.users[q].add(p.nonterminal)

    def _mentions(self, t) -> set:
        return {s.name for s in postorder(t) if s.__class__ is Node and s.name in self.prods}

    def set_rhs(self, name: str, rhs):
        old = self.prods[name]
        for q in self._mentions(old.rhs):
            self.users[q].discard(name)
        self.prods[name] = Production(name, old.arity, rhs)
        for q in self._mentions(rhs):
            self.users[q].add(name)

    def insert_after(self, anchor: str, prod: Production):
        self.order.insert(self.order.index(anchor) + 1, prod.nonterminal)
        self.prods[prod.nonterminal] = prod
        self.users[prod.nonterminal] = set()
        for q in self._mentions(prod.rhs):
            self.users[q].add(prod.nonterminal)

    def remove(self, name: str):
        p = self.prods.pop(name)
        self.order.remove(name)
        for q in self._mentions(p.rhs):
            self.users[q].discard(name)
        del self.users[name]

    def unfold_everywhere(self, name: str) -> set:
        """Unfold ``name`` in all RHSs and drop its production; return the changed users."""
        d = self.prods[name].rhs
        us = set(self.users[name])
        for u in us:
            self.set_rhs(u, unfold(self.prods[u].rhs, name, d))
        self.remove(name)
        return us

    def save_value(self, name: str) -> int:
        prod = self.prods[name]
        prof = _profile(prod)
        return -prod.size + sum(gain_in(self.prods[u].rhs, name, prod, prof)
                                for u in self.users[name])

    def grammar(self) -> ProofGrammar:
        return ProofGrammar(self.prods[n] for n in self.order)


def prune(G: ProofGrammar, protected: Iterable[str] = (), threshold: int = 0) -> ProofGrammar:
    """Unfold, smallest save-value first, every unprotected production with
    save-value <= ``threshold``; save-values are recomputed after each step.

    Ties go to the production that comes first in the grammar.
    """
    protected = set(protected)
    M = MutableGrammar(G)
    pos = {n: i for i, n in enumerate(M.order)}
    sav: dict = {}
    heap: list = []

    def refresh(n):
        if n in protected or n not in M.prods:
            return
        s = M.save_value(n)
        sav[n] = s
        if s <= threshold:
            heapq.heappush(heap, (s, pos[n], n))

    for n in M.order:
        refresh(n)
    while heap:
        s, _, n = heapq.heappop(heap)
        if n not in M.prods or sav.get(n) != s:
            continue
        d = M.prods[n].rhs
        changed = M.unfold_everywhere(n)
        sav.pop(n, None)
        affected = set(changed)
        for u in changed:
            affected |= M._mentions(M.prods[u].rhs)
        affected |= M._mentions(d)
        for a in sorted(affected, key=pos.__getitem__):
            refresh(a)
    return M.grammar()
