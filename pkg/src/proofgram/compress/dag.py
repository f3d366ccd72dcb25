"""Minimal DAG compression of ground proof terms."""

from __future__ import annotations

from typing import Mapping, Sequence, Union

from ..terms import Node, Production, ProofGrammar, ProofTerm, postorder

__all__ = ["min_dag"]


def min_dag(terms: Union[Mapping[str, ProofTerm], Sequence[ProofTerm]],
            prefix: str = "dag", taken=()) -> ProofGrammar:
    """Arity-0 grammar with maximal sharing.

    Every non-leaf subterm referenced at least twice (counting each input
    term once as a reference) gets a production ``<prefix>N``; these come
    first, children before parents, followed by one start production per
    input term.  Unnamed inputs become ``start1``, ``start2``, ...
    """
    if not isinstance(terms, Mapping):
        terms = {f"start{i}": t for i, t in enumerate(terms, 1)}
    for name, t in terms.items():
        if not t.ground:
            raise ValueError(f"min_dag needs ground terms; {name} has parameters")
    refs: dict = {}
    order: list = []
    seen: set = set()
    for t in terms.values():
        refs[t] = refs.get(t, 0) + 1
        for s in postorder(t):
            if s in seen:
                continue
            seen.add(s)
            order.append(s)
            for c in s.children:
                refs[c] = refs.get(c, 0) + 1
    taken = set(taken) | set(terms)
    names: dict = {}
    k = 0
    for s in order:
        if s.children and refs[s] >= 2:
            k += 1
            while f"{prefix}{k}" in taken:
                k += 1
            names[s] = f"{prefix}{k}"
    prods = []
    rebuilt: dict = {}

    def body(s):
        # s rebuilt with shared proper subterms replaced by their nonterminals
        kids = [Node(names[c]) if c in names else rebuilt[c] for c in s.children]
        return Node(s.name, kids)

    for s in order:
        rebuilt[s] = body(s)
        if s in names:
            prods.append(Production(names[s], 0, rebuilt[s]))
    for name, t in terms.items():
        prods.append(Production(name, 0, Node(names[t]) if t in names else rebuilt[t]))
    return ProofGrammar(prods)
