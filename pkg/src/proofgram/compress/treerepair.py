"""TreeRePair over proof grammars, and grammar re-compression."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence, Union

from ..terms import Node, Param, Production, ProofGrammar, ProofTerm, postorder
from .dag import min_dag
from .metrics import ref_counts
from .prune import prune
from .treestore import TreeStore

__all__ = ["TreeRePairConfig", "replace_digrams", "treerepair", "recompress_grammar",
           "roots_of", "order_fresh"]


@dataclass
class TreeRePairConfig:
    min_occurrences: int = 2
    arity_cap: int = 0          # 0: unbounded
    prune: bool = True
    prefix: str = "t"


def roots_of(G: ProofGrammar) -> list[str]:
    """Nonterminals not referenced by any RHS."""
    refs = ref_counts(G)
    return [n for n in G.nonterminals if refs[n] == 0]


def _fresh_names(prefix: str, taken: set):
    k = 0
    while True:
        k += 1
        name = f"{prefix}{k}"
        if name not in taken:
            taken.add(name)
            yield name


def replace_digrams(G: ProofGrammar, min_occurrences: int = 2, arity_cap: int = 0,
                    prefix: str = "t", taken: Iterable[str] = ()) -> ProofGrammar:
    """Replacement phase of TreeRePair on all RHSs of G taken together.

    The RHSs are the subtrees of a virtual root that never forms a digram.
    Parameters never occur as digram children.  Fresh productions are named
    ``<prefix>N`` and placed immediately before their first use.
    """
    # symbols: names sorted, then parameters by index
    arity: dict = {}
    params: set = set()
    for p in G.productions:
        for s in postorder(p.rhs):
            if s.__class__ is Param:
                params.add(s.index)
            else:
                a = arity.setdefault(s.name, len(s.children))
                if a != len(s.children):
                    raise ValueError(f"symbol {s.name} used with arities {a} and {len(s.children)}")
    store = TreeStore()
    sym_of: dict = {}
    names: list = []
    for name in sorted(arity):
        sym_of[name] = store.add_symbol(arity[name])
        names.append(name)
    for i in sorted(params):
        sym_of[Param(i)] = store.add_symbol(0, child_ok=False, parent_ok=False)
        names.append(Param(i))

    # unshare each RHS into a tree of store nodes
    roots = []
    for p in G.productions:
        stack = [(p.rhs, False)]
        built: list = []
        while stack:
            t, done = stack.pop()
            if t.__class__ is Param:
                built.append(store.add(sym_of[t], ()))
            elif done:
                n = len(t.children)
                kids = built[len(built) - n:] if n else []
                del built[len(built) - n:]
                built.append(store.add(sym_of[t.name], kids))
            else:
                stack.append((t, True))
                stack.extend((c, False) for c in reversed(t.children))
        roots.append(built[0])

    rules = store.run(min_occurrences, arity_cap)
    if not rules:
        return G
    gen = _fresh_names(prefix, set(G.nonterminals) | set(taken) | set(arity))
    fresh: dict = {}
    for h, f, i, g in rules:
        assert h == len(names)
        names.append(next(gen))
        n_f = store.symbol_arity(f)
        m = store.symbol_arity(g)
        ps = [Param(j) for j in range(1, n_f + m)]
        inner = Node(names[g], ps[i:i + m])
        rhs = Node(names[f], ps[:i] + [inner] + ps[i + m:])
        fresh[names[h]] = Production(names[h], n_f - 1 + m, rhs)

    def export(root):
        # iterative rebuild of a store tree as a hash-consed term
        out: list = []
        stack = [(root, False)]
        while stack:
            n, done = stack.pop()
            if done:
                kids = store.node_kids(n)
                k = len(kids)
                cs = out[len(out) - k:] if k else []
                del out[len(out) - k:]
                sym = names[store.node_sym(n)]
                out.append(sym if isinstance(sym, Param) else Node(sym, cs))
            else:
                stack.append((n, True))
                stack.extend((c, False) for c in reversed(store.node_kids(n)))
        return out[0]

    rewritten = [Production(p.nonterminal, p.arity, export(r))
                 for p, r in zip(G.productions, roots)]
    return ProofGrammar(order_fresh(rewritten, fresh))


def order_fresh(prods: Sequence[Production], fresh: Mapping[str, Production]) -> list:
    """Interleave fresh productions so each comes right before its first use."""
    out: list = []
    placed: set = set()

    for p in prods:
        _place_all(p.rhs, fresh, placed, out)
        out.append(p)
    return out


def _place_all(rhs, fresh, placed, out):
    # postorder over rhs and, transitively, the RHSs of unplaced fresh symbols
    seen: set = set()
    stack = [(rhs, False)]
    while stack:
        t, done = stack.pop()
        if done:
            if t.__class__ is Node and t.name in fresh and t.name not in placed:
                placed.add(t.name)
                out.append(fresh[t.name])
            continue
        if t in seen:
            continue
        seen.add(t)
        stack.append((t, True))
        if t.__class__ is Node and t.name in fresh and t.name not in placed:
            stack.append((fresh[t.name].rhs, False))
        for c in reversed(t.children):
            stack.append((c, False))


def treerepair(input: Union[ProofGrammar, Mapping[str, ProofTerm], Sequence[ProofTerm]],
               cfg: Optional[TreeRePairConfig] = None,
               protected: Optional[Iterable[str]] = None) -> ProofGrammar:
    """Compress ground terms (via their minimal DAG) or a grammar.

    ``protected`` defaults to the start productions (the input term names,
    or the unreferenced nonterminals of an input grammar).
    """
    cfg = cfg or TreeRePairConfig()
    if isinstance(input, ProofGrammar):
        G = input
        if protected is None:
            protected = roots_of(G)
    else:
        G = min_dag(input)
        if protected is None:
            protected = G.nonterminals[-len(input):] if len(input) else []
    G2 = replace_digrams(G, cfg.min_occurrences, cfg.arity_cap, cfg.prefix)
    if cfg.prune:
        G2 = prune(G2, protected)
    return G2


def recompress_grammar(G: ProofGrammar, cfg: Optional[TreeRePairConfig] = None,
                       base=None, theorems: Optional[Mapping] = None,
                       nonlinear: bool = True, guard: str = "none") -> ProofGrammar:
    """Compress all RHSs of G jointly, introducing ``lemmaN`` productions.

    Every original nonterminal is protected, so its value is preserved.
    """
    from .nonlinear import nonlinear_compress
    cfg = cfg or TreeRePairConfig(prefix="lemma")
    protected = set(G.nonterminals)
    G2 = replace_digrams(G, cfg.min_occurrences, cfg.arity_cap, cfg.prefix)
    G2 = prune(G2, protected)
    if nonlinear:
        G2 = nonlinear_compress(G2, protected, guard=guard, base=base, theorems=theorems,
                                prefix=cfg.prefix)
    return G2
