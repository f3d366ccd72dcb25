"""Value metrics of grammar nonterminals, computed without expansion.

For a production p(V1..Vn) -> d the expanded size |val(p)| and the number
of occurrences vmult(p, i) of V_i in val(p) obey

    size(q(t1..tm))     = size(q) + sum_j vmult(q, j) * size(t_j)
    vmult(q(t1..tm), i) = sum_j vmult(q, j) * vmult(t_j, i)

at nonterminal nodes and the plain edge-count rules elsewhere.  All values
are exact Python integers.  Value digests are Merkle hashes of val(p) with
parameters as leaves, memoized per (nonterminal, argument digests).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Optional

from ..terms import (
    Node, Param, ProofGrammar, ProofTerm, param_occurrences, postorder, substitute_params,
)

__all__ = [
    "ValMetrics", "GrammarMetrics", "val_metrics", "expanded_sizes", "value_digests",
    "occurrence_counts", "ref_counts", "users", "save_value", "save_values",
    "save_value_linear", "unfold",
]


@dataclass(frozen=True)
class ValMetrics:
    size: int
    vmult: tuple
    digest: bytes


def _leaf_digest(i: int) -> bytes:
    return hashlib.sha256(b"\x01$%d" % i).digest()


def _node_digest(name: str, kids) -> bytes:
    h = hashlib.sha256(b"\x00")
    h.update(name.encode())
    h.update(b"\x00")
    for k in kids:
        h.update(k)
    return h.digest()


class GrammarMetrics:
    """Lazily computed size, vmult and digest for every nonterminal of G."""

    def __init__(self, G: ProofGrammar):
        self.G = G
        self._size: dict = {}
        self._vmult: dict = {}
        self._dmemo: dict = {}

    # --- size and vmult ---------------------------------------------------
    def _compute_sizes(self):
        size, vmult, G = self._size, self._vmult, self.G
        for p in G.productions:
            if p.nonterminal in size:
                continue
            es: dict = {}
            ev: dict = {}
            for s in postorder(p.rhs):
                if s.__class__ is Param:
                    es[s] = 0
                    ev[s] = {s.index: 1}
                    continue
                kids = s.children
                q = G.get(s.name)
                if q is None:
                    es[s] = len(kids) + sum(es[c] for c in kids)
                    acc: dict = {}
                    for c in kids:
                        for i, n in ev[c].items():
                            acc[i] = acc.get(i, 0) + n
                else:
                    qv = vmult[s.name]
                    es[s] = size[s.name] + sum(m * es[c] for m, c in zip(qv, kids) if m)
                    acc = {}
                    for m, c in zip(qv, kids):
                        if m:
                            for i, n in ev[c].items():
                                acc[i] = acc.get(i, 0) + m * n
                ev[s] = acc
            size[p.nonterminal] = es[p.rhs]
            top = ev[p.rhs]
            vmult[p.nonterminal] = tuple(top.get(i, 0) for i in range(1, p.arity + 1))

    def size(self, name: str) -> int:
        if name not in self._size:
            self._compute_sizes()
        return self._size[name]

    def vmult(self, name: str) -> tuple:
        if name not in self._vmult:
            self._compute_sizes()
        return self._vmult[name]

    def term_size(self, t: ProofTerm) -> int:
        """Expanded size of an arbitrary term over G."""
        G = self.G
        es: dict = {}
        for s in postorder(t):
            if s.__class__ is Param:
                es[s] = 0
            elif s.name in G:
                es[s] = self.size(s.name) + sum(
                    m * es[c] for m, c in zip(self.vmult(s.name), s.children) if m)
            else:
                es[s] = len(s.children) + sum(es[c] for c in s.children)
        return es[t]

    # --- digests ----------------------------------------------------------
    def digest(self, name: str) -> bytes:
        p = self.G[name]
        env = tuple(_leaf_digest(i) for i in range(1, p.arity + 1))
        return self._eval(name, env)

    def term_digest(self, t: ProofTerm) -> bytes:
        """Digest of the value of ``t`` (parameters stay leaves)."""
        return self._run(self._inst(t, None))

    def _eval(self, name, env):
        key = (name, env)
        got = self._dmemo.get(key)
        if got is None:
            got = self._run(self._inst(self.G[name].rhs, env))
            self._dmemo[key] = got
        return got

    def _inst(self, term, env):
        G, memo = self.G, self._dmemo
        local: dict = {}
        for s in postorder(term):
            if s.__class__ is Param:
                local[s] = _leaf_digest(s.index) if env is None else env[s.index - 1]
                continue
            kd = tuple(local[c] for c in s.children)
            if s.name in G:
                key = (s.name, kd)
                h = memo.get(key)
                if h is None:
                    h = yield key
                local[s] = h
            else:
                local[s] = _node_digest(s.name, kd)
        return local[term]

    def _run(self, gen):
        # trampoline: nested nonterminal evaluations without Python recursion
        stack = [(None, gen)]
        send = None
        while True:
            key, g = stack[-1]
            try:
                req = g.send(send)
            except StopIteration as stop:
                stack.pop()
                if key is not None:
                    self._dmemo[key] = stop.value
                if not stack:
                    return stop.value
                send = stop.value
                continue
            send = None
            stack.append((req, self._inst(self.G[req[0]].rhs, req[1])))


def val_metrics(G: ProofGrammar, name: str, metrics: Optional[GrammarMetrics] = None) -> ValMetrics:
    m = metrics or GrammarMetrics(G)
    return ValMetrics(m.size(name), m.vmult(name), m.digest(name))


def expanded_sizes(G: ProofGrammar) -> dict:
    m = GrammarMetrics(G)
    return {p.nonterminal: m.size(p.nonterminal) for p in G.productions}


def value_digests(G: ProofGrammar, metrics: Optional[GrammarMetrics] = None) -> dict:
    m = metrics or GrammarMetrics(G)
    return {p.nonterminal: m.digest(p.nonterminal) for p in G.productions}


# ---------------------------------------------------------------------------
# references and save-values

def occurrence_counts(t: ProofTerm) -> dict:
    """Tree multiplicity of every distinct subterm of ``t``."""
    order = list(postorder(t))
    mult = {t: 1}
    for s in reversed(order):
        m = mult.get(s, 0)
        for c in s.children:
            mult[c] = mult.get(c, 0) + m
    return mult


def _name_counts(t: ProofTerm, names) -> dict:
    out: dict = {}
    for s, m in occurrence_counts(t).items():
        if s.__class__ is Node and s.name in names:
            out[s.name] = out.get(s.name, 0) + m
    return out


def ref_counts(G: ProofGrammar) -> dict:
    """ref_G(p): occurrences of p in all RHSs (as trees)."""
    refs = {p.nonterminal: 0 for p in G.productions}
    for p in G.productions:
        for q, n in _name_counts(p.rhs, refs).items():
            refs[q] += n
    return refs


def users(G: ProofGrammar) -> dict:
    """Nonterminal -> list of nonterminals whose RHS mentions it."""
    out = {p.nonterminal: [] for p in G.productions}
    for p in G.productions:
        seen = set()
        for s in postorder(p.rhs):
            if s.__class__ is Node and s.name in out and s.name not in seen:
                seen.add(s.name)
                out[s.name].append(p.nonterminal)
    return out


def save_value_linear(ref: int, size: int, arity: int) -> int:
    """Closed form for a production whose parameters each occur exactly once."""
    return ref * (size - arity) - size


def _profile(prod):
    occ = param_occurrences(prod.rhs)
    linear = all(occ.get(i, 0) == 1 for i in range(1, prod.arity + 1))
    return occ, linear


def _unfold_size(t: ProofTerm, q: str, dsize: int, occ: dict) -> int:
    # tree size of t after unfolding every occurrence of q with RHS size dsize
    us: dict = {}
    for s in postorder(t):
        if s.__class__ is Param:
            us[s] = 0
        elif s.name == q:
            us[s] = dsize + sum(occ.get(i, 0) * us[c] for i, c in enumerate(s.children, 1))
        else:
            us[s] = len(s.children) + sum(us[c] for c in s.children)
    return us[t]


def gain_in(t: ProofTerm, q: str, prod, profile=None, count: Optional[int] = None) -> int:
    """Size change of ``t`` when every occurrence of ``q`` in it is unfolded."""
    occ, linear = profile or _profile(prod)
    if linear:
        if count is None:
            count = _name_counts(t, {q}).get(q, 0)
        return count * (prod.size - prod.arity)
    return _unfold_size(t, q, prod.size, occ) - t.size


def save_value(G: ProofGrammar, name: str) -> int:
    """|G'| - |G| where G' unfolds the production of ``name`` everywhere."""
    prod = G[name]
    prof = _profile(prod)
    total = -prod.size
    for p in G.productions:
        if p.nonterminal != name:
            total += gain_in(p.rhs, name, prod, prof)
    return total


def save_values(G: ProofGrammar) -> dict:
    """Save-value of every nonterminal in one pass over the RHSs."""
    profiles = {p.nonterminal: _profile(p) for p in G.productions}
    sav = {p.nonterminal: -p.size for p in G.productions}
    for p in G.productions:
        counts = _name_counts(p.rhs, sav)
        for q, n in counts.items():
            sav[q] += gain_in(p.rhs, q, G[q], profiles[q], n)
    return sav


def unfold(t: ProofTerm, name: str, rhs: ProofTerm) -> ProofTerm:
    """Replace every occurrence of ``name`` in ``t`` by its RHS instance."""
    memo: dict = {}
    for s in postorder(t):
        if s.__class__ is Param:
            memo[s] = s
            continue
        kids = [memo[c] for c in s.children]
        if s.name == name:
            memo[s] = substitute_params(rhs, kids)
        else:
            memo[s] = Node(s.name, kids)
    return memo[t]
