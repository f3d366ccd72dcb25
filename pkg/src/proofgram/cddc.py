"""Most general theorems of proof terms (condensed detachment for definite clauses).

The MGT of a proof term is obtained by solving, in one binding store, the
equations that rule APP generates at every node: each presupposition is
renamed apart and its body atoms are unified with the heads proven by the
children.  Every occurrence of a parameter V_i proves the same body variable
u_i, which is what rule PAR together with the unification of the U-bodies
amounts to.  Ground subterms that occur more than once are solved once,
cached, and renamed apart at each further occurrence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from .terms import KB, Clause, Node, Param, ProofGrammar, ProofTerm, postorder, expand
from .unify import Cycle, Store, apply, canonical, fresh_var, match_clause, term_vars

__all__ = [
    "MgtResult", "UnknownPresupposition", "mgt", "grammar_mgt", "shallow_mgt",
    "kb_verify", "KbVerifyReport",
]


class UnknownPresupposition(LookupError):
    """A proof term names a symbol the presupposition base does not define."""


class _Undefined(Exception):
    pass


@dataclass(frozen=True)
class MgtResult:
    clause: Optional[Clause]
    k: int

    @property
    def defined(self) -> bool:
        return self.clause is not None


def _shared_ground(d: ProofTerm) -> set:
    refs: dict = {}
    for s in postorder(d):
        for c in s.children:
            refs[c] = refs.get(c, 0) + 1
    return {s for s, n in refs.items() if n > 1 and s.ground and s.children}


class _Solver:
    def __init__(self, base: Mapping[str, Clause], k: int):
        self.base = base
        self.store = Store()
        self.u = [fresh_var() for _ in range(k)]
        self.cache: dict = {}
        self._presups: dict = {}

    def _presup(self, name: str, n: int):
        entry = self._presups.get(name)
        if entry is None:
            try:
                F = self.base[name]
            except KeyError:
                raise UnknownPresupposition(name) from None
            vs = []
            for a in F.atoms:
                for v in term_vars(a):
                    if v not in vs:
                        vs.append(v)
            entry = self._presups[name] = (F, vs)
        F, vs = entry
        if len(F.body) != n:
            raise ValueError(
                f"{name} applied to {n} argument(s) but its clause has "
                f"{len(F.body)} body atom(s)")
        ren = {v: fresh_var() for v in vs}
        return apply(ren, F.head), [apply(ren, b) for b in F.body]

    def _instantiate(self, cached):
        head, vs = cached
        return apply({v: fresh_var() for v in vs}, head)

    def head(self, d: ProofTerm, shared: set):
        store = self.store
        results: list = []
        stack = [(d, False)]
        while stack:
            node, expanded = stack.pop()
            if node.__class__ is Param:
                results.append(self.u[node.index - 1])
                continue
            if not expanded:
                c = self.cache.get(node)
                if c is not None:
                    results.append(self._instantiate(c))
                    continue
                stack.append((node, True))
                stack.extend((ch, False) for ch in reversed(node.children))
                continue
            n = len(node.children)
            A, Bs = self._presup(node.name, n)
            if n:
                heads = results[-n:]
                del results[-n:]
                for B, h in zip(Bs, heads):
                    if not store.unify(B, h):
                        raise _Undefined
            if node in shared:
                try:
                    A = store.resolve(A)
                except Cycle:
                    raise _Undefined from None
                entry = (A, term_vars(A))
                self.cache[node] = entry
                A = self._instantiate(entry)
            results.append(A)
        return results[0]


def mgt(d: ProofTerm, base: Mapping[str, Clause], k: int | None = None) -> MgtResult:
    """Most general theorem of ``d`` over presupposition base ``base``.

    ``k`` is the number of body atoms (parameters V1..Vk); it defaults to the
    largest parameter index in ``d``.  Returned clauses are canonically
    renamed (x1, x2, ... by first occurrence, head first).
    """
    if k is None:
        k = d.max_param
    elif k < d.max_param:
        raise ValueError(f"parameter budget {k} below max parameter index {d.max_param}")
    solver = _Solver(base, k)
    try:
        head = solver.head(d, _shared_ground(d))
        store = solver.store
        store.check()
        F = Clause(store.resolve(head), tuple(store.resolve(u) for u in solver.u))
    except (_Undefined, Cycle):
        return MgtResult(None, k)
    return MgtResult(canonical(F), k)


def _uses(rhs: ProofTerm) -> set:
    return {s.name for s in postorder(rhs) if s.__class__ is Node}


def grammar_mgt(G: ProofGrammar, B: Mapping[str, Clause],
                refined: bool = False) -> dict[str, Optional[Clause]]:
    """Grammar-MGT of every nonterminal, enriching the base production by production.

    With ``refined=False`` one undefined MGT makes all entries undefined.  With
    ``refined=True`` only nonterminals that depend on an undefined one are.
    """
    base = dict(B)
    out: dict[str, Optional[Clause]] = {}
    for p in G.productions:
        if refined and any(out.get(q, 0) is None for q in _uses(p.rhs)):
            out[p.nonterminal] = None
            continue
        r = mgt(p.rhs, base, p.arity)
        out[p.nonterminal] = r.clause
        if r.clause is None:
            if not refined:
                return {q.nonterminal: None for q in G.productions}
        else:
            base[p.nonterminal] = r.clause
    return out


def shallow_mgt(K: KB) -> dict[str, Optional[Clause]]:
    """MGT of each RHS against the base enriched with the *stated* theorems."""
    base = dict(K.base)
    for p, F in zip(K.grammar.productions, K.theorems):
        base[p.nonterminal] = F
    return {p.nonterminal: mgt(p.rhs, base, p.arity).clause
            for p in K.grammar.productions}


@dataclass
class KbVerifyReport:
    status: dict = field(default_factory=dict)
    chain_violations: list = field(default_factory=list)
    chain_skipped: list = field(default_factory=list)

    def count(self, status: str) -> int:
        return sum(1 for s in self.status.values() if s == status)

    @property
    def violations(self) -> list:
        return [p for p, s in self.status.items() if s in ("violation", "undefined")]

    @property
    def ok(self) -> bool:
        return not self.violations and not self.chain_violations

    @property
    def strict_fraction(self) -> float:
        n = len(self.status)
        return self.count("strict-instance") / n if n else 0.0


def kb_verify(K: KB, chain: bool = False, mode: str = "ordered",
              edge_budget: int = 10 ** 5) -> KbVerifyReport:
    """Check every stated theorem against the shallow-MGT of its production.

    Status per nonterminal: 'ok' (variant), 'strict-instance', 'violation'
    (not an instance) or 'undefined' (no shallow-MGT).  With ``chain`` also
    check shallow-MGT >= grammar-MGT >= mgt(val) where the expansion of the
    production has at most ``edge_budget`` edges.
    """
    rep = KbVerifyReport()
    shallow = shallow_mgt(K)
    for p, F in zip(K.grammar.productions, K.theorems):
        S = shallow[p.nonterminal]
        if S is None:
            rep.status[p.nonterminal] = "undefined"
            continue
        m = match_clause(F, S, mode)
        if m.instance is None:
            rep.status[p.nonterminal] = "violation"
        else:
            rep.status[p.nonterminal] = "strict-instance" if m.strict else "ok"
    if not chain:
        return rep
    from .compress.metrics import expanded_sizes
    gm = grammar_mgt(K.grammar, K.base, refined=True)
    sizes = expanded_sizes(K.grammar)
    memo: dict = {}
    for p in K.grammar.productions:
        S, Gm = shallow[p.nonterminal], gm[p.nonterminal]
        if S is not None and Gm is not None and match_clause(S, Gm, mode).instance is None:
            rep.chain_violations.append((p.nonterminal, "shallow-mgt >= grammar-mgt"))
        if Gm is None:
            continue
        if sizes[p.nonterminal] > edge_budget:
            rep.chain_skipped.append(p.nonterminal)
            continue
        v = expand(K.grammar, p.lhs, memo)
        M = mgt(v, K.base, p.arity).clause
        if M is None:
            rep.chain_violations.append((p.nonterminal, "mgt(val) undefined"))
        elif match_clause(Gm, M, mode).instance is None:
            rep.chain_violations.append((p.nonterminal, "grammar-mgt >= mgt(val)"))
    return rep
