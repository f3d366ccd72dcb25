"""First-order unification, matching and clause subsumption."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .terms import Clause, Fn, FormulaTerm, Var

__all__ = [
    "Store", "Cycle", "mgu", "apply", "apply_clause", "fresh_var",
    "rename_apart", "canonical", "match_clause", "MatchResult",
    "is_instance", "is_variant", "term_vars",
]

_fresh = itertools.count(1)


def fresh_var() -> Var:
    return Var(next(_fresh))


class Cycle(Exception):
    """Raised when resolving bindings hits an occurs-check failure."""


class Store:
    """Triangular binding store for incremental unification.

    ``unify`` never runs the occurs check; it tolerates cyclic bindings
    (a seen-pairs set keeps it terminating) and ``resolve`` reports them as
    :class:`Cycle`.  This is equivalent to unification with occurs check
    once :meth:`check` has passed.
    """

    __slots__ = ("bind", "_seen", "_cache")

    def __init__(self):
        self.bind: dict[Var, FormulaTerm] = {}
        self._seen: set = set()
        self._cache: dict = {}

    def deref(self, t: FormulaTerm) -> FormulaTerm:
        bind = self.bind
        if t.__class__ is not Var or t not in bind:
            return t
        path = []
        while t.__class__ is Var and t in bind:
            path.append(t)
            t = bind[t]
        for v in path[:-1]:
            bind[v] = t
        return t

    def unify(self, a: FormulaTerm, b: FormulaTerm) -> bool:
        bind = self.bind
        seen = self._seen
        stack = [(a, b)]
        self._cache.clear()
        while stack:
            a, b = stack.pop()
            a = self.deref(a)
            b = self.deref(b)
            if a is b:
                continue
            if a.__class__ is Var:
                bind[a] = b
            elif b.__class__ is Var:
                bind[b] = a
            else:
                if a.functor != b.functor or len(a.args) != len(b.args):
                    return False
                key = (a, b)
                if key in seen:
                    continue
                seen.add(key)
                stack.extend(zip(a.args, b.args))
        return True

    def check(self) -> None:
        """Raise :class:`Cycle` if any binding, reachable or not, is cyclic."""
        for v in list(self.bind):
            self.resolve(v)

    def resolve(self, t: FormulaTerm) -> FormulaTerm:
        """Fully apply the bindings to ``t``; raise :class:`Cycle` on failure."""
        if not self.bind:
            return t
        cache = self._cache
        done = cache.get(t)
        if done is not None:
            return done
        bind = self.bind
        active = set()
        stack = [(t, False)]
        while stack:
            s, expanded = stack.pop()
            if s in cache:
                continue
            if s.__class__ is Var:
                if s not in bind:
                    cache[s] = s
                    continue
                target = bind[s]
                if expanded:
                    active.discard(s)
                    cache[s] = cache[target]
                    continue
                if s in active:
                    raise Cycle(s)
                active.add(s)
                stack.append((s, True))
                if target not in cache:
                    if target in active:
                        raise Cycle(target)
                    stack.append((target, False))
            else:
                if expanded:
                    active.discard(s)
                    args = s.args
                    new = tuple(cache[x] for x in args)
                    cache[s] = s if all(x is y for x, y in zip(new, args)) else Fn(s.functor, new)
                    continue
                if not s.args:
                    cache[s] = s
                    continue
                if s in active:
                    raise Cycle(s)
                active.add(s)
                stack.append((s, True))
                for x in s.args:
                    if x not in cache:
                        if x in active:
                            raise Cycle(x)
                        stack.append((x, False))
        return cache[t]


def term_vars(t: FormulaTerm) -> list[Var]:
    """Variables of ``t`` in left-to-right first-occurrence order."""
    out: list[Var] = []
    seen = set()
    stack = [t]
    while stack:
        s = stack.pop()
        if s in seen:
            continue
        seen.add(s)
        if s.__class__ is Var:
            out.append(s)
        else:
            stack.extend(reversed(s.args))
    return out


def mgu(S: Iterable[Iterable[FormulaTerm]]) -> Optional[dict[Var, FormulaTerm]]:
    """Most general idempotent unifier of a set of term sets, or ``None``."""
    store = Store()
    domain: set = set()
    for T in S:
        T = list(T)
        for t in T:
            domain.update(term_vars(t))
        for t in T[1:]:
            if not store.unify(T[0], t):
                return None
    try:
        sigma = {}
        for v in domain:
            r = store.resolve(v)
            if r is not v:
                sigma[v] = r
    except Cycle:
        return None
    return sigma


def apply(sigma: Mapping[Var, FormulaTerm], t):
    """Apply a substitution to a term or a clause."""
    if isinstance(t, Clause):
        return apply_clause(sigma, t)
    if not sigma:
        return t
    memo: dict = {}
    stack = [(t, False)]
    while stack:
        s, expanded = stack.pop()
        if s in memo:
            continue
        if s.__class__ is Var:
            memo[s] = sigma.get(s, s)
        elif expanded:
            args = tuple(memo[a] for a in s.args)
            memo[s] = s if all(x is y for x, y in zip(args, s.args)) else Fn(s.functor, args)
        elif not s.args:
            memo[s] = s
        else:
            stack.append((s, True))
            stack.extend((a, False) for a in s.args if a not in memo)
    return memo[t]


def apply_clause(sigma, F: Clause) -> Clause:
    return Clause(apply(sigma, F.head), tuple(apply(sigma, b) for b in F.body))


def _clause_vars(F: Clause) -> list[Var]:
    out: list[Var] = []
    seen = set()
    for a in F.atoms:
        for v in term_vars(a):
            if v not in seen:
                seen.add(v)
                out.append(v)
    return out


def rename_apart(F: Clause) -> Clause:
    """Copy of ``F`` over fresh variables."""
    return apply_clause({v: fresh_var() for v in _clause_vars(F)}, F)


def canonical(F: Clause, prefix: str = "x") -> Clause:
    """Rename variables to x1, x2, ... in left-to-right first-occurrence order."""
    vs = _clause_vars(F)
    return apply_clause({v: Var(f"{prefix}{i}") for i, v in enumerate(vs, 1)}, F)


# ---------------------------------------------------------------------------
# matching

def _match(pattern: FormulaTerm, target: FormulaTerm, sigma: dict) -> bool:
    """Extend ``sigma`` so that pattern*sigma == target.  Undone by caller on failure."""
    stack = [(pattern, target)]
    while stack:
        p, t = stack.pop()
        if p.__class__ is Var:
            b = sigma.get(p)
            if b is None:
                sigma[p] = t
            elif b is not t:
                return False
        elif t.__class__ is Var or p.functor != t.functor or len(p.args) != len(t.args):
            return False
        else:
            stack.extend(zip(p.args, t.args))
    return True


def _fingerprint(t: FormulaTerm):
    # (functor, arity) of the top symbol, or None for a variable
    return None if t.__class__ is Var else (t.functor, len(t.args))


def _compatible(general: FormulaTerm, special: FormulaTerm) -> bool:
    g = _fingerprint(general)
    if g is None:
        return True
    s = _fingerprint(special)
    if g != s:
        return False
    return all(_fingerprint(a) is None or _fingerprint(a) == _fingerprint(b)
               for a, b in zip(general.args, special.args))


def _instance(F: Clause, G: Clause, permute: bool):
    """Find (sigma, perm) with F == (perm applied to G)*sigma; perm[j] indexes G.body."""
    if len(F.body) != len(G.body):
        return None
    sigma: dict = {}
    if not _match(G.head, F.head, sigma):
        return None
    n = len(F.body)
    if not permute:
        for a, b in zip(G.body, F.body):
            if not _match(a, b, sigma):
                return None
        return sigma, tuple(range(n))
    cands = [[k for k in range(n) if _compatible(G.body[k], F.body[j])] for j in range(n)]
    if any(not c for c in cands):
        return None
    order = sorted(range(n), key=lambda j: len(cands[j]))
    used = [False] * n
    perm = [0] * n

    def search(pos: int, sigma: dict):
        if pos == n:
            return sigma
        j = order[pos]
        for k in cands[j]:
            if used[k]:
                continue
            trial = dict(sigma)
            if _match(G.body[k], F.body[j], trial):
                used[k] = True
                perm[j] = k
                res = search(pos + 1, trial)
                if res is not None:
                    return res
                used[k] = False
        return None

    res = search(0, sigma)
    return None if res is None else (res, tuple(perm))


@dataclass(frozen=True)
class MatchResult:
    """Outcome of testing whether F is an instance of F'.

    ``instance`` is the matching substitution (None if F is not an instance);
    ``permutation[j]`` is the index of the F' body atom matched to F's j-th.
    """

    instance: Optional[dict]
    permutation: Optional[tuple]
    variant: bool
    strict: bool


def match_clause(F: Clause, F2: Clause, mode: str = "ordered") -> MatchResult:
    """Is ``F`` an instance of ``F2``?  ``mode`` is 'ordered' or 'mod-permutation'."""
    if mode not in ("ordered", "mod-permutation"):
        raise ValueError(f"unknown match mode {mode!r}")
    permute = mode == "mod-permutation"
    fwd = _instance(F, F2, permute)
    if fwd is None:
        return MatchResult(None, None, False, False)
    back = _instance(F2, F, permute)
    variant = back is not None
    return MatchResult(fwd[0], fwd[1], variant, not variant)


def is_instance(F: Clause, F2: Clause, mode: str = "ordered") -> bool:
    return _instance(F, F2, mode == "mod-permutation") is not None


def is_variant(F: Clause, F2: Clause, mode: str = "ordered") -> bool:
    permute = mode == "mod-permutation"
    return (_instance(F, F2, permute) is not None
            and _instance(F2, F, permute) is not None)
