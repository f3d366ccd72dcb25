"""Terms, clauses, productions, grammars and knowledge bases.

Formula terms (``Var``/``Fn``) and proof terms (``Param``/``Node``) are
hash-consed: constructing a structurally equal term returns the existing
object, so equality is identity and hashing is O(1).  Proof-term nodes cache
their tree size as an exact integer, which stays cheap even when the tree
they denote has 10**20 edges.
"""

from __future__ import annotations

import re
import weakref
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence, Union

__all__ = [
    "Var", "Fn", "Param", "Node", "FormulaTerm", "ProofTerm",
    "Clause", "Production", "ProofGrammar", "KB", "ValidationReport",
    "term_size", "clause_metrics", "is_linear", "substitute_params",
    "param_occurrences", "validate_grammar", "postorder", "format_name",
    "NAME_RE", "expand", "value",
]

NAME_RE = re.compile(r"[A-Za-z0-9._'-]+\Z")


def format_name(name: str) -> str:
    """Render a symbol name, quoting it when it is not a bare name."""
    if NAME_RE.match(name) and "'" not in name:
        return name
    return "'" + name.replace("\\", "\\\\").replace("'", "\\'") + "'"


# ---------------------------------------------------------------------------
# formula terms

class Var:
    """Formula variable.  ``name`` is a str, or an int for fresh variables."""

    __slots__ = ("name", "__weakref__")
    _table: "weakref.WeakValueDictionary" = weakref.WeakValueDictionary()

    def __new__(cls, name):
        t = cls._table.get(name)
        if t is None:
            t = object.__new__(cls)
            t.name = name
            cls._table[name] = t
        return t

    def __reduce__(self):
        return (Var, (self.name,))

    def __repr__(self):
        return f"?{self.name}" if isinstance(self.name, str) else f"?_{self.name}"

    is_var = True


class Fn:
    """Application of a functor to argument terms (constants have no args)."""

    __slots__ = ("functor", "args", "__weakref__")
    _table: "weakref.WeakValueDictionary" = weakref.WeakValueDictionary()

    def __new__(cls, functor: str, args: Sequence["FormulaTerm"] = ()):
        args = tuple(args)
        key = (functor, args)
        t = cls._table.get(key)
        if t is None:
            t = object.__new__(cls)
            t.functor = functor
            t.args = args
            cls._table[key] = t
        return t

    def __reduce__(self):
        return (Fn, (self.functor, self.args))

    def __repr__(self):
        if not self.args:
            return format_name(self.functor)
        return f"{format_name(self.functor)}({','.join(map(repr, self.args))})"

    is_var = False


FormulaTerm = Union[Var, Fn]


# ---------------------------------------------------------------------------
# proof terms

class Param:
    """Proof-term parameter V_index (index >= 1)."""

    __slots__ = ("index", "__weakref__")
    _table: "weakref.WeakValueDictionary" = weakref.WeakValueDictionary()

    size = 0
    ground = False
    children = ()

    def __new__(cls, index: int):
        if index < 1:
            raise ValueError(f"parameter index must be positive, got {index}")
        t = cls._table.get(index)
        if t is None:
            t = object.__new__(cls)
            t.index = index
            cls._table[index] = t
        return t

    @property
    def max_param(self) -> int:
        return self.index

    def __reduce__(self):
        return (Param, (self.index,))

    def __repr__(self):
        return f"${self.index}"


class Node:
    """Proof-term node: a presupposition or nonterminal applied to subterms."""

    __slots__ = ("name", "children", "size", "ground", "max_param", "__weakref__")
    _table: "weakref.WeakValueDictionary" = weakref.WeakValueDictionary()

    def __new__(cls, name: str, children: Sequence["ProofTerm"] = ()):
        children = tuple(children)
        key = (name, children)
        t = cls._table.get(key)
        if t is None:
            t = object.__new__(cls)
            t.name = name
            t.children = children
            size = len(children)
            ground = True
            mp = 0
            for c in children:
                size += c.size
                if not c.ground:
                    ground = False
                    if c.max_param > mp:
                        mp = c.max_param
            t.size = size
            t.ground = ground
            t.max_param = mp
            cls._table[key] = t
        return t

    def __reduce__(self):
        return (Node, (self.name, self.children))

    def __repr__(self):
        # iterative: expanded proof terms can be very deep
        out = []
        stack = [self]
        while stack:
            t = stack.pop()
            if isinstance(t, str):
                out.append(t)
            elif isinstance(t, Param):
                out.append(repr(t))
            else:
                out.append(format_name(t.name))
                if t.children:
                    out.append("(")
                    stack.append(")")
                    for i, c in enumerate(reversed(t.children)):
                        stack.append(c)
                        if i < len(t.children) - 1:
                            stack.append(",")
        return "".join(out)


ProofTerm = Union[Param, Node]


def postorder(root, children=lambda t: t.children) -> Iterator:
    """Yield the distinct subterms of ``root`` (children before parents)."""
    seen = set()
    stack = [(root, False)]
    while stack:
        t, done = stack.pop()
        if done:
            yield t
            continue
        if t in seen:
            continue
        seen.add(t)
        stack.append((t, True))
        for c in reversed(children(t)):
            if c not in seen:
                stack.append((c, False))


def term_size(t) -> int:
    """Number of edges of ``t`` viewed as a tree."""
    if isinstance(t, (Param, Node)):
        return t.size
    memo = {}
    for s in postorder(t, lambda s: s.args if isinstance(s, Fn) else ()):
        if isinstance(s, Var):
            memo[s] = 0
        else:
            memo[s] = len(s.args) + sum(memo[a] for a in s.args)
    return memo[t]


def param_occurrences(t: ProofTerm) -> dict[int, int]:
    """Map parameter index -> number of occurrences in the tree ``t``."""
    if t.ground:
        return {}
    counts: dict = {}
    for s in postorder(t):
        if isinstance(s, Param):
            counts[s] = {s.index: 1}
        elif s.ground:
            counts[s] = {}
        else:
            acc: dict[int, int] = {}
            for c in s.children:
                for i, n in counts[c].items():
                    acc[i] = acc.get(i, 0) + n
            counts[s] = acc
    return counts[t]


def is_linear(t: ProofTerm) -> bool:
    return all(n == 1 for n in param_occurrences(t).values())


def substitute_params(d: ProofTerm, args: Sequence[ProofTerm]) -> ProofTerm:
    """Simultaneously replace each V_i in ``d`` by ``args[i-1]``."""
    if d.ground:
        return d
    if d.max_param > len(args):
        raise IndexError(
            f"parameter ${d.max_param} out of range for {len(args)} argument(s)")
    memo = {}
    for s in postorder(d):
        if isinstance(s, Param):
            memo[s] = args[s.index - 1]
        elif s.ground:
            memo[s] = s
        else:
            memo[s] = Node(s.name, [memo[c] for c in s.children])
    return memo[d]


# ---------------------------------------------------------------------------
# clauses

def _atom_weight(t: FormulaTerm, memo: dict) -> tuple[int, int]:
    # (size, height) with variables and constants weighing 0
    for s in postorder(t, lambda s: s.args if isinstance(s, Fn) else ()):
        if s in memo:
            continue
        if isinstance(s, Var) or not s.args:
            memo[s] = (0, 0)
        else:
            memo[s] = (1 + sum(memo[a][0] for a in s.args),
                       1 + max(memo[a][1] for a in s.args))
    return memo[t]


@dataclass(frozen=True)
class Clause:
    """Definite clause ``head <- body[0], ..., body[n-1]``."""

    head: FormulaTerm
    body: tuple = ()

    def __post_init__(self):
        if not isinstance(self.body, tuple):
            object.__setattr__(self, "body", tuple(self.body))

    @property
    def atoms(self) -> tuple:
        return (self.head,) + self.body

    def __repr__(self):
        if not self.body:
            return repr(self.head)
        return f"{self.head!r} <- {', '.join(map(repr, self.body))}"


def clause_metrics(F: Clause) -> tuple[int, int]:
    """Return ``(size, height)`` of a clause as used in the KB statistics."""
    memo: dict = {}
    ws = [_atom_weight(a, memo) for a in F.atoms]
    return sum(w[0] for w in ws), max(w[1] for w in ws)


# ---------------------------------------------------------------------------
# grammars

@dataclass(frozen=True)
class Production:
    nonterminal: str
    arity: int
    rhs: ProofTerm

    @property
    def size(self) -> int:
        return self.rhs.size

    @property
    def lhs(self) -> Node:
        return Node(self.nonterminal, [Param(i) for i in range(1, self.arity + 1)])

    def __repr__(self):
        return f"{format_name(self.nonterminal)}({self.arity}) -> {self.rhs!r}"


class ProofGrammar:
    """Ordered sequence of productions; lookups by nonterminal name."""

    def __init__(self, productions: Iterable[Production] = ()):
        self.productions = tuple(productions)
        self._index: dict[str, int] = {}
        for i, p in enumerate(self.productions):
            self._index.setdefault(p.nonterminal, i)

    def __len__(self):
        return len(self.productions)

    def __iter__(self):
        return iter(self.productions)

    def __contains__(self, name):
        return name in self._index

    def __getitem__(self, name: str) -> Production:
        return self.productions[self._index[name]]

    def get(self, name, default=None):
        i = self._index.get(name)
        return default if i is None else self.productions[i]

    def index(self, name: str) -> int:
        return self._index[name]

    @property
    def nonterminals(self) -> list[str]:
        return [p.nonterminal for p in self.productions]

    @property
    def size(self) -> int:
        return sum(p.rhs.size for p in self.productions)

    @property
    def arity(self) -> int:
        return max((p.arity for p in self.productions), default=0)

    def __eq__(self, other):
        return isinstance(other, ProofGrammar) and self.productions == other.productions

    def __hash__(self):
        return hash(self.productions)

    def __repr__(self):
        return "ProofGrammar<" + "; ".join(map(repr, self.productions)) + ">"


@dataclass(frozen=True)
class KB:
    """Knowledge base: presupposition base, stated theorems, proof grammar."""

    base: Mapping[str, Clause]
    theorems: tuple
    grammar: ProofGrammar

    def __post_init__(self):
        if not isinstance(self.theorems, tuple):
            object.__setattr__(self, "theorems", tuple(self.theorems))

    def theorem(self, name: str) -> Clause:
        return self.theorems[self.grammar.index(name)]


@dataclass
class ValidationReport:
    errors: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    terminals: set = field(default_factory=set)

    @property
    def ok(self) -> bool:
        return not self.errors


def validate_grammar(G: ProofGrammar, B: Mapping[str, Clause] | None = None,
                     ) -> ValidationReport:
    """Check ordering, uniqueness, arities, terminals and parameters."""
    B = B or {}
    rep = ValidationReport()
    position: dict[str, int] = {}
    arity: dict[str, int] = {}
    for i, p in enumerate(G.productions):
        if p.nonterminal in position:
            rep.errors.append(f"duplicate nonterminal {p.nonterminal}")
        else:
            position[p.nonterminal] = i
            arity[p.nonterminal] = p.arity
        if p.nonterminal in B:
            rep.warnings.append(f"nonterminal {p.nonterminal} shadows a presupposition")
    for j, p in enumerate(G.productions):
        used = set()
        for s in postorder(p.rhs):
            if isinstance(s, Param):
                used.add(s.index)
                if s.index > p.arity:
                    rep.errors.append(
                        f"{p.nonterminal}: parameter ${s.index} exceeds arity {p.arity}")
                continue
            name = s.name
            if name in position:
                if position[name] >= j:
                    rep.errors.append(
                        f"ordering violation: {name} used in {p.nonterminal} "
                        f"before its definition")
                want = arity[name]
            elif name in B:
                rep.terminals.add(name)
                want = len(B[name].body)
            else:
                rep.terminals.add(name)
                rep.errors.append(f"undeclared terminal {name} in {p.nonterminal}")
                continue
            if len(s.children) != want:
                rep.errors.append(
                    f"arity mismatch: {name} applied to {len(s.children)} "
                    f"argument(s) in {p.nonterminal}, declared {want}")
        for i in range(1, p.arity + 1):
            if i not in used:
                rep.warnings.append(f"{p.nonterminal}: unused parameter ${i}")
    return rep


def expand(G: ProofGrammar, t: ProofTerm, memo: dict | None = None) -> ProofTerm:
    """Expand every nonterminal occurrence in ``t`` with the productions of G.

    The result is hash-consed, so it is a DAG no larger than the distinct
    subterms of the value.  ``memo`` maps (nonterminal, argument terms) to
    values and can be shared across calls on the same grammar.
    """
    if memo is None:
        memo = {}

    def inst(term, args):
        # generator: yields (name, args) requests, receives the expansion
        local = {}
        for s in postorder(term):
            if isinstance(s, Param):
                local[s] = s if args is None else args[s.index - 1]
                continue
            cs = tuple(local[c] for c in s.children)
            if s.name in G:
                key = (s.name, cs)
                val = memo.get(key)
                if val is None:
                    val = yield key
                local[s] = val
            else:
                local[s] = Node(s.name, cs)
        return local[term]

    stack = [(None, inst(t, None))]
    send = None
    while True:
        key, gen = stack[-1]
        try:
            req = gen.send(send)
        except StopIteration as stop:
            stack.pop()
            if key is not None:
                memo[key] = stop.value
            if not stack:
                return stop.value
            send = stop.value
            continue
        send = None
        stack.append((req, inst(G[req[0]].rhs, req[1])))


def value(G: ProofGrammar, name: str, memo: dict | None = None) -> ProofTerm:
    """val_G(p(V1..Vn)) as a hash-consed term with parameters."""
    return expand(G, G[name].lhs, memo)
