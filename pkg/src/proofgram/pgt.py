"""Reading and writing the line-oriented PGT knowledge-base format.

::

    # comment
    axiom ax-mp/2 : ?ps <- ?ph , wi(?ph,?ps)
    prod a1i(1) -> ax-mp($1,ax-1) : wi(?ps,?ph) <- ?ph

Declarations appear in grammar order.  Names outside ``[A-Za-z0-9._'-]+``
are single-quoted with backslash escapes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .terms import KB, Clause, Fn, Node, Param, Production, ProofGrammar, Var, format_name

__all__ = ["PgtError", "PgtDocument", "parse_pgt", "read_pgt", "write_pgt",
           "format_clause", "format_formula", "parse_clause", "parse_proof_term"]


class PgtError(ValueError):
    def __init__(self, msg, line=None):
        super().__init__(f"line {line}: {msg}" if line else msg)
        self.line = line


_TOKEN = re.compile(r"""
    \s*(?:
      (?P<quoted>'(?:[^'\\]|\\.)*')
    | (?P<param>\$\d+)
    | (?P<arrow>->|<-)
    | (?P<punct>[(),:/?])
    | (?P<name>[A-Za-z0-9._-][A-Za-z0-9._'-]*)
    )""", re.VERBOSE)


def _unquote(s: str) -> str:
    return re.sub(r"\\(.)", r"\1", s[1:-1])


def _tokenize(text: str, line=None) -> list[tuple[str, str]]:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PgtError(f"unexpected character {text[pos:pos + 10]!r}", line)
        pos = m.end()
        kind = m.lastgroup
        val = m.group(kind)
        if kind == "quoted":
            out.append(("name", _unquote(val)))
        else:
            out.append((kind, val))
    return out


class _Cursor:
    def __init__(self, toks, line):
        self.toks = toks
        self.i = 0
        self.line = line

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def next(self):
        t = self.peek()
        if t[0] is None:
            raise PgtError("unexpected end of line", self.line)
        self.i += 1
        return t

    def expect(self, val):
        k, v = self.next()
        if v != val:
            raise PgtError(f"expected {val!r}, got {v!r}", self.line)

    def name(self):
        k, v = self.next()
        if k != "name":
            raise PgtError(f"expected a name, got {v!r}", self.line)
        return v

    def done(self):
        return self.i >= len(self.toks)


def _parse_term(cur: _Cursor, formula: bool):
    # iterative: expanded proof terms may nest deeply
    stack: list = []  # frames: [name, args]
    while True:
        k, v = cur.next()
        if formula and v == "?":
            t = Var(cur.name())
        elif not formula and k == "param":
            t = Param(int(v[1:]))
        elif k == "name":
            if cur.peek()[1] == "(":
                cur.next()
                stack.append([v, []])
                continue
            t = Fn(v) if formula else Node(v)
        else:
            raise PgtError(f"unexpected token {v!r}", cur.line)
        while True:
            if not stack:
                return t
            stack[-1][1].append(t)
            k, v = cur.next()
            if v == ",":
                break
            if v != ")":
                raise PgtError(f"expected ',' or ')', got {v!r}", cur.line)
            name, args = stack.pop()
            t = Fn(name, args) if formula else Node(name, args)


def _parse_clause(cur: _Cursor) -> Clause:
    head = _parse_term(cur, True)
    body = []
    if cur.peek()[1] == "<-":
        cur.next()
        body.append(_parse_term(cur, True))
        while cur.peek()[1] == ",":
            cur.next()
            body.append(_parse_term(cur, True))
    return Clause(head, tuple(body))


def parse_clause(text: str) -> Clause:
    cur = _Cursor(_tokenize(text), None)
    F = _parse_clause(cur)
    if not cur.done():
        raise PgtError(f"trailing input {cur.peek()[1]!r}")
    return F


def parse_proof_term(text: str):
    cur = _Cursor(_tokenize(text), None)
    t = _parse_term(cur, False)
    if not cur.done():
        raise PgtError(f"trailing input {cur.peek()[1]!r}")
    return t


def format_formula(t) -> str:
    out = []
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, str):
            out.append(s)
        elif s.__class__ is Var:
            n = s.name if isinstance(s.name, str) else f"_{s.name}"
            out.append("?" + format_name(n))
        else:
            out.append(format_name(s.functor))
            if s.args:
                out.append("(")
                stack.append(")")
                for i, a in enumerate(reversed(s.args)):
                    stack.append(a)
                    if i < len(s.args) - 1:
                        stack.append(",")
    return "".join(out)


def format_clause(F: Clause) -> str:
    if not F.body:
        return format_formula(F.head)
    return format_formula(F.head) + " <- " + " , ".join(map(format_formula, F.body))


@dataclass
class PgtDocument:
    base: dict = field(default_factory=dict)
    productions: list = field(default_factory=list)
    clauses: list = field(default_factory=list)
    header: list = field(default_factory=list)

    @property
    def grammar(self) -> ProofGrammar:
        return ProofGrammar(self.productions)

    @property
    def is_kb(self) -> bool:
        return all(c is not None for c in self.clauses)

    def kb(self) -> KB:
        if not self.is_kb:
            missing = [p.nonterminal for p, c in zip(self.productions, self.clauses) if c is None]
            raise PgtError(f"productions without theorem clause: {', '.join(missing[:5])}")
        return KB(dict(self.base), tuple(self.clauses), self.grammar)


def parse_pgt(text: str) -> PgtDocument:
    doc = PgtDocument()
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            doc.header.append(s[1:].strip())
            continue
        cur = _Cursor(_tokenize(s, lineno), lineno)
        kw = cur.name()
        if kw == "axiom":
            name = cur.name()
            cur.expect("/")
            n = int(cur.name())
            cur.expect(":")
            F = _parse_clause(cur)
            if len(F.body) != n:
                raise PgtError(f"axiom {name} declared /{n} but has {len(F.body)} body atoms", lineno)
            if name in doc.base:
                raise PgtError(f"duplicate axiom {name}", lineno)
            doc.base[name] = F
        elif kw == "prod":
            name = cur.name()
            cur.expect("(")
            n = int(cur.name())
            cur.expect(")")
            cur.expect("->")
            rhs = _parse_term(cur, False)
            F = None
            if cur.peek()[1] == ":":
                cur.next()
                F = _parse_clause(cur)
            doc.productions.append(Production(name, n, rhs))
            doc.clauses.append(F)
        else:
            raise PgtError(f"unknown declaration {kw!r}", lineno)
        if not cur.done():
            raise PgtError(f"trailing input {cur.peek()[1]!r}", lineno)
    return doc


def read_pgt(path) -> PgtDocument:
    with open(path, encoding="utf-8") as f:
        return parse_pgt(f.read())


def write_pgt(out, base: Mapping[str, Clause] | None, grammar: ProofGrammar | Iterable[Production],
              clauses: Iterable[Optional[Clause]] | None = None,
              header: Iterable[str] = ()) -> None:
    """Write a PGT document to the text stream ``out``."""
    for h in header:
        out.write(f"# {h}\n")
    for name, F in (base or {}).items():
        out.write(f"axiom {format_name(name)}/{len(F.body)} : {format_clause(F)}\n")
    prods = list(grammar)
    clauses = list(clauses) if clauses is not None else [None] * len(prods)
    for p, F in zip(prods, clauses):
        line = f"prod {format_name(p.nonterminal)}({p.arity}) -> {p.rhs!r}"
        if F is not None:
            line += f" : {format_clause(F)}"
        out.write(line + "\n")
