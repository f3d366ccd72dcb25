"""Metamath database parsing: tokens, scoping, and assertion frames."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

__all__ = ["MetamathError", "Statement", "Frame", "Database", "mm_parse", "mm_read"]


class MetamathError(ValueError):
    """Malformed or unsupported Metamath input."""

    def __init__(self, msg, label=None):
        super().__init__(f"{label}: {msg}" if label else msg)
        self.label = label


@dataclass(frozen=True)
class Frame:
    """Mandatory hypotheses (in order) and disjoint-variable pairs of an assertion."""

    hyps: tuple
    e_hyps: tuple
    dvs: frozenset


@dataclass
class Statement:
    label: str
    kind: str                     # one of 'f', 'e', 'a', 'p'
    typecode: str
    tokens: tuple
    index: int
    proof: Optional[list] = None  # raw proof tokens for $p
    frame: Optional[Frame] = None
    # scope context at the statement (shared, never mutated)
    ftypes: dict = field(default=None, repr=False)   # var -> ($f label, typecode)
    all_dvs: frozenset = field(default=frozenset(), repr=False)

    @property
    def is_assertion(self) -> bool:
        return self.kind in ("a", "p")

    @property
    def compressed(self) -> bool:
        return bool(self.proof) and self.proof[0] == "("

    @property
    def incomplete(self) -> bool:
        if not self.proof:
            return False
        if self.compressed:
            return "?" in "".join(self.proof[self.proof.index(")") + 1:])
        return "?" in self.proof


class Database:
    def __init__(self):
        self.constants: set = set()
        self.variables: set = set()
        self.statements: dict[str, Statement] = {}
        self.order: list[str] = []

    def __getitem__(self, label) -> Statement:
        return self.statements[label]

    def __contains__(self, label):
        return label in self.statements

    def assertions(self):
        for lab in self.order:
            s = self.statements[lab]
            if s.is_assertion:
                yield s


def _tokens(text: str):
    toks = iter(text.split())
    for tok in toks:
        if tok == "$(":
            for t in toks:
                if t == "$)":
                    break
                if "$(" in t or "$)" in t:
                    raise MetamathError(f"malformed comment token {t!r}")
            else:
                raise MetamathError("unterminated comment")
            continue
        if tok == "$[":
            raise MetamathError("file inclusion ($[ ... $]) is not supported")
        yield tok


class _Scope:
    __slots__ = ("vars", "ftypes", "ehyps", "dvs")

    def __init__(self, vars, ftypes, ehyps, dvs):
        self.vars = vars
        self.ftypes = ftypes
        self.ehyps = ehyps
        self.dvs = dvs


def _read_until(toks, end, label=None):
    out = []
    for t in toks:
        if t == end:
            return out
        if t.startswith("$") and t not in ("$=",):
            raise MetamathError(f"unexpected {t} before {end}", label)
        out.append(t)
    raise MetamathError(f"missing {end}", label)


def mm_parse(data) -> Database:
    """Parse the text (str or bytes) of a complete .mm file."""
    if isinstance(data, bytes):
        data = data.decode("ascii", errors="strict")
    db = Database()
    stack = [_Scope(frozenset(), {}, (), frozenset())]
    toks = _tokens(data)
    n = 0

    def check_tokens(sym, label):
        sc = stack[-1]
        for t in sym:
            if t not in db.constants and t not in sc.vars:
                raise MetamathError(f"undeclared token {t!r}", label)

    def add(stmt):
        if stmt.label in db.statements:
            raise MetamathError("duplicate label", stmt.label)
        if stmt.label in db.constants or stmt.label in db.variables:
            raise MetamathError("label collides with a math symbol", stmt.label)
        db.statements[stmt.label] = stmt
        db.order.append(stmt.label)

    label = None
    for tok in toks:
        sc = stack[-1]
        if tok == "${":
            stack.append(_Scope(sc.vars, sc.ftypes, sc.ehyps, sc.dvs))
        elif tok == "$}":
            if len(stack) == 1:
                raise MetamathError("unmatched $}")
            stack.pop()
        elif tok == "$c":
            if len(stack) > 1:
                raise MetamathError("$c not in outermost scope")
            for c in _read_until(toks, "$."):
                if c in db.constants or c in db.variables:
                    raise MetamathError(f"symbol {c!r} declared twice")
                db.constants.add(c)
        elif tok == "$v":
            vs = _read_until(toks, "$.")
            for v in vs:
                if v in db.constants or v in sc.vars:
                    raise MetamathError(f"variable {v!r} redeclared")
                db.variables.add(v)
            sc.vars = sc.vars | frozenset(vs)
        elif tok == "$d":
            vs = _read_until(toks, "$.")
            for v in vs:
                if v not in sc.vars:
                    raise MetamathError(f"$d on inactive variable {v!r}")
            pairs = {frozenset((a, b)) for i, a in enumerate(vs) for b in vs[i + 1:] if a != b}
            sc.dvs = sc.dvs | pairs
        elif tok.startswith("$"):
            raise MetamathError(f"unexpected keyword {tok}")
        else:
            label = tok
            kw = next(toks, None)
            if kw == "$f":
                body = _read_until(toks, "$.", label)
                if len(body) != 2:
                    raise MetamathError("$f needs a typecode and a variable", label)
                tc, var = body
                if tc not in db.constants:
                    raise MetamathError(f"typecode {tc!r} is not a constant", label)
                if var not in sc.vars:
                    raise MetamathError(f"$f on inactive variable {var!r}", label)
                if var in sc.ftypes:
                    raise MetamathError(f"second $f for {var!r}", label)
                sc.ftypes = {**sc.ftypes, var: (label, tc)}
                add(Statement(label, "f", tc, (var,), n, ftypes=sc.ftypes))
            elif kw == "$e":
                body = _read_until(toks, "$.", label)
                if not body:
                    raise MetamathError("empty $e", label)
                check_tokens(body, label)
                sc.ehyps = sc.ehyps + (label,)
                add(Statement(label, "e", body[0], tuple(body[1:]), n, ftypes=sc.ftypes))
            elif kw in ("$a", "$p"):
                if kw == "$a":
                    body = _read_until(toks, "$.", label)
                    proof = None
                else:
                    body = _read_until(toks, "$=", label)
                    proof = _read_until(toks, "$.", label)
                if not body:
                    raise MetamathError("empty assertion", label)
                if body[0] not in db.constants:
                    raise MetamathError(f"typecode {body[0]!r} is not a constant", label)
                check_tokens(body, label)
                stmt = Statement(label, kw[1], body[0], tuple(body[1:]), n, proof=proof,
                                 ftypes=sc.ftypes, all_dvs=sc.dvs)
                stmt.frame = _frame(db, sc, stmt)
                add(stmt)
            else:
                raise MetamathError(f"expected $f/$e/$a/$p after label, got {kw!r}", label)
            n += 1
    if len(stack) != 1:
        raise MetamathError("unbalanced ${ ... $} block at end of file")
    return db


def _frame(db: Database, sc: _Scope, stmt: Statement) -> Frame:
    mand = {t for t in stmt.tokens if t in sc.vars}
    for e in sc.ehyps:
        mand.update(t for t in db.statements[e].tokens if t in sc.vars)
    hyps = []
    for v in mand:
        if v not in sc.ftypes:
            raise MetamathError(f"variable {v!r} has no active $f", stmt.label)
        hyps.append(sc.ftypes[v][0])
    hyps.extend(sc.ehyps)
    hyps.sort(key=lambda lab: db.statements[lab].index)
    dvs = frozenset(p for p in sc.dvs if p <= mand)
    return Frame(tuple(hyps), tuple(sc.ehyps), dvs)


def mm_read(path) -> Database:
    with open(path, "rb") as f:
        return mm_parse(f.read())
