"""Extraction of a proof-grammar KB from a Metamath database."""

from __future__ import annotations

from collections import deque
from typing import Iterable, Mapping, Optional

from ..terms import KB, Clause, Node, Param, Production, ProofGrammar, postorder
from .database import Database, MetamathError, Statement
from .proof import referenced_labels, replay
from .syntax import SyntaxGrammar, build_syntax_grammar, parse_formula

__all__ = ["extract_kb", "dependency_closure", "statement_clause", "present", "DG_PRESENTATION"]

# print-time presentation of set.mm's rules as D and G
DG_PRESENTATION = {"ax-mp": ("D", (1, 0)), "ax-gen": ("G", (0,))}


class _Parser:
    def __init__(self, db: Database, g: SyntaxGrammar, goals: Mapping[str, str]):
        self.db = db
        self.g = g
        self.goals = goals
        self._vt: dict = {}

    def var_types(self, stmt: Statement) -> dict:
        key = id(stmt.ftypes)
        vt = self._vt.get(key)
        if vt is None:
            vt = self._vt[key] = (stmt.ftypes, {v: tc for v, (_, tc) in stmt.ftypes.items()})
        return vt[1]

    def formula(self, stmt: Statement):
        goal = self.goals.get(stmt.typecode, stmt.typecode)
        try:
            return parse_formula(stmt.tokens, goal, self.g, self.var_types(stmt))
        except MetamathError as e:
            raise MetamathError(str(e), stmt.label) from None


def statement_clause(db: Database, stmt: Statement, parser: _Parser) -> Clause:
    """Clause ``conclusion <- hypotheses`` of an assertion, bodies in frame order."""
    return Clause(parser.formula(stmt),
                  tuple(parser.formula(db.statements[e]) for e in stmt.frame.e_hyps))


def dependency_closure(db: Database, roots: Iterable[str], provability=("|-",)) -> set:
    """Provable ``$p`` labels reachable from ``roots`` through proof references."""
    provability = set(provability)
    out: set = set()
    todo = deque()
    for r in roots:
        s = db.statements.get(r)
        if s is None:
            raise MetamathError("unresolved root label", r)
        if s.kind != "p" or s.typecode not in provability:
            raise MetamathError("root is not a provable theorem", r)
        todo.append(r)
    while todo:
        lab = todo.popleft()
        if lab in out:
            continue
        out.add(lab)
        s = db.statements[lab]
        for ref in referenced_labels(s):
            t = db.statements.get(ref)
            if t is None:
                raise MetamathError(f"unresolved reference {ref!r}", lab)
            if t.kind == "p" and t.typecode in provability and ref not in out:
                todo.append(ref)
    return out


def extract_kb(db: Database, roots: Optional[Iterable[str]] = None, provability=("|-",),
               goals: Optional[Mapping[str, str]] = None, end_label: Optional[str] = None,
               exclude: Iterable[str] = (), warnings: Optional[list] = None) -> KB:
    """Build the KB of a database (or of the dependency closure of ``roots``).

    Productions are named by theorem labels and keep the frame order of
    hypotheses; syntactic proof steps are dropped.  ``goals`` maps a
    provability typecode to the typecode its formulas parse as (default
    ``{"|-": "wff"}``).  ``end_label`` cuts the database after that
    statement.  Theorems carrying ``$d`` restrictions are noted in
    ``warnings`` if a list is passed.
    """
    provability = tuple(provability)
    prov = set(provability)
    goals = dict(goals) if goals is not None else {tc: "wff" for tc in provability}
    exclude = set(exclude)
    g = build_syntax_grammar(db, provability)
    parser = _Parser(db, g, goals)

    if end_label is not None and end_label not in db.statements:
        raise MetamathError("unknown end label", end_label)
    end = db.statements[end_label].index if end_label is not None else None
    keep = dependency_closure(db, roots, provability) if roots is not None else None

    selected: list[Statement] = []
    for s in db.assertions():
        if end is not None and s.index > end:
            break
        if s.kind != "p" or s.typecode not in prov or s.label in exclude:
            continue
        if keep is not None and s.label not in keep:
            continue
        selected.append(s)
    chosen = {s.label for s in selected}

    prods, clauses = [], []
    used_axioms: set = set()
    for s in selected:
        if s.incomplete:
            raise MetamathError("incomplete proof", s.label)
        own = {e: i for i, e in enumerate(s.frame.e_hyps, 1)}

        def hyp_value(h, own=own):
            return Param(own[h.label]) if h.kind == "e" else None

        def build(a: Statement, popped, s=s):
            if a.typecode not in prov:
                return None
            kids = []
            for h, e in zip(a.frame.hyps, popped):
                if db.statements[h].kind == "e":
                    if e[2] is None:
                        raise MetamathError(f"hypothesis {h} of {a.label} has no logical proof",
                                            s.label)
                    kids.append(e[2])
            if a.kind == "p" and a.label not in chosen:
                raise MetamathError(f"reference to excluded theorem {a.label!r}", s.label)
            return Node(a.label, kids)

        r = replay(db, s, build=build, hyp_value=hyp_value)
        if r.incomplete:
            raise MetamathError("incomplete proof", s.label)
        rhs = r.value
        for t in postorder(rhs):
            if t.__class__ is Node and db.statements[t.name].kind == "a":
                used_axioms.add(t.name)
        prods.append(Production(s.label, len(s.frame.e_hyps), rhs))
        clauses.append(statement_clause(db, s, parser))
        if warnings is not None and s.frame.dvs:
            warnings.append((s.label, "carries $d restrictions (ignored by the clause form)"))

    base = {}
    for s in db.assertions():
        if end is not None and s.index > end:
            break
        if s.kind == "a" and s.typecode in prov and (keep is None or s.label in used_axioms):
            base[s.label] = statement_clause(db, s, parser)
    return KB(base, tuple(clauses), ProofGrammar(prods))


def present(t, renames: Mapping[str, tuple] = DG_PRESENTATION):
    """Rename nodes and permute their children for display (e.g. ax-mp as D)."""
    memo: dict = {}
    for s in postorder(t):
        if s.__class__ is not Node:
            memo[s] = s
            continue
        kids = [memo[c] for c in s.children]
        r = renames.get(s.name)
        if r is not None and len(r[1]) == len(kids):
            memo[s] = Node(r[0], [kids[i] for i in r[1]])
        else:
            memo[s] = Node(s.name, kids)
    return memo[t]
