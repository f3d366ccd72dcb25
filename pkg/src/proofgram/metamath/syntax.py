"""Formula parsing with a context-free grammar read off the syntax axioms.

Every ``$a`` whose typecode is not a provability typecode (``wi: wff ( ph
-> ps )``) is a rule ``wff -> '(' wff '->' wff ')'``; every ``$f`` typecode
gets a leaf rule matching any variable of that type.  Parse trees become
formula terms whose functors are syntax-axiom labels and whose arguments
follow the ``$f`` order of the axiom's frame.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

from ..terms import Fn, FormulaTerm, Var
from .database import Database, MetamathError

__all__ = ["SyntaxRule", "SyntaxGrammar", "FormulaParseError", "AmbiguousParse",
           "build_syntax_grammar", "parse_formula", "unparse"]


class FormulaParseError(MetamathError):
    def __init__(self, msg, span=None, label=None):
        super().__init__(msg + (f" at tokens {span[0]}..{span[1]}" if span else ""), label)
        self.span = span


class AmbiguousParse(FormulaParseError):
    pass


# grammar symbols: ('c', token) constant, ('v', typecode) typed variable, or a
# nonterminal typecode given as a plain string
@dataclass(frozen=True)
class SyntaxRule:
    label: str
    lhs: str
    rhs: tuple
    args: tuple        # rhs positions of the functor arguments, in frame order
    var_tokens: tuple  # the variable token at each rhs position (None for constants)

    @property
    def repeats(self) -> tuple:
        # (position, first position) for variables occurring more than once
        vt = self.var_tokens
        return tuple((p, vt.index(v)) for p, v in enumerate(vt)
                     if v is not None and vt.index(v) != p)


class SyntaxGrammar:
    def __init__(self, rules, typecodes):
        self.rules: list[SyntaxRule] = list(rules)
        self.typecodes = set(typecodes)
        self.by_label = {r.label: r for r in self.rules}
        by_lhs = defaultdict(list)
        for i, r in enumerate(self.rules):
            by_lhs[r.lhs].append(i)
        self.by_lhs = dict(by_lhs)
        self._first = self._first_sets()
        self._predict: dict = {}
        self._cache: dict = {}

    def _first_sets(self) -> dict:
        # terminals that can start each nonterminal; no rule has an empty rhs
        first = {nt: set() for nt in self.by_lhs}
        changed = True
        while changed:
            changed = False
            for r in self.rules:
                s = r.rhs[0]
                add = {s} if isinstance(s, tuple) else first.get(s, set())
                if not add <= first[r.lhs]:
                    first[r.lhs] |= add
                    changed = True
        return first

    def predict(self, nt: str, term) -> list[int]:
        key = (nt, term)
        out = self._predict.get(key)
        if out is None:
            out = []
            for i in self.by_lhs.get(nt, ()):
                s = self.rules[i].rhs[0]
                if s == term or (isinstance(s, str) and term in self._first.get(s, ())):
                    out.append(i)
            self._predict[key] = out
        return out


def build_syntax_grammar(db: Database, provability=("|-",)) -> SyntaxGrammar:
    provability = set(provability)
    rules = []
    typecodes = set()
    for lab in db.order:
        s = db.statements[lab]
        if s.kind == "f":
            typecodes.add(s.typecode)
        if s.kind != "a" or s.typecode in provability:
            continue
        if not s.tokens:
            raise MetamathError("syntax axiom with empty body", lab)
        ftypes = s.ftypes
        rhs, var_tokens, pos = [], [], {}
        for j, t in enumerate(s.tokens):
            if t in db.variables:
                rhs.append(ftypes[t][1])
                var_tokens.append(t)
                pos.setdefault(t, j)
            else:
                rhs.append(("c", t))
                var_tokens.append(None)
        args = tuple(pos[db.statements[h].tokens[0]] for h in s.frame.hyps
                     if db.statements[h].kind == "f")
        rules.append(SyntaxRule(lab, s.typecode, tuple(rhs), args, tuple(var_tokens)))
    for tc in sorted(typecodes):
        rules.append(SyntaxRule(f"${tc}", tc, (("v", tc),), (0,), (None,)))
    return SyntaxGrammar(rules, typecodes)


def _terminal(tok, var_types):
    tc = var_types.get(tok)
    return ("v", tc) if tc is not None else ("c", tok)


def parse_formula(tokens, goal: str, g: SyntaxGrammar, var_types) -> FormulaTerm:
    """Parse ``tokens`` as a ``goal`` expression; ``var_types`` maps variable -> typecode.

    Raises :class:`FormulaParseError` if there is no parse and
    :class:`AmbiguousParse` if there is more than one.
    """
    tokens = tuple(tokens)
    terms = tuple(_terminal(t, var_types) for t in tokens)
    key = (goal, tokens, terms)
    hit = g._cache.get(key)
    if hit is not None:
        return hit
    res = _Earley(g, tokens, terms).parse(goal)
    if len(g._cache) > 200_000:
        g._cache.clear()
    g._cache[key] = res
    return res


class _Earley:
    def __init__(self, g: SyntaxGrammar, tokens, terms):
        self.g = g
        self.tokens = tokens
        self.terms = terms
        self.n = len(tokens)
        # done[(nt, i)] -> set of end positions j with nt =>* tokens[i:j]
        self.done: dict = defaultdict(set)
        # completed rule instances: (rule, i) -> set of ends
        self.rdone: dict = defaultdict(set)

    def recognize(self, goal):
        g, n, terms = self.g, self.n, self.terms
        rules = g.rules
        charts = [dict() for _ in range(n + 1)]   # item -> None, keeps insertion order
        # waiting[(nt, i)] -> items (rule, dot, origin) whose next symbol is nt at i
        waiting: dict = defaultdict(list)
        predicted = [set() for _ in range(n + 1)]

        def predict(nt, i):
            if i >= n or nt in predicted[i]:
                return
            predicted[i].add(nt)
            for r in g.predict(nt, terms[i]):
                agenda_add(i, (r, 0, i))

        def agenda_add(i, item):
            if item not in charts[i]:
                charts[i][item] = None
                queues[i].append(item)

        queues = [[] for _ in range(n + 1)]
        predict(goal, 0)
        for i in range(n + 1):
            q = queues[i]
            k = 0
            while k < len(q):
                r, dot, origin = q[k]
                k += 1
                rhs = rules[r].rhs
                if dot == len(rhs):
                    nt = rules[r].lhs
                    self.rdone[(r, origin)].add(i)
                    if i not in self.done[(nt, origin)]:
                        self.done[(nt, origin)].add(i)
                        for (r2, d2, o2) in list(waiting[(nt, origin)]):
                            agenda_add(i, (r2, d2 + 1, o2))
                    continue
                s = rhs[dot]
                if isinstance(s, tuple):
                    if i < n and terms[i] == s:
                        agenda_add(i + 1, (r, dot + 1, origin))
                else:
                    waiting[(s, i)].append((r, dot, origin))
                    predict(s, i)
                    # completions of s at i already seen (unit/nullable chains)
                    if i in self.done.get((s, i), ()):
                        agenda_add(i, (r, dot + 1, origin))
        return n in self.done.get((goal, 0), ())

    def parse(self, goal):
        if not self.recognize(goal):
            far = max((j for (nt, i), js in self.done.items() for j in js), default=0)
            raise FormulaParseError(f"no parse as {goal}", (0, far))
        trees = self.trees(goal, 0, self.n)
        if len(trees) != 1:
            raise AmbiguousParse(f"ambiguous parse as {goal}", self._ambiguous_span(goal))
        return trees[0]

    def _ambiguous_span(self, goal):
        # narrowest nonterminal span with two derivations
        best = (0, self.n)
        for (nt, i, j), ts in self.memo.items():
            if len(ts) > 1 and j - i < best[1] - best[0]:
                best = (i, j)
        return best

    # derivation enumeration, capped at two per (symbol, span)
    def trees(self, nt, i, j):
        self.memo: dict = {}
        self.active: set = set()
        return self._trees(nt, i, j)

    def _trees(self, nt, i, j):
        key = (nt, i, j)
        got = self.memo.get(key)
        if got is not None:
            return got
        if key in self.active:       # unit-rule cycle: contributes nothing new
            return []
        self.active.add(key)
        out: list = []
        for r in self.g.by_lhs.get(nt, ()):
            if j not in self.rdone.get((r, i), ()):
                continue
            rule = self.g.rules[r]
            for kids in self._splits(rule, 0, i, j):
                if rule.repeats and any(kids[p] is not kids[q] for p, q in rule.repeats):
                    continue
                if rule.label.startswith("$"):
                    t = Var(self.tokens[i])
                else:
                    t = Fn(rule.label, [kids[p] for p in rule.args])
                if t not in out:
                    out.append(t)
                if len(out) > 1:
                    break
            if len(out) > 1:
                break
        self.active.discard(key)
        self.memo[key] = out
        return out

    def _splits(self, rule, k, pos, j):
        rhs = rule.rhs
        if k == len(rhs):
            if pos == j:
                yield {}
            return
        s = rhs[k]
        if isinstance(s, tuple):
            if pos < j and self.terms[pos] == s:
                for rest in self._splits(rule, k + 1, pos + 1, j):
                    yield rest
            return
        # remaining symbols each consume at least one token
        limit = j - (len(rhs) - k - 1)
        ends = sorted(e for e in self.done.get((s, pos), ()) if e <= limit)
        for e in ends:
            subs = self._trees(s, pos, e)
            if not subs:
                continue
            for rest in self._splits(rule, k + 1, e, j):
                for t in subs:
                    d = dict(rest)
                    d[k] = t
                    yield d


def unparse(t: FormulaTerm, g: SyntaxGrammar) -> tuple:
    """Token sequence of a parsed formula (inverse of :func:`parse_formula`)."""
    out = []
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, str):
            out.append(s)
        elif s.__class__ is Var:
            out.append(s.name)
        else:
            rule = g.by_label[s.functor]
            argof = {p: a for p, a in zip(rule.args, s.args)}
            for p in range(len(rule.rhs) - 1, -1, -1):
                sym = rule.rhs[p]
                if isinstance(sym, tuple):
                    stack.append(sym[1])
                elif p in argof:
                    stack.append(argof[p])
                else:
                    # repeated variable: same argument as its first occurrence
                    v = rule.var_tokens[p]
                    first = rule.var_tokens.index(v)
                    stack.append(argof[first])
    return tuple(out)
