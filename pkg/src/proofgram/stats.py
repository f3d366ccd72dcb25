"""Structural statistics of knowledge bases and formula overlap between KBs.

Distributions are summarized by minimum, lower median, mean rounded half to
even, and maximum.  All size-like values are exact integers.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from .terms import KB, Clause, Fn, ProofGrammar, clause_metrics, is_linear, param_occurrences
from .unify import is_variant, match_clause

__all__ = [
    "Summary", "summarize", "KbStats", "kb_stats", "kb_from_grammar", "Overlap", "compare_kb",
    "FormulaIndex", "duplicate_share", "subsumed_share", "sci", "write_stats_csv",
]


# ---------------------------------------------------------------------------
# aggregation

@dataclass(frozen=True)
class Summary:
    n: int = 0
    min: int = 0
    median: int = 0
    mean: int = 0
    max: int = 0


def summarize(values: Iterable[int]) -> Summary:
    """Min, lower median, mean rounded half to even, max; zeros when empty."""
    xs = sorted(values)
    if not xs:
        return Summary()
    return Summary(len(xs), xs[0], xs[(len(xs) - 1) // 2], round(Fraction(sum(xs), len(xs))),
                   xs[-1])


def _pct(k: int, n: int) -> float:
    return 100.0 * k / n if n else 0.0


def sci(n: int, digits: int = 3, threshold: int = 10 ** 9) -> str:
    """Render an integer exactly below ``threshold``, else as ``m×10^e``.

    The mantissa keeps ``digits`` significant digits (rounded half to even,
    trailing zeros dropped).  Works for integers too large for ``str``.
    """
    if abs(n) < threshold:
        return str(n)
    sign = "-" if n < 0 else ""
    n = abs(n)
    e = int((n.bit_length() - 1) * math.log10(2))
    while 10 ** (e + 1) <= n:
        e += 1
    while 10 ** e > n:
        e -= 1
    q = Fraction(n, 10 ** (e - digits + 1))
    m = round(q)
    if m >= 10 ** digits:
        m = round(Fraction(m, 10))
        e += 1
    s = str(m)
    mant = (s[0] + "." + s[1:]).rstrip("0").rstrip(".")
    return f"{sign}{mant}×10^{e}"


# ---------------------------------------------------------------------------
# formula comparison modulo renaming and body permutation

def _shape(t) -> tuple:
    # term skeleton with every variable replaced by one marker
    if t.__class__ is Fn:
        return (t.functor, tuple(_shape(a) for a in t.args))
    return ()


def _variant_key(F: Clause) -> tuple:
    return (len(F.body), _shape(F.head), tuple(sorted(_shape(b) for b in F.body)))


class FormulaIndex:
    """Set of clauses queried for variants modulo body permutation."""

    def __init__(self, clauses: Iterable[Clause] = ()):
        self._buckets: dict = {}
        for F in clauses:
            self.add(F)

    def find(self, F: Clause) -> Optional[Clause]:
        for G in self._buckets.get(_variant_key(F), ()):
            if is_variant(F, G, "mod-permutation"):
                return G
        return None

    def add(self, F: Clause) -> bool:
        """Insert F unless a variant is present; return whether it was new."""
        if self.find(F) is not None:
            return False
        self._buckets.setdefault(_variant_key(F), []).append(F)
        return True

    def __contains__(self, F: Clause) -> bool:
        return self.find(F) is not None


def duplicate_share(clauses: Sequence[Clause]) -> float:
    """Percentage removed when keeping one copy per variant class."""
    idx = FormulaIndex()
    kept = sum(1 for F in clauses if idx.add(F))
    return _pct(len(clauses) - kept, len(clauses))


def _head_top(t):
    return (t.functor, len(t.args)) if t.__class__ is Fn else None


def subsumed_share(clauses: Sequence[Clause]) -> float:
    """Percentage removed by deleting strictly subsumed members, then duplicates.

    Subsumption is modulo body permutation between clauses of equal body
    length.
    """
    by_top: dict = {}
    for i, F in enumerate(clauses):
        by_top.setdefault((len(F.body), _head_top(F.head)), []).append(i)
    survivors = []
    for i, F in enumerate(clauses):
        n = len(F.body)
        cands = by_top.get((n, _head_top(F.head)), [])
        if _head_top(F.head) is not None:
            cands = cands + by_top.get((n, None), [])
        strict = False
        for j in cands:
            if j == i:
                continue
            m = match_clause(F, clauses[j], "mod-permutation")
            if m.instance is not None and m.strict:
                strict = True
                break
        if not strict:
            survivors.append(F)
    idx = FormulaIndex()
    kept = sum(1 for F in survivors if idx.add(F))
    return _pct(len(clauses) - kept, len(clauses))


# ---------------------------------------------------------------------------
# KB statistics

@dataclass
class KbStats:
    size: int = 0
    productions: int = 0
    ref: Summary = Summary()
    ref_sum: int = 0
    ref0: float = 0.0
    ref1: float = 0.0
    prod_size: Summary = Summary()
    val_size: Summary = Summary()
    sav: Summary = Summary()
    sav_neg: float = 0.0
    sav_zero: float = 0.0
    arity: Summary = Summary()
    arity0: float = 0.0
    nl: float = 0.0
    voccs: Summary = Summary()
    vmult: Summary = Summary()
    clause_size: Optional[Summary] = None
    clause_height: Optional[Summary] = None
    strict_mgt: Optional[float] = None
    duplicates: Optional[float] = None
    subsumed: Optional[float] = None
    notes: dict = field(default_factory=dict)

    def rows(self) -> list:
        """(metric, Summary | None, extra) rows for CSV export."""
        def f(x):
            return f"{x:.2f}%"
        rows = [
            ("G", None, f"size={self.size}"),
            ("N", None, f"productions={self.productions}"),
            ("ref", self.ref, f"sum={self.ref_sum};zero={f(self.ref0)};one={f(self.ref1)}"),
            ("prod_size", self.prod_size, ""),
            ("val_size", self.val_size, ""),
            ("sav", self.sav, f"neg={f(self.sav_neg)};zero={f(self.sav_zero)}"),
            ("arity", self.arity, f"zero={f(self.arity0)}"),
            ("nl", None, f(self.nl)),
            ("voccs", self.voccs, ""),
            ("vmult", self.vmult, ""),
        ]
        if self.clause_size is not None:
            rows.append(("clause_size", self.clause_size, ""))
            rows.append(("clause_height", self.clause_height, ""))
        for name in ("strict_mgt", "duplicates", "subsumed"):
            v = getattr(self, name)
            if v is not None:
                rows.append((name, None, f(v)))
        return rows


def kb_from_grammar(G: ProofGrammar, base: Mapping[str, Clause],
                    stated: Optional[Mapping[str, Clause]] = None) -> KB:
    """KB over G using ``stated`` clauses where given and grammar-MGTs elsewhere."""
    from .cddc import grammar_mgt
    gm = grammar_mgt(G, base, refined=True)
    stated = stated or {}
    theorems = []
    for p in G.productions:
        F = stated.get(p.nonterminal, gm[p.nonterminal])
        if F is None:
            raise ValueError(f"grammar-MGT of {p.nonterminal} is undefined")
        theorems.append(F)
    return KB(dict(base), tuple(theorems), G)


def kb_stats(K: Union[KB, ProofGrammar], clause_stats: bool = True) -> KbStats:
    """All grammar and clause statistics of a KB (or of a bare grammar)."""
    from .compress.metrics import GrammarMetrics, ref_counts, save_values
    G = K.grammar if isinstance(K, KB) else K
    st = KbStats(size=G.size, productions=len(G))
    n = len(G)
    if n:
        refs = ref_counts(G)
        gm = GrammarMetrics(G)
        sav = save_values(G)
        ref_vals = [refs[p] for p in G.nonterminals]
        st.ref = summarize(ref_vals)
        st.ref_sum = sum(ref_vals)
        st.ref0 = _pct(ref_vals.count(0), n)
        st.ref1 = _pct(ref_vals.count(1), n)
        st.prod_size = summarize(p.size for p in G.productions)
        st.val_size = summarize(gm.size(p) for p in G.nonterminals)
        used = [sav[p] for p in G.nonterminals if refs[p] > 0]
        st.sav = summarize(used)
        st.sav_neg = _pct(sum(1 for s in used if s < 0), len(used))
        st.sav_zero = _pct(sum(1 for s in used if s == 0), len(used))
        ar = [p.arity for p in G.productions]
        st.arity = summarize(ar)
        st.arity0 = _pct(ar.count(0), n)
        st.nl = _pct(sum(1 for p in G.productions if not is_linear(p.rhs)), n)
        voccs, vmult = [], []
        for p in G.productions:
            occ = param_occurrences(p.rhs)
            vm = gm.vmult(p.nonterminal)
            for i in range(1, p.arity + 1):
                voccs.append(occ.get(i, 0))
                vmult.append(vm[i - 1])
        st.voccs = summarize(voccs)
        st.vmult = summarize(vmult)
    if isinstance(K, KB) and clause_stats:
        ms = [clause_metrics(F) for F in K.theorems]
        st.clause_size = summarize(m[0] for m in ms)
        st.clause_height = summarize(m[1] for m in ms)
        from .cddc import kb_verify
        st.strict_mgt = 100.0 * kb_verify(K).strict_fraction
        st.duplicates = duplicate_share(K.theorems)
        st.subsumed = subsumed_share(K.theorems)
    return st


def write_stats_csv(out, st: KbStats, header: Iterable[str] = ()) -> None:
    """One row per statistic: metric,min,median,mean,max,extra."""
    for h in header:
        out.write(f"# {h}\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["metric", "min", "median", "mean", "max", "extra"])
    for name, s, extra in st.rows():
        if s is None:
            w.writerow([name, "", "", "", "", extra])
        else:
            w.writerow([name, sci(s.min), sci(s.median), sci(s.mean), sci(s.max), extra])


# ---------------------------------------------------------------------------
# KB-to-KB overlap

@dataclass(frozen=True)
class Overlap:
    matched: int
    total: int

    @property
    def percent(self) -> float:
        return _pct(self.matched, self.total)


def compare_kb(K: KB, reference: Union[KB, Iterable[Clause]],
               exclude: Optional[Iterable[str]] = None) -> Overlap:
    """Share of K's theorem clauses that are variants of a reference formula.

    Comparison is modulo renaming and body permutation.  Top-level
    nonterminals (``exclude``; by default those never referenced) are left
    out of the count.  A reference KB contributes its base and theorems.
    """
    from .compress.treerepair import roots_of
    if isinstance(reference, KB):
        ref_clauses = list(reference.base.values()) + list(reference.theorems)
    else:
        ref_clauses = list(reference)
    idx = FormulaIndex(ref_clauses)
    skip = set(roots_of(K.grammar) if exclude is None else exclude)
    total = matched = 0
    for p, F in zip(K.grammar.productions, K.theorems):
        if p.nonterminal in skip:
            continue
        total += 1
        if F in idx:
            matched += 1
    return Overlap(matched, total)
