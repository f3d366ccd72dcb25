"""Staged compression pipeline with per-stage size and value checks."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

from ..terms import Clause, ProofGrammar, ProofTerm
from .dag import min_dag
from .metrics import GrammarMetrics
from .nonlinear import nonlinear_compress
from .prune import prune
from .reduce import mgt_reduce, same_value_reduce
from .treerepair import replace_digrams, roots_of

__all__ = ["PipelineConfig", "StageRecord", "PipelineResult", "run_pipeline", "STAGES"]

STAGES = ("treerepair", "prune", "nonlinear", "samevalue", "mgtreduce")
# stages after which protected values must be unchanged
_VALUE_PRESERVING = {"dag", "treerepair", "prune", "nonlinear", "samevalue"}


@dataclass
class PipelineConfig:
    min_occurrences: int = 2
    arity_cap: int = 0
    guard: Optional[str] = None       # default: mgt-subsumes with a base, else none
    edge_budget: int = 10 ** 5
    match_mode: str = "mod-permutation"
    prefix: str = "t"


@dataclass
class StageRecord:
    stage: str
    size: int
    productions: int
    values_preserved: Optional[bool]
    seconds: float


@dataclass
class PipelineResult:
    grammar: ProofGrammar
    stages: list = field(default_factory=list)

    @property
    def monotone(self) -> bool:
        sizes = [s.size for s in self.stages]
        return all(a >= b for a, b in zip(sizes, sizes[1:]))


def _digests(G: ProofGrammar, names) -> dict:
    gm = GrammarMetrics(G)
    return {n: gm.digest(n) for n in names if n in G}


def run_pipeline(input: Union[ProofGrammar, Mapping[str, ProofTerm], Sequence[ProofTerm]],
                 stages: Iterable[str] = STAGES, protected: Optional[Iterable[str]] = None,
                 base: Optional[Mapping[str, Clause]] = None,
                 theorems: Optional[Mapping[str, Clause]] = None,
                 cfg: Optional[PipelineConfig] = None) -> PipelineResult:
    """Run the named stages in order, recording size and value preservation.

    Ground terms are first turned into their minimal DAG (stage ``dag``).
    ``protected`` defaults to the start productions.
    """
    cfg = cfg or PipelineConfig()
    res = PipelineResult(None)
    t0 = time.perf_counter()
    if isinstance(input, ProofGrammar):
        G = input
        if protected is None:
            protected = roots_of(G)
    else:
        G = min_dag(input)
        if protected is None:
            protected = G.nonterminals[-len(input):] if len(input) else []
        res.stages.append(StageRecord("dag", G.size, len(G), True, time.perf_counter() - t0))
    protected = set(protected)
    guard = cfg.guard or ("mgt-subsumes" if base is not None and theorems else "none")
    ref = _digests(G, protected)
    for st in stages:
        t0 = time.perf_counter()
        if st == "treerepair":
            G = replace_digrams(G, cfg.min_occurrences, cfg.arity_cap, cfg.prefix)
        elif st == "prune":
            G = prune(G, protected)
        elif st == "nonlinear":
            G = nonlinear_compress(G, protected, guard=guard, base=base, theorems=theorems,
                                   prefix="n")
        elif st == "samevalue":
            G = same_value_reduce(G, protected, cfg.edge_budget)
        elif st == "mgtreduce":
            if base is None:
                raise ValueError("mgtreduce needs a presupposition base")
            G = mgt_reduce(G, base, protected, cfg.match_mode)
        else:
            raise ValueError(f"unknown pipeline stage {st!r}; expected one of {STAGES}")
        kept = None
        if st in _VALUE_PRESERVING:
            kept = _digests(G, protected) == ref
        res.stages.append(StageRecord(st, G.size, len(G), kept, time.perf_counter() - t0))
    res.grammar = G
    return res
