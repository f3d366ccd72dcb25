"""Grammar-based compression and reduction of proof grammars."""

from .dag import min_dag
from .metrics import (
    GrammarMetrics, ValMetrics, expanded_sizes, occurrence_counts, ref_counts, save_value,
    save_value_linear, save_values, unfold, users, val_metrics, value_digests,
)
from .nonlinear import GUARDS, nonlinear_compress
from .pipeline import STAGES, PipelineConfig, PipelineResult, StageRecord, run_pipeline
from .prune import MutableGrammar, prune
from .reduce import DigestCollision, mgt_reduce, reachable, rename_references, same_value_reduce
from .treerepair import TreeRePairConfig, recompress_grammar, replace_digrams, roots_of, treerepair
from .treestore import COMPILED

__all__ = [
    "min_dag", "GrammarMetrics", "ValMetrics", "expanded_sizes", "occurrence_counts",
    "ref_counts", "save_value", "save_value_linear", "save_values", "unfold", "users",
    "val_metrics", "value_digests", "GUARDS", "nonlinear_compress", "STAGES",
    "PipelineConfig", "PipelineResult", "StageRecord", "run_pipeline", "MutableGrammar",
    "prune", "DigestCollision", "mgt_reduce", "reachable", "rename_references",
    "same_value_reduce", "TreeRePairConfig", "recompress_grammar", "replace_digrams",
    "roots_of", "treerepair", "COMPILED",
]
