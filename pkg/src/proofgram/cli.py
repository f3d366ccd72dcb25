"""Command-line interface.

Exit status: 0 success, 1 verification violations, 2 input errors,
3 internal invariant failures.  Errors are also reported on stderr as one
JSON record.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import __version__
from .config import Config, ConfigError, load_config_text, output_header

__all__ = ["main", "run", "build_parser"]

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


class InternalError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# helpers

class _Out:
    """Text sink for a file path, or stdout when no path is given."""

    def __init__(self, path: Optional[str], stdout):
        self.path = path
        self.stdout = stdout

    def __enter__(self):
        self.f = open(self.path, "w", encoding="utf-8", newline="") if self.path else self.stdout
        return self.f

    def __exit__(self, *exc):
        if self.path:
            self.f.close()


def _header(out, lines):
    for h in lines:
        out.write(f"# {h}\n")


def _read_kb_doc(path):
    from .pgt import read_pgt
    return read_pgt(path)


def _protected(cfg: Config, G, flag: Optional[str]) -> list:
    from .compress import roots_of
    names = Config.split(flag if flag is not None else cfg.protect)
    missing = [n for n in names if n not in G]
    if missing:
        raise ValueError(f"unknown protected nonterminals: {', '.join(missing[:5])}")
    return names or roots_of(G)


def _clauses_for(G, base, stated: dict) -> list:
    """Stated clause where present, else grammar-MGT (None if undefined or no base)."""
    if base:
        from .cddc import grammar_mgt
        gm = grammar_mgt(G, base, refined=True)
    else:
        gm = {}
    return [stated.get(n, gm.get(n)) for n in G.nonterminals]


def _guard(cfg: Config, has_base: bool) -> str:
    if cfg.guard == "auto":
        return "mgt-subsumes" if has_base else "none"
    return cfg.guard


# ---------------------------------------------------------------------------
# subcommands

def cmd_parse(a, cfg, stdout):
    from .metamath import mm_read, verify_database
    db = mm_read(a.db)
    rep = verify_database(db, dv_errors=a.dv_errors)
    with _Out(a.out, stdout) as out:
        _header(out, output_header(cfg, "parse", [a.db]))
        out.write(f"statements {len(db.statements)}\n")
        out.write(f"proofs-checked {rep.checked}\n")
        out.write(f"incomplete {len(rep.incomplete)}\n")
        out.write(f"dv-warnings {len(rep.dv_warnings)}\n")
        out.write(f"errors {len(rep.errors)}\n")
        for label, msg in rep.errors.items():
            out.write(f"error {label}: {msg}\n")
    return EXIT_OK if rep.ok else EXIT_VIOLATION


def cmd_extract(a, cfg, stdout):
    from .metamath import extract_kb, mm_read
    from .pgt import write_pgt
    db = mm_read(a.db)
    roots = Config.split(a.roots) if a.roots else None
    warnings: list = []
    K = extract_kb(db, roots=roots, provability=Config.split(cfg.provability),
                   end_label=cfg.end_label or None, exclude=Config.split(cfg.exclude),
                   warnings=warnings)
    hdr = output_header(cfg, "extract", [a.db])
    hdr += [f"roots {','.join(roots) if roots else '*'}",
            f"productions {len(K.grammar)} size {K.grammar.size}",
            f"dv-restricted {len(warnings)}"]
    with _Out(a.out, stdout) as out:
        write_pgt(out, K.base, K.grammar, K.theorems, hdr)
    return EXIT_OK


def cmd_verify_kb(a, cfg, stdout):
    from .cddc import kb_verify
    K = _read_kb_doc(a.kb).kb()
    rep = kb_verify(K, chain=a.chain, mode=a.mode, edge_budget=cfg.edge_budget)
    with _Out(a.out, stdout) as out:
        _header(out, output_header(cfg, "verify-kb", [a.kb]))
        for st in ("ok", "strict-instance", "violation", "undefined"):
            out.write(f"{st} {rep.count(st)}\n")
        out.write(f"strict-fraction {100 * rep.strict_fraction:.2f}%\n")
        for n in rep.violations:
            out.write(f"violation {n} {rep.status[n]}\n")
        for n, what in rep.chain_violations:
            out.write(f"chain-violation {n} {what}\n")
        if a.chain:
            out.write(f"chain-skipped {len(rep.chain_skipped)}\n")
    return EXIT_OK if rep.ok else EXIT_VIOLATION


def cmd_stats(a, cfg, stdout):
    from .stats import kb_stats, write_stats_csv
    doc = _read_kb_doc(a.kb)
    K = doc.kb() if doc.is_kb and doc.productions else doc.grammar
    st = kb_stats(K, clause_stats=not a.no_clauses)
    with _Out(a.csv, stdout) as out:
        write_stats_csv(out, st, output_header(cfg, "stats", [a.kb]))
    return EXIT_OK


def cmd_expand(a, cfg, stdout):
    from .compress import GrammarMetrics
    from .terms import expand
    G = _read_kb_doc(a.kb).grammar
    names = Config.split(a.roots) if a.roots else _protected(cfg, G, None)
    gm = GrammarMetrics(G)
    memo: dict = {}
    with _Out(a.out, stdout) as out:
        _header(out, output_header(cfg, "expand", [a.kb]))
        for n in names:
            if n not in G:
                raise ValueError(f"unknown nonterminal {n!r}")
            size = gm.size(n)
            if size <= cfg.edge_budget:
                out.write(f"{n} size {size} : {expand(G, G[n].lhs, memo)!r}\n")
            else:
                out.write(f"{n} size {size}\n")
    return EXIT_OK


def cmd_compress(a, cfg, stdout):
    from .compress import PipelineConfig, run_pipeline
    from .pgt import write_pgt
    from .terms import value
    doc = _read_kb_doc(a.kb)
    G = doc.grammar
    protected = _protected(cfg, G, None)
    stated = {p.nonterminal: F for p, F in zip(doc.productions, doc.clauses) if F is not None}
    base = doc.base or None
    inp = G
    if a.expand:
        memo: dict = {}
        vals = {}
        for n in protected:
            if G[n].arity:
                raise ValueError(f"--expand needs arity-0 protected nonterminals; {n} has "
                                 f"arity {G[n].arity}")
            vals[n] = value(G, n, memo)
        inp = vals
    stages = Config.split(cfg.pipeline)
    pcfg = PipelineConfig(min_occurrences=cfg.min_occurrences, arity_cap=cfg.arity_cap,
                          guard=_guard(cfg, base is not None), edge_budget=cfg.edge_budget,
                          match_mode=cfg.match_mode)
    theorems = {n: stated[n] for n in protected if n in stated}
    res = run_pipeline(inp, stages, protected, base=base, theorems=theorems, cfg=pcfg)
    for s in res.stages:
        if s.values_preserved is False:
            raise InternalError(f"stage {s.stage} changed a protected value")
    hdr = output_header(cfg, "compress", [a.kb])
    hdr += [f"stage {s.stage} size {s.size} productions {s.productions}"
            f" values {'-' if s.values_preserved is None else s.values_preserved}"
            for s in res.stages]
    out_G = res.grammar
    with _Out(a.out, stdout) as out:
        write_pgt(out, base, out_G, _clauses_for(out_G, base, stated), hdr)
    return EXIT_OK


def cmd_recompress(a, cfg, stdout):
    from .compress import TreeRePairConfig, recompress_grammar
    from .pgt import write_pgt
    doc = _read_kb_doc(a.kb)
    G = doc.grammar
    stated = {p.nonterminal: F for p, F in zip(doc.productions, doc.clauses) if F is not None}
    base = doc.base or None
    tcfg = TreeRePairConfig(cfg.min_occurrences, cfg.arity_cap, True, "lemma")
    G2 = recompress_grammar(G, tcfg, base=base, theorems=stated,
                            nonlinear=not a.no_nonlinear, guard=_guard(cfg, base is not None))
    hdr = output_header(cfg, "recompress", [a.kb])
    hdr += [f"input size {G.size} productions {len(G)}",
            f"output size {G2.size} productions {len(G2)}"]
    with _Out(a.out, stdout) as out:
        write_pgt(out, base, G2, _clauses_for(G2, base, stated), hdr)
    return EXIT_OK


def cmd_pdnet(a, cfg, stdout):
    from .pdnet import build_pdnet, fit_power_law, write_ccdf_csv, write_edges_tsv
    G = _read_kb_doc(a.kb).grammar
    net = build_pdnet(G)
    hdr = output_header(cfg, "pdnet", [a.kb])
    deg = list(net.in_degree().values())
    fit = None
    if a.fit:
        kmin = cfg.kmin if cfg.kmin == "auto" else int(cfg.kmin)
        fit = fit_power_law(deg, kmin, cfg.fit_method)
    with _Out(a.out, stdout) as out:
        _header(out, hdr)
        out.write(f"nodes {len(net.nodes)}\nedges {net.edge_count}\n")
        if fit is not None:
            out.write(f"alpha {fit.alpha:.4f}\nkmin {fit.kmin}\nks {fit.ks:.4f}\n"
                      f"tail {fit.n_tail}\nzero-degree {fit.n_zero}\n"
                      f"degenerate {fit.degenerate}\n")
    if a.edges:
        with open(a.edges, "w", encoding="utf-8") as f:
            write_edges_tsv(f, net, hdr)
    if a.ccdf:
        with open(a.ccdf, "w", encoding="utf-8", newline="") as f:
            write_ccdf_csv(f, deg, fit, hdr)
    return EXIT_OK


def cmd_compare(a, cfg, stdout):
    from .stats import compare_kb
    A = _read_kb_doc(a.kb_a).kb()
    B = _read_kb_doc(a.kb_b).kb()
    excl = Config.split(a.skip) if a.skip is not None else None
    ov = compare_kb(A, B, exclude=excl)
    with _Out(a.out, stdout) as out:
        _header(out, output_header(cfg, "compare", [a.kb_a, a.kb_b]))
        out.write(f"matched {ov.matched}\ntotal {ov.total}\noverlap {ov.percent:.2f}%\n")
    return EXIT_OK


def cmd_lemmas(a, cfg, stdout):
    from .cddc import grammar_mgt
    from .compress import ref_counts, save_values
    from .pgt import format_clause
    doc = _read_kb_doc(a.kb)
    G = doc.grammar
    stated = {p.nonterminal: F for p, F in zip(doc.productions, doc.clauses) if F is not None}
    gm = grammar_mgt(G, doc.base, refined=True) if doc.base else {}
    sav = save_values(G)
    refs = ref_counts(G)
    names = [n for n in G.nonterminals if refs[n] > 0]
    if a.prefix:
        names = [n for n in names if n.startswith(a.prefix)]
    pos = {n: i for i, n in enumerate(G.nonterminals)}
    names.sort(key=lambda n: (-sav[n], pos[n]))
    with _Out(a.out, stdout) as out:
        _header(out, output_header(cfg, "lemmas", [a.kb]))
        for n in names[:a.top]:
            F = stated.get(n) or gm.get(n)
            out.write(f"{n}({G[n].arity}) save-value {sav[n]} proof-term-size {G[n].size} "
                      f"ref {refs[n]} -> {G[n].rhs!r}\n")
            out.write(f"  {format_clause(F) if F is not None else '(no clause)'}\n")
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="proofgram", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"proofgram {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("configuration (overrides --config)")
    g.add_argument("--config", help="key = value configuration file")
    defaults = Config()
    for k in Config.keys():
        g.add_argument(f"--{k.replace('_', '-')}", dest=f"cfg_{k}", default=None,
                       metavar="V", help=f"default: {getattr(defaults, k)!r}")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help):
        p = sub.add_parser(name, help=help, parents=[common])
        p.set_defaults(fn=fn)
        p.add_argument("--out", "-o", help="output file (default stdout)")
        return p

    p = add("parse", cmd_parse, "parse and verify a Metamath database")
    p.add_argument("db")
    p.add_argument("--dv-errors", action="store_true", help="treat $d violations as errors")
    p = add("extract", cmd_extract, "extract a KB from a Metamath database")
    p.add_argument("db")
    p.add_argument("--roots", help="comma-separated theorem labels (closure root set)")
    p = add("verify-kb", cmd_verify_kb, "check theorems against shallow-MGTs")
    p.add_argument("kb")
    p.add_argument("--chain", action="store_true", help="also check the MGT instance chain")
    p.add_argument("--mode", default="ordered", choices=("ordered", "mod-permutation"))
    p = add("stats", cmd_stats, "KB statistics as CSV")
    p.add_argument("kb")
    p.add_argument("--csv", help="CSV output file (default stdout)")
    p.add_argument("--no-clauses", action="store_true", help="skip clause statistics")
    p = add("expand", cmd_expand, "print values within the edge budget, else their sizes")
    p.add_argument("kb")
    p.add_argument("--roots", help="comma-separated nonterminals (default: protected)")
    p = add("compress", cmd_compress, "run the compression pipeline")
    p.add_argument("kb")
    p.add_argument("--expand", action="store_true",
                   help="start from the minimal DAG of the protected values")
    p = add("recompress", cmd_recompress, "compress all RHSs jointly, adding lemmas")
    p.add_argument("kb")
    p.add_argument("--no-nonlinear", action="store_true")
    p = add("pdnet", cmd_pdnet, "proof dependency network and power-law fit")
    p.add_argument("kb")
    p.add_argument("--edges", help="edge list TSV output")
    p.add_argument("--ccdf", help="CCDF CSV output")
    p.add_argument("--fit", action="store_true", help="fit a power law to in-degrees")
    p = add("compare", cmd_compare, "formula overlap of KB A with KB B")
    p.add_argument("kb_a")
    p.add_argument("kb_b")
    p.add_argument("--skip", help="nonterminals of A left out (default: unreferenced)")
    p = add("lemmas", cmd_lemmas, "top nonterminals by save-value")
    p.add_argument("kb")
    p.add_argument("--top", type=int, default=20)
    p.add_argument("--prefix", help="only nonterminals with this name prefix")
    return ap


def _error(stderr, code: int, exc: BaseException) -> int:
    rec = {"error": type(exc).__name__, "message": str(exc), "exit": code}
    label = getattr(exc, "label", None)
    if label:
        rec["label"] = label
    stderr.write(json.dumps(rec, sort_keys=True) + "\n")
    return code


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    """Run one command; returns the exit status."""
    from .compress import DigestCollision
    from .metamath import MetamathError
    from .pdnet import InsufficientData
    from .pgt import PgtError
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_INPUT
    try:
        cfg = Config()
        if a.config:
            with open(a.config, encoding="utf-8") as f:
                cfg.update(load_config_text(f.read()))
        cfg.update({k: getattr(a, f"cfg_{k}") for k in Config.keys()})
        return a.fn(a, cfg, stdout)
    except (DigestCollision, InternalError, AssertionError) as exc:
        return _error(stderr, EXIT_INTERNAL, exc)
    except (OSError, ConfigError, MetamathError, PgtError, InsufficientData, ValueError,
            KeyError, RecursionError) as exc:
        return _error(stderr, EXIT_INPUT, exc)
    except Exception as exc:  # noqa: BLE001 - anything else is a bug
        return _error(stderr, EXIT_INTERNAL, exc)


def main() -> None:
    sys.exit(run())
