"""Proof decoding and stack-machine replay for Metamath ``$p`` statements."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .database import Database, MetamathError, Statement

__all__ = [
    "ProofError", "decode_numbers", "decode_compressed_proof", "proof_steps",
    "referenced_labels", "replay", "verify_database", "VerifyReport",
]

# step kinds yielded by proof_steps
LABEL, SAVE, REUSE, UNKNOWN = "label", "save", "reuse", "unknown"


class ProofError(MetamathError):
    def __init__(self, msg, label=None, step=None):
        super().__init__(f"{msg}" + (f" (step {step})" if step is not None else ""), label)
        self.step = step


def decode_numbers(letters: str) -> list:
    """Decode a compressed-proof letter stream into integers, 'Z' and '?' markers.

    ``A``-``T`` end a number with digit 1..20; ``U``-``Y`` are leading base-5
    digits 1..5.  So "A" is 1, "T" is 20, "UA" is 21 and "UUA" is 121.
    """
    out: list = []
    num = 0
    pending = False
    for ch in letters:
        if "A" <= ch <= "T":
            out.append(num * 20 + ord(ch) - 64)
            num = 0
            pending = False
        elif "U" <= ch <= "Y":
            num = num * 5 + ord(ch) - 84
            pending = True
        elif ch == "Z":
            if pending or not out or out[-1] in ("Z", "?"):
                raise MetamathError("misplaced Z in compressed proof")
            out.append("Z")
        elif ch == "?":
            if pending:
                raise MetamathError("? inside a compressed number")
            out.append("?")
        else:
            raise MetamathError(f"invalid character {ch!r} in compressed proof")
    if pending:
        raise MetamathError("compressed proof ends inside a number")
    return out


def decode_compressed_proof(stmt: Statement) -> list[tuple]:
    """Step references of a compressed proof.

    Returns ``(kind, payload)`` pairs: ``('label', name)`` for a mandatory
    hypothesis or a listed label, ``('reuse', k)`` for the k-th tagged step
    (0-based), ``('save', None)`` after a step tagged with Z, and
    ``('unknown', None)`` for ``?``.
    """
    toks = stmt.proof
    if not toks or toks[0] != "(":
        raise MetamathError("not a compressed proof", stmt.label)
    try:
        close = toks.index(")")
    except ValueError:
        raise MetamathError("compressed proof label list not closed", stmt.label) from None
    listed = toks[1:close]
    letters = "".join(toks[close + 1:])
    hyps = stmt.frame.hyps
    m, ell = len(hyps), len(listed)
    steps = []
    for n in decode_numbers(letters):
        if n == "Z":
            steps.append((SAVE, None))
        elif n == "?":
            steps.append((UNKNOWN, None))
        elif n <= m:
            steps.append((LABEL, hyps[n - 1]))
        elif n <= m + ell:
            steps.append((LABEL, listed[n - m - 1]))
        else:
            steps.append((REUSE, n - m - ell - 1))
    return steps


def proof_steps(stmt: Statement) -> list[tuple]:
    if stmt.proof is None:
        raise MetamathError("statement has no proof", stmt.label)
    if stmt.compressed:
        return decode_compressed_proof(stmt)
    return [(UNKNOWN, None) if t == "?" else (LABEL, t) for t in stmt.proof]


def referenced_labels(stmt: Statement) -> set:
    """Labels a proof refers to (cheap: no replay)."""
    if stmt.compressed:
        return set(stmt.proof[1:stmt.proof.index(")")]) | set(stmt.frame.hyps)
    return {t for t in stmt.proof if t != "?"}


def _subst(tokens, sub):
    out = []
    for t in tokens:
        r = sub.get(t)
        if r is None:
            out.append(t)
        else:
            out.extend(r)
    return tuple(out)


@dataclass
class ReplayResult:
    conclusion: Optional[tuple]      # (typecode, tokens) or None if incomplete
    value: object = None             # payload of the final stack entry
    incomplete: bool = False
    dv_warnings: list = field(default_factory=list)


def replay(db: Database, stmt: Statement,
           build: Optional[Callable] = None, hyp_value: Optional[Callable] = None) -> ReplayResult:
    """Run the proof of ``stmt`` on a stack machine.

    Stack entries are ``(typecode, tokens, payload)``.  ``hyp_value(label)``
    gives the payload of a hypothesis step; ``build(assertion, popped)``
    computes the payload of an assertion step from the popped entries in
    frame order.  Without callbacks payloads are ``None``.
    """
    label = stmt.label
    steps = proof_steps(stmt)
    stack: list = []
    saved: list = []
    incomplete = False
    dvw: list = []
    scope_hyps = None
    for i, (kind, arg) in enumerate(steps, 1):
        if kind == SAVE:
            if not stack:
                raise ProofError("Z with empty stack", label, i)
            saved.append(stack[-1])
            continue
        if kind == UNKNOWN:
            incomplete = True
            stack.append(None)
            continue
        if kind == REUSE:
            if arg >= len(saved):
                raise ProofError(f"reference to untagged step {arg + 1}", label, i)
            stack.append(saved[arg])
            continue
        s = db.statements.get(arg)
        if s is None or s.index >= stmt.index:
            raise ProofError(f"unknown label {arg!r}", label, i)
        if s.kind in ("f", "e"):
            if scope_hyps is None:
                scope_hyps = _active_hyps(db, stmt)
            if arg not in scope_hyps:
                raise ProofError(f"hypothesis {arg!r} not in scope", label, i)
            stack.append((s.typecode, s.tokens, hyp_value(s) if hyp_value else None))
            continue
        frame = s.frame
        n = len(frame.hyps)
        if len(stack) < n:
            raise ProofError(f"stack underflow applying {arg}", label, i)
        popped = stack[len(stack) - n:] if n else []
        del stack[len(stack) - n:]
        if any(e is None for e in popped):
            incomplete = True
            stack.append(None)
            continue
        sub: dict = {}
        for h, e in zip(frame.hyps, popped):
            hs = db.statements[h]
            if hs.kind == "f":
                if e[0] != hs.typecode:
                    raise ProofError(
                        f"typecode mismatch for {h} in {arg}: {e[0]} vs {hs.typecode}", label, i)
                sub[hs.tokens[0]] = e[1]
        for h, e in zip(frame.hyps, popped):
            hs = db.statements[h]
            if hs.kind == "e":
                want = _subst(hs.tokens, sub)
                if e[0] != hs.typecode or e[1] != want:
                    raise ProofError(f"substitution mismatch for {h} in {arg}", label, i)
        for pair in frame.dvs:
            x, y = tuple(pair)
            vx = {t for t in sub.get(x, ()) if t in db.variables}
            vy = {t for t in sub.get(y, ()) if t in db.variables}
            for a in vx:
                for b in vy:
                    if a == b or frozenset((a, b)) not in stmt.all_dvs:
                        dvw.append((i, arg, a, b))
        payload = build(s, popped) if build else None
        stack.append((s.typecode, _subst(s.tokens, sub), payload))
    if incomplete:
        return ReplayResult(None, None, True, dvw)
    if len(stack) != 1:
        raise ProofError(f"{'empty stack' if not stack else 'stack residue'} at end of proof",
                         label)
    top = stack[0]
    if top[0] != stmt.typecode or top[1] != stmt.tokens:
        raise ProofError("proved formula differs from the statement", label)
    return ReplayResult((top[0], top[1]), top[2], False, dvw)


def _active_hyps(db: Database, stmt: Statement) -> set:
    # hypotheses visible at stmt: its $f context plus $e in its frame or scope
    out = {lab for lab, _ in stmt.ftypes.values()}
    out.update(stmt.frame.hyps)
    return out


@dataclass
class VerifyReport:
    checked: int = 0
    errors: dict = field(default_factory=dict)       # label -> message
    incomplete: list = field(default_factory=list)
    dv_warnings: dict = field(default_factory=dict)  # label -> list

    @property
    def ok(self) -> bool:
        return not self.errors


def verify_database(db: Database, dv_errors: bool = False) -> VerifyReport:
    """Replay every ``$p``; ``dv_errors`` turns $d warnings into errors."""
    rep = VerifyReport()
    for s in db.assertions():
        if s.kind != "p":
            continue
        rep.checked += 1
        try:
            r = replay(db, s)
        except MetamathError as e:
            rep.errors[s.label] = str(e)
            continue
        if r.incomplete:
            rep.incomplete.append(s.label)
        if r.dv_warnings:
            rep.dv_warnings[s.label] = r.dv_warnings
            if dv_errors:
                rep.errors[s.label] = f"disjoint-variable violation: {r.dv_warnings[0]}"
    return rep
