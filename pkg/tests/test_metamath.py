import pytest

from helpers import C, T
from proofgram.cddc import kb_verify, mgt
from proofgram.metamath import (
    AmbiguousParse, FormulaParseError, MetamathError, ProofError, build_syntax_grammar,
    decode_compressed_proof, decode_numbers, dependency_closure, extract_kb, mm_parse,
    parse_formula, present, replay, unparse, verify_database,
)
from proofgram.terms import Fn, Var, validate_grammar

HEADER = """
$c ( ) -> wff |- $.
$v ph ps ch $.
wph $f wff ph $.
wps $f wff ps $.
wch $f wff ch $.
wi $a wff ( ph -> ps ) $.
${ min $e |- ph $.  maj $e |- ( ph -> ps ) $.  ax-mp $a |- ps $. $}
ax-1 $a |- ( ph -> ( ps -> ph ) ) $.
"""

ID_NORMAL = "wph wph wph wi wph wph wph ax-1 wph wph wph wi ax-1 mpd"


def decompress(db, stmt):
    """Normal-format label list of a compressed proof (subproofs inlined)."""
    steps = decode_compressed_proof(stmt)
    out, saved, extent = [], [], []
    for kind, payload in steps:
        if kind == "save":
            saved.append(extent[-1])
            continue
        if kind == "reuse":
            sub = saved[payload]
        else:
            s = db[payload]
            n = len(s.frame.hyps) if s.is_assertion else 0
            sub = []
            for e in extent[len(extent) - n:]:
                sub.extend(e)
            del extent[len(extent) - n:]
            sub = sub + [payload]
        extent.append(sub)
    assert len(extent) == 1
    return extent[0]


class TestDatabase:
    def test_toy_counts(self, toy_db):
        assert len([s for s in toy_db.assertions() if s.kind == "p"]) == 11
        assert toy_db["ax-mp"].frame.e_hyps == ("min", "maj")
        assert toy_db["ax-mp"].frame.hyps == ("wph", "wps", "min", "maj")

    def test_minimal_database(self):
        db = mm_parse("$c wff |- $. $v ph $. wph $f wff ph $.\n"
                      "ax $a |- ph $.\nth $p |- ph $= wph ax $.\n")
        assert [s.label for s in db.assertions()] == ["ax", "th"]
        assert verify_database(db).ok

    def test_bytes_input(self):
        db = mm_parse(b"$c wff $. $v ph $. wph $f wff ph $.")
        assert "wph" in db

    @pytest.mark.parametrize("text", [
        "$c a $. ${ $c b $.",
        "$c a $. $}",
        "$( unterminated",
        "$[ other.mm $]",
        "$c a $. $c a $.",
        "$c a $. x $a a b $.",
        "$c a $. $v x $. f1 $f a x $. f1 $f a x $.",
    ])
    def test_malformed(self, text):
        with pytest.raises(MetamathError):
            mm_parse(text)


class TestCompressedDecoding:
    @pytest.mark.parametrize("letters,want", [
        ("A", [1]), ("T", [20]), ("UA", [21]), ("UUA", [121]), ("YT", [120]),
        ("ABZC", [1, 2, "Z", 3]), ("A?B", [1, "?", 2]),
    ])
    def test_numbers(self, letters, want):
        assert decode_numbers(letters) == want

    @pytest.mark.parametrize("letters", ["U", "ZA", "AZZ", "a", "U?"])
    def test_malformed(self, letters):
        with pytest.raises(MetamathError):
            decode_numbers(letters)

    def test_steps_of_id(self, toy_db):
        steps = decode_compressed_proof(toy_db["id"])
        assert steps[:5] == [("label", "wph")] * 3 + [("label", "wi"), ("save", None)]
        assert ("reuse", 0) in steps

    def test_matches_hand_written_normal_proof(self, toy_db):
        assert " ".join(decompress(toy_db, toy_db["id"])) == ID_NORMAL

    def test_compressed_and_normal_replay_agree(self, toy_db, toy_path):
        text = open(toy_path).read()
        compressed = [s for s in toy_db.assertions() if s.kind == "p" and s.compressed]
        assert len(compressed) >= 2
        for s in compressed:
            proof = " ".join(s.proof)
            text = text.replace(proof, " ".join(decompress(toy_db, s)))
        db2 = mm_parse(text)
        assert verify_database(db2).ok
        for s in compressed:
            assert not db2[s.label].compressed
            assert replay(db2, db2[s.label]).conclusion == replay(toy_db, s).conclusion
        assert extract_kb(db2, exclude=["idu"]).grammar.productions == \
            extract_kb(toy_db, exclude=["idu"]).grammar.productions


class TestVerify:
    def test_toy_verifies(self, toy_db):
        rep = verify_database(toy_db)
        assert rep.checked == 11 and rep.ok and not rep.incomplete and not rep.dv_warnings

    def test_wrong_step(self):
        db = mm_parse(HEADER + "${ h $e |- ph $. th $p |- ( ps -> ph ) $= "
                      "wph wps wph wi h wps wph ax-1 ax-mp $. $}")
        rep = verify_database(db)
        assert "th" in rep.errors
        with pytest.raises(ProofError):
            replay(db, db["th"])

    def test_correct_variant_of_the_same_proof(self):
        db = mm_parse(HEADER + "${ h $e |- ph $. th $p |- ( ps -> ph ) $= "
                      "wph wps wph wi h wph wps ax-1 ax-mp $. $}")
        assert verify_database(db).ok

    @pytest.mark.parametrize("proof", ["?", "wph ?", "( ) ?", "( ax-1 ) A?"])
    def test_incomplete(self, proof):
        db = mm_parse(HEADER + f"th $p |- ( ph -> ( ps -> ph ) ) $= {proof} $.")
        rep = verify_database(db)
        assert rep.ok and rep.incomplete == ["th"]
        with pytest.raises(MetamathError):
            extract_kb(db)

    def test_stack_residue(self):
        db = mm_parse(HEADER + "th $p |- ( ph -> ( ps -> ph ) ) $= wph wph wps ax-1 $.")
        assert "th" in verify_database(db).errors

    def test_disjoint_variable_warning(self):
        text = ("$c wff |- A. $. $v ph x $. wph $f wff ph $. vx $f wff x $.\n"
                "${ $d x ph $. ax-5 $a |- A. x ph $. $}\n"
                "th $p |- A. ph ph $= wph wph ax-5 $.\n")
        db = mm_parse(text)
        rep = verify_database(db)
        assert rep.ok and "th" in rep.dv_warnings
        assert not verify_database(db, dv_errors=True).ok


class TestSyntax:
    def test_parse_shape(self, toy_db):
        g = build_syntax_grammar(toy_db)
        vt = {"ph": "wff", "ps": "wff"}
        t = parse_formula("( ph -> ( ps -> ph ) )".split(), "wff", g, vt)
        ph, ps = Var("ph"), Var("ps")
        assert t is Fn("wi", (ph, Fn("wi", (ps, ph))))
        assert parse_formula(["ph"], "wff", g, vt) is ph

    def test_no_parse(self, toy_db):
        g = build_syntax_grammar(toy_db)
        with pytest.raises(FormulaParseError):
            parse_formula("( ph -> )".split(), "wff", g, {"ph": "wff"})

    def test_ambiguous(self):
        db = mm_parse("$c -> wff |- $. $v ph ps ch $. wph $f wff ph $. wps $f wff ps $.\n"
                      "wch $f wff ch $. wi $a wff ph -> ps $.")
        g = build_syntax_grammar(db)
        vt = {"ph": "wff", "ps": "wff", "ch": "wff"}
        assert parse_formula("ph -> ps".split(), "wff", g, vt) is not None
        with pytest.raises(AmbiguousParse):
            parse_formula("ph -> ps -> ch".split(), "wff", g, vt)

    def test_unparse_is_inverse_on_corpus(self, toy_db):
        g = build_syntax_grammar(toy_db)
        n = 0
        for s in toy_db.statements.values():
            if s.typecode != "|-":
                continue
            vt = {v: tc for v, (_, tc) in s.ftypes.items()}
            t = parse_formula(s.tokens, "wff", g, vt)
            assert unparse(t, g) == tuple(s.tokens)
            n += 1
        assert n > 20


class TestExtract:
    def test_toy_kb(self, toy_db):
        warnings = []
        K = extract_kb(toy_db, exclude=["idu"], warnings=warnings)
        assert len(K.grammar) == 9 and K.grammar.size == 19
        assert K.grammar["mpd"].rhs is T("ax-mp($1,a2i($2))")
        assert K.grammar["id"].rhs is T("mpd(ax-1,ax-1)")
        assert K.theorem("mpd") == C("wi(?ph,?ch) <- wi(?ph,?ps), wi(?ph,wi(?ps,?ch))")
        assert set(K.base) == {"ax-mp", "ax-1", "ax-2", "ax-3", "ax-gen", "ax-5"}
        assert warnings == [("a5i", "carries $d restrictions (ignored by the clause form)")]
        assert validate_grammar(K.grammar, K.base).ok

    def test_toy_kb_verifies(self, toy_db):
        rep = kb_verify(extract_kb(toy_db), chain=True)
        assert rep.ok
        assert rep.status["idi2"] == "strict-instance"
        assert rep.count("ok") == len(rep.status) - 1

    def test_unused_hypothesis_kept_as_parameter(self, toy_db):
        K = extract_kb(toy_db)
        assert K.grammar["idu"].arity == 1
        rep = validate_grammar(K.grammar, K.base)
        assert any("idu: unused parameter $1" in w for w in rep.warnings)

    def test_roots_closure(self, toy_db):
        K = extract_kb(toy_db, roots=["a1i"])
        assert K.grammar.nonterminals == ["a1i"]
        assert set(K.base) == {"ax-mp", "ax-1"}
        assert dependency_closure(toy_db, ["syl"]) >= {"syl", "mpd", "a1i", "a2i"}

    def test_end_label(self, toy_db):
        K = extract_kb(toy_db, end_label="mpd")
        assert K.grammar.nonterminals == ["a1i", "a2i", "mpd"]
        with pytest.raises(MetamathError):
            extract_kb(toy_db, end_label="nope")

    def test_syntactic_theorems_excluded(self, toy_db):
        assert "wimpid" not in extract_kb(toy_db).grammar

    def test_presentation_as_condensed_detachment(self, toy_db):
        K = extract_kb(toy_db)
        assert present(K.grammar["mpd"].rhs) is T("D(a2i($2),$1)")
        assert present(K.grammar["idgen"].rhs) is T("G(id)")

    def test_mgt_of_extracted_theorem(self, toy_db):
        K = extract_kb(toy_db)
        base = dict(K.base)
        for p, F in zip(K.grammar.productions, K.theorems):
            M = mgt(p.rhs, base, p.arity).clause
            assert M is not None
            base[p.nonterminal] = F
