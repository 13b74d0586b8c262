import json
import random

import pytest

from phonikud import annotate, g2p, hebrew
from phonikud.annotate import (
    AnnotationError,
    AnnotationRecord,
    InvalidCorrectionError,
    ShvaRules,
    SyllableOutOfRangeError,
    annotate_token,
    apply_corrections,
    apply_shva_rules,
    build_review_list,
    mark_prefixes,
    mark_stress,
    parse_corrections,
)
from phonikud.hebrew import MarkKind

from gen import random_word

SHVA = MarkKind.SHVA.value
HIRIQ = MarkKind.HIRIQ.value
SEGOL = MarkKind.SEGOL.value
PATAH = MarkKind.PATAH.value
QAMATS = MarkKind.QAMATS.value
HOLAM = MarkKind.HOLAM.value
DAGESH = MarkKind.DAGESH.value
STRESS_MARK = MarkKind.STRESS.value

BIRA = "ב" + DAGESH + HIRIQ + "יר" + QAMATS + "ה"
LEXEM = "ל" + SEGOL + "ח" + SEGOL + "ם"
HAKOD = "ה" + PATAH + "ק" + DAGESH + "ו" + HOLAM + "ד"


def word(text):
    return hebrew.parse_word(hebrew.normalize(text))


class TestMarkStress:
    def test_final_stress_is_unmarked(self):
        out = mark_stress(AnnotationRecord(word(BIRA), stress_syllable=1))
        assert out.stress_cluster() is None

    def test_penult_stress_marks_first_vowel(self):
        out = mark_stress(AnnotationRecord(word(LEXEM), stress_syllable=2))
        assert out.stress_cluster() == 0
        assert g2p.phonemize_word(out) == "ˈlexem"

    def test_out_of_range(self):
        with pytest.raises(SyllableOutOfRangeError):
            mark_stress(AnnotationRecord(word(BIRA), stress_syllable=5))
        with pytest.raises(SyllableOutOfRangeError):
            mark_stress(AnnotationRecord(word(BIRA), stress_syllable=0))

    def test_no_hint_is_noop(self):
        w = word(BIRA)
        assert mark_stress(AnnotationRecord(w)) is w


class TestMarkPrefixes:
    def test_zero_prefix_unchanged(self):
        w = word(HAKOD)
        assert mark_prefixes(AnnotationRecord(w, prefix_len=0)) is w

    def test_single_letter_prefix(self):
        out = mark_prefixes(AnnotationRecord(word(HAKOD), prefix_len=1))
        assert out.clusters[0].prefix_boundary_after
        assert g2p.phonemize_word(out) == "haˈkod"

    def test_two_letter_prefix(self):
        out = mark_prefixes(AnnotationRecord(word(HAKOD), prefix_len=2))
        assert [c.prefix_boundary_after for c in out.clusters] == \
            [False, True, False, False]

    def test_prefix_len_bound(self):
        with pytest.raises(AnnotationError):
            AnnotationRecord(word(HAKOD), prefix_len=4)


class TestShvaRules:
    def test_dagesh_forte_shva_becomes_vocal(self):
        # medial dagesh + shva reads as /e/
        w = word("ד" + HIRIQ + "ב" + DAGESH + SHVA + "רו" + DAGESH)
        out = apply_shva_rules(w)
        assert out.clusters[1].has(MarkKind.VOCAL_SHVA)

    def test_word_initial_shva_left_silent(self):
        blondini = "ב" + DAGESH + SHVA + "לו" + HOLAM + "נ" + SHVA + "ד" \
            + HIRIQ + "ינ" + HIRIQ + "י"
        out = apply_shva_rules(word(blondini))
        assert not any(c.has(MarkKind.VOCAL_SHVA) for c in out.clusters)

    def test_word_without_shva_unchanged(self):
        w = word(BIRA)
        assert apply_shva_rules(w) is w

    def test_identical_letters_rule(self):
        # shva on the first of two identical letters reads as /e/
        w = word("ה" + HIRIQ + "נ" + SHVA + "נ" + HIRIQ + "י")
        out = apply_shva_rules(w)
        assert out.clusters[1].has(MarkKind.VOCAL_SHVA)

    def test_clitic_prefix_rule(self):
        w = word("ב" + DAGESH + SHVA + "ס" + SHVA + "דו" + HOLAM + "ם")
        out = apply_shva_rules(w)
        assert out.clusters[0].has(MarkKind.VOCAL_SHVA)

    def test_final_double_shva_stays_silent(self):
        w = word("א" + QAMATS + "מ" + PATAH + "ר" + SHVA + "ת" + DAGESH + SHVA)
        rules = ShvaRules(dagesh_forte=False)
        out = apply_shva_rules(w, rules)
        assert not any(c.has(MarkKind.VOCAL_SHVA) for c in out.clusters)

    def test_rule_toggles(self):
        w = word("ה" + HIRIQ + "נ" + SHVA + "נ" + HIRIQ + "י")
        out = apply_shva_rules(w, ShvaRules(identical_letters=False))
        assert not out.clusters[1].has(MarkKind.VOCAL_SHVA)

    def test_idempotent_and_monotone(self):
        rng = random.Random(31)
        for _ in range(500):
            w = random_word(rng)
            once = apply_shva_rules(w)
            twice = apply_shva_rules(once)
            assert once.clusters == twice.clusters
            for before, after in zip(w.clusters, once.clusters):
                assert before.marks <= after.marks


class TestAnnotateToken:
    def test_full_pipeline_validates(self):
        rng = random.Random(37)
        for _ in range(300):
            w = random_word(rng)
            record = AnnotationRecord(w, prefix_len=0, stress_syllable=None)
            out = annotate_token(record)
            hebrew.validate_word(out)
            reparsed = hebrew.parse_word(hebrew.serialize(out))
            assert reparsed.clusters == out.clusters

    def test_idempotent(self):
        w = word(HAKOD)
        record = AnnotationRecord(w, prefix_len=1, stress_syllable=1)
        once = annotate_token(record)
        again = annotate_token(AnnotationRecord(once, 1, 1))
        assert once.clusters == again.clusters


class TestReviewList:
    def test_single_repeated_type(self):
        rows = build_review_list(["טוֹב טוֹב", "טוֹב"])
        assert len(rows) == 1
        assert rows[0][1] == 3

    def test_count_ordering(self):
        rows = build_review_list(["אנס אנס בי"])
        assert rows[0][1] == 2 and rows[1][1] == 1

    def test_lexicographic_tie_break(self):
        rows = build_review_list(["בג אב"])
        assert [r[0] for r in rows] == sorted([r[0] for r in rows])
        assert all(r[1] == 1 for r in rows)


class TestCorrections:
    def test_empty_corrections_noop(self):
        lines = ["טוֹב מאוד"]
        out, replaced = apply_corrections(lines, parse_corrections(""))
        assert out == [hebrew.normalize(line) for line in lines]
        assert replaced == 0

    def test_one_correction_three_tokens(self):
        corr = parse_corrections("טוב\tטו" + HOLAM + "ב\n")
        out, replaced = apply_corrections(["טוב טוב", "טוב"], corr)
        assert replaced == 3
        assert out[0].count(HOLAM) == 2

    def test_malformed_target_rejected(self):
        with pytest.raises(InvalidCorrectionError):
            parse_corrections("טוב\t" + QAMATS + "ב\n")

    def test_duplicate_surface_rejected(self):
        with pytest.raises(InvalidCorrectionError):
            parse_corrections("טוב\tטוב\nטוב\tטוב\n")

    def test_review_list_reflects_post_correction_distribution(self):
        corr = parse_corrections("טוב\tטו" + HOLAM + "ב\n")
        lines, _ = apply_corrections(["טוב רע טוב"], corr)
        rows = dict(build_review_list(lines))
        assert rows["טו" + HOLAM + "ב"] == 2
        assert "טוב" not in rows


class TestJsonlRecords:
    def test_annotate_line_replaces_words(self):
        record = {
            "text": "הקוד טוב",
            "tokens": [
                {"voc": HAKOD, "prefix_len": 1, "stress_syllable": 1},
                {"voc": "טו" + HOLAM + "ב"},
            ],
        }
        out = annotate.annotate_line(record["text"], record["tokens"])
        first = out.split(" ")[0]
        assert MarkKind.PREFIX_SEP.value in first

    def test_token_count_mismatch(self):
        with pytest.raises(AnnotationError):
            annotate.annotate_line("טוב", [])

    def test_parse_record_line(self):
        text, tokens = annotate.parse_record_line(
            json.dumps({"text": "א", "tokens": []}))
        assert text == "א" and tokens == []
        with pytest.raises(AnnotationError):
            annotate.parse_record_line(json.dumps(["not", "a", "dict"]))
