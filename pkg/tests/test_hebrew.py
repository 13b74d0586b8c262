import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from phonikud import hebrew
from phonikud.hebrew import (
    DuplicateMarkError,
    DuplicateStressError,
    MalformedWordError,
    MarkKind,
    Passthrough,
    Word,
)

from gen import random_unicode_text, random_word, random_word_text

SHVA = MarkKind.SHVA.value
HIRIQ = MarkKind.HIRIQ.value
SEGOL = MarkKind.SEGOL.value
PATAH = MarkKind.PATAH.value
QAMATS = MarkKind.QAMATS.value
DAGESH = MarkKind.DAGESH.value
SHIN_DOT = MarkKind.SHIN_DOT.value
STRESS = MarkKind.STRESS.value
VOCAL = MarkKind.VOCAL_SHVA.value
SEP = MarkKind.PREFIX_SEP.value


class TestMarkTable:
    def test_codepoint_bijection(self):
        chars = [k.value for k in MarkKind]
        assert len(chars) == len(set(chars))
        for kind in MarkKind:
            assert hebrew.CHAR_TO_MARK[kind.value] is kind
        for ch, kind in hebrew.CHAR_TO_MARK.items():
            assert hebrew.MARK_TO_CHAR[kind] == ch

    def test_enhanced_marks_distinct_from_nikud(self):
        nikud = {k.value for k in MarkKind} - {
            MarkKind.STRESS.value, MarkKind.VOCAL_SHVA.value,
            MarkKind.PREFIX_SEP.value,
        }
        for enhanced in (MarkKind.STRESS, MarkKind.VOCAL_SHVA, MarkKind.PREFIX_SEP):
            assert enhanced.value not in nikud


class TestNormalize:
    def test_empty(self):
        assert hebrew.normalize("") == ""

    def test_idempotent_on_plain_word(self):
        text = "ש" + SHIN_DOT + QAMATS + "לו" + MarkKind.HOLAM.value + "ם"
        once = hebrew.normalize(text)
        assert hebrew.normalize(once) == once

    def test_mark_permutations_converge(self):
        # any encoding order of one cluster's marks must normalize identically
        marks = [DAGESH, QAMATS, STRESS]
        results = {
            hebrew.normalize("ב" + "".join(perm))
            for perm in itertools.permutations(marks)
        }
        assert len(results) == 1
        assert results.pop() == "ב" + DAGESH + QAMATS + STRESS

    def test_cantillation_stripped_stress_kept(self):
        text = "ב" + "֑" + QAMATS + "֣" + STRESS
        assert hebrew.normalize(text) == "ב" + QAMATS + STRESS

    def test_qamats_qatan_folds(self):
        assert hebrew.normalize("כ" + "ׇ" + "ל") == "כ" + QAMATS + "ל"

    def test_rafe_stripped(self):
        assert hebrew.normalize("ב" + "ֿ" + QAMATS) == "ב" + QAMATS

    def test_presentation_forms_fold(self):
        # wide/presentation letters and precomposed letter+dagesh forms
        assert hebrew.normalize("בּ") == "ב" + DAGESH
        assert hebrew.normalize("ﭏ") == "אל"

    def test_meteg_without_shva_dropped(self):
        assert hebrew.normalize("ב" + VOCAL + QAMATS) == "ב" + QAMATS
        kept = hebrew.normalize("ב" + VOCAL + SHVA)
        assert kept == "ב" + SHVA + VOCAL

    def test_dots_only_on_shin(self):
        assert hebrew.normalize("ב" + SHIN_DOT) == "ב"
        assert hebrew.normalize("ש" + SHIN_DOT) == "ש" + SHIN_DOT

    def test_apostrophe_digraph_folds(self):
        assert hebrew.normalize("ג'") == "ג׳"
        assert hebrew.normalize("ג’") == "ג׳"
        # apostrophe after a non-digraph letter is untouched
        assert hebrew.normalize("ם'") == "ם'"

    def test_idempotence_fuzz(self):
        rng = random.Random(7)
        for _ in range(2000):
            text = random_unicode_text(rng)
            once = hebrew.normalize(text)
            assert hebrew.normalize(once) == once

    @given(st.text(max_size=30))
    @settings(max_examples=300)
    def test_idempotence_hypothesis(self, text):
        once = hebrew.normalize(text)
        assert hebrew.normalize(once) == once


class TestTokenize:
    def test_two_words(self):
        doc = hebrew.tokenize("בוקר טוב")
        kinds = [type(seg) for seg in doc.segments]
        assert kinds == [Word, Passthrough, Word]
        assert doc.segments[1].text == " "

    def test_no_hebrew(self):
        doc = hebrew.tokenize("abc 123")
        assert len(doc.segments) == 1
        assert isinstance(doc.segments[0], Passthrough)
        assert doc.segments[0].text == "abc 123"

    def test_word_then_comma(self):
        doc = hebrew.tokenize("שלום,")
        assert isinstance(doc.segments[0], Word)
        assert doc.segments[0].span == (0, 4)
        assert doc.segments[1] == Passthrough(",", (4, 5))

    def test_lossless(self):
        rng = random.Random(11)
        for _ in range(300):
            text = hebrew.normalize(random_unicode_text(rng))
            assert hebrew.tokenize(text).text == text

    def test_maqaf_separates_words(self):
        doc = hebrew.tokenize("בוקר־טוב")
        assert [type(s) for s in doc.segments] == [Word, Passthrough, Word]

    def test_malformed_run_becomes_passthrough_with_error(self):
        doc = hebrew.tokenize(SHVA + "ב")
        errors = [s for s in doc.segments if isinstance(s, Passthrough) and s.error]
        assert errors
        assert doc.text == SHVA + "ב"


class TestParseWord:
    def test_lexem_clusters(self):
        word = hebrew.parse_word("ל" + SEGOL + STRESS + "ח" + SEGOL + "ם")
        assert len(word.clusters) == 3
        assert MarkKind.SEGOL in word.clusters[0].marks
        assert MarkKind.STRESS in word.clusters[0].marks

    def test_leading_mark_is_malformed(self):
        with pytest.raises(MalformedWordError):
            hebrew.parse_word(QAMATS + "ב")

    def test_prefix_boundary(self):
        word = hebrew.parse_word("ה" + PATAH + SEP + "קוד")
        assert word.clusters[0].prefix_boundary_after
        assert not word.clusters[1].prefix_boundary_after

    def test_duplicate_vowel_marks(self):
        with pytest.raises(DuplicateMarkError):
            hebrew.parse_word("ב" + QAMATS + PATAH)

    def test_repeated_same_mark(self):
        with pytest.raises(DuplicateMarkError):
            hebrew.parse_word("ב" + DAGESH + DAGESH)

    def test_duplicate_stress(self):
        with pytest.raises(DuplicateStressError):
            hebrew.parse_word("ב" + PATAH + STRESS + "ג" + PATAH + STRESS)

    def test_vocal_shva_requires_shva(self):
        with pytest.raises(MalformedWordError):
            hebrew.parse_word("ב" + QAMATS + VOCAL)

    def test_dot_on_non_shin_rejected(self):
        with pytest.raises(MalformedWordError):
            hebrew.parse_word("ב" + SHIN_DOT)


class TestSerialize:
    def test_empty_word(self):
        assert hebrew.serialize(Word(())) == ""

    def test_round_trip_on_golden_corpus(self):
        from phonikud import corpus
        for example in corpus.golden_examples():
            doc = hebrew.tokenize(example.hebrew)
            for word in doc.words():
                assert hebrew.parse_word(hebrew.serialize(word)).clusters == word.clusters

    def test_round_trip_random_words(self):
        rng = random.Random(23)
        for _ in range(2000):
            word = random_word(rng)
            text = hebrew.serialize(word)
            parsed = hebrew.parse_word(text)
            assert parsed.clusters == word.clusters
            assert hebrew.serialize(parsed) == text

    def test_serialized_words_are_normalization_fixed_points(self):
        rng = random.Random(29)
        for _ in range(500):
            text = random_word_text(rng)
            assert hebrew.normalize(text) == text


class TestStripEnhanced:
    def test_strip_all(self):
        text = "ב" + SHVA + VOCAL + STRESS + SEP + "ל"
        assert hebrew.strip_enhanced_marks(text) == "ב" + SHVA + "ל"

    def test_keep_vocal_shva(self):
        text = "ב" + SHVA + VOCAL + STRESS + SEP + "ל"
        assert hebrew.strip_enhanced_marks(text, keep_vocal_shva=True) == \
            "ב" + SHVA + VOCAL + "ל"
