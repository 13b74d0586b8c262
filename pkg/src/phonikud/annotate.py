"""Pseudo-ground-truth annotation toolkit.

Derives the enhanced diacritics from external morphological hints (prefix
length, stress syllable), applies the vocal-shva rule set, and supports the
frequency-sorted manual-correction workflow.  All operations are idempotent
and mark-monotone: they add marks, never remove them.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Optional, Union

from . import g2p, hebrew
from .hebrew import GraphemeCluster, MarkKind, Word


class AnnotationError(ValueError):
    pass


class SyllableOutOfRangeError(AnnotationError):
    pass


class InvalidCorrectionError(AnnotationError):
    def __init__(self, message: str, line: int = 0) -> None:
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


@dataclass(frozen=True)
class AnnotationRecord:
    """A vocalized token plus external morphological hints.

    ``stress_syllable`` counts vowels from the word end (1 = final); a shva
    is a syllable nucleus only when marked vocal.
    """

    token: Word
    prefix_len: int = 0
    stress_syllable: Optional[int] = None

    def __post_init__(self) -> None:
        if self.prefix_len < 0:
            raise AnnotationError("prefix_len must be >= 0")
        if self.prefix_len and self.prefix_len >= len(self.token.clusters):
            raise AnnotationError("prefix_len must be smaller than the letter count")


@dataclass(frozen=True)
class ShvaRules:
    """Individually toggleable vocal-shva rules."""

    double_shva: bool = True        # second of two adjacent word-medial shvas
    identical_letters: bool = True  # shva on a letter doubled by the next letter
    dagesh_forte: bool = True       # shva under a non-initial dagesh
    clitic_prefix: bool = True      # shva on a one-letter clitic before a shva


DEFAULT_SHVA_RULES = ShvaRules()

_CLITIC_LETTERS = frozenset({hebrew.BET, hebrew.KAF, hebrew.LAMED, hebrew.VAV})


def _plain_shva(cluster: GraphemeCluster) -> bool:
    return cluster.has(MarkKind.SHVA)


def apply_shva_rules(word: Word, rules: ShvaRules = DEFAULT_SHVA_RULES) -> Word:
    """Add the vocal-shva marker where the rule set predicts a spoken /e/.

    Rule conditions read only the un-enhanced marks, so the pass is a single
    deterministic sweep and reapplication is a no-op.
    """
    clusters = list(word.clusters)
    n = len(clusters)
    vocal: set[int] = set()
    for i, cluster in enumerate(clusters):
        if not _plain_shva(cluster):
            continue
        if rules.double_shva and i >= 1 and i < n - 1 and _plain_shva(clusters[i - 1]):
            vocal.add(i)
        if rules.identical_letters and i + 1 < n and clusters[i + 1].base == cluster.base:
            vocal.add(i)
        if rules.dagesh_forte and i >= 1 and cluster.has(MarkKind.DAGESH):
            vocal.add(i)
        if rules.clitic_prefix and i == 0 and n > 1 and cluster.base in _CLITIC_LETTERS \
                and _plain_shva(clusters[1]):
            vocal.add(i)
    if not vocal:
        return word
    new = [
        c.with_marks(MarkKind.VOCAL_SHVA) if i in vocal else c
        for i, c in enumerate(clusters)
    ]
    return Word(tuple(new), word.span)


def mark_prefixes(record: AnnotationRecord) -> Word:
    """Set the prefix boundary after the hinted prefix letters."""
    word = record.token
    if record.prefix_len == 0:
        return word
    i = record.prefix_len - 1
    clusters = list(word.clusters)
    if not clusters[i].prefix_boundary_after:
        clusters[i] = clusters[i].with_boundary()
    return Word(tuple(clusters), word.span)


def mark_stress(record: AnnotationRecord) -> Word:
    """Attach the stress mark per the hinted syllable.

    Final stress (syllable 1) is the unmarked default, so nothing is added.
    A word that already carries a stress mark is left alone: existing marks
    win and are never moved.  Syllable counting runs over the word as spoken,
    so vocal-shva marking must happen before stress marking.
    """
    word = record.token
    k = record.stress_syllable
    if k is None:
        return word
    if k < 1:
        raise SyllableOutOfRangeError(f"stress syllable {k} out of range")
    vowel_sources = g2p.word_vowel_sources(word)
    if k > len(vowel_sources):
        raise SyllableOutOfRangeError(
            f"stress syllable {k} out of range for a {len(vowel_sources)}-vowel word")
    if k == 1 or word.stress_cluster() is not None:
        return word
    target = vowel_sources[len(vowel_sources) - k]
    clusters = list(word.clusters)
    clusters[target] = clusters[target].with_marks(MarkKind.STRESS)
    return Word(tuple(clusters), word.span)


def annotate_token(record: AnnotationRecord,
                   rules: ShvaRules = DEFAULT_SHVA_RULES) -> Word:
    """Full per-token pipeline: prefixes, vocal shva, then stress.

    Shva realization runs before stress marking because vocal shvas count as
    syllable nuclei when the hinted stress syllable is located.
    """
    word = mark_prefixes(record)
    word = apply_shva_rules(word, rules)
    return mark_stress(AnnotationRecord(word, 0, record.stress_syllable))


# --- line-level processing -------------------------------------------------

def parse_record_line(line: str) -> tuple[str, list[dict]]:
    """Decode one JSONL record: {"text": ..., "tokens": [{...}]}."""
    obj = json.loads(line)
    if not isinstance(obj, dict) or "text" not in obj:
        raise AnnotationError("record must be an object with a 'text' field")
    tokens = obj.get("tokens", [])
    if not isinstance(tokens, list):
        raise AnnotationError("'tokens' must be a list")
    return obj["text"], tokens


def annotate_line(text: str, tokens: list[dict],
                  rules: ShvaRules = DEFAULT_SHVA_RULES) -> str:
    """Replace each Hebrew word of ``text`` with its annotated form.

    Token hints align positionally with the words of the line.
    """
    doc = hebrew.tokenize(hebrew.normalize(text))
    word_count = sum(1 for _ in doc.words())
    if word_count != len(tokens):
        raise AnnotationError(
            f"line has {word_count} words but {len(tokens)} token hints")
    out: list[str] = []
    next_token = 0
    for seg in doc.segments:
        if isinstance(seg, Word):
            hint = tokens[next_token]
            next_token += 1
            voc = hint.get("voc")
            token = hebrew.parse_word(hebrew.normalize(voc)) if voc else seg
            record = AnnotationRecord(
                token=token,
                prefix_len=int(hint.get("prefix_len", 0) or 0),
                stress_syllable=hint.get("stress_syllable"),
            )
            out.append(hebrew.serialize(annotate_token(record, rules)))
        else:
            out.append(seg.text)
    return "".join(out)


def build_review_list(lines: Iterable[str]) -> list[tuple[str, int]]:
    """Distinct word types by descending count, ties broken lexicographically."""
    counts: Counter[str] = Counter()
    for line in lines:
        doc = hebrew.tokenize(hebrew.normalize(line))
        for word in doc.words():
            counts[hebrew.serialize(word)] += 1
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))


def format_review_list(rows: list[tuple[str, int]]) -> str:
    return "".join(f"{surface}\t{count}\n" for surface, count in rows)


@dataclass(frozen=True)
class CorrectionFile:
    """Manual corrections: surface word type -> corrected enhanced form."""

    corrections: dict[str, str] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.corrections)


def load_corrections(path: Union[str, Path]) -> CorrectionFile:
    text = Path(path).read_text(encoding="utf-8")
    return parse_corrections(text)


def parse_corrections(text: str) -> CorrectionFile:
    corrections: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise InvalidCorrectionError(
                f"expected 2 tab-separated fields, got {len(fields)}", lineno)
        surface, corrected = fields[0].strip(), fields[1].strip()
        if not surface or not corrected:
            raise InvalidCorrectionError("empty field", lineno)
        if surface in corrections:
            raise InvalidCorrectionError(f"duplicate surface {surface!r}", lineno)
        normalized = hebrew.normalize(corrected)
        try:
            hebrew.parse_word(normalized)
        except hebrew.HebrewTextError as exc:
            raise InvalidCorrectionError(
                f"corrected form does not validate: {exc}", lineno) from exc
        corrections[hebrew.normalize(surface)] = normalized
    return CorrectionFile(corrections)


def apply_corrections(lines: Iterable[str],
                      corrections: CorrectionFile) -> tuple[list[str], int]:
    """Replace every token whose surface matches a correction key."""
    out: list[str] = []
    replaced = 0
    for line in lines:
        doc = hebrew.tokenize(hebrew.normalize(line))
        pieces: list[str] = []
        for seg in doc.segments:
            if isinstance(seg, Word):
                surface = hebrew.serialize(seg)
                corrected = corrections.corrections.get(surface)
                if corrected is not None:
                    pieces.append(corrected)
                    replaced += 1
                    continue
            pieces.append(seg.text)
        out.append("".join(pieces))
    return out, replaced


def iter_jsonl(lines: Iterable[str]) -> Iterator[tuple[int, str, list[dict]]]:
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        text, tokens = parse_record_line(line)
        yield lineno, text, tokens
