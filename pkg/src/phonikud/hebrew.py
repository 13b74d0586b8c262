"""Unicode model of Hebrew text.

Covers codepoint classification, canonical normalization, tokenization into
words, and parsing of letter/mark runs into grapheme clusters.  The canonical
mark order established by :func:`normalize` (letter, dagesh, shin/sin dot,
vowel, stress, vocal-shva marker, then a standalone prefix separator) is the
bit-exact contract relied on by every downstream module and file format.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional, Union


class MarkKind(Enum):
    """Combining marks recognized on a grapheme cluster.

    Each member's value is the single Unicode codepoint that encodes it; the
    mapping is bijective in both directions.
    """

    # standard nikud
    SHVA = "ְ"
    HATAF_SEGOL = "ֱ"
    HATAF_PATAH = "ֲ"
    HATAF_QAMATS = "ֳ"
    HIRIQ = "ִ"
    TSERE = "ֵ"
    SEGOL = "ֶ"
    PATAH = "ַ"
    QAMATS = "ָ"
    HOLAM = "ֹ"
    HOLAM_HASER_FOR_VAV = "ֺ"
    QUBUTS = "ֻ"
    DAGESH = "ּ"
    SHIN_DOT = "ׁ"
    SIN_DOT = "ׂ"
    # enhanced marks: repurposed Biblical-only codepoints, never used in
    # ordinary writing
    STRESS = "֫"       # superscript angle: stressed syllable
    VOCAL_SHVA = "ֽ"   # subscript line: shva pronounced /e/
    PREFIX_SEP = "׀"   # vertical bar: end of a cliticized prefix


MARK_TO_CHAR = {kind: kind.value for kind in MarkKind}
CHAR_TO_MARK = {kind.value: kind for kind in MarkKind}

#: Marks that occupy the single vowel slot of a cluster.
VOWEL_CLASS = frozenset({
    MarkKind.SHVA,
    MarkKind.HATAF_SEGOL,
    MarkKind.HATAF_PATAH,
    MarkKind.HATAF_QAMATS,
    MarkKind.HIRIQ,
    MarkKind.TSERE,
    MarkKind.SEGOL,
    MarkKind.PATAH,
    MarkKind.QAMATS,
    MarkKind.HOLAM,
    MarkKind.QUBUTS,
})

ENHANCED_MARKS = frozenset({MarkKind.STRESS, MarkKind.VOCAL_SHVA, MarkKind.PREFIX_SEP})

GERESH = "׳"
MAQAF = "־"
QAMATS_QATAN = "ׇ"
_RAFE = "ֿ"
_CGJ = "͏"
_APOSTROPHES = ("'", "’")

#: The 27 letterforms (22 letters, 5 finals).
LETTERS = "אבגדהוזחטיכךלמםנןסעפףצץקרשת"
LETTER_SET = frozenset(LETTERS)
FINAL_TO_BASE = {"ך": "כ", "ם": "מ", "ן": "נ", "ף": "פ", "ץ": "צ"}
#: Letters that take a geresh to spell loanword affricates/fricatives.
DIGRAPH_LETTERS = frozenset("גזצץדת")  # only ג/ז/צ map to distinct phonemes

ALEF, BET, GIMEL, DALET, HE, VAV, ZAYIN, HET, TET, YUD = "אבגדהוזחטי"
KAF, LAMED, MEM, NUN, SAMEKH, AYIN, PE, TSADI, QUF, RESH, SHIN, TAV = "כלמנסעפצקרשת"

# Cantillation accents other than the repurposed stress mark, plus marks with
# no phonemic role, are erased at normalization.
_STRIPPED_POINTS = frozenset(
    {chr(cp) for cp in range(0x0591, 0x05B0)} - {MarkKind.STRESS.value}
) | {_RAFE, "ׄ", "ׅ"}

# Deprecated presentation forms (U+FB1D..U+FB4F) fold to their base sequences.
_PRESENTATION_FOLD = {}
for _cp in range(0xFB1D, 0xFB50):
    _c = chr(_cp)
    _d = unicodedata.normalize("NFKD", _c)
    if _d != _c:
        _PRESENTATION_FOLD[_cp] = _d
del _cp, _c, _d

_MARK_RANK = {
    MarkKind.DAGESH: 0,
    MarkKind.SHIN_DOT: 1,
    MarkKind.SIN_DOT: 1,
    MarkKind.STRESS: 3,
    MarkKind.VOCAL_SHVA: 4,
}


def _mark_sort_key(kind: MarkKind) -> tuple[int, str]:
    return (_MARK_RANK.get(kind, 2), kind.value)


def is_hebrew_letter(ch: str) -> bool:
    return ch in LETTER_SET


def is_hebrew_point(ch: str) -> bool:
    """True for combining marks of the Hebrew block (kept or stripped)."""
    cp = ord(ch)
    return 0x0591 <= cp <= 0x05C7 and unicodedata.combining(ch) > 0


class HebrewTextError(ValueError):
    """Base class for malformed Hebrew letter/mark runs."""


class MalformedWordError(HebrewTextError):
    """A mark with no base letter, or a mark combination no cluster allows."""


class DuplicateMarkError(HebrewTextError):
    """Two marks competing for the same slot on one cluster."""


class DuplicateStressError(HebrewTextError):
    """More than one stress mark in a single word."""


@dataclass(frozen=True)
class GraphemeCluster:
    """One base letter with its attached marks.

    ``letter`` is the letterform as written (final forms preserved); ``base``
    folds finals for rule lookup.  ``geresh`` records a following geresh used
    for loanword digraphs.
    """

    letter: str
    marks: frozenset[MarkKind] = frozenset()
    geresh: bool = False
    prefix_boundary_after: bool = False

    @property
    def base(self) -> str:
        return FINAL_TO_BASE.get(self.letter, self.letter)

    @property
    def vowel(self) -> Optional[MarkKind]:
        for kind in self.marks:
            if kind in VOWEL_CLASS:
                return kind
        return None

    def has(self, kind: MarkKind) -> bool:
        return kind in self.marks

    def with_marks(self, *added: MarkKind) -> "GraphemeCluster":
        return GraphemeCluster(
            letter=self.letter,
            marks=self.marks | frozenset(added),
            geresh=self.geresh,
            prefix_boundary_after=self.prefix_boundary_after,
        )

    def with_boundary(self) -> "GraphemeCluster":
        return GraphemeCluster(
            letter=self.letter,
            marks=self.marks,
            geresh=self.geresh,
            prefix_boundary_after=True,
        )


@dataclass(frozen=True)
class Word:
    """An ordered run of grapheme clusters plus its source span."""

    clusters: tuple[GraphemeCluster, ...]
    span: tuple[int, int] = (0, 0)

    @property
    def text(self) -> str:
        return serialize(self)

    def stress_cluster(self) -> Optional[int]:
        for i, cluster in enumerate(self.clusters):
            if cluster.has(MarkKind.STRESS):
                return i
        return None


@dataclass(frozen=True)
class Passthrough:
    """A verbatim non-word span (punctuation, whitespace, non-Hebrew text)."""

    text: str
    span: tuple[int, int] = (0, 0)
    error: Optional[str] = None


Segment = Union[Word, Passthrough]


@dataclass(frozen=True)
class Document:
    """Tokenized text; concatenating segment text reproduces the input."""

    segments: tuple[Segment, ...]

    @property
    def text(self) -> str:
        return "".join(seg.text for seg in self.segments)

    def words(self) -> Iterator[Word]:
        for seg in self.segments:
            if isinstance(seg, Word):
                yield seg


def _canonical_cluster_marks(letter: str, raw_marks: list[str]) -> str:
    kinds: set[MarkKind] = set()
    for ch in raw_marks:
        if ch == _CGJ:
            continue
        if ch == QAMATS_QATAN:
            ch = MarkKind.QAMATS.value
        if ch in _STRIPPED_POINTS:
            continue
        kind = CHAR_TO_MARK.get(ch)
        if kind is None:
            continue
        kinds.add(kind)
    # fold impossible combinations instead of failing: normalize is total
    if MarkKind.VOCAL_SHVA in kinds and MarkKind.SHVA not in kinds:
        kinds.discard(MarkKind.VOCAL_SHVA)
    if FINAL_TO_BASE.get(letter, letter) != SHIN:
        kinds.discard(MarkKind.SHIN_DOT)
        kinds.discard(MarkKind.SIN_DOT)
    elif MarkKind.SHIN_DOT in kinds and MarkKind.SIN_DOT in kinds:
        kinds.discard(MarkKind.SIN_DOT)
    return "".join(k.value for k in sorted(kinds, key=_mark_sort_key))


def normalize(text: str) -> str:
    """Return the canonical composed form of ``text``.

    Idempotent and total.  Hebrew presentation forms are folded to base
    sequences, cantillation (except the stress mark), rafe and stray dots are
    erased, qamats qatan folds to qamats, apostrophes spelling loan digraphs
    fold to geresh, and the marks of each cluster are rewritten in canonical
    order.  Non-Hebrew spans pass through untouched.
    """
    if not text:
        return ""
    text = text.translate(_PRESENTATION_FOLD)
    out: list[str] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in LETTER_SET:
            i += 1
            geresh = False
            raw: list[str] = []
            while i < n:
                c = text[i]
                if c == GERESH or (c in _APOSTROPHES and ch in DIGRAPH_LETTERS):
                    if geresh:
                        break
                    geresh = True
                    i += 1
                    continue
                if is_hebrew_point(c) or c == _CGJ:
                    raw.append(c)
                    i += 1
                    continue
                break
            out.append(ch)
            if geresh:
                out.append(GERESH)
            out.append(_canonical_cluster_marks(ch, raw))
        elif is_hebrew_point(ch):
            # stray mark with no base letter: fold/strip like attached marks,
            # but keep phonemically meaningful ones so parsing can report them
            if ch == QAMATS_QATAN:
                out.append(MarkKind.QAMATS.value)
            elif ch not in _STRIPPED_POINTS and ch in CHAR_TO_MARK:
                out.append(ch)
            i += 1
        elif ch == _CGJ:
            i += 1
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _is_run_char(ch: str, run_open: bool) -> bool:
    if ch in LETTER_SET or is_hebrew_point(ch):
        return True
    if run_open and ch in (GERESH, MarkKind.PREFIX_SEP.value):
        return True
    return False


def tokenize(text: str) -> Document:
    """Split normalized text into Word and Passthrough segments, losslessly.

    Hebrew letter/mark runs that fail to parse become Passthrough segments
    carrying the parse error, so downstream stages can report them without
    aborting.
    """
    segments: list[Segment] = []
    pas: list[str] = []
    pas_start = 0
    run: list[str] = []
    run_start = 0

    def flush_pas(end: int) -> None:
        nonlocal pas
        if pas:
            segments.append(Passthrough("".join(pas), (pas_start, end)))
            pas = []

    def flush_run(end: int) -> None:
        nonlocal run
        if not run:
            return
        raw = "".join(run)
        try:
            word = parse_word(raw, span=(run_start, end))
            segments.append(word)
        except HebrewTextError as exc:
            segments.append(Passthrough(raw, (run_start, end), error=str(exc)))
        run = []

    for i, ch in enumerate(text):
        if _is_run_char(ch, bool(run)):
            if not run:
                flush_pas(i)
                run_start = i
            run.append(ch)
        else:
            if run:
                flush_run(i)
                pas_start = i
            elif not pas:
                pas_start = i
            pas.append(ch)
    flush_run(len(text))
    flush_pas(len(text))
    return Document(tuple(segments))


class _OpenCluster:
    __slots__ = ("letter", "geresh", "marks", "boundary")

    def __init__(self, letter: str) -> None:
        self.letter = letter
        self.geresh = False
        self.marks: list[MarkKind] = []
        self.boundary = False

    def freeze(self) -> GraphemeCluster:
        return GraphemeCluster(
            letter=self.letter,
            marks=frozenset(self.marks),
            geresh=self.geresh,
            prefix_boundary_after=self.boundary,
        )


def parse_word(run: str, span: tuple[int, int] = (0, 0)) -> Word:
    """Parse a normalized letter/mark run into a Word.

    Raises MalformedWordError, DuplicateMarkError or DuplicateStressError when
    the run violates cluster or word invariants.
    """
    clusters: list[GraphemeCluster] = []
    cur: Optional[_OpenCluster] = None

    def flush() -> None:
        nonlocal cur
        if cur is not None:
            clusters.append(cur.freeze())
            cur = None

    for ch in run:
        if ch in LETTER_SET:
            flush()
            cur = _OpenCluster(ch)
        elif ch == GERESH:
            if cur is None:
                raise MalformedWordError("geresh with no preceding letter")
            if cur.geresh:
                raise MalformedWordError("doubled geresh on one letter")
            if cur.marks:
                raise MalformedWordError("geresh after combining marks")
            cur.geresh = True
        elif ch == MarkKind.PREFIX_SEP.value:
            if cur is None:
                raise MalformedWordError("prefix separator with no preceding letter")
            cur.boundary = True
            flush()  # the separator closes its cluster; trailing marks are malformed
        else:
            kind = CHAR_TO_MARK.get(ch)
            if kind is None:
                raise MalformedWordError(f"unsupported mark U+{ord(ch):04X}")
            if cur is None:
                raise MalformedWordError("combining mark with no base letter")
            if kind in cur.marks:
                raise DuplicateMarkError(f"mark {kind.name} repeated on one letter")
            if kind in VOWEL_CLASS and any(m in VOWEL_CLASS for m in cur.marks):
                raise DuplicateMarkError("two vowel marks on one letter")
            cur.marks.append(kind)
    flush()

    word = Word(tuple(clusters), span)
    _validate_word(word)
    return word


def _validate_word(word: Word) -> None:
    stress_count = 0
    for cluster in word.clusters:
        if cluster.has(MarkKind.STRESS):
            stress_count += 1
        if cluster.has(MarkKind.VOCAL_SHVA) and not cluster.has(MarkKind.SHVA):
            raise MalformedWordError("vocal-shva marker without a shva")
        if (MarkKind.SHIN_DOT in cluster.marks or MarkKind.SIN_DOT in cluster.marks):
            if cluster.base != SHIN:
                raise MalformedWordError("shin/sin dot on a letter other than shin")
            if MarkKind.SHIN_DOT in cluster.marks and MarkKind.SIN_DOT in cluster.marks:
                raise MalformedWordError("both shin and sin dots on one letter")
    if stress_count > 1:
        raise DuplicateStressError("more than one stress mark in a word")


def validate_word(word: Word) -> None:
    """Re-check Word invariants on a programmatically built Word."""
    _validate_word(word)
    for cluster in word.clusters:
        vowels = [m for m in cluster.marks if m in VOWEL_CLASS]
        if len(vowels) > 1:
            raise DuplicateMarkError("two vowel marks on one letter")
        if cluster.letter not in LETTER_SET:
            raise MalformedWordError(f"not a Hebrew letter: {cluster.letter!r}")


def serialize(word: Word) -> str:
    """Inverse of parse_word on normalized runs (exact round-trip)."""
    out: list[str] = []
    for cluster in word.clusters:
        out.append(cluster.letter)
        if cluster.geresh:
            out.append(GERESH)
        for kind in sorted(cluster.marks, key=_mark_sort_key):
            out.append(kind.value)
        if cluster.prefix_boundary_after:
            out.append(MarkKind.PREFIX_SEP.value)
    return "".join(out)


def strip_enhanced_marks(text: str, keep_vocal_shva: bool = False) -> str:
    """Remove the three enhanced marks from a text, keeping everything else."""
    drop = {MarkKind.STRESS.value, MarkKind.PREFIX_SEP.value}
    if not keep_vocal_shva:
        drop.add(MarkKind.VOCAL_SHVA.value)
    return "".join(ch for ch in text if ch not in drop)
