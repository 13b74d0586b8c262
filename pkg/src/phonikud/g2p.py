"""Deterministic rule engine converting vocalized Hebrew words to IPA.

The engine is a single left-to-right pass over grapheme clusters with a
bounded context window (two clusters of lookbehind/lookahead), equivalent to
a finite-state transducer whose states are the context classes listed in
``CONTEXTUAL_RULES``.  Output is fully specified: every word containing a
vowel carries exactly one stress mark, placed according to the requested
convention.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, TYPE_CHECKING

from . import hebrew
from .hebrew import (
    Document,
    GraphemeCluster,
    MarkKind,
    Passthrough,
    Word,
)

if TYPE_CHECKING:  # pragma: no cover
    from .lexicon import Lexicon

STRESS = "ˈ"

#: Broad-convention phoneme inventory.
CONSONANTS = frozenset({
    "b", "v", "g", "dʒ", "d", "h", "w", "z", "ʒ", "x", "t", "j", "k",
    "l", "m", "n", "s", "ʔ", "p", "f", "ts", "tʃ", "r", "ʃ",
})
VOWELS = frozenset({"a", "e", "i", "o", "u"})

#: Narrow convention swaps the two symbols usually realized as uvulars.
NARROW_SUBSTITUTION = {"x": "χ", "r": "ʁ"}

_BROAD_SYMBOLS = CONSONANTS | VOWELS
_NARROW_SYMBOLS = (CONSONANTS - {"x", "r"}) | {"χ", "ʁ"} | VOWELS
_ALL_SYMBOLS = _BROAD_SYMBOLS | _NARROW_SYMBOLS


class StressPosition(Enum):
    BEFORE_SYLLABLE = "syllable"
    BEFORE_VOWEL = "vowel"


class Narrowness(Enum):
    BROAD = "broad"
    NARROW = "narrow"


@dataclass(frozen=True)
class Convention:
    """Output conventions: stress-mark position and symbol narrowness."""

    stress_position: StressPosition = StressPosition.BEFORE_SYLLABLE
    narrowness: Narrowness = Narrowness.BROAD


#: Storage-canonical convention for lexicon values.
STORAGE_CONVENTION = Convention(StressPosition.BEFORE_VOWEL, Narrowness.BROAD)


class G2PError(ValueError):
    pass


class UnmappableClusterError(G2PError):
    """A cluster whose letter+marks combination has no rule."""

    def __init__(self, message: str, index: int = -1) -> None:
        super().__init__(message)
        self.index = index


class IndexNotVowelError(G2PError):
    pass


class InvalidIpaError(G2PError):
    pass


# --- rule tables -----------------------------------------------------------

PLAIN_CONSONANTS = {
    hebrew.ALEF: "ʔ",
    hebrew.BET: "v",
    hebrew.GIMEL: "g",
    hebrew.DALET: "d",
    hebrew.HE: "h",
    hebrew.VAV: "v",
    hebrew.ZAYIN: "z",
    hebrew.HET: "x",
    hebrew.TET: "t",
    hebrew.YUD: "j",
    hebrew.KAF: "x",
    hebrew.LAMED: "l",
    hebrew.MEM: "m",
    hebrew.NUN: "n",
    hebrew.SAMEKH: "s",
    hebrew.AYIN: "ʔ",
    hebrew.PE: "f",
    hebrew.TSADI: "ts",
    hebrew.QUF: "k",
    hebrew.RESH: "r",
    hebrew.SHIN: "ʃ",
    hebrew.TAV: "t",
}

#: Dagesh selects the plosive reading of the three bgdkpt letters that still
#: alternate in Modern Hebrew.
DAGESH_CONSONANTS = {hebrew.BET: "b", hebrew.KAF: "k", hebrew.PE: "p"}

#: Geresh digraphs for loanword sounds.
GERESH_CONSONANTS = {hebrew.GIMEL: "dʒ", hebrew.ZAYIN: "ʒ", hebrew.TSADI: "tʃ"}

VOWEL_MAP = {
    MarkKind.HATAF_SEGOL: "e",
    MarkKind.HATAF_PATAH: "a",
    MarkKind.HATAF_QAMATS: "o",
    MarkKind.HIRIQ: "i",
    MarkKind.TSERE: "e",
    MarkKind.SEGOL: "e",
    MarkKind.PATAH: "a",
    MarkKind.QAMATS: "a",
    MarkKind.HOLAM: "o",
    MarkKind.QUBUTS: "u",
}

#: Word forms whose qamats reads /o/ (ordinals of qamats occurrences, left to
#: right).  Keys are normalized at load so source encoding order is free.
_QAMATS_QATAN_SOURCE = {
    "כָּל": (0,),
    "כָל": (0,),
    "חָכְמָה": (0,),
    "תָּכְנִית": (0,),
    "אָמְנָם": (0,),
}
QAMATS_QATAN_FORMS = {hebrew.normalize(k): v for k, v in _QAMATS_QATAN_SOURCE.items()}

#: Context-sensitive transitions.  Each entry is (rule id, input class,
#: context class, output) and corresponds to one branch of the transducer.
CONTEXTUAL_RULES = (
    ("vav-pair-mater", "vav vav", "second carries holam or plain dagesh", "v + vowel"),
    ("vav-pair-cons", "vav vav", "second carries its own vowel mark", "(first silent) + v + vowel"),
    ("vav-pair-bare", "vav vav", "neither carries a mark", "v"),
    ("vav-shuruk", "vav + dagesh, no vowel", "word-initial or after vowelless letter", "u"),
    ("vav-holam-mater", "vav + holam", "after vowelless letter", "o"),
    ("vav-consonant", "vav", "otherwise", "v (+ own vowel)"),
    ("yud-after-hiriq", "bare yud", "previous letter carries hiriq", "(silent)"),
    ("yud-glide", "bare yud", "previous letter carries tsere/segol", "j"),
    ("yud-doubled", "bare yud", "previous letter is yud", "(silent)"),
    ("yud-consonant", "yud", "otherwise", "j (+ own vowel)"),
    ("glottal-bare", "alef/ayin, no vowel slot", "not word-initial", "(silent)"),
    ("glottal-initial", "alef/ayin", "word-initial", "ʔ (+ own vowel)"),
    ("he-bare", "he, no vowel slot", "not word-initial", "(silent)"),
    ("he-initial", "he", "word-initial, bare", "h"),
    ("he-mappiq-final", "he + dagesh", "word-final", "(silent; approximated)"),
    ("furtive-patah", "final het/ayin/mappiq-he + patah", "after a non-/a/ vowel", "a + consonant"),
    ("qamats-qatan-context", "qamats", "next letter carries hataf-qamats", "o"),
    ("qamats-qatan-listed", "qamats", "word form in exception list", "o"),
    ("shva-silent", "shva", "no vocal-shva marker", "(silent)"),
    ("shva-vocal", "shva + vocal-shva marker", "any", "e"),
    ("dagesh-plosive", "bet/kaf/pe + dagesh", "any", "b/k/p"),
    ("shin-dot", "shin + shin dot or undotted", "any", "ʃ"),
    ("sin-dot", "shin + sin dot", "any", "s"),
    ("gemination", "any letter + dagesh forte", "any", "single consonant (not doubled)"),
)


@dataclass(frozen=True)
class Phone:
    """One output symbol with the cluster index it came from."""

    symbol: str
    source: int
    vowel: bool


@dataclass(frozen=True)
class Diagnostic:
    span: tuple[int, int]
    text: str
    reason: str


def _vowel_slot_filled(cluster: GraphemeCluster) -> bool:
    """True when the cluster's vowel slot is occupied (shva included)."""
    return cluster.vowel is not None or cluster.has(MarkKind.HOLAM_HASER_FOR_VAV)


def _qamats_qatan_positions(word: Word) -> frozenset[int]:
    positions: set[int] = set()
    clusters = word.clusters
    for i, cluster in enumerate(clusters):
        if cluster.has(MarkKind.QAMATS) and i + 1 < len(clusters) \
                and clusters[i + 1].has(MarkKind.HATAF_QAMATS):
            positions.add(i)

    def listed(cs: Sequence[GraphemeCluster], offset: int) -> None:
        bare = hebrew.strip_enhanced_marks(
            hebrew.serialize(Word(tuple(cs))), keep_vocal_shva=False)
        ordinals = QAMATS_QATAN_FORMS.get(bare)
        if ordinals is None:
            return
        seen = -1
        for i, cluster in enumerate(cs):
            if cluster.has(MarkKind.QAMATS):
                seen += 1
                if seen in ordinals:
                    positions.add(offset + i)

    listed(clusters, 0)
    prefix_len = _prefix_length(word)
    if prefix_len:
        listed(clusters[prefix_len:], prefix_len)
    return frozenset(positions)


def _prefix_length(word: Word) -> int:
    """Cluster count of the prefix chain (up to the last boundary marker)."""
    last = 0
    for i, cluster in enumerate(word.clusters):
        if cluster.prefix_boundary_after:
            last = i + 1
    return last


def _vowel_of(cluster: GraphemeCluster, index: int,
              qatan: frozenset[int]) -> Optional[str]:
    mark = cluster.vowel
    if mark is None:
        return None
    if mark is MarkKind.SHVA:
        return "e" if cluster.has(MarkKind.VOCAL_SHVA) else None
    if mark is MarkKind.QAMATS and index in qatan:
        return "o"
    return VOWEL_MAP[mark]


def _transduce(clusters: Sequence[GraphemeCluster], *, word_final: bool = True,
               qatan: frozenset[int] = frozenset()) -> list[Phone]:
    """One deterministic pass over the clusters; the FST core."""
    phones: list[Phone] = []
    n = len(clusters)

    # pair up adjacent vavs left to right: doubling spells one consonant
    pair_first: set[int] = set()
    pair_second: set[int] = set()
    i = 0
    while i < n - 1:
        if clusters[i].base == hebrew.VAV and clusters[i + 1].base == hebrew.VAV \
                and not clusters[i].geresh and not clusters[i + 1].geresh:
            pair_first.add(i)
            pair_second.add(i + 1)
            i += 2
        else:
            i += 1

    def push(symbol: str, source: int, vowel: bool) -> None:
        phones.append(Phone(symbol, source, vowel))

    def push_vowel(cluster: GraphemeCluster, index: int) -> None:
        v = _vowel_of(cluster, index, qatan)
        if v is not None:
            push(v, index, True)

    def last_vowel_symbol() -> Optional[str]:
        for phone in reversed(phones):
            if phone.vowel:
                return phone.symbol
        return None

    for i, cluster in enumerate(clusters):
        base = cluster.base
        marks = cluster.marks
        prev = clusters[i - 1] if i > 0 else None
        is_last = (i == n - 1) and word_final
        if base not in PLAIN_CONSONANTS:
            raise UnmappableClusterError(f"no rule for letter {cluster.letter!r}", i)

        has_vowel_mark = cluster.vowel is not None
        holamish = cluster.has(MarkKind.HOLAM) or cluster.has(MarkKind.HOLAM_HASER_FOR_VAV)
        if cluster.has(MarkKind.HOLAM_HASER_FOR_VAV):
            if base != hebrew.VAV:
                raise UnmappableClusterError(
                    "holam-haser-for-vav on a letter other than vav", i)
            if has_vowel_mark:
                raise UnmappableClusterError(
                    "holam-haser-for-vav combined with another vowel", i)

        if base == hebrew.VAV:
            if i in pair_second:
                if cluster.has(MarkKind.DAGESH) and not has_vowel_mark and not holamish:
                    push("u", i, True)       # vav-pair-mater (shuruk)
                elif holamish:
                    push("o", i, True)       # vav-pair-mater (holam)
                elif has_vowel_mark:
                    push("v", i, False)      # vav-pair-cons
                    push_vowel(cluster, i)
                # else: vav-pair-bare, second silent
                continue
            if i in pair_first:
                nxt = clusters[i + 1]
                nxt_mater = (nxt.has(MarkKind.DAGESH) and nxt.vowel is None) \
                    or nxt.has(MarkKind.HOLAM) or nxt.has(MarkKind.HOLAM_HASER_FOR_VAV)
                if nxt.vowel is not None and not nxt_mater:
                    # vav-pair-cons: the doubled pair spells the second vav
                    if has_vowel_mark:
                        push("v", i, False)
                        push_vowel(cluster, i)
                    continue
                push("v", i, False)
                push_vowel(cluster, i)
                continue
            prev_open = prev is not None and not _vowel_slot_filled(prev)
            if cluster.has(MarkKind.DAGESH) and not has_vowel_mark and not holamish:
                if prev is None or prev_open:
                    push("u", i, True)       # vav-shuruk
                else:
                    push("v", i, False)      # geminated consonant vav
                continue
            if holamish:
                if prev is not None and prev_open:
                    push("o", i, True)       # vav-holam-mater
                else:
                    push("v", i, False)      # vav-consonant with holam
                    push("o", i, True)
                continue
            push("v", i, False)              # vav-consonant
            push_vowel(cluster, i)
            continue

        if base == hebrew.YUD and not has_vowel_mark and not cluster.has(MarkKind.DAGESH):
            if prev is not None:
                if prev.has(MarkKind.HIRIQ):
                    continue                 # yud-after-hiriq: absorbed
                if prev.has(MarkKind.TSERE) or prev.has(MarkKind.SEGOL):
                    push("j", i, False)      # yud-glide: /ej/
                    continue
                if prev.base == hebrew.YUD:
                    continue                 # yud-doubled: spelling variant
            push("j", i, False)
            continue

        if base in (hebrew.ALEF, hebrew.AYIN):
            bare = not has_vowel_mark
            if base == hebrew.AYIN and is_last and cluster.has(MarkKind.PATAH):
                lv = last_vowel_symbol()
                if lv is not None and lv != "a":
                    push("a", i, True)       # furtive-patah
                    push("ʔ", i, False)
                    continue
            if bare:
                if i == 0:
                    push("ʔ", i, False)      # glottal-initial
                # else glottal-bare: silent
                continue
            push("ʔ", i, False)
            push_vowel(cluster, i)
            continue

        if base == hebrew.HE:
            if is_last and cluster.has(MarkKind.DAGESH):
                # he-mappiq-final; furtive patah surfaces, the h does not
                if cluster.has(MarkKind.PATAH):
                    lv = last_vowel_symbol()
                    if lv is None or lv != "a":
                        push("a", i, True)
                else:
                    push_vowel(cluster, i)
                continue
            if not has_vowel_mark:
                if i == 0:
                    push("h", i, False)      # he-initial
                # else he-bare: mater or silent final he
                continue
            push("h", i, False)
            push_vowel(cluster, i)
            continue

        if base == hebrew.HET and is_last and cluster.has(MarkKind.PATAH):
            lv = last_vowel_symbol()
            if lv is not None and lv != "a":
                push("a", i, True)           # furtive-patah
                push("x", i, False)
                continue

        if cluster.geresh and base in GERESH_CONSONANTS:
            push(GERESH_CONSONANTS[base], i, False)
        elif base == hebrew.SHIN and cluster.has(MarkKind.SIN_DOT):
            push("s", i, False)
        elif cluster.has(MarkKind.DAGESH) and base in DAGESH_CONSONANTS:
            push(DAGESH_CONSONANTS[base], i, False)
        else:
            push(PLAIN_CONSONANTS[base], i, False)
        push_vowel(cluster, i)

    return phones


def word_vowel_sources(word: Word) -> list[int]:
    """Cluster index of each vowel phone the word produces, in output order.

    This is the syllable-nucleus count used for stress annotation: a shva
    contributes only when marked vocal.
    """
    return [p.source for p in _transduce(word.clusters) if p.vowel]


def _stressed_vowel_position(word: Word, phones: Sequence[Phone]) -> Optional[int]:
    """Index into ``phones`` of the stressed vowel, or None if vowelless."""
    vowel_positions = [k for k, p in enumerate(phones) if p.vowel]
    if not vowel_positions:
        return None
    stress_cluster = word.stress_cluster()
    if stress_cluster is None:
        return vowel_positions[-1]
    for k in vowel_positions:
        if phones[k].source >= stress_cluster:
            return k
    return vowel_positions[-1]


def place_stress(symbols: Sequence[str], stressed_index: int,
                 convention: Convention) -> list[str]:
    """Insert the stress delimiter for the vowel at ``stressed_index``.

    BEFORE_VOWEL places it immediately before the vowel.  BEFORE_SYLLABLE
    places it before the syllable onset: every leading consonant when the
    stressed vowel is the word's first vowel, otherwise the single consonant
    immediately preceding it (none when a vowel directly precedes).
    """
    if not (0 <= stressed_index < len(symbols)) or symbols[stressed_index] not in VOWELS:
        raise IndexNotVowelError(f"index {stressed_index} is not a vowel")
    out = list(symbols)
    if convention.stress_position is StressPosition.BEFORE_VOWEL:
        out.insert(stressed_index, STRESS)
        return out
    first_vowel = next(k for k, s in enumerate(symbols) if s in VOWELS)
    if stressed_index == first_vowel:
        out.insert(0, STRESS)
    elif symbols[stressed_index - 1] not in VOWELS:
        out.insert(stressed_index - 1, STRESS)
    else:
        out.insert(stressed_index, STRESS)
    return out


def _render(symbols: list[str], stressed: Optional[int],
            convention: Convention) -> str:
    if convention.narrowness is Narrowness.NARROW:
        symbols = [NARROW_SUBSTITUTION.get(s, s) for s in symbols]
    if stressed is not None:
        symbols = place_stress(symbols, stressed, convention)
    return "".join(symbols)


def phonemize_word(word: Word, convention: Convention = Convention(),
                   lexicon: Optional["Lexicon"] = None) -> str:
    """Transcribe one word under a convention, consulting the lexicon first.

    On a lexicon hit for the prefix-stripped stem, the prefix chain is
    transcribed by rule and concatenated with the stored transcription.
    """
    prefix_len = _prefix_length(word)
    if lexicon is not None and prefix_len < len(word.clusters):
        stem = Word(word.clusters[prefix_len:])
        entry = lexicon.lookup_stem(stem)
        if entry is not None:
            prefix_symbols: list[str] = []
            if prefix_len:
                prefix_phones = _transduce(word.clusters[:prefix_len],
                                           word_final=False)
                prefix_symbols = [p.symbol for p in prefix_phones]
            stem_symbols, stem_stress = parse_ipa_word(entry.ipa)
            symbols = prefix_symbols + stem_symbols
            stressed = None if stem_stress is None else len(prefix_symbols) + stem_stress
            return _render(symbols, stressed, convention)

    phones = _transduce(word.clusters, qatan=_qamats_qatan_positions(word))
    stressed = _stressed_vowel_position(word, phones)
    return _render([p.symbol for p in phones], stressed, convention)


def phonemize_text(doc: Document, convention: Convention = Convention(),
                   lexicon: Optional["Lexicon"] = None) -> tuple[str, list[Diagnostic]]:
    """Transcribe a tokenized document; per-word failures become diagnostics.

    Passthrough segments collapse to single-space word separators.
    """
    out_words: list[str] = []
    diagnostics: list[Diagnostic] = []
    for seg in doc.segments:
        if isinstance(seg, Passthrough):
            if seg.error is not None:
                diagnostics.append(Diagnostic(seg.span, seg.text, seg.error))
            continue
        try:
            out_words.append(phonemize_word(seg, convention, lexicon))
        except UnmappableClusterError as exc:
            diagnostics.append(Diagnostic(seg.span, seg.text, str(exc)))
    return " ".join(w for w in out_words if w), diagnostics


# --- IPA string helpers ----------------------------------------------------

_SYMBOLS_DESC = sorted(_ALL_SYMBOLS, key=lambda s: (-len(s), s))
_TOKEN_RE = re.compile("|".join(re.escape(s) for s in _SYMBOLS_DESC) + f"|{STRESS}|.")


def inventory(narrowness: Narrowness = Narrowness.BROAD) -> frozenset[str]:
    return _NARROW_SYMBOLS if narrowness is Narrowness.NARROW else _BROAD_SYMBOLS


def split_symbols(ipa_word: str) -> list[str]:
    """Greedy longest-match split of an IPA word into inventory symbols.

    The stress delimiter is kept as its own element.  Raises InvalidIpaError
    on any character outside the inventory.
    """
    symbols = _TOKEN_RE.findall(ipa_word)
    for s in symbols:
        if s != STRESS and s not in _ALL_SYMBOLS:
            raise InvalidIpaError(f"symbol {s!r} outside the IPA inventory")
    return symbols


def parse_ipa_word(ipa_word: str) -> tuple[list[str], Optional[int]]:
    """Split an IPA word; return (symbols without stress, stressed index).

    The stressed index points at the vowel the stress delimiter precedes,
    as stored in the lexicon's before-vowel canonical form.
    """
    symbols = split_symbols(ipa_word)
    if symbols.count(STRESS) > 1:
        raise InvalidIpaError("more than one stress mark in a word")
    stressed: Optional[int] = None
    plain: list[str] = []
    for s in symbols:
        if s == STRESS:
            stressed = len(plain)
        else:
            plain.append(s)
    if stressed is not None:
        if stressed >= len(plain) or plain[stressed] not in VOWELS:
            raise InvalidIpaError("stress mark does not precede a vowel")
    return plain, stressed


def validate_ipa_word(ipa_word: str,
                      narrowness: Optional[Narrowness] = None) -> None:
    """Check one word against the phoneme-string grammar.

    Inventory membership, at most one stress mark, and the exactly-one-stress
    rule for voweled words.  ``narrowness`` restricts the accepted inventory;
    by default both conventions' symbols are accepted.
    """
    symbols = split_symbols(ipa_word)
    allowed = _ALL_SYMBOLS if narrowness is None else inventory(narrowness)
    stress_count = 0
    has_vowel = False
    for s in symbols:
        if s == STRESS:
            stress_count += 1
            continue
        if s not in allowed:
            raise InvalidIpaError(f"symbol {s!r} outside the convention's inventory")
        if s in VOWELS:
            has_vowel = True
    if has_vowel and stress_count != 1:
        raise InvalidIpaError("a voweled word must carry exactly one stress mark")
    if not has_vowel and stress_count:
        raise InvalidIpaError("stress mark in a vowelless word")


def validate_phoneme_string(text: str,
                            narrowness: Optional[Narrowness] = None) -> None:
    """Validate a whole transcription: words separated by single spaces."""
    if text == "":
        return
    if "  " in text or text != text.strip():
        raise InvalidIpaError("words must be separated by single spaces")
    for word in text.split(" "):
        validate_ipa_word(word, narrowness)


def dump_rules() -> str:
    """Machine-readable TSV dump of the full transition table, for audit."""
    rows = ["section\tinput\tcontext\toutput"]
    for letter, symbol in sorted(PLAIN_CONSONANTS.items()):
        rows.append(f"consonant\t{letter}\tplain\t{symbol}")
    for letter, symbol in sorted(DAGESH_CONSONANTS.items()):
        rows.append(f"consonant\t{letter}ּ\tdagesh\t{symbol}")
    for letter, symbol in sorted(GERESH_CONSONANTS.items()):
        rows.append(f"consonant\t{letter}׳\tgeresh\t{symbol}")
    for mark, symbol in VOWEL_MAP.items():
        rows.append(f"vowel\t{mark.name}\tany\t{symbol}")
    for rule_id, inp, ctx, out in CONTEXTUAL_RULES:
        rows.append(f"context\t{inp}\t{ctx} [{rule_id}]\t{out}")
    for broad, narrow in sorted(NARROW_SUBSTITUTION.items()):
        rows.append(f"narrow\t{broad}\tnarrow convention\t{narrow}")
    return "\n".join(rows) + "\n"


def rule_count() -> int:
    """Number of data rows dump_rules emits (documented in docs/rules.md)."""
    return (len(PLAIN_CONSONANTS) + len(DAGESH_CONSONANTS) + len(GERESH_CONSONANTS)
            + len(VOWEL_MAP) + len(CONTEXTUAL_RULES) + len(NARROW_SUBSTITUTION))
