"""Corpus metadata I/O and the embedded golden example set.

The metadata format is pipe-delimited, one record per line:
``id|hebrew|ipa`` with exactly two delimiters.  The golden set holds the
pronunciation pairs the engine must reproduce exactly, each tagged with a
short human-readable note for traceability.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib.resources import files
from pathlib import Path
from typing import Union

from . import g2p, hebrew
from .g2p import Convention, Narrowness, StressPosition


class CorpusError(ValueError):
    def __init__(self, message: str, line: int = 0) -> None:
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


class BadDelimiterCountError(CorpusError):
    pass


class DuplicateIdError(CorpusError):
    pass


class InvalidIpaError(CorpusError):
    pass


class EmptyFieldError(CorpusError):
    pass


@dataclass(frozen=True)
class CorpusItem:
    id: str
    hebrew: str
    ipa: str
    line: int = 0


def load_metadata(path: Union[str, Path]) -> list[CorpusItem]:
    return parse_metadata(Path(path).read_text(encoding="utf-8"))


def parse_metadata(text: str) -> list[CorpusItem]:
    items: list[CorpusItem] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        if raw.count("|") != 2:
            raise BadDelimiterCountError(
                f"expected 2 '|' delimiters, found {raw.count('|')}", lineno)
        item_id, heb, ipa = raw.split("|")
        item_id, heb, ipa = item_id.strip(), heb.strip(), ipa.strip()
        if not item_id or not heb:
            raise EmptyFieldError("id and hebrew fields must be nonempty", lineno)
        if item_id in seen:
            raise DuplicateIdError(f"duplicate id {item_id!r}", lineno)
        try:
            g2p.validate_phoneme_string(ipa)
        except g2p.InvalidIpaError as exc:
            raise InvalidIpaError(str(exc), lineno) from exc
        seen.add(item_id)
        items.append(CorpusItem(item_id, heb, ipa, lineno))
    return items


def save_metadata(items: list[CorpusItem], path: Union[str, Path]) -> None:
    lines = [f"{item.id}|{item.hebrew}|{item.ipa}" for item in items]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""),
                          encoding="utf-8")


@dataclass(frozen=True)
class GoldenExample:
    hebrew: str          # enhanced-vocalized, normalized
    ipa: str             # expected transcription under `convention`
    convention: Convention
    note: str            # what the pair demonstrates


_SHVA = "ְ"
_HATAF_QAMATS = "ֳ"
_HIRIQ = "ִ"
_TSERE = "ֵ"
_SEGOL = "ֶ"
_PATAH = "ַ"
_QAMATS = "ָ"
_HOLAM = "ֹ"
_DAGESH = "ּ"
_STRESS = "֫"
_VOCAL = "ֽ"
_SEP = "׀"

_BROAD_SYL = Convention(StressPosition.BEFORE_SYLLABLE, Narrowness.BROAD)
_NARROW_VOW = Convention(StressPosition.BEFORE_VOWEL, Narrowness.NARROW)

_GOLDEN_SOURCE: tuple[tuple[str, str, Convention, str], ...] = (
    ("ס" + _TSERE + _STRESS + "פ" + _SEGOL + "ר", "ˈsefer", _BROAD_SYL,
     "four-way ambiguous spelling, reading: book"),
    ("ס" + _PATAH + "פ" + _DAGESH + _QAMATS + "ר", "saˈpar", _BROAD_SYL,
     "four-way ambiguous spelling, reading: barber"),
    ("ס" + _QAMATS + "פ" + _PATAH + "ר", "saˈfar", _BROAD_SYL,
     "four-way ambiguous spelling, reading: he counted"),
    ("ס" + _SHVA + "פ" + _QAMATS + "ר", "ˈsfar", _BROAD_SYL,
     "four-way ambiguous spelling, reading: suburb"),
    ("ב" + _DAGESH + _HIRIQ + _STRESS + "יר" + _QAMATS + "ה", "ˈbira", _BROAD_SYL,
     "stress minimal pair: beer"),
    ("ב" + _DAGESH + _HIRIQ + "יר" + _QAMATS + "ה", "biˈra", _BROAD_SYL,
     "stress minimal pair: capital city (unmarked = final stress)"),
    ("ת" + _DAGESH + _SHVA + "ח" + _HIRIQ + _STRESS + "ינ" + _QAMATS + "ה",
     "ˈtxina", _BROAD_SYL, "stress minimal pair: tahini"),
    ("ת" + _DAGESH + _SHVA + "ח" + _HIRIQ + "ינ" + _QAMATS + "ה",
     "txiˈna", _BROAD_SYL, "stress minimal pair: grinding"),
    ("ב" + _DAGESH + _SHVA + _VOCAL + "לו" + _HOLAM + _STRESS + "נ" + _SHVA
     + "דו" + _HOLAM + "ן", "beˈlondon", _BROAD_SYL,
     "vocal shva pronounced /e/: in London"),
    ("ב" + _DAGESH + _SHVA + "לו" + _HOLAM + "נ" + _SHVA + "ד" + _HIRIQ
     + _STRESS + "ינ" + _HIRIQ + "י", "blonˈdini", _BROAD_SYL,
     "silent shva in the same position: blonde"),
    ("פ" + _DAGESH + _HIRIQ + "ינ" + _SHVA + "ג" + _DAGESH + _SHVA + "ו"
     + _HIRIQ + "ין", "ˈpingwin", _BROAD_SYL,
     "irregular loanword via lexicon: penguin (/w/ spelled like /v/)"),
    ("ה" + _PATAH + _SEP + "פ" + _DAGESH + _HIRIQ + "ינ" + _SHVA + "ג"
     + _DAGESH + _SHVA + "ו" + _HIRIQ + "ין", "haˈpingwin", _BROAD_SYL,
     "prefix boundary enables stem lookup: the penguin"),
    ("ל" + _SEGOL + _STRESS + "ח" + _SEGOL + "ם", "ˈlexem", _BROAD_SYL,
     "non-final stress marking: bread"),
    ("ה" + _PATAH + _SEP + "ק" + _DAGESH + "ו" + _HOLAM + "ד", "haˈkod", _BROAD_SYL,
     "cliticized prefix transcribed by rule: the code"),
    ("ב" + _DAGESH + "ו" + _HOLAM + _STRESS + "ק" + _SEGOL + "ר"
     + " " + "טו" + _HOLAM + "ב", "ˈboker ˈtov", _BROAD_SYL,
     "two-word benchmark phrase: good morning"),
    ("רו" + _DAGESH + _STRESS + "ח" + _PATAH, "ˈruax", _BROAD_SYL,
     "furtive patah read before its consonant: wind/spirit (broad)"),
    ("רו" + _DAGESH + _STRESS + "ח" + _PATAH, "ʁˈuaχ", _NARROW_VOW,
     "same word under the narrow, stress-before-vowel convention"),
    ("מ" + _SHVA + _VOCAL + "ת" + _HIRIQ + "יח" + _QAMATS + "ה",
     "metiˈxa", _BROAD_SYL, "vocal shva on the first letter: stretching"),
)


def golden_examples() -> list[GoldenExample]:
    """Embedded pronunciation pairs used as the exact-match acceptance set."""
    return [
        GoldenExample(hebrew.normalize(heb), ipa, convention, note)
        for heb, ipa, convention, note in _GOLDEN_SOURCE
    ]


def north_wind_text() -> str:
    """Unvocalized harness fixture: a short fable, one sentence per line."""
    return files("phonikud").joinpath("data/north_wind.txt").read_text(encoding="utf-8")
