"""Irregular-word dictionary with prefix-aware stem lookup.

Keys are normalized vocalized stems (enhanced marks stripped except the
vocal-shva marker); values are transcriptions in the storage-canonical
broad/before-vowel convention.  Prefixes always transcribe by rule, which is
exactly what the prefix-boundary mark makes possible.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib.resources import files
from pathlib import Path
from typing import Iterable, Optional, Union

from . import g2p, hebrew
from .hebrew import Word


class LexiconError(ValueError):
    def __init__(self, message: str, line: int = 0) -> None:
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


class ParseError(LexiconError):
    pass


class InvalidKeyError(LexiconError):
    pass


class InvalidIpaError(LexiconError):
    pass


class DuplicateKeyError(LexiconError):
    pass


@dataclass(frozen=True)
class LexiconEntry:
    key: str       # normalized vocalized stem
    ipa: str       # broad/before-vowel word transcription
    line: int = 0


def _key_form(text: str) -> str:
    """Canonical lookup form: normalized, stress/prefix marks stripped."""
    return hebrew.strip_enhanced_marks(hebrew.normalize(text), keep_vocal_shva=True)


class Lexicon:
    """Immutable after load; shareable across threads."""

    def __init__(self, entries: Iterable[LexiconEntry] = (), source: str = "") -> None:
        self._entries: list[LexiconEntry] = []
        self._by_key: dict[str, LexiconEntry] = {}
        self.source = source
        for entry in entries:
            self._add(entry)

    def _add(self, entry: LexiconEntry) -> None:
        if entry.key in self._by_key:
            raise DuplicateKeyError(f"duplicate key {entry.key!r}", entry.line)
        self._entries.append(entry)
        self._by_key[entry.key] = entry

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    def lookup(self, surface: str) -> Optional[LexiconEntry]:
        return self._by_key.get(_key_form(surface))

    def lookup_stem(self, word: Word) -> Optional[LexiconEntry]:
        """Strip the prefix chain at the last boundary, then exact-match."""
        last = 0
        for i, cluster in enumerate(word.clusters):
            if cluster.prefix_boundary_after:
                last = i + 1
        stem = Word(word.clusters[last:])
        if not stem.clusters:
            return None
        return self._by_key.get(_key_form(hebrew.serialize(stem)))


def _validate_entry(surface: str, ipa: str, line: int) -> LexiconEntry:
    key = _key_form(surface)
    doc = hebrew.tokenize(key)
    words = list(doc.words())
    if len(doc.segments) != 1 or len(words) != 1:
        raise InvalidKeyError(f"key {surface!r} is not a single Hebrew word", line)
    if any(isinstance(seg, hebrew.Passthrough) for seg in doc.segments):
        raise InvalidKeyError(f"key {surface!r} does not parse cleanly", line)
    try:
        symbols, stressed = g2p.parse_ipa_word(ipa)
    except g2p.InvalidIpaError as exc:
        raise InvalidIpaError(str(exc), line) from exc
    has_vowel = any(s in g2p.VOWELS for s in symbols)
    if has_vowel and stressed is None:
        raise InvalidIpaError("voweled value must carry one stress mark", line)
    if any(s not in g2p.inventory(g2p.Narrowness.BROAD) for s in symbols):
        raise InvalidIpaError("value must use the broad inventory", line)
    return LexiconEntry(key=key, ipa=ipa, line=line)


def load(path: Union[str, Path]) -> Lexicon:
    """Load a TSV lexicon: ``surface<TAB>ipa``, ``#`` comments, blank lines."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return loads(text, source=str(path))


def loads(text: str, source: str = "<string>") -> Lexicon:
    lexicon = Lexicon(source=source)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise ParseError(f"expected 2 tab-separated fields, got {len(fields)}",
                             lineno)
        surface, ipa = fields[0].strip(), fields[1].strip()
        if not surface or not ipa:
            raise ParseError("empty field", lineno)
        lexicon._add(_validate_entry(surface, ipa, lineno))
    return lexicon


def save(lexicon: Lexicon, path: Union[str, Path]) -> None:
    """Order-preserving TSV serialization (comments are not retained)."""
    lines = [f"{entry.key}\t{entry.ipa}" for entry in lexicon]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""),
                          encoding="utf-8")


def load_default() -> Lexicon:
    """The starter lexicon shipped with the package."""
    data = files("phonikud").joinpath("data/lexicon.tsv").read_text(encoding="utf-8")
    return loads(data, source="phonikud:data/lexicon.tsv")
