"""Hebrew grapheme-to-phoneme conversion with enhanced diacritics.

High-level use::

    import phonikud
    ipa = phonikud.phonemize("...")    # marked Hebrew in, IPA out
"""

from __future__ import annotations

from typing import Optional

from . import annotate, corpus, diacritizer, g2p, hebrew, lexicon, metrics
from .diacritizer import ProviderKind, RemoteConfig, apply_defaults
from .g2p import (
    Convention,
    Narrowness,
    StressPosition,
    phonemize_text,
    phonemize_word,
    place_stress,
)
from .hebrew import Document, GraphemeCluster, MarkKind, Word, normalize, parse_word, serialize, tokenize
from .lexicon import Lexicon
from .metrics import cer, edit_distance, evaluate_corpus, wer, wer_sigma

__version__ = "0.1.0"

__all__ = [
    "annotate", "corpus", "diacritizer", "g2p", "hebrew", "lexicon", "metrics",
    "ProviderKind", "RemoteConfig", "apply_defaults",
    "Convention", "Narrowness", "StressPosition",
    "phonemize", "phonemize_text", "phonemize_word", "place_stress",
    "Document", "GraphemeCluster", "MarkKind", "Word",
    "normalize", "parse_word", "serialize", "tokenize",
    "Lexicon", "cer", "edit_distance", "evaluate_corpus", "wer", "wer_sigma",
    "__version__",
]


def phonemize(text: str, convention: str = "broad", stress: str = "syllable",
              lex: Optional[Lexicon] = None) -> str:
    """Convert one line of marked Hebrew text to IPA.

    ``convention`` is ``broad``/``narrow``; ``stress`` is ``syllable``/
    ``vowel``.  Uses the built-in starter lexicon unless one is supplied.
    """
    conv = Convention(
        stress_position=StressPosition(stress),
        narrowness=Narrowness(convention),
    )
    if lex is None:
        lex = lexicon.load_default()
    doc = tokenize(normalize(text))
    out, _ = phonemize_text(doc, conv, lex)
    return out
