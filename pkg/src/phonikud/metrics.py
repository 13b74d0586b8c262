"""Word and character error rates over IPA transcriptions.

WER compares space-split word tokens as exact strings (stress marks count);
WER^σ strips every stress mark first, so a stress-only mismatch stops being
an error; CER runs over the raw character sequence including spaces and
stress marks.  Corpus figures are micro-averages: total edits divided by
total reference units.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, TypeVar

STRESS = "ˈ"

T = TypeVar("T")


class MetricsError(ValueError):
    pass


class EmptyReferenceError(MetricsError):
    pass


class EmptyCorpusError(MetricsError):
    pass


def edit_distance(ref: Sequence[T], hyp: Sequence[T]) -> int:
    """Minimal unit-cost substitutions + insertions + deletions."""
    if len(ref) < len(hyp):
        ref, hyp = hyp, ref
    previous = list(range(len(hyp) + 1))
    for i, r in enumerate(ref, start=1):
        current = [i]
        for j, h in enumerate(hyp, start=1):
            if r == h:
                current.append(previous[j - 1])
            else:
                current.append(1 + min(previous[j - 1], previous[j], current[-1]))
        previous = current
    return previous[-1]


def _words(text: str) -> list[str]:
    return text.split()


def wer(ref: str, hyp: str) -> float:
    ref_words = _words(ref)
    if not ref_words:
        raise EmptyReferenceError("reference has no words")
    return edit_distance(ref_words, _words(hyp)) / len(ref_words)


def wer_sigma(ref: str, hyp: str) -> float:
    """WER after stripping every stress mark from both sides."""
    return wer(ref.replace(STRESS, ""), hyp.replace(STRESS, ""))


def cer(ref: str, hyp: str) -> float:
    if not ref:
        raise EmptyReferenceError("reference is empty")
    return edit_distance(ref, hyp) / len(ref)


@dataclass(frozen=True)
class ItemScore:
    id: str
    wer: float
    cer: float
    wer_sigma: float
    ref: str
    hyp: str


@dataclass(frozen=True)
class EvalReport:
    wer: float
    cer: float
    wer_sigma: float
    per_item: tuple[ItemScore, ...]

    @property
    def items(self) -> int:
        return len(self.per_item)


def evaluate_corpus(pairs: Sequence[tuple[str, str, str]]) -> EvalReport:
    """Score (id, ref, hyp) triples; corpus ratios are micro-averaged."""
    if not pairs:
        raise EmptyCorpusError("no items to evaluate")
    word_edits = word_total = 0
    sigma_edits = sigma_total = 0
    char_edits = char_total = 0
    per_item: list[ItemScore] = []
    for item_id, ref, hyp in pairs:
        ref_words = _words(ref)
        if not ref_words or not ref:
            raise EmptyReferenceError(f"empty reference for item {item_id!r}")
        w_edit = edit_distance(ref_words, _words(hyp))
        sigma_ref = _words(ref.replace(STRESS, ""))
        if not sigma_ref:
            raise EmptyReferenceError(
                f"reference for item {item_id!r} is empty once stress is stripped")
        s_edit = edit_distance(sigma_ref, _words(hyp.replace(STRESS, "")))
        c_edit = edit_distance(ref, hyp)
        word_edits += w_edit
        word_total += len(ref_words)
        sigma_edits += s_edit
        sigma_total += len(sigma_ref)
        char_edits += c_edit
        char_total += len(ref)
        per_item.append(ItemScore(
            id=item_id,
            wer=w_edit / len(ref_words),
            wer_sigma=s_edit / len(sigma_ref),
            cer=c_edit / len(ref),
            ref=ref,
            hyp=hyp,
        ))
    return EvalReport(
        wer=word_edits / word_total,
        wer_sigma=sigma_edits / sigma_total,
        cer=char_edits / char_total,
        per_item=tuple(per_item),
    )
