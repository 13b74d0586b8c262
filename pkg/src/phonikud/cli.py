"""Batch command-line surface.

Line-oriented and streaming: every verb that transforms text emits exactly
one output line per input line, in input order, with diagnostics on stderr.
Exit codes: 0 success, 1 hard error, 2 usage error.
"""

from __future__ import annotations

import json
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, Iterator, Optional, TextIO

import click

from . import annotate as annotate_mod
from . import corpus as corpus_mod
from . import diacritizer as diac_mod
from . import g2p, hebrew
from . import lexicon as lexicon_mod
from . import metrics as metrics_mod
from .annotate import ShvaRules
from .diacritizer import ProviderKind, RemoteConfig
from .g2p import Convention, Narrowness, StressPosition

_BATCH_LINES = 1024


def _reconfigure_stdio() -> None:
    for stream in (sys.stdin, sys.stdout, sys.stderr):
        reconfigure = getattr(stream, "reconfigure", None)
        if reconfigure is not None:
            reconfigure(encoding="utf-8", errors="replace")


def _open_input(path: str) -> TextIO:
    if path == "-":
        return sys.stdin
    try:
        return open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise click.ClickException(f"cannot read {path}: {exc}") from exc


def _open_output(path: str) -> TextIO:
    if path == "-":
        return sys.stdout
    try:
        return open(path, "w", encoding="utf-8")
    except OSError as exc:
        raise click.ClickException(f"cannot write {path}: {exc}") from exc


def _iter_lines(stream: TextIO) -> Iterator[str]:
    for line in stream:
        yield line.rstrip("\n").rstrip("\r")


def _convention(convention: str, stress: str) -> Convention:
    return Convention(
        stress_position=StressPosition(stress),
        narrowness=Narrowness(convention),
    )


def _load_lexicon(path: Optional[str]) -> lexicon_mod.Lexicon:
    if path is None:
        return lexicon_mod.load_default()
    try:
        return lexicon_mod.load(path)
    except OSError as exc:
        raise click.ClickException(f"cannot read lexicon {path}: {exc}") from exc
    except lexicon_mod.LexiconError as exc:
        raise click.ClickException(f"lexicon {path}: {exc}") from exc


def _remote_config(url: Optional[str], timeout_ms: int) -> Optional[RemoteConfig]:
    try:
        return RemoteConfig.from_env(url, timeout_ms)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc


def _shva_rules(disabled: tuple[str, ...]) -> ShvaRules:
    names = {
        "double-shva": "double_shva",
        "identical-letters": "identical_letters",
        "dagesh-forte": "dagesh_forte",
        "clitic-prefix": "clitic_prefix",
    }
    kwargs = {field: True for field in names.values()}
    for flag in disabled:
        kwargs[names[flag]] = False
    return ShvaRules(**kwargs)


_convention_option = click.option(
    "--convention", type=click.Choice(["broad", "narrow"]), default="broad",
    show_default=True, help="Output symbol inventory.")
_stress_option = click.option(
    "--stress", type=click.Choice(["syllable", "vowel"]), default="syllable",
    show_default=True, help="Stress mark position.")
_provider_option = click.option(
    "--provider", type=click.Choice(["passthrough", "defaults", "remote"]),
    default="passthrough", show_default=True,
    help="Diacritization provider applied before conversion.")
_lexicon_option = click.option(
    "--lexicon", "lexicon_path", type=click.Path(), default=None,
    help="Irregular-word lexicon TSV (default: the built-in starter lexicon).")
_url_option = click.option(
    "--diacritizer-url", default=None,
    help=f"Remote endpoint (or ${diac_mod.ENDPOINT_ENV_VAR}).")
_timeout_option = click.option(
    "--diacritizer-timeout-ms", type=int, default=diac_mod.DEFAULT_TIMEOUT_MS,
    show_default=True, help="Remote request timeout.")
_shva_toggle_option = click.option(
    "--disable-shva-rule", "disabled_shva_rules", multiple=True,
    type=click.Choice(["double-shva", "identical-letters", "dagesh-forte",
                       "clitic-prefix"]),
    help="Turn off one vocal-shva rule (repeatable).")


@click.group()
def main() -> None:
    """Hebrew grapheme-to-phoneme pipeline."""
    _reconfigure_stdio()


def _phonemize_one(line: str, convention: Convention,
                   lexicon: lexicon_mod.Lexicon) -> tuple[str, list[g2p.Diagnostic]]:
    doc = hebrew.tokenize(hebrew.normalize(line))
    return g2p.phonemize_text(doc, convention, lexicon)


def _pipeline_batches(lines: Iterable[str], provider: ProviderKind,
                      config: Optional[RemoteConfig], rules: ShvaRules,
                      convention: Convention, lexicon: lexicon_mod.Lexicon,
                      jobs: int) -> Iterator[tuple[int, str, list[str]]]:
    """Yield (line_number, output, diagnostics) in input order, streaming.

    Interactive by default: each line is processed as it arrives.  Lines are
    chunked only where that buys something (remote HTTP batches, or worker
    parallelism with --jobs).
    """
    if provider is ProviderKind.REMOTE and config is not None:
        batch_size = config.max_batch_lines
    elif jobs > 1:
        batch_size = _BATCH_LINES
    else:
        batch_size = 1
    executor = ThreadPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        batch: list[str] = []
        first_lineno = 1
        lineno = 0
        for lineno, line in enumerate(lines, start=1):
            if not batch:
                first_lineno = lineno
            batch.append(line)
            if len(batch) >= batch_size:
                yield from _run_batch(batch, first_lineno, provider, config,
                                      rules, convention, lexicon, executor)
                batch = []
        if batch:
            yield from _run_batch(batch, first_lineno, provider, config,
                                  rules, convention, lexicon, executor)
    finally:
        if executor is not None:
            executor.shutdown(wait=False)


def _run_batch(batch: list[str], first_lineno: int, provider: ProviderKind,
               config: Optional[RemoteConfig], rules: ShvaRules,
               convention: Convention, lexicon: lexicon_mod.Lexicon,
               executor: Optional[ThreadPoolExecutor],
               ) -> Iterator[tuple[int, str, list[str]]]:
    normalized = [hebrew.normalize(line) for line in batch]
    enhanced, provider_diags = diac_mod.diacritize(normalized, provider, config, rules)
    per_line_notes: dict[int, list[str]] = {}
    for diag in provider_diags:
        per_line_notes.setdefault(diag.line_index, []).append(diag.reason)

    def work(line: str) -> tuple[str, list[g2p.Diagnostic]]:
        return _phonemize_one(line, convention, lexicon)

    if executor is not None:
        results = list(executor.map(work, enhanced))
    else:
        results = [work(line) for line in enhanced]
    for offset, (out, diags) in enumerate(results):
        notes = [
            f"span {d.span[0]}..{d.span[1]} {d.text!r}: {d.reason}" for d in diags
        ] + per_line_notes.get(offset, [])
        yield first_lineno + offset, out, notes


@main.command()
@_convention_option
@_stress_option
@_provider_option
@_lexicon_option
@_url_option
@_timeout_option
@_shva_toggle_option
@click.option("--format", "output_format", type=click.Choice(["text", "jsonl"]),
              default="text", show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True,
              help="Line-parallel workers; output order is always input order.")
@click.option("--input", "input_path", default="-", show_default=True)
@click.option("--output", "output_path", default="-", show_default=True)
def phonemize(convention: str, stress: str, provider: str,
              lexicon_path: Optional[str], diacritizer_url: Optional[str],
              diacritizer_timeout_ms: int, disabled_shva_rules: tuple[str, ...],
              output_format: str, jobs: int, input_path: str,
              output_path: str) -> None:
    """Convert Hebrew text lines to IPA, one output line per input line."""
    conv = _convention(convention, stress)
    lexicon = _load_lexicon(lexicon_path)
    kind = ProviderKind(provider)
    config = _remote_config(diacritizer_url, diacritizer_timeout_ms) \
        if kind is ProviderKind.REMOTE else None
    rules = _shva_rules(disabled_shva_rules)
    src = _open_input(input_path)
    dst = _open_output(output_path)
    try:
        for lineno, out, notes in _pipeline_batches(
                _iter_lines(src), kind, config, rules, conv, lexicon, jobs):
            if output_format == "jsonl":
                record = {"ipa": out}
                if notes:
                    record["diagnostics"] = notes
                dst.write(json.dumps(record, ensure_ascii=False) + "\n")
            else:
                dst.write(out + "\n")
            dst.flush()
            for note in notes:
                click.echo(f"line {lineno}: {note}", err=True)
    finally:
        if dst is not sys.stdout:
            dst.close()
        if src is not sys.stdin:
            src.close()


@main.command("normalize")
@click.option("--defaults", "with_defaults", is_flag=True,
              help="Also add default enhanced marks (vocal shva by rule).")
@_shva_toggle_option
@click.option("--input", "input_path", default="-", show_default=True)
@click.option("--output", "output_path", default="-", show_default=True)
def normalize_cmd(with_defaults: bool, disabled_shva_rules: tuple[str, ...],
                  input_path: str, output_path: str) -> None:
    """Canonicalize Hebrew text lines (idempotent)."""
    rules = _shva_rules(disabled_shva_rules)
    src = _open_input(input_path)
    dst = _open_output(output_path)
    try:
        for line in _iter_lines(src):
            out = hebrew.normalize(line)
            if with_defaults:
                out = diac_mod.apply_defaults(out, rules)
            dst.write(out + "\n")
            dst.flush()
    finally:
        if dst is not sys.stdout:
            dst.close()
        if src is not sys.stdin:
            src.close()


@main.command("annotate")
@click.option("--format", "output_format", type=click.Choice(["text", "jsonl"]),
              default="text", show_default=True)
@_shva_toggle_option
@click.option("--corrections", "corrections_path", type=click.Path(), default=None,
              help="TSV of manual corrections applied after annotation.")
@click.option("--review-list", "review_path", type=click.Path(), default=None,
              help="Also write a frequency-sorted word-type TSV here.")
@click.option("--input", "input_path", default="-", show_default=True)
@click.option("--output", "output_path", default="-", show_default=True)
def annotate_cmd(output_format: str, disabled_shva_rules: tuple[str, ...],
                 corrections_path: Optional[str], review_path: Optional[str],
                 input_path: str, output_path: str) -> None:
    """Derive enhanced marks from JSONL records with morphological hints."""
    rules = _shva_rules(disabled_shva_rules)
    corrections = None
    if corrections_path is not None:
        try:
            corrections = annotate_mod.load_corrections(corrections_path)
        except OSError as exc:
            raise click.ClickException(str(exc)) from exc
        except annotate_mod.InvalidCorrectionError as exc:
            raise click.ClickException(f"corrections: {exc}") from exc
    src = _open_input(input_path)
    dst = _open_output(output_path)
    review_rows: Optional[list[str]] = [] if review_path is not None else None
    replaced_total = 0
    try:
        for lineno, raw in enumerate(_iter_lines(src), start=1):
            out = ""
            if raw.strip():
                try:
                    text, tokens = annotate_mod.parse_record_line(raw)
                    out = annotate_mod.annotate_line(text, tokens, rules)
                except (ValueError, hebrew.HebrewTextError) as exc:
                    raise click.ClickException(f"line {lineno}: {exc}") from exc
                if corrections is not None:
                    corrected, replaced = annotate_mod.apply_corrections(
                        [out], corrections)
                    out = corrected[0]
                    replaced_total += replaced
            if output_format == "jsonl":
                dst.write(json.dumps({"text": out}, ensure_ascii=False) + "\n")
            else:
                dst.write(out + "\n")
            dst.flush()
            if review_rows is not None:
                review_rows.append(out)
        if corrections is not None:
            click.echo(f"corrections applied: {replaced_total}", err=True)
        if review_path is not None:
            rows = annotate_mod.build_review_list(review_rows)
            with open(review_path, "w", encoding="utf-8") as handle:
                handle.write(annotate_mod.format_review_list(rows))
    finally:
        if dst is not sys.stdout:
            dst.close()
        if src is not sys.stdin:
            src.close()


def _capped(value: float) -> str:
    return f"{min(value, 1.0):.2f}"


@main.command("evaluate")
@click.option("--ref", "ref_path", type=click.Path(), default=None,
              help="Reference IPA lines.")
@click.option("--hyp", "hyp_path", type=click.Path(), default=None,
              help="Hypothesis IPA lines, aligned with --ref.")
@click.option("--corpus", "corpus_path", type=click.Path(), default=None,
              help="Corpus metadata; the hebrew tier is phonemized and "
                   "scored against the ipa tier.")
@_convention_option
@_stress_option
@_provider_option
@_lexicon_option
@_url_option
@_timeout_option
@_shva_toggle_option
@click.option("--json", "as_json", is_flag=True, help="Emit the report as JSON.")
def evaluate_cmd(ref_path: Optional[str], hyp_path: Optional[str],
                 corpus_path: Optional[str], convention: str, stress: str,
                 provider: str, lexicon_path: Optional[str],
                 diacritizer_url: Optional[str], diacritizer_timeout_ms: int,
                 disabled_shva_rules: tuple[str, ...], as_json: bool) -> None:
    """Score hypothesis transcriptions against references (WER, WER^σ, CER)."""
    if corpus_path is None and (ref_path is None or hyp_path is None):
        raise click.UsageError("provide --ref and --hyp, or --corpus")
    pairs: list[tuple[str, str, str]] = []
    if corpus_path is not None:
        try:
            items = corpus_mod.load_metadata(corpus_path)
        except OSError as exc:
            raise click.ClickException(str(exc)) from exc
        except corpus_mod.CorpusError as exc:
            raise click.ClickException(f"{corpus_path}: {exc}") from exc
        conv = _convention(convention, stress)
        lexicon = _load_lexicon(lexicon_path)
        kind = ProviderKind(provider)
        config = _remote_config(diacritizer_url, diacritizer_timeout_ms) \
            if kind is ProviderKind.REMOTE else None
        rules = _shva_rules(disabled_shva_rules)
        hyps = [
            out for _, out, _ in _pipeline_batches(
                (item.hebrew for item in items), kind, config, rules, conv,
                lexicon, jobs=1)
        ]
        pairs = [(item.id, item.ipa, hyp) for item, hyp in zip(items, hyps)]
    else:
        try:
            refs = open(ref_path, encoding="utf-8").read().splitlines()
            hyps = open(hyp_path, encoding="utf-8").read().splitlines()
        except OSError as exc:
            raise click.ClickException(str(exc)) from exc
        if len(refs) != len(hyps):
            raise click.ClickException(
                f"line counts differ: {len(refs)} refs, {len(hyps)} hyps")
        pairs = [(str(i), r, h) for i, (r, h) in enumerate(zip(refs, hyps), start=1)]
    try:
        report = metrics_mod.evaluate_corpus(pairs)
    except metrics_mod.MetricsError as exc:
        raise click.ClickException(str(exc)) from exc
    if as_json:
        payload = {
            "items": report.items,
            "wer": report.wer,
            "wer_sigma": report.wer_sigma,
            "cer": report.cer,
            "per_item": [
                {"id": item.id, "wer": item.wer, "wer_sigma": item.wer_sigma,
                 "cer": item.cer, "ref": item.ref, "hyp": item.hyp}
                for item in report.per_item
            ],
        }
        click.echo(json.dumps(payload, ensure_ascii=False, indent=2))
    else:
        click.echo(f"items     {report.items}")
        click.echo("           WER↓  WER^σ↓  CER↓")
        click.echo(f"corpus     {_capped(report.wer)}    {_capped(report.wer_sigma)}"
                   f"  {_capped(report.cer)}")


@main.command("validate")
@click.argument("metadata", type=click.Path())
def validate_cmd(metadata: str) -> None:
    """Validate corpus metadata with line-precise errors."""
    try:
        items = corpus_mod.load_metadata(metadata)
    except OSError as exc:
        raise click.ClickException(str(exc)) from exc
    except corpus_mod.CorpusError as exc:
        raise click.ClickException(f"{metadata}: {exc}") from exc
    click.echo(f"OK: {len(items)} items")


@main.group("lexicon")
def lexicon_group() -> None:
    """Lexicon maintenance."""


@lexicon_group.command("check")
@click.argument("path", type=click.Path())
def lexicon_check(path: str) -> None:
    """Validate a lexicon file; nonzero exit on any error."""
    try:
        lexicon = lexicon_mod.load(path)
    except OSError as exc:
        raise click.ClickException(str(exc)) from exc
    except lexicon_mod.LexiconError as exc:
        raise click.ClickException(f"{path}: {exc}") from exc
    click.echo(f"OK: {len(lexicon)} entries")


@main.command("dump-rules")
def dump_rules_cmd() -> None:
    """Export the full transition table as TSV for audit."""
    sys.stdout.write(g2p.dump_rules())


if __name__ == "__main__":
    main()
