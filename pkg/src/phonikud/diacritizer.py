"""Diacritization providers.

The pipeline seam where a neural diacritizer plugs in.  Three providers:
PASSTHROUGH (identity), DEFAULTS (adds vocal-shva per rule, leaves stress to
the unmarked final-stress default), and REMOTE (a generic line-batch HTTP
client).  Whatever the provider, the pipeline only ever forwards text that
validates; anything else falls back to DEFAULTS with a diagnostic, so batch
runs always complete.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

import requests

from . import annotate, hebrew
from .annotate import DEFAULT_SHVA_RULES, ShvaRules
from .hebrew import Passthrough, Word

ENDPOINT_ENV_VAR = "PHONIKUD_DIACRITIZER_URL"
TOKEN_ENV_VAR = "PHONIKUD_DIACRITIZER_TOKEN"
DEFAULT_TIMEOUT_MS = 5000


class ProviderKind(Enum):
    PASSTHROUGH = "passthrough"
    DEFAULTS = "defaults"
    REMOTE = "remote"


@dataclass(frozen=True)
class RemoteConfig:
    endpoint: str
    timeout_ms: int = DEFAULT_TIMEOUT_MS
    max_batch_lines: int = 64
    auth_token: Optional[str] = None

    def __post_init__(self) -> None:
        if self.timeout_ms <= 0:
            raise ValueError("timeout must be positive")
        if self.max_batch_lines < 1:
            raise ValueError("batch size must be at least 1")

    @staticmethod
    def from_env(endpoint: Optional[str] = None,
                 timeout_ms: int = DEFAULT_TIMEOUT_MS,
                 max_batch_lines: int = 64) -> "RemoteConfig":
        url = endpoint or os.environ.get(ENDPOINT_ENV_VAR)
        if not url:
            raise ValueError(
                f"no diacritizer endpoint; set {ENDPOINT_ENV_VAR} or pass a URL")
        return RemoteConfig(url, timeout_ms, max_batch_lines,
                            os.environ.get(TOKEN_ENV_VAR))


class DiacritizerError(RuntimeError):
    """Base class; carries the index of the failing batch."""

    def __init__(self, message: str, batch_index: int = 0) -> None:
        super().__init__(message)
        self.batch_index = batch_index


class RemoteTimeoutError(DiacritizerError):
    pass


class HttpStatusError(DiacritizerError):
    def __init__(self, status: int, batch_index: int = 0) -> None:
        super().__init__(f"HTTP status {status}", batch_index)
        self.status = status


class ProtocolError(DiacritizerError):
    pass


@dataclass(frozen=True)
class ProviderDiagnostic:
    line_index: int
    reason: str


def _validates(line: str) -> bool:
    """True when every Hebrew run of the line parses cleanly."""
    doc = hebrew.tokenize(hebrew.normalize(line))
    return not any(
        isinstance(seg, Passthrough) and seg.error is not None
        for seg in doc.segments
    )


def apply_defaults(text: str, rules: ShvaRules = DEFAULT_SHVA_RULES) -> str:
    """Enhance vocalized text with reasonable defaults for the added marks.

    No stress mark is added (unmarked means final stress, the most common
    pattern); vocal-shva markers are added by rule; no prefix boundaries are
    guessed.  Existing marks are never altered, so the function is idempotent
    and a no-op on already-enhanced text.
    """
    doc = hebrew.tokenize(hebrew.normalize(text))
    out: list[str] = []
    for seg in doc.segments:
        if isinstance(seg, Word):
            out.append(hebrew.serialize(annotate.apply_shva_rules(seg, rules)))
        else:
            out.append(seg.text)
    return "".join(out)


def _post_batch(batch: list[str], config: RemoteConfig,
                batch_index: int) -> list[str]:
    headers = {"Content-Type": "application/json"}
    if config.auth_token:
        headers["Authorization"] = f"Bearer {config.auth_token}"
    try:
        response = requests.post(
            config.endpoint,
            data=json.dumps({"lines": batch}, ensure_ascii=False).encode("utf-8"),
            headers=headers,
            timeout=config.timeout_ms / 1000.0,
        )
    except requests.Timeout as exc:
        raise RemoteTimeoutError(f"request timed out after {config.timeout_ms} ms",
                            batch_index) from exc
    except requests.RequestException as exc:
        raise ProtocolError(f"transport failure: {exc}", batch_index) from exc
    if response.status_code != 200:
        raise HttpStatusError(response.status_code, batch_index)
    try:
        payload = response.json()
    except ValueError as exc:
        raise ProtocolError("response is not JSON", batch_index) from exc
    lines = payload.get("lines") if isinstance(payload, dict) else None
    if not isinstance(lines, list) or not all(isinstance(x, str) for x in lines):
        raise ProtocolError("response lacks a 'lines' string array", batch_index)
    if len(lines) != len(batch):
        raise ProtocolError(
            f"line count changed: sent {len(batch)}, got {len(lines)}", batch_index)
    return lines


def diacritize_remote(lines: list[str], config: RemoteConfig,
                      rules: ShvaRules = DEFAULT_SHVA_RULES,
                      ) -> tuple[list[str], list[ProviderDiagnostic]]:
    """Send lines through the remote endpoint in batches.

    Transport-level failures raise (Timeout/HttpStatus/ProtocolError, carrying
    the batch index) so the caller may retry or fall back.  A returned line
    that fails validation falls back to apply_defaults with a diagnostic.
    """
    out: list[str] = []
    diagnostics: list[ProviderDiagnostic] = []
    for batch_index, start in enumerate(range(0, len(lines), config.max_batch_lines)):
        batch = lines[start:start + config.max_batch_lines]
        returned = _post_batch(batch, config, batch_index)
        for offset, line in enumerate(returned):
            if _validates(line):
                out.append(hebrew.normalize(line))
            else:
                diagnostics.append(ProviderDiagnostic(
                    start + offset, "remote line failed validation; used defaults"))
                out.append(apply_defaults(batch[offset], rules))
    return out, diagnostics


def diacritize(lines: Iterable[str], kind: ProviderKind,
               config: Optional[RemoteConfig] = None,
               rules: ShvaRules = DEFAULT_SHVA_RULES,
               ) -> tuple[list[str], list[ProviderDiagnostic]]:
    """Run a provider over lines, never raising: line count is preserved and
    any remote failure degrades to DEFAULTS with a diagnostic."""
    lines = list(lines)
    if kind is ProviderKind.PASSTHROUGH:
        return lines, []
    if kind is ProviderKind.DEFAULTS:
        return [apply_defaults(line, rules) for line in lines], []
    if config is None:
        raise ValueError("remote provider requires a RemoteConfig")
    out: list[str] = []
    diagnostics: list[ProviderDiagnostic] = []
    for start in range(0, len(lines), config.max_batch_lines):
        batch = lines[start:start + config.max_batch_lines]
        try:
            batch_out, batch_diags = diacritize_remote(batch, config, rules)
            out.extend(batch_out)
            for diag in batch_diags:
                diagnostics.append(ProviderDiagnostic(start + diag.line_index,
                                                      diag.reason))
        except DiacritizerError as exc:
            diagnostics.append(ProviderDiagnostic(
                start, f"remote batch failed ({exc}); used defaults"))
            out.extend(apply_defaults(line, rules) for line in batch)
    return out, diagnostics
