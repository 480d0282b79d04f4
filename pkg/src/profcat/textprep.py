"""Text preparation: markup stripping, tokenisation, stop filtering, features.

Every document, whether used for training or for categorisation, passes
through the same pipeline:

    raw bytes/str -> extract_text -> tokenize -> apply_stoplists -> featurize

The output is a sparse bag of features (a ``FeatureDoc``).  Feature extraction
is pluggable via ``FeatureSpec``: plain tokens, n-grams over the surviving
token stream, or an external program that maps tokens to arbitrary feature
strings (one per line on stdin/stdout).
"""

from __future__ import annotations

import hashlib
import logging
import re
import shlex
import subprocess
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

logger = logging.getLogger(__name__)

__all__ = [
    "ExtractionError",
    "FeaturizeError",
    "StopLists",
    "EMPTY_STOPLISTS",
    "FeatureSpec",
    "TOKEN_SPEC",
    "FeatureDoc",
    "extract_text",
    "tokenize",
    "tokenize_with_offsets",
    "apply_stoplists",
    "surviving_token_indices",
    "featurize",
    "vectorize_text",
    "load_stoplists",
]


class ExtractionError(ValueError):
    """Raised when raw input cannot be decoded into text."""


class FeaturizeError(RuntimeError):
    """Raised when an external feature program is missing or fails."""


# ---------------------------------------------------------------------------
# Extraction
# ---------------------------------------------------------------------------

_TAG_RE = re.compile(r"<[^>]*>")
_ENTITY_RE = re.compile(r"&(?:(lt|gt|amp|quot|apos)|#(\d+)|#[xX]([0-9a-fA-F]+));")
_NAMED_ENTITIES = {"lt": "<", "gt": ">", "amp": "&", "quot": '"', "apos": "'"}
_WS_RE = re.compile(r"\s+")

_FORMAT_HINTS = ("auto", "plain", "xml", "html")


def _decode_entity(m: re.Match) -> str:
    name, dec, hexa = m.groups()
    if name:
        return _NAMED_ENTITIES[name]
    try:
        return chr(int(dec) if dec else int(hexa, 16))
    except (ValueError, OverflowError):
        return m.group(0)  # out-of-range reference kept literal


def extract_text(raw: bytes | str, format_hint: str = "auto") -> str:
    """Turn raw document content into plain text.

    ``plain`` input passes through unchanged.  For ``xml``/``html`` input all
    markup between ``<`` and ``>`` is replaced by a space, the five predefined
    entity references plus numeric character references are decoded, and
    whitespace runs are collapsed.  Tag contents are never interpreted; this
    is deliberate stripping, not parsing, because the corpus markup is shallow
    and frequently not well formed.  ``auto`` treats input whose first
    non-whitespace character is ``<`` as markup.
    """
    if format_hint not in _FORMAT_HINTS:
        raise ValueError(f"unknown format hint: {format_hint!r}")
    if isinstance(raw, bytes):
        try:
            text = raw.decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise ExtractionError(f"input is not valid UTF-8: {exc}") from None
    else:
        text = raw.lstrip("﻿")
    if format_hint == "auto":
        format_hint = "xml" if text.lstrip()[:1] == "<" else "plain"
    if format_hint == "plain":
        return text
    stripped = _TAG_RE.sub(" ", text)
    cut = stripped.find("<")
    if cut != -1:
        # A '<' that survived tag removal starts a tag that never closes.
        logger.warning("unterminated tag at offset %d; rest of input dropped", cut)
        stripped = stripped[:cut]
    # A '>' with no opening '<' is markup residue too; entity-encoded
    # brackets are decoded below and stay.
    stripped = stripped.replace(">", " ")
    decoded = _ENTITY_RE.sub(_decode_entity, stripped)
    return _WS_RE.sub(" ", decoded).strip()


# ---------------------------------------------------------------------------
# Tokenisation
# ---------------------------------------------------------------------------

# A token is a maximal run of Unicode letters/digits, optionally joined by
# single internal hyphens or apostrophes (ASCII ' and typographic ').
_TOKEN_RE = re.compile(r"[^\W_]+(?:['’\-][^\W_]+)*")


def tokenize(text: str) -> list[str]:
    """Lower-cased word tokens, in order.  Tokens with no letter are dropped,
    so bare numbers and dates contribute nothing."""
    return [t for t, _, _ in tokenize_with_offsets(text)]


def tokenize_with_offsets(text: str) -> list[tuple[str, int, int]]:
    """Like :func:`tokenize` but each token carries its (start, end) character
    range in ``text``, for highlighting."""
    out = []
    for m in _TOKEN_RE.finditer(text):
        tok = m.group()
        if any(c.isalpha() for c in tok):
            out.append((tok.lower(), m.start(), m.end()))
    return out


# ---------------------------------------------------------------------------
# Stop lists
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StopLists:
    """Single-token stop words plus multi-word stop phrases.

    Entries are stored lower-cased.  Multi-word phrases are removed from the
    token stream first (longest match first, scanning left to right, matches
    never overlapping), then the remaining single stop words are dropped.
    """

    single: frozenset[str] = frozenset()
    multi: frozenset[tuple[str, ...]] = frozenset()

    def __post_init__(self) -> None:
        for phrase in self.multi:
            if len(phrase) < 2:
                raise ValueError(f"multi-word stop entry needs >= 2 tokens: {phrase!r}")

    def fingerprint(self) -> str:
        """Stable digest of the lists, recorded in trained models so an index
        run can detect stop-list drift."""
        h = hashlib.sha256()
        for w in sorted(self.single):
            h.update(b"s\x00" + w.encode("utf-8") + b"\x00")
        for phrase in sorted(self.multi):
            h.update(b"m\x00" + " ".join(phrase).encode("utf-8") + b"\x00")
        return h.hexdigest()


EMPTY_STOPLISTS = StopLists()


def load_stoplists(*paths: str | Path) -> StopLists:
    """Read stop-list files: UTF-8, one entry per line, ``#`` starts a
    comment, blank lines ignored.  A line with internal whitespace is a
    multi-word phrase.  Entries are lower-cased on load."""
    single: set[str] = set()
    multi: set[tuple[str, ...]] = set()
    for path in paths:
        text = Path(path).read_text(encoding="utf-8-sig")
        for line in text.splitlines():
            entry = line.split("#", 1)[0].strip()
            if not entry:
                continue
            parts = tuple(entry.lower().split())
            if len(parts) == 1:
                single.add(parts[0])
            else:
                multi.add(parts)
    return StopLists(frozenset(single), frozenset(multi))


def surviving_token_indices(tokens: list[str], stops: StopLists) -> list[int]:
    """Indices of tokens that survive stop filtering.

    Exposed separately so explanation spans can be mapped back to character
    offsets: the caller keeps its own parallel offset list.
    """
    by_first: dict[str, list[tuple[str, ...]]] = {}
    for phrase in stops.multi:
        by_first.setdefault(phrase[0], []).append(phrase)
    for phrases in by_first.values():
        phrases.sort(key=len, reverse=True)

    keep: list[int] = []
    i = 0
    n = len(tokens)
    while i < n:
        matched = 0
        for phrase in by_first.get(tokens[i], ()):
            if tuple(tokens[i : i + len(phrase)]) == phrase:
                matched = len(phrase)
                break
        if matched:
            i += matched
            continue
        if tokens[i] not in stops.single:
            keep.append(i)
        i += 1
    return keep


def apply_stoplists(tokens: list[str], stops: StopLists) -> list[str]:
    """Remove stop phrases, then stop words, preserving order."""
    return [tokens[i] for i in surviving_token_indices(tokens, stops)]


# ---------------------------------------------------------------------------
# Feature extraction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FeatureSpec:
    """What counts as a feature.

    kind ``token``: each surviving token.
    kind ``ngram``: every run of ``n`` consecutive surviving tokens, joined
    with single spaces.
    kind ``external``: tokens are piped to ``external_command`` (one per
    line); its output lines become the features.  This is the hook for
    lemmatisers or other preprocessors without taking them on as code.
    """

    kind: str = "token"
    n: int = 1
    external_command: str | None = None

    def __post_init__(self) -> None:
        if self.kind == "token":
            if self.n != 1 or self.external_command is not None:
                raise ValueError("token spec takes no n or command")
        elif self.kind == "ngram":
            if self.n < 2:
                raise ValueError("ngram spec needs n >= 2")
            if self.external_command is not None:
                raise ValueError("ngram spec takes no command")
        elif self.kind == "external":
            if not self.external_command:
                raise ValueError("external spec needs a command")
            if self.n != 1:
                raise ValueError("external spec takes no n")
        else:
            raise ValueError(f"unknown feature kind: {self.kind!r}")

    def canonical(self) -> str:
        if self.kind == "token":
            return "token"
        if self.kind == "ngram":
            return f"ngram:{self.n}"
        return f"external:{self.external_command}"

    @classmethod
    def parse(cls, text: str) -> "FeatureSpec":
        text = text.strip()
        if text == "token":
            return cls()
        if text.startswith("ngram:"):
            try:
                n = int(text.split(":", 1)[1])
            except ValueError:
                raise ValueError(f"bad ngram spec: {text!r}") from None
            return cls(kind="ngram", n=n)
        if text.startswith("external:"):
            return cls(kind="external", external_command=text.split(":", 1)[1])
        raise ValueError(f"unknown feature spec: {text!r}")


TOKEN_SPEC = FeatureSpec()


@dataclass
class FeatureDoc:
    """Sparse feature counts for one document.

    ``token_count`` is the token count before stop filtering; the trainer's
    minimum-length gate uses it so that stop-list choice does not change which
    documents qualify for training.
    """

    doc_id: str
    features: dict[str, int]
    token_count: int


def _external_features(tokens: list[str], command: str) -> list[str]:
    argv = shlex.split(command)
    if not argv:
        raise FeaturizeError("empty external feature command")
    try:
        proc = subprocess.run(
            argv,
            input="\n".join(tokens) + ("\n" if tokens else ""),
            capture_output=True,
            text=True,
        )
    except FileNotFoundError:
        raise FeaturizeError(f"external feature program not found: {argv[0]}") from None
    if proc.returncode != 0:
        raise FeaturizeError(
            f"external feature program failed (exit {proc.returncode}): {proc.stderr.strip()}"
        )
    return [line for line in proc.stdout.splitlines() if line]


def featurize(
    tokens: list[str],
    spec: FeatureSpec = TOKEN_SPEC,
    doc_id: str = "",
    token_count: int | None = None,
) -> FeatureDoc:
    """Map a (stop-filtered) token list to feature counts under ``spec``.

    ``token_count`` should be the pre-filter count; it defaults to
    ``len(tokens)`` for callers that do no stop filtering.
    """
    if spec.kind == "token":
        counts = Counter(tokens)
    elif spec.kind == "ngram":
        n = spec.n
        counts = Counter(
            " ".join(tokens[i : i + n]) for i in range(len(tokens) - n + 1)
        )
    else:
        counts = Counter(_external_features(tokens, spec.external_command or ""))
    tc = len(tokens) if token_count is None else token_count
    return FeatureDoc(doc_id=doc_id, features=dict(counts), token_count=tc)


def vectorize_text(
    raw: bytes | str,
    spec: FeatureSpec = TOKEN_SPEC,
    stops: StopLists = EMPTY_STOPLISTS,
    doc_id: str = "",
    format_hint: str = "auto",
) -> FeatureDoc:
    """The full preparation pipeline. Training and indexing share this path
    so a document is always represented the same way on both sides."""
    text = extract_text(raw, format_hint)
    tokens = tokenize(text)
    kept = apply_stoplists(tokens, stops)
    return featurize(kept, spec, doc_id, token_count=len(tokens))
