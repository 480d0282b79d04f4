"""Document indexing: rank category profiles against a document by cosine.

The document is represented by its raw feature counts, each profile by its
trained associate weights.  The score for a profile is the cosine of the
angle between the two sparse vectors:

    weight = sum(count[w] * associates[w]) / (|doc| * |profile|)

Profiles sharing no feature with the document are excluded instead of being
reported at weight zero, so every returned entry is backed by at least one
matched associate and can be explained.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .textprep import (
    EMPTY_STOPLISTS,
    FeatureDoc,
    FeatureSpec,
    StopLists,
    surviving_token_indices,
    tokenize_with_offsets,
    vectorize_text,
)
from .trainer import Model

logger = logging.getLogger(__name__)

__all__ = [
    "Blacklist",
    "EMPTY_BLACKLIST",
    "RankedAssignment",
    "MatchedAssociate",
    "Explanation",
    "load_blacklist",
    "vectorize",
    "rank",
    "rank_many",
    "explain",
]


@dataclass(frozen=True)
class Blacklist:
    """Category codes excluded from assignment (obsolete or unwanted
    descriptors).  Filtering happens before rank truncation, so blacklisting
    a top entry promotes the next one rather than shortening the result."""

    codes: frozenset[str] = frozenset()

    def __contains__(self, code: str) -> bool:
        return code in self.codes


EMPTY_BLACKLIST = Blacklist()


def load_blacklist(path: str | Path) -> Blacklist:
    """One code per line; ``#`` starts a comment, blanks ignored."""
    codes: set[str] = set()
    for line in Path(path).read_text(encoding="utf-8-sig").splitlines():
        entry = line.split("#", 1)[0].strip()
        if entry:
            codes.add(entry)
    return Blacklist(frozenset(codes))


@dataclass(frozen=True)
class RankedAssignment:
    """Top categories for one document, best first.

    ``entries`` holds (code, weight) pairs with weights in [0, 1], sorted by
    descending weight with ties broken by ascending code.  ``empty_doc`` is
    set when the document produced no features at all; that is reported, not
    raised, because batch runs must survive the occasional blank file.
    """

    doc_id: str
    entries: tuple[tuple[str, float], ...]
    k_requested: int
    empty_doc: bool = False


def vectorize(
    raw: bytes | str,
    spec: FeatureSpec,
    stops: StopLists,
    doc_id: str = "",
    format_hint: str = "auto",
) -> FeatureDoc:
    """Prepare a document for ranking.  ``spec`` and ``stops`` must be the
    ones recorded in the model; the CLI and service check the stop-list
    fingerprint before calling this."""
    return vectorize_text(raw, spec, stops, doc_id=doc_id, format_hint=format_hint)


def rank(
    doc: FeatureDoc,
    model: Model,
    blacklist: Blacklist = EMPTY_BLACKLIST,
    k: int = 6,
) -> RankedAssignment:
    """Rank the model's profiles against ``doc`` and keep the top ``k``."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not doc.features:
        logger.warning("document %r produced no features; nothing to rank", doc.doc_id)
        return RankedAssignment(doc.doc_id, (), k, empty_doc=True)

    doc_norm = math.sqrt(sum(c * c for c in doc.features.values()))
    scored: list[tuple[str, float]] = []
    for code, profile in model.profiles.items():
        if code in blacklist.codes:
            continue
        associates = profile.associates
        # Iterate the smaller map; both orders are fixed, so results are
        # deterministic for a given document and model.
        if len(doc.features) <= len(associates):
            dot = 0.0
            for w, count in doc.features.items():
                weight = associates.get(w)
                if weight is not None:
                    dot += count * weight
        else:
            dot = 0.0
            for w, weight in associates.items():
                count = doc.features.get(w)
                if count is not None:
                    dot += count * weight
        if dot <= 0.0:
            continue  # no shared feature
        cosine = dot / (doc_norm * profile.norm)
        scored.append((code, min(1.0, cosine)))

    scored.sort(key=lambda e: (-e[1], e[0]))
    return RankedAssignment(doc.doc_id, tuple(scored[:k]), k)


def rank_many(
    docs: Sequence[FeatureDoc],
    model: Model,
    blacklist: Blacklist = EMPTY_BLACKLIST,
    k: int = 6,
    max_workers: int | None = None,
) -> list[RankedAssignment]:
    """Rank a batch, optionally in parallel.  Output order always matches
    input order, so parallel and serial runs serialise identically."""
    if max_workers is not None and max_workers > 1 and len(docs) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(lambda d: rank(d, model, blacklist, k), docs))
    return [rank(d, model, blacklist, k) for d in docs]


# ---------------------------------------------------------------------------
# Explanations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MatchedAssociate:
    feature: str
    profile_weight: float
    doc_count: int


@dataclass(frozen=True)
class Explanation:
    """Why a category matched a document: the associates present in both,
    strongest first, plus the character spans in the extracted text where
    they occur (for highlighting)."""

    code: str
    matched: tuple[MatchedAssociate, ...]
    spans: tuple[tuple[int, int], ...]


def explain(
    doc: FeatureDoc,
    text: str,
    model: Model,
    code: str,
    stops: StopLists = EMPTY_STOPLISTS,
) -> Explanation:
    """Explain profile ``code`` against ``doc``.

    ``text`` must be the extracted text ``doc`` was built from and ``stops``
    the stop lists used then; spans are found by re-tokenising with offsets
    and re-applying the stop filter.  For external feature specs the features
    are not text-anchored, so ``spans`` is empty and only the matched
    associate list is returned.
    """
    try:
        profile = model.profiles[code]
    except KeyError:
        raise KeyError(f"no profile for category code: {code!r}") from None

    matched = tuple(
        MatchedAssociate(w, profile.associates[w], doc.features[w])
        for w in sorted(
            (w for w in doc.features if w in profile.associates),
            key=lambda w: (-profile.associates[w], w),
        )
    )

    spans: list[tuple[int, int]] = []
    spec = model.feature_spec
    if matched and spec.kind in ("token", "ngram"):
        matched_set = {m.feature for m in matched}
        offset_tokens = tokenize_with_offsets(text)
        keep = surviving_token_indices([t for t, _, _ in offset_tokens], stops)
        surviving = [offset_tokens[i] for i in keep]
        n = spec.n if spec.kind == "ngram" else 1
        for i in range(len(surviving) - n + 1):
            feature = " ".join(surviving[i + j][0] for j in range(n))
            if feature in matched_set:
                spans.append((surviving[i][1], surviving[i + n - 1][2]))
        spans.sort()
    return Explanation(code=code, matched=matched, spans=tuple(spans))
