"""Profile training: log-likelihood feature scoring and category profiles.

A category profile is a sparse weighted feature vector built from the
positive training documents of that category alone; no negative examples are
needed.  For each training document, every feature is scored against the rest
of the training corpus with the log-likelihood ratio statistic over the 2x2
contingency table

                    in document   in rest of corpus
    feature w            a               b
    all features         c               d

and only features that are over-represented in the document (a/c strictly
above the corpus rate (a+b)/(c+d)) and score at least ``min_loglikelihood``
contribute.  Each gold category of the document then accumulates those scores
into its profile, optionally down-weighted by the number of gold categories
the document carries so that broadly-labeled documents do not dominate.

Training is deterministic: the same corpus, parameters, and stop lists always
produce a byte-identical model file.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .corpus import Collection
from .textprep import FeatureDoc, FeatureSpec, StopLists, vectorize_text

__all__ = [
    "TrainParams",
    "CorpusStats",
    "CategoryProfile",
    "Model",
    "TrainingError",
    "ModelFormatError",
    "MODEL_FORMAT_VERSION",
    "g2",
    "corpus_statistics",
    "doc_loglikelihood",
    "train",
    "format_model",
    "save_model",
    "load_model",
]

MODEL_FORMAT_VERSION = 1

_WEIGHTINGS = ("none", "inverse")


class TrainingError(RuntimeError):
    """Training could not produce a usable model."""


class ModelFormatError(ValueError):
    """Model file is corrupt, truncated, or has an unsupported version."""


@dataclass(frozen=True)
class TrainParams:
    """The five training knobs plus an optional profile size cap.

    ``min_docs_per_category``: categories with fewer contributing documents
    are not trained at all.
    ``min_doc_length_tokens``: shorter documents (pre-stop-filter token
    count) are excluded from training entirely.
    ``min_word_corpus_freq``: features rarer than this across the training
    corpus are never used as profile associates.
    ``min_loglikelihood``: per-document score threshold a feature must reach
    to contribute.
    ``descriptor_count_weighting``: ``none`` adds the raw score to every gold
    category's profile; ``inverse`` divides it by the number of gold
    categories on the document.
    ``max_associates_per_profile``: ``None`` keeps every associate.
    """

    min_docs_per_category: int = 4
    min_doc_length_tokens: int = 100
    min_word_corpus_freq: int = 4
    min_loglikelihood: float = 5.0
    descriptor_count_weighting: str = "inverse"
    max_associates_per_profile: int | None = None

    def __post_init__(self) -> None:
        if self.min_docs_per_category < 1:
            raise ValueError("min_docs_per_category must be >= 1")
        if self.min_doc_length_tokens < 0:
            raise ValueError("min_doc_length_tokens must be >= 0")
        if self.min_word_corpus_freq < 1:
            raise ValueError("min_word_corpus_freq must be >= 1")
        if self.min_loglikelihood < 0:
            raise ValueError("min_loglikelihood must be >= 0")
        if self.descriptor_count_weighting not in _WEIGHTINGS:
            raise ValueError(
                f"descriptor_count_weighting must be one of {_WEIGHTINGS}"
            )
        if self.max_associates_per_profile is not None and self.max_associates_per_profile < 1:
            raise ValueError("max_associates_per_profile must be >= 1 or None")

    def canonical(self) -> str:
        cap = self.max_associates_per_profile
        return (
            f"min_docs_per_category={self.min_docs_per_category}"
            f" min_doc_length_tokens={self.min_doc_length_tokens}"
            f" min_word_corpus_freq={self.min_word_corpus_freq}"
            f" min_loglikelihood={self.min_loglikelihood!r}"
            f" descriptor_count_weighting={self.descriptor_count_weighting}"
            f" max_associates_per_profile={'unlimited' if cap is None else cap}"
        )

    @classmethod
    def parse_canonical(cls, text: str) -> "TrainParams":
        kv: dict[str, str] = {}
        for part in text.split():
            key, _, value = part.partition("=")
            kv[key] = value
        try:
            cap = kv["max_associates_per_profile"]
            return cls(
                min_docs_per_category=int(kv["min_docs_per_category"]),
                min_doc_length_tokens=int(kv["min_doc_length_tokens"]),
                min_word_corpus_freq=int(kv["min_word_corpus_freq"]),
                min_loglikelihood=float(kv["min_loglikelihood"]),
                descriptor_count_weighting=kv["descriptor_count_weighting"],
                max_associates_per_profile=None if cap == "unlimited" else int(cap),
            )
        except (KeyError, ValueError) as exc:
            raise ModelFormatError(f"bad params line: {exc}") from None


@dataclass(frozen=True)
class CorpusStats:
    """Reference-corpus feature frequencies.  ``total_tokens`` is the grand
    sum of all feature counts."""

    total_tokens: int
    feature_freq: dict[str, int]
    n_docs: int


def corpus_statistics(docs: Iterable[FeatureDoc]) -> CorpusStats:
    freq: dict[str, int] = {}
    total = 0
    n = 0
    for doc in docs:
        n += 1
        for w, count in doc.features.items():
            freq[w] = freq.get(w, 0) + count
            total += count
    return CorpusStats(total_tokens=total, feature_freq=freq, n_docs=n)


# ---------------------------------------------------------------------------
# Log-likelihood statistic
# ---------------------------------------------------------------------------


def g2(a: float, b: float, c: float, d: float) -> float:
    """Log-likelihood ratio over the 2x2 table (a,b observed; c,d column
    totals).  Zero observed cells contribute zero; the value is 0 exactly at
    independence (a*d == b*c).

    Each term n*log(observed/expected) is computed as n*log1p(delta) with
    delta built from cross-products — exact integers for count data — so the
    result keeps full relative precision near independence, where the direct
    formula cancels catastrophically.
    """
    if c + d <= 0:
        raise ValueError("empty contingency table")
    if a == int(a) and b == int(b) and c == int(c) and d == int(d):
        a, b, c, d = int(a), int(b), int(c), int(d)
    observed = a + b
    ll = 0.0
    if a > 0:
        den = c * observed
        ll += a * math.log1p((a * (c + d) - den) / den)
    if b > 0:
        den = d * observed
        ll += b * math.log1p((b * (c + d) - den) / den)
    return 2.0 * ll


def doc_loglikelihood(doc: FeatureDoc, stats: CorpusStats) -> dict[str, float]:
    """Score every feature of ``doc`` against the reference corpus.

    The document itself is part of the reference corpus, so the rest-of-corpus
    cell is ``corpus_freq - a`` and can be zero but never negative.  Only
    over-represented features are returned; under-represented and exactly
    independent ones are omitted.
    """
    if not doc.features:
        raise ValueError(f"empty document: {doc.doc_id!r}")
    c = sum(doc.features.values())
    d = stats.total_tokens - c
    scores: dict[str, float] = {}
    for w, a in doc.features.items():
        freq = stats.feature_freq.get(w)
        if freq is None:
            raise ValueError(f"feature {w!r} absent from corpus statistics")
        b = freq - a
        if b < 0:
            raise ValueError(f"feature {w!r}: document count exceeds corpus count")
        # Over-representation test a/c > (a+b)/(c+d), cross-multiplied so
        # integer counts compare exactly.
        if a * d <= b * c:
            continue
        scores[w] = g2(a, b, c, d)
    return scores


# ---------------------------------------------------------------------------
# Profiles and models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CategoryProfile:
    """Weighted associate vector for one category.

    ``associates`` is kept in canonical order (descending weight, then
    feature) and ``norm`` is computed over that order, so a profile compares
    equal and ranks identically whether it came fresh from training or from a
    model file.
    """

    code: str
    associates: dict[str, float]
    norm: float
    n_train_docs: int

    @staticmethod
    def build(code: str, associates: dict[str, float], n_train_docs: int) -> "CategoryProfile":
        items = sorted(associates.items(), key=lambda kv: (-kv[1], kv[0]))
        ordered = dict(items)
        norm = math.sqrt(sum(w * w for w in ordered.values()))
        return CategoryProfile(code=code, associates=ordered, norm=norm, n_train_docs=n_train_docs)


@dataclass(frozen=True)
class Model:
    """A trained set of category profiles plus everything needed to check
    that an indexing run matches the training configuration."""

    profiles: dict[str, CategoryProfile]
    params: TrainParams
    feature_spec: FeatureSpec
    stoplist_fingerprint: str
    format_version: int = MODEL_FORMAT_VERSION

    def fingerprint(self) -> str:
        """Digest of the full serialised model; changes whenever anything
        that could affect ranking changes."""
        return hashlib.sha256(format_model(self).encode("utf-8")).hexdigest()


def train(
    collection: Collection,
    params: TrainParams = TrainParams(),
    spec: FeatureSpec = FeatureSpec(),
    stops: StopLists = StopLists(),
) -> Model:
    """Train category profiles from a labeled collection.

    Pipeline: prepare every document; drop short documents before anything
    else so they affect neither the reference corpus nor any profile; compute
    corpus statistics over the survivors; score each document's features,
    keeping those that clear the corpus-frequency and log-likelihood gates;
    add each document's surviving scores to each of its gold categories'
    profiles (weighted per ``descriptor_count_weighting``); finally drop
    categories with too few contributing documents and apply the optional
    associate cap.
    """
    prepared: list[tuple[frozenset[str], FeatureDoc]] = []
    for doc in collection.docs:
        fd = vectorize_text(doc.body, spec, stops, doc_id=doc.doc_id)
        if fd.token_count < params.min_doc_length_tokens:
            continue
        prepared.append((doc.gold, fd))

    stats = corpus_statistics(fd for _, fd in prepared)

    acc: dict[str, dict[str, float]] = {}
    contributors: dict[str, int] = {}
    min_freq = params.min_word_corpus_freq
    min_ll = params.min_loglikelihood
    for gold, fd in prepared:
        if not fd.features:
            continue
        scores = doc_loglikelihood(fd, stats)
        candidates = {
            w: s
            for w, s in scores.items()
            if stats.feature_freq[w] >= min_freq and s >= min_ll
        }
        if not candidates:
            continue
        weight_factor = 1.0 if params.descriptor_count_weighting == "none" else 1.0 / len(gold)
        for code in sorted(gold):
            contributors[code] = contributors.get(code, 0) + 1
            profile = acc.setdefault(code, {})
            for w, s in candidates.items():
                profile[w] = profile.get(w, 0.0) + s * weight_factor

    profiles: dict[str, CategoryProfile] = {}
    for code in sorted(acc):
        n_docs = contributors[code]
        if n_docs < params.min_docs_per_category:
            continue
        associates = acc[code]
        if not associates:
            continue
        if params.max_associates_per_profile is not None:
            top = sorted(associates.items(), key=lambda kv: (-kv[1], kv[0]))
            associates = dict(top[: params.max_associates_per_profile])
        profiles[code] = CategoryProfile.build(code, associates, n_docs)

    if not profiles:
        raise TrainingError(
            "zero trainable categories: no category reached "
            f"{params.min_docs_per_category} contributing documents"
        )
    return Model(
        profiles=profiles,
        params=params,
        feature_spec=spec,
        stoplist_fingerprint=stops.fingerprint(),
    )


# ---------------------------------------------------------------------------
# Model file format
# ---------------------------------------------------------------------------
#
#   profcat-model 1
#   checksum <sha256 of every byte after this line>
#   params <canonical train params>
#   feature_spec <canonical feature spec>
#   stoplist_fingerprint <hex>
#   profiles <count>
#   P\t<code>\t<n_train_docs>\t<n_associates>
#   A\t<feature>\t<weight>
#   ...
#
# Weights use repr(), the shortest decimal that round-trips, so load(save(m))
# reproduces every float bit for bit.


def format_model(m: Model) -> str:
    lines = [
        f"params {m.params.canonical()}",
        f"feature_spec {m.feature_spec.canonical()}",
        f"stoplist_fingerprint {m.stoplist_fingerprint}",
        f"profiles {len(m.profiles)}",
    ]
    for code in sorted(m.profiles):
        p = m.profiles[code]
        if "\t" in code or "\n" in code:
            raise ModelFormatError(f"unwritable category code: {code!r}")
        lines.append(f"P\t{code}\t{p.n_train_docs}\t{len(p.associates)}")
        for w, weight in sorted(p.associates.items(), key=lambda kv: (-kv[1], kv[0])):
            if "\t" in w or "\n" in w:
                raise ModelFormatError(f"unwritable feature: {w!r}")
            lines.append(f"A\t{w}\t{weight!r}")
    payload = "\n".join(lines) + "\n"
    digest = hashlib.sha256(payload.encode("utf-8")).hexdigest()
    return f"profcat-model {m.format_version}\nchecksum {digest}\n{payload}"


def save_model(m: Model, path: str | Path) -> None:
    Path(path).write_text(format_model(m), encoding="utf-8")


def load_model(path: str | Path) -> Model:
    """Load a model file, verifying version and checksum before parsing."""
    text = Path(path).read_text(encoding="utf-8")
    head, _, rest = text.partition("\n")
    if head != f"profcat-model {MODEL_FORMAT_VERSION}":
        raise ModelFormatError(f"unsupported model header: {head!r}")
    checksum_line, _, payload = rest.partition("\n")
    if not checksum_line.startswith("checksum "):
        raise ModelFormatError("missing checksum line")
    expected = checksum_line[len("checksum ") :]
    actual = hashlib.sha256(payload.encode("utf-8")).hexdigest()
    if actual != expected:
        raise ModelFormatError("checksum mismatch: model file is corrupt or truncated")

    lines = payload.split("\n")
    if lines and lines[-1] == "":
        lines.pop()

    def expect(prefix: str, line: str) -> str:
        if not line.startswith(prefix + " "):
            raise ModelFormatError(f"expected {prefix!r} line, got {line!r}")
        return line[len(prefix) + 1 :]

    try:
        params = TrainParams.parse_canonical(expect("params", lines[0]))
        spec = FeatureSpec.parse(expect("feature_spec", lines[1]))
        stop_fp = expect("stoplist_fingerprint", lines[2])
        n_profiles = int(expect("profiles", lines[3]))
    except (IndexError, ValueError) as exc:
        raise ModelFormatError(f"bad model header section: {exc}") from None

    profiles: dict[str, CategoryProfile] = {}
    i = 4
    for _ in range(n_profiles):
        if i >= len(lines):
            raise ModelFormatError("model file ends mid-profile")
        parts = lines[i].split("\t")
        if len(parts) != 4 or parts[0] != "P":
            raise ModelFormatError(f"bad profile line: {lines[i]!r}")
        _, code, n_docs_s, n_assoc_s = parts
        try:
            n_docs, n_assoc = int(n_docs_s), int(n_assoc_s)
        except ValueError:
            raise ModelFormatError(f"bad profile line: {lines[i]!r}") from None
        i += 1
        associates: dict[str, float] = {}
        for _ in range(n_assoc):
            if i >= len(lines):
                raise ModelFormatError(f"profile {code!r} ends mid-associates")
            aparts = lines[i].split("\t")
            if len(aparts) != 3 or aparts[0] != "A":
                raise ModelFormatError(f"bad associate line: {lines[i]!r}")
            try:
                associates[aparts[1]] = float(aparts[2])
            except ValueError:
                raise ModelFormatError(f"bad associate line: {lines[i]!r}") from None
            i += 1
        if code in profiles:
            raise ModelFormatError(f"duplicate profile {code!r}")
        profiles[code] = CategoryProfile.build(code, associates, n_docs)
    if i != len(lines):
        raise ModelFormatError("trailing data after last profile")

    return Model(
        profiles=profiles,
        params=params,
        feature_spec=spec,
        stoplist_fingerprint=stop_fp,
    )
