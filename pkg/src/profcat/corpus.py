"""Labeled corpora: the compact training format, splits, and statistics.

A compact corpus file interleaves header lines and document bodies:

    388 4282 5070 872 # doc-0001
    <P>body text, possibly with markup</P>
    more body text
    3032 525 # doc-0002
    ...

A header is a line of space-separated category codes, then ``#``, then the
document id; everything up to the next header is the body.  Codes are opaque
non-space strings that never contain ``#``, which is what makes the header
shape recognisable.  ``write_compact`` refuses documents whose body contains
a header-shaped line, since parsing back would split the document there.
"""

from __future__ import annotations

import math
import random
import re
from collections import Counter
from collections.abc import Iterable
from dataclasses import dataclass, field
from pathlib import Path

__all__ = [
    "LabeledDoc",
    "Collection",
    "SplitPlan",
    "CollectionStats",
    "CompactFormatError",
    "parse_compact",
    "parse_compact_text",
    "write_compact",
    "format_compact",
    "make_folds",
    "split_by_fold",
    "split_fixed",
    "collection_stats",
    "write_split_plan",
    "read_split_plan",
]


class CompactFormatError(ValueError):
    """Malformed compact corpus data."""


@dataclass(frozen=True)
class LabeledDoc:
    """One training document: id, gold category codes, raw body text."""

    doc_id: str
    gold: frozenset[str]
    body: str


@dataclass(frozen=True)
class Collection:
    """An ordered set of labeled documents with unique ids."""

    docs: tuple[LabeledDoc, ...]

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for d in self.docs:
            if d.doc_id in seen:
                raise ValueError(f"duplicate doc_id: {d.doc_id!r}")
            seen.add(d.doc_id)

    def __len__(self) -> int:
        return len(self.docs)

    def __iter__(self):
        return iter(self.docs)

    def __getitem__(self, i: int) -> LabeledDoc:
        return self.docs[i]

    def ids(self) -> list[str]:
        return [d.doc_id for d in self.docs]


# ---------------------------------------------------------------------------
# Compact format
# ---------------------------------------------------------------------------

# Zero or more space-terminated code tokens, '#', space, then the id.  The
# zero-code case is matched on purpose so it can be reported as an error
# instead of silently becoming body text.
_HEADER_RE = re.compile(r"^((?:[^#\s]+ )*)# (.*)$")


def parse_compact_text(text: str) -> Collection:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()  # trailing newline

    docs: list[LabeledDoc] = []
    seen: set[str] = set()
    current_id: str | None = None
    current_codes: frozenset[str] = frozenset()
    body_lines: list[str] = []

    def flush() -> None:
        if current_id is not None:
            docs.append(LabeledDoc(current_id, current_codes, "\n".join(body_lines)))

    for lineno, line in enumerate(lines, start=1):
        m = _HEADER_RE.match(line)
        if m is None:
            if current_id is None:
                raise CompactFormatError(f"line {lineno}: body before first header")
            body_lines.append(line)
            continue
        codes_part, doc_id = m.group(1), m.group(2)
        if not codes_part:
            raise CompactFormatError(f"line {lineno}: header with zero codes")
        if not doc_id:
            raise CompactFormatError(f"line {lineno}: header with empty doc id")
        if doc_id in seen:
            raise CompactFormatError(f"line {lineno}: duplicate doc_id {doc_id!r}")
        flush()
        seen.add(doc_id)
        current_id = doc_id
        current_codes = frozenset(codes_part[:-1].split(" "))
        body_lines = []
    flush()
    return Collection(tuple(docs))


def parse_compact(path: str | Path) -> Collection:
    """Parse a compact corpus file (UTF-8)."""
    return parse_compact_text(Path(path).read_text(encoding="utf-8-sig"))


def format_compact(c: Collection) -> str:
    """Serialise a collection to compact text: codes sorted ascending in each
    header, bodies verbatim.  ``parse_compact_text`` of the result reproduces
    ``c`` exactly."""
    out: list[str] = []
    for d in c.docs:
        if not d.gold:
            raise CompactFormatError(f"doc {d.doc_id!r} has no gold codes")
        for code in d.gold:
            if not code or "#" in code or any(ch.isspace() for ch in code):
                raise CompactFormatError(f"doc {d.doc_id!r} has unwritable code {code!r}")
        if "\n" in d.doc_id or not d.doc_id:
            raise CompactFormatError(f"unwritable doc_id {d.doc_id!r}")
        for body_line in d.body.split("\n"):
            if _HEADER_RE.match(body_line):
                raise CompactFormatError(
                    f"doc {d.doc_id!r}: body line would be misread as a header: {body_line!r}"
                )
        out.append(" ".join(sorted(d.gold)) + " # " + d.doc_id)
        if d.body:
            out.append(d.body)
    return "\n".join(out) + ("\n" if out else "")


def write_compact(c: Collection, path: str | Path) -> None:
    Path(path).write_text(format_compact(c), encoding="utf-8")


# ---------------------------------------------------------------------------
# Splits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SplitPlan:
    """Assignment of doc ids to folds.  Produced by a seeded shuffle followed
    by round-robin assignment, so fold sizes never differ by more than one."""

    n_folds: int
    seed: int | None  # None when the plan was loaded from a file
    assignment: dict[str, int]

    def fold_ids(self, fold: int) -> set[str]:
        return {doc_id for doc_id, f in self.assignment.items() if f == fold}


def make_folds(c: Collection, n_folds: int, seed: int) -> SplitPlan:
    if n_folds < 2:
        raise ValueError(f"need at least 2 folds, got {n_folds}")
    if n_folds > len(c.docs):
        raise ValueError(f"{n_folds} folds but only {len(c.docs)} documents")
    order = list(range(len(c.docs)))
    random.Random(seed).shuffle(order)
    assignment = {c.docs[order[i]].doc_id: i % n_folds for i in range(len(order))}
    return SplitPlan(n_folds=n_folds, seed=seed, assignment=assignment)


def split_by_fold(c: Collection, plan: SplitPlan, fold: int) -> tuple[Collection, Collection]:
    """(train, test) collections for one fold, both preserving corpus order."""
    if not 0 <= fold < plan.n_folds:
        raise ValueError(f"fold {fold} out of range")
    test = tuple(d for d in c.docs if plan.assignment[d.doc_id] == fold)
    train = tuple(d for d in c.docs if plan.assignment[d.doc_id] != fold)
    return Collection(train), Collection(test)


def split_fixed(c: Collection, test_ids: Iterable[str]) -> tuple[Collection, Collection]:
    """(train, test) split by an explicit test id set, order preserved."""
    test_ids = set(test_ids)
    known = set(c.ids())
    unknown = test_ids - known
    if unknown:
        raise ValueError(f"unknown test ids: {sorted(unknown)[:5]}")
    test = tuple(d for d in c.docs if d.doc_id in test_ids)
    train = tuple(d for d in c.docs if d.doc_id not in test_ids)
    return Collection(train), Collection(test)


def write_split_plan(plan: SplitPlan, path: str | Path) -> None:
    """One ``doc_id<TAB>fold`` line per document, corpus-independent and
    diffable across runs."""
    lines = [f"{doc_id}\t{fold}" for doc_id, fold in sorted(plan.assignment.items())]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_split_plan(path: str | Path) -> SplitPlan:
    """Inverse of ``write_split_plan``; the fold count is inferred, the seed
    is not recorded in the file."""
    assignment: dict[str, int] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            doc_id, fold = line.rsplit("\t", 1)
            assignment[doc_id] = int(fold)
        except ValueError:
            raise ValueError(f"line {lineno}: expected 'doc_id<TAB>fold'") from None
        if assignment[doc_id] < 0:
            raise ValueError(f"line {lineno}: negative fold number")
    if not assignment:
        raise ValueError("empty split plan")
    n_folds = max(assignment.values()) + 1
    if set(assignment.values()) != set(range(n_folds)):
        raise ValueError("fold numbering has gaps")
    return SplitPlan(n_folds=n_folds, seed=None, assignment=assignment)


# ---------------------------------------------------------------------------
# Statistics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CollectionStats:
    """Gold-label shape of a collection: how many labels documents carry and
    how often each descriptor is used."""

    n_docs: int
    mean_labels_per_doc: float
    std_labels_per_doc: float  # population standard deviation
    label_histogram: dict[int, int]  # gold-set size -> number of docs
    descriptor_usage: dict[str, int]  # code -> number of docs using it


def collection_stats(c: Collection) -> CollectionStats:
    if not c.docs:
        raise ValueError("empty collection")
    sizes = [len(d.gold) for d in c.docs]
    n = len(sizes)
    mean = sum(sizes) / n
    var = sum((s - mean) ** 2 for s in sizes) / n
    usage: Counter[str] = Counter()
    for d in c.docs:
        usage.update(d.gold)
    return CollectionStats(
        n_docs=n,
        mean_labels_per_doc=mean,
        std_labels_per_doc=math.sqrt(var),
        label_histogram=dict(sorted(Counter(sizes).items())),
        descriptor_usage=dict(sorted(usage.items())),
    )
