"""Thesaurus model: descriptors with labels, hierarchy, and related links.

The on-disk format is a plain-text record file (see ``load_thesaurus``).
Records are separated by blank lines; ``#`` lines are comments.  A record
whose first line is ``field:`` defines subject fields (one per line); a
record whose first line is ``code:`` defines a descriptor:

    field: 56 AGRICULTURE, FORESTRY AND FISHERIES

    code: 4315
    label.en: export subsidy
    label.fr: subvention a l'exportation
    broader: 1542
    related: 0888 0999
    field: 56

Link lists are space-separated codes.  The loader repairs missing inverse
links (broader/narrower must mirror each other, related must be symmetric),
logging a warning for each repair, and rejects dangling references and
hierarchy cycles outright.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

logger = logging.getLogger(__name__)

__all__ = [
    "Descriptor",
    "Thesaurus",
    "Neighborhood",
    "ThesaurusParseError",
    "ThesaurusIntegrityError",
    "load_thesaurus",
    "parse_thesaurus",
    "write_thesaurus",
    "format_thesaurus",
]


class ThesaurusParseError(ValueError):
    """Malformed thesaurus file."""


class ThesaurusIntegrityError(ValueError):
    """Structurally broken thesaurus: dangling reference or hierarchy cycle."""


@dataclass(frozen=True)
class Descriptor:
    """One thesaurus entry.  Link fields hold codes, sorted; ``labels`` maps
    language code to display string and may be sparse."""

    code: str
    labels: dict[str, str] = field(default_factory=dict)
    broader: tuple[str, ...] = ()
    narrower: tuple[str, ...] = ()
    related: tuple[str, ...] = ()
    field_id: str | None = None

    def label(self, lang: str) -> str:
        """Display string in ``lang``, falling back to the code itself."""
        return self.labels.get(lang, self.code)


@dataclass(frozen=True)
class Neighborhood:
    """Immediate surroundings of a descriptor, for review display."""

    descriptor: Descriptor
    broader: tuple[Descriptor, ...]
    narrower: tuple[Descriptor, ...]
    related: tuple[Descriptor, ...]
    field_label: str


@dataclass(frozen=True)
class Thesaurus:
    """Immutable descriptor collection.  Built by ``load_thesaurus`` /
    ``parse_thesaurus``; integrity is guaranteed after construction, so
    lookups never have to re-validate."""

    descriptors: dict[str, Descriptor]
    fields: dict[str, str] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.descriptors)

    def __contains__(self, code: str) -> bool:
        return code in self.descriptors

    def get(self, code: str) -> Descriptor:
        try:
            return self.descriptors[code]
        except KeyError:
            raise KeyError(f"unknown descriptor code: {code!r}") from None

    def search(self, query: str, lang: str) -> list[Descriptor]:
        """Case-insensitive substring search over labels in ``lang``.

        Results are ordered by match position, then code.  Descriptors with
        no label in ``lang`` never match, so an unknown language yields an
        empty result.  The empty query matches everything.
        """
        q = query.lower()
        hits: list[tuple[int, str, Descriptor]] = []
        for code in sorted(self.descriptors):
            d = self.descriptors[code]
            label = d.labels.get(lang)
            if label is None:
                continue
            pos = label.lower().find(q)
            if pos >= 0:
                hits.append((pos, code, d))
        hits.sort(key=lambda h: (h[0], h[1]))
        return [d for _, _, d in hits]

    def neighborhood(self, code: str) -> Neighborhood:
        """Broader/narrower/related descriptors plus the field display label."""
        d = self.get(code)
        return Neighborhood(
            descriptor=d,
            broader=tuple(self.descriptors[c] for c in d.broader),
            narrower=tuple(self.descriptors[c] for c in d.narrower),
            related=tuple(self.descriptors[c] for c in d.related),
            field_label=self.fields.get(d.field_id, "") if d.field_id else "",
        )


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_DESCRIPTOR_KEYS = ("broader", "narrower", "related", "field")


def _check_code(code: str, where: str) -> str:
    if not code or any(ch.isspace() for ch in code) or ":" in code:
        raise ThesaurusParseError(f"bad code {code!r} in {where}")
    return code


def parse_thesaurus(text: str) -> Thesaurus:
    fields: dict[str, str] = {}
    raw: dict[str, dict] = {}  # code -> record dict

    record: list[tuple[str, str, int]] = []  # (key, value, line number)

    def flush() -> None:
        if not record:
            return
        first_key, first_value, first_line = record[0]
        if first_key == "field":
            # A field record may define several fields, one per line.
            for key, value, lineno in record:
                if key != "field":
                    raise ThesaurusParseError(
                        f"line {lineno}: unexpected {key!r} in field record"
                    )
                parts = value.split(None, 1)
                if len(parts) != 2:
                    raise ThesaurusParseError(
                        f"line {lineno}: field record needs '<id> <label>'"
                    )
                fid = _check_code(parts[0], f"line {lineno}")
                if fid in fields:
                    raise ThesaurusParseError(f"line {lineno}: duplicate field {fid!r}")
                fields[fid] = parts[1]
        elif first_key == "code":
            code = _check_code(first_value, f"line {first_line}")
            if code in raw:
                raise ThesaurusParseError(
                    f"line {first_line}: duplicate descriptor {code!r}"
                )
            rec: dict = {"labels": {}, "broader": set(), "narrower": set(), "related": set(), "field": None}
            for key, value, lineno in record[1:]:
                if key.startswith("label."):
                    lang = key[len("label.") :]
                    if not lang or lang in rec["labels"]:
                        raise ThesaurusParseError(f"line {lineno}: bad label key {key!r}")
                    rec["labels"][lang] = value
                elif key in ("broader", "narrower", "related"):
                    for c in value.split():
                        rec[key].add(_check_code(c, f"line {lineno}"))
                elif key == "field":
                    rec["field"] = _check_code(value, f"line {lineno}")
                elif key == "code":
                    raise ThesaurusParseError(f"line {lineno}: repeated code key")
                else:
                    raise ThesaurusParseError(f"line {lineno}: unknown key {key!r}")
            raw[code] = rec
        else:
            raise ThesaurusParseError(
                f"line {first_line}: record must start with 'code:' or 'field:'"
            )
        record.clear()

    for lineno, line in enumerate(text.split("\n"), start=1):
        stripped = line.strip()
        if stripped.startswith("#"):
            continue
        if not stripped:
            flush()
            continue
        if ":" not in stripped:
            raise ThesaurusParseError(f"line {lineno}: expected 'key: value'")
        key, _, value = stripped.partition(":")
        record.append((key.strip(), value.strip(), lineno))
    flush()

    return _build(raw, fields)


def _build(raw: dict[str, dict], fields: dict[str, str]) -> Thesaurus:
    # Dangling references are rejected before any repair is attempted:
    # a link to a missing code cannot be made symmetric.
    for code, rec in raw.items():
        for key in ("broader", "narrower", "related"):
            for other in rec[key]:
                if other not in raw:
                    raise ThesaurusIntegrityError(
                        f"descriptor {code!r} references unknown code {other!r} ({key})"
                    )
        if rec["field"] is not None and rec["field"] not in fields:
            raise ThesaurusIntegrityError(
                f"descriptor {code!r} references unknown field {rec['field']!r}"
            )
        if code in rec["broader"] or code in rec["narrower"] or code in rec["related"]:
            raise ThesaurusIntegrityError(f"descriptor {code!r} links to itself")

    repaired = 0
    for code, rec in raw.items():
        for other in rec["broader"]:
            if code not in raw[other]["narrower"]:
                raw[other]["narrower"].add(code)
                repaired += 1
                logger.warning("repaired link: %s narrower %s was missing", other, code)
        for other in rec["narrower"]:
            if code not in raw[other]["broader"]:
                raw[other]["broader"].add(code)
                repaired += 1
                logger.warning("repaired link: %s broader %s was missing", other, code)
        for other in rec["related"]:
            if code not in raw[other]["related"]:
                raw[other]["related"].add(code)
                repaired += 1
                logger.warning("repaired link: %s related %s was missing", other, code)
    if repaired:
        logger.warning("thesaurus loaded with %d repaired links", repaired)

    # Cycle check over broader edges (iterative DFS, colouring).
    WHITE, GREY, BLACK = 0, 1, 2
    colour = dict.fromkeys(raw, WHITE)
    for start in raw:
        if colour[start] != WHITE:
            continue
        stack: list[tuple[str, int]] = [(start, 0)]
        while stack:
            node, idx = stack[-1]
            if idx == 0:
                colour[node] = GREY
            parents = sorted(raw[node]["broader"])
            if idx < len(parents):
                stack[-1] = (node, idx + 1)
                nxt = parents[idx]
                if colour[nxt] == GREY:
                    raise ThesaurusIntegrityError(
                        f"hierarchy cycle through {nxt!r}"
                    )
                if colour[nxt] == WHITE:
                    stack.append((nxt, 0))
            else:
                colour[node] = BLACK
                stack.pop()

    descriptors = {
        code: Descriptor(
            code=code,
            labels=dict(sorted(rec["labels"].items())),
            broader=tuple(sorted(rec["broader"])),
            narrower=tuple(sorted(rec["narrower"])),
            related=tuple(sorted(rec["related"])),
            field_id=rec["field"],
        )
        for code, rec in sorted(raw.items())
    }
    return Thesaurus(descriptors=descriptors, fields=dict(sorted(fields.items())))


def load_thesaurus(path: str | Path) -> Thesaurus:
    """Load and validate a thesaurus file (see module docstring for the
    format)."""
    return parse_thesaurus(Path(path).read_text(encoding="utf-8-sig"))


# ---------------------------------------------------------------------------
# Writing
# ---------------------------------------------------------------------------


def format_thesaurus(t: Thesaurus) -> str:
    """Canonical text form: fields first, then descriptors, both sorted, link
    lists sorted, empty link keys omitted.  ``parse_thesaurus`` of the result
    reproduces ``t`` exactly."""
    blocks: list[str] = []
    for fid in sorted(t.fields):
        blocks.append(f"field: {fid} {t.fields[fid]}")
    for code in sorted(t.descriptors):
        d = t.descriptors[code]
        lines = [f"code: {d.code}"]
        for lang in sorted(d.labels):
            lines.append(f"label.{lang}: {d.labels[lang]}")
        if d.broader:
            lines.append("broader: " + " ".join(sorted(d.broader)))
        if d.narrower:
            lines.append("narrower: " + " ".join(sorted(d.narrower)))
        if d.related:
            lines.append("related: " + " ".join(sorted(d.related)))
        if d.field_id is not None:
            lines.append(f"field: {d.field_id}")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + ("\n" if blocks else "")


def write_thesaurus(t: Thesaurus, path: str | Path) -> None:
    Path(path).write_text(format_thesaurus(t), encoding="utf-8")
