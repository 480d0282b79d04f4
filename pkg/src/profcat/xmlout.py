"""Assignment result XML.

One ``result`` root; one ``EuroVoc`` element per document carrying the
document id; one ``category`` element per assigned descriptor in rank order,
with the cosine weight serialised as the shortest decimal that round-trips.
Categories added by a human reviewer carry ``manual="true"`` and no weight.

    <result><EuroVoc documentId="doc-1"><category code="1542"
    weight="0.17665901837832437"></category>...</EuroVoc>
    <EuroVoc documentId="doc-2">...</EuroVoc></result>

``insert_result_block`` supports in-place mode for XML inputs: the document's
``EuroVoc`` block is appended as the last child of the input file's root
element, leaving the original bytes otherwise untouched.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable
from xml.etree import ElementTree

__all__ = [
    "DocResult",
    "result_xml",
    "eurovoc_block",
    "insert_result_block",
    "validate_result_xml",
]


@dataclass(frozen=True)
class DocResult:
    """Assignment outcome for one document, ready for serialisation."""

    doc_id: str
    entries: tuple[tuple[str, float], ...]
    manual: tuple[str, ...] = ()


_ATTR_ESCAPES = [("&", "&amp;"), ("<", "&lt;"), (">", "&gt;"), ('"', "&quot;")]


def _attr(value: str) -> str:
    for raw, escaped in _ATTR_ESCAPES:
        value = value.replace(raw, escaped)
    return value


def eurovoc_block(doc: DocResult) -> str:
    cats = "".join(
        f'<category code="{_attr(code)}" weight="{weight!r}"></category>'
        for code, weight in doc.entries
    )
    cats += "".join(
        f'<category code="{_attr(code)}" manual="true"></category>'
        for code in doc.manual
    )
    return f'<EuroVoc documentId="{_attr(doc.doc_id)}">{cats}</EuroVoc>'


def result_xml(docs: Iterable[DocResult]) -> str:
    """Serialise assignment results for a batch of documents."""
    return "<result>" + "\n".join(eurovoc_block(d) for d in docs) + "</result>"


_ROOT_TAG_RE = re.compile(r"<([A-Za-z_][\w.\-]*)[\s>/]")


def insert_result_block(xml_text: str, doc: DocResult) -> str:
    """Append the document's ``EuroVoc`` block as the last child of the root
    element of ``xml_text``.  Purely textual: the input markup is preserved
    byte for byte around the insertion."""
    m = _ROOT_TAG_RE.search(xml_text)
    if m is None:
        raise ValueError("input has no root element")
    root = m.group(1)
    close = xml_text.rfind(f"</{root}")
    if close == -1:
        raise ValueError(f"input has no closing tag for root element {root!r}")
    return xml_text[:close] + eurovoc_block(doc) + xml_text[close:]


def validate_result_xml(text: str) -> None:
    """Structural check used by tests and the saving paths: well-formed XML
    with the documented element/attribute shape.  Raises ValueError."""
    try:
        root = ElementTree.fromstring(text)
    except ElementTree.ParseError as exc:
        raise ValueError(f"result is not well-formed XML: {exc}") from None
    if root.tag != "result":
        raise ValueError(f"root element must be 'result', got {root.tag!r}")
    for block in root:
        if block.tag != "EuroVoc":
            raise ValueError(f"unexpected element {block.tag!r} under result")
        if "documentId" not in block.attrib:
            raise ValueError("EuroVoc element missing documentId")
        for cat in block:
            if cat.tag != "category":
                raise ValueError(f"unexpected element {cat.tag!r} under EuroVoc")
            if "code" not in cat.attrib:
                raise ValueError("category element missing code")
            if cat.attrib.get("manual") == "true":
                if "weight" in cat.attrib:
                    raise ValueError("manual category must not carry a weight")
            else:
                weight = cat.attrib.get("weight")
                if weight is None:
                    raise ValueError("category element missing weight")
                float(weight)  # raises ValueError if malformed
