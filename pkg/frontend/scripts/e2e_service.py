"""Stand up a real review service on a synthetic model for frontend e2e tests.

Trains six categories on planted vocabulary (each category's marker words
appear only in its own documents, so every profile is clean), loads a small
thesaurus with hierarchy links plus one untrained descriptor reachable via
search, and serves until killed.

Usage: python3 e2e_service.py --port 8899
"""

import argparse
import random
import tempfile
from pathlib import Path

import uvicorn

from profcat.corpus import Collection, LabeledDoc
from profcat.service import ServiceState, create_app
from profcat.textprep import StopLists
from profcat.thesaurus import parse_thesaurus
from profcat.trainer import train

MARKERS = {
    "3000": ["cereal", "harvest", "grain"],
    "3001": ["export", "refund", "tariff"],
    "3002": ["dairy", "quota", "milk"],
    "3003": ["fishery", "vessel", "catch"],
    "3004": ["wine", "vineyard", "bottling"],
    "3005": ["forestry", "timber", "plantation"],
}

FILLERS = [
    "measure", "council", "member", "state", "regulation", "article",
    "provision", "annex", "period", "application", "authority", "committee",
    "procedure", "decision", "amount", "product", "market", "year",
    "condition", "paragraph", "section", "system", "rule", "basis", "case",
    "scheme", "level", "report", "list", "notice",
]

THESAURUS_TEXT = """\
field: 10 TEST DOMAIN

code: 3000
label.en: cereal trade
narrower: 3001
field: 10

code: 3001
label.en: cereal export refund
broader: 3000
narrower: 3998
related: 3002
field: 10

code: 3002
label.en: dairy quota
related: 3001
field: 10

code: 3003
label.en: fishery agreement
field: 10

code: 3004
label.en: wine labelling
field: 10

code: 3005
label.en: forestry fund
field: 10

code: 3998
label.en: durum wheat refund
broader: 3001
field: 10

code: 3999
label.en: alpine pasture
field: 10
"""


def build_collection(docs_per_cat: int = 10, seed: int = 20240501) -> Collection:
    rng = random.Random(seed)
    docs = []
    for code, markers in sorted(MARKERS.items()):
        for i in range(docs_per_cat):
            words = []
            for marker in markers:
                words.extend([marker] * 8)
            words.extend(rng.choice(FILLERS) for _ in range(100))
            rng.shuffle(words)
            docs.append(
                LabeledDoc(
                    doc_id=f"doc-{code}-{i}",
                    gold=frozenset({code}),
                    body=" ".join(words),
                )
            )
    return Collection(docs=tuple(docs))


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--port", type=int, required=True)
    args = parser.parse_args()

    stops = StopLists(single=frozenset({"the", "of", "and", "to", "in"}), multi=())
    model = train(build_collection(), stops=stops)
    assert set(model.profiles) == set(MARKERS), sorted(model.profiles)

    state = ServiceState(
        model=model,
        thesaurus=parse_thesaurus(THESAURUS_TEXT),
        stops=stops,
        default_k=6,
        default_lang="en",
        out_dir=Path(tempfile.mkdtemp(prefix="e2e-saved-")),
    )
    uvicorn.run(create_app(state), host="127.0.0.1", port=args.port, log_level="warning")


if __name__ == "__main__":
    main()
