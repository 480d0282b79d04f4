"""Shared fixtures: a small hand-built thesaurus and a synthetic labeled
corpus with known topical structure."""

from __future__ import annotations

import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable

from profcat import Collection, LabeledDoc, parse_thesaurus

THESAURUS_TEXT = """\
# test fixture thesaurus
field: 04 POLITICS
field: 56 AGRICULTURE, FORESTRY AND FISHERIES

code: 1542
label.en: regional policy
label.fr: politique regionale
narrower: 4315
field: 04

code: 4315
label.en: export subsidy
label.fr: subvention a l'exportation
broader: 1542
related: 3052
field: 56

code: 3052
label.en: agricultural policy
related: 4315
field: 56

code: 2173
label.en: agri-environment
broader: 3052
field: 56

code: 0525
label.en: official journal
field: 04
"""


@pytest.fixture(scope="session")
def fixture_thesaurus():
    return parse_thesaurus(THESAURUS_TEXT)


def build_synthetic_collection(
    n_categories: int = 50,
    docs_per_category: int = 40,
    n_distinctive: int = 20,
    seed: int = 7,
) -> Collection:
    """A corpus where category membership is recoverable from vocabulary.

    Each category owns ``n_distinctive`` terms of its own.  Each document
    carries 2-4 gold categories; its body holds short runs of terms sampled
    from each gold category's vocabulary plus shared background filler.  The
    body is shuffled at segment level so the runs survive: repeated adjacent
    terms give n-gram features enough corpus frequency to train on as well.
    Sized so every category collects about ``docs_per_category`` positive
    documents.
    """
    rng = random.Random(seed)
    categories = [str(1000 + i) for i in range(n_categories)]
    vocab = {
        cat: [f"topic{i:02d}term{j:02d}" for j in range(n_distinctive)]
        for i, cat in enumerate(categories)
    }
    background = [f"filler{i:03d}" for i in range(200)]

    n_docs = n_categories * docs_per_category // 3  # documents average 3 labels
    docs = []
    for d in range(n_docs):
        gold = rng.sample(categories, rng.randint(2, 4))
        segments: list[list[str]] = []
        for cat in gold:
            for term in rng.sample(vocab[cat], 6):
                segments.append([term] * 3)
        for _ in range(70):
            segments.append([rng.choice(background)])
        rng.shuffle(segments)
        words = [w for seg in segments for w in seg]
        docs.append(LabeledDoc(f"doc{d:04d}", frozenset(gold), " ".join(words)))
    return Collection(tuple(docs))


@pytest.fixture(scope="session")
def synthetic_collection() -> Collection:
    return build_synthetic_collection()
