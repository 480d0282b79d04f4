"""Indexer tests: cosine ranking, blacklist handling, and explanations."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import oracle_rank
from profcat.indexer import (
    Blacklist,
    EMPTY_BLACKLIST,
    explain,
    load_blacklist,
    rank,
    rank_many,
    vectorize,
)
from profcat.textprep import FeatureDoc, FeatureSpec, StopLists
from profcat.trainer import CategoryProfile, Model, TrainParams


def _model(profiles: dict[str, dict[str, float]], spec: FeatureSpec = FeatureSpec()) -> Model:
    return Model(
        profiles={
            code: CategoryProfile.build(code, associates, n_train_docs=4)
            for code, associates in profiles.items()
        },
        params=TrainParams(),
        feature_spec=spec,
        stoplist_fingerprint="0" * 64,
    )


class TestBlacklist:
    def test_membership(self):
        bl = Blacklist(frozenset({"100", "200"}))
        assert "100" in bl
        assert "300" not in bl
        assert "100" not in EMPTY_BLACKLIST

    def test_load(self, tmp_path):
        path = tmp_path / "bl.txt"
        path.write_text("# junk categories\n100\n\n200\n")
        bl = load_blacklist(path)
        assert bl.codes == frozenset({"100", "200"})

    def test_blacklisted_code_is_replaced_in_top_k(self):
        m = _model(
            {
                "top": {"x": 2.0},
                "mid": {"x": 1.0, "y": 1.0},
                "low": {"x": 1.0, "y": 3.0},
            }
        )
        doc = FeatureDoc("d", {"x": 5}, 5)
        full = rank(doc, m, k=2)
        assert [c for c, _ in full.entries] == ["top", "mid"]
        cut = rank(doc, m, Blacklist(frozenset({"top"})), k=2)
        assert [c for c, _ in cut.entries] == ["mid", "low"]


class TestRank:
    def test_parallel_vectors_score_exactly_one(self):
        # 3-4-5 construction: dot=25, |doc|=5, |profile|=5, every step exact.
        m = _model({"P": {"a": 3.0, "b": 4.0}})
        got = rank(FeatureDoc("d", {"a": 3, "b": 4}, 7), m, k=1)
        assert got.entries == (("P", 1.0),)

    def test_no_shared_feature_excluded(self):
        m = _model({"P": {"a": 1.0}, "Q": {"z": 1.0}})
        got = rank(FeatureDoc("d", {"a": 2}, 2), m, k=5)
        assert [c for c, _ in got.entries] == ["P"]

    def test_ties_break_by_code(self):
        m = _model({"zeta": {"x": 1.0}, "alpha": {"x": 1.0}})
        got = rank(FeatureDoc("d", {"x": 1, "other": 1}, 2), m, k=5)
        assert [c for c, _ in got.entries] == ["alpha", "zeta"]
        assert got.entries[0][1] == got.entries[1][1]

    def test_truncates_to_k(self):
        m = _model({f"c{i}": {"x": 1.0, f"pad{i}": float(i + 1)} for i in range(8)})
        got = rank(FeatureDoc("d", {"x": 3}, 3), m, k=3)
        assert len(got.entries) == 3
        assert got.k_requested == 3

    def test_bad_k(self):
        m = _model({"P": {"a": 1.0}})
        with pytest.raises(ValueError):
            rank(FeatureDoc("d", {"a": 1}, 1), m, k=0)

    def test_empty_doc_reported_not_raised(self, caplog):
        m = _model({"P": {"a": 1.0}})
        with caplog.at_level("WARNING"):
            got = rank(FeatureDoc("blank", {}, 0), m, k=3)
        assert got.empty_doc is True
        assert got.entries == ()
        assert any("blank" in r.message for r in caplog.records)

    def test_scaling_doc_counts_changes_nothing(self):
        m = _model(
            {
                "P": {"a": 1.5, "b": 0.25},
                "Q": {"b": 2.0, "c": 1.0},
                "R": {"a": 0.5, "c": 3.0},
            }
        )
        doc = FeatureDoc("d", {"a": 2, "b": 3, "c": 1}, 6)
        scaled = FeatureDoc("d", {w: 7 * c for w, c in doc.features.items()}, 42)
        got, got7 = rank(doc, m, k=3), rank(scaled, m, k=3)
        assert [c for c, _ in got.entries] == [c for c, _ in got7.entries]
        for (_, w1), (_, w2) in zip(got.entries, got7.entries):
            assert w1 == pytest.approx(w2, abs=1e-12)

    def test_weights_bounded(self):
        rng = random.Random(5)
        profiles = {
            f"c{i}": {f"w{j}": rng.uniform(0.1, 9.0) for j in rng.sample(range(30), 6)}
            for i in range(20)
        }
        m = _model(profiles)
        for trial in range(30):
            features = {f"w{j}": rng.randint(1, 40) for j in rng.sample(range(30), 8)}
            got = rank(FeatureDoc(f"d{trial}", features, 10), m, k=20)
            weights = [w for _, w in got.entries]
            assert all(0.0 < w <= 1.0 for w in weights)
            assert weights == sorted(weights, reverse=True)

    def test_matches_exact_arithmetic_oracle(self):
        # Dyadic weights so float conversion is lossless and the oracle's
        # exact ordering is the float ordering.
        rng = random.Random(11)
        for trial in range(50):
            profiles = {
                f"c{i:02d}": {
                    f"w{j}": Fraction(rng.randint(1, 1024), 1024)
                    for j in rng.sample(range(25), rng.randint(2, 8))
                }
                for i in range(rng.randint(2, 12))
            }
            doc = {f"w{j}": rng.randint(1, 50) for j in rng.sample(range(25), 10)}
            k = rng.randint(1, 8)
            expected = oracle_rank(doc, profiles, k)
            m = _model(
                {c: {w: float(f) for w, f in a.items()} for c, a in profiles.items()}
            )
            got = rank(FeatureDoc("d", doc, 10), m, k=k)
            assert [c for c, _ in got.entries] == [c for c, _ in expected]
            for (_, w_got), (_, w_exp) in zip(got.entries, expected):
                assert w_got == pytest.approx(w_exp, abs=1e-12)

    def test_adding_a_profile_feature_never_hurts_its_rank(self):
        m = _model(
            {
                "P": {"a": 1.0, "b": 2.0},
                "Q": {"c": 2.0},
                "R": {"c": 1.0, "d": 1.0},
            }
        )
        doc = {"c": 3, "d": 1}
        base = rank(FeatureDoc("d", doc, 4), m, k=3)
        richer = rank(FeatureDoc("d", {**doc, "b": 2}, 6), m, k=3)
        base_pos = [c for c, _ in base.entries]
        richer_pos = [c for c, _ in richer.entries]
        assert "P" not in base_pos
        assert "P" in richer_pos

    def test_rank_many_parallel_equals_serial(self):
        rng = random.Random(3)
        m = _model(
            {
                f"c{i}": {f"w{j}": rng.uniform(0.5, 4.0) for j in rng.sample(range(12), 4)}
                for i in range(10)
            }
        )
        docs = [
            FeatureDoc(f"d{t}", {f"w{j}": rng.randint(1, 9) for j in rng.sample(range(12), 5)}, 5)
            for t in range(40)
        ]
        serial = rank_many(docs, m, k=4)
        parallel = rank_many(docs, m, k=4, max_workers=4)
        assert serial == parallel
        assert [a.doc_id for a in serial] == [d.doc_id for d in docs]


class TestVectorize:
    def test_markup_and_stops_applied(self):
        stops = StopLists(single=frozenset({"the"}), multi=())
        fd = vectorize("<p>The cat saw the cat</p>", FeatureSpec(), stops, doc_id="v")
        assert fd.features == {"cat": 2, "saw": 1}
        assert fd.token_count == 5  # pre-stop-filter count


class TestExplain:
    def test_matched_associates_sorted_by_weight(self):
        m = _model({"P": {"low": 1.0, "high": 5.0, "absent": 9.0}})
        doc = FeatureDoc("d", {"low": 2, "high": 1, "noise": 4}, 7)
        ex = explain(doc, "low high noise", m, "P")
        assert [a.feature for a in ex.matched] == ["high", "low"]
        assert ex.matched[0].profile_weight == 5.0
        assert ex.matched[1].doc_count == 2

    def test_disjoint_doc_has_empty_explanation(self):
        m = _model({"P": {"x": 1.0}})
        ex = explain(FeatureDoc("d", {"y": 1}, 1), "y", m, "P")
        assert ex.matched == ()
        assert ex.spans == ()

    def test_repeated_token_yields_a_span_per_occurrence(self):
        m = _model({"P": {"cat": 2.0}})
        text = "cat sat, cat ran"
        doc = FeatureDoc("d", {"cat": 2, "sat": 1, "ran": 1}, 4)
        ex = explain(doc, text, m, "P")
        assert len(ex.spans) == 2
        for start, end in ex.spans:
            assert text[start:end].lower() == "cat"
        assert list(ex.spans) == sorted(ex.spans)

    def test_spans_use_original_casing_positions(self):
        m = _model({"P": {"treaty": 1.0}})
        text = "The TREATY applies"
        doc = FeatureDoc("d", {"the": 1, "treaty": 1, "applies": 1}, 3)
        ex = explain(doc, text, m, "P")
        (span,) = ex.spans
        assert text[span[0] : span[1]] == "TREATY"

    def test_bigram_span_covers_both_words(self):
        m = _model(
            {"P": {"export subsidy": 3.0}}, spec=FeatureSpec(kind="ngram", n=2)
        )
        text = "x export subsidy y"
        doc = FeatureDoc(
            "d", {"x export": 1, "export subsidy": 1, "subsidy y": 1}, 4
        )
        ex = explain(doc, text, m, "P")
        (span,) = ex.spans
        assert text[span[0] : span[1]] == "export subsidy"

    def test_bigram_span_bridges_stop_words(self):
        # The feature was built after stop filtering, so its two tokens can
        # be separated in the source text; the span must cover the gap.
        stops = StopLists(single=frozenset({"of", "the"}), multi=())
        m = _model(
            {"P": {"council decision": 3.0}}, spec=FeatureSpec(kind="ngram", n=2)
        )
        text = "Council of the Decision"
        doc = FeatureDoc("d", {"council decision": 1}, 4)
        ex = explain(doc, text, m, "P", stops=stops)
        (span,) = ex.spans
        assert text[span[0] : span[1]] == "Council of the Decision"

    def test_external_features_have_no_spans(self):
        spec = FeatureSpec(kind="external", external_command="cat")
        m = _model({"P": {"opaque": 1.0}}, spec=spec)
        ex = explain(FeatureDoc("d", {"opaque": 3}, 3), "whatever", m, "P")
        assert [a.feature for a in ex.matched] == ["opaque"]
        assert ex.spans == ()

    def test_unknown_code(self):
        m = _model({"P": {"x": 1.0}})
        with pytest.raises(KeyError, match="nope"):
            explain(FeatureDoc("d", {"x": 1}, 1), "x", m, "nope")


@given(
    counts=st.dictionaries(
        st.sampled_from([f"w{i}" for i in range(10)]),
        st.integers(min_value=1, max_value=30),
        min_size=1,
        max_size=6,
    ),
    weights=st.dictionaries(
        st.sampled_from([f"w{i}" for i in range(10)]),
        st.integers(min_value=1, max_value=2048).map(lambda n: n / 1024),
        min_size=1,
        max_size=6,
    ),
)
@settings(max_examples=200)
def test_single_profile_weight_matches_direct_formula(counts, weights):
    m = _model({"P": weights})
    got = rank(FeatureDoc("d", counts, 1), m, k=1)
    dot = sum(counts[w] * weights[w] for w in counts if w in weights)
    if dot <= 0:
        assert got.entries == ()
    else:
        d_norm = sum(c * c for c in counts.values()) ** 0.5
        p_norm = sum(w * w for w in m.profiles["P"].associates.values()) ** 0.5
        assert got.entries[0][1] == pytest.approx(min(1.0, dot / (d_norm * p_norm)), rel=1e-12)
