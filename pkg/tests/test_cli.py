"""CLI tests: every subcommand end to end via ``main()``, plus the exit-code
contract and the config-file/flag precedence rules."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from profcat.cli import EXIT_DATA, EXIT_OK, EXIT_PIPELINE, EXIT_USAGE, main
from profcat.corpus import Collection, LabeledDoc, write_compact
from profcat.trainer import load_model
from profcat.xmlout import validate_result_xml

# Gates opened wide so an eight-document corpus trains.
OPEN_FLAGS = [
    "--min-docs-per-category", "1",
    "--min-doc-length-tokens", "0",
    "--min-word-corpus-freq", "1",
    "--min-loglikelihood", "0",
    "--descriptor-count-weighting", "none",
]


@pytest.fixture()
def corpus_path(tmp_path: Path) -> Path:
    docs = []
    for i in range(4):
        docs.append(
            LabeledDoc(f"a{i}", frozenset({"1001"}), " ".join(["alpha"] * 5 + ["pad"] * 5))
        )
        docs.append(
            LabeledDoc(f"b{i}", frozenset({"2002"}), " ".join(["beta"] * 5 + ["pad"] * 5))
        )
    path = tmp_path / "corpus.txt"
    write_compact(Collection(tuple(docs)), path)
    return path


@pytest.fixture()
def model_path(tmp_path: Path, corpus_path: Path) -> Path:
    path = tmp_path / "out.model"
    code = main(["train", "--corpus", str(corpus_path), "--model", str(path), *OPEN_FLAGS])
    assert code == EXIT_OK
    return path


class TestTrain:
    def test_trains_and_reports(self, tmp_path, corpus_path, capsys):
        model = tmp_path / "m.model"
        code = main(
            ["train", "--corpus", str(corpus_path), "--model", str(model), *OPEN_FLAGS]
        )
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "categories trained: 2" in out
        assert f"model written: {model}" in out
        loaded = load_model(model)
        assert set(loaded.profiles) == {"1001", "2002"}

    def test_verbose_lists_categories(self, tmp_path, corpus_path, capsys):
        model = tmp_path / "m.model"
        main(
            ["train", "--corpus", str(corpus_path), "--model", str(model), "--verbose", *OPEN_FLAGS]
        )
        out = capsys.readouterr().out
        assert "1001:" in out and "associates" in out

    def test_missing_required_setting(self, corpus_path):
        assert main(["train", "--corpus", str(corpus_path)]) == EXIT_USAGE

    def test_nonexistent_corpus(self, tmp_path):
        code = main(
            ["train", "--corpus", str(tmp_path / "nope.txt"), "--model", str(tmp_path / "m")]
        )
        assert code == EXIT_USAGE

    def test_malformed_corpus(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("this is not a header\n")
        code = main(["train", "--corpus", str(bad), "--model", str(tmp_path / "m")])
        assert code == EXIT_DATA

    def test_untrainable_corpus(self, tmp_path, corpus_path):
        # defaults demand 100-token documents; these have 10
        code = main(
            ["train", "--corpus", str(corpus_path), "--model", str(tmp_path / "m")]
        )
        assert code == EXIT_PIPELINE

    def test_bad_param_value(self, tmp_path, corpus_path):
        code = main(
            [
                "train", "--corpus", str(corpus_path), "--model", str(tmp_path / "m"),
                "--min-docs-per-category", "0",
            ]
        )
        assert code == EXIT_USAGE


class TestConfigFile:
    def test_flags_override_config(self, tmp_path, corpus_path):
        cfg = tmp_path / "train.cfg"
        cfg.write_text(
            "corpus = {}\nmodel = {}\n"
            "min_docs_per_category = 99\nmin_doc_length_tokens = 0\n"
            "min_word_corpus_freq = 1\nmin_loglikelihood = 0\n".format(
                corpus_path, tmp_path / "m.model"
            )
        )
        # config alone demands 99 docs per category -> nothing trains
        assert main(["train", "--config", str(cfg)]) == EXIT_PIPELINE
        # the flag takes precedence and training succeeds
        assert main(["train", "--config", str(cfg), "--min-docs-per-category", "1"]) == EXIT_OK

    def test_unknown_config_key(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("corpsu = typo.txt\n")
        assert main(["train", "--config", str(cfg)]) == EXIT_USAGE

    def test_non_integer_config_value(self, tmp_path, corpus_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text(f"corpus = {corpus_path}\nmodel = m\nmin_docs_per_category = many\n")
        assert main(["train", "--config", str(cfg)]) == EXIT_USAGE

    def test_unknown_flag_exits_two(self, corpus_path):
        with pytest.raises(SystemExit) as exc:
            main(["train", "--corpsu", str(corpus_path)])
        assert exc.value.code == 2


class TestIndex:
    def test_single_file_to_output(self, tmp_path, model_path, capsys):
        doc = tmp_path / "doc.txt"
        doc.write_text("alpha alpha alpha beta pad")
        out = tmp_path / "result.xml"
        code = main(
            [
                "index", "--model", str(model_path), "--input-file", str(doc),
                "--output", str(out), "--k", "2",
            ]
        )
        assert code == EXIT_OK
        xml = out.read_text()
        validate_result_xml(xml.strip())
        assert 'documentId="' + str(doc) + '"' in xml
        assert 'code="1001"' in xml  # alpha-dominated document
        assert xml.index('code="1001"') < xml.index('code="2002"')

    def test_stdout_when_no_output(self, tmp_path, model_path, capsys):
        doc = tmp_path / "doc.txt"
        doc.write_text("beta beta beta")
        code = main(["index", "--model", str(model_path), "--input-file", str(doc)])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        validate_result_xml(out.strip())
        assert 'code="2002"' in out

    def test_directory_inputs_sorted(self, tmp_path, model_path):
        docdir = tmp_path / "docs"
        docdir.mkdir()
        (docdir / "b.txt").write_text("beta beta")
        (docdir / "a.txt").write_text("alpha alpha")
        out = tmp_path / "result.xml"
        code = main(
            [
                "index", "--model", str(model_path), "--input-dir", str(docdir),
                "--output", str(out),
            ]
        )
        assert code == EXIT_OK
        xml = out.read_text()
        assert xml.index("a.txt") < xml.index("b.txt")

    def test_in_place_updates_xml_input(self, tmp_path, model_path):
        doc = tmp_path / "doc.xml"
        doc.write_text("<DOC><TI>alpha alpha alpha</TI></DOC>")
        code = main(
            ["index", "--model", str(model_path), "--input-file", str(doc), "--in-place"]
        )
        assert code == EXIT_OK
        updated = doc.read_text()
        assert updated.startswith("<DOC><TI>alpha alpha alpha</TI><EuroVoc")
        assert updated.endswith("</EuroVoc></DOC>")

    def test_in_place_needs_xml(self, tmp_path, model_path):
        doc = tmp_path / "doc.txt"
        doc.write_text("alpha alpha plain text")
        code = main(
            [
                "index", "--model", str(model_path), "--input-file", str(doc),
                "--in-place", "--format", "plain",
            ]
        )
        assert code == EXIT_PIPELINE

    def test_requires_exactly_one_input(self, tmp_path, model_path):
        assert main(["index", "--model", str(model_path)]) == EXIT_USAGE
        doc = tmp_path / "d.txt"
        doc.write_text("x")
        code = main(
            [
                "index", "--model", str(model_path), "--input-file", str(doc),
                "--input-dir", str(tmp_path),
            ]
        )
        assert code == EXIT_USAGE

    def test_stoplist_fingerprint_mismatch(self, tmp_path, model_path):
        stops = tmp_path / "stop.txt"
        stops.write_text("pad\n")
        doc = tmp_path / "d.txt"
        doc.write_text("alpha")
        code = main(
            [
                "index", "--model", str(model_path), "--input-file", str(doc),
                "--stopwords", str(stops),
            ]
        )
        assert code == EXIT_PIPELINE

    def test_corrupt_model(self, tmp_path, model_path):
        tampered = tmp_path / "bad.model"
        tampered.write_text(model_path.read_text().replace("alpha", "alpho", 1))
        doc = tmp_path / "d.txt"
        doc.write_text("alpha")
        code = main(["index", "--model", str(tampered), "--input-file", str(doc)])
        assert code == EXIT_PIPELINE

    def test_workers_match_serial(self, tmp_path, model_path):
        docdir = tmp_path / "docs"
        docdir.mkdir()
        for i in range(6):
            (docdir / f"d{i}.txt").write_text(f"alpha beta pad doc{i} " * (i + 1))
        serial, parallel = tmp_path / "s.xml", tmp_path / "p.xml"
        base = ["index", "--model", str(model_path), "--input-dir", str(docdir)]
        assert main([*base, "--output", str(serial)]) == EXIT_OK
        assert main([*base, "--output", str(parallel), "--workers", "4"]) == EXIT_OK
        assert serial.read_text() == parallel.read_text()


class TestEvaluate:
    def test_cross_validation_table(self, corpus_path, capsys):
        code = main(
            [
                "evaluate", "--corpus", str(corpus_path), "--n-folds", "4",
                "--seed", "1", "--k", "2", *OPEN_FLAGS,
            ]
        )
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "fixed(2)" in out
        assert "dynamic" in out

    def test_report_files_written(self, tmp_path, corpus_path, capsys):
        report = tmp_path / "report.txt"
        plan = tmp_path / "plan.tsv"
        code = main(
            [
                "evaluate", "--corpus", str(corpus_path), "--n-folds", "4",
                "--seed", "1", "--k", "2", "--output", str(report),
                "--split-plan", str(plan), *OPEN_FLAGS,
            ]
        )
        assert code == EXIT_OK
        assert "fixed(2)" in report.read_text()
        record = json.loads((tmp_path / "report.txt.json").read_text())
        assert record["scheme"] == "cv"
        assert len(record["params_fingerprint"]) == 64
        assert len(plan.read_text().splitlines()) == 8

    def test_fixed_split_via_test_ids(self, tmp_path, corpus_path, capsys):
        ids = tmp_path / "ids.txt"
        ids.write_text("a0\nb0\n")
        code = main(
            [
                "evaluate", "--corpus", str(corpus_path), "--test-ids", str(ids),
                "--k", "2", *OPEN_FLAGS,
            ]
        )
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "fixed-split" in out

    def test_unknown_test_id(self, tmp_path, corpus_path):
        ids = tmp_path / "ids.txt"
        ids.write_text("nope\n")
        code = main(
            ["evaluate", "--corpus", str(corpus_path), "--test-ids", str(ids), *OPEN_FLAGS]
        )
        assert code == EXIT_DATA


class TestStats:
    def test_describes_corpus(self, corpus_path, capsys):
        assert main(["stats", "--corpus", str(corpus_path)]) == EXIT_OK
        out = capsys.readouterr().out
        assert "documents: 8" in out
        assert "mean labels per doc: 1.00" in out
        assert "1001: 4" in out
        assert "descriptors used <= 5 times: 2 of 2" in out
