"""Command-line interface.

Subcommands:

    profcat train     build a model from a compact labeled corpus
    profcat index     assign categories to documents with a trained model
    profcat evaluate  cross-validate or evaluate a fixed split
    profcat stats     describe the gold labels of a corpus
    profcat serve     run the review HTTP service

Every flag can also come from a ``key = value`` config file (``--config``);
explicit flags win.  Exit codes: 0 success, 2 usage or configuration error,
3 input data error (malformed corpus/thesaurus/stop list), 4 pipeline error
(training produced nothing, model file corrupt, stop lists do not match the
model, external feature program failed), 1 unexpected internal error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import config as cfgmod
from .config import ConfigError, as_bool, parse_config_file, split_paths
from .corpus import (
    CompactFormatError,
    parse_compact,
    collection_stats,
    split_fixed,
    make_folds,
    write_split_plan,
)
from .evaluator import cross_validate, evaluate_fixed, render_record_json, render_report
from .indexer import EMPTY_BLACKLIST, load_blacklist, rank_many, vectorize
from .textprep import (
    EMPTY_STOPLISTS,
    ExtractionError,
    FeatureSpec,
    FeaturizeError,
    load_stoplists,
)
from .thesaurus import ThesaurusIntegrityError, ThesaurusParseError, load_thesaurus
from .trainer import (
    ModelFormatError,
    TrainingError,
    TrainParams,
    load_model,
    save_model,
    train,
)
from .xmlout import DocResult, insert_result_block, result_xml

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_PIPELINE = 4


class PipelineError(RuntimeError):
    """Raised by command handlers for failures that map to exit code 4."""


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="profcat",
        description="Trainable profile-based categoriser for thesaurus descriptor assignment",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="key = value config file; flags override it")
        p.add_argument("--verbose", action="store_true", help="verbose logging")

    p = sub.add_parser("train", help="train a model from a compact corpus")
    common(p)
    p.add_argument("--corpus", help="compact corpus file")
    p.add_argument("--model", help="model output path")
    p.add_argument("--stopwords", help="comma-separated stop-list files")
    p.add_argument("--feature", help="token | ngram:N | external:COMMAND")
    p.add_argument("--min-docs-per-category", type=int, dest="min_docs_per_category")
    p.add_argument("--min-doc-length-tokens", type=int, dest="min_doc_length_tokens")
    p.add_argument("--min-word-corpus-freq", type=int, dest="min_word_corpus_freq")
    p.add_argument("--min-loglikelihood", type=float, dest="min_loglikelihood")
    p.add_argument(
        "--descriptor-count-weighting",
        choices=["none", "inverse"],
        dest="descriptor_count_weighting",
    )
    p.add_argument(
        "--max-associates-per-profile", type=int, dest="max_associates_per_profile"
    )

    p = sub.add_parser("index", help="assign categories to documents")
    common(p)
    p.add_argument("--model", help="trained model file")
    p.add_argument("--input-file", help="single input document")
    p.add_argument("--input-dir", help="directory of input documents")
    p.add_argument("--output", help="result XML path (default: stdout)")
    p.add_argument("--k", type=int, help="categories per document (default 6)")
    p.add_argument("--blacklist", help="file of category codes to exclude")
    p.add_argument("--stopwords", help="stop lists; must match the model")
    p.add_argument("--format", choices=["auto", "plain", "xml", "html"])
    p.add_argument(
        "--in-place",
        action="store_true",
        default=None,
        help="write each XML input's result block into the input file itself",
    )
    p.add_argument("--workers", type=int, help="parallel ranking threads")

    p = sub.add_parser("evaluate", help="cross-validate or score a fixed split")
    common(p)
    p.add_argument("--corpus", help="compact corpus file")
    p.add_argument("--n-folds", type=int, dest="n_folds")
    p.add_argument("--seed", type=int)
    p.add_argument("--test-ids", dest="test_ids", help="file of test doc ids (one per line); selects fixed-split mode")
    p.add_argument("--k", type=int)
    p.add_argument(
        "--strict-rank-denominator",
        action="store_true",
        default=None,
        dest="strict_rank_denominator",
        help="precision denominator is always the rank cut-off, even when fewer categories were assigned",
    )
    p.add_argument("--stopwords")
    p.add_argument("--feature")
    p.add_argument("--min-docs-per-category", type=int, dest="min_docs_per_category")
    p.add_argument("--min-doc-length-tokens", type=int, dest="min_doc_length_tokens")
    p.add_argument("--min-word-corpus-freq", type=int, dest="min_word_corpus_freq")
    p.add_argument("--min-loglikelihood", type=float, dest="min_loglikelihood")
    p.add_argument(
        "--descriptor-count-weighting",
        choices=["none", "inverse"],
        dest="descriptor_count_weighting",
    )
    p.add_argument(
        "--max-associates-per-profile", type=int, dest="max_associates_per_profile"
    )
    p.add_argument("--output", help="report path; a .json record is written next to it")
    p.add_argument("--split-plan", dest="split_plan", help="write the fold assignment to this file")

    p = sub.add_parser("stats", help="describe the gold labels of a corpus")
    common(p)
    p.add_argument("--corpus", help="compact corpus file")

    p = sub.add_parser("serve", help="run the review HTTP service")
    common(p)
    p.add_argument("--model", help="trained model file")
    p.add_argument("--thesaurus", help="thesaurus file")
    p.add_argument("--stopwords")
    p.add_argument("--blacklist")
    p.add_argument("--k", type=int)
    p.add_argument("--lang", help="default label language (default en)")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.add_argument("--out-dir", dest="out_dir", help="directory for saved session XML")

    return parser


class _Settings:
    """Merged view of config file and flags; flags win."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.file: dict[str, str] = {}
        if getattr(args, "config", None):
            self.file = parse_config_file(args.config)

    def get(self, key: str, default: str | None = None) -> str | None:
        flag = getattr(self.args, key, None)
        if flag is not None:
            return str(flag)
        return self.file.get(key, default)

    def get_int(self, key: str, default: int | None = None) -> int | None:
        raw = self.get(key, None if default is None else str(default))
        if raw is None:
            return None
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"{key}: expected an integer, got {raw!r}") from None

    def get_float(self, key: str, default: float | None = None) -> float | None:
        raw = self.get(key, None if default is None else str(default))
        if raw is None:
            return None
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"{key}: expected a number, got {raw!r}") from None

    def get_bool(self, key: str, default: bool = False) -> bool:
        flag = getattr(self.args, key, None)
        if flag is not None:
            return bool(flag)
        raw = self.file.get(key)
        if raw is None:
            return default
        return as_bool(raw, key)

    def require(self, key: str) -> str:
        value = self.get(key)
        if value is None:
            raise ConfigError(f"missing required setting: {key}")
        return value


def _train_params(s: _Settings) -> TrainParams:
    try:
        return TrainParams(
            min_docs_per_category=s.get_int("min_docs_per_category", 4),
            min_doc_length_tokens=s.get_int("min_doc_length_tokens", 100),
            min_word_corpus_freq=s.get_int("min_word_corpus_freq", 4),
            min_loglikelihood=s.get_float("min_loglikelihood", 5.0),
            descriptor_count_weighting=s.get("descriptor_count_weighting", "inverse"),
            max_associates_per_profile=s.get_int("max_associates_per_profile"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _feature_spec(s: _Settings) -> FeatureSpec:
    try:
        return FeatureSpec.parse(s.get("feature", "token"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _stoplists(s: _Settings):
    raw = s.get("stopwords")
    if not raw:
        return EMPTY_STOPLISTS
    paths = split_paths(raw)
    for p in paths:
        if not Path(p).is_file():
            raise ConfigError(f"stop-list file not found: {p}")
    return load_stoplists(*paths)


def _existing_file(s: _Settings, key: str) -> Path:
    path = Path(s.require(key))
    if not path.is_file():
        raise ConfigError(f"{key} file not found: {path}")
    return path


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_train(s: _Settings) -> int:
    corpus = parse_compact(_existing_file(s, "corpus"))
    model_path = s.require("model")
    params = _train_params(s)
    spec = _feature_spec(s)
    stops = _stoplists(s)
    model = train(corpus, params, spec, stops)
    save_model(model, model_path)
    print(f"categories trained: {len(model.profiles)}")
    if s.args.verbose:
        for code in sorted(model.profiles):
            p = model.profiles[code]
            print(f"  {code}: {p.n_train_docs} docs, {len(p.associates)} associates")
    print(f"model written: {model_path}")
    return EXIT_OK


def cmd_index(s: _Settings) -> int:
    model = load_model(_existing_file(s, "model"))
    stops = _stoplists(s)
    if stops.fingerprint() != model.stoplist_fingerprint:
        raise PipelineError(
            "stop lists do not match the ones recorded in the model; "
            "pass the same --stopwords used at training time"
        )
    blacklist = EMPTY_BLACKLIST
    bl_path = s.get("blacklist")
    if bl_path:
        if not Path(bl_path).is_file():
            raise ConfigError(f"blacklist file not found: {bl_path}")
        blacklist = load_blacklist(bl_path)

    input_file = s.get("input_file")
    input_dir = s.get("input_dir")
    if bool(input_file) == bool(input_dir):
        raise ConfigError("exactly one of input_file / input_dir is required")
    if input_file:
        paths = [Path(input_file)]
        if not paths[0].is_file():
            raise ConfigError(f"input file not found: {input_file}")
    else:
        root = Path(input_dir)
        if not root.is_dir():
            raise ConfigError(f"input dir not found: {input_dir}")
        paths = sorted(p for p in root.iterdir() if p.is_file())

    k = s.get_int("k", 6)
    fmt = s.get("format", "auto")
    in_place = s.get_bool("in_place")
    workers = s.get_int("workers", 1)

    docs = []
    raw_texts: dict[str, str] = {}
    skipped = 0
    for path in paths:
        try:
            raw = path.read_bytes()
            fd = vectorize(raw, model.feature_spec, stops, doc_id=str(path), format_hint=fmt)
        except (OSError, ExtractionError) as exc:
            logger.warning("skipping %s: %s", path, exc)
            skipped += 1
            continue
        docs.append(fd)
        if in_place:
            raw_texts[str(path)] = raw.decode("utf-8-sig")

    assignments = rank_many(docs, model, blacklist, k, max_workers=workers)
    results = [DocResult(a.doc_id, a.entries) for a in assignments]

    if in_place:
        for res in results:
            try:
                updated = insert_result_block(raw_texts[res.doc_id], res)
            except ValueError as exc:
                raise PipelineError(f"{res.doc_id}: {exc}") from None
            Path(res.doc_id).write_text(updated, encoding="utf-8")
        print(f"updated in place: {len(results)} file(s)", file=sys.stderr)
    else:
        xml = result_xml(results)
        output = s.get("output")
        if output:
            Path(output).write_text(xml + "\n", encoding="utf-8")
        else:
            print(xml)
    if skipped:
        print(f"skipped {skipped} unreadable file(s)", file=sys.stderr)
    return EXIT_OK


def cmd_evaluate(s: _Settings) -> int:
    collection = parse_compact(_existing_file(s, "corpus"))
    params = _train_params(s)
    spec = _feature_spec(s)
    stops = _stoplists(s)
    k = s.get_int("k", 6)
    strict = s.get_bool("strict_rank_denominator")
    test_ids_path = s.get("test_ids")

    if test_ids_path:
        if not Path(test_ids_path).is_file():
            raise ConfigError(f"test-ids file not found: {test_ids_path}")
        ids = {
            line.strip()
            for line in Path(test_ids_path).read_text(encoding="utf-8").splitlines()
            if line.strip()
        }
        train_c, test_c = split_fixed(collection, ids)
        run = evaluate_fixed(train_c, test_c, params, spec, stops, k, strict)
    else:
        n = s.get_int("n_folds", 10)
        seed = s.get_int("seed", 42)
        plan_path = s.get("split_plan")
        if plan_path:
            write_split_plan(make_folds(collection, n, seed), plan_path)
        run = cross_validate(collection, n, seed, params, spec, stops, k, strict)

    table = render_report(run)
    output = s.get("output")
    if output:
        Path(output).write_text(table, encoding="utf-8")
        Path(output + ".json").write_text(render_record_json(run), encoding="utf-8")
        print(f"report written: {output}")
    else:
        print(table, end="")
    return EXIT_OK


def cmd_stats(s: _Settings) -> int:
    stats = collection_stats(parse_compact(_existing_file(s, "corpus")))
    print(f"documents: {stats.n_docs}")
    print(f"mean labels per doc: {stats.mean_labels_per_doc:.2f}")
    print(f"std dev labels per doc: {stats.std_labels_per_doc:.2f}")
    print("labels-per-doc histogram:")
    for size, count in stats.label_histogram.items():
        print(f"  {size}: {count}")
    usage = sorted(stats.descriptor_usage.items(), key=lambda kv: (-kv[1], kv[0]))
    print("most used descriptors:")
    for code, count in usage[:10]:
        print(f"  {code}: {count}")
    rare = sum(1 for _, c in usage if c <= 5)
    print(f"descriptors used <= 5 times: {rare} of {len(usage)}")
    return EXIT_OK


def cmd_serve(s: _Settings) -> int:
    import uvicorn

    from .service import ServiceState, create_app

    model = load_model(_existing_file(s, "model"))
    thesaurus = load_thesaurus(_existing_file(s, "thesaurus"))
    stops = _stoplists(s)
    if stops.fingerprint() != model.stoplist_fingerprint:
        raise PipelineError(
            "stop lists do not match the ones recorded in the model"
        )
    blacklist = EMPTY_BLACKLIST
    bl_path = s.get("blacklist")
    if bl_path:
        blacklist = load_blacklist(bl_path)
    out_dir = s.get("out_dir")
    state = ServiceState(
        model=model,
        thesaurus=thesaurus,
        stops=stops,
        blacklist=blacklist,
        default_k=s.get_int("k", 6),
        default_lang=s.get("lang", "en"),
        out_dir=Path(out_dir) if out_dir else None,
    )
    app = create_app(state)
    uvicorn.run(app, host=s.get("host", "127.0.0.1"), port=s.get_int("port", 8000))
    return EXIT_OK


_COMMANDS = {
    "train": cmd_train,
    "index": cmd_index,
    "evaluate": cmd_evaluate,
    "stats": cmd_stats,
    "serve": cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        settings = _Settings(args)
        return _COMMANDS[args.command](settings)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TrainingError, ModelFormatError, FeaturizeError, PipelineError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PIPELINE
    except (
        CompactFormatError,
        ThesaurusParseError,
        ThesaurusIntegrityError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # pragma: no cover - last resort
        logger.exception("internal error")
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
