"""profcat: trainable profile-based multi-label categoriser.

Typical embedded use:

    from profcat import (
        TrainParams, parse_compact, train, vectorize, rank, load_stoplists,
    )

    corpus = parse_compact("corpus.txt")
    stops = load_stoplists("stop_en.txt")
    model = train(corpus, TrainParams(), stops=stops)
    doc = vectorize(open("new.xml", "rb").read(), model.feature_spec, stops)
    for code, weight in rank(doc, model, k=6).entries:
        print(code, weight)
"""

from .corpus import (
    Collection,
    CollectionStats,
    CompactFormatError,
    LabeledDoc,
    SplitPlan,
    collection_stats,
    format_compact,
    make_folds,
    parse_compact,
    parse_compact_text,
    read_split_plan,
    split_by_fold,
    split_fixed,
    write_compact,
    write_split_plan,
)
from .evaluator import (
    DocEval,
    EvalReport,
    EvalRun,
    aggregate,
    cross_validate,
    eval_doc,
    evaluate_fixed,
    render_record_json,
    render_report,
    report_record,
)
from .indexer import (
    Blacklist,
    EMPTY_BLACKLIST,
    Explanation,
    MatchedAssociate,
    RankedAssignment,
    explain,
    load_blacklist,
    rank,
    rank_many,
    vectorize,
)
from .textprep import (
    EMPTY_STOPLISTS,
    ExtractionError,
    FeatureDoc,
    FeatureSpec,
    FeaturizeError,
    StopLists,
    TOKEN_SPEC,
    apply_stoplists,
    extract_text,
    featurize,
    load_stoplists,
    tokenize,
    tokenize_with_offsets,
    vectorize_text,
)
from .thesaurus import (
    Descriptor,
    Neighborhood,
    Thesaurus,
    ThesaurusIntegrityError,
    ThesaurusParseError,
    format_thesaurus,
    load_thesaurus,
    parse_thesaurus,
    write_thesaurus,
)
from .trainer import (
    CategoryProfile,
    CorpusStats,
    MODEL_FORMAT_VERSION,
    Model,
    ModelFormatError,
    TrainingError,
    TrainParams,
    corpus_statistics,
    doc_loglikelihood,
    format_model,
    g2,
    load_model,
    save_model,
    train,
)
from .xmlout import (
    DocResult,
    eurovoc_block,
    insert_result_block,
    result_xml,
    validate_result_xml,
)

__version__ = "0.1.0"
