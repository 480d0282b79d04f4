"""Evaluation: micro-averaged precision/recall/F1 over ranked assignments.

Two evaluation modes are supported per document:

``fixed``: the top ``k`` assigned categories are compared against the gold
set, whatever its size.  The precision denominator counts the entries that
were actually assigned (at most ``k``); a strict variant always divides by
``k`` even when fewer categories came back.

``dynamic``: the cut-off adapts to the document, using exactly as many
assigned categories as the document has gold labels.  With a perfect ranker
this makes precision equal recall.

Aggregation is micro: true positives and denominators are pooled over all
documents and divided once, never averaged per document or per fold.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .corpus import Collection, make_folds, split_by_fold
from .indexer import rank
from .textprep import FeatureSpec, StopLists, vectorize_text
from .trainer import TrainParams, train

__all__ = [
    "DocEval",
    "EvalReport",
    "EvalRun",
    "eval_doc",
    "aggregate",
    "cross_validate",
    "evaluate_fixed",
    "render_report",
    "report_record",
]

_MODES = ("fixed", "dynamic")


@dataclass(frozen=True)
class DocEval:
    """Counts for one document under one mode.

    ``rank_used`` is the cut-off applied to the assigned list; ``counted`` is
    the precision denominator contribution (equal to ``rank_used`` in strict
    mode, otherwise capped by how many categories were assigned).
    """

    doc_id: str
    gold: frozenset[str]
    assigned: tuple[str, ...]
    rank_used: int
    tp: int
    counted: int


@dataclass(frozen=True)
class EvalReport:
    """Micro-averaged metrics for one mode, optionally with per-fold
    sub-reports."""

    mode: str
    precision: float
    recall: float
    f1: float
    n_docs: int
    per_fold: tuple["EvalReport", ...] | None = None
    params_fingerprint: str = ""


@dataclass(frozen=True)
class EvalRun:
    """A full evaluation: the same ranked assignments scored in both modes,
    plus enough provenance to reproduce the run."""

    scheme: str  # "cv" or "fixed-split"
    fixed: EvalReport
    dynamic: EvalReport
    k: int
    n_folds: int
    seed: int | None
    categories_trained: tuple[int, ...]  # per fold
    params_fingerprint: str


def eval_doc(
    gold: frozenset[str] | set[str],
    assigned: Sequence[str],
    mode: str,
    k: int = 6,
    doc_id: str = "",
    strict_rank_denominator: bool = False,
) -> DocEval:
    """Score one document's assignment against its gold set."""
    if mode not in _MODES:
        raise ValueError(f"mode must be one of {_MODES}, got {mode!r}")
    if not gold:
        raise ValueError(f"empty gold set for doc {doc_id!r}")
    if len(set(assigned)) != len(assigned):
        raise ValueError(f"duplicate assigned codes for doc {doc_id!r}")
    if mode == "fixed" and k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    rank_used = k if mode == "fixed" else len(gold)
    head = list(assigned[:rank_used])
    tp = len(frozenset(gold) & set(head))
    counted = rank_used if strict_rank_denominator else min(rank_used, len(assigned))
    return DocEval(
        doc_id=doc_id,
        gold=frozenset(gold),
        assigned=tuple(assigned),
        rank_used=rank_used,
        tp=tp,
        counted=counted,
    )


def aggregate(
    evals: Iterable[DocEval],
    mode: str,
    k: int = 6,
    per_fold: tuple[EvalReport, ...] | None = None,
    params_fingerprint: str = "",
) -> EvalReport:
    """Pool counts over documents and compute micro P/R/F1.

    F1 is computed as ``2*tp / (counted + gold)``, which equals the harmonic
    mean of the pooled precision and recall but avoids the intermediate
    divisions, so the rational fixtures come out exact in floating point.
    """
    evals = list(evals)
    if not evals:
        raise ValueError("no documents to aggregate")
    tp = sum(e.tp for e in evals)
    counted = sum(e.counted for e in evals)
    gold = sum(len(e.gold) for e in evals)
    precision = tp / counted if counted else 0.0
    recall = tp / gold
    f1 = 2 * tp / (counted + gold) if counted + gold else 0.0
    label = f"fixed({k})" if mode == "fixed" else "dynamic"
    return EvalReport(
        mode=label,
        precision=precision,
        recall=recall,
        f1=f1,
        n_docs=len(evals),
        per_fold=per_fold,
        params_fingerprint=params_fingerprint,
    )


def _run_fingerprint(
    params: TrainParams,
    spec: FeatureSpec,
    stops: StopLists,
    k: int,
    scheme: str,
    extra: str,
    strict: bool,
) -> str:
    text = "\n".join(
        [
            params.canonical(),
            spec.canonical(),
            stops.fingerprint(),
            f"k={k}",
            f"scheme={scheme}",
            extra,
            f"strict_rank_denominator={strict}",
        ]
    )
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _evaluate_split(
    train_c: Collection,
    test_c: Collection,
    params: TrainParams,
    spec: FeatureSpec,
    stops: StopLists,
    k: int,
    strict: bool,
) -> tuple[list[DocEval], list[DocEval], int]:
    """Train on one side, rank the other, score in both modes.  Ranking runs
    once per document at a depth covering both cut-offs."""
    model = train(train_c, params, spec, stops)
    depth = max(k, max(len(d.gold) for d in test_c.docs))
    fixed_evals: list[DocEval] = []
    dyn_evals: list[DocEval] = []
    for doc in test_c.docs:
        fd = vectorize_text(doc.body, spec, stops, doc_id=doc.doc_id)
        assigned = [code for code, _ in rank(fd, model, k=depth).entries]
        fixed_evals.append(
            eval_doc(doc.gold, assigned, "fixed", k, doc.doc_id, strict)
        )
        dyn_evals.append(
            eval_doc(doc.gold, assigned, "dynamic", k, doc.doc_id, strict)
        )
    return fixed_evals, dyn_evals, len(model.profiles)


def cross_validate(
    collection: Collection,
    n: int,
    seed: int,
    params: TrainParams = TrainParams(),
    spec: FeatureSpec = FeatureSpec(),
    stops: StopLists = StopLists(),
    k: int = 6,
    strict_rank_denominator: bool = False,
) -> EvalRun:
    """n-fold cross-validation: each fold is scored by a model trained on the
    other folds; metrics are pooled over all folds' documents."""
    plan = make_folds(collection, n, seed)
    fp = _run_fingerprint(
        params, spec, stops, k, "cv", f"n_folds={n} seed={seed}", strict_rank_denominator
    )
    all_fixed: list[DocEval] = []
    all_dyn: list[DocEval] = []
    fixed_folds: list[EvalReport] = []
    dyn_folds: list[EvalReport] = []
    cats: list[int] = []
    for fold in range(n):
        train_c, test_c = split_by_fold(collection, plan, fold)
        fixed_evals, dyn_evals, n_cats = _evaluate_split(
            train_c, test_c, params, spec, stops, k, strict_rank_denominator
        )
        cats.append(n_cats)
        fixed_folds.append(aggregate(fixed_evals, "fixed", k, params_fingerprint=fp))
        dyn_folds.append(aggregate(dyn_evals, "dynamic", k, params_fingerprint=fp))
        all_fixed.extend(fixed_evals)
        all_dyn.extend(dyn_evals)
    return EvalRun(
        scheme="cv",
        fixed=aggregate(all_fixed, "fixed", k, tuple(fixed_folds), fp),
        dynamic=aggregate(all_dyn, "dynamic", k, tuple(dyn_folds), fp),
        k=k,
        n_folds=n,
        seed=seed,
        categories_trained=tuple(cats),
        params_fingerprint=fp,
    )


def evaluate_fixed(
    train_c: Collection,
    test_c: Collection,
    params: TrainParams = TrainParams(),
    spec: FeatureSpec = FeatureSpec(),
    stops: StopLists = StopLists(),
    k: int = 6,
    strict_rank_denominator: bool = False,
) -> EvalRun:
    """Evaluate a single explicit train/test split."""
    if not test_c.docs:
        raise ValueError("empty test collection")
    overlap = set(train_c.ids()) & set(test_c.ids())
    if overlap:
        raise ValueError(f"train and test overlap: {sorted(overlap)[:5]}")
    ids_digest = hashlib.sha256(
        "\n".join(sorted(test_c.ids())).encode("utf-8")
    ).hexdigest()
    fp = _run_fingerprint(
        params, spec, stops, k, "fixed-split", f"test_ids={ids_digest}",
        strict_rank_denominator,
    )
    fixed_evals, dyn_evals, n_cats = _evaluate_split(
        train_c, test_c, params, spec, stops, k, strict_rank_denominator
    )
    return EvalRun(
        scheme="fixed-split",
        fixed=aggregate(fixed_evals, "fixed", k, params_fingerprint=fp),
        dynamic=aggregate(dyn_evals, "dynamic", k, params_fingerprint=fp),
        k=k,
        n_folds=1,
        seed=None,
        categories_trained=(n_cats,),
        params_fingerprint=fp,
    )


# ---------------------------------------------------------------------------
# Report rendering
# ---------------------------------------------------------------------------


def _fmt_row(label: str, r: EvalReport) -> str:
    return (
        f"{label:<12} {r.precision:>9.4f} {r.recall:>9.4f} {r.f1:>9.4f} {r.n_docs:>7d}"
    )


def render_report(run: EvalRun) -> str:
    """Human-readable report table."""
    lines = [
        f"evaluation scheme: {run.scheme}"
        + (f" ({run.n_folds} folds, seed {run.seed})" if run.scheme == "cv" else ""),
        f"rank cut-off k: {run.k}",
        f"categories trained per fold: {' '.join(str(c) for c in run.categories_trained)}",
        f"params fingerprint: {run.params_fingerprint}",
        "",
        f"{'mode':<12} {'precision':>9} {'recall':>9} {'f1':>9} {'docs':>7}",
        _fmt_row(run.fixed.mode, run.fixed),
        _fmt_row(run.dynamic.mode, run.dynamic),
    ]
    if run.fixed.per_fold:
        lines.append("")
        lines.append("per fold:")
        for i, (f, d) in enumerate(zip(run.fixed.per_fold, run.dynamic.per_fold or ())):
            lines.append(f"  fold {i}:")
            lines.append("  " + _fmt_row(f.mode, f))
            lines.append("  " + _fmt_row(d.mode, d))
    return "\n".join(lines) + "\n"


def _report_dict(r: EvalReport) -> dict:
    out = {
        "mode": r.mode,
        "precision": r.precision,
        "recall": r.recall,
        "f1": r.f1,
        "n_docs": r.n_docs,
    }
    if r.per_fold:
        out["per_fold"] = [_report_dict(f) for f in r.per_fold]
    return out


def report_record(run: EvalRun) -> dict:
    """Machine-readable record of a run; stable key order when dumped with
    ``json.dumps(..., sort_keys=True)``."""
    return {
        "scheme": run.scheme,
        "k": run.k,
        "n_folds": run.n_folds,
        "seed": run.seed,
        "categories_trained": list(run.categories_trained),
        "params_fingerprint": run.params_fingerprint,
        "fixed": _report_dict(run.fixed),
        "dynamic": _report_dict(run.dynamic),
    }


def render_record_json(run: EvalRun) -> str:
    return json.dumps(report_record(run), sort_keys=True, indent=2) + "\n"
