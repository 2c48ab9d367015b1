"""Scoring, k-fold cross-validation and the experiment drivers."""

from __future__ import annotations

import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Iterable, Sequence

from .baselines import TRADITIONAL_DT, ZERO_R, build_traditional_dt, build_zero_r
from .dataset import Dataset, split_kfold
from .errors import DataError
from .learner import LearnerConfig, build_tree
from .model import count_decision_nodes, predict_labels

BEHAVDT = "behavdt"
MODEL_KINDS = (BEHAVDT, TRADITIONAL_DT, ZERO_R)
DEFAULT_THRESHOLDS = (1.0, 0.9, 0.8, 0.7, 0.6)


@dataclass(frozen=True)
class ClassTally:
    tp: int = 0
    fp: int = 0
    fn: int = 0


@dataclass(frozen=True)
class ConfusionTally:
    per_class: dict[str, ClassTally]
    total: int
    correct: int

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str]]) -> ConfusionTally:
        tp: dict[str, int] = {}
        fp: dict[str, int] = {}
        fn: dict[str, int] = {}
        total = correct = 0
        for truth, pred in pairs:
            total += 1
            for c in (truth, pred):
                tp.setdefault(c, 0)
                fp.setdefault(c, 0)
                fn.setdefault(c, 0)
            if truth == pred:
                correct += 1
                tp[truth] += 1
            else:
                fp[pred] += 1
                fn[truth] += 1
        per_class = {c: ClassTally(tp[c], fp[c], fn[c]) for c in sorted(tp)}
        return cls(per_class, total, correct)

    def tn(self, cls_token: str) -> int:
        t = self.per_class[cls_token]
        return self.total - t.tp - t.fp - t.fn

    def support(self, cls_token: str) -> int:
        t = self.per_class[cls_token]
        return t.tp + t.fn


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    per_class: dict[str, tuple[float, float]]  # class -> (precision, recall)
    macro_precision: float
    macro_recall: float
    weighted_precision: float
    weighted_recall: float
    tally: ConfusionTally
    undefined: tuple[tuple[str, str], ...] = ()  # (class, "precision"|"recall") set to 0
    folds: tuple[MetricsReport, ...] = field(default=(), repr=False)

    def fold_means(self) -> dict[str, float]:
        if not self.folds:
            return {}
        keys = ("accuracy", "macro_precision", "macro_recall", "weighted_precision", "weighted_recall")
        return {k: sum(getattr(f, k) for f in self.folds) / len(self.folds) for k in keys}


def _ratio(num: int, den: int) -> Fraction | None:
    return Fraction(num, den) if den else None


def score(pairs: Sequence[tuple[str, str]]) -> MetricsReport:
    """Per-class one-vs-rest precision/recall plus overall accuracy.

    A zero denominator yields 0 and is listed in ``undefined``. Macro
    averages run over classes present in the truth; weighted averages use
    the truth support. Averages are computed exactly before rounding to
    float.
    """
    pairs = list(pairs)
    if not pairs:
        raise DataError("cannot score an empty prediction list")
    tally = ConfusionTally.from_pairs(pairs)
    precision: dict[str, Fraction] = {}
    recall: dict[str, Fraction] = {}
    undefined = []
    for c, t in tally.per_class.items():
        p = _ratio(t.tp, t.tp + t.fp)
        r = _ratio(t.tp, t.tp + t.fn)
        if p is None:
            undefined.append((c, "precision"))
        if r is None:
            undefined.append((c, "recall"))
        precision[c] = p or Fraction(0)
        recall[c] = r or Fraction(0)
    truth_classes = [c for c in tally.per_class if tally.support(c) > 0]
    n_truth = len(truth_classes)
    macro_p = sum((precision[c] for c in truth_classes), Fraction(0)) / n_truth
    macro_r = sum((recall[c] for c in truth_classes), Fraction(0)) / n_truth
    weighted_p = sum((precision[c] * tally.support(c) for c in truth_classes), Fraction(0)) / tally.total
    weighted_r = sum((recall[c] * tally.support(c) for c in truth_classes), Fraction(0)) / tally.total
    return MetricsReport(
        accuracy=float(Fraction(tally.correct, tally.total)),
        per_class={c: (float(precision[c]), float(recall[c])) for c in tally.per_class},
        macro_precision=float(macro_p),
        macro_recall=float(macro_r),
        weighted_precision=float(weighted_p),
        weighted_recall=float(weighted_r),
        tally=tally,
        undefined=tuple(undefined),
    )


def train_model(train: Dataset, model_kind: str, config: LearnerConfig | None = None):
    if model_kind == BEHAVDT:
        return build_tree(train, config or LearnerConfig())
    if model_kind == TRADITIONAL_DT:
        return build_traditional_dt(train)
    if model_kind == ZERO_R:
        return build_zero_r(train)
    raise DataError(f"unknown model kind {model_kind!r}; expected one of {MODEL_KINDS}")


def _run_fold(train: Dataset, test: Dataset, model_kind: str, config: LearnerConfig | None):
    model = train_model(train, model_kind, config)
    return list(zip(test.labels, predict_labels(model, test)))


def cross_validate(
    dataset: Dataset,
    model_kind: str = BEHAVDT,
    config: LearnerConfig | None = None,
    k: int = 10,
    seed: int = 42,
    stratified: bool = False,
    n_jobs: int = 1,
) -> MetricsReport:
    """Pooled k-fold report; per-fold reports ride along in ``folds``.

    Folds may be evaluated in a thread pool; results are merged in fold order
    so the report never depends on ``n_jobs``.
    """
    if model_kind not in MODEL_KINDS:
        raise DataError(f"unknown model kind {model_kind!r}; expected one of {MODEL_KINDS}")
    pairs_by_fold = split_kfold(dataset, k, seed, stratified=stratified)
    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(
                pool.map(lambda p: _run_fold(p[0], p[1], model_kind, config), pairs_by_fold)
            )
    else:
        results = [_run_fold(tr, te, model_kind, config) for tr, te in pairs_by_fold]
    pooled = score([pair for fold in results for pair in fold])
    folds = tuple(score(fold) for fold in results)
    return replace(pooled, folds=folds)


@dataclass(frozen=True)
class SweepRow:
    threshold: float
    macro_precision: float
    macro_recall: float
    accuracy: float
    decision_nodes: int


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]

    def __post_init__(self) -> None:
        ts = [r.threshold for r in self.rows]
        if any(b >= a for a, b in zip(ts, ts[1:])):
            raise ValueError("sweep thresholds must be strictly decreasing")


def confidence_sweep(
    dataset: Dataset,
    thresholds: Sequence[float] = DEFAULT_THRESHOLDS,
    k: int = 10,
    seed: int = 42,
    exception_policy: str = "majority-deviation",
    n_jobs: int = 1,
) -> SweepResult:
    if not thresholds:
        raise DataError("at least one threshold is required")
    for t in thresholds:
        if not 0.0 <= t <= 1.0:
            raise DataError(f"threshold {t} outside [0, 1]")
    rows = []
    for t in sorted(set(thresholds), reverse=True):
        config = LearnerConfig(confidence_threshold=t, exception_policy=exception_policy)
        report = cross_validate(dataset, BEHAVDT, config, k, seed, n_jobs=n_jobs)
        nodes = count_decision_nodes(build_tree(dataset, config))
        rows.append(SweepRow(t, report.macro_precision, report.macro_recall, report.accuracy, nodes))
    return SweepResult(tuple(rows))


@dataclass(frozen=True)
class ComparisonRow:
    model: str
    accuracy: float
    macro_precision: float
    macro_recall: float
    decision_nodes: int


def compare_models(
    dataset: Dataset,
    config: LearnerConfig | None = None,
    k: int = 10,
    seed: int = 42,
    n_jobs: int = 1,
) -> list[ComparisonRow]:
    config = config or LearnerConfig()
    rows = []
    for kind, name in (
        (ZERO_R, ZERO_R),
        (TRADITIONAL_DT, TRADITIONAL_DT),
        (BEHAVDT, f"behavdt({config.confidence_threshold:g})"),
    ):
        report = cross_validate(dataset, kind, config, k, seed, n_jobs=n_jobs)
        nodes = count_decision_nodes(train_model(dataset, kind, config))
        rows.append(ComparisonRow(name, report.accuracy, report.macro_precision, report.macro_recall, nodes))
    return rows


# ---------------------------------------------------------------------------
# TSV / JSON renderings


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _tsv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    buf.write("\t".join(header) + "\n")
    for row in rows:
        buf.write("\t".join(_fmt(v) if isinstance(v, float) else str(v) for v in row) + "\n")
    return buf.getvalue()


REPORT_COLUMNS = (
    "scope",
    "accuracy",
    "macro_precision",
    "macro_recall",
    "weighted_precision",
    "weighted_recall",
)


def report_tsv(report: MetricsReport) -> str:
    """Rows: pooled, per-fold mean, then each fold; per-class columns last."""
    classes = sorted(report.per_class)
    header = list(REPORT_COLUMNS)
    for c in classes:
        header += [f"precision[{c}]", f"recall[{c}]"]

    def row(scope: str, r: MetricsReport) -> list:
        out: list = [scope, r.accuracy, r.macro_precision, r.macro_recall, r.weighted_precision, r.weighted_recall]
        for c in classes:
            p, rc = r.per_class.get(c, (0.0, 0.0))
            out += [p, rc]
        return out

    rows = [row("pooled", report)]
    if report.folds:
        means = report.fold_means()
        mean_row: list = ["fold_mean"] + [means[k] for k in REPORT_COLUMNS[1:]]
        for c in classes:
            ps = [f.per_class.get(c, (0.0, 0.0)) for f in report.folds]
            mean_row += [sum(p for p, _ in ps) / len(ps), sum(r for _, r in ps) / len(ps)]
        rows.append(mean_row)
        rows += [row(f"fold{i + 1}", f) for i, f in enumerate(report.folds)]
    return _tsv(header, rows)


def report_dict(report: MetricsReport) -> dict[str, Any]:
    d: dict[str, Any] = {
        "accuracy": report.accuracy,
        "per_class": {c: {"precision": p, "recall": r} for c, (p, r) in report.per_class.items()},
        "macro_precision": report.macro_precision,
        "macro_recall": report.macro_recall,
        "weighted_precision": report.weighted_precision,
        "weighted_recall": report.weighted_recall,
        "total": report.tally.total,
        "correct": report.tally.correct,
        "undefined": [list(u) for u in report.undefined],
    }
    if report.folds:
        d["fold_mean"] = report.fold_means()
        d["folds"] = [report_dict(f) for f in report.folds]
    return d


def report_json(report: MetricsReport) -> str:
    return json.dumps(report_dict(report), indent=2, sort_keys=True) + "\n"


def sweep_tsv(result: SweepResult) -> str:
    return _tsv(
        ("threshold", "macro_precision", "macro_recall", "accuracy", "decision_nodes"),
        ((r.threshold, r.macro_precision, r.macro_recall, r.accuracy, r.decision_nodes) for r in result.rows),
    )


def comparison_tsv(rows: Sequence[ComparisonRow]) -> str:
    return _tsv(
        ("model", "accuracy", "macro_precision", "macro_recall", "decision_nodes"),
        ((r.model, r.accuracy, r.macro_precision, r.macro_recall, r.decision_nodes) for r in rows),
    )
