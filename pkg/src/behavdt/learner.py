"""Behavioral decision tree induction.

Top-down information-gain splitting where every non-pure child first tries
node generalization: if its dominant behavior reaches the confidence
threshold the child becomes a labeled decision node, and only the values
whose behavior deviates from that label are expanded further. Children that
fail to generalize stay unlabeled and are expanded on every value.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Mapping, Sequence

import numpy as np

from . import _core
from .dataset import ContextSchema, Dataset, Encoded
from .errors import DataError
from .metrics import ClassDistribution, dominant_behavior, pick_best

MAJORITY_DEVIATION = "majority-deviation"
ANY_DEVIATION = "any-deviation"
POLICIES = (MAJORITY_DEVIATION, ANY_DEVIATION)


@dataclass(frozen=True)
class LearnerConfig:
    confidence_threshold: float = 0.8
    exception_policy: str = MAJORITY_DEVIATION
    max_depth: int | None = None

    def __post_init__(self) -> None:
        t = self.confidence_threshold
        if not 0.0 <= t <= 1.0:
            raise DataError(f"confidence_threshold must be in [0, 1], got {t}")
        if self.exception_policy not in POLICIES:
            raise DataError(
                f"exception_policy must be one of {POLICIES}, got {self.exception_policy!r}"
            )
        if self.max_depth is not None and self.max_depth < 1:
            raise DataError("max_depth must be a positive integer")
        if t < 0.5:
            warnings.warn(
                f"confidence threshold {t} < 0.5: a generalized label may cover "
                "a minority of its subset",
                stacklevel=3,
            )


@dataclass(frozen=True, eq=True)
class BehavNode:
    """One tree node.

    ``label`` is None on dispatch-only nodes: the root, and children whose
    subset neither was pure nor generalized. ``forced`` marks impure leaves
    labeled only because no split was possible; ``generalized`` marks labels
    produced by node generalization.
    """

    kind: str
    label: str | None
    confidence: float
    support: int
    split_attribute: str | None = None
    branches: Mapping[str, BehavNode] = field(default_factory=dict)
    context_path: tuple[tuple[str, str], ...] = ()
    forced: bool = False
    generalized: bool = False

    @property
    def is_decision(self) -> bool:
        return self.label is not None

    def walk(self) -> Iterator[BehavNode]:
        """Pre-order traversal, branches in lexicographic value order."""
        yield self
        for value in sorted(self.branches):
            yield from self.branches[value].walk()

    def depth(self) -> int:
        return len(self.context_path)


@dataclass(frozen=True, eq=True)
class BehavTree:
    root: BehavNode
    schema: ContextSchema
    config: LearnerConfig
    majority_label: str

    kind = "behavdt"

    def nodes(self) -> Iterator[BehavNode]:
        return self.root.walk()

    @cached_property
    def decision_ids(self) -> dict[int, int]:
        return number_decision_nodes(self.root)


def number_decision_nodes(root: BehavNode | None) -> dict[int, int]:
    """``id(node) -> decision-node number`` (1-based, pre-order)."""
    ids: dict[int, int] = {}
    if root is not None:
        for node in root.walk():
            if node.is_decision:
                ids[id(node)] = len(ids) + 1
    return ids


# ---------------------------------------------------------------------------
# Token-level building blocks


def node_generalization(
    subset: Dataset,
    assoc: Sequence[tuple[str, str]] = (),
    threshold: float = 0.8,
) -> tuple[str, float] | None:
    """Generalized (label, confidence) for the instances matching ``assoc``.

    Returns None when nothing matches or the dominant behavior's share is
    below ``threshold``.
    """
    matched = subset.where(**dict(assoc)) if assoc else subset
    if len(matched) == 0:
        return None
    label, conf = dominant_behavior(ClassDistribution.of(matched))
    if conf >= threshold:
        return label, conf
    return None


def deviates(dist: ClassDistribution, generalized_label: str, policy: str) -> bool:
    """Whether a value subset is an exception to its generalized parent."""
    if dist.total == 0:
        return False
    if policy == MAJORITY_DEVIATION:
        return dominant_behavior(dist)[0] != generalized_label
    if policy == ANY_DEVIATION:
        return dist.total - dist.counts.get(generalized_label, 0) > 0
    raise DataError(f"unknown exception policy {policy!r}")


def exception_expansion(
    context_path: Sequence[tuple[str, str]],
    split_attribute: str,
    child_subsets: Mapping[str, Dataset],
    generalized_label: str,
    remaining_attributes: Sequence[str],
    config: LearnerConfig,
) -> dict[str, BehavNode]:
    """Grow the exception branches under a generalized node.

    Values whose subsets do not deviate from ``generalized_label`` are
    subsumed and get no branch.
    """
    branches: dict[str, BehavNode] = {}
    for value in sorted(child_subsets):
        sub = child_subsets[value]
        if not deviates(ClassDistribution.of(sub), generalized_label, config.exception_policy):
            continue
        grower = _Grower(sub.encoded, sub.schema, config, generalize=True)
        attrs = sorted(sub.schema.index(a) for a in remaining_attributes)
        path = tuple(context_path) + ((split_attribute, value),)
        branches[value] = grower.child(np.arange(len(sub), dtype=np.intp), attrs, path)
    return branches


# ---------------------------------------------------------------------------
# Coded grower shared with the traditional tree baseline


class _Grower:
    def __init__(
        self, enc: Encoded, schema: ContextSchema, config: LearnerConfig, generalize: bool
    ) -> None:
        self.enc = enc
        self.names = schema.names
        self.config = config
        self.generalize = generalize
        self.n_classes = len(enc.classes)
        self.n_values = enc.n_values
        self.threshold = config.confidence_threshold
        self.any_deviation = config.exception_policy == ANY_DEVIATION

    def _counts(self, rows: np.ndarray) -> np.ndarray:
        return _core.class_counts(self.enc.labels, rows, self.n_classes)

    def _can_split(self, attrs: list[int], path: tuple) -> bool:
        if not attrs:
            return False
        return self.config.max_depth is None or len(path) < self.config.max_depth

    def _best(self, rows: np.ndarray, attrs: list[int]) -> int:
        gains = _core.split_gains(
            self.enc.codes,
            self.enc.labels,
            rows,
            np.asarray(attrs, dtype=np.intp),
            self.n_values,
            self.n_classes,
        )
        return attrs[pick_best(list(gains))]

    def _partition(self, rows: np.ndarray, attr: int) -> list[tuple[str, np.ndarray]]:
        col = self.enc.codes[rows, attr]
        order = np.argsort(col, kind="stable")
        sorted_col = col[order]
        codes, starts = np.unique(sorted_col, return_index=True)
        bounds = list(starts[1:]) + [len(rows)]
        tokens = self.enc.values[attr]
        return [
            (tokens[c], rows[order[s:e]]) for c, s, e in zip(codes, starts, bounds)
        ]

    def root(self) -> BehavNode:
        rows = np.arange(len(self.enc.labels), dtype=np.intp)
        attrs = list(range(len(self.names)))
        counts = self._counts(rows)
        top = int(np.argmax(counts))
        conf = counts[top] / len(rows)
        if counts[top] == len(rows):
            # pure training set: the root itself is the only decision node
            return BehavNode("root", self.enc.classes[top], 1.0, len(rows))
        return self._dispatch("root", rows, attrs, (), conf)

    def child(self, rows: np.ndarray, attrs: list[int], path: tuple) -> BehavNode:
        n = len(rows)
        counts = self._counts(rows)
        top = int(np.argmax(counts))  # first max == lexicographically smallest class
        label = self.enc.classes[top]
        conf = counts[top] / n
        if counts[top] == n:
            return BehavNode("leaf", label, 1.0, n, context_path=path)
        if self.generalize and conf >= self.threshold:
            return self._generalized(rows, attrs, path, top, conf)
        if not self._can_split(attrs, path):
            return BehavNode("leaf", label, conf, n, context_path=path, forced=True)
        return self._dispatch("interior", rows, attrs, path, conf)

    def _dispatch(
        self, kind: str, rows: np.ndarray, attrs: list[int], path: tuple, conf: float
    ) -> BehavNode:
        best = self._best(rows, attrs)
        rest = [a for a in attrs if a != best]
        name = self.names[best]
        branches = {
            value: self.child(sub, rest, path + ((name, value),))
            for value, sub in self._partition(rows, best)
        }
        return BehavNode(kind, None, conf, len(rows), name, branches, path)

    def _deviates(self, rows: np.ndarray, label_code: int) -> bool:
        counts = self._counts(rows)
        if self.any_deviation:
            return counts.sum() - counts[label_code] > 0
        return int(np.argmax(counts)) != label_code

    def _generalized(
        self, rows: np.ndarray, attrs: list[int], path: tuple, label_code: int, conf: float
    ) -> BehavNode:
        label = self.enc.classes[label_code]
        n = len(rows)
        if not self._can_split(attrs, path):
            return BehavNode("leaf", label, conf, n, context_path=path, generalized=True)
        best = self._best(rows, attrs)
        rest = [a for a in attrs if a != best]
        name = self.names[best]
        branches = {
            value: self.child(sub, rest, path + ((name, value),))
            for value, sub in self._partition(rows, best)
            if self._deviates(sub, label_code)
        }
        if not branches:
            return BehavNode("leaf", label, conf, n, context_path=path, generalized=True)
        return BehavNode(
            "interior", label, conf, n, name, branches, path, generalized=True
        )


def _check_trainable(train: Dataset) -> None:
    if len(train) == 0:
        raise DataError("cannot train on an empty dataset")
    if not train.schema.attributes:
        raise DataError("dataset has no context attributes")


def grow(train: Dataset, config: LearnerConfig, generalize: bool) -> BehavNode:
    _check_trainable(train)
    return _Grower(train.encoded, train.schema, config, generalize).root()


def majority_label(train: Dataset) -> str:
    return dominant_behavior(ClassDistribution.of(train))[0]


def build_tree(train: Dataset, config: LearnerConfig | None = None) -> BehavTree:
    config = config or LearnerConfig()
    root = grow(train, config, generalize=True)
    return BehavTree(root, train.schema, config, majority_label(train))
