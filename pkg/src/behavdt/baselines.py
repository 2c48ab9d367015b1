"""Comparators: ID3-style traditional decision tree and ZeroR."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .dataset import ContextSchema, Dataset
from .errors import DataError
from .learner import BehavNode, LearnerConfig, grow, majority_label, number_decision_nodes

TRADITIONAL_DT = "traditional-dt"
ZERO_R = "zero-r"


@dataclass(frozen=True)
class BaselineModel:
    variant: str
    schema: ContextSchema
    majority_label: str
    tree: BehavNode | None = None

    def __post_init__(self) -> None:
        if self.variant not in (TRADITIONAL_DT, ZERO_R):
            raise ValueError(f"unknown baseline variant {self.variant!r}")
        if (self.variant == ZERO_R) != (self.tree is None):
            raise ValueError("zero-r carries no tree; traditional-dt requires one")

    @property
    def kind(self) -> str:
        return self.variant

    @property
    def root(self) -> BehavNode | None:
        return self.tree

    @cached_property
    def decision_ids(self) -> dict[int, int]:
        return number_decision_nodes(self.tree)


def build_traditional_dt(train: Dataset) -> BaselineModel:
    # threshold 1.0 and no generalization: labels appear on leaves only
    root = grow(train, LearnerConfig(confidence_threshold=1.0), generalize=False)
    return BaselineModel(TRADITIONAL_DT, train.schema, majority_label(train), root)


def build_zero_r(train: Dataset) -> BaselineModel:
    if len(train) == 0:
        raise DataError("cannot train on an empty dataset")
    return BaselineModel(ZERO_R, train.schema, majority_label(train))
