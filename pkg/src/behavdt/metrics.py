"""Entropy, information gain and dominant-behavior statistics."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .dataset import Dataset
from .errors import DataError

GAIN_TOLERANCE = 1e-12


@dataclass(frozen=True)
class ClassDistribution:
    counts: Mapping[str, int]

    def __post_init__(self) -> None:
        if any(c < 0 for c in self.counts.values()):
            raise ValueError("class counts must be non-negative")

    @classmethod
    def from_labels(cls, labels: Iterable[str]) -> ClassDistribution:
        return cls(dict(Counter(labels)))

    @classmethod
    def of(cls, dataset: Dataset) -> ClassDistribution:
        return cls.from_labels(inst.label for inst in dataset.instances)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def proportions(self) -> dict[str, float]:
        total = self.total
        if total == 0:
            return {}
        return {k: v / total for k, v in self.counts.items()}


@dataclass(frozen=True)
class AttributeScore:
    attribute: str
    gain: float


def entropy(dist: ClassDistribution) -> float:
    """Shannon entropy in bits, with 0 * log2(0) taken as 0."""
    total = dist.total
    if total == 0:
        return 0.0
    h = 0.0
    for count in dist.counts.values():
        if count:
            p = count / total
            h -= p * math.log2(p)
    return h


def partition(dataset: Dataset, attribute: str) -> dict[str, Dataset]:
    """Split by attribute value; MISSING is an ordinary value here."""
    j = dataset.schema.index(attribute)
    groups: dict[str, list] = {}
    for inst in dataset.instances:
        groups.setdefault(inst.values[j], []).append(inst)
    return {v: Dataset(dataset.schema, tuple(g)) for v, g in sorted(groups.items())}


def information_gain(parent: Dataset, attribute: str) -> AttributeScore:
    j = parent.schema.index(attribute)
    n = len(parent)
    if n == 0:
        return AttributeScore(attribute, 0.0)
    cells: dict[str, Counter] = {}
    for inst in parent.instances:
        cells.setdefault(inst.values[j], Counter())[inst.label] += 1
    cond = 0.0
    for counter in cells.values():
        size = sum(counter.values())
        cond += size / n * entropy(ClassDistribution(counter))
    return AttributeScore(attribute, entropy(ClassDistribution.of(parent)) - cond)


def dominant_behavior(dist: ClassDistribution) -> tuple[str, float]:
    """Most frequent class and its share; ties go to the smallest token."""
    total = dist.total
    if total == 0:
        raise DataError("dominant behavior of an empty distribution is undefined")
    label = min(dist.counts, key=lambda k: (-dist.counts[k], k))
    return label, dist.counts[label] / total


def pick_best(gains: Sequence[float]) -> int:
    """Index of the maximal gain; near-ties go to the earliest position."""
    if not len(gains):
        raise DataError("no candidate attributes")
    top = max(gains)
    for i, g in enumerate(gains):
        if g >= top - GAIN_TOLERANCE:
            return i
    raise AssertionError("unreachable")


def best_attribute(subset: Dataset, candidates: Sequence[str]) -> str:
    if not candidates:
        raise DataError("no candidate attributes")
    if len(subset) == 0:
        raise DataError("cannot choose a split for an empty subset")
    # schema order is the tie-break order, whatever order candidates arrive in
    ordered = sorted(candidates, key=subset.schema.index)
    gains = [information_gain(subset, a).gain for a in ordered]
    return ordered[pick_best(gains)]
