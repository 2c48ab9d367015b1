"""Categorical context datasets: loading, discretization, synthesis, folds."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
import yaml

from .errors import DataError
from .rng import XorShift64Star

MISSING = "?"

WEEKDAYS = ("Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun")


@dataclass(frozen=True)
class Attribute:
    name: str
    domain: tuple[str, ...] | None = None


@dataclass(frozen=True)
class ContextSchema:
    """Ordered context attributes plus the name of the behavior column.

    Attribute order matters: it is the tie-break order for split selection.
    """

    attributes: tuple[Attribute, ...]
    class_attribute: str

    def __post_init__(self) -> None:
        names = [a.name for a in self.attributes]
        if any(not n for n in names):
            raise DataError("attribute names must be non-empty")
        if len(set(names)) != len(names):
            raise DataError(f"duplicate attribute names in {names}")
        if not self.class_attribute:
            raise DataError("class attribute name must be non-empty")
        if self.class_attribute in names:
            raise DataError(
                f"class attribute {self.class_attribute!r} is also a context attribute"
            )

    @classmethod
    def of(
        cls,
        attributes: Sequence[str] | Mapping[str, Sequence[str] | None],
        class_attribute: str = "behavior",
    ) -> ContextSchema:
        """Shorthand: ``ContextSchema.of({"S": ["a", "b"], "R": None})``."""
        if isinstance(attributes, Mapping):
            attrs = tuple(
                Attribute(n, tuple(d) if d is not None else None)
                for n, d in attributes.items()
            )
        else:
            attrs = tuple(Attribute(n) for n in attributes)
        return cls(attrs, class_attribute)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise DataError(f"unknown attribute {name!r}") from None


@dataclass(frozen=True)
class Instance:
    values: tuple[str, ...]
    label: str

    def __post_init__(self) -> None:
        if not self.label:
            raise DataError("instance label must be non-empty")


@dataclass(frozen=True)
class Encoded:
    """Integer-coded view of a dataset used by the tree-building kernels.

    Value and class codes follow lexicographic token order, so lower codes
    win ties exactly where the token-level rules say they should.
    """

    codes: np.ndarray  # (n_instances, n_attributes), intp
    labels: np.ndarray  # (n_instances,), intp
    values: tuple[tuple[str, ...], ...]
    classes: tuple[str, ...]

    @property
    def n_values(self) -> np.ndarray:
        return np.array([len(v) for v in self.values], dtype=np.intp)


@dataclass(frozen=True)
class Dataset:
    schema: ContextSchema
    instances: tuple[Instance, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if not isinstance(self.instances, tuple):
            object.__setattr__(self, "instances", tuple(self.instances))
        width = len(self.schema.attributes)
        for i, inst in enumerate(self.instances):
            if len(inst.values) != width:
                raise DataError(
                    f"instance {i} has {len(inst.values)} values, schema has {width}"
                )

    def __len__(self) -> int:
        return len(self.instances)

    def __iter__(self):
        return iter(self.instances)

    @property
    def labels(self) -> list[str]:
        return [inst.label for inst in self.instances]

    def subset(self, indices: Iterable[int]) -> Dataset:
        return Dataset(self.schema, tuple(self.instances[i] for i in indices))

    def where(self, **conditions: str) -> Dataset:
        """Instances whose attributes equal all given values."""
        idx = [(self.schema.index(k), v) for k, v in conditions.items()]
        return Dataset(
            self.schema,
            tuple(x for x in self.instances if all(x.values[i] == v for i, v in idx)),
        )

    @cached_property
    def encoded(self) -> Encoded:
        n, m = len(self.instances), len(self.schema.attributes)
        values = tuple(
            tuple(sorted({inst.values[j] for inst in self.instances})) for j in range(m)
        )
        classes = tuple(sorted({inst.label for inst in self.instances}))
        lookup = [{v: c for c, v in enumerate(vals)} for vals in values]
        cls_lookup = {c: i for i, c in enumerate(classes)}
        codes = np.empty((n, m), dtype=np.intp)
        for i, inst in enumerate(self.instances):
            for j, v in enumerate(inst.values):
                codes[i, j] = lookup[j][v]
        labels = np.fromiter(
            (cls_lookup[inst.label] for inst in self.instances), dtype=np.intp, count=n
        )
        return Encoded(codes, labels, values, classes)


# ---------------------------------------------------------------------------
# CSV


def load_csv(path: str | Path, schema_hint: ContextSchema | None = None) -> Dataset:
    """Read a header-first CSV into a Dataset; empty cells become MISSING."""
    text = Path(path).read_text(encoding="utf-8")
    return read_csv(io.StringIO(text), schema_hint)


def read_csv(stream: io.TextIOBase, schema_hint: ContextSchema | None = None) -> Dataset:
    reader = csv.reader(stream)
    rows = [r for r in reader]
    # tolerate a trailing blank line but nothing else that is empty
    while rows and not rows[-1]:
        rows.pop()
    if not rows:
        raise DataError("empty CSV file")
    header = [h.strip() for h in rows[0]]
    if len(header) < 2:
        raise DataError("CSV needs at least one context column and a class column")

    if schema_hint is None:
        class_col = len(header) - 1
        context_cols = list(range(class_col))
    else:
        expected = set(schema_hint.names) | {schema_hint.class_attribute}
        if set(header) != expected or len(header) != len(expected):
            raise DataError(
                f"CSV header {header} does not match schema "
                f"{list(schema_hint.names) + [schema_hint.class_attribute]}"
            )
        class_col = header.index(schema_hint.class_attribute)
        context_cols = [header.index(n) for n in schema_hint.names]

    instances = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise DataError(
                f"row {lineno}: expected {len(header)} columns, got {len(row)}"
            )
        label = row[class_col].strip()
        if not label:
            raise DataError(f"row {lineno}: empty class label")
        values = tuple(row[c].strip() or MISSING for c in context_cols)
        instances.append(Instance(values, label))

    if schema_hint is None:
        names = [header[c] for c in context_cols]
        domains = [sorted({inst.values[j] for inst in instances}) for j in range(len(names))]
        schema = ContextSchema(
            tuple(Attribute(n, tuple(d)) for n, d in zip(names, domains)), header[class_col]
        )
    else:
        schema = schema_hint
        for lineno, inst in enumerate(instances, start=2):
            for attr, v in zip(schema.attributes, inst.values):
                if attr.domain is not None and v != MISSING and v not in attr.domain:
                    raise DataError(
                        f"row {lineno}: value {v!r} not in declared domain of {attr.name!r}"
                    )
    return Dataset(schema, tuple(instances))


def dumps_csv(dataset: Dataset) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(dataset.schema.names) + [dataset.schema.class_attribute])
    for inst in dataset.instances:
        writer.writerow(list(inst.values) + [inst.label])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Discretization of raw phone logs


@dataclass(frozen=True)
class DiscretizationConfig:
    """Time-of-day bins, weekday prefixing, and contact relationships.

    ``time_bins`` are ``(label, start_minute)`` pairs with strictly increasing
    starts; each bin runs up to the next start and the last one wraps past
    midnight to the first.
    """

    time_bins: tuple[tuple[str, int], ...]
    include_weekday: bool = True
    contact_map: Mapping[str, str] = field(default_factory=dict)
    default_relationship: str = "unknown"
    utc_offset_minutes: int = 0

    def __post_init__(self) -> None:
        if not self.time_bins:
            raise DataError("at least one time bin is required")
        labels = [b[0] for b in self.time_bins]
        starts = [b[1] for b in self.time_bins]
        if len(set(labels)) != len(labels):
            raise DataError(f"time bin labels must be unique: {labels}")
        if any(not 0 <= s <= 1439 for s in starts):
            raise DataError("time bin starts must lie in 0..1439")
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise DataError("time bin starts must be strictly increasing")

    def segment(self, timestamp: int) -> str:
        local = int(timestamp) + self.utc_offset_minutes * 60
        minute = (local // 60) % 1440
        label = self.time_bins[-1][0]
        for name, start in self.time_bins:
            if start <= minute:
                label = name
            else:
                break
        if self.include_weekday:
            # 1970-01-01 was a Thursday
            day = WEEKDAYS[(local // 86400 + 3) % 7]
            return f"{day}[{label}]"
        return label

    @classmethod
    def from_mapping(cls, doc: Mapping) -> DiscretizationConfig:
        bins = doc.get("time_bins")
        if not isinstance(bins, Mapping):
            raise DataError("time_bins must map bin labels to start minutes")
        return cls(
            time_bins=tuple(sorted(((str(k), int(v)) for k, v in bins.items()), key=lambda b: b[1])),
            include_weekday=bool(doc.get("include_weekday", True)),
            contact_map={str(k): str(v) for k, v in (doc.get("contact_map") or {}).items()},
            default_relationship=str(doc.get("default_relationship", "unknown")),
            utc_offset_minutes=int(doc.get("utc_offset_minutes", 0)),
        )


@dataclass(frozen=True)
class RawRecord:
    timestamp: int
    contact_id: str
    location: str
    label: str


DISCRETIZED_SCHEMA_NAMES = ("time_segment", "relationship", "location")


def discretize(raw_rows: Iterable[RawRecord], config: DiscretizationConfig) -> Dataset:
    instances = []
    for row in raw_rows:
        rel = config.contact_map.get(row.contact_id, config.default_relationship)
        instances.append(
            Instance((config.segment(row.timestamp), rel, row.location or MISSING), row.label)
        )
    if config.include_weekday:
        time_domain = tuple(f"{d}[{b}]" for d in WEEKDAYS for b, _ in config.time_bins)
    else:
        time_domain = tuple(b for b, _ in config.time_bins)
    rel_domain = tuple(sorted(set(config.contact_map.values()) | {config.default_relationship}))
    schema = ContextSchema(
        (
            Attribute("time_segment", time_domain),
            Attribute("relationship", rel_domain),
            Attribute("location"),
        ),
        "label",
    )
    return Dataset(schema, tuple(instances))


def load_raw_log(path: str | Path) -> list[RawRecord]:
    """Read ``timestamp,contact_id,location,label`` rows (Unix seconds)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataError("empty raw log file")
        expected = ["timestamp", "contact_id", "location", "label"]
        if [h.strip() for h in header] != expected:
            raise DataError(f"raw log header must be {','.join(expected)}")
        out = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise DataError(f"row {lineno}: expected 4 columns, got {len(row)}")
            try:
                ts = int(row[0])
            except ValueError:
                raise DataError(f"row {lineno}: bad timestamp {row[0]!r}") from None
            out.append(RawRecord(ts, row[1].strip(), row[2].strip(), row[3].strip()))
    return out


# ---------------------------------------------------------------------------
# Synthetic data from planted rules


@dataclass(frozen=True)
class PlantedTreeSpec:
    """Generator for datasets whose labels follow an ordered rule list.

    Context values are drawn uniformly per attribute from the declared
    domains. Optional ``cases`` restrict where instances fall: each case is a
    partial assignment with an integer weight; a case is drawn by weight and
    the attributes it leaves open are drawn uniformly as usual.
    """

    schema: ContextSchema
    rules: tuple[tuple[Mapping[str, str], str], ...]
    default_label: str
    noise_rate: float = 0.0
    instance_count: int = 100
    seed: int = 42
    cases: tuple[tuple[Mapping[str, str], int], ...] = ()
    classes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not 0.0 <= self.noise_rate <= 1.0:
            raise DataError(f"noise_rate must be in [0, 1], got {self.noise_rate}")
        if self.instance_count <= 0:
            raise DataError("instance_count must be positive")
        for attr in self.schema.attributes:
            if not attr.domain:
                raise DataError(f"attribute {attr.name!r} has an empty declared domain")
        for kind, items in (("rule", self.rules), ("case", self.cases)):
            for cond, _ in items:
                self._check_condition(cond, kind)
        if any(w <= 0 for _, w in self.cases):
            raise DataError("case weights must be positive")

    def _check_condition(self, cond: Mapping[str, str], kind: str) -> None:
        for name, value in cond.items():
            attr = self.schema.attributes[self.schema.index(name)]
            if value not in attr.domain:
                raise DataError(f"{kind} value {value!r} not in domain of {name!r}")

    @property
    def class_tokens(self) -> tuple[str, ...]:
        return tuple(sorted({lab for _, lab in self.rules} | {self.default_label} | set(self.classes)))

    def planted_label(self, values: Sequence[str]) -> str:
        names = self.schema.names
        for cond, label in self.rules:
            if all(values[names.index(k)] == v for k, v in cond.items()):
                return label
        return self.default_label

    @classmethod
    def from_mapping(cls, doc: Mapping) -> PlantedTreeSpec:
        try:
            attrs = tuple(
                Attribute(str(a["name"]), tuple(str(v) for v in a["domain"]))
                for a in doc["attributes"]
            )
            schema = ContextSchema(attrs, str(doc.get("class_attribute", "behavior")))
            rules = tuple(
                ({str(k): str(v) for k, v in (r.get("when") or {}).items()}, str(r["label"]))
                for r in doc.get("rules") or ()
            )
            cases = tuple(
                ({str(k): str(v) for k, v in (c.get("when") or {}).items()}, int(c.get("weight", 1)))
                for c in doc.get("cases") or ()
            )
            return cls(
                schema=schema,
                rules=rules,
                default_label=str(doc["default_label"]),
                noise_rate=float(doc.get("noise_rate", 0.0)),
                instance_count=int(doc["instance_count"]),
                seed=int(doc.get("seed", 42)),
                cases=cases,
                classes=tuple(str(c) for c in doc.get("classes") or ()),
            )
        except (KeyError, TypeError) as exc:
            raise DataError(f"invalid synthetic spec: missing or bad field {exc}") from None


def load_planted_spec(path: str | Path) -> PlantedTreeSpec:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise DataError(f"{path}: {exc}") from None
    if not isinstance(doc, Mapping):
        raise DataError(f"{path}: expected a mapping at top level")
    return PlantedTreeSpec.from_mapping(doc)


def generate_synthetic(spec: PlantedTreeSpec) -> Dataset:
    rng = XorShift64Star(spec.seed)
    attrs = spec.schema.attributes
    classes = spec.class_tokens
    total_weight = sum(w for _, w in spec.cases)
    instances = []
    for _ in range(spec.instance_count):
        fixed: Mapping[str, str] = {}
        if spec.cases:
            pick = rng.below(total_weight)
            for cond, w in spec.cases:
                if pick < w:
                    fixed = cond
                    break
                pick -= w
        values = tuple(
            fixed[a.name] if a.name in fixed else a.domain[rng.below(len(a.domain))]
            for a in attrs
        )
        label = spec.planted_label(values)
        if spec.noise_rate > 0.0 and len(classes) > 1 and rng.random() < spec.noise_rate:
            others = [c for c in classes if c != label]
            label = others[rng.below(len(others))]
        instances.append(Instance(values, label))
    return Dataset(spec.schema, tuple(instances))


# ---------------------------------------------------------------------------
# Folds


def fold_assignments(
    n: int, k: int, seed: int, labels: Sequence[str] | None = None
) -> list[int]:
    """Fold index for each of ``n`` items.

    Unstratified: shuffle ``0..n-1`` and cut into ``k`` contiguous chunks,
    the first ``n % k`` one element larger. Stratified: shuffle within each
    class (classes in sorted order), concatenate, and deal round-robin.
    """
    if k < 2:
        raise DataError(f"k must be at least 2, got {k}")
    if k > n:
        raise DataError(f"k={k} exceeds instance count {n}")
    rng = XorShift64Star(seed)
    folds = [0] * n
    if labels is None:
        order = list(range(n))
        rng.shuffle(order)
        base, extra = divmod(n, k)
        pos = 0
        for f in range(k):
            size = base + (1 if f < extra else 0)
            for idx in order[pos : pos + size]:
                folds[idx] = f
            pos += size
    else:
        order = []
        for cls in sorted(set(labels)):
            members = [i for i, lab in enumerate(labels) if lab == cls]
            rng.shuffle(members)
            order.extend(members)
        for pos, idx in enumerate(order):
            folds[idx] = pos % k
    return folds


def split_kfold(
    dataset: Dataset, k: int, seed: int, stratified: bool = False
) -> list[tuple[Dataset, Dataset]]:
    folds = fold_assignments(
        len(dataset), k, seed, dataset.labels if stratified else None
    )
    pairs = []
    for f in range(k):
        test = [i for i, g in enumerate(folds) if g == f]
        train = [i for i, g in enumerate(folds) if g != f]
        pairs.append((dataset.subset(train), dataset.subset(test)))
    return pairs
