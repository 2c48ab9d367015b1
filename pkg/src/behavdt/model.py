"""Prediction, decision-node reports, model documents and exports."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Mapping, Sequence, Union

from .baselines import TRADITIONAL_DT, ZERO_R, BaselineModel
from .dataset import Attribute, ContextSchema, Dataset, Instance
from .errors import DataError, ModelFormatError, VersionError
from .learner import BehavNode, BehavTree, LearnerConfig

FORMAT_VERSION = 1

Model = Union[BehavTree, BaselineModel]


@dataclass(frozen=True)
class DecisionNodeRecord:
    node_id: int
    node_type: str  # "interior" | "leaf"
    behavior: str
    associated_contexts: tuple[str, ...]
    confidence: float
    support: int
    conditions: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class Prediction:
    label: str
    source_node: int  # decision-node number; 0 when the majority fallback answered
    depth: int
    fallback_used: bool


def _values_of(model: Model, instance: Instance | Sequence[str] | Mapping[str, str]) -> Sequence[str]:
    names = model.schema.names
    if isinstance(instance, Instance):
        values = instance.values
    elif isinstance(instance, Mapping):
        unknown = set(instance) - set(names)
        if unknown:
            raise DataError(f"unknown attributes {sorted(unknown)}")
        return instance
    else:
        values = tuple(instance)
    if len(values) != len(names):
        raise DataError(f"instance has {len(values)} values, schema has {len(names)}")
    return values


def predict(model: Model, instance: Instance | Sequence[str] | Mapping[str, str]) -> Prediction:
    """Label from the deepest labeled node on the instance's path.

    Descent stops where the instance's value has no branch, which is how
    values subsumed by a generalized node end up answered by it.
    """
    values = _values_of(model, instance)
    by_name = values if isinstance(values, Mapping) else dict(zip(model.schema.names, values))
    node = model.root
    best: BehavNode | None = None
    depth = 0
    while node is not None:
        if node.label is not None:
            best = node
        if node.split_attribute is None:
            break
        node = node.branches.get(by_name.get(node.split_attribute))
        if node is not None:
            depth += 1
    if best is None:
        return Prediction(model.majority_label, 0, depth, True)
    return Prediction(best.label, model.decision_ids[id(best)], depth, False)


def predict_labels(model: Model, dataset: Dataset) -> list[str]:
    return [predict(model, inst).label for inst in dataset.instances]


def extract_decision_nodes(model: Model) -> list[DecisionNodeRecord]:
    if model.root is None:
        return []
    records = []
    for node in model.root.walk():
        if not node.is_decision:
            continue
        records.append(
            DecisionNodeRecord(
                node_id=len(records) + 1,
                node_type="interior" if node.branches else "leaf",
                behavior=node.label,
                associated_contexts=tuple(v for _, v in node.context_path),
                confidence=node.confidence,
                support=node.support,
                conditions=node.context_path,
            )
        )
    return records


def count_decision_nodes(model: Model) -> int:
    if isinstance(model, BaselineModel) and model.variant == ZERO_R:
        return 1
    return len(extract_decision_nodes(model))


# ---------------------------------------------------------------------------
# Model documents (JSON)


def _conf(x: float) -> float:
    return float(f"{x:.12g}")


def _schema_doc(schema: ContextSchema) -> dict[str, Any]:
    return {
        "attributes": [
            {"name": a.name, "domain": list(a.domain) if a.domain is not None else None}
            for a in schema.attributes
        ],
        "class_attribute": schema.class_attribute,
    }


def serialize(model: Model) -> str:
    nodes: list[dict[str, Any]] = []
    ids: dict[int, int] = {}
    root = model.root
    if root is not None:
        for node in root.walk():
            ids[id(node)] = len(ids)
        for node in root.walk():
            nodes.append(
                {
                    "id": ids[id(node)],
                    "kind": node.kind,
                    "label": node.label,
                    "confidence": _conf(node.confidence),
                    "support": node.support,
                    "split_attribute": node.split_attribute,
                    "branches": {v: ids[id(node.branches[v])] for v in sorted(node.branches)},
                    "forced": node.forced,
                    "generalized": node.generalized,
                }
            )
    if isinstance(model, BehavTree):
        kind = "behavdt"
        cfg = model.config
        config: dict[str, Any] | None = {
            "confidence_threshold": cfg.confidence_threshold,
            "exception_policy": cfg.exception_policy,
            "max_depth": cfg.max_depth,
        }
    else:
        kind = model.variant
        config = None
    doc = {
        "version": FORMAT_VERSION,
        "model": kind,
        "schema": _schema_doc(model.schema),
        "config": config,
        "majority_label": model.majority_label,
        "nodes": nodes,
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _field(obj: Mapping, key: str, types, where: str, optional: bool = False):
    if key not in obj:
        if optional:
            return None
        raise ModelFormatError(f"missing field {key!r}", where)
    value = obj[key]
    if value is None and optional:
        return None
    if not isinstance(value, types) or (isinstance(value, bool) and bool not in _as_tuple(types)):
        raise ModelFormatError(f"field {key!r} has wrong type {type(value).__name__}", where)
    return value


def _as_tuple(types) -> tuple:
    return types if isinstance(types, tuple) else (types,)


def deserialize(text: str) -> Model:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    if not isinstance(doc, dict):
        raise ModelFormatError("top level must be an object", "$")
    version = doc.get("version")
    if version != FORMAT_VERSION:
        raise VersionError(f"unsupported format version {version!r} (expected {FORMAT_VERSION})", "$.version")

    kind = _field(doc, "model", str, "$")
    sdoc = _field(doc, "schema", dict, "$")
    attrs = []
    for i, a in enumerate(_field(sdoc, "attributes", list, "$.schema")):
        where = f"$.schema.attributes[{i}]"
        if not isinstance(a, dict):
            raise ModelFormatError("attribute must be an object", where)
        domain = _field(a, "domain", list, where, optional=True)
        attrs.append(Attribute(_field(a, "name", str, where), tuple(domain) if domain is not None else None))
    try:
        schema = ContextSchema(tuple(attrs), _field(sdoc, "class_attribute", str, "$.schema"))
    except DataError as exc:
        raise ModelFormatError(str(exc), "$.schema") from None
    majority = _field(doc, "majority_label", str, "$")
    node_docs = _field(doc, "nodes", list, "$")

    if kind == ZERO_R:
        if node_docs:
            raise ModelFormatError("zero-r model must have no nodes", "$.nodes")
        return BaselineModel(ZERO_R, schema, majority)
    if kind not in ("behavdt", TRADITIONAL_DT):
        raise ModelFormatError(f"unknown model kind {kind!r}", "$.model")
    if not node_docs:
        raise ModelFormatError("tree model needs at least a root node", "$.nodes")

    by_id: dict[int, dict] = {}
    for i, nd in enumerate(node_docs):
        where = f"$.nodes[{i}]"
        if not isinstance(nd, dict):
            raise ModelFormatError("node must be an object", where)
        nid = _field(nd, "id", int, where)
        if nid in by_id:
            raise ModelFormatError(f"duplicate node id {nid}", where)
        nd = dict(nd, _where=where)
        by_id[nid] = nd
    root_id = _field(node_docs[0], "id", int, "$.nodes[0]")
    seen: set[int] = set()

    def build(nid: int, path: tuple) -> BehavNode:
        if nid not in by_id:
            raise ModelFormatError(f"branch refers to missing node {nid}", "$.nodes")
        if nid in seen:
            raise ModelFormatError(f"node {nid} reached twice", "$.nodes")
        seen.add(nid)
        nd = by_id[nid]
        where = nd["_where"]
        node_kind = _field(nd, "kind", str, where)
        if node_kind not in ("root", "interior", "leaf"):
            raise ModelFormatError(f"bad node kind {node_kind!r}", where)
        branches_doc = _field(nd, "branches", dict, where, optional=True) or {}
        split = _field(nd, "split_attribute", str, where, optional=True)
        if branches_doc and split is None:
            raise ModelFormatError("node with branches needs a split_attribute", where)
        if split is not None and split not in schema.names:
            raise ModelFormatError(f"unknown split attribute {split!r}", where)
        if split is not None and any(a == split for a, _ in path):
            raise ModelFormatError(f"attribute {split!r} repeats on a path", where)
        branches = {}
        for value, child_id in branches_doc.items():
            if not isinstance(child_id, int):
                raise ModelFormatError(f"branch {value!r} must name a node id", where)
            branches[value] = build(child_id, path + ((split, value),))
        confidence = _field(nd, "confidence", (int, float), where, optional=True)
        return BehavNode(
            kind=node_kind,
            label=_field(nd, "label", str, where, optional=True),
            confidence=float(confidence or 0.0),
            support=_field(nd, "support", int, where, optional=True) or 0,
            split_attribute=split,
            branches=branches,
            context_path=path,
            forced=bool(nd.get("forced", False)),
            generalized=bool(nd.get("generalized", False)),
        )

    root = build(root_id, ())
    if len(seen) != len(by_id):
        raise ModelFormatError(f"{len(by_id) - len(seen)} unreachable node(s)", "$.nodes")
    if kind == TRADITIONAL_DT:
        return BaselineModel(TRADITIONAL_DT, schema, majority, root)

    cdoc = _field(doc, "config", dict, "$")
    try:
        config = LearnerConfig(
            confidence_threshold=float(_field(cdoc, "confidence_threshold", (int, float), "$.config")),
            exception_policy=_field(cdoc, "exception_policy", str, "$.config"),
            max_depth=_field(cdoc, "max_depth", int, "$.config", optional=True),
        )
    except DataError as exc:
        raise ModelFormatError(str(exc), "$.config") from None
    return BehavTree(root, schema, config, majority)


def canonical(model: Model) -> BehavTree | BaselineModel:
    """Copy with confidences rounded as they are stored in documents."""
    return deserialize(serialize(model))


# ---------------------------------------------------------------------------
# Exports


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def export_dot(model: Model) -> str:
    lines = ["digraph behavdt {", '  node [shape=box, fontname="Helvetica"];']
    root = model.root
    if root is None:
        lines.append(f'  n0 [label="{_dot_escape(model.majority_label)} (majority)"];')
        lines.append("}")
        return "\n".join(lines) + "\n"
    ids = {id(node): i for i, node in enumerate(root.walk())}
    for node in root.walk():
        nid = ids[id(node)]
        if node.label is not None:
            text = f"{node.label} ({node.confidence:.3f}, {node.support})"
            if node.split_attribute:
                text += f"\\n{node.split_attribute}?"
            style = ", style=rounded" if node.branches else ""
        else:
            text = f"{node.split_attribute or 'root'}?"
            style = ", style=dashed"
        lines.append(f'  n{nid} [label="{_dot_escape(text)}"{style}];')
    for node in root.walk():
        for value in sorted(node.branches):
            child = node.branches[value]
            lines.append(f'  n{ids[id(node)]} -> n{ids[id(child)]} [label="{_dot_escape(value)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def format_rule(record: DecisionNodeRecord) -> str:
    cond = " AND ".join(f"{a}={v}" for a, v in record.conditions) or "TRUE"
    return (
        f"IF {cond} THEN {record.behavior} "
        f"[conf={record.confidence:.4f}, sup={record.support}, type={record.node_type}]"
    )


def export_rules(model: Model) -> str:
    if isinstance(model, BaselineModel) and model.variant == ZERO_R:
        return f"IF TRUE THEN {model.majority_label} [conf=NA, sup=NA, type=leaf]\n"
    return "".join(format_rule(r) + "\n" for r in extract_decision_nodes(model))
