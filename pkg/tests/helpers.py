"""Shared builders and structural checks for the test suite."""

from __future__ import annotations

from importlib import resources

from behavdt import ContextSchema, Dataset, Instance, load_planted_spec
from behavdt.dataset import PlantedTreeSpec
from behavdt.learner import BehavNode
from behavdt.metrics import ClassDistribution
from behavdt.model import extract_decision_nodes
from behavdt.rng import XorShift64Star

RELATIONSHIPS = ("XYZ", "boss", "colleague", "friend", "unknown")

# (node type, behavior, associated contexts) of the seven-node call tree
CALL_TREE_NODES = {
    ("interior", "Decline", ("Meeting",)),
    ("interior", "Decline", ("Unknown",)),
    ("leaf", "Answer", ("Meeting", "Boss")),
    ("leaf", "Answer", ("Office", "Mother")),
    ("leaf", "Decline", ("Office", "Friend", "Mon[Mor]")),
    ("leaf", "Answer", ("Office", "Friend", "Mon[Eve]")),
    ("leaf", "Answer", ("Unknown", "Home")),
}


def meeting_dataset(copies: int = 4) -> Dataset:
    """Meeting calls are declined except from the boss; calls at home are answered."""
    schema = ContextSchema.of({"situation": ["Home", "Meeting"], "relationship": list(RELATIONSHIPS)})
    rows = []
    for rel in RELATIONSHIPS:
        label = "Answer" if rel == "boss" else "Decline"
        rows += [Instance(("Meeting", rel), label)] * copies
        rows += [Instance(("Home", rel), "Answer")] * copies
    return Dataset(schema, tuple(rows))


def bundled_spec(name: str) -> PlantedTreeSpec:
    path = resources.files("behavdt") / "data" / name
    with resources.as_file(path) as p:
        return load_planted_spec(p)


def rule_table(model) -> list[tuple[str, str, tuple[str, ...]]]:
    return [(r.node_type, r.behavior, r.associated_contexts) for r in extract_decision_nodes(model)]


def rule_set(model) -> set[tuple[tuple[tuple[str, str], ...], str]]:
    return {(r.conditions, r.behavior) for r in extract_decision_nodes(model)}


def subtree_decision_count(node: BehavNode) -> int:
    return sum(1 for n in node.walk() if n.is_decision)


def random_planted_spec(seed: int, noise: float = 0.0) -> PlantedTreeSpec:
    """Random schema (2-6 attributes, 2-5 values) with 1-6 random conjunctive rules."""
    rng = XorShift64Star(seed)
    n_attrs = 2 + rng.below(5)
    attrs = {f"c{j}": [f"v{i}" for i in range(2 + rng.below(4))] for j in range(n_attrs)}
    names = list(attrs)
    classes = ["A", "B", "C"][: 2 + rng.below(2)]
    rules = []
    for _ in range(1 + rng.below(6)):
        cond = {}
        for _ in range(1 + rng.below(3)):
            name = names[rng.below(n_attrs)]
            cond[name] = attrs[name][rng.below(len(attrs[name]))]
        rules.append((cond, classes[1 + rng.below(len(classes) - 1)]))
    return PlantedTreeSpec(
        ContextSchema.of(attrs),
        tuple(rules),
        classes[0],
        noise,
        50 + rng.below(451),
        seed,
        classes=tuple(classes),
    )


def tree_violations(model, data: Dataset) -> list[str]:
    """Every structural invariant a learned tree must satisfy, as messages."""
    errors: list[str] = []
    threshold = getattr(getattr(model, "config", None), "confidence_threshold", None)
    n_attrs = len(data.schema.attributes)

    def visit(node: BehavNode) -> None:
        path = node.context_path
        attrs = [a for a, _ in path]
        if len(set(attrs)) != len(attrs):
            errors.append(f"repeated attribute on {path}")
        if len(path) > n_attrs:
            errors.append(f"path deeper than attribute count: {path}")
        if node.branches and node.split_attribute is None:
            errors.append(f"branches without split at {path}")
        if node.kind == "leaf" and node.branches:
            errors.append(f"leaf with branches at {path}")
        sub = data.where(**dict(path))
        if node.support != len(sub):
            errors.append(f"support {node.support} != {len(sub)} at {path}")
        if node.label is not None:
            count = ClassDistribution.of(sub).counts.get(node.label, 0)
            if abs(node.confidence - count / len(sub)) > 1e-12:
                errors.append(f"confidence mismatch at {path}")
            pure = count == len(sub)
            if threshold is not None and not (pure or node.forced) and node.confidence < threshold:
                errors.append(f"confidence {node.confidence} below {threshold} at {path}")
        for value, child in node.branches.items():
            if child.context_path != path + ((node.split_attribute, value),):
                errors.append(f"child path does not extend {path} by one test")
            visit(child)

    if model.root is not None:
        visit(model.root)
    return errors
