import warnings

import pytest
from hypothesis import given, settings, strategies as st

from behavdt import generate_synthetic
from behavdt.baselines import build_traditional_dt
from behavdt.dataset import ContextSchema, Dataset, Instance
from behavdt.errors import DataError
from behavdt.learner import (
    ANY_DEVIATION,
    LearnerConfig,
    build_tree,
    exception_expansion,
    node_generalization,
)
from behavdt.metrics import partition
from behavdt.model import count_decision_nodes, predict
from helpers import CALL_TREE_NODES, random_planted_spec, rule_set, rule_table, tree_violations

SCHEMA = ContextSchema.of({"situation": ["Home", "Meeting"], "relationship": ["colleague", "friend"]})


def stray_dataset() -> Dataset:
    """Meeting is Decline but for one Answer among the colleague calls."""
    rows = [Instance(("Meeting", "friend"), "Decline")] * 5
    rows += [Instance(("Meeting", "colleague"), "Decline")] * 4
    rows += [Instance(("Meeting", "colleague"), "Answer")]
    rows += [Instance(("Home", r), "Answer") for r in ("friend", "colleague")] * 3
    return Dataset(SCHEMA, tuple(rows))


# ---------------------------------------------------------------- config


def test_config_validation():
    with pytest.raises(DataError):
        LearnerConfig(confidence_threshold=1.5)
    with pytest.raises(DataError):
        LearnerConfig(exception_policy="sometimes")
    with pytest.raises(DataError):
        LearnerConfig(max_depth=0)
    with pytest.warns(UserWarning, match="< 0.5"):
        LearnerConfig(confidence_threshold=0.3)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        LearnerConfig(confidence_threshold=0.5)


# ---------------------------------------------------------------- node generalization


def test_generalization_examples(meeting):
    assert node_generalization(meeting, [("situation", "Meeting")], 0.8) == ("Decline", 0.8)
    assert node_generalization(meeting, [("situation", "Meeting")], 0.9) is None
    assert node_generalization(meeting.subset([]), (), 0.1) is None
    assert node_generalization(meeting, [("situation", "Home")], 1.0) == ("Answer", 1.0)


# ---------------------------------------------------------------- exception expansion


def test_meeting_expands_only_boss(meeting):
    sub = meeting.where(situation="Meeting")
    branches = exception_expansion(
        [("situation", "Meeting")], "relationship", partition(sub, "relationship"), "Decline", [], LearnerConfig()
    )
    assert list(branches) == ["boss"]
    leaf = branches["boss"]
    assert (leaf.kind, leaf.label, leaf.confidence) == ("leaf", "Answer", 1.0)
    assert leaf.context_path == (("situation", "Meeting"), ("relationship", "boss"))


def test_stray_instance_policies():
    sub = stray_dataset().where(situation="Meeting")
    parts = partition(sub, "relationship")
    path = [("situation", "Meeting")]
    assert exception_expansion(path, "relationship", parts, "Decline", [], LearnerConfig()) == {}
    expanded = exception_expansion(path, "relationship", parts, "Decline", [], LearnerConfig(0.8, ANY_DEVIATION))
    assert list(expanded) == ["colleague"]


def test_stray_absorbed_in_built_tree():
    majority = build_tree(stray_dataset())
    assert rule_table(majority) == [
        ("leaf", "Answer", ("Home",)),
        ("leaf", "Decline", ("Meeting",)),
    ]
    anydev = build_tree(stray_dataset(), LearnerConfig(0.8, ANY_DEVIATION))
    assert rule_table(anydev) == [
        ("leaf", "Answer", ("Home",)),
        ("interior", "Decline", ("Meeting",)),
        ("leaf", "Decline", ("Meeting", "colleague")),
    ]


# ---------------------------------------------------------------- build_tree


def test_meeting_scenario(meeting):
    tree = build_tree(meeting, LearnerConfig(0.8))
    assert tree.root.label is None and tree.root.split_attribute == "situation"
    node = tree.root.branches["Meeting"]
    assert (node.kind, node.label, node.confidence, node.generalized) == ("interior", "Decline", 0.8, True)
    assert node.split_attribute == "relationship"
    assert list(node.branches) == ["boss"]
    assert tree_violations(tree, meeting) == []


def test_pure_dataset_single_labeled_node():
    d = Dataset(SCHEMA, (Instance(("Home", "friend"), "Answer"),) * 3)
    tree = build_tree(d)
    assert tree.root.label == "Answer" and not tree.root.branches
    assert count_decision_nodes(tree) == 1


def test_empty_and_attributeless_rejected():
    with pytest.raises(DataError):
        build_tree(Dataset(SCHEMA))
    with pytest.raises(DataError):
        build_tree(Dataset(ContextSchema(( ), "y"), (Instance((), "A"),)))


def test_call_tree_reconstruction(call_data):
    tree = build_tree(call_data, LearnerConfig(0.8))
    rows = rule_table(tree)
    assert len(rows) == 7
    assert set(rows) == CALL_TREE_NODES
    assert tree_violations(tree, call_data) == []


def test_forced_leaf_on_exhaustion():
    d = Dataset(SCHEMA, (Instance(("Home", "friend"), "A"),) * 2 + (Instance(("Home", "friend"), "B"),) * 2 + (Instance(("Meeting", "friend"), "B"),))
    tree = build_tree(d, LearnerConfig(0.9))
    home = tree.root.branches["Home"]
    assert home.label is None
    leaf = home.branches["friend"]
    assert leaf.forced and leaf.label == "A" and leaf.confidence == 0.5


def test_max_depth_forces_leaves(meeting):
    tree = build_tree(meeting, LearnerConfig(0.9, max_depth=1))
    assert all(len(n.context_path) <= 1 for n in tree.nodes())
    assert tree.root.branches["Meeting"].forced


def test_unseen_branch_falls_back_to_generalized_ancestor(meeting):
    tree = build_tree(meeting)
    p = predict(tree, ("Meeting", "friend"))
    assert (p.label, p.fallback_used) == ("Decline", False)


# ---------------------------------------------------------------- properties


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10**6), st.sampled_from([0.6, 0.7, 0.8, 0.9, 1.0]), st.sampled_from([0.0, 0.1]))
def test_structural_invariants(seed, threshold, noise):
    data = generate_synthetic(random_planted_spec(seed, noise))
    for policy in ("majority-deviation", ANY_DEVIATION):
        tree = build_tree(data, LearnerConfig(threshold, policy))
        assert tree_violations(tree, data) == []


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=10**6))
def test_threshold_one_any_deviation_fits_training_data(seed):
    data = generate_synthetic(random_planted_spec(seed))
    tree = build_tree(data, LearnerConfig(1.0, ANY_DEVIATION))
    assert all(predict(tree, inst).label == inst.label for inst in data)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=10**6), st.sampled_from([0.0, 0.1]))
def test_threshold_one_rules_equal_traditional_tree(seed, noise):
    data = generate_synthetic(random_planted_spec(seed, noise))
    dt = build_traditional_dt(data)
    for policy in ("majority-deviation", ANY_DEVIATION):
        assert rule_set(build_tree(data, LearnerConfig(1.0, policy))) == rule_set(dt)


def test_build_is_deterministic(call_data):
    assert build_tree(call_data) == build_tree(call_data)
