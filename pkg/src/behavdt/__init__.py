"""Behavioral decision trees for categorical context data."""

__version__ = "0.1.0"

from .baselines import BaselineModel, build_traditional_dt, build_zero_r
from .dataset import (
    MISSING,
    Attribute,
    ContextSchema,
    Dataset,
    DiscretizationConfig,
    Instance,
    PlantedTreeSpec,
    discretize,
    generate_synthetic,
    load_csv,
    load_planted_spec,
    split_kfold,
)
from .evaluation import compare_models, confidence_sweep, cross_validate, score
from .learner import BehavNode, BehavTree, LearnerConfig, build_tree, node_generalization
from .metrics import ClassDistribution, best_attribute, dominant_behavior, entropy, information_gain
from .model import (
    count_decision_nodes,
    deserialize,
    export_dot,
    export_rules,
    extract_decision_nodes,
    predict,
    serialize,
)
