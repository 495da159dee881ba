"""Bayesian-network parameter learning under monotonicity constraints."""

from .classify import (
    ConstrainedBayesClassifier,
    KnowledgeBayesClassifier,
    NaiveBayesClassifier,
    ZeroRClassifier,
    evaluate_accuracy,
    make_classifier,
    posterior,
    train,
)
from .constraints import (
    ConstraintSet,
    DominanceConstraint,
    chain_length,
    fsd_dominates,
    generate_constraints,
    is_feasible,
    violation_delta,
)
from .estimation import (
    FitConfig,
    FitReport,
    count_stats,
    fit_network,
    fit_node,
    mle_theta,
)
from .model import (
    CPT,
    Edge,
    MonotoneSign,
    ParentConfigIndexer,
    QualitativeModel,
    Variable,
    validate_model,
)

__version__ = "0.1.0"

__all__ = [
    "CPT", "ConstrainedBayesClassifier", "ConstraintSet", "DominanceConstraint", "Edge",
    "FitConfig", "FitReport", "KnowledgeBayesClassifier", "MonotoneSign",
    "NaiveBayesClassifier", "ParentConfigIndexer", "QualitativeModel", "Variable",
    "ZeroRClassifier", "chain_length", "count_stats", "evaluate_accuracy", "fit_network",
    "fit_node", "fsd_dominates", "generate_constraints", "is_feasible", "make_classifier",
    "mle_theta", "posterior", "train", "validate_model", "violation_delta",
]
