"""Bayesian-network classifiers with a scikit-learn interface.

``X`` holds integer state codes for the model's non-class variables, in
``model.feature_names`` order (a DataFrame is reordered by column name);
``y`` holds class state codes.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from typing import Mapping, Sequence, TextIO

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .constraints import MAX_EPSILON, generate_constraints
from .data.dataset import DiscreteDataset, check_states
from .estimation import FitConfig, FitReport, count_stats, fit_network, mle_theta
from .exceptions import DataError, DomainError, InferenceError, TrainingError
from .model import CPT, QualitativeModel, star_model


def check_discrete_X(X, model: QualitativeModel) -> np.ndarray:
    """Validate a feature matrix against the model's variable cardinalities."""
    features = model.feature_names
    if hasattr(X, "columns"):
        missing = [f for f in features if f not in X.columns]
        if missing:
            raise DataError(f"missing feature columns {missing}")
        X = X[list(features)]
    X = check_array(X, dtype=None)
    if X.shape[1] != len(features):
        raise DataError(f"expected {len(features)} feature columns {features}, got {X.shape[1]}")
    Xi = X.astype(np.int64)
    if not np.array_equal(Xi, X):
        raise DataError("features must be integer state codes")
    check_states(Xi, [model.cardinality(f) for f in features], features)
    return Xi


def check_discrete_y(y, n_classes: int | None = None) -> np.ndarray:
    y = np.asarray(y).ravel()
    yi = y.astype(np.int64)
    if not np.array_equal(yi, y):
        raise DataError("class labels must be integer state codes")
    if len(yi) and (yi.min() < 0 or (n_classes is not None and yi.max() >= n_classes)):
        raise DataError(f"class labels outside [0, {n_classes})")
    return yi


def log_joint_scores(cpts: Mapping[str, CPT], model: QualitativeModel,
                     X: np.ndarray) -> np.ndarray:
    """Unnormalised log P(class = c, x) restricted to factors that mention the class.

    Factors not involving the class variable are constant across classes
    under full evidence and cancel on normalisation.
    """
    cls = model.class_variable
    n_classes = model.cardinality(cls)
    names = model.names
    full = np.empty((len(X), len(names)), dtype=np.int64)
    for i, name in enumerate(names):
        if name != cls:
            full[:, i] = X[:, model.feature_names.index(name)]
    cls_col = names.index(cls)
    factors = (cls,) + model.children(cls)
    scores = np.zeros((len(X), n_classes))
    with np.errstate(divide="ignore"):
        logs = {f: np.log(cpts[f].table) for f in factors}
    for c in range(n_classes):
        full[:, cls_col] = c
        for f in factors:
            parents = model.parents(f)
            if parents:
                j = model.indexer(f).index_array(full[:, [names.index(p) for p in parents]])
            else:
                j = np.zeros(len(X), dtype=np.int64)
            scores[:, c] += logs[f][j, full[:, names.index(f)]]
    return scores


def _normalise_log(scores: np.ndarray) -> np.ndarray:
    top = scores.max(axis=1, keepdims=True)
    p = np.exp(scores - top)
    return p / p.sum(axis=1, keepdims=True)


class ZeroRClassifier(ClassifierMixin, BaseEstimator):
    """Predicts the most frequent training class; ties go to the lowest index."""

    def __init__(self, n_classes: int | None = None):
        self.n_classes = n_classes

    def fit(self, X, y):
        y = check_discrete_y(y, self.n_classes)
        if not len(y):
            raise TrainingError("ZeroR needs at least one training label")
        n = self.n_classes or int(y.max()) + 1
        self.classes_ = np.arange(n)
        self.mode_ = int(np.argmax(np.bincount(y, minlength=n)))
        self.converged_ = True
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "mode_")
        proba = np.zeros((len(X), len(self.classes_)))
        proba[:, self.mode_] = 1.0
        return proba

    def predict(self, X):
        check_is_fitted(self, "mode_")
        return np.full(len(X), self.mode_, dtype=np.int64)


class _NetworkClassifier(ClassifierMixin, BaseEstimator):
    def _structure(self) -> QualitativeModel:
        return self.model.check()

    def _config(self) -> FitConfig:
        return self.config or FitConfig()

    def _fit_cpts(self, data: DiscreteDataset, model: QualitativeModel):
        stats = count_stats(data, model, self._config().alpha)
        return mle_theta(stats), None

    def fit(self, X, y):
        model = self._structure()
        X = check_discrete_X(X, model)
        y = check_discrete_y(y, model.cardinality(model.class_variable))
        data = DiscreteDataset.from_arrays(model, X, y)
        self.network_ = model
        self.cpts_, self.fit_report_ = self._fit_cpts(data, model)
        self.classes_ = np.arange(model.cardinality(model.class_variable))
        self.n_features_in_ = len(model.feature_names)
        return self

    @property
    def converged_(self) -> bool:
        check_is_fitted(self, "cpts_")
        return self.fit_report_ is None or self.fit_report_.converged

    def predict_log_proba(self, X):
        check_is_fitted(self, "cpts_")
        scores = log_joint_scores(self.cpts_, self.network_, check_discrete_X(X, self.network_))
        return np.log(_normalise_log(scores))

    def predict_proba(self, X):
        check_is_fitted(self, "cpts_")
        scores = log_joint_scores(self.cpts_, self.network_, check_discrete_X(X, self.network_))
        return _normalise_log(scores)

    def predict(self, X):
        check_is_fitted(self, "cpts_")
        scores = log_joint_scores(self.cpts_, self.network_, check_discrete_X(X, self.network_))
        return np.argmax(scores, axis=1).astype(np.int64)


class NaiveBayesClassifier(_NetworkClassifier):
    """Class as the sole parent of every feature; the model's edges are ignored."""

    def __init__(self, model: QualitativeModel, config: FitConfig | None = None):
        self.model = model
        self.config = config

    def _structure(self):
        return star_model(self.model.check())


class KnowledgeBayesClassifier(_NetworkClassifier):
    """Knowledge-based structure, Laplace-corrected maximum likelihood."""

    def __init__(self, model: QualitativeModel, config: FitConfig | None = None):
        self.model = model
        self.config = config


class ConstrainedBayesClassifier(_NetworkClassifier):
    """Knowledge-based structure fitted under monotonicity constraints with margin ``epsilon``."""

    def __init__(self, model: QualitativeModel, epsilon: float = 0.0,
                 config: FitConfig | None = None):
        self.model = model
        self.epsilon = epsilon
        self.config = config

    def _fit_cpts(self, data, model):
        if not 0 <= self.epsilon <= MAX_EPSILON:
            raise DomainError(f"epsilon must lie in [0, {MAX_EPSILON}]")
        return fit_network(data, model, self.epsilon, self._config(),
                           constraints=self._constraints(model))

    def _constraints(self, model):
        # constraint enumeration depends only on structure; cache across refits
        key = (model, self.epsilon)
        cached = getattr(self, "_constraint_cache", None)
        if cached is None or cached[0] != key:
            cached = (key, generate_constraints(model, self.epsilon))
            self._constraint_cache = cached
        return cached[1]


@dataclass(frozen=True)
class ClassifierKind:
    name: str
    epsilon: float = 0.0

    _PATTERN = re.compile(r"^(ZR|NB|KB|CKB)(\d*\.?\d*)$")

    @classmethod
    def parse(cls, label: str) -> "ClassifierKind":
        match = cls._PATTERN.match(label.strip().upper())
        if not match:
            raise DomainError(f"unknown classifier {label!r}")
        name, eps = match.groups()
        if name != "CKB":
            if eps:
                raise DomainError(f"only CKB takes a margin, got {label!r}")
            return cls(name)
        epsilon = float(eps) if eps else 0.0
        if not 0 <= epsilon <= MAX_EPSILON:
            raise DomainError(f"CKB margin must lie in [0, {MAX_EPSILON}]")
        return cls(name, epsilon)

    @property
    def label(self) -> str:
        return f"CKB{self.epsilon:g}" if self.name == "CKB" else self.name


def make_classifier(kind: ClassifierKind | str, model: QualitativeModel,
                    config: FitConfig | None = None):
    kind = ClassifierKind.parse(kind) if isinstance(kind, str) else kind
    if kind.name == "ZR":
        return ZeroRClassifier(n_classes=model.cardinality(model.class_variable))
    if kind.name == "NB":
        return NaiveBayesClassifier(model, config)
    if kind.name == "KB":
        return KnowledgeBayesClassifier(model, config)
    return ConstrainedBayesClassifier(model, kind.epsilon, config)


def train(kind: ClassifierKind | str, data: DiscreteDataset, model: QualitativeModel,
          config: FitConfig | None = None):
    clf = make_classifier(kind, model, config)
    return clf.fit(data.features(model.feature_names), data.y)


def posterior(clf, instance: Mapping[str, int] | Sequence[int]) -> np.ndarray:
    """Class distribution given a full assignment to the non-class variables."""
    if isinstance(clf, ZeroRClassifier):
        return clf.predict_proba([0])[0]
    features = clf.network_.feature_names
    if isinstance(instance, Mapping):
        missing = [f for f in features if f not in instance]
        if missing:
            raise InferenceError(f"instance lacks values for {missing}")
        row = [instance[f] for f in features]
    else:
        row = list(instance)
        if len(row) != len(features):
            raise InferenceError(f"expected {len(features)} values, got {len(row)}")
    return clf.predict_proba(np.array([row], dtype=np.int64))[0]


def evaluate_accuracy(clf, test: DiscreteDataset, model: QualitativeModel | None = None) -> float:
    if not len(test):
        raise DomainError("test set is empty")
    model = model or getattr(clf, "network_", None) or getattr(clf, "model", None)
    X = test.features(model.feature_names) if model is not None else test.values
    return float(np.mean(clf.predict(X) == test.y))


def export_predictions(clf, test: DiscreteDataset, stream: TextIO,
                       model: QualitativeModel | None = None) -> None:
    """CSV rows ``instance_id,true,predicted,p_class1``."""
    model = model or getattr(clf, "network_", None)
    X = test.features(model.feature_names) if model is not None else test.values
    proba = clf.predict_proba(X)
    pred = np.argmax(proba, axis=1)
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["instance_id", "true", "predicted", "p_class1"])
    for i, (t, p, pr) in enumerate(zip(test.y, pred, proba)):
        writer.writerow([i, int(t), int(p), repr(float(pr[1])) if len(pr) > 1 else "0.0"])
