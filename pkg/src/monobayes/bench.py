"""Replicated learning curves and paired significance tests.

Seeds: the test/pool split uses ``SeedSequence(seed, spawn_key=(0,))`` and
the training sample for size ``m``, replication ``r`` uses
``SeedSequence(seed, spawn_key=(1, m, r))``.  Any subset of cells can thus
be recomputed in isolation and yields the same numbers.
"""

from __future__ import annotations

import csv
import itertools
import json
import logging
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy
from scipy.stats import chi2

from .classify import ClassifierKind, make_classifier
from .data.corpus import load_corpus
from .data.dataset import DiscreteDataset
from .data.split import SplitSpec, sample_training_set, stratified_split
from .estimation import FitConfig
from .exceptions import DomainError, SpecError
from .model import QualitativeModel

logger = logging.getLogger(__name__)

ALPHA = 0.05
CRITICAL_VALUE = float(chi2.ppf(1 - ALPHA, df=1))
DEFAULT_CLASSIFIERS = ("ZR", "NB", "KB", "CKB0", "CKB0.1", "CKB0.2")
SEED_SCHEME = ("numpy SeedSequence(seed, spawn_key=(0,)) for the split; "
               "SeedSequence(seed, spawn_key=(1, m, r)) for the training sample of size m, "
               "replication r")


@dataclass(frozen=True)
class ExperimentSpec:
    dataset: str
    bins: int = 2
    classifiers: tuple[str, ...] = DEFAULT_CLASSIFIERS
    sizes: tuple[int, ...] = tuple(range(1, 51))
    replications: int = 50
    seed: int = 0
    test_fraction: float = 1 / 3
    model: str | None = None
    mcnemar_pairs: tuple[tuple[str, str], ...] | None = None
    fit_config: FitConfig = field(default_factory=FitConfig)

    def __post_init__(self):
        object.__setattr__(self, "classifiers",
                           tuple(ClassifierKind.parse(c).label for c in self.classifiers))
        object.__setattr__(self, "sizes", tuple(int(m) for m in self.sizes))
        if self.mcnemar_pairs is not None:
            object.__setattr__(self, "mcnemar_pairs", tuple(
                (ClassifierKind.parse(a).label, ClassifierKind.parse(b).label)
                for a, b in self.mcnemar_pairs))
        if self.replications < 1:
            raise SpecError("replications must be >= 1")
        if any(m < 1 for m in self.sizes):
            raise SpecError("training sizes must be positive")

    @property
    def pairs(self) -> tuple[tuple[str, str], ...]:
        if self.mcnemar_pairs is not None:
            return self.mcnemar_pairs
        return tuple(itertools.combinations(self.classifiers, 2))

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["classifiers"] = list(self.classifiers)
        d["sizes"] = list(self.sizes)
        d["mcnemar_pairs"] = None if self.mcnemar_pairs is None else \
            [list(p) for p in self.mcnemar_pairs]
        d["fit_config"] = self.fit_config.to_dict()
        return d

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentSpec":
        doc = dict(doc)
        unknown = set(doc) - {f.name for f in fields(cls)}
        if unknown:
            raise SpecError(f"unknown spec fields {sorted(unknown)}")
        if "fit_config" in doc:
            doc["fit_config"] = FitConfig(**doc["fit_config"])
        if "sizes" in doc:
            doc["sizes"] = tuple(doc["sizes"])
        if "classifiers" in doc:
            doc["classifiers"] = tuple(doc["classifiers"])
        if doc.get("mcnemar_pairs") is not None:
            doc["mcnemar_pairs"] = tuple(tuple(p) for p in doc["mcnemar_pairs"])
        try:
            return cls(**doc)
        except TypeError as exc:
            raise SpecError(str(exc)) from None


@dataclass
class LearningCurve:
    spec: ExperimentSpec
    pool_size: int
    test_size: int
    accuracies: dict[str, np.ndarray]  # (len(sizes), replications)
    converged: dict[str, np.ndarray]
    correct: dict[str, np.ndarray] = field(repr=False)  # (len(sizes), replications, test_size)

    def mean(self, label: str) -> np.ndarray:
        return self.accuracies[label].mean(axis=1)

    def std(self, label: str) -> np.ndarray:
        acc = self.accuracies[label]
        return acc.std(axis=1, ddof=1) if acc.shape[1] > 1 else np.zeros(acc.shape[0])


def split_seed(seed: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=(0,))


def sample_seed(seed: int, m: int, replication: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=(1, m, replication))


def _run_size(m, spec, pool, test, model, kinds):
    """All replications for one training size; returns per-classifier arrays."""
    X_test = test.features(model.feature_names)
    correct = {k.label: np.zeros((spec.replications, len(test)), dtype=bool) for k in kinds}
    converged = {k.label: np.ones(spec.replications, dtype=bool) for k in kinds}
    classifiers = {k.label: make_classifier(k, model, spec.fit_config) for k in kinds}
    for r in range(spec.replications):
        train = sample_training_set(pool, m, sample_seed(spec.seed, m, r))
        X, y = train.features(model.feature_names), train.y
        for label, clf in classifiers.items():
            clf.fit(X, y)
            correct[label][r] = clf.predict(X_test) == test.y
            converged[label][r] = clf.converged_
    return correct, converged


def run_learning_curve(spec: ExperimentSpec, dataset: DiscreteDataset | None = None,
                       model: QualitativeModel | None = None, n_jobs: int = 1) -> LearningCurve:
    """Train every classifier on identical samples and score on one fixed test set.

    ``dataset``/``model`` override the corpus lookup (e.g. synthetic data).
    """
    if dataset is None or model is None:
        entry = load_corpus(spec.dataset, spec.bins, spec.model)
        dataset, model = entry.dataset, entry.model
    kinds = [ClassifierKind.parse(c) for c in spec.classifiers]
    pool, test = stratified_split(dataset, SplitSpec(spec.test_fraction, split_seed(spec.seed)))
    too_big = [m for m in spec.sizes if m > len(pool)]
    if too_big:
        raise SpecError(f"training sizes {too_big} exceed the pool of {len(pool)} rows")
    if not len(test):
        raise SpecError("test set is empty")

    if n_jobs == 1:
        results = [_run_size(m, spec, pool, test, model, kinds) for m in spec.sizes]
    else:
        from joblib import Parallel, delayed
        results = Parallel(n_jobs=n_jobs)(
            delayed(_run_size)(m, spec, pool, test, model, kinds) for m in spec.sizes)

    labels = [k.label for k in kinds]
    correct = {lb: np.stack([res[0][lb] for res in results]) if results else
               np.zeros((0, spec.replications, len(test)), dtype=bool) for lb in labels}
    converged = {lb: np.stack([res[1][lb] for res in results]) if results else
                 np.zeros((0, spec.replications), dtype=bool) for lb in labels}
    accuracies = {lb: c.mean(axis=2) for lb, c in correct.items()}
    return LearningCurve(spec, len(pool), len(test), accuracies, converged, correct)


@dataclass(frozen=True)
class McNemarOutcome:
    b: int
    c: int
    statistic: float
    p_value: float
    significant: bool
    winner: str | None  # "A", "B" or None


def _mcnemar_counts(b: int, c: int) -> McNemarOutcome:
    if b + c == 0:
        return McNemarOutcome(0, 0, 0.0, 1.0, False, None)
    statistic = (abs(b - c) - 1) ** 2 / (b + c)
    p_value = float(chi2.sf(statistic, df=1))
    significant = statistic > CRITICAL_VALUE
    winner = None
    if significant:
        winner = "A" if b > c else "B"
    return McNemarOutcome(b, c, float(statistic), p_value, significant, winner)


def mcnemar_test(preds_a, preds_b, truth) -> McNemarOutcome:
    """Continuity-corrected McNemar test at the 5% level.

    ``b`` counts instances only A gets right, ``c`` those only B gets right.
    """
    preds_a, preds_b, truth = (np.asarray(v).ravel() for v in (preds_a, preds_b, truth))
    if not len(preds_a) == len(preds_b) == len(truth):
        raise DomainError("prediction vectors differ in length")
    ok_a, ok_b = preds_a == truth, preds_b == truth
    return _mcnemar_counts(int(np.sum(ok_a & ~ok_b)), int(np.sum(~ok_a & ok_b)))


def exact_mcnemar_pvalue(b: int, c: int) -> float:
    """Two-sided exact binomial p-value for the discordant counts."""
    n = b + c
    if n == 0:
        return 1.0
    k = max(b, c)
    tail = sum(math.comb(n, i) for i in range(k, n + 1))
    return min(1.0, 2 * tail / 2 ** n)


@dataclass(frozen=True)
class McNemarResult:
    pair: tuple[str, str]
    m: int
    b: int
    c: int
    wins_a: int
    wins_b: int
    ties: int


def mcnemar_tally(curve: LearningCurve, pairs: Sequence[tuple[str, str]] | None = None
                  ) -> list[McNemarResult]:
    """Per (pair, m): significant wins of each side across replications."""
    pairs = curve.spec.pairs if pairs is None else pairs
    out = []
    for a, b in pairs:
        if a not in curve.correct or b not in curve.correct:
            raise SpecError(f"pair ({a}, {b}) names a classifier that was not run")
        for i, m in enumerate(curve.spec.sizes):
            ca, cb = curve.correct[a][i], curve.correct[b][i]
            wins_a = wins_b = bsum = csum = 0
            for r in range(curve.spec.replications):
                res = _mcnemar_counts(int(np.sum(ca[r] & ~cb[r])), int(np.sum(~ca[r] & cb[r])))
                bsum += res.b
                csum += res.c
                wins_a += res.winner == "A"
                wins_b += res.winner == "B"
            ties = curve.spec.replications - wins_a - wins_b
            out.append(McNemarResult((a, b), m, bsum, csum, wins_a, wins_b, ties))
    return out


def _version() -> str:
    from . import __version__
    return __version__


def emit_reports(curve: LearningCurve, mcnemar: Sequence[McNemarResult],
                 destination: str | Path) -> dict[str, Path]:
    """Write ``curve.csv``, ``mcnemar.csv`` and ``manifest.json`` into ``destination``."""
    dest = Path(destination)
    dest.mkdir(parents=True, exist_ok=True)
    spec = curve.spec
    paths = {"curve": dest / "curve.csv", "mcnemar": dest / "mcnemar.csv",
             "manifest": dest / "manifest.json"}

    with open(paths["curve"], "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["dataset", "bins", "classifier", "m", "mean_acc", "stddev", "n_converged"])
        for label in spec.classifiers:
            mean, std = curve.mean(label), curve.std(label)
            n_conv = curve.converged[label].sum(axis=1)
            for i, m in enumerate(spec.sizes):
                w.writerow([spec.dataset, spec.bins, label, m, f"{mean[i]:.6f}",
                            f"{std[i]:.6f}", int(n_conv[i])])

    with open(paths["mcnemar"], "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["pair", "m", "wins_A", "wins_B", "ties"])
        for res in mcnemar:
            w.writerow([f"{res.pair[0]} vs {res.pair[1]}", res.m, res.wins_a, res.wins_b,
                        res.ties])

    manifest = {
        "spec": spec.to_dict(),
        "seed_scheme": SEED_SCHEME,
        "pool_size": curve.pool_size,
        "test_size": curve.test_size,
        "mcnemar": {"variant": "continuity-corrected chi-square", "alpha": ALPHA,
                    "critical_value": CRITICAL_VALUE},
        "software": {"package": "monobayes", "version": _version(),
                     "numpy": np.__version__, "scipy": scipy.__version__},
    }
    with open(paths["manifest"], "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return paths
