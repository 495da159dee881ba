"""Stratified test/pool splitting and training-set subsampling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..exceptions import DomainError
from .dataset import DiscreteDataset


@dataclass(frozen=True)
class SplitSpec:
    test_fraction: float = 1 / 3
    seed: int | np.random.SeedSequence = 0

    def __post_init__(self):
        if not 0 < self.test_fraction < 1:
            raise DomainError("test fraction must lie in (0, 1)")


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def stratified_test_counts(class_counts, fraction: float) -> np.ndarray:
    """Per-class test quotas by largest remainder; they sum to round(n * fraction)."""
    class_counts = np.asarray(class_counts, dtype=np.int64)
    exact = class_counts * fraction
    quota = np.floor(exact).astype(np.int64)
    total = int(np.floor(class_counts.sum() * fraction + 0.5))
    remainder = exact - quota
    # stable sort: equal remainders go to the lower class index first
    for i in np.argsort(-remainder, kind="stable")[: max(total - quota.sum(), 0)]:
        quota[i] += 1
    return quota


def stratified_split(dataset: DiscreteDataset, spec: SplitSpec | None = None
                     ) -> tuple[DiscreteDataset, DiscreteDataset]:
    """Return ``(train_pool, test)`` with class proportions preserved."""
    spec = spec or SplitSpec()
    rng = _rng(spec.seed)
    y = dataset.y
    classes = np.unique(y)
    if len(classes) == 0:
        raise DomainError("cannot split an empty dataset")
    counts = np.array([np.sum(y == c) for c in classes])
    quota = stratified_test_counts(counts, spec.test_fraction)
    test_rows = []
    for c, k in zip(classes, quota):
        members = np.flatnonzero(y == c)
        test_rows.append(rng.permutation(members)[:k])
    test_idx = np.sort(np.concatenate(test_rows))
    pool_idx = np.setdiff1d(np.arange(len(dataset)), test_idx)
    return dataset.subset(pool_idx), dataset.subset(test_idx)


def sample_training_set(pool: DiscreteDataset, m: int, seed) -> DiscreteDataset:
    """Uniform draw of ``m`` rows without replacement."""
    if not 0 <= m <= len(pool):
        raise DomainError(f"cannot draw {m} rows from a pool of {len(pool)}")
    rows = _rng(seed).choice(len(pool), size=m, replace=False)
    return pool.subset(rows)
