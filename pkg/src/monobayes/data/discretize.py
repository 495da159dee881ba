"""Equal-frequency discretisation and per-column recoding rules."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ..exceptions import DataError, DomainError
from ..model import Variable
from .dataset import DiscreteDataset
from .tables import RawTable

ALLOWED_BINS = (2, 3, 5)


def equal_frequency_cutpoints(values, bins: int) -> list[float]:
    """Cut points splitting sorted ``values`` into ``bins`` near-equal groups.

    Nominal boundary ``k`` sits before sorted position ``round(k * n / bins)``.
    A boundary falling inside a run of equal values moves to the nearest
    position where neighbours differ (the left one on a tie).  Each cut is
    the midpoint of the two values on either side; boundaries that collapse
    onto the same position yield a single cut.
    """
    x = np.sort(np.asarray(values, dtype=float).ravel())
    n = len(x)
    if n == 0:
        raise DomainError("cannot discretise an empty column")
    if bins < 2:
        raise DomainError("need at least 2 bins")
    breaks = np.flatnonzero(x[1:] != x[:-1]) + 1
    if not len(breaks):
        return []
    positions = []
    for k in range(1, bins):
        p = int(np.floor(k * n / bins + 0.5))
        i = int(np.searchsorted(breaks, p))
        left = breaks[i - 1] if i > 0 else None
        right = breaks[i] if i < len(breaks) else None
        if right is not None and right == p:
            positions.append(p)
        elif left is None:
            positions.append(int(right))
        elif right is None or p - left <= right - p:
            positions.append(int(left))
        else:
            positions.append(int(right))
    return [_midpoint(x[p - 1], x[p]) for p in sorted(set(positions))]


def _midpoint(lo: float, hi: float) -> float:
    mid = lo / 2 + hi / 2
    # adjacent floats have no midpoint; a cut equal to lo still separates them
    return float(mid if lo < mid < hi else lo)


def apply_cutpoints(values, cuts: Sequence[float]) -> np.ndarray:
    """Bin index for each value; a value equal to a cut goes to the lower bin."""
    return np.searchsorted(np.asarray(cuts, dtype=float), np.asarray(values, dtype=float),
                           side="left").astype(np.int64)


class EqualFrequencyDiscretizer(TransformerMixin, BaseEstimator):
    """Per-column equal-frequency binning as a scikit-learn transformer."""

    def __init__(self, bins: int = 3):
        self.bins = bins

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        self.cutpoints_ = [equal_frequency_cutpoints(X[:, i], self.bins)
                           for i in range(X.shape[1])]
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "cutpoints_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise DataError(f"expected {self.n_features_in_} columns, got {X.shape[1]}")
        return np.column_stack([apply_cutpoints(X[:, i], c)
                                for i, c in enumerate(self.cutpoints_)]).astype(np.int64)

    @property
    def cardinalities_(self) -> list[int]:
        return [len(c) + 1 for c in self.cutpoints_]


# Column rules: how one raw column becomes one discrete variable.

@dataclass(frozen=True)
class Numeric:
    """Equal-frequency bins over the column's numeric values."""


@dataclass(frozen=True)
class Ordinal:
    """Categorical labels listed in ascending order."""

    levels: tuple[str, ...]


@dataclass(frozen=True)
class Threshold:
    """Binary: 1 when the numeric value is strictly above ``cut``."""

    cut: float


@dataclass(frozen=True)
class Mapped:
    mapping: Mapping[str, int]
    cardinality: int | None = None


@dataclass(frozen=True)
class ColumnRule:
    source: str
    name: str
    rule: Numeric | Ordinal | Threshold | Mapped


@dataclass(frozen=True)
class Recipe:
    """How to turn a raw table into a discrete dataset."""

    columns: tuple[ColumnRule, ...]
    class_variable: str

    @property
    def sources(self) -> list[str]:
        return [c.source for c in self.columns]


@dataclass
class DiscretizationSpec:
    bins: int
    cutpoints: dict[str, list[float]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"bins": self.bins, "cutpoints": self.cutpoints}


def _floats(cells: list[str], column: str) -> np.ndarray:
    try:
        return np.array([float(c) for c in cells])
    except ValueError as exc:
        raise DataError(f"column {column!r}: {exc}") from None


def discretize(table: RawTable, recipe: Recipe, bins: int,
               cutpoints: Mapping[str, Sequence[float]] | None = None,
               ) -> tuple[DiscreteDataset, DiscretizationSpec]:
    """Recode every column of ``table`` per ``recipe``.

    Numeric columns are binned with cut points computed on this table unless
    ``cutpoints`` supplies them.
    """
    if bins < 2:
        raise DomainError("need at least 2 bins")
    spec = DiscretizationSpec(bins)
    variables, columns = [], []
    for col in recipe.columns:
        cells = table.column(col.source)
        rule = col.rule
        if isinstance(rule, Numeric):
            x = _floats(cells, col.source)
            cuts = list(cutpoints[col.name]) if cutpoints and col.name in cutpoints \
                else equal_frequency_cutpoints(x, bins)
            spec.cutpoints[col.name] = cuts
            codes, card = apply_cutpoints(x, cuts), len(cuts) + 1
        elif isinstance(rule, Ordinal):
            index = {level: i for i, level in enumerate(rule.levels)}
            try:
                codes = np.array([index[c] for c in cells], dtype=np.int64)
            except KeyError as exc:
                raise DataError(f"column {col.source!r}: unknown level {exc.args[0]!r}") from None
            card = len(rule.levels)
        elif isinstance(rule, Threshold):
            codes = (_floats(cells, col.source) > rule.cut).astype(np.int64)
            card = 2
        elif isinstance(rule, Mapped):
            try:
                codes = np.array([rule.mapping[c] for c in cells], dtype=np.int64)
            except KeyError as exc:
                raise DataError(f"column {col.source!r}: unmapped value {exc.args[0]!r}") from None
            card = rule.cardinality or max(rule.mapping.values()) + 1
        else:
            raise DomainError(f"unknown column rule {rule!r}")
        if card < 2:
            raise DataError(f"column {col.source!r} collapses to a single state")
        variables.append(Variable(col.name, int(card)))
        columns.append(codes)
    values = np.column_stack(columns) if columns else np.zeros((len(table), 0), dtype=np.int64)
    return DiscreteDataset(tuple(variables), values, recipe.class_variable), spec


def infer_recipe(table: RawTable, class_column: str) -> Recipe:
    """Generic recipe: numeric columns binned, other columns coded in sorted label order."""
    rules = []
    for name in table.columns:
        cells = [c for c in table.column(name) if c != table.missing]
        try:
            [float(c) for c in cells]
            numeric = True
        except ValueError:
            numeric = False
        if name == class_column:
            levels = sorted(set(cells), key=lambda c: (float(c), c) if numeric else (0, c))
            rules.append(ColumnRule(name, name, Mapped({lv: i for i, lv in enumerate(levels)})))
        elif numeric:
            rules.append(ColumnRule(name, name, Numeric()))
        else:
            rules.append(ColumnRule(name, name, Ordinal(tuple(sorted(set(cells))))))
    return Recipe(tuple(rules), class_column)
