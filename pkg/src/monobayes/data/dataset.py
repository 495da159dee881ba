"""Fully observed discrete datasets."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Sequence, TextIO

import numpy as np

from ..exceptions import DataError, ParseError
from ..model import QualitativeModel, Variable


@dataclass(frozen=True)
class DiscreteDataset:
    """Rows of state indices; column ``i`` belongs to ``variables[i]``."""

    variables: tuple[Variable, ...]
    values: np.ndarray = field(repr=False)
    class_variable: str

    def __post_init__(self):
        variables = tuple(self.variables)
        values = np.asarray(self.values, dtype=np.int64)
        if values.ndim == 1 and values.size == 0:
            values = values.reshape(0, len(variables))
        if values.ndim != 2 or values.shape[1] != len(variables):
            raise DataError(
                f"values must be (n, {len(variables)}), got shape {values.shape}"
            )
        check_states(values, [v.cardinality for v in variables], [v.name for v in variables])
        values.setflags(write=False)
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "values", values)
        if self.class_variable not in self.names:
            raise DataError(f"class column {self.class_variable!r} missing")

    def __len__(self) -> int:
        return self.values.shape[0]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @property
    def cardinalities(self) -> dict[str, int]:
        return {v.name: v.cardinality for v in self.variables}

    def column_index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise DataError(f"dataset has no column {name!r}") from None

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.column_index(name)]

    def columns(self, names: Sequence[str]) -> np.ndarray:
        return self.values[:, [self.column_index(n) for n in names]]

    @property
    def y(self) -> np.ndarray:
        return self.column(self.class_variable)

    def features(self, names: Sequence[str]) -> np.ndarray:
        return self.columns(names)

    def subset(self, rows) -> "DiscreteDataset":
        return DiscreteDataset(self.variables, self.values[np.asarray(rows, dtype=np.int64)],
                               self.class_variable)

    def to_csv(self, stream: TextIO) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(self.names)
        writer.writerows(self.values.tolist())

    @classmethod
    def from_csv(cls, stream: TextIO, model: QualitativeModel) -> "DiscreteDataset":
        """Read integer-coded rows whose header names the model's variables."""
        reader = csv.reader(stream)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError("empty dataset file", line=1) from None
        missing = [n for n in model.names if n not in header]
        if missing:
            raise DataError(f"dataset lacks columns for model variables {missing}")
        cols = [header.index(n) for n in model.names]
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(f"expected {len(header)} cells, got {len(row)}", line=lineno)
            try:
                rows.append([int(row[c]) for c in cols])
            except ValueError:
                raise ParseError("non-integer state code", line=lineno) from None
        return cls(model.variables, np.array(rows, dtype=np.int64).reshape(-1, len(cols)),
                   model.class_variable)

    @classmethod
    def from_arrays(cls, model: QualitativeModel, X, y) -> "DiscreteDataset":
        """Assemble from feature columns in ``model.feature_names`` order plus labels."""
        X = np.asarray(X, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64).ravel()
        features = model.feature_names
        if X.ndim != 2 or X.shape[1] != len(features):
            raise DataError(f"X must have {len(features)} columns {features}, got {X.shape}")
        if len(X) != len(y):
            raise DataError("X and y have different lengths")
        values = np.empty((len(y), len(model.names)), dtype=np.int64)
        for i, name in enumerate(model.names):
            values[:, i] = y if name == model.class_variable else X[:, features.index(name)]
        return cls(model.variables, values, model.class_variable)

    def matches(self, model: QualitativeModel) -> bool:
        return all(self.cardinalities.get(v.name) == v.cardinality for v in model.variables)

    def __str__(self) -> str:
        buf = io.StringIO()
        self.to_csv(buf)
        return buf.getvalue()


def check_states(values: np.ndarray, cardinalities: Sequence[int], names: Sequence[str]) -> None:
    """Raise :class:`DataError` naming the first out-of-range cell."""
    if values.size == 0:
        return
    cards = np.asarray(cardinalities)
    bad = (values < 0) | (values >= cards[None, :])
    if bad.any():
        row, col = map(int, np.argwhere(bad)[0])
        raise DataError(
            f"row {row}, column {names[col]!r}: state {values[row, col]} outside "
            f"[0, {cards[col]})"
        )
