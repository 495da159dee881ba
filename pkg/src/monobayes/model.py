"""Discrete variables, annotated DAGs and conditional probability tables."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .exceptions import DomainError, ModelError

ROW_SUM_TOL = 1e-9


class MonotoneSign(enum.Enum):
    ISOTONE = "q+"
    ANTITONE = "q-"
    NONE = "none"

    @property
    def annotated(self) -> bool:
        return self is not MonotoneSign.NONE

    @classmethod
    def parse(cls, token: str) -> "MonotoneSign":
        try:
            return cls(token.lower())
        except ValueError:
            raise DomainError(f"unknown monotonicity sign {token!r}") from None


@dataclass(frozen=True)
class Variable:
    name: str
    cardinality: int


@dataclass(frozen=True)
class Edge:
    parent: str
    child: str
    sign: MonotoneSign = MonotoneSign.NONE


@dataclass(frozen=True)
class ParentConfigIndexer:
    """Mixed-radix code for joint parent assignments.

    The last parent varies fastest, so with cardinalities ``(3, 3)`` the
    assignment ``(1, 2)`` has index ``1 * 3 + 2 = 5``.
    """

    cardinalities: tuple[int, ...] = ()

    @cached_property
    def strides(self) -> np.ndarray:
        strides = np.ones(len(self.cardinalities), dtype=np.int64)
        for pos in range(len(self.cardinalities) - 2, -1, -1):
            strides[pos] = strides[pos + 1] * self.cardinalities[pos + 1]
        return strides

    @property
    def q(self) -> int:
        return int(np.prod(self.cardinalities, dtype=np.int64))

    def index(self, values: Sequence[int]) -> int:
        if len(values) != len(self.cardinalities):
            raise DomainError(
                f"expected {len(self.cardinalities)} parent values, got {len(values)}"
            )
        index = 0
        for value, card in zip(values, self.cardinalities):
            if not 0 <= value < card:
                raise DomainError(f"parent value {value} outside [0, {card})")
            index = index * card + int(value)
        return index

    def config(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.q:
            raise DomainError(f"configuration index {index} outside [0, {self.q})")
        values = []
        for card in reversed(self.cardinalities):
            index, value = divmod(index, card)
            values.append(value)
        return tuple(reversed(values))

    def index_array(self, values: np.ndarray) -> np.ndarray:
        """Vectorised :meth:`index` over the rows of an (n, n_parents) array."""
        values = np.asarray(values, dtype=np.int64).reshape(-1, len(self.cardinalities))
        return values @ self.strides if len(self.cardinalities) else np.zeros(
            len(values), dtype=np.int64
        )


def index_config(indexer: ParentConfigIndexer, values: Sequence[int]) -> int:
    return indexer.index(values)


def config_of_index(indexer: ParentConfigIndexer, index: int) -> tuple[int, ...]:
    return indexer.config(index)


@dataclass(frozen=True)
class QualitativeModel:
    """A DAG over discrete variables with signed monotonicity annotations.

    The model can be constructed in an invalid state so that
    :func:`validate_model` is able to report on it; :meth:`check` raises.
    Parents of a node are ordered by the order their edges were declared.
    """

    variables: tuple[Variable, ...]
    edges: tuple[Edge, ...]
    class_variable: str
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "edges", tuple(self.edges))

    @cached_property
    def _by_name(self) -> dict[str, Variable]:
        return {v.name: v for v in self.variables}

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables if v.name != self.class_variable)

    def variable(self, name: str) -> Variable:
        try:
            return self._by_name[name]
        except KeyError:
            raise DomainError(f"undeclared variable {name!r}") from None

    def cardinality(self, name: str) -> int:
        return self.variable(name).cardinality

    def parents(self, node: str) -> tuple[str, ...]:
        return tuple(e.parent for e in self.edges if e.child == node)

    def children(self, node: str) -> tuple[str, ...]:
        return tuple(e.child for e in self.edges if e.parent == node)

    def parent_edges(self, node: str) -> tuple[Edge, ...]:
        return tuple(e for e in self.edges if e.child == node)

    def annotated_parents(self, node: str) -> tuple[str, ...]:
        return tuple(e.parent for e in self.parent_edges(node) if e.sign.annotated)

    def indexer(self, node: str) -> ParentConfigIndexer:
        return ParentConfigIndexer(tuple(self.cardinality(p) for p in self.parents(node)))

    def topological_order(self) -> list[str]:
        """Kahn's algorithm, ties broken by declaration order."""
        indegree = {name: 0 for name in self.names}
        for e in self.edges:
            indegree[e.child] += 1
        order = []
        ready = [n for n in self.names if indegree[n] == 0]
        while ready:
            node = ready.pop(0)
            order.append(node)
            for child in self.children(node):
                indegree[child] -= 1
                if indegree[child] == 0:
                    ready.append(child)
        if len(order) != len(self.names):
            raise ModelError(["graph contains a directed cycle"])
        return order

    def check(self) -> "QualitativeModel":
        report = validate_model(self)
        if not report.ok:
            raise ModelError(report.violations)
        return self

    def with_cardinalities(self, cardinalities: dict[str, int]) -> "QualitativeModel":
        variables = tuple(
            Variable(v.name, cardinalities.get(v.name, v.cardinality)) for v in self.variables
        )
        return QualitativeModel(variables, self.edges, self.class_variable, self.name)


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate_model(model: QualitativeModel) -> ValidationReport:
    """Collect every structural problem with ``model`` instead of raising."""
    problems = []
    seen = set()
    for v in model.variables:
        if v.name in seen:
            problems.append(f"duplicate variable {v.name!r}")
        seen.add(v.name)
        if not isinstance(v.cardinality, (int, np.integer)) or v.cardinality < 2:
            problems.append(f"variable {v.name!r} has cardinality {v.cardinality!r} < 2")
    if model.class_variable not in seen:
        problems.append(f"class variable {model.class_variable!r} is not declared")

    pairs = set()
    for e in model.edges:
        for end in (e.parent, e.child):
            if end not in seen:
                problems.append(f"edge {e.parent} -> {e.child} names undeclared variable {end!r}")
        if e.parent == e.child:
            problems.append(f"self-loop on {e.parent!r}")
        if (e.parent, e.child) in pairs:
            problems.append(f"duplicate edge {e.parent} -> {e.child}")
        pairs.add((e.parent, e.child))

    adjacency: dict[str, list[str]] = {n: [] for n in seen}
    for e in model.edges:
        if e.parent in adjacency and e.child in adjacency and e.parent != e.child:
            adjacency[e.parent].append(e.child)
    cycle = _find_cycle(adjacency)
    if cycle:
        problems.append("directed cycle " + " -> ".join(cycle))
    return ValidationReport(tuple(problems))


def _find_cycle(adjacency: dict[str, list[str]]) -> list[str] | None:
    WHITE, GREY, BLACK = 0, 1, 2
    colour = {n: WHITE for n in adjacency}
    stack: list[str] = []

    def visit(node):
        colour[node] = GREY
        stack.append(node)
        for nxt in adjacency[node]:
            if colour[nxt] == GREY:
                return stack[stack.index(nxt):] + [nxt]
            if colour[nxt] == WHITE:
                found = visit(nxt)
                if found:
                    return found
        stack.pop()
        colour[node] = BLACK
        return None

    for node in sorted(adjacency):
        if colour[node] == WHITE:
            found = visit(node)
            if found:
                return found
    return None


def star_model(model: QualitativeModel) -> QualitativeModel:
    """Naive Bayes structure over the variables of ``model``: class -> every feature."""
    edges = tuple(Edge(model.class_variable, f) for f in model.feature_names)
    return QualitativeModel(model.variables, edges, model.class_variable, model.name + "-nb")


@dataclass(frozen=True)
class CPT:
    """Conditional probability table; row ``j`` is P(node | parent config j)."""

    node: str
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        table = np.array(self.table, dtype=float)
        if table.ndim != 2 or table.shape[1] < 2:
            raise DomainError(f"CPT for {self.node!r} must be a 2-D table with >= 2 columns")
        if np.any(table < 0) or np.any(np.abs(table.sum(axis=1) - 1.0) > ROW_SUM_TOL):
            raise DomainError(f"CPT rows for {self.node!r} are not probability vectors")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    @property
    def rows(self) -> np.ndarray:
        return self.table

    @property
    def q(self) -> int:
        return self.table.shape[0]

    @property
    def r(self) -> int:
        return self.table.shape[1]


def cpt_set(tables: dict[str, np.ndarray] | Iterable[CPT]) -> dict[str, CPT]:
    if isinstance(tables, dict):
        return {name: t if isinstance(t, CPT) else CPT(name, t) for name, t in tables.items()}
    return {c.node: c for c in tables}
