"""First-order stochastic dominance constraints induced by monotone edges.

A constraint compares the child's cumulative distribution under two parent
configurations that differ by one step of one annotated parent.  With
``hi`` the configuration whose distribution must dominate, the signed
violation is

    delta = F_hi(kc) - F_lo(kc) + eps

and the constraint holds iff ``delta <= 0``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Mapping

import numpy as np

from .exceptions import DomainError
from .model import CPT, MonotoneSign, QualitativeModel, ROW_SUM_TOL

MAX_EPSILON = 0.2
DEFAULT_FEASIBILITY_TOL = 1e-6


@dataclass(frozen=True)
class DominanceConstraint:
    node: str
    j_hi: int
    j_lo: int
    kc: int
    epsilon: float = 0.0


@dataclass(frozen=True)
class Violation:
    node: str
    j_hi: int
    j_lo: int
    kc: int
    delta: float

    def to_dict(self) -> dict:
        return {"node": self.node, "j_hi": self.j_hi, "j_lo": self.j_lo,
                "kc": self.kc, "delta": self.delta}


@dataclass(frozen=True)
class NodeConstraints:
    """All constraints on one node, stored column-wise for vectorised evaluation."""

    node: str
    margin: float
    j_hi: np.ndarray = field(repr=False)
    j_lo: np.ndarray = field(repr=False)
    kc: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.kc)

    def __iter__(self) -> Iterator[DominanceConstraint]:
        for hi, lo, kc in zip(self.j_hi, self.j_lo, self.kc):
            yield DominanceConstraint(self.node, int(hi), int(lo), int(kc), self.margin)

    @classmethod
    def from_constraints(cls, node: str, margin: float, constraints) -> "NodeConstraints":
        arr = np.array([(c.j_hi, c.j_lo, c.kc) for c in constraints], dtype=np.int64)
        arr = arr.reshape(-1, 3)
        return cls(node, float(margin), arr[:, 0], arr[:, 1], arr[:, 2])

    @classmethod
    def empty(cls, node: str) -> "NodeConstraints":
        none = np.zeros(0, dtype=np.int64)
        return cls(node, 0.0, none, none, none)

    def deltas(self, theta: np.ndarray) -> np.ndarray:
        cdf = np.cumsum(theta, axis=1)
        return cdf[self.j_hi, self.kc] - cdf[self.j_lo, self.kc] + self.margin


@dataclass(frozen=True)
class ConstraintSet:
    epsilon: float
    nodes: Mapping[str, NodeConstraints]

    def __getitem__(self, node: str) -> NodeConstraints:
        return self.nodes.get(node) or NodeConstraints.empty(node)

    def __len__(self) -> int:
        return sum(len(c) for c in self.nodes.values())

    def margin(self, node: str) -> float:
        return self[node].margin


def chain_length(model: QualitativeModel, node: str) -> int:
    """Longest chain of adjacent dominance steps across the node's CPT.

    Product of ``cardinality - 1`` over the annotated parents.
    """
    annotated = model.annotated_parents(node)
    if not annotated:
        raise DomainError(f"node {node!r} has no annotated parents")
    return int(np.prod([model.cardinality(p) - 1 for p in annotated]))


def node_constraints(model: QualitativeModel, node: str, epsilon: float) -> NodeConstraints:
    edges = model.parent_edges(node)
    if not any(e.sign.annotated for e in edges):
        return NodeConstraints.empty(node)
    margin = epsilon / chain_length(model, node)
    indexer = model.indexer(node)
    cards = indexer.cardinalities
    strides = indexer.strides
    r = model.cardinality(node)

    out = []
    for pos, edge in enumerate(edges):
        if not edge.sign.annotated:
            continue
        others = [range(c) for i, c in enumerate(cards) if i != pos]
        for context in itertools.product(*others):
            base = sum(int(v) * int(strides[i]) for i, v in
                       zip((i for i in range(len(cards)) if i != pos), context))
            for v in range(cards[pos] - 1):
                j_small = base + v * int(strides[pos])
                j_large = j_small + int(strides[pos])
                if edge.sign is MonotoneSign.ISOTONE:
                    hi, lo = j_large, j_small
                else:
                    hi, lo = j_small, j_large
                for kc in range(r - 1):
                    out.append(DominanceConstraint(node, hi, lo, kc, margin))
    return NodeConstraints.from_constraints(node, margin, out)


def generate_constraints(model: QualitativeModel, global_epsilon: float = 0.0) -> ConstraintSet:
    """Adjacent-step dominance constraints for every node with monotone parents."""
    if global_epsilon < 0:
        raise DomainError("epsilon must be non-negative")
    model.check()
    nodes = {}
    for name in model.names:
        nc = node_constraints(model, name, global_epsilon)
        if len(nc):
            nodes[name] = nc
    return ConstraintSet(float(global_epsilon), nodes)


def _check_row(row: np.ndarray, what: str) -> np.ndarray:
    row = np.asarray(row, dtype=float)
    if row.ndim != 1 or np.any(row < 0) or abs(row.sum() - 1.0) > ROW_SUM_TOL:
        raise DomainError(f"{what} is not a probability vector: {row}")
    return row


def violation_delta(hi_row, lo_row, kc: int, epsilon: float = 0.0) -> float:
    """Signed violation of one dominance inequality; positive means violated."""
    hi_row = _check_row(hi_row, "dominating row")
    lo_row = _check_row(lo_row, "dominated row")
    if len(hi_row) != len(lo_row):
        raise DomainError("rows have different lengths")
    if not 0 <= kc < len(hi_row) - 1:
        raise DomainError(f"kc={kc} outside [0, {len(hi_row) - 1})")
    return float(hi_row[: kc + 1].sum() - lo_row[: kc + 1].sum() + epsilon)


def fsd_dominates(p1, p2, epsilon: float = 0.0, atol: float = 1e-12) -> bool:
    """True iff ``p1`` first-order stochastically dominates ``p2`` with margin."""
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    if p1.shape != p2.shape or p1.ndim != 1:
        raise DomainError("distributions must be 1-D and of equal length")
    f1 = np.cumsum(p1)[:-1]
    f2 = np.cumsum(p2)[:-1]
    return bool(np.all(f1 + epsilon <= f2 + atol))


def _table(cpt) -> np.ndarray:
    return cpt.table if isinstance(cpt, CPT) else np.asarray(cpt, dtype=float)


def node_violations(theta, constraints: NodeConstraints) -> list[Violation]:
    deltas = constraints.deltas(_table(theta))
    return [
        Violation(constraints.node, int(hi), int(lo), int(kc), float(d))
        for hi, lo, kc, d in zip(constraints.j_hi, constraints.j_lo, constraints.kc, deltas)
    ]


def is_feasible(cpts: Mapping[str, CPT | np.ndarray], constraints: ConstraintSet,
                tolerance: float = DEFAULT_FEASIBILITY_TOL) -> tuple[bool, list[Violation]]:
    """Check every constraint; returns the violated ones sorted by descending delta."""
    violated = []
    for node, nc in constraints.nodes.items():
        violated.extend(v for v in node_violations(cpts[node], nc) if v.delta > tolerance)
    violated.sort(key=lambda v: (-v.delta, v.node, v.j_hi, v.j_lo, v.kc))
    return not violated, violated
