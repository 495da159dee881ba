"""Constrained maximum-likelihood fitting of conditional probability tables.

Rows of a CPT are parameterised by unconstrained logits ``mu`` (softmax per
row).  Dominance constraints enter through a quadratic exterior penalty

    J(mu) = J_L(mu) - w * sum(max(delta, 0) ** 2)

which is maximised by L-BFGS for an increasing sequence of weights ``w``
until the constraints hold within tolerance.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Mapping

import numpy as np
from scipy.optimize import minimize

from .constraints import (
    DEFAULT_FEASIBILITY_TOL,
    ConstraintSet,
    NodeConstraints,
    generate_constraints,
)
from .data.dataset import DiscreteDataset, check_states
from .exceptions import DomainError
from .model import CPT, QualitativeModel

logger = logging.getLogger(__name__)

THETA_FLOOR = 1e-12


@dataclass(frozen=True)
class SufficientStats:
    """Counts plus Dirichlet pseudocounts, one (q, r) table per node."""

    alpha: float
    counts: Mapping[str, np.ndarray]

    def __getitem__(self, node: str) -> np.ndarray:
        return self.counts[node]


@dataclass(frozen=True)
class FitConfig:
    alpha: float = 1.0
    initial_weight: float = 10.0
    escalation: float = 10.0
    failure_bump: float = 1.5
    max_outer: int = 12
    max_failures: int = 20
    gtol: float = 1e-5
    ftol: float = 1e-11
    feasibility_tol: float = DEFAULT_FEASIBILITY_TOL
    max_inner: int = 500
    memory: int = 10

    def __post_init__(self):
        if self.alpha < 0:
            raise DomainError("alpha must be non-negative")
        for name in ("initial_weight", "gtol", "ftol", "feasibility_tol"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if not self.escalation > 1 or not self.failure_bump > 1:
            raise DomainError("escalation and failure_bump must exceed 1")
        if self.max_outer < 1 or self.max_inner < 1 or self.memory < 1 or self.max_failures < 0:
            raise DomainError("iteration limits must be positive")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class NodeFitReport:
    node: str
    n_constraints: int = 0
    outer_iterations: int = 0
    inner_iterations: int = 0
    failures: int = 0
    final_weight: float = 0.0
    max_delta: float = -math.inf
    objective: float = 0.0
    log_likelihood: float = 0.0
    converged: bool = True
    mle_feasible: bool = True
    optimizer: str = ""

    def to_dict(self) -> dict:
        d = asdict(self)
        if not math.isfinite(d["max_delta"]):
            d["max_delta"] = None
        return d


@dataclass
class FitReport:
    nodes: dict[str, NodeFitReport] = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return all(r.converged for r in self.nodes.values())

    @property
    def penalised_nodes(self) -> list[str]:
        return [n for n, r in self.nodes.items() if not r.mle_feasible]

    def to_dict(self) -> dict:
        return {"converged": self.converged,
                "nodes": {n: r.to_dict() for n, r in self.nodes.items()}}


def _data_columns(data, model: QualitativeModel):
    if isinstance(data, DiscreteDataset):
        return data.column
    values = np.asarray(data, dtype=np.int64).reshape(-1, len(model.names))
    check_states(values, [v.cardinality for v in model.variables], model.names)
    names = model.names
    return lambda name: values[:, names.index(name)]


def count_stats(data, model: QualitativeModel, alpha: float = 1.0) -> SufficientStats:
    """Per-node counts ``N[j, k]`` of (parent config j, state k), plus ``alpha``.

    ``data`` is a :class:`DiscreteDataset` or an (n, n_vars) array with
    columns in ``model.names`` order.
    """
    if alpha < 0:
        raise DomainError("alpha must be non-negative")
    column = _data_columns(data, model)
    counts = {}
    for node in model.names:
        indexer = model.indexer(node)
        r = model.cardinality(node)
        parents = model.parents(node)
        x = column(node)
        if parents:
            j = indexer.index_array(np.column_stack([column(p) for p in parents]))
        else:
            j = np.zeros(len(x), dtype=np.int64)
        flat = np.bincount(j * r + x, minlength=indexer.q * r).astype(float)
        counts[node] = flat.reshape(indexer.q, r) + alpha
    return SufficientStats(float(alpha), counts)


def _mle_table(counts: np.ndarray) -> np.ndarray:
    totals = counts.sum(axis=1, keepdims=True)
    if np.any(totals <= 0):
        raise DomainError("a CPT row has zero total count; use a positive pseudocount")
    return counts / totals


def mle_theta(stats: SufficientStats | Mapping[str, np.ndarray]) -> dict[str, CPT]:
    counts = stats.counts if isinstance(stats, SufficientStats) else stats
    return {node: CPT(node, _mle_table(np.asarray(n, dtype=float))) for node, n in counts.items()}


def _row_log_norm(mu: np.ndarray) -> np.ndarray:
    # scipy.special.logsumexp is equivalent but its per-call overhead dominates on tiny tables
    top = mu.max(axis=1, keepdims=True)
    return top + np.log(np.exp(mu - top).sum(axis=1, keepdims=True))


def softmax_rows(mu: np.ndarray) -> np.ndarray:
    mu = np.asarray(mu, dtype=float)
    shifted = mu - mu.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def logit_rows(theta: np.ndarray) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if np.any(theta <= 0):
        raise DomainError("logits need strictly positive probabilities")
    return np.log(theta)


def softmax_theta(mu):
    """Row-wise softmax of a logit table or a dict of them."""
    if isinstance(mu, Mapping):
        return {node: CPT(node, softmax_rows(m)) for node, m in mu.items()}
    return softmax_rows(mu)


def logits_of_theta(theta):
    """Inverse of :func:`softmax_theta` choosing ``mu = ln(theta)``."""
    if isinstance(theta, Mapping):
        return {node: logit_rows(t.table if isinstance(t, CPT) else t)
                for node, t in theta.items()}
    return logit_rows(theta.table if isinstance(theta, CPT) else theta)


def log_likelihood(mu: np.ndarray, counts: np.ndarray) -> float:
    mu = np.asarray(mu, dtype=float)
    log_z = _row_log_norm(mu)
    return float(np.sum(counts * (mu - log_z)))


def gradient_JL(mu: np.ndarray, counts: np.ndarray) -> np.ndarray:
    theta = softmax_rows(mu)
    return counts - theta * counts.sum(axis=1, keepdims=True)


@dataclass(frozen=True)
class PenaltyEvaluation:
    constraints: NodeConstraints
    deltas: np.ndarray
    values: np.ndarray
    gradient: np.ndarray

    @property
    def total(self) -> float:
        return float(self.values.sum())

    def terms(self):
        return list(zip(self.constraints, self.deltas.tolist(), self.values.tolist()))


def cdf_operator(nc: NodeConstraints, q: int, r: int) -> np.ndarray:
    """Dense (n_constraints, q * r) matrix with ``delta = M @ theta.ravel() + margin``."""
    op = np.zeros((len(nc), q, r))
    below = (np.arange(r)[None, :] <= nc.kc[:, None]).astype(float)
    rows = np.arange(len(nc))
    np.add.at(op, (rows, nc.j_hi), below)
    np.add.at(op, (rows, nc.j_lo), -below)
    return op.reshape(len(nc), q * r)


def _penalty(theta: np.ndarray, nc: NodeConstraints, op: np.ndarray | None = None):
    q, r = theta.shape
    if op is None:
        op = cdf_operator(nc, q, r)
    deltas = op @ theta.ravel() + nc.margin
    active = deltas > 0
    values = np.where(active, deltas * deltas, 0.0)
    # gradient in theta, then through the softmax Jacobian; per entry this is
    # sum over terms of 2 delta * theta_jk * (1[k <= kc] - F_j(kc)) with signs
    g = (op.T @ np.where(active, 2.0 * deltas, 0.0)).reshape(q, r)
    grad = theta * (g - np.sum(theta * g, axis=1, keepdims=True))
    return deltas, values, grad


def penalty_terms(mu: np.ndarray, constraints: NodeConstraints) -> PenaltyEvaluation:
    deltas, values, grad = _penalty(softmax_rows(mu), constraints)
    return PenaltyEvaluation(constraints, deltas, values, grad)


def penalized_objective(mu: np.ndarray, counts: np.ndarray, constraints: NodeConstraints,
                        w: float, operator: np.ndarray | None = None
                        ) -> tuple[float, np.ndarray]:
    """Penalised log-likelihood and its gradient with respect to ``mu``.

    ``operator`` is :func:`cdf_operator` for this shape, precomputed by
    callers that evaluate the objective many times.
    """
    if w < 0:
        raise DomainError("penalty weight must be non-negative")
    mu = np.asarray(mu, dtype=float)
    log_z = _row_log_norm(mu)
    theta = np.exp(mu - log_z)
    value = float(np.sum(counts * (mu - log_z)))
    grad = counts - theta * counts.sum(axis=1, keepdims=True)
    if len(constraints) and w > 0:
        _, pen, pen_grad = _penalty(theta, constraints, operator)
        value -= w * float(pen.sum())
        grad = grad - w * pen_grad
    return value, grad


def _max_delta(mu: np.ndarray, nc: NodeConstraints) -> float:
    return float(nc.deltas(softmax_rows(mu)).max())


def _inner_maximise(mu, counts, nc, w, config):
    shape = mu.shape
    op = cdf_operator(nc, *shape)

    def negative(x):
        value, grad = penalized_objective(x.reshape(shape), counts, nc, w, op)
        return -value, -grad.ravel()

    res = minimize(
        negative, mu.ravel(), jac=True, method="L-BFGS-B",
        options={"maxiter": config.max_inner, "maxcor": config.memory,
                 "gtol": config.gtol, "ftol": config.ftol},
    )
    x = res.x.reshape(shape)
    ok = res.status == 0 and np.all(np.isfinite(x)) and np.isfinite(res.fun)
    return x, int(res.nit), bool(ok), str(res.message)


def fit_node(counts: np.ndarray, constraints: NodeConstraints,
             config: FitConfig | None = None) -> tuple[np.ndarray, NodeFitReport]:
    """Constrained maximum-likelihood CPT for one node.

    Starts at the closed-form estimate and returns it if it already satisfies
    every constraint.  Otherwise maximises the penalised objective, raising
    the weight by ``escalation`` while the optimum stays infeasible and by
    ``failure_bump`` when the inner optimiser breaks down.
    """
    config = config or FitConfig()
    counts = np.asarray(counts, dtype=float)
    theta = _mle_table(counts)
    report = NodeFitReport(constraints.node, n_constraints=len(constraints),
                           optimizer=f"L-BFGS-B(m={config.memory}, maxiter={config.max_inner})")
    mu = np.log(np.maximum(theta, THETA_FLOOR))
    report.log_likelihood = report.objective = log_likelihood(mu, counts)
    if not len(constraints):
        return theta, report
    report.max_delta = _max_delta(mu, constraints)
    if report.max_delta <= config.feasibility_tol:
        return theta, report

    report.mle_feasible = False
    w = config.initial_weight
    best = None
    while report.outer_iterations < config.max_outer:
        candidate, nit, ok, message = _inner_maximise(mu, counts, constraints, w, config)
        report.inner_iterations += nit
        if not np.all(np.isfinite(candidate)):
            ok = False
            candidate = mu
        mu = candidate
        max_delta = _max_delta(mu, constraints)
        if best is None or max_delta < best[1]:
            best = (mu, max_delta, w)
        if not ok:
            report.failures += 1
            logger.debug("node %s: inner failure at w=%g (%s)", constraints.node, w, message)
            if report.failures > config.max_failures:
                break
            w *= config.failure_bump
            continue
        report.outer_iterations += 1
        if max_delta <= config.feasibility_tol:
            best = (mu, max_delta, w)
            break
        w *= config.escalation

    mu, max_delta, w = best
    report.final_weight = w
    report.max_delta = max_delta
    report.converged = max_delta <= config.feasibility_tol
    report.log_likelihood = log_likelihood(mu, counts)
    report.objective = penalized_objective(mu, counts, constraints, w)[0]
    if not report.converged:
        logger.warning("node %s did not reach feasibility (max delta %.3g)",
                       constraints.node, max_delta)
    return softmax_rows(mu), report


def fit_network(data, model: QualitativeModel, epsilon: float = 0.0,
                config: FitConfig | None = None,
                constraints: ConstraintSet | None = None) -> tuple[dict[str, CPT], FitReport]:
    """Fit every CPT of ``model``; nodes are independent given the data."""
    config = config or FitConfig()
    if constraints is None:
        constraints = generate_constraints(model, epsilon)
    stats = count_stats(data, model, config.alpha)
    cpts = {}
    report = FitReport()
    for node in model.names:
        table, node_report = fit_node(stats[node], constraints[node], config)
        cpts[node] = CPT(node, table)
        report.nodes[node] = node_report
    return cpts, report


def network_log_likelihood(cpts: Mapping[str, CPT], stats: SufficientStats) -> float:
    """Sum over nodes of ``sum N_jk ln theta_jk``."""
    return float(sum(np.sum(stats[n] * np.log(np.maximum(c.table, 1e-300)))
                     for n, c in cpts.items()))


def cpts_to_dict(cpts: Mapping[str, CPT], model: QualitativeModel) -> dict:
    return {
        node: {"parents": list(model.parents(node)),
               "cardinality": model.cardinality(node),
               "rows": cpts[node].table.tolist()}
        for node in model.names
    }


def cpts_from_dict(doc: Mapping) -> dict[str, CPT]:
    return {node: CPT(node, np.array(entry["rows"], dtype=float)) for node, entry in doc.items()}
