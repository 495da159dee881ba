"""Reference implementations that share no code with the package.

Each oracle solves the same problem by a different route (enumeration,
dynamic programming over a grid, isotonic regression, arbitrary-precision
arithmetic) so agreement is evidence rather than tautology.
"""

from __future__ import annotations

import itertools
import math

import mpmath
import numpy as np
from scipy import stats
from sklearn.isotonic import IsotonicRegression


def mixed_radix(values, cards):
    idx = 0
    for v, c in zip(values, cards):
        idx = idx * c + v
    return idx


def brute_force_constraints(parent_cards, signs, r):
    """Every (hi, lo, kc) between configs one step apart in one annotated parent.

    Enumerates all ordered pairs of full configurations, which is quadratic
    but obviously correct.
    """
    configs = list(itertools.product(*[range(c) for c in parent_cards]))
    out = set()
    for a in configs:
        for b in configs:
            diff = [i for i in range(len(a)) if a[i] != b[i]]
            if len(diff) != 1:
                continue
            p = diff[0]
            if signs[p] == "none" or b[p] - a[p] != 1:
                continue
            ja, jb = mixed_radix(a, parent_cards), mixed_radix(b, parent_cards)
            hi, lo = (jb, ja) if signs[p] == "q+" else (ja, jb)
            out.update((hi, lo, kc) for kc in range(r - 1))
    return out


def grid_fit_binary_chain(counts, margin, step=1e-3):
    """Exhaustive grid maximum of a binary-child likelihood on a Q+ chain.

    ``counts`` is (q, 2). With t_j = P(child = 0 | parent = j), the
    constraints are t_{j+1} <= t_j - margin. Dynamic programming over the
    grid with running prefix maxima visits every feasible grid point
    implicitly.
    """
    counts = np.asarray(counts, dtype=float)
    n = int(round(1 / step))
    t = np.arange(1, n) * step
    gap = int(math.ceil(margin / step - 1e-9))
    ll = counts[:, [0]] * np.log(t) + counts[:, [1]] * np.log1p(-t)
    q = len(counts)
    best = ll[0].copy()
    arg = [None] * q
    for j in range(1, q):
        # suffix maximum over s >= t + gap of best_{j-1}(s)
        suffix = np.maximum.accumulate(best[::-1])[::-1]
        suffix_arg = np.empty(len(t), dtype=int)
        cur = len(t) - 1
        for i in range(len(t) - 1, -1, -1):
            if best[i] >= best[cur]:
                cur = i
            suffix_arg[i] = cur
        shifted = np.full(len(t), -np.inf)
        src = np.arange(len(t)) + gap
        ok = src < len(t)
        shifted[ok] = suffix[src[ok]]
        arg[j] = np.where(ok, suffix_arg[np.minimum(src, len(t) - 1)], -1)
        best = ll[j] + shifted
    idx = [int(np.argmax(best))]
    for j in range(q - 1, 0, -1):
        idx.append(int(arg[j][idx[-1]]))
    t0 = t[idx[::-1]]
    return np.column_stack([t0, 1 - t0])


def pava_binary_chain(counts):
    """Constrained MLE at zero margin via weighted antitonic regression."""
    counts = np.asarray(counts, dtype=float)
    total = counts.sum(axis=1)
    iso = IsotonicRegression(increasing=False)
    t0 = iso.fit_transform(np.arange(len(counts)), counts[:, 0] / total, sample_weight=total)
    return np.column_stack([t0, 1 - t0])


def mp_objective(mu, counts, constraints, w, dps=40):
    """Penalised log-likelihood in arbitrary precision.

    ``constraints`` is an iterable of (hi, lo, kc, margin).
    """
    with mpmath.workdps(dps):
        return _mp_objective(np.asarray(mu, dtype=object), counts, constraints, w)


def mp_gradient(mu, counts, constraints, w, h=1e-15, dps=40):
    """Central finite differences of :func:`mp_objective` at high precision."""
    grad = np.empty_like(mu, dtype=float)
    with mpmath.workdps(dps):
        for j, k in itertools.product(*map(range, mu.shape)):
            up = mu.astype(object).copy()
            dn = mu.astype(object).copy()
            up[j, k] = mpmath.mpf(float(mu[j, k])) + mpmath.mpf(h)
            dn[j, k] = mpmath.mpf(float(mu[j, k])) - mpmath.mpf(h)
            f_up = _mp_objective(up, counts, constraints, w)
            f_dn = _mp_objective(dn, counts, constraints, w)
            grad[j, k] = float((f_up - f_dn) / (2 * mpmath.mpf(h)))
    return grad


def _mp_objective(mu, counts, constraints, w):
    q, r = mu.shape
    theta = []
    value = mpmath.mpf(0)
    for j in range(q):
        row = [mpmath.mpf(x) for x in mu[j]]
        z = mpmath.log(mpmath.fsum(mpmath.exp(x) for x in row))
        theta.append([mpmath.exp(x - z) for x in row])
        value += mpmath.fsum(mpmath.mpf(float(counts[j, k])) * (row[k] - z) for k in range(r))
    for hi, lo, kc, margin in constraints:
        d = (mpmath.fsum(theta[hi][: kc + 1]) - mpmath.fsum(theta[lo][: kc + 1])
             + mpmath.mpf(float(margin)))
        if d > 0:
            value -= mpmath.mpf(float(w)) * d * d
    return value


def enumerate_posterior(tables, parents, cards, cls, evidence):
    """P(cls | evidence) by summing the full joint over every variable.

    ``tables[v]`` is a (q, r) array with mixed-radix rows over
    ``parents[v]``; ``evidence`` maps every non-class variable to a state.
    """
    names = list(cards)
    joint = {}
    for states in itertools.product(*[range(cards[v]) for v in names]):
        a = dict(zip(names, states))
        p = 1.0
        for v in names:
            j = mixed_radix([a[u] for u in parents[v]], [cards[u] for u in parents[v]])
            p *= tables[v][j, a[v]]
        joint[states] = p
    post = np.zeros(cards[cls])
    for states, p in joint.items():
        a = dict(zip(names, states))
        if all(a[v] == s for v, s in evidence.items()):
            post[a[cls]] += p
    return post / post.sum()


def exact_mcnemar_significant(b, c, alpha=0.05):
    if b + c == 0:
        return False
    return stats.binomtest(b, b + c, 0.5).pvalue < alpha
