"""Latent-triple marginalization for DistributeThree.

A DistributeThree line is any ordering of one triple ``T`` of distinct values
shared by all three lines. Conditioning on ``T`` restores the per-line
product structure, so the rule score is ``sum_T perm(l1, T) perm(l2, T)
pair(l3, T)`` where ``perm`` sums the three-panel product over the six
orderings of ``T`` and ``pair`` sums the two-panel product over ordered pairs
drawn from ``T``.

Small spaces enumerate triples directly. The 511-outcome position space of a
3x3 grid has ~2.2e7 triples, so there the same sums are rewritten as sums
over ordered distinct index triples and evaluated by inclusion-exclusion in
rescaled linear space.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations
from math import comb

import numpy as np

from .logspace import NEG_INF, logsumexp, safe_log, scatter_logsumexp

EXPLICIT_LIMIT = 50_000

_PERMS = tuple(permutations(range(3)))
_PAIRS = tuple((x, y) for x in range(3) for y in range(3) if x != y)


@lru_cache(maxsize=None)
def explicit_triples(m: int) -> np.ndarray:
    """All index triples a < b < c of an m-outcome space, shape (C(m,3), 3)."""
    idx = np.arange(m)
    a, b, c = np.meshgrid(idx, idx, idx, indexing="ij")
    keep = (a < b) & (b < c)
    out = np.stack([a[keep], b[keep], c[keep]], axis=1)
    out.setflags(write=False)
    return out


def _line_perm(line: np.ndarray, triples: np.ndarray) -> np.ndarray:
    terms = [line[0][triples[:, p[0]]] + line[1][triples[:, p[1]]] + line[2][triples[:, p[2]]] for p in _PERMS]
    return logsumexp(np.stack(terms), axis=0)


def _pair_terms(l7, l8, triples):
    """Per ordered pair: log P7*P8 and the index of the left-over element."""
    vals = np.stack([l7[triples[:, x]] + l8[triples[:, y]] for x, y in _PAIRS])
    rest = np.stack([triples[:, 3 - x - y] for x, y in _PAIRS])
    return vals, rest


def distinct_sum3(g1, g2, g3) -> float:
    """sum over pairwise-distinct (a, b, c) of g1[a] g2[b] g3[c]."""
    s1, s2, s3 = g1.sum(), g2.sum(), g3.sum()
    return (
        s1 * s2 * s3
        - (g1 @ g2) * s3
        - (g1 @ g3) * s2
        - (g2 @ g3) * s1
        + 2.0 * np.sum(g1 * g2 * g3)
    )


def excluded_pair_sum(g1, g2) -> np.ndarray:
    """h[v] = sum over distinct (a, b), both != v, of g1[a] g2[b]."""
    r1 = g1.sum() - g1
    r2 = g2.sum() - g2
    cross = (g1 @ g2) - g1 * g2
    return np.maximum(r1 * r2 - cross, 0.0)


class TripleEvidence:
    """Evidence about the DistributeThree triple from the two complete lines.

    ``lines`` holds the log distributions of the six complete-line panels,
    shape (2, 3, m).
    """

    def __init__(self, lines):
        self.lines = np.asarray(lines, dtype=np.float64)
        if self.lines.ndim != 3 or self.lines.shape[:2] != (2, 3):
            raise ValueError("lines must have shape (2, 3, m)")
        self.m = self.lines.shape[2]
        self.explicit = comb(self.m, 3) <= EXPLICIT_LIMIT

    # -- explicit route -------------------------------------------------
    def log_weights(self) -> tuple[np.ndarray, np.ndarray]:
        """(triples, log w) with w(T) = perm(line1, T) * perm(line2, T)."""
        if not self.explicit:
            raise ValueError(f"{self.m}-outcome space too large for explicit triples")
        triples = explicit_triples(self.m)
        return triples, _line_perm(self.lines[0], triples) + _line_perm(self.lines[1], triples)

    # -- public ---------------------------------------------------------
    def log_total(self) -> float:
        """log sum_T w(T); the normalizer of the triple posterior."""
        if self.explicit:
            return logsumexp(self.log_weights()[1])
        g, shift = self._scaled(self.lines.reshape(6, self.m))
        total = 0.0
        for p in _PERMS:
            f = [g[e] * g[3 + p.index(e)] for e in range(3)]
            total += distinct_sum3(*f)
        return float(safe_log(max(total, 0.0)) + shift)

    def log_score(self, l7, l8) -> float:
        """log sum_T w(T) pair(l7, l8, T): the rule's unnormalized score."""
        l7 = np.asarray(l7, dtype=np.float64)
        l8 = np.asarray(l8, dtype=np.float64)
        if self.explicit:
            triples, logw = self.log_weights()
            vals, _ = _pair_terms(l7, l8, triples)
            return logsumexp(logw + logsumexp(vals, axis=0))
        g, shift = self._scaled(np.vstack([self.lines.reshape(6, self.m), l7, l8]))
        total = 0.0
        for p in _PERMS:
            base = [g[e] * g[3 + p.index(e)] for e in range(3)]
            for x, y in _PAIRS:
                f = list(base)
                f[x] = f[x] * g[6]
                f[y] = f[y] * g[7]
                total += distinct_sum3(*f)
        return float(safe_log(max(total, 0.0)) + shift)

    def log_predict(self, l7, l8) -> np.ndarray:
        """Unnormalized log P(third value = v) summed over triples and pairs."""
        l7 = np.asarray(l7, dtype=np.float64)
        l8 = np.asarray(l8, dtype=np.float64)
        if self.explicit:
            triples, logw = self.log_weights()
            vals, rest = _pair_terms(l7, l8, triples)
            return scatter_logsumexp((vals + logw).ravel(), rest.ravel(), self.m)
        g, shift = self._scaled(np.vstack([self.lines.reshape(6, self.m), l7, l8]))
        out = np.zeros(self.m)
        for p in _PERMS:
            base = [g[e] * g[3 + p.index(e)] for e in range(3)]
            for x, y in _PAIRS:
                z = 3 - x - y
                out += base[z] * excluded_pair_sum(base[x] * g[6], base[y] * g[7])
        return safe_log(out) + shift

    @staticmethod
    def _scaled(logs: np.ndarray) -> tuple[np.ndarray, float]:
        mx = np.max(logs, axis=1, keepdims=True)
        if not np.all(np.isfinite(mx)):
            return np.zeros_like(logs), NEG_INF
        return np.exp(logs - mx), float(mx.sum())
