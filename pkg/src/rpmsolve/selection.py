"""Candidate selection by Jensen-Shannon divergence."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain import Axis
from .errors import ContractViolation
from .execution import PredictedScene
from .scene import FIELDS

LN2 = math.log(2.0)


def _kl_to_mixture(p: np.ndarray, m: np.ndarray) -> float:
    nz = p > 0
    return float(np.sum(p[nz] * np.log(p[nz] / m[nz])))


def jsd(p, q) -> float:
    """Jensen-Shannon divergence in nats, clipped to [0, ln 2]."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape or p.ndim != 1:
        raise ContractViolation(f"outcome spaces differ: {p.shape} vs {q.shape}")
    m = 0.5 * (p + q)
    d = 0.5 * (_kl_to_mixture(p, m) + _kl_to_mixture(q, m))
    return min(max(d, 0.0), LN2)


@dataclass
class AnswerReport:
    divergences: np.ndarray
    answer_probs: np.ndarray
    chosen: int
    breakdown: list  # per candidate: list (per component) of {field: jsd}

    def to_json(self) -> dict:
        return {
            "chosen": self.chosen,
            "divergences": [float(f"{d:.12g}") for d in self.divergences],
            "answer_probs": [float(f"{p:.12g}") for p in self.answer_probs],
            "breakdown": [
                [{k: float(f"{v:.12g}") for k, v in comp.items()} for comp in cand]
                for cand in self.breakdown
            ],
        }


def _fields_for(pred: PredictedScene, component: int, executed_only: bool) -> tuple[str, ...]:
    if not executed_only:
        return FIELDS
    rule = pred.rules[component][Axis.NUMBER_POSITION]
    skip = "number" if rule.position_mode else "position"
    return tuple(f for f in FIELDS if f != skip)


def answer_distribution(divergences) -> np.ndarray:
    """Softmax of the negative divergences."""
    d = np.asarray(divergences, dtype=np.float64)
    z = -(d - d.min())
    w = np.exp(z)
    return w / w.sum()


def score_candidates(pred: PredictedScene, candidates, *, executed_only: bool = False) -> AnswerReport:
    """Summed per-attribute divergence of each candidate from the prediction."""
    breakdown = []
    divs = np.empty(len(candidates))
    pred_probs = [{f: c.probs(f) for f in FIELDS} for c in pred.belief.components]
    for i, cand in enumerate(candidates):
        if len(cand.components) != len(pred.belief.components):
            raise ContractViolation("candidate and prediction disagree on component count")
        per_comp = []
        for c, comp in enumerate(cand.components):
            per_comp.append({
                f: jsd(pred_probs[c][f], comp.probs(f)) for f in _fields_for(pred, c, executed_only)
            })
        breakdown.append(per_comp)
        divs[i] = sum(sum(d.values()) for d in per_comp)
    probs = answer_distribution(divs)
    return AnswerReport(divs, probs, int(np.argmin(divs)), breakdown)


def answer_cross_entropy(report: AnswerReport, answer_index: int) -> float:
    p = float(report.answer_probs[answer_index])
    return math.inf if p <= 0 else -math.log(p)
