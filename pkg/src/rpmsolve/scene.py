"""Scene inference: per-slot object beliefs -> panel attribute distributions.

Every distribution is exact (no sampling) and kept in log space. Panels with
no object are ruled out and the remaining mass renormalized.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .domain import DEFAULT_DOMAIN, SCALAR_AXES, AttributeDomain, Axis, Rule, ValueSpace
from .errors import DegenerateBeliefError
from .logspace import NEG_INF, logsumexp, safe_log, scatter_logsumexp
from .perception import ObjectBelief

FIELDS = ("position", "number", "type", "size", "color")


@lru_cache(maxsize=None)
def subset_bits(n: int) -> np.ndarray:
    """(2^n - 1, n) membership matrix; row i describes mask i + 1."""
    masks = np.arange(1, 1 << n)
    bits = (masks[:, None] >> np.arange(n)[None, :]) & 1
    bits = bits.astype(bool)
    bits.setflags(write=False)
    return bits


@lru_cache(maxsize=None)
def subset_cardinality(n: int) -> np.ndarray:
    card = subset_bits(n).sum(axis=1)
    card.setflags(write=False)
    return card


def _presence_logs(obj: ObjectBelief):
    p = np.asarray(obj.p_object, dtype=np.float64)
    return safe_log(p), safe_log(1.0 - p)


def _unnormalized_position(obj: ObjectBelief) -> np.ndarray:
    lp, lq = _presence_logs(obj)
    bits = subset_bits(obj.n_slots)
    return np.where(bits, lp[None, :], lq[None, :]).sum(axis=1)


def _normalize_or_raise(logw: np.ndarray, what: str) -> np.ndarray:
    total = logsumexp(logw)
    if total == NEG_INF:
        raise DegenerateBeliefError(f"{what}: no mass on any non-empty panel")
    return logw - total


def infer_position(obj: ObjectBelief) -> np.ndarray:
    """Log P(occupied subset = B) over non-empty B, indexed by mask - 1."""
    return _normalize_or_raise(_unnormalized_position(obj), "position")


def infer_number(obj: ObjectBelief) -> np.ndarray:
    """Log P(Number = k), k = 1..N, summing slot-presence products per count."""
    lp, lq = _presence_logs(obj)
    # dp[k] = log P(k of the slots seen so far are occupied)
    dp = np.full(obj.n_slots + 1, NEG_INF)
    dp[0] = 0.0
    for j in range(obj.n_slots):
        shifted = np.concatenate(([NEG_INF], dp[:-1] + lp[j]))
        dp = np.logaddexp(dp + lq[j], shifted)
    return _normalize_or_raise(dp[1:], "number")


def infer_scalar_axis(obj: ObjectBelief, axis: Axis) -> np.ndarray:
    """Log P(all present objects carry value t, at least one present).

    Equals prod_j[(1-p_j) + p_j q_j(t)] - prod_j(1-p_j); accumulated slot by
    slot without the subtraction so small values keep full precision.
    """
    lp, lq = _presence_logs(obj)
    lq_attr = safe_log(obj.attribute(axis))
    k = lq_attr.shape[1]
    some = np.full(k, NEG_INF)   # >= 1 present so far, all with value t
    none = 0.0                   # nobody present so far
    for j in range(obj.n_slots):
        here = lp[j] + lq_attr[j]
        some = np.logaddexp(some + np.logaddexp(lq[j], here), none + here)
        none = none + lq[j]
    return _normalize_or_raise(some, axis.value)


def number_from_position(position: np.ndarray, n_slots: int) -> np.ndarray:
    """Cardinality pushforward of a log position distribution."""
    return scatter_logsumexp(position, subset_cardinality(n_slots) - 1, n_slots)


def position_from_number(number: np.ndarray, n_slots: int) -> np.ndarray:
    """Spread each cardinality's mass evenly over the subsets of that size."""
    card = subset_cardinality(n_slots)
    counts = np.bincount(card, minlength=n_slots + 1)[1:]
    return number[card - 1] - np.log(counts[card - 1])


@dataclass(frozen=True)
class ComponentBelief:
    """Panel attribute log-distributions of one component."""

    position: np.ndarray
    number: np.ndarray
    type: np.ndarray
    size: np.ndarray
    color: np.ndarray

    @property
    def n_slots(self) -> int:
        return len(self.number)

    def log(self, name: str) -> np.ndarray:
        return getattr(self, name)

    def probs(self, name: str) -> np.ndarray:
        return np.exp(getattr(self, name))

    def for_rule(self, rule: Rule) -> np.ndarray:
        """The distribution a rule reads."""
        if rule.axis is Axis.NUMBER_POSITION:
            return self.position if rule.position_mode else self.number
        return getattr(self, rule.axis.value.lower())

    @property
    def domain(self) -> AttributeDomain:
        """Domain with the cardinalities of this belief (type names are placeholders)."""
        return AttributeDomain(("?",) * len(self.type), len(self.size), len(self.color))

    def space_for(self, rule: Rule) -> ValueSpace:
        return rule.space(self.n_slots, self.domain)

    def to_json(self) -> dict:
        return {name: [float(f"{p:.12g}") for p in self.probs(name)] for name in FIELDS}


@dataclass(frozen=True)
class PanelBelief:
    """Probabilistic scene representation of one panel."""

    components: tuple[ComponentBelief, ...]

    def to_json(self) -> list:
        return [c.to_json() for c in self.components]

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def infer_component(obj: ObjectBelief) -> ComponentBelief:
    position = infer_position(obj)
    return ComponentBelief(
        position=position,
        number=infer_number(obj),
        type=infer_scalar_axis(obj, Axis.TYPE),
        size=infer_scalar_axis(obj, Axis.SIZE),
        color=infer_scalar_axis(obj, Axis.COLOR),
    )


def infer_panel(objects) -> PanelBelief:
    return PanelBelief(tuple(infer_component(o) for o in objects))


def point_mass_component(symbol, n_slots: int, domain: AttributeDomain = DEFAULT_DOMAIN) -> ComponentBelief:
    """Exact belief for a known component symbol."""
    def one_hot(size, index):
        out = np.full(size, NEG_INF)
        out[index] = 0.0
        return out

    return ComponentBelief(
        position=one_hot((1 << n_slots) - 1, symbol.mask - 1),
        number=one_hot(n_slots, symbol.number - 1),
        **{a.value.lower(): one_hot(domain.cardinality(a), symbol.value(a)) for a in SCALAR_AXES},
    )
