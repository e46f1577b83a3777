"""Probabilistic abduction: rule posteriors from the eight context panels.

For a rule ``r`` with forward model ``f`` the unnormalized score is

    row(1..3) * row(4..6) * sum_{(a, b) in pre(r)} P7(a) P8(b)

where ``row`` sums the panel product over every complete row satisfying
``r``. DistributeThree conditions on the shared triple (see ``triples``).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .domain import AXES, Axis, Kind, Rule, catalog_for_axis, transition_table
from .errors import ContractViolation
from .logspace import NEG_INF, logsumexp
from .scene import ComponentBelief
from .triples import TripleEvidence

# context panel indices (0-based) arranged as lines: two complete, one partial
ROW_ORDER = (0, 1, 2, 3, 4, 5, 6, 7)
COLUMN_ORDER = (0, 3, 6, 1, 4, 7, 2, 5)


def line_order(column_mode: bool = False) -> tuple[int, ...]:
    return COLUMN_ORDER if column_mode else ROW_ORDER


@dataclass
class AxisPosterior:
    """Posterior over one axis' catalog for one component."""

    axis: Axis
    rules: tuple[Rule, ...]
    log_scores: np.ndarray
    log_probs: np.ndarray
    line_terms: list = field(repr=False)  # per rule: (3,) log line sums, None for DistributeThree
    warning: str | None = None

    @property
    def probs(self) -> np.ndarray:
        return np.exp(self.log_probs)

    def prob_of(self, rule: Rule) -> float:
        try:
            return float(self.probs[self.rules.index(rule)])
        except ValueError:
            return 0.0

    def argmax(self) -> Rule:
        # np.argmax returns the first maximum, i.e. the lowest catalog index
        return self.rules[int(np.argmax(self.log_probs))]

    def to_dict(self) -> dict[str, float]:
        return {r.name: float(f"{p:.12g}") for r, p in zip(self.rules, self.probs)}


@dataclass
class RulePosterior:
    components: tuple[dict[Axis, AxisPosterior], ...]

    def to_json(self) -> list:
        return [{axis.value: post.to_dict() for axis, post in comp.items()} for comp in self.components]


def _line_logs(beliefs, component: int, rule: Rule, order) -> list[np.ndarray]:
    return [beliefs[i].components[component].for_rule(rule) for i in order]


def triple_evidence(lines: list[np.ndarray]) -> TripleEvidence:
    return TripleEvidence(np.stack([np.stack(lines[0:3]), np.stack(lines[3:6])]))


def score_rule(rule: Rule, lines: list[np.ndarray], space) -> tuple[float, np.ndarray | None]:
    """Unnormalized log score of ``rule`` given eight line-ordered log dists."""
    if rule.kind is Kind.DISTRIBUTE_THREE:
        return triple_evidence(lines).log_score(lines[6], lines[7]), None
    i1, i2, i3 = transition_table(rule, space)
    terms = np.array([
        logsumexp(lines[0][i1] + lines[1][i2] + lines[2][i3]),
        logsumexp(lines[3][i1] + lines[4][i2] + lines[5][i3]),
        logsumexp(lines[6][i1] + lines[7][i2]),
    ])
    if np.any(terms == NEG_INF):
        return NEG_INF, terms
    return float(terms.sum()), terms


def abduce_axis(rule_set, beliefs, axis: Axis, component: int = 0, *,
                column_mode: bool = False) -> AxisPosterior:
    """Posterior over ``rule_set`` for one axis of one component."""
    rule_set = tuple(rule_set)
    if not rule_set:
        raise ContractViolation("rule_set must not be empty")
    if len(beliefs) != 8:
        raise ContractViolation(f"abduction needs 8 context beliefs, got {len(beliefs)}")
    axis = Axis(axis)
    order = line_order(column_mode)
    ref: ComponentBelief = beliefs[0].components[component]
    scores = np.empty(len(rule_set))
    line_terms = []
    for k, rule in enumerate(rule_set):
        if rule.axis is not axis:
            raise ContractViolation(f"rule {rule.name} belongs to {rule.axis.value}, not {axis.value}")
        lines = _line_logs(beliefs, component, rule, order)
        scores[k], terms = score_rule(rule, lines, ref.space_for(rule))
        line_terms.append(terms)
    total = logsumexp(scores)
    warning = None
    if total == NEG_INF:
        warning = f"perception is inconsistent with every {axis.value} rule; falling back to uniform"
        warnings.warn(warning, RuntimeWarning, stacklevel=2)
        log_probs = np.full(len(rule_set), -np.log(len(rule_set)))
    else:
        log_probs = scores - total
    return AxisPosterior(axis, rule_set, scores, log_probs, line_terms, warning)


def abduce(beliefs, config, domain=None, *, column_mode: bool = False) -> RulePosterior:
    """Posteriors for every axis of every component of a configuration."""
    comps = []
    for c, layout in enumerate(config.components):
        ref = beliefs[0].components[c]
        dom = domain or ref.domain
        comps.append({
            axis: abduce_axis(catalog_for_axis(axis, layout, dom), beliefs, axis, c, column_mode=column_mode)
            for axis in AXES
        })
    return RulePosterior(tuple(comps))


def select_rule(posterior: AxisPosterior, mode: str = "argmax", seed=None) -> Rule:
    """Pick a rule: the most probable one (ties -> lowest index) or a seeded draw."""
    if mode == "argmax":
        return posterior.argmax()
    if mode == "sample":
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        p = posterior.probs
        return posterior.rules[int(rng.choice(len(p), p=p / p.sum()))]
    raise ContractViolation(f"unknown selection mode {mode!r}")


def select_rules(posterior: RulePosterior, mode: str = "argmax", seed=None) -> tuple[dict[Axis, Rule], ...]:
    rng = np.random.default_rng(seed) if mode == "sample" else None
    return tuple({axis: select_rule(post, mode, rng) for axis, post in comp.items()}
                 for comp in posterior.components)
