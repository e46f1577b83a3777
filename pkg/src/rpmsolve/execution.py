"""Probabilistic execution: push the partial line through a rule's forward model.

P(third = v) is proportional to the mass of every precondition pair whose
image is ``v``; the normalizer is that total precondition mass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .abduction import line_order, triple_evidence
from .domain import AXES, Axis, Kind, Rule, ValueSpace, transition_table
from .errors import ContractViolation, ExecutionInfeasibleError
from .logspace import NEG_INF, logsumexp, scatter_logsumexp
from .scene import ComponentBelief, PanelBelief, number_from_position, position_from_number
from .triples import TripleEvidence


def execute_axis(rule: Rule, b7, b8, space: ValueSpace,
                 triples: TripleEvidence | None = None) -> tuple[np.ndarray, float]:
    """Predicted log distribution of the missing value and the precondition mass.

    ``triples`` carries the complete-line evidence DistributeThree needs.
    """
    b7 = np.asarray(b7, dtype=np.float64)
    b8 = np.asarray(b8, dtype=np.float64)
    if b7.shape != (space.size,) or b8.shape != (space.size,):
        raise ContractViolation(f"distributions must have {space.size} outcomes for {rule.name}")
    if rule.kind is Kind.DISTRIBUTE_THREE:
        if triples is None:
            raise ContractViolation("DistributeThree execution needs triple evidence")
        unnorm = triples.log_predict(b7, b8)
        total = logsumexp(unnorm)
        log_mass = total - triples.log_total() if total > NEG_INF else NEG_INF
    else:
        if triples is not None:
            raise ContractViolation("triple evidence only applies to DistributeThree")
        i1, i2, i3 = transition_table(rule, space)
        unnorm = scatter_logsumexp(b7[i1] + b8[i2], i3, space.size)
        total = log_mass = logsumexp(unnorm)
    if total == NEG_INF:
        raise ExecutionInfeasibleError(rule)
    return unnorm - total, float(np.exp(min(log_mass, 0.0)))


@dataclass(frozen=True)
class PredictedScene:
    """The executed answer representation with its provenance."""

    belief: PanelBelief
    rules: tuple[dict[Axis, Rule], ...]
    precondition_mass: tuple[dict[Axis, float], ...]

    def to_json(self) -> list:
        out = []
        for comp, rules, mass in zip(self.belief.components, self.rules, self.precondition_mass):
            entry = comp.to_json()
            entry["rules"] = {a.value: r.name for a, r in rules.items()}
            entry["precondition_mass"] = {a.value: float(f"{m:.12g}") for a, m in mass.items()}
            out.append(entry)
        return out


def execute_component(rules: dict[Axis, Rule], beliefs, component: int, *,
                      column_mode: bool = False) -> tuple[ComponentBelief, dict[Axis, float]]:
    order = line_order(column_mode)
    ref = beliefs[0].components[component]
    fields = {}
    mass = {}
    for axis in AXES:
        rule = rules[axis]
        if rule.axis is not axis:
            raise ContractViolation(f"rule {rule.name} filed under {axis.value}")
        lines = [beliefs[i].components[component].for_rule(rule) for i in order]
        triples = triple_evidence(lines) if rule.kind is Kind.DISTRIBUTE_THREE else None
        try:
            dist, mass[axis] = execute_axis(rule, lines[6], lines[7], ref.space_for(rule), triples)
        except ExecutionInfeasibleError as exc:
            raise ExecutionInfeasibleError(rule, f"component {component}") from exc
        if axis is Axis.NUMBER_POSITION:
            if rule.position_mode:
                fields["position"] = dist
                fields["number"] = number_from_position(dist, ref.n_slots)
            else:
                fields["number"] = dist
                fields["position"] = position_from_number(dist, ref.n_slots)
        else:
            fields[axis.value.lower()] = dist
    return ComponentBelief(**fields), mass


def execute_scene(rules, beliefs, *, column_mode: bool = False) -> PredictedScene:
    """Execute one rule per axis per component on panels 7-8 (or 3, 6 by column)."""
    if len(beliefs) != 8:
        raise ContractViolation(f"execution needs 8 context beliefs, got {len(beliefs)}")
    comps, masses = [], []
    for c, comp_rules in enumerate(rules):
        belief, mass = execute_component(comp_rules, beliefs, c, column_mode=column_mode)
        comps.append(belief)
        masses.append(mass)
    return PredictedScene(PanelBelief(tuple(comps)), tuple(rules), tuple(masses))
