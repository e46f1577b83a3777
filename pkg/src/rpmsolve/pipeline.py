"""End-to-end inference: perceive -> infer scenes -> abduce -> execute -> select."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .abduction import RulePosterior, abduce, select_rules
from .domain import Axis, Rule
from .execution import PredictedScene, execute_scene
from .generator import PuzzleInstance
from .perception import NoiseModel, corrupt
from .scene import PanelBelief, infer_panel
from .selection import AnswerReport, answer_cross_entropy, score_candidates


@dataclass
class AxisOutcome:
    component: int
    axis: Axis
    truth: Rule
    chosen: Rule
    truth_mass: float
    catalog_size: int

    @property
    def correct(self) -> bool:
        return self.truth == self.chosen

    @property
    def informative(self) -> bool:
        """False when the catalog leaves a single possible rule."""
        return self.catalog_size > 1


@dataclass
class SolveResult:
    instance: PuzzleInstance
    posterior: RulePosterior
    selected: tuple[dict[Axis, Rule], ...]
    prediction: PredictedScene
    report: AnswerReport
    axes: list[AxisOutcome]

    @property
    def chosen(self) -> int:
        return self.report.chosen

    @property
    def correct(self) -> bool:
        return self.report.chosen == self.instance.answer_index

    @property
    def cross_entropy(self) -> float:
        return answer_cross_entropy(self.report, self.instance.answer_index)

    def to_json(self) -> dict:
        return {
            "config": self.instance.config.name,
            "seed": self.instance.seed,
            "answer_index": self.instance.answer_index,
            "chosen": self.chosen,
            "correct": self.correct,
            "cross_entropy": float(f"{self.cross_entropy:.12g}") if math.isfinite(self.cross_entropy) else None,
            "selected_rules": [{a.value: r.name for a, r in comp.items()} for comp in self.selected],
            "report": self.report.to_json(),
        }


def perceive(instance: PuzzleInstance, epsilon: float | NoiseModel = 0.0, seed: int = 0, *,
             jitter: float = 0.0) -> tuple[list[PanelBelief], list[PanelBelief]]:
    """Scene beliefs for the 8 context panels and the 8 candidates."""
    def run(panels, base):
        return [
            infer_panel(corrupt(p, instance.config, epsilon, [seed, base + i], jitter=jitter, domain=instance.domain))
            for i, p in enumerate(panels)
        ]

    return run(instance.context, 0), run(instance.candidates, 8)


def solve(instance: PuzzleInstance, epsilon: float | NoiseModel = 0.0, seed: int = 0, *,
          mode: str = "argmax", column_mode: bool = False, executed_only: bool = False,
          jitter: float = 0.0) -> SolveResult:
    context, candidates = perceive(instance, epsilon, seed, jitter=jitter)
    posterior = abduce(context, instance.config, instance.domain, column_mode=column_mode)
    selected = select_rules(posterior, mode, [seed, 16])
    prediction = execute_scene(selected, context, column_mode=column_mode)
    report = score_candidates(prediction, candidates, executed_only=executed_only)
    axes = [
        AxisOutcome(c, axis, instance.rules[c][axis], comp_sel[axis],
                    posterior.components[c][axis].prob_of(instance.rules[c][axis]),
                    len(posterior.components[c][axis].rules))
        for c, comp_sel in enumerate(selected)
        for axis in comp_sel
    ]
    return SolveResult(instance, posterior, selected, prediction, report, axes)
