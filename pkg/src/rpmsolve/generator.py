"""Procedural RPM instances with bisection-tree distractors.

Each component draws one rule per axis, realizes nine panel values row by row
and keeps the draw only if the ground-truth rule is the *only* catalog rule
consistent with the eight context values. The ninth panel is the answer; the
candidates are the eight leaves of a three-level attribute bisection tree
rooted at it, shuffled.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path

import numpy as np

from .domain import (
    AXES, DEFAULT_DOMAIN, AttributeDomain, Axis, Configuration, Kind, Rule, ValueSpace,
    catalog_for_axis, forward_raw, generative_pool, get_configuration, slots_of,
    transition_table,
)
from .errors import ContractViolation, GenerationError, InstanceFormatError
from .symbols import ComponentSymbol, PanelSymbol

SCHEMA = "rpm-instance/1"
REJECTION_BUDGET = 100


@dataclass(frozen=True)
class PuzzleInstance:
    config: Configuration
    seed: int
    rules: tuple[dict[Axis, Rule], ...]
    context: tuple[PanelSymbol, ...]
    candidates: tuple[PanelSymbol, ...]
    answer_index: int
    domain: AttributeDomain = field(default=DEFAULT_DOMAIN)

    @property
    def answer(self) -> PanelSymbol:
        return self.candidates[self.answer_index]

    @property
    def grid(self) -> tuple[PanelSymbol, ...]:
        """All nine panels row-major, the answer last."""
        return self.context + (self.answer,)

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "config": self.config.name,
            "seed": self.seed,
            "domain": self.domain.to_json(),
            "rules": [{a.value: r.to_json() for a, r in comp.items()} for comp in self.rules],
            "context": [p.to_json() for p in self.context],
            "candidates": [p.to_json() for p in self.candidates],
            "answer_index": self.answer_index,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True) + "\n"

    def save(self, path) -> Path:
        path = Path(path)
        path.write_text(self.dumps())
        return path

    @classmethod
    def from_json(cls, data) -> "PuzzleInstance":
        return _parse_instance(data)

    @classmethod
    def loads(cls, text: str, source: str = "<string>") -> "PuzzleInstance":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InstanceFormatError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
        try:
            return _parse_instance(data)
        except InstanceFormatError as exc:
            raise InstanceFormatError(f"{source}: {exc}") from None

    @classmethod
    def load(cls, path) -> "PuzzleInstance":
        path = Path(path)
        return cls.loads(path.read_text(), str(path))


def _parse_instance(data) -> PuzzleInstance:
    where = "<root>"
    try:
        if not isinstance(data, dict):
            raise InstanceFormatError("top level must be a JSON object")
        if data.get("schema") != SCHEMA:
            raise InstanceFormatError(f"field 'schema': expected {SCHEMA!r}, got {data.get('schema')!r}")
        where = "config"
        config = get_configuration(data["config"])
        where = "domain"
        domain = AttributeDomain.from_json(data["domain"]) if "domain" in data else DEFAULT_DOMAIN
        where = "seed"
        seed = int(data["seed"])
        where = "rules"
        rules = tuple(
            {Axis(k): Rule.from_json(Axis(k), v) for k, v in comp.items()} for comp in data["rules"]
        )
        if len(rules) != len(config.components) or any(set(c) != set(AXES) for c in rules):
            raise InstanceFormatError("field 'rules': need one rule per axis per component")
        panels = {}
        for key, count in (("context", 8), ("candidates", 8)):
            where = key
            raw = data[key]
            if len(raw) != count:
                raise InstanceFormatError(f"field '{key}': expected {count} panels, got {len(raw)}")
            parsed = []
            for i, p in enumerate(raw):
                where = f"{key}[{i}]"
                panel = PanelSymbol.from_json(p)
                panel.validate(config, domain)
                parsed.append(panel)
            panels[key] = tuple(parsed)
        where = "answer_index"
        answer_index = int(data["answer_index"])
        if not 0 <= answer_index < 8:
            raise InstanceFormatError("field 'answer_index': must lie in 0..7")
    except InstanceFormatError:
        raise
    except KeyError as exc:
        raise InstanceFormatError(f"field '{where}': missing key {exc}") from None
    except (TypeError, ValueError, AttributeError) as exc:
        raise InstanceFormatError(f"field '{where}': {exc}") from None
    return PuzzleInstance(config, seed, rules, panels["context"], panels["candidates"], answer_index, domain)


# ---------------------------------------------------------------------------
# Realization
# ---------------------------------------------------------------------------


def _realize(rule: Rule, space: ValueSpace, rng: np.random.Generator) -> list[int]:
    """Nine raw values, row-major, satisfying ``rule`` on every row."""
    if rule.kind is Kind.DISTRIBUTE_THREE:
        triple = rng.choice(space.size, 3, replace=False)
        shift = int(rng.choice((1, 2)))
        idx = [int(triple[(k + r * shift) % 3]) for r in range(3) for k in range(3)]
    else:
        i1, i2, i3 = transition_table(rule, space)
        picks = rng.integers(len(i1), size=3)
        idx = [int(t[p]) for p in picks for t in (i1, i2, i3)]
    return [space.value(i) for i in idx]


def consistent(rule: Rule, values, space: ValueSpace) -> bool:
    """Whether the eight context values (row-major) admit ``rule``."""
    v = list(values)
    if rule.kind is Kind.DISTRIBUTE_THREE:
        triple = set(v[0:3])
        return len(triple) == 3 and set(v[3:6]) == triple and v[6] != v[7] and {v[6], v[7]} <= triple
    for r in (0, 3):
        if forward_raw(rule, v[r], v[r + 1], space) != v[r + 2]:
            return False
    return forward_raw(rule, v[6], v[7], space) is not None


def _view(rule: Rule, masks: list[int]) -> list[int]:
    """NumberPosition values as the rule reads them: masks or cardinalities."""
    return masks if rule.position_mode else [bin(m).count("1") for m in masks]


def _random_subset(n: int, count: int, rng: np.random.Generator) -> int:
    mask = 0
    for s in rng.choice(n, count, replace=False):
        mask |= 1 << int(s)
    return mask


def consistent_rules(axis: Axis, values, n_slots: int, domain: AttributeDomain = DEFAULT_DOMAIN) -> list[Rule]:
    """Every catalog rule the context admits. NumberPosition values are masks."""
    out = []
    for rule in catalog_for_axis(axis, n_slots, domain):
        view = _view(rule, list(values)) if axis is Axis.NUMBER_POSITION else list(values)
        if consistent(rule, view[:8], rule.space(n_slots, domain)):
            out.append(rule)
    return out


def _sample_axis(axis: Axis, n_slots: int, domain: AttributeDomain, rng: np.random.Generator):
    pool = generative_pool(axis, n_slots, domain)
    rule = pool[int(rng.integers(len(pool)))]
    space = rule.space(n_slots, domain)
    for _ in range(REJECTION_BUDGET):
        values = _realize(rule, space, rng)
        if axis is Axis.NUMBER_POSITION and not rule.position_mode:
            values = [_random_subset(n_slots, k, rng) for k in values]
        if consistent_rules(axis, values, n_slots, domain) == [rule]:
            return rule, values
    raise GenerationError(
        f"no unambiguous realization of {rule.name} on {axis.value} "
        f"({n_slots} slots) within {REJECTION_BUDGET} attempts"
    )


# ---------------------------------------------------------------------------
# Distractors
# ---------------------------------------------------------------------------


def _fresh_value(comp: ComponentSymbol, axis: Axis, rule: Rule, n_slots: int,
                 domain: AttributeDomain, rng: np.random.Generator):
    if axis is Axis.NUMBER_POSITION:
        if rule.position_mode:
            full = (1 << n_slots) - 1
            mask = comp.mask
            while mask == comp.mask:
                mask = int(rng.integers(1, full + 1))
            return slots_of(mask)
        counts = [k for k in range(1, n_slots + 1) if k != comp.number]
        return slots_of(_random_subset(n_slots, int(rng.choice(counts)), rng))
    current = comp.value(axis)
    options = [v for v in range(domain.cardinality(axis)) if v != current]
    return int(rng.choice(options))


def make_distractors(answer: PanelSymbol, rules, config: Configuration, seed,
                     domain: AttributeDomain = DEFAULT_DOMAIN) -> list[PanelSymbol]:
    """Eight leaves of a three-level bisection tree; leaf 0 is the answer.

    Level ``l`` replaces one (component, axis) value by a fresh one on half of
    the leaves, so every perturbed value is held by exactly four candidates.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    axes = [
        (c, axis)
        for c, layout in enumerate(config.components)
        for axis in AXES
        if (layout.slot_count > 1 if axis is Axis.NUMBER_POSITION else domain.cardinality(axis) > 1)
    ]
    if len(axes) < 3:
        raise ContractViolation("need at least three perturbable attributes for distractors")
    levels = []
    for pick in rng.choice(len(axes), 3, replace=False):
        c, axis = axes[int(pick)]
        n = config.components[c].slot_count
        levels.append((c, axis, _fresh_value(answer.components[c], axis, rules[c][axis], n, domain, rng)))
    leaves = []
    for bits in product((0, 1), repeat=3):
        comps = list(answer.components)
        for (c, axis, value), bit in zip(levels, bits):
            if bit:
                comps[c] = comps[c].replace(axis, value)
        leaves.append(PanelSymbol(tuple(comps)))
    return leaves


def generate(config: Configuration | str, seed: int, domain: AttributeDomain = DEFAULT_DOMAIN) -> PuzzleInstance:
    """Deterministic instance for (config, seed)."""
    if isinstance(config, str):
        config = get_configuration(config)
    seed = int(seed)
    if seed < 0:
        raise ContractViolation("seed must be non-negative")
    rng = np.random.default_rng(seed)
    rules, grids = [], []
    for layout in config.components:
        comp_rules, comp_values = {}, {}
        for axis in AXES:
            comp_rules[axis], comp_values[axis] = _sample_axis(axis, layout.slot_count, domain, rng)
        rules.append(comp_rules)
        grids.append(comp_values)
    panels = tuple(
        PanelSymbol(tuple(
            ComponentSymbol(
                slots_of(g[Axis.NUMBER_POSITION][i]), g[Axis.TYPE][i], g[Axis.SIZE][i], g[Axis.COLOR][i]
            )
            for g in grids
        ))
        for i in range(9)
    )
    leaves = make_distractors(panels[8], rules, config, rng, domain)
    order = rng.permutation(8)
    candidates = tuple(leaves[int(k)] for k in order)
    answer_index = int(np.flatnonzero(order == 0)[0])
    return PuzzleInstance(config, seed, tuple(rules), panels[:8], candidates, answer_index, domain)


def majority_vote_baseline(candidates) -> int:
    """Context-blind heuristic: the candidate holding the most popular values."""
    counts: dict = {}
    for cand in candidates:
        for c, comp in enumerate(cand.components):
            for key in ((c, "pos", comp.mask), (c, "type", comp.type), (c, "size", comp.size), (c, "color", comp.color)):
                counts[key] = counts.get(key, 0) + 1
    scores = [
        sum(counts[key] for c, comp in enumerate(cand.components)
            for key in ((c, "pos", comp.mask), (c, "type", comp.type), (c, "size", comp.size), (c, "color", comp.color)))
        for cand in candidates
    ]
    return int(np.argmax(scores))
