"""Attribute domains, panel layouts and the symbolic rule catalog.

Every rule acts on one *value space*: a finite, ordered outcome set. Scalar
spaces (number, type, size, color) hold integers; subset spaces (position)
hold non-empty slot subsets encoded as bitmasks, with slot ``i`` at bit ``i``
in row-major order. A distribution over a space is a vector indexed by
outcome index; for scalars ``value = offset + index`` and for subsets
``mask = index + 1``.
"""

from __future__ import annotations

import json
from collections.abc import Set
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import ContractViolation, PreconditionError

CATALOG_VERSION = "1"


class Axis(str, Enum):
    NUMBER_POSITION = "NumberPosition"
    TYPE = "Type"
    SIZE = "Size"
    COLOR = "Color"


AXES = (Axis.NUMBER_POSITION, Axis.TYPE, Axis.SIZE, Axis.COLOR)
SCALAR_AXES = (Axis.TYPE, Axis.SIZE, Axis.COLOR)


class Kind(str, Enum):
    CONSTANT = "Constant"
    PROGRESSION = "Progression"
    ARITHMETIC = "Arithmetic"
    DISTRIBUTE_THREE = "DistributeThree"


# ---------------------------------------------------------------------------
# Domains and layouts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AttributeDomain:
    """Ordered value sets for the scalar object attributes."""

    types: tuple[str, ...] = ("triangle", "square", "pentagon", "hexagon", "circle")
    sizes: int = 6
    colors: int = 10

    def __post_init__(self):
        if not self.types or self.sizes < 1 or self.colors < 1:
            raise ContractViolation("attribute domains must be non-empty")

    def cardinality(self, axis: Axis) -> int:
        if axis is Axis.TYPE:
            return len(self.types)
        if axis is Axis.SIZE:
            return self.sizes
        if axis is Axis.COLOR:
            return self.colors
        raise ContractViolation(f"{axis.value} is not a scalar attribute axis")

    def to_json(self) -> dict:
        return {"types": list(self.types), "sizes": self.sizes, "colors": self.colors}

    @classmethod
    def from_json(cls, data: dict) -> "AttributeDomain":
        try:
            return cls(tuple(str(t) for t in data["types"]), int(data["sizes"]), int(data["colors"]))
        except (KeyError, TypeError) as exc:
            raise ContractViolation(f"bad domain description: {exc}") from None

    @classmethod
    def load(cls, path) -> "AttributeDomain":
        return cls.from_json(json.loads(Path(path).read_text()))


DEFAULT_DOMAIN = AttributeDomain()


@dataclass(frozen=True)
class SlotGeometry:
    center_x: float
    center_y: float
    max_extent: float


@dataclass(frozen=True)
class ComponentLayout:
    slots: tuple[SlotGeometry, ...]
    row_major_order: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.row_major_order:
            object.__setattr__(self, "row_major_order", tuple(range(len(self.slots))))
        if self.slot_count not in (1, 4, 9):
            raise ContractViolation(f"unsupported slot count {self.slot_count}")
        if sorted(self.row_major_order) != list(range(self.slot_count)):
            raise ContractViolation("row_major_order must be a permutation of the slots")

    @property
    def slot_count(self) -> int:
        return len(self.slots)


def _grid(n: int, lo: float = 0.0, hi: float = 1.0) -> ComponentLayout:
    step = (hi - lo) / n
    slots = tuple(
        SlotGeometry(lo + step * (c + 0.5), lo + step * (r + 0.5), step)
        for r in range(n)
        for c in range(n)
    )
    return ComponentLayout(slots)


@dataclass(frozen=True)
class Configuration:
    name: str
    components: tuple[ComponentLayout, ...] = field(repr=False)


CONFIGURATIONS: dict[str, Configuration] = {
    "Center": Configuration("Center", (_grid(1),)),
    "2x2Grid": Configuration("2x2Grid", (_grid(2),)),
    "3x3Grid": Configuration("3x3Grid", (_grid(3),)),
    "L-R": Configuration(
        "L-R",
        (
            ComponentLayout((SlotGeometry(0.25, 0.5, 0.5),)),
            ComponentLayout((SlotGeometry(0.75, 0.5, 0.5),)),
        ),
    ),
    "U-D": Configuration(
        "U-D",
        (
            ComponentLayout((SlotGeometry(0.5, 0.25, 0.5),)),
            ComponentLayout((SlotGeometry(0.5, 0.75, 0.5),)),
        ),
    ),
    "O-IC": Configuration(
        "O-IC",
        (
            ComponentLayout((SlotGeometry(0.5, 0.5, 1.0),)),
            ComponentLayout((SlotGeometry(0.5, 0.5, 0.33),)),
        ),
    ),
    "O-IG": Configuration(
        "O-IG",
        (
            ComponentLayout((SlotGeometry(0.5, 0.5, 1.0),)),
            _grid(2, 0.25, 0.75),
        ),
    ),
}
CONFIG_NAMES = tuple(CONFIGURATIONS)


def get_configuration(name: str) -> Configuration:
    try:
        return CONFIGURATIONS[name]
    except KeyError:
        raise ContractViolation(
            f"unknown configuration {name!r}; expected one of {', '.join(CONFIG_NAMES)}"
        ) from None


# ---------------------------------------------------------------------------
# Value spaces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ValueSpace:
    """A finite ordered outcome set. ``n_slots > 0`` marks a subset space."""

    size: int
    offset: int = 0
    n_slots: int = 0

    @property
    def is_subset(self) -> bool:
        return self.n_slots > 0

    def value(self, index: int) -> int:
        return index + 1 if self.is_subset else self.offset + index

    def index(self, value: int) -> int:
        return value - 1 if self.is_subset else value - self.offset

    def values(self) -> np.ndarray:
        base = 1 if self.is_subset else self.offset
        return np.arange(base, base + self.size, dtype=np.int64)

    def contains(self, value: int) -> bool:
        return 0 <= self.index(value) < self.size


def subset_space(n_slots: int) -> ValueSpace:
    return ValueSpace(size=(1 << n_slots) - 1, n_slots=n_slots)


def number_space(n_slots: int) -> ValueSpace:
    return ValueSpace(size=n_slots, offset=1)


def scalar_space(axis: Axis, domain: AttributeDomain = DEFAULT_DOMAIN) -> ValueSpace:
    return ValueSpace(size=domain.cardinality(axis))


def mask_of(slots) -> int:
    mask = 0
    for s in slots:
        mask |= 1 << int(s)
    return mask


def slots_of(mask: int) -> frozenset[int]:
    return frozenset(i for i in range(mask.bit_length()) if mask >> i & 1)


# ---------------------------------------------------------------------------
# Rules
# ---------------------------------------------------------------------------

_PROGRESSION_STEPS = (1, -1, 2, -2)


@dataclass(frozen=True)
class Rule:
    """One symbolic rule: kind and parameter on a panel attribute axis.

    ``param`` is the step for Progression, +1/-1 (plus/minus) for Arithmetic
    and 0 otherwise. ``position_mode`` selects the slot-subset reading of the
    NumberPosition axis.
    """

    axis: Axis
    kind: Kind
    param: int = 0
    position_mode: bool = False

    def __post_init__(self):
        if self.position_mode and self.axis is not Axis.NUMBER_POSITION:
            raise ContractViolation("position_mode is only valid on the NumberPosition axis")
        if self.kind is Kind.ARITHMETIC:
            if self.axis is Axis.TYPE:
                raise ContractViolation("Arithmetic never governs Type")
            if self.param not in (1, -1):
                raise ContractViolation("Arithmetic param must be +1 or -1")
        elif self.kind is Kind.PROGRESSION:
            if self.param not in _PROGRESSION_STEPS:
                raise ContractViolation("Progression step must be one of +-1, +-2")
        elif self.param != 0:
            raise ContractViolation(f"{self.kind.value} takes no parameter")

    @property
    def name(self) -> str:
        if self.kind is Kind.PROGRESSION:
            base = f"Progression{self.param:+d}"
        elif self.kind is Kind.ARITHMETIC:
            base = "Arithmetic" + ("+" if self.param > 0 else "-")
        else:
            base = self.kind.value
        if self.axis is Axis.NUMBER_POSITION:
            return ("Position:" if self.position_mode else "Number:") + base
        return base

    def space(self, n_slots: int, domain: AttributeDomain = DEFAULT_DOMAIN) -> ValueSpace:
        if self.axis is Axis.NUMBER_POSITION:
            return subset_space(n_slots) if self.position_mode else number_space(n_slots)
        return scalar_space(self.axis, domain)

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "param": self.param, "position_mode": self.position_mode}

    @classmethod
    def from_json(cls, axis: Axis, data: dict) -> "Rule":
        return cls(Axis(axis), Kind(data["kind"]), int(data.get("param", 0)), bool(data.get("position_mode", False)))

    @classmethod
    def from_name(cls, axis: Axis, name: str) -> "Rule":
        position_mode = False
        if axis is Axis.NUMBER_POSITION:
            prefix, _, name = name.partition(":")
            if prefix not in ("Number", "Position"):
                raise ContractViolation(f"NumberPosition rule names need a Number:/Position: prefix, got {prefix!r}")
            position_mode = prefix == "Position"
        if name.startswith("Progression"):
            return cls(axis, Kind.PROGRESSION, int(name[len("Progression"):]), position_mode)
        if name.startswith("Arithmetic"):
            return cls(axis, Kind.ARITHMETIC, 1 if name.endswith("+") else -1, position_mode)
        return cls(axis, Kind(name), 0, position_mode)


def _rotate(mask, step: int, n: int):
    """Cyclic row-major shift of slot bitmasks (works on ints and int arrays)."""
    step %= n
    full = (1 << n) - 1
    if step == 0:
        return mask
    return ((mask << step) | (mask >> (n - step))) & full


def forward_raw(rule: Rule, a: int, b: int, space: ValueSpace) -> int | None:
    """Third value implied by (a, b), or None when (a, b) is outside pre(rule).

    Not defined for DistributeThree, whose image depends on the latent triple.
    """
    kind = rule.kind
    if kind is Kind.CONSTANT:
        return b if a == b else None
    if kind is Kind.DISTRIBUTE_THREE:
        raise ContractViolation("DistributeThree needs a triple context")
    if space.is_subset:
        n = space.n_slots
        if kind is Kind.PROGRESSION:
            if _rotate(a, rule.param, n) != b:
                return None
            return _rotate(b, rule.param, n)
        if rule.param > 0:
            return a | b
        # difference: b must be a non-empty strict subset of a
        if b & ~a or a == b:
            return None
        return a & ~b
    lo, hi = space.offset, space.offset + space.size - 1
    if kind is Kind.PROGRESSION:
        c = b + rule.param
        return c if b == a + rule.param and lo <= c <= hi else None
    # arithmetic on magnitudes (value - lo + 1) so the lowest level is 1
    ma, mb = a - lo + 1, b - lo + 1
    c = (ma + mb if rule.param > 0 else ma - mb) + lo - 1
    return c if lo <= c <= hi else None


@lru_cache(maxsize=None)
def transition_table(rule: Rule, space: ValueSpace) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Outcome indices (i1, i2, i3) of every precondition pair and its image."""
    if rule.kind is Kind.DISTRIBUTE_THREE:
        raise ContractViolation("DistributeThree has no pairwise transition table")
    vals = space.values()
    a, b = np.meshgrid(vals, vals, indexing="ij")
    a, b = a.ravel(), b.ravel()
    if rule.kind is Kind.CONSTANT:
        ok = a == b
        c = b
    elif space.is_subset:
        n = space.n_slots
        if rule.kind is Kind.PROGRESSION:
            ok = _rotate(a, rule.param, n) == b
            c = _rotate(b, rule.param, n)
        elif rule.param > 0:
            ok = np.ones_like(a, dtype=bool)
            c = a | b
        else:
            ok = ((b & ~a) == 0) & (a != b)
            c = a & ~b
    else:
        lo, hi = space.offset, space.offset + space.size - 1
        if rule.kind is Kind.PROGRESSION:
            c = b + rule.param
            ok = (b == a + rule.param) & (c >= lo) & (c <= hi)
        else:
            ma, mb = a - lo + 1, b - lo + 1
            c = (ma + mb if rule.param > 0 else ma - mb) + lo - 1
            ok = (c >= lo) & (c <= hi)
    i1 = space.index(a[ok])
    i2 = space.index(b[ok])
    i3 = space.index(c[ok])
    out = tuple(np.ascontiguousarray(x, dtype=np.intp) for x in (i1, i2, i3))
    for x in out:
        x.setflags(write=False)
    return out


# ---------------------------------------------------------------------------
# Public rule operations over AxisValues (ints or slot sets)
# ---------------------------------------------------------------------------


def _encode(rule: Rule, value, space: ValueSpace) -> int:
    if space.is_subset:
        if not isinstance(value, Set):
            raise ContractViolation(f"{rule.name} expects a slot subset, got {value!r}")
        if not value:
            raise ContractViolation("subset values must be non-empty")
        if any(not 0 <= int(s) < space.n_slots for s in value):
            raise ContractViolation(f"slot index out of range in {set(value)}")
        return mask_of(value)
    if isinstance(value, (Set, bool)) or not isinstance(value, (int, np.integer)):
        raise ContractViolation(f"{rule.name} on {rule.axis.value} expects an integer, got {value!r}")
    if not space.contains(int(value)):
        raise ContractViolation(f"value {value} outside the {rule.axis.value} domain")
    return int(value)


def _decode(value: int, space: ValueSpace):
    return slots_of(value) if space.is_subset else value


def _space(rule: Rule, n_slots: int, domain: AttributeDomain) -> ValueSpace:
    if not 1 <= n_slots <= 9:
        raise ContractViolation("n_slots must lie in 1..9")
    return rule.space(n_slots, domain)


def rule_holds_row(rule: Rule, v1, v2, v3, triple=None, *, n_slots: int = 9,
                   domain: AttributeDomain = DEFAULT_DOMAIN) -> bool:
    """Whether the complete row (v1, v2, v3) satisfies ``rule``."""
    space = _space(rule, n_slots, domain)
    a, b, c = (_encode(rule, v, space) for v in (v1, v2, v3))
    if rule.kind is Kind.DISTRIBUTE_THREE:
        if triple is None:
            raise ContractViolation("DistributeThree needs triple_context")
        t = {_encode(rule, v, space) for v in triple}
        return len({a, b, c}) == 3 and {a, b, c} == t
    if triple is not None:
        raise ContractViolation("triple_context is only meaningful for DistributeThree")
    return forward_raw(rule, a, b, space) == c


def rule_precondition(rule: Rule, v1, v2, triple=None, *, n_slots: int = 9,
                      domain: AttributeDomain = DEFAULT_DOMAIN) -> bool:
    """Whether (v1, v2) lies in the rule's precondition set."""
    space = _space(rule, n_slots, domain)
    a, b = _encode(rule, v1, space), _encode(rule, v2, space)
    if rule.kind is Kind.DISTRIBUTE_THREE:
        if a == b:
            return False
        if triple is None:
            return True
        t = {_encode(rule, v, space) for v in triple}
        return len(t) == 3 and a in t and b in t
    return forward_raw(rule, a, b, space) is not None


def rule_forward(rule: Rule, v1, v2, triple=None, *, n_slots: int = 9,
                 domain: AttributeDomain = DEFAULT_DOMAIN):
    """The unique third value completing the row; raises outside pre(rule)."""
    space = _space(rule, n_slots, domain)
    a, b = _encode(rule, v1, space), _encode(rule, v2, space)
    if rule.kind is Kind.DISTRIBUTE_THREE:
        if triple is None:
            raise ContractViolation("DistributeThree needs triple_context")
        t = {_encode(rule, v, space) for v in triple}
        if len(t) != 3 or a == b or a not in t or b not in t:
            raise PreconditionError(f"{rule.name}: ({v1}, {v2}) not two distinct members of {set(triple)}")
        (c,) = t - {a, b}
        return _decode(c, space)
    c = forward_raw(rule, a, b, space)
    if c is None:
        raise PreconditionError(f"{rule.name} on {rule.axis.value}: ({v1}, {v2}) outside precondition set")
    return _decode(c, space)


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------


def _kinds_for(axis: Axis, position_mode: bool) -> list[Rule]:
    if position_mode:
        return [
            Rule(axis, Kind.CONSTANT, 0, True),
            Rule(axis, Kind.DISTRIBUTE_THREE, 0, True),
            Rule(axis, Kind.ARITHMETIC, 1, True),
            Rule(axis, Kind.ARITHMETIC, -1, True),
            *(Rule(axis, Kind.PROGRESSION, d, True) for d in _PROGRESSION_STEPS),
        ]
    rules = [Rule(axis, Kind.CONSTANT)]
    rules += [Rule(axis, Kind.PROGRESSION, d) for d in _PROGRESSION_STEPS]
    if axis is not Axis.TYPE:
        rules += [Rule(axis, Kind.ARITHMETIC, 1), Rule(axis, Kind.ARITHMETIC, -1)]
    rules.append(Rule(axis, Kind.DISTRIBUTE_THREE))
    return rules


@lru_cache(maxsize=None)
def _catalog(axis: Axis, n_slots: int, domain: AttributeDomain) -> tuple[Rule, ...]:
    candidates = _kinds_for(axis, False)
    if axis is Axis.NUMBER_POSITION:
        candidates += _kinds_for(axis, True)
    seen = set()
    out = []
    for rule in candidates:
        space = rule.space(n_slots, domain)
        if rule.kind is Kind.DISTRIBUTE_THREE:
            if space.size < 3:
                continue
            key = ("D3", space.size, space.is_subset)
        else:
            table = transition_table(rule, space)
            if table[0].size == 0:
                continue
            key = (space.size, tuple(np.concatenate(table).tolist()))
        if key in seen:
            continue
        seen.add(key)
        out.append(rule)
    return tuple(out)


def catalog_for_axis(axis: Axis, layout: ComponentLayout | int,
                     domain: AttributeDomain = DEFAULT_DOMAIN) -> tuple[Rule, ...]:
    """Rules that can govern ``axis`` on a component with this layout.

    Rules that no complete row can satisfy are dropped, and rules whose
    valid rows coincide with an earlier rule's are merged into that rule.
    """
    n_slots = layout if isinstance(layout, int) else layout.slot_count
    if not 1 <= n_slots <= 9:
        raise ContractViolation("n_slots must lie in 1..9")
    return _catalog(Axis(axis), n_slots, domain)


def generative_pool(axis: Axis, layout: ComponentLayout | int,
                    domain: AttributeDomain = DEFAULT_DOMAIN) -> tuple[Rule, ...]:
    """Catalog rules the generator may assign as ground truth.

    Left out are rules whose every realization is explained by another rule
    as well, so they can never be the unique answer to abduction:

    * position-mode Constant, Progression and Arithmetic(-), whose rows also
      satisfy number-mode Constant, Constant and Arithmetic(-);
    * Progressions with a single valid row (e.g. step 2 over five types): both
      complete rows coincide and read as a DistributeThree as well.
    """
    n_slots = layout if isinstance(layout, int) else layout.slot_count
    catalog = catalog_for_axis(axis, layout, domain)
    has_d3 = any(r.kind is Kind.DISTRIBUTE_THREE for r in catalog)
    pool = []
    for r in catalog:
        if r.position_mode and (
            r.kind in (Kind.CONSTANT, Kind.PROGRESSION) or (r.kind is Kind.ARITHMETIC and r.param < 0)
        ):
            continue
        if has_d3 and r.kind is Kind.PROGRESSION and len(transition_table(r, r.space(n_slots, domain))[0]) == 1:
            continue
        pool.append(r)
    return tuple(pool)
