"""Ground-truth symbolic panel content."""

from __future__ import annotations

from dataclasses import dataclass

from .domain import DEFAULT_DOMAIN, AttributeDomain, Axis, Configuration, mask_of
from .errors import ContractViolation


@dataclass(frozen=True)
class ComponentSymbol:
    """Occupied slots plus the type/size/color shared by every object."""

    occupied: frozenset[int]
    type: int
    size: int
    color: int

    @property
    def number(self) -> int:
        return len(self.occupied)

    @property
    def mask(self) -> int:
        return mask_of(self.occupied)

    def value(self, axis: Axis, position_mode: bool = True):
        if axis is Axis.NUMBER_POSITION:
            return self.occupied if position_mode else self.number
        return getattr(self, axis.value.lower())

    def replace(self, axis: Axis, value) -> "ComponentSymbol":
        if axis is Axis.NUMBER_POSITION:
            return ComponentSymbol(frozenset(value), self.type, self.size, self.color)
        fields = {"type": self.type, "size": self.size, "color": self.color}
        fields[axis.value.lower()] = int(value)
        return ComponentSymbol(self.occupied, **fields)

    def to_json(self) -> dict:
        return {"occupied": sorted(self.occupied), "type": self.type, "size": self.size, "color": self.color}

    @classmethod
    def from_json(cls, data: dict) -> "ComponentSymbol":
        return cls(frozenset(int(s) for s in data["occupied"]), int(data["type"]), int(data["size"]), int(data["color"]))


@dataclass(frozen=True)
class PanelSymbol:
    components: tuple[ComponentSymbol, ...]

    def validate(self, config: Configuration, domain: AttributeDomain = DEFAULT_DOMAIN) -> None:
        if len(self.components) != len(config.components):
            raise ContractViolation(
                f"{config.name} has {len(config.components)} components, panel has {len(self.components)}"
            )
        for comp, layout in zip(self.components, config.components):
            if not comp.occupied:
                raise ContractViolation("a component must hold at least one object")
            if any(not 0 <= s < layout.slot_count for s in comp.occupied):
                raise ContractViolation(f"occupied slot outside 0..{layout.slot_count - 1}")
            for axis in (Axis.TYPE, Axis.SIZE, Axis.COLOR):
                if not 0 <= comp.value(axis) < domain.cardinality(axis):
                    raise ContractViolation(f"{axis.value} value {comp.value(axis)} out of range")

    def to_json(self) -> list:
        return [c.to_json() for c in self.components]

    @classmethod
    def from_json(cls, data: list) -> "PanelSymbol":
        return cls(tuple(ComponentSymbol.from_json(c) for c in data))
