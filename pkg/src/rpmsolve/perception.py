"""Perception simulator standing in for the object CNN.

Each slot gets an objectiveness probability and type/size/color distributions
conditioned on an object being present. Under the symmetric model the true
outcome keeps mass ``1 - eps`` and ``eps`` is spread evenly over the rest.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .domain import DEFAULT_DOMAIN, SCALAR_AXES, AttributeDomain, Axis, Configuration
from .errors import ContractViolation
from .symbols import PanelSymbol


@dataclass(frozen=True)
class ObjectBelief:
    """Per-slot object attribute distributions for one component (linear space)."""

    p_object: np.ndarray  # (N,)
    type: np.ndarray      # (N, K_type)
    size: np.ndarray      # (N, K_size)
    color: np.ndarray     # (N, K_color)

    @property
    def n_slots(self) -> int:
        return len(self.p_object)

    def attribute(self, axis: Axis) -> np.ndarray:
        return getattr(self, axis.value.lower())

    def validate(self, tol: float = 1e-9) -> None:
        p = np.asarray(self.p_object)
        if p.ndim != 1 or p.size < 1 or np.any(p < 0) or np.any(p > 1):
            raise ContractViolation("p_object must be a non-empty vector in [0, 1]")
        for axis in SCALAR_AXES:
            q = self.attribute(axis)
            if q.ndim != 2 or q.shape[0] != p.size:
                raise ContractViolation(f"{axis.value} distribution must have one row per slot")
            if np.any(q < 0) or np.any(np.abs(q.sum(axis=1) - 1.0) > tol):
                raise ContractViolation(f"{axis.value} rows must be probability vectors")


def _check_eps(eps: float) -> float:
    eps = float(eps)
    if not 0.0 <= eps <= 1.0:
        raise ContractViolation(f"epsilon must lie in [0, 1], got {eps}")
    return eps


def symmetric_noise(true_index: int, k: int, eps: float) -> np.ndarray:
    """Mass 1-eps on the true outcome, eps/(k-1) on each other one."""
    eps = _check_eps(eps)
    if k == 1:
        return np.ones(1)
    out = np.full(k, eps / (k - 1))
    out[true_index] = 1.0 - eps
    return out


@dataclass(frozen=True)
class NoiseModel:
    """Per-attribute noise: a symmetric epsilon or a row-stochastic confusion matrix.

    ``objectiveness`` is the epsilon of the presence channel.
    """

    objectiveness: float = 0.0
    type: float | np.ndarray = 0.0
    size: float | np.ndarray = 0.0
    color: float | np.ndarray = 0.0

    @classmethod
    def symmetric(cls, eps: float) -> "NoiseModel":
        eps = _check_eps(eps)
        return cls(eps, eps, eps, eps)

    @classmethod
    def from_json(cls, data: dict, domain: AttributeDomain = DEFAULT_DOMAIN) -> "NoiseModel":
        fields = {"objectiveness": _check_eps(data.get("objectiveness", 0.0))}
        for axis in SCALAR_AXES:
            key = axis.value.lower()
            raw = data.get(key, 0.0)
            if isinstance(raw, (int, float)):
                fields[key] = _check_eps(raw)
                continue
            mat = np.asarray(raw, dtype=np.float64)
            k = domain.cardinality(axis)
            if mat.shape != (k, k) or np.any(mat < 0) or np.any(np.abs(mat.sum(axis=1) - 1) > 1e-9):
                raise ContractViolation(f"{key} confusion matrix must be {k}x{k} row-stochastic")
            fields[key] = mat
        return cls(**fields)

    @classmethod
    def load(cls, path, domain: AttributeDomain = DEFAULT_DOMAIN) -> "NoiseModel":
        return cls.from_json(json.loads(Path(path).read_text()), domain)

    def attribute_row(self, axis: Axis, true_index: int, k: int, eps_scale: float | None = None) -> np.ndarray:
        setting = getattr(self, axis.value.lower())
        if isinstance(setting, np.ndarray):
            return setting[true_index].copy()
        eps = setting if eps_scale is None else eps_scale
        return symmetric_noise(true_index, k, eps)


def corrupt(panel: PanelSymbol, config: Configuration, epsilon: float | NoiseModel = 0.0,
            seed: int = 0, *, jitter: float = 0.0,
            domain: AttributeDomain = DEFAULT_DOMAIN) -> tuple[ObjectBelief, ...]:
    """Noisy per-slot beliefs for every component of ``panel``.

    Occupied slots get ``p_object = 1 - eps/2``, empty ones ``eps/2``.
    Attribute rows of empty slots are uniform. ``jitter > 0`` perturbs each
    slot's epsilon by a seeded uniform draw in ``[-jitter, jitter]``.
    """
    noise = epsilon if isinstance(epsilon, NoiseModel) else NoiseModel.symmetric(epsilon)
    if jitter < 0:
        raise ContractViolation("jitter must be non-negative")
    panel.validate(config, domain)
    rng = np.random.default_rng(seed) if jitter > 0 else None
    out = []
    for comp, layout in zip(panel.components, config.components):
        n = layout.slot_count
        p_object = np.empty(n)
        rows = {axis: np.empty((n, domain.cardinality(axis))) for axis in SCALAR_AXES}
        for j in range(n):
            eps_obj = noise.objectiveness
            scale = None
            if rng is not None:
                delta = rng.uniform(-jitter, jitter)
                eps_obj = float(np.clip(eps_obj + delta, 0.0, 1.0))
            present = j in comp.occupied
            p_object[j] = 1.0 - eps_obj / 2 if present else eps_obj / 2
            for axis in SCALAR_AXES:
                k = domain.cardinality(axis)
                if not present:
                    rows[axis][j] = np.full(k, 1.0 / k)
                    continue
                if rng is not None:
                    base = getattr(noise, axis.value.lower())
                    if not isinstance(base, np.ndarray):
                        scale = float(np.clip(base + delta, 0.0, 1.0))
                rows[axis][j] = noise.attribute_row(axis, comp.value(axis), k, scale)
        out.append(ObjectBelief(p_object, rows[Axis.TYPE], rows[Axis.SIZE], rows[Axis.COLOR]))
    return tuple(out)


def point_mass_beliefs(panel: PanelSymbol, config: Configuration,
                       domain: AttributeDomain = DEFAULT_DOMAIN) -> tuple[ObjectBelief, ...]:
    return corrupt(panel, config, 0.0, domain=domain)
