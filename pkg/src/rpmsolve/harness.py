"""Evaluation sweeps over configurations x noise levels x seeds."""

from __future__ import annotations

import csv
import io
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .domain import AXES, Axis
from .errors import RPMError
from .generator import generate
from .pipeline import solve

COLUMNS = (
    "config", "epsilon", "instance_count", "answer_accuracy",
    *(f"abduction_{a.value.lower()}" for a in AXES),
    "mean_gt_rule_mass", "mean_cross_entropy", "failures",
)
TIMING_COLUMN = "wall_time_per_instance"


def worker_count() -> int:
    """Process count, capped by RPM_THREADS when set."""
    cap = os.environ.get("RPM_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise RPMError(f"RPM_THREADS must be an integer, got {cap!r}") from None
    return n


@dataclass(frozen=True)
class InstanceOutcome:
    seed: int
    correct: bool
    cross_entropy: float
    # (axis, correct, truth mass) for each component-axis with more than one catalog rule
    axes: tuple[tuple[Axis, bool, float], ...]
    error: str | None = None


def run_instance(config: str, epsilon: float, seed: int, mode: str = "argmax",
                 column_mode: bool = False) -> InstanceOutcome:
    try:
        result = solve(generate(config, seed), epsilon, seed, mode=mode, column_mode=column_mode)
    except RPMError as exc:
        return InstanceOutcome(seed, False, math.nan, (), f"{type(exc).__name__}: {exc}")
    axes = tuple((o.axis, o.correct, o.truth_mass) for o in result.axes if o.informative)
    return InstanceOutcome(seed, result.correct, result.cross_entropy, axes)


def _run_job(args) -> InstanceOutcome:
    return run_instance(*args)


@dataclass
class SweepRow:
    config: str
    epsilon: float
    outcomes: list[InstanceOutcome]
    wall_time: float = 0.0

    @property
    def instance_count(self) -> int:
        return len(self.outcomes)

    @property
    def failures(self) -> int:
        return sum(o.error is not None for o in self.outcomes)

    @property
    def answer_accuracy(self) -> float:
        return sum(o.correct for o in self.outcomes) / len(self.outcomes)

    def abduction_accuracy(self, axis: Axis) -> float:
        hits = [ok for o in self.outcomes for a, ok, _ in o.axes if a is axis]
        return float(np.mean(hits)) if hits else math.nan

    @property
    def mean_gt_rule_mass(self) -> float:
        masses = [m for o in self.outcomes for _, _, m in o.axes]
        return float(np.mean(masses)) if masses else math.nan

    @property
    def mean_cross_entropy(self) -> float:
        values = [o.cross_entropy for o in self.outcomes if o.error is None]
        return float(np.mean(values)) if values else math.nan

    def record(self, timing: bool = False) -> dict:
        out = {
            "config": self.config,
            "epsilon": _fmt(self.epsilon),
            "instance_count": self.instance_count,
            "answer_accuracy": _fmt(self.answer_accuracy),
            **{f"abduction_{a.value.lower()}": _fmt(self.abduction_accuracy(a)) for a in AXES},
            "mean_gt_rule_mass": _fmt(self.mean_gt_rule_mass),
            "mean_cross_entropy": _fmt(self.mean_cross_entropy),
            "failures": self.failures,
        }
        if timing:
            out[TIMING_COLUMN] = _fmt(self.wall_time / max(self.instance_count, 1))
        return out


def _fmt(x: float) -> str:
    return "nan" if math.isnan(x) else ("inf" if math.isinf(x) else f"{x:.10g}")


def sweep(configs, epsilons, count: int, seed0: int = 0, *, mode: str = "argmax",
          column_mode: bool = False, workers: int | None = None) -> list[SweepRow]:
    """One row per (config, epsilon); outcomes ordered by seed."""
    if count <= 0:
        raise RPMError("count must be positive")
    workers = worker_count() if workers is None else workers
    seeds = range(seed0, seed0 + count)
    rows = []
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        for config in configs:
            for eps in epsilons:
                jobs = [(config, float(eps), s, mode, column_mode) for s in seeds]
                start = time.perf_counter()
                if pool is None:
                    outcomes = [_run_job(j) for j in jobs]
                else:
                    outcomes = list(pool.map(_run_job, jobs, chunksize=max(1, count // (4 * workers))))
                rows.append(SweepRow(config, float(eps), outcomes, time.perf_counter() - start))
    finally:
        if pool is not None:
            pool.shutdown()
    return rows


def to_csv(rows: list[SweepRow], timing: bool = False) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COLUMNS + ((TIMING_COLUMN,) if timing else ()), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row.record(timing))
    return buf.getvalue()


def write_csv(rows: list[SweepRow], path, timing: bool = False) -> Path:
    path = Path(path)
    path.write_text(to_csv(rows, timing))
    return path
