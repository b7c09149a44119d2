"""Scaling runs, log-log exponent fits and the table of known exponents."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .constructions import (
    ConstructionError,
    SphereConfig,
    cycle_construction,
    enhanced_path_construction,
    path_construction,
    quadratic_c4_config,
)
from .counting import (
    closed_form_pattern_count,
    count_antipodal_free_paths,
    count_cycles,
    count_paths,
    count_pattern_paths,
    ordered_rich_pairs,
    predicted_pattern_count,
)
from .geometry import format_rational
from .graph import build_sphere_graph

COUNT_BUDGET = 10 ** 8
CYCLE_GAP_ROWS = (3, 6, 7, 9)


class BudgetExceeded(RuntimeError):
    def __init__(self, n: int, estimate: int, budget: int = COUNT_BUDGET):
        super().__init__(f"predicted count {estimate} at n = {n} exceeds the budget {budget}")
        self.n = n
        self.estimate = estimate
        self.budget = budget


class GapRowError(ValueError):
    """The exponent is only known up to an interval; see :func:`bound_table`."""


def predicted_exponent(kind: str, k: int) -> Fraction:
    """Tight exponent for sphere ``k``-paths or ``k``-cycles.

    >>> predicted_exponent("path", 7)
    Fraction(10, 3)
    >>> predicted_exponent("cycle", 12)
    Fraction(13, 3)
    """
    if kind == "path":
        if k < 1:
            raise ValueError("paths need k >= 1")
        e = Fraction(2 * (k + 3) // 5)
        return e - Fraction(2, 3) if k % 5 == 2 else e
    if kind == "cycle":
        if k in CYCLE_GAP_ROWS:
            raise GapRowError(f"C_{k} has an open gap; use bound_table()")
        if k < 3:
            raise ValueError("cycles need k >= 3")
        if k == 4:
            return Fraction(2)
        e = Fraction(2 * k // 5)
        return e + Fraction(1, 3) if k % 5 == 2 else e
    raise ValueError(f"unknown kind {kind!r}")


def antipodal_free_exponent(k: int) -> Fraction:
    """Upper exponent for antipodal-free ``k``-paths (the planar path exponent)."""
    if k % 3 == 2:
        return Fraction(k + 2, 3)
    return Fraction(k // 3 + 1)


@dataclass(frozen=True)
class BoundRow:
    kind: str
    k: int
    lower: Fraction | None
    upper: Fraction
    polylog: bool
    note: str = ""

    def __post_init__(self) -> None:
        if self.lower is not None and self.lower > self.upper:
            raise ValueError("lower exponent exceeds upper exponent")

    def as_dict(self) -> dict:
        return {"kind": self.kind, "k": self.k,
                "lower": format_rational(self.lower) if self.lower is not None else None,
                "upper": format_rational(self.upper), "polylog": self.polylog, "note": self.note}


@dataclass(frozen=True)
class BoundTable:
    rows: tuple[BoundRow, ...]

    def row(self, kind: str, k: int) -> BoundRow:
        for r in self.rows:
            if r.kind == kind and r.k == k:
                return r
        raise KeyError((kind, k))

    def upper(self, kind: str, k: int) -> Fraction:
        return self.row(kind, k).upper

    def to_json(self) -> str:
        return json.dumps([r.as_dict() for r in self.rows], indent=2)


def bound_table(max_k: int = 15) -> BoundTable:
    """Known exponents: sphere paths and cycles, the open cycle gaps, the R^3
    and planar 4-cycle rows and the antipodal-free path bound."""
    rows: list[BoundRow] = []
    for k in range(1, max_k + 1):
        e = predicted_exponent("path", k)
        rows.append(BoundRow("sphere-path", k, e, e, True))
    gaps = {3: (Fraction(1), Fraction(4, 3)), 6: (Fraction(2), Fraction(20, 9)),
            7: (Fraction(7, 3), Fraction(8, 3)), 9: (Fraction(3), Fraction(10, 3))}
    for k in range(3, max_k + 1):
        if k in gaps:
            lo, hi = gaps[k]
            rows.append(BoundRow("sphere-cycle", k, lo, hi, True, "open gap"))
        else:
            e = predicted_exponent("cycle", k)
            rows.append(BoundRow("sphere-cycle", k, e, e, k != 4))
    rows.append(BoundRow("r3-cycle", 4, Fraction(2), Fraction(12, 5), True, "open gap"))
    rows.append(BoundRow("planar-cycle", 4, Fraction(1), Fraction(5, 3), True,
                         "lower bound is n^(1+o(1))"))
    for k in range(1, max_k + 1):
        rows.append(BoundRow("antipodal-free-path", k, None, antipodal_free_exponent(k), True,
                             "upper bound only"))
    return BoundTable(tuple(rows))


# ---------------------------------------------------------------------------
# scaling runs


CONSTRUCTIONS: dict[str, Callable[[int, int], SphereConfig]] = {
    "sphere-path": lambda k, n: (enhanced_path_construction(k, n) if k % 5 == 2
                                 else path_construction(k, n)),
    "sphere-cycle": cycle_construction,
    "quadratic-c4": lambda k, n: quadratic_c4_config(n),
}

# "pattern-closed" evaluates the walk-mode closed form and never enumerates,
# so it is exempt from the budget.
COUNT_MODES = ("paths", "antipodal-free", "cycles", "pattern", "pattern-walks", "pattern-closed")


@dataclass(frozen=True)
class ScalingRun:
    construction: str
    k: int
    mode: str
    series: tuple[tuple[int, int], ...]
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        ns = [n for n, _ in self.series]
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValueError("n must be strictly increasing")
        if any(c <= 0 for _, c in self.series):
            raise ValueError("counts must be positive")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["construction", "k", "n", "count"])
        for n, c in self.series:
            w.writerow([self.construction, self.k, n, c])
        return buf.getvalue()


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    max_residual: float

    def as_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept, "max_residual": self.max_residual}


def estimate_count(config: SphereConfig) -> int:
    """Pattern-count estimate used to refuse oversized grid points."""
    E = ordered_rich_pairs(config) if config.kind.startswith("enhanced") else None
    kind = "cycle" if config.kind == "quadratic-c4" else config.kind
    return closed_form_pattern_count(config.k, config.q_size(0), E, kind)


def _count(config: SphereConfig, mode: str, engine: str, n_jobs: int | None) -> int:
    if mode == "pattern-closed":
        return predicted_pattern_count(config, distinct=False)
    g = build_sphere_graph(config)
    k = config.k
    if mode == "paths":
        return count_paths(g, k, engine, n_jobs).unordered_paths
    if mode == "antipodal-free":
        return count_antipodal_free_paths(g, k, engine, n_jobs)
    if mode == "cycles":
        return count_cycles(g, k, engine, n_jobs)
    if mode == "pattern":
        return count_pattern_paths(config, graph=g)
    if mode == "pattern-walks":
        return count_pattern_paths(config, graph=g, distinct=False)
    raise ValueError(f"unknown count mode {mode!r}; choose from {COUNT_MODES}")


def run_scaling(construction: str, k: int, n_grid: Sequence[int], mode: str = "paths",
                engine: str = "optimized", n_jobs: int | None = None,
                budget: int = COUNT_BUDGET) -> ScalingRun:
    """Build the construction at every ``n`` and count exactly.

    The whole grid is checked against ``budget`` before anything is counted.
    """
    if construction not in CONSTRUCTIONS:
        raise ValueError(f"unknown construction {construction!r}")
    if mode not in COUNT_MODES:
        raise ValueError(f"unknown count mode {mode!r}")
    build = CONSTRUCTIONS[construction]
    configs = [build(k, n) for n in n_grid]
    for n, cfg in zip(n_grid, configs):
        est = estimate_count(cfg)
        if mode != "pattern-closed" and est > budget:
            raise BudgetExceeded(n, est, budget)
    series = tuple((n, _count(cfg, mode, engine, n_jobs)) for n, cfg in zip(n_grid, configs))
    sizes = [cfg.q_size(0) for cfg in configs]
    return ScalingRun(construction, k, mode, series, meta={"q_sizes": sizes, "engine": engine})


def fit_exponent(run: ScalingRun | Sequence[tuple[float, float]]) -> ExponentFit:
    """Least-squares line through ``(log n, log count)``.

    >>> round(fit_exponent([(10, 100), (20, 400), (40, 1600)]).slope, 12)
    2.0
    """
    series = run.series if isinstance(run, ScalingRun) else run
    if len(series) < 3:
        raise ValueError("need at least 3 series points")
    x = np.log(np.array([float(n) for n, _ in series]))
    y = np.array([math.log(c) for _, c in series])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return ExponentFit(float(slope), float(intercept), float(np.max(np.abs(resid))))


def fit_summary(run: ScalingRun, kind: str | None = None) -> dict:
    """Fit plus the predicted exponent and bound-table row, for JSON output."""
    fit = fit_exponent(run)
    out = {"construction": run.construction, "k": run.k, "mode": run.mode, **fit.as_dict()}
    kind = kind or ("cycle" if run.construction in ("sphere-cycle", "quadratic-c4") else "path")
    try:
        out["predicted"] = format_rational(predicted_exponent(kind, run.k))
    except GapRowError:
        out["predicted"] = None
    table = bound_table(max(15, run.k))
    row_kind = "antipodal-free-path" if run.mode == "antipodal-free" else f"sphere-{kind}"
    try:
        out["bound_row"] = table.row(row_kind, run.k).as_dict()
    except KeyError:
        out["bound_row"] = None
    return out
