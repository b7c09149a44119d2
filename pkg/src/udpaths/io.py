"""JSON round-tripping for configurations and graphs.

Rationals are written as ``"p/q"`` strings and big counts as decimal strings,
so nothing loses precision in a JSON parser.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .constructions import BipartiteR3Config, PlanarScene, Slot, SphereConfig
from .geometry import Direction, PlanarLine, PlanarPoint, R3Point, as_fraction, format_rational
from .graph import RegularGraphSpec, UnitDistanceGraph

Config = SphereConfig | PlanarScene | BipartiteR3Config


def _jsonable(value: Any) -> Any:
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    return value


def config_to_dict(cfg: Config) -> dict:
    if isinstance(cfg, SphereConfig):
        return {
            "type": "sphere",
            "kind": cfg.kind,
            "k": cfg.k,
            "points": [list(p.vector) for p in cfg.points],
            "labels": list(cfg.labels),
            "circles": [list(m.vector) for m in cfg.circles],
            "pattern": [list(s) for s in cfg.pattern] if cfg.pattern is not None else None,
            "closed": cfg.closed,
            "meta": _jsonable(cfg.meta),
        }
    if isinstance(cfg, PlanarScene):
        return {
            "type": "planar-scene",
            "points": [[format_rational(p.x), format_rational(p.y)] for p in cfg.points],
            "lines": [[l.a, l.b, l.c] for l in cfg.lines],
        }
    if isinstance(cfg, BipartiteR3Config):
        pt = lambda p: [format_rational(c) for c in p]
        return {
            "type": "r3-bipartite",
            "line_points": [pt(p) for p in cfg.line_points],
            "circle_points": [pt(p) for p in cfg.circle_points],
            "prescribed_lengths": [[format_rational(v) for v in row] for row in cfg.prescribed_lengths],
            "radius": format_rational(cfg.radius),
        }
    raise TypeError(f"cannot serialise {type(cfg).__name__}")


def config_from_dict(data: dict) -> Config:
    kind = data.get("type")
    if kind == "sphere":
        pattern = data.get("pattern")
        return SphereConfig(
            tuple(Direction(*p) for p in data["points"]),
            tuple(data["labels"]),
            tuple(Direction(*m) for m in data.get("circles", [])),
            kind=data.get("kind", "custom"),
            k=data.get("k"),
            pattern=tuple(Slot(*s) for s in pattern) if pattern is not None else None,
            closed=bool(data.get("closed", False)),
            meta=data.get("meta") or {},
        )
    if kind == "planar-scene":
        return PlanarScene(tuple(PlanarPoint.of(x, y) for x, y in data["points"]),
                           tuple(PlanarLine(*l) for l in data["lines"]))
    if kind == "r3-bipartite":
        pt = lambda p: R3Point.of(*p)
        return BipartiteR3Config(
            tuple(pt(p) for p in data["line_points"]),
            tuple(pt(p) for p in data["circle_points"]),
            tuple(tuple(as_fraction(v) for v in row) for row in data["prescribed_lengths"]),
            as_fraction(data["radius"]),
        )
    raise ValueError(f"unknown config type {kind!r}")


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def save_config(cfg: Config, path: str | Path) -> None:
    Path(path).write_text(dumps(config_to_dict(cfg)))


def load_config(path: str | Path) -> Config:
    return config_from_dict(json.loads(Path(path).read_text()))


def save_graph(g: UnitDistanceGraph, edges_path: str | Path, sidecar_path: str | Path | None = None) -> None:
    Path(edges_path).write_text(g.to_edge_list())
    if sidecar_path is not None:
        Path(sidecar_path).write_text(dumps(g.sidecar()))


def load_graph(edges_path: str | Path, sidecar_path: str | Path | None = None) -> UnitDistanceGraph:
    sidecar = json.loads(Path(sidecar_path).read_text()) if sidecar_path else None
    return UnitDistanceGraph.from_edge_list(Path(edges_path).read_text(), sidecar)


def load_pattern_graph(path: str | Path) -> RegularGraphSpec:
    """Pattern graph ``G`` from an edge-list file (``#`` comments allowed)."""
    g = UnitDistanceGraph.from_edge_list(Path(path).read_text())
    return RegularGraphSpec(g.vertex_count, tuple(g.edges()))
