"""Exact constructions and counters for unit-distance paths and cycles on the sphere."""

from .geometry import Direction, PlanarLine, PlanarPoint, R3Point, normalize
from .constructions import (
    SphereConfig,
    bipartite_r3_construction,
    cycle_construction,
    enhanced_path_construction,
    grid_incidence_scene,
    path_construction,
    quadratic_c4_config,
)
from .graph import UnitDistanceGraph, RegularGraphSpec, build_sphere_graph
from .counting import count_cycles, count_paths, count_pattern_paths

__version__ = "0.1.0"
