"""Unit-distance graphs stored as per-vertex neighbour bitsets."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .constructions import BipartiteR3Config, PlanarScene, SphereConfig
from .geometry import (
    Direction,
    R3Point,
    RationalLike,
    as_fraction,
    lift_line,
    lift_point,
    squared_distance_r3,
)

SOURCE_TAGS = ("sphere", "r3-unit", "r3-prescribed", "incidence", "edge-list")


@dataclass(frozen=True)
class RegularGraphSpec:
    """A small simple pattern graph ``G`` on vertices ``0 .. k-1``."""

    k: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        norm = []
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < self.k and 0 <= v < self.k):
                raise ValueError(f"edge ({u}, {v}) out of range")
            norm.append((min(u, v), max(u, v)))
        if len(set(norm)) != len(norm):
            raise ValueError("repeated edge")
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    @classmethod
    def from_edges(cls, edges: Iterable[Sequence[int]], k: int | None = None) -> "RegularGraphSpec":
        edges = [tuple(e) for e in edges]
        if k is None:
            k = 1 + max(max(e) for e in edges)
        return cls(k, tuple(edges))

    def neighbors(self, v: int) -> list[int]:
        return [b if a == v else a for a, b in self.edges if v in (a, b)]

    def degrees(self) -> list[int]:
        deg = [0] * self.k
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    def is_regular(self, d: int = 3) -> bool:
        return all(x == d for x in self.degrees())

    def bipartition(self) -> tuple[list[int], list[int]] | None:
        """Colour classes (the one containing vertex 0 first), or ``None``."""
        colour = [-1] * self.k
        for root in range(self.k):
            if colour[root] >= 0:
                continue
            colour[root] = 0
            stack = [root]
            while stack:
                v = stack.pop()
                for w in self.neighbors(v):
                    if colour[w] < 0:
                        colour[w] = 1 - colour[v]
                        stack.append(w)
                    elif colour[w] == colour[v]:
                        return None
        return ([v for v in range(self.k) if colour[v] == 0],
                [v for v in range(self.k) if colour[v] == 1])


def complete_graph(k: int) -> RegularGraphSpec:
    return RegularGraphSpec(k, tuple(combinations(range(k), 2)))


def complete_bipartite(a: int, b: int) -> RegularGraphSpec:
    return RegularGraphSpec(a + b, tuple((i, a + j) for i in range(a) for j in range(b)))


def cycle_graph(k: int) -> RegularGraphSpec:
    return RegularGraphSpec(k, tuple((i, (i + 1) % k) for i in range(k)))


def prism_graph() -> RegularGraphSpec:
    """Triangular prism ``C_3 x K_2``."""
    return RegularGraphSpec(6, ((0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5),
                                (0, 3), (1, 4), (2, 5)))


K4 = complete_graph(4)
K33 = complete_bipartite(3, 3)
PRISM = prism_graph()


@dataclass(frozen=True)
class UnitDistanceGraph:
    """Immutable graph; ``adjacency[v]`` is an int whose bit ``u`` marks an edge.

    ``antipode[v]`` is the index of the antipodal vertex or ``-1``; it is
    ``None`` for graphs without antipodal side data.  ``point_ids`` maps
    vertices to underlying points when several vertices share one point
    (multipartite copies); distinctness in counting is by point id.
    """

    adjacency: tuple[int, ...]
    source_tag: str = "edge-list"
    antipode: tuple[int, ...] | None = None
    labels: tuple[str, ...] | None = None
    part_assignment: tuple[int, ...] | None = None
    point_ids: tuple[int, ...] | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        n = len(self.adjacency)
        for v, row in enumerate(self.adjacency):
            if row >> v & 1:
                raise ValueError(f"self-loop at vertex {v}")
            if row >> n:
                raise ValueError(f"vertex {v} has a neighbour out of range")
        for v, row in enumerate(self.adjacency):
            for u in _bits(row):
                if not self.adjacency[u] >> v & 1:
                    raise ValueError(f"adjacency not symmetric at ({v}, {u})")
        if self.antipode is not None:
            for v, a in enumerate(self.antipode):
                if a >= 0 and (self.antipode[a] != v or self.adjacency[v] >> a & 1):
                    raise ValueError(f"bad antipodal pair ({v}, {a})")

    @property
    def vertex_count(self) -> int:
        return len(self.adjacency)

    @property
    def antipodal_pairs(self) -> list[tuple[int, int]]:
        if self.antipode is None:
            return []
        return [(v, a) for v, a in enumerate(self.antipode) if a > v]

    def neighbors(self, v: int) -> list[int]:
        return list(_bits(self.adjacency[v]))

    def degree(self, v: int) -> int:
        return self.adjacency[v].bit_count()

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adjacency[u] >> v & 1)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.vertex_count) for v in _bits(self.adjacency[u]) if u < v]

    @property
    def edge_count(self) -> int:
        return sum(row.bit_count() for row in self.adjacency) // 2

    def parts(self) -> list[list[int]]:
        if self.part_assignment is None:
            raise ValueError("graph has no part assignment")
        out: list[list[int]] = [[] for _ in range(1 + max(self.part_assignment, default=-1))]
        for v, p in enumerate(self.part_assignment):
            out[p].append(v)
        return out

    # -- export ---------------------------------------------------------
    def to_edge_list(self) -> str:
        """``"u v"`` per line, preceded by a ``# vertices n`` header."""
        lines = [f"# vertices {self.vertex_count}"]
        lines += [f"{u} {v}" for u, v in self.edges()]
        return "\n".join(lines) + "\n"

    def sidecar(self) -> dict:
        return {
            "vertex_count": self.vertex_count,
            "source_tag": self.source_tag,
            "labels": list(self.labels) if self.labels is not None else None,
            "antipodal_pairs": [list(p) for p in self.antipodal_pairs] if self.antipode is not None else None,
            "part_assignment": list(self.part_assignment) if self.part_assignment is not None else None,
            "point_ids": list(self.point_ids) if self.point_ids is not None else None,
        }

    @classmethod
    def from_edge_list(cls, text: str, sidecar: dict | None = None) -> "UnitDistanceGraph":
        n = 0
        pairs = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) == 2 and parts[0] == "vertices":
                    n = max(n, int(parts[1]))
                continue
            u, v = (int(x) for x in line.split())
            pairs.append((u, v))
            n = max(n, u + 1, v + 1)
        sidecar = sidecar or {}
        n = max(n, sidecar.get("vertex_count") or 0)
        antipode = None
        if sidecar.get("antipodal_pairs") is not None:
            ap = [-1] * n
            for u, v in sidecar["antipodal_pairs"]:
                ap[u], ap[v] = v, u
            antipode = tuple(ap)
        return graph_from_edges(
            n, pairs, source_tag=sidecar.get("source_tag") or "edge-list", antipode=antipode,
            labels=_opt_tuple(sidecar.get("labels")),
            part_assignment=_opt_tuple(sidecar.get("part_assignment")),
            point_ids=_opt_tuple(sidecar.get("point_ids")),
        )

    def sidecar_json(self) -> str:
        return json.dumps(self.sidecar(), indent=2)


def _opt_tuple(x):
    return tuple(x) if x is not None else None


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def graph_from_edges(n: int, edges: Iterable[tuple[int, int]], **kwargs) -> UnitDistanceGraph:
    adj = [0] * n
    for u, v in edges:
        if u == v:
            raise ValueError(f"self-loop at {u}")
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    return UnitDistanceGraph(tuple(adj), **kwargs)


def _orthogonality_adjacency(vectors: Sequence[tuple[int, int, int]]) -> list[int]:
    n = len(vectors)
    adj = [0] * n
    for i in range(n):
        a0, a1, a2 = vectors[i]
        row = 0
        for j in range(i + 1, n):
            b0, b1, b2 = vectors[j]
            if a0 * b0 + a1 * b1 + a2 * b2 == 0:
                row |= 1 << j
                adj[j] |= 1 << i
        adj[i] |= row
    return adj


def build_sphere_graph(config: SphereConfig | Sequence[Direction]) -> UnitDistanceGraph:
    """Edge iff the directions are orthogonal; antipodes recorded eagerly."""
    if isinstance(config, SphereConfig):
        points, labels = config.points, config.labels
    else:
        points, labels = tuple(config), None
    if len(set(points)) != len(points):
        raise ValueError("duplicate points")
    vectors = [p.vector for p in points]
    index = {v: i for i, v in enumerate(vectors)}
    antipode = tuple(index.get((-a, -b, -c), -1) for a, b, c in vectors)
    adj = _orthogonality_adjacency(vectors)
    return UnitDistanceGraph(tuple(adj), "sphere", antipode=antipode, labels=labels)


def build_incidence_graph(scene: PlanarScene) -> UnitDistanceGraph:
    """Bipartite point/line graph; points come first, then lines."""
    n_pts = len(scene.points)
    n = n_pts + len(scene.lines)
    adj = [0] * n
    for i, j in scene.incidences():
        adj[i] |= 1 << (n_pts + j)
        adj[n_pts + j] |= 1 << i
    labels = ("point",) * n_pts + ("line",) * len(scene.lines)
    return UnitDistanceGraph(tuple(adj), "incidence", labels=labels)


def lifted_sphere_graph(scene: PlanarScene) -> UnitDistanceGraph:
    """Sphere graph of the lifted scene, in the same vertex order."""
    dirs = [lift_point(p) for p in scene.points] + [lift_line(l) for l in scene.lines]
    return build_sphere_graph(dirs)


def build_r3_graph(points: Sequence[R3Point], squared_length: RationalLike = 1) -> UnitDistanceGraph:
    if len(set(points)) != len(points):
        raise ValueError("duplicate points")
    target = as_fraction(squared_length)
    n = len(points)
    adj = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if squared_distance_r3(points[i], points[j]) == target:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    return UnitDistanceGraph(tuple(adj), "r3-unit")


def _slot_classes(G: RegularGraphSpec, half: int) -> tuple[list[int], list[int]]:
    classes = G.bipartition()
    if classes is None:
        raise ValueError("pattern graph is not bipartite")
    line_side, circle_side = classes
    if len(line_side) != half or len(circle_side) != half:
        raise ValueError(f"pattern graph sides must both have {half} vertices")
    return line_side, circle_side


def default_parts(config: BipartiteR3Config, G: RegularGraphSpec) -> list[list[int]]:
    """Line slot ``i`` gets line point ``i``; every circle slot gets all circle points.

    Part lists hold indices into ``config.points``, ordered by ``G``'s vertices.
    """
    half = len(config.line_points)
    line_side, circle_side = _slot_classes(G, half)
    parts: list[list[int]] = [[] for _ in range(G.k)]
    circle_idx = list(range(half, half + len(config.circle_points)))
    for slot, v in enumerate(line_side):
        parts[v] = [slot]
    for v in circle_side:
        parts[v] = list(circle_idx)
    return parts


def disjoint_parts(config: BipartiteR3Config, G: RegularGraphSpec, size: int) -> list[list[int]]:
    """Like :func:`default_parts` but circle slots get disjoint ``size``-sets."""
    half = len(config.line_points)
    line_side, circle_side = _slot_classes(G, half)
    if size * half > len(config.circle_points):
        raise ValueError("not enough circle points for disjoint parts")
    parts: list[list[int]] = [[] for _ in range(G.k)]
    for slot, v in enumerate(line_side):
        parts[v] = [slot]
    for j, v in enumerate(circle_side):
        parts[v] = list(range(half + j * size, half + (j + 1) * size))
    return parts


def build_prescribed_graph(config: BipartiteR3Config, G: RegularGraphSpec,
                           parts: Sequence[Sequence[int]] | None = None) -> UnitDistanceGraph:
    """Multipartite graph with one vertex per (part, point) membership.

    A vertex of part ``i`` and one of part ``j`` are adjacent iff ``(i, j)``
    is an edge of ``G`` and their squared distance equals the prescribed
    length for that (line slot, circle slot) pair.
    """
    half = len(config.line_points)
    line_side, circle_side = _slot_classes(G, half)
    if parts is None:
        parts = default_parts(config, G)
    if len(parts) != G.k:
        raise ValueError("need one part per vertex of the pattern graph")
    slot_of = {v: s for s, v in enumerate(line_side)}
    slot_of.update({v: s for s, v in enumerate(circle_side)})
    points = config.points
    verts: list[tuple[int, int]] = [(i, pid) for i, part in enumerate(parts) for pid in part]
    n = len(verts)
    adj = [0] * n
    for a in range(n):
        pa, ia = verts[a]
        for b in range(a + 1, n):
            pb, ib = verts[b]
            if (min(pa, pb), max(pa, pb)) not in G.edges:
                continue
            li, ci = (pa, pb) if pa in slot_of and pa in line_side else (pb, pa)
            length = config.prescribed_lengths[slot_of[li]][slot_of[ci]]
            if ia != ib and squared_distance_r3(points[ia], points[ib]) == length:
                adj[a] |= 1 << b
                adj[b] |= 1 << a
    return UnitDistanceGraph(tuple(adj), "r3-prescribed",
                             part_assignment=tuple(p for p, _ in verts),
                             point_ids=tuple(pid for _, pid in verts))
