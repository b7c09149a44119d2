"""Exact path, cycle, pattern and subgraph counting.

Two engines are provided.  ``naive`` is a plain list-based DFS kept as the
reference oracle.  ``optimized`` runs a compiled DFS when numba is present
and the count provably fits in 64 bits, and otherwise walks neighbour
bitsets in Python with unbounded integers.  Both engines must agree bit for
bit.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

from . import _fast
from .constructions import RICH, SphereConfig, Slot, falling_factorial, pattern_slots, q_label
from .graph import RegularGraphSpec, UnitDistanceGraph, _bits

ENGINES = ("naive", "optimized")
BACKENDS = ("auto", "compiled", "python")


@dataclass(frozen=True)
class CountReport:
    """Counts for one ``k``; fields not requested are ``None``."""

    k: int
    ordered_paths: int
    unordered_paths: int
    engine: str
    antipodal_free_unordered: int | None = None
    cycles_dihedral: int | None = None

    def to_json(self) -> str:
        data = {key: (str(v) if isinstance(v, int) and not isinstance(v, bool) and key != "k" else v)
                for key, v in asdict(self).items()}
        return json.dumps(data, sort_keys=True)


def _check_engine(engine: str) -> None:
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}; choose from {ENGINES}")


def _jobs(n_jobs: int | None) -> int:
    return int(os.environ.get("UDPATHS_JOBS", "1")) if n_jobs is None else n_jobs


def _map_starts(fn: Callable[[int], int], starts: Sequence[int], n_jobs: int | None) -> int:
    """Sum ``fn`` over start vertices, optionally with a joblib worker pool."""
    n_jobs = _jobs(n_jobs)
    if n_jobs == 1 or len(starts) < 2:
        return sum(fn(s) for s in starts)
    from joblib import Parallel, delayed

    return sum(Parallel(n_jobs=n_jobs)(delayed(fn)(s) for s in starts))


def _map_chunks(fn: Callable[[list[int]], int], starts: Sequence[int], n_jobs: int | None) -> int:
    """Like :func:`_map_starts` but hands each worker a strided chunk."""
    n_jobs = _jobs(n_jobs)
    if n_jobs == 1 or len(starts) < 2:
        return fn(list(starts))
    from joblib import Parallel, delayed

    chunks = [list(starts[i::n_jobs]) for i in range(n_jobs)]
    return sum(Parallel(n_jobs=n_jobs)(delayed(fn)(c) for c in chunks if c))


def _use_compiled(g: UnitDistanceGraph, k: int, backend: str) -> bool:
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; choose from {BACKENDS}")
    if backend == "python":
        return False
    ok = _fast.available() and _fast.fits_int64(g.adjacency, k)
    if backend == "compiled" and not ok:
        raise ValueError("compiled backend unavailable or count may overflow 64 bits")
    return ok


# ---------------------------------------------------------------------------
# naive oracle


def _naive_sequences(g: UnitDistanceGraph, k: int, antipodal_free: bool = False) -> int:
    nbrs = [g.neighbors(v) for v in range(g.vertex_count)]
    anti = g.antipode

    def extend(path: list[int]) -> int:
        if len(path) == k:
            return 1
        total = 0
        for w in nbrs[path[-1]]:
            if w in path:
                continue
            if antipodal_free and len(path) >= 2 and anti[path[-2]] == w:
                continue
            path.append(w)
            total += extend(path)
            path.pop()
        return total

    return sum(extend([v]) for v in range(g.vertex_count))


def _naive_closed(g: UnitDistanceGraph, k: int) -> int:
    """Ordered closed traversals: every cycle is seen ``2k`` times."""
    nbrs = [g.neighbors(v) for v in range(g.vertex_count)]

    def extend(path: list[int]) -> int:
        if len(path) == k:
            return 1 if g.has_edge(path[-1], path[0]) else 0
        total = 0
        for w in nbrs[path[-1]]:
            if w not in path:
                path.append(w)
                total += extend(path)
                path.pop()
        return total

    return sum(extend([v]) for v in range(g.vertex_count))


# ---------------------------------------------------------------------------
# bitset engine


class _PathCounter:
    """Picklable per-start worker for the bitset path DFS.

    For high-degree vertices the last two levels are counted in closed
    form: the number of
    two-step extensions ``v -> w -> x`` avoiding the visited set ``V`` is
    ``sum_{w in nb} deg(w) - sum_{u in V'} |N(u) & nb|`` with ``nb`` the
    admissible ``w`` and ``V'`` the vertices ``x`` may not be.  The first
    sum is read off a per-vertex prefix ``S[v] = sum_{w ~ v} deg(w)``.
    """

    def __init__(self, adj: Sequence[int], k: int, anti_mask: Sequence[int] | None):
        self.adj = adj
        self.k = k
        self.anti = anti_mask
        self.deg = [row.bit_count() for row in adj]
        self.nbr_deg = [sum(self.deg[w] for w in _bits(row)) for row in adj]

    def __call__(self, start: int) -> int:
        if self.k == 1:
            return 1
        return self._rec(start, -1, 1 << start, self.k - 1)

    def _rec(self, v: int, prev: int, visited: int, remaining: int) -> int:
        adj_v = self.adj[v]
        nb = adj_v & ~visited
        if self.anti is not None and prev >= 0:
            nb &= ~self.anti[prev]
        if remaining == 1:
            return nb.bit_count()
        if remaining == 2 and nb.bit_count() > self.k:
            blocked = visited | (self.anti[v] if self.anti is not None else 0)
            total = self.nbr_deg[v]
            for u in _bits(adj_v & ~nb):
                total -= self.deg[u]
            for u in _bits(blocked):
                total -= (self.adj[u] & nb).bit_count()
            return total
        total = 0
        while nb:
            low = nb & -nb
            nb ^= low
            total += self._rec(low.bit_length() - 1, v, visited | low, remaining - 1)
        return total


class _CycleCounter:
    """Cycles whose smallest vertex is ``start`` and whose second vertex is
    smaller than the last one."""

    def __init__(self, adj: Sequence[int], k: int):
        self.adj = adj
        self.k = k

    def __call__(self, start: int) -> int:
        allowed = ~((1 << (start + 1)) - 1)
        total = 0
        nb = self.adj[start] & allowed
        while nb:
            low = nb & -nb
            nb ^= low
            # the closing vertex must exceed the second one
            closing = self.adj[start] & ~((low << 1) - 1)
            total += self._rec(low.bit_length() - 1, (1 << start) | low, allowed, closing, self.k - 2)
        return total

    def _rec(self, v: int, visited: int, allowed: int, closing: int, remaining: int) -> int:
        nb = self.adj[v] & allowed & ~visited
        if remaining == 1:
            return (nb & closing).bit_count()
        total = 0
        while nb:
            low = nb & -nb
            nb ^= low
            total += self._rec(low.bit_length() - 1, visited | low, allowed, closing, remaining - 1)
        return total


def _anti_masks(g: UnitDistanceGraph) -> list[int]:
    if g.antipode is None:
        raise ValueError("graph has no antipodal side data")
    return [(1 << a) if a >= 0 else 0 for a in g.antipode]


def _starts_by_degree(g: UnitDistanceGraph) -> list[int]:
    # heavy starts first keeps worker chunks balanced
    return sorted(range(g.vertex_count), key=lambda v: -g.degree(v))


def _ordered_paths(g: UnitDistanceGraph, k: int, engine: str, n_jobs: int | None,
                   antipodal_free: bool = False, backend: str = "auto") -> int:
    _check_engine(engine)
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > g.vertex_count:
        return 0
    if antipodal_free:
        masks = _anti_masks(g)
    if engine == "naive":
        return _naive_sequences(g, k, antipodal_free)
    if _use_compiled(g, k, backend):
        anti = g.antipode if antipodal_free else None
        return _map_chunks(lambda c: _fast.ordered_paths(g.adjacency, k, anti, c),
                           _starts_by_degree(g), n_jobs)
    worker = _PathCounter(g.adjacency, k, masks if antipodal_free else None)
    return _map_starts(worker, _starts_by_degree(g), n_jobs)


def count_paths(g: UnitDistanceGraph, k: int, engine: str = "optimized",
                n_jobs: int | None = None, backend: str = "auto") -> CountReport:
    """Vertex sequences of ``k`` distinct vertices with consecutive ones adjacent.

    >>> from udpaths.graph import complete_graph, graph_from_edges
    >>> tri = graph_from_edges(3, complete_graph(3).edges)
    >>> count_paths(tri, 3).unordered_paths
    3
    """
    ordered = _ordered_paths(g, k, engine, n_jobs, backend=backend)
    unordered = ordered if k == 1 else ordered // 2
    return CountReport(k, ordered, unordered, engine)


def count_antipodal_free_paths(g: UnitDistanceGraph, k: int, engine: str = "optimized",
                               n_jobs: int | None = None, backend: str = "auto") -> int:
    """Unordered ``k``-paths with no antipodal pair two steps apart."""
    if g.antipode is None:
        raise ValueError("graph has no antipodal side data")
    ordered = _ordered_paths(g, k, engine, n_jobs, antipodal_free=True, backend=backend)
    return ordered if k == 1 else ordered // 2


def count_cycles(g: UnitDistanceGraph, k: int, engine: str = "optimized",
                 n_jobs: int | None = None, backend: str = "auto") -> int:
    """``k``-cycles up to rotation and reflection."""
    _check_engine(engine)
    if k < 3:
        raise ValueError("cycles need k >= 3")
    if k > g.vertex_count:
        return 0
    if engine == "naive":
        closed = _naive_closed(g, k)
        if closed % (2 * k):
            raise AssertionError("closed traversal count not divisible by 2k")
        return closed // (2 * k)
    if _use_compiled(g, k, backend):
        return _map_chunks(lambda c: _fast.cycles(g.adjacency, k, c), list(range(g.vertex_count)), n_jobs)
    return _map_starts(_CycleCounter(g.adjacency, k), list(range(g.vertex_count)), n_jobs)


def full_report(g: UnitDistanceGraph, k: int, engine: str = "optimized",
                n_jobs: int | None = None, backend: str = "auto") -> CountReport:
    """Paths, antipodal-free paths (when side data exists) and cycles (k >= 3)."""
    base = count_paths(g, k, engine, n_jobs, backend)
    af = count_antipodal_free_paths(g, k, engine, n_jobs, backend) if g.antipode is not None else None
    cyc = count_cycles(g, k, engine, n_jobs, backend) if k >= 3 else None
    return CountReport(k, base.ordered_paths, base.unordered_paths, engine, af, cyc)


# ---------------------------------------------------------------------------
# designated patterns


def count_pattern_paths(config: SphereConfig, k: int | None = None, distinct: bool = True,
                        graph: UnitDistanceGraph | None = None) -> int:
    """Sequences following the construction's label pattern.

    Slot ``j`` must hold a vertex labelled ``pattern[j].label``; consecutive
    vertices are adjacent and, for closed patterns, the last vertex is
    adjacent to the first.  With ``distinct=False`` vertices may repeat
    (pattern walks), which is what a bare ``q^s`` product counts.
    """
    if config.pattern is None:
        raise ValueError("config carries no designated pattern")
    if k is not None and k != len(config.pattern):
        raise ValueError(f"config was built for k = {len(config.pattern)}, not {k}")
    if graph is None:
        from .graph import build_sphere_graph

        graph = build_sphere_graph(config)
    masks: dict[str, int] = {}
    for v, lab in enumerate(config.labels):
        masks[lab] = masks.get(lab, 0) | (1 << v)
    slot_masks = [masks.get(s.label, 0) for s in config.pattern]
    adj = graph.adjacency
    closed = config.closed
    length = len(slot_masks)

    def rec(v: int, first: int, used: int, j: int) -> int:
        cand = adj[v] & slot_masks[j]
        if distinct:
            cand &= ~used
        if j == length - 1:
            if closed:
                cand &= adj[first]
            return cand.bit_count()
        total = 0
        while cand:
            low = cand & -cand
            cand ^= low
            total += rec(low.bit_length() - 1, first, used | low, j + 1)
        return total

    total = 0
    for v in _bits(slot_masks[0]):
        if length == 1:
            total += 1
        else:
            total += rec(v, v, 1 << v, 1)
    return total


def ordered_rich_pairs(config: SphereConfig) -> int:
    """Ordered orthogonal pairs inside the RICH set."""
    rich = [config.points[i] for i in config.indices(RICH)]
    return sum(1 for p in rich for q in rich if p.dot(q) == 0)


def pattern_kind(k: int, kind: str) -> str:
    """Map ``path``/``cycle`` to the pattern family the constructions use."""
    if kind == "path":
        return "enhanced-path" if k % 5 == 2 else "path"
    if kind == "cycle":
        return "enhanced-cycle" if k % 5 == 2 and k >= 7 else "cycle"
    return kind


def closed_form_pattern_count(k: int, q: int, E: int | None = None, kind: str = "path",
                              distinct: bool = False) -> int:
    """Closed form for :func:`count_pattern_paths` on a generated construction.

    ``q`` is ``|Q(i)|`` and ``E`` the number of ordered orthogonal pairs in
    the rich set (required for enhanced patterns).  Walk mode gives
    ``E^[enh] * q^f`` with ``f`` the number of free slots; distinct mode
    replaces each circle's powers by a falling factorial that avoids the
    determined points already placed on that circle.

    >>> closed_form_pattern_count(5, 4)
    64
    >>> closed_form_pattern_count(5, 4, distinct=True)
    24
    """
    kind = pattern_kind(k, kind)
    slots, _ = pattern_slots(k, kind)
    enhanced = kind.startswith("enhanced")
    if enhanced and E is None:
        raise ValueError("enhanced patterns need the rich-pair count E")
    factor = E if enhanced else 1
    if not distinct:
        return factor * q ** sum(1 for s in slots if s.role == "free")
    det: dict[str, int] = {}
    free: dict[str, int] = {}
    for s in slots:
        if s.label.startswith("Q("):
            bucket = free if s.role == "free" else det
            bucket[s.label] = bucket.get(s.label, 0) + 1
    out = factor
    for label, c in free.items():
        out *= falling_factorial(q - det.get(label, 0), c)
    return out


def predicted_pattern_count(config: SphereConfig, distinct: bool = True) -> int:
    """:func:`closed_form_pattern_count` with ``q`` and ``E`` read off ``config``."""
    kind = config.kind
    E = ordered_rich_pairs(config) if kind.startswith("enhanced") else None
    if kind == "quadratic-c4":
        kind = "cycle"
    return closed_form_pattern_count(config.k, config.q_size(0), E, kind, distinct)


# ---------------------------------------------------------------------------
# subgraph copies


def _search_order(G: RegularGraphSpec) -> list[int]:
    """Vertices of G so that each one (after the first of its component)
    has an earlier neighbour where possible."""
    order: list[int] = []
    seen = set()
    for root in sorted(range(G.k), key=lambda v: -len(G.neighbors(v))):
        if root in seen:
            continue
        queue = [root]
        seen.add(root)
        while queue:
            v = queue.pop(0)
            order.append(v)
            for w in sorted(G.neighbors(v)):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
    return order


def _count_embeddings(adj: Sequence[int], n: int, G: RegularGraphSpec, induced: bool,
                      domains: Sequence[int] | None = None,
                      point_ids: Sequence[int] | None = None) -> int:
    """Injective maps V(G) -> V(g) preserving edges (and non-edges if induced).

    ``domains[i]`` optionally restricts the image of G-vertex ``i``;
    ``point_ids`` makes injectivity apply to underlying points.
    """
    order = _search_order(G)
    pos = {v: i for i, v in enumerate(order)}
    back_nbrs = [[w for w in G.neighbors(v) if pos[w] < pos[v]] for v in order]
    back_non = [[w for w in range(G.k) if pos[w] < pos[v] and w not in G.neighbors(v)]
                for v in order]
    full = (1 << n) - 1
    dom = [domains[v] if domains is not None else full for v in order]
    same_point: list[int] | None = None
    if point_ids is not None:
        groups: dict[int, int] = {}
        for v, pid in enumerate(point_ids):
            groups[pid] = groups.get(pid, 0) | (1 << v)
        same_point = [groups[pid] for pid in point_ids]
    image = [0] * G.k

    def rec(i: int, used: int) -> int:
        v = order[i]
        cand = dom[i] & ~used
        for w in back_nbrs[i]:
            cand &= adj[image[w]]
        if induced:
            for w in back_non[i]:
                cand &= ~adj[image[w]]
        if i == G.k - 1:
            return cand.bit_count()
        total = 0
        while cand:
            low = cand & -cand
            cand ^= low
            u = low.bit_length() - 1
            image[v] = u
            total += rec(i + 1, used | (same_point[u] if same_point else low))
        return total

    return rec(0, 0) if G.k else 1


def automorphism_count(G: RegularGraphSpec) -> int:
    adj = [0] * G.k
    for a, b in G.edges:
        adj[a] |= 1 << b
        adj[b] |= 1 << a
    return _count_embeddings(adj, G.k, G, induced=True)


def count_subgraph_copies(g: UnitDistanceGraph, G: RegularGraphSpec, induced: bool = False) -> int:
    """Copies of ``G`` in ``g``: labelled embeddings divided by ``|Aut(G)|``."""
    if G.k > g.vertex_count:
        return 0
    emb = _count_embeddings(g.adjacency, g.vertex_count, G, induced)
    aut = automorphism_count(G)
    if emb % aut:
        raise AssertionError("embedding count not divisible by |Aut(G)|")
    return emb // aut


def count_prescribed_copies(mg: UnitDistanceGraph, G: RegularGraphSpec) -> int:
    """Tuples ``(p_1..p_k)`` with ``p_i`` in part ``i``, pairwise distinct
    points, and every ``G``-edge realised as an edge of ``mg``."""
    if mg.part_assignment is None:
        raise ValueError("graph has no part assignment")
    parts = 1 + max(mg.part_assignment, default=-1)
    if parts != G.k:
        raise ValueError(f"graph has {parts} parts but G has {G.k} vertices")
    domains = [0] * G.k
    for v, p in enumerate(mg.part_assignment):
        domains[p] |= 1 << v
    if not all(domains):
        return 0
    return _count_embeddings(mg.adjacency, mg.vertex_count, G, induced=False,
                             domains=domains, point_ids=mg.point_ids)


def closed_form_prescribed_count(parts: Sequence[Sequence[int]], circle_slots: Sequence[int]) -> int:
    """Injective choices for the circle slots when every circle point works.

    Slots whose parts are identical share a falling factorial; distinct
    parts must be disjoint.
    """
    groups: dict[tuple[int, ...], int] = {}
    for v in circle_slots:
        key = tuple(sorted(parts[v]))
        groups[key] = groups.get(key, 0) + 1
    keys = list(groups)
    for i, a in enumerate(keys):
        for b in keys[i + 1:]:
            if set(a) & set(b):
                raise ValueError("circle parts must be identical or disjoint")
    out = 1
    for key, c in groups.items():
        out *= falling_factorial(len(key), c)
    return out
