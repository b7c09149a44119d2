"""Lower-bound configurations with exact coordinates.

Sphere constructions are built from great circles ``K_i`` with rational poles
``m_i``.  Each circle carries its two poles ``N(i) = m_i``, ``S(i) = -m_i`` and a
point set ``Q(i)``; consecutive sets are linked by a *designated* matching
``p -> normalize(cross(p, m_{i+1}))`` so that every point of ``Q(i)`` has exactly
one neighbour in ``Q(i+1)``.

A path or cycle pattern walks through *blocks*.  A five-block visits
``Q N Q S Q`` on one circle (two free choices per five vertices), a three-block
visits ``Q N Q`` (one free choice per three vertices); the first vertex of every
block after the first is the designated image of the previous block's exit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .geometry import (
    Direction,
    PlanarLine,
    PlanarPoint,
    R3Point,
    RationalLike,
    as_fraction,
    cross,
    lift_line,
    lift_point,
    normalize,
    squared_distance_r3,
)

RICH = "RICH"


def q_label(i: int) -> str:
    return f"Q({i})"


def n_label(i: int) -> str:
    return f"N({i})"


def s_label(i: int) -> str:
    return f"S({i})"


def c_label(i: int) -> str:
    """Closing points added on circle ``i`` by :func:`cycle_construction`."""
    return f"C({i})"


class ConstructionError(ValueError):
    """Raised when a construction cannot be realised with the given budget."""


class Slot(NamedTuple):
    """One position of a designated pattern.

    ``role`` is ``"free"`` (any vertex with the label), ``"det"`` (forced by
    an earlier choice), ``"pole"`` or ``"rich"`` (one end of a rich pair).
    """

    label: str
    role: str


# ---------------------------------------------------------------------------
# pattern bookkeeping


def _five_block(circle: int, first: str) -> list[Slot]:
    q = q_label(circle)
    return [Slot(q, first), Slot(n_label(circle), "pole"), Slot(q, "free"),
            Slot(s_label(circle), "pole"), Slot(q, "free")]


def _three_block(circle: int, first: str) -> list[Slot]:
    q = q_label(circle)
    return [Slot(q, first), Slot(n_label(circle), "pole"), Slot(q, "free")]


def _path_slots(length: int, first: str) -> list[Slot]:
    slots: list[Slot] = []
    circle = 0
    while len(slots) < length:
        block = _five_block(circle, first if circle == 0 else "det")
        slots.extend(block[: length - len(slots)])
        circle += 1
    return slots


def _cycle_blocks(length: int) -> list[int]:
    """Block sizes (5s then 3s) whose sum is ``length``."""
    for threes in range(5):
        rest = length - 3 * threes
        if rest >= 0 and rest % 5 == 0:
            return [5] * (rest // 5) + [3] * threes
    raise ConstructionError(f"no block decomposition for length {length}")


def _closing_label(circle: int, start_circle: int | None) -> str:
    """Label of the point on ``circle`` orthogonal to the cycle's first vertex.

    ``start_circle`` is the circle holding the first vertex, or ``None`` when
    it is a rich point, whose designated image lives on circle 0.
    """
    if start_circle is None:
        return q_label(0) if circle == 0 else c_label(circle)
    return q_label(circle) if circle == start_circle + 1 else c_label(circle)


def pattern_slots(k: int, kind: str = "path") -> tuple[tuple[Slot, ...], bool]:
    """Designated pattern for ``k`` vertices and whether it closes up.

    ``kind`` is ``"path"``, ``"enhanced-path"``, ``"cycle"`` or
    ``"enhanced-cycle"``.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if kind == "path":
        return tuple(_path_slots(k, "free")), False
    if kind == "enhanced-path":
        if k < 2:
            raise ValueError("an enhanced path needs at least the rich pair")
        rich = [Slot(RICH, "rich"), Slot(RICH, "rich")]
        return tuple(rich + _path_slots(k - 2, "det")), False
    if kind == "cycle":
        if k < 3:
            raise ValueError("cycles need k >= 3")
        if k == 4:
            return tuple(_path_slots(4, "free")), True
        return tuple(_blocks_to_slots(_cycle_blocks(k), first="free", start_circle=0)), True
    if kind == "enhanced-cycle":
        if k < 4:
            raise ValueError("enhanced cycles need k >= 4")
        rich = [Slot(RICH, "rich"), Slot(RICH, "rich")]
        body = _blocks_to_slots(_cycle_blocks(k - 2), first="det", start_circle=None)
        return tuple(rich + body), True
    raise ValueError(f"unknown pattern kind {kind!r}")


def _blocks_to_slots(blocks: Sequence[int], first: str, start_circle: int | None) -> list[Slot]:
    slots: list[Slot] = []
    for circle, size in enumerate(blocks):
        make = _five_block if size == 5 else _three_block
        slots.extend(make(circle, first if circle == 0 else "det"))
    last = len(blocks) - 1
    slots[-1] = Slot(_closing_label(last, start_circle), "det")
    return slots


def free_slot_count(k: int, kind: str = "path") -> int:
    """Number of free ``Q`` choices in the pattern (rich pair excluded)."""
    slots, _ = pattern_slots(k, kind)
    return sum(1 for s in slots if s.role == "free")


def circles_needed(k: int, kind: str = "path") -> int:
    slots, _ = pattern_slots(k, kind)
    used = [int(s.label[2:-1]) for s in slots if s.label != RICH]
    return max(used) + 1 if used else 0


# ---------------------------------------------------------------------------
# containers


@dataclass(frozen=True)
class SphereConfig:
    """Labelled directions on the radius-1/sqrt(2) sphere.

    ``circles[i]`` is the pole ``m_i`` of great circle ``K_i``.  ``pattern``
    and ``closed`` describe the designated structure the construction was
    built for; they are ``None``/``False`` for unstructured sets.
    """

    points: tuple[Direction, ...]
    labels: tuple[str, ...]
    circles: tuple[Direction, ...] = ()
    kind: str = "custom"
    k: int | None = None
    pattern: tuple[Slot, ...] | None = None
    closed: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if len(self.points) != len(self.labels):
            raise ValueError("points and labels differ in length")

    def __len__(self) -> int:
        return len(self.points)

    def indices(self, label: str) -> list[int]:
        return [i for i, lab in enumerate(self.labels) if lab == label]

    def q_size(self, circle: int = 0) -> int:
        return len(self.indices(q_label(circle)))

    def validate(self) -> None:
        """Check the structural invariants; raise ``ValueError`` on failure."""
        if len(set(self.points)) != len(self.points):
            raise ValueError("duplicate points")
        poles = {m.line_key() for m in self.circles}
        for p, lab in zip(self.points, self.labels):
            kind, _, rest = lab.partition("(")
            if kind in ("Q", "C"):
                i = int(rest[:-1])
                if p.dot(self.circles[i]) != 0:
                    raise ValueError(f"{p} labelled {lab} is off circle {i}")
                if p.line_key() in poles:
                    raise ValueError(f"{p} labelled {lab} is a pole")
            elif kind == "N" and p != self.circles[int(rest[:-1])]:
                raise ValueError(f"{lab} is not the pole")
            elif kind == "S" and p != -self.circles[int(rest[:-1])]:
                raise ValueError(f"{lab} is not the antipole")


@dataclass(frozen=True)
class PlanarScene:
    points: tuple[PlanarPoint, ...]
    lines: tuple[PlanarLine, ...]

    def __post_init__(self) -> None:
        if len(set(self.points)) != len(self.points):
            raise ValueError("duplicate points in scene")
        if len(set(self.lines)) != len(self.lines):
            raise ValueError("duplicate lines in scene")

    def incidences(self) -> list[tuple[int, int]]:
        """All ``(point index, line index)`` incident pairs, by brute force."""
        # clear denominators once: a*x + b*y + c = 0  <=>  a*xn*yd + b*yn*xd + c*xd*yd = 0
        pts = [(p.x.numerator * p.y.denominator, p.y.numerator * p.x.denominator,
                p.x.denominator * p.y.denominator) for p in self.points]
        return [(i, j) for j, l in enumerate(self.lines)
                for i, (x, y, d) in enumerate(pts) if l.a * x + l.b * y + l.c * d == 0]


@dataclass(frozen=True)
class BipartiteR3Config:
    line_points: tuple[R3Point, ...]
    circle_points: tuple[R3Point, ...]
    prescribed_lengths: tuple[tuple[Fraction, ...], ...]
    radius: Fraction

    @property
    def points(self) -> tuple[R3Point, ...]:
        return self.line_points + self.circle_points

    def validate(self) -> None:
        zs = [p.z for p in self.line_points]
        if any(p.x or p.y for p in self.line_points) or len(set(zs)) != len(zs):
            raise ValueError("line points must be distinct points of the z-axis")
        r2 = self.radius ** 2
        for c in self.circle_points:
            if c.z != 0 or c.x * c.x + c.y * c.y != r2:
                raise ValueError(f"{c} is off the circle")
        for i, lp in enumerate(self.line_points):
            for c in self.circle_points:
                for length in self.prescribed_lengths[i]:
                    if squared_distance_r3(lp, c) != length:
                        raise ValueError("prescribed length violated")


# ---------------------------------------------------------------------------
# sphere constructions


def circle_pole(i: int) -> Direction:
    """Deterministic pairwise non-parallel, pairwise non-orthogonal poles."""
    if i == 0:
        return Direction(0, 0, 1)
    return normalize(i, 1, i * i + 1)


def _poles(count: int) -> list[Direction]:
    poles = [circle_pole(i) for i in range(count)]
    keys = {m.line_key() for m in poles}
    if len(keys) != count:
        raise ConstructionError("circle poles are not pairwise non-parallel")
    return poles


def _designated(p: Direction, pole: Direction) -> Direction | None:
    v = cross(p.vector, pole.vector)
    return normalize(v) if any(v) else None


def _closer(first: Direction, pole: Direction) -> Direction | None:
    """Point of the circle with ``pole`` orthogonal to ``first``."""
    v = cross(pole.vector, first.vector)
    return normalize(v) if any(v) else None


def _build_chains(sources: Sequence[Direction], poles: Sequence[Direction],
                  closing: int | None, rich: bool,
                  reserved: Iterable[Direction] = ()) -> tuple[list[list[Direction]], list[Direction | None], list[int]]:
    """Propagate each source through all circles and drop colliding sources.

    Returns the chains (``chain[i]`` lies on circle ``i``), the closing point
    per kept source, and the indices of the kept sources.  A source is dropped
    when any point of its chain is a pole, or shares a line (up to sign) with
    an already accepted point; this keeps every designated map injective.
    """
    taken = {m.line_key() for m in poles}
    for r in reserved:
        taken.add(r.line_key())
    chains: list[list[Direction]] = []
    closers: list[Direction | None] = []
    kept: list[int] = []
    for idx, src in enumerate(sources):
        chain = [_designated(src, poles[0]) if rich else src]
        for pole in poles[1:]:
            if chain[-1] is None:
                break
            chain.append(_designated(chain[-1], pole))
        extra = _closer(src, poles[closing]) if closing is not None else None
        if chain[-1] is None or (closing is not None and extra is None):
            continue
        candidates = chain + ([extra] if extra is not None else []) + ([src] if rich else [])
        keys = [c.line_key() for c in candidates]
        if len(set(keys)) != len(keys) or any(key in taken for key in keys):
            continue
        taken.update(keys)
        chains.append(chain)
        closers.append(extra)
        kept.append(idx)
    return chains, closers, kept


def _assemble(chains, closers, poles, closing, rich_points=(), **kw) -> SphereConfig:
    points: list[Direction] = []
    labels: list[str] = []
    for q in rich_points:
        points.append(q)
        labels.append(RICH)
    for i, pole in enumerate(poles):
        points.append(pole)
        labels.append(n_label(i))
        points.append(-pole)
        labels.append(s_label(i))
        for chain in chains:
            points.append(chain[i])
            labels.append(q_label(i))
    if closing is not None:
        for c in closers:
            points.append(c)
            labels.append(c_label(closing))
    return SphereConfig(tuple(points), tuple(labels), tuple(poles), **kw)


def _circle_budget(k: int, n: int, circles: int, extra_sets: int = 0) -> int:
    """Points per circle ``m`` (poles included) within a budget of ``n``."""
    m = (5 * n) // (2 * k)
    # each extra set holds m - 2 points
    m = min(m, (n + 2 * extra_sets) // (circles + extra_sets))
    return m


def path_construction(k: int, n: int) -> SphereConfig:
    """Great-circle construction carrying many designated ``k``-paths.

    Uses ``ceil(2k/5)`` circles, each with its two poles and ``m - 2`` points
    where ``m = floor(5n / 2k)`` (capped so that at most ``n`` points are
    used).

    >>> cfg = path_construction(5, 50)
    >>> len(cfg.circles), cfg.q_size(0)
    (2, 23)
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if n < 5 * k:
        raise ConstructionError(f"n = {n} is too small for k = {k} (need n >= 5k)")
    circles = -(-2 * k // 5)
    m = _circle_budget(k, n, circles)
    return _sphere_from_q0(k, m, circles, kind="path", closing=None)


def _sphere_from_q0(k: int, m: int, circles: int, kind: str, closing: int | None) -> SphereConfig:
    if m < 3:
        raise ConstructionError(f"only {m} points per circle; need at least 3")
    poles = _poles(circles)
    sources = [normalize(t, 1, 0) for t in range(1, m - 1)]
    chains, closers, kept = _build_chains(sources, poles, closing, rich=False)
    if not chains:
        raise ConstructionError("injectivity filtering removed every point of Q(0)")
    pattern, closed = pattern_slots(k, kind)
    meta = {"m": m, "dropped_sources": len(sources) - len(kept)}
    return _assemble(chains, closers, poles, closing, kind=kind, k=k,
                     pattern=pattern, closed=closed, meta=meta)


# ---------------------------------------------------------------------------
# rich sets


def grid_incidence_scene(N: int) -> PlanarScene:
    """Points ``[N] x [2N^2]`` and lines ``y = a x + b``, ``a in [N], b in [N^2]``.

    Every line meets exactly ``N`` grid points, so there are ``N^4``
    incidences among ``3 N^3`` objects.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    points = tuple(PlanarPoint.of(i, j) for i in range(1, N + 1) for j in range(1, 2 * N * N + 1))
    lines = tuple(PlanarLine.of(a, -1, b) for a in range(1, N + 1) for b in range(1, N * N + 1))
    return PlanarScene(points, lines)


def lift_scene(scene: PlanarScene) -> tuple[list[Direction], list[Direction]]:
    return [lift_point(p) for p in scene.points], [lift_line(l) for l in scene.lines]


AXES = (Direction(1, 0, 0), Direction(0, 1, 0), Direction(0, 0, 1))


def rich_q_set(m: int) -> SphereConfig:
    """At most ``m`` directions with many orthogonal pairs.

    The lifted grid scene with the largest ``N >= 2`` such that ``3N^3 <= m``;
    its orthogonal pairs are exactly the incidences of the scene.  Below 24
    points the three coordinate axes are returned instead.
    """
    if m < 3:
        raise ValueError("a rich set needs m >= 3")
    N = 1
    while 3 * (N + 1) ** 3 <= m:
        N += 1
    if N < 2:
        return SphereConfig(AXES, (RICH,) * 3, kind="rich", meta={"grid_N": None})
    pts, lns = lift_scene(grid_incidence_scene(N))
    points = tuple(pts + lns)
    return SphereConfig(points, (RICH,) * len(points), kind="rich",
                        meta={"grid_N": N, "n_points": len(pts), "n_lines": len(lns)})


def quaternion_matrix(w: int, x: int, y: int, z: int) -> tuple[tuple[int, ...], ...]:
    """Integer matrix of the rotation by quaternion ``(w, x, y, z)``.

    ``M M^T = (w^2 + x^2 + y^2 + z^2)^2 I``, so orthogonality is preserved.
    """
    return (
        (w * w + x * x - y * y - z * z, 2 * (x * y - w * z), 2 * (x * z + w * y)),
        (2 * (x * y + w * z), w * w - x * x + y * y - z * z, 2 * (y * z - w * x)),
        (2 * (x * z - w * y), 2 * (y * z + w * x), w * w - x * x - y * y + z * z),
    )


def _rotate(d: Direction, M) -> Direction:
    v = d.vector
    return normalize(*(sum(M[r][c] * v[c] for c in range(3)) for r in range(3)))


_QUATERNIONS = [(w, x, y, z) for w in range(1, 4) for x in range(0, 4)
                for y in range(1, 4) for z in range(1, 5)]


def _rotated_rich(rich: Sequence[Direction], poles: Sequence[Direction]):
    """Rotate the rich set so that its images on circle 0 are injective."""
    best = None
    for quat in _QUATERNIONS:
        M = quaternion_matrix(*quat)
        rotated = [_rotate(d, M) for d in rich]
        _, _, kept = _build_chains(rotated, poles, None, rich=True)
        if best is None or len(kept) > len(best[1]):
            best = (rotated, kept, quat)
        if len(kept) == len(rich):
            break
    return best


def enhanced_path_construction(k: int, n: int) -> SphereConfig:
    """Path construction for ``k - 2`` preceded by a rich set on the sphere.

    Every rich point has a designated neighbour in ``Q(0)`` (``Q(0)`` is the
    image of the rich set), so each ordered orthogonal pair ``(q1, q2)`` of
    the rich set starts many designated ``k``-paths.  ``k = 2`` returns the
    rich set alone.
    """
    if k % 5 != 2:
        raise ValueError("the rich-set enhancement applies to k = 2 (mod 5)")
    if k == 2:
        cfg = rich_q_set(n)
        return SphereConfig(cfg.points, cfg.labels, kind="enhanced-path", k=2,
                            pattern=pattern_slots(2, "enhanced-path")[0], meta=cfg.meta)
    return _enhanced(k, n, kind="enhanced-path")


def _enhanced(k: int, n: int, kind: str) -> SphereConfig:
    if n < 5 * k:
        raise ConstructionError(f"n = {n} is too small for k = {k} (need n >= 5k)")
    pattern, closed = pattern_slots(k, kind)
    chain_circles = -(-2 * (k - 2) // 5)
    closing = None
    if closed:
        closing = circles_needed(k, kind) - 1
        if pattern[-1].label == q_label(0):
            closing = None
    sets = chain_circles + 1 + (closing is not None)
    size = min((5 * n) // (2 * k), (n - 2 * chain_circles) // sets)
    if size < 3:
        raise ConstructionError(f"rich set budget {size} is below 3")
    poles = _poles(chain_circles)
    rich_cfg = rich_q_set(size)
    rotated, _, quat = _rotated_rich(rich_cfg.points, poles)
    chains, closers, kept = _build_chains(rotated, poles, closing, rich=True)
    if not chains:
        raise ConstructionError("injectivity filtering removed the whole rich set")
    rich_points = [rotated[i] for i in kept]
    meta = dict(rich_cfg.meta)
    meta.update({"rich_budget": size, "rotation": quat,
                 "dropped_sources": len(rotated) - len(kept)})
    return _assemble(chains, closers, poles, closing, rich_points=rich_points,
                     kind=kind, k=k, pattern=pattern, closed=closed, meta=meta)


def cycle_construction(k: int, n: int) -> SphereConfig:
    """Construction whose designated patterns close up into ``k``-cycles.

    The cycle is a chain of blocks ending on circle ``b``; its last vertex is
    the point of ``K_b`` orthogonal to the first vertex.  When that point is
    not already a designated image, circle ``b`` is augmented with one
    closing point ``C(b)`` per first vertex.  ``k = 2 (mod 5)`` uses the
    rich-set enhancement.
    """
    if k < 3:
        raise ValueError("cycles need k >= 3")
    if k % 5 == 2 and k >= 7:
        return _enhanced(k, n, kind="enhanced-cycle")
    if n < 5 * k:
        raise ConstructionError(f"n = {n} is too small for k = {k} (need n >= 5k)")
    pattern, _ = pattern_slots(k, "cycle")
    circles = max(-(-2 * k // 5), circles_needed(k, "cycle"))
    closing = None
    if pattern[-1].label.startswith("C"):
        closing = circles_needed(k, "cycle") - 1
    m = _circle_budget(k, n, circles, extra_sets=closing is not None)
    return _sphere_from_q0(k, m, circles, kind="cycle", closing=closing)


def quadratic_c4_config(n: int) -> SphereConfig:
    """One great circle with both poles and ``n - 2`` points on it.

    Every pair ``{p, q}`` of circle points gives the 4-cycle ``(N, p, S, q)``.
    """
    if n < 4:
        raise ValueError("need n >= 4")
    pole = circle_pole(0)
    q = [normalize(t, 1, 0) for t in range(1, n - 1)]
    points = (pole, -pole, *q)
    labels = (n_label(0), s_label(0)) + (q_label(0),) * len(q)
    return SphereConfig(points, labels, (pole,), kind="quadratic-c4", k=4,
                        pattern=pattern_slots(4, "cycle")[0], closed=True)


# ---------------------------------------------------------------------------
# R^3


def bipartite_r3_construction(k: int, n: int, heights: Sequence[RationalLike] | None = None,
                              r_param: RationalLike = 1,
                              t_params: Sequence[RationalLike] | None = None) -> BipartiteR3Config:
    """``k/2`` points on the z-axis and ``n - k/2`` on a circle around it.

    Circle points use the rational parametrisation
    ``(r(1 - t^2)/(1 + t^2), 2rt/(1 + t^2), 0)``; ``t_params`` defaults to
    ``0, 1, 2, ...``.  The squared distance from the line point at height
    ``h`` to any circle point is ``h^2 + r^2``.
    """
    if k % 2 or k < 2:
        raise ValueError("k must be a positive even integer")
    half = k // 2
    if n <= k:
        raise ValueError("need n > k")
    hs = [as_fraction(h) for h in (heights if heights is not None else range(half))]
    if len(hs) != half:
        raise ValueError(f"expected {half} heights")
    if len(set(hs)) != half:
        raise ValueError("duplicate heights")
    r = as_fraction(r_param)
    if r <= 0:
        raise ValueError("radius must be positive")
    count = n - half
    ts = [as_fraction(t) for t in (t_params if t_params is not None else range(count))]
    if len(ts) != count:
        raise ValueError(f"expected {count} circle parameters")
    if len(set(ts)) != count:
        raise ValueError("duplicate circle parameters")
    line_points = tuple(R3Point(Fraction(0), Fraction(0), h) for h in hs)
    circle_points = tuple(
        R3Point(r * (1 - t * t) / (1 + t * t), 2 * r * t / (1 + t * t), Fraction(0)) for t in ts
    )
    lengths = tuple(tuple([h * h + r * r] * half) for h in hs)
    return BipartiteR3Config(line_points, circle_points, lengths, r)


def falling_factorial(x: int, j: int) -> int:
    out = 1
    for i in range(j):
        out *= x - i
    return out


def binom(n: int, r: int) -> int:
    return math.comb(n, r) if 0 <= r <= n else 0
