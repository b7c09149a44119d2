"""Exact predicates on the sphere of radius 1/sqrt(2), the plane and R^3.

A sphere point is stored as a primitive integer direction ``d``; the actual
point is ``d / (sqrt(2) |d|)``.  On this sphere two points are at distance one
exactly when their position vectors are orthogonal, so every predicate below
reduces to integer arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, NamedTuple, Union

RationalLike = Union[int, Fraction, str]


def as_fraction(value: RationalLike) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected: every coordinate in this package is exact.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not coordinates")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def _primitive(values: Iterable[RationalLike]) -> tuple[int, ...]:
    values = tuple(values)
    if all(type(v) is int for v in values):
        g = math.gcd(*values)
        if g == 0:
            raise ValueError("zero vector has no direction")
        return tuple(v // g for v in values)
    fracs = [as_fraction(v) for v in values]
    den = math.lcm(*(f.denominator for f in fracs))
    ints = [int(f * den) for f in fracs]
    g = math.gcd(*ints)
    if g == 0:
        raise ValueError("zero vector has no direction")
    return tuple(v // g for v in ints)


@dataclass(frozen=True, slots=True)
class Direction:
    """A point on the radius-1/sqrt(2) sphere, as a primitive integer triple.

    Only positive rescaling is factored out, so ``Direction(1, 0, 0)`` and
    ``Direction(-1, 0, 0)`` are distinct (antipodal) points.  Use
    :func:`normalize` to build one from an arbitrary triple.
    """

    a: int
    b: int
    c: int

    def __post_init__(self) -> None:
        for v in (self.a, self.b, self.c):
            if not isinstance(v, int) or isinstance(v, bool):
                raise TypeError("Direction components must be ints; use normalize()")
        if math.gcd(self.a, self.b, self.c) != 1:
            raise ValueError(
                f"({self.a}, {self.b}, {self.c}) is not primitive; use normalize()"
            )

    def __iter__(self):
        return iter((self.a, self.b, self.c))

    def __neg__(self) -> "Direction":
        return Direction(-self.a, -self.b, -self.c)

    @property
    def vector(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)

    def dot(self, other: "Direction") -> int:
        return self.a * other.a + self.b * other.b + self.c * other.c

    def line_key(self) -> tuple[int, int, int]:
        """Key identifying the direction up to sign (the line through it)."""
        v = self.vector
        return v if v > (0, 0, 0) else (-v[0], -v[1], -v[2])


def normalize(*triple: RationalLike) -> Direction:
    """Reduce a nonzero integer or rational triple to a :class:`Direction`.

    Accepts either three arguments or a single iterable.

    >>> normalize(2, 4, 6)
    Direction(a=1, b=2, c=3)
    >>> normalize(-3, 0, 3)
    Direction(a=-1, b=0, c=1)
    """
    if len(triple) == 1:
        triple = tuple(triple[0])
    if len(triple) != 3:
        raise ValueError("a direction needs exactly three components")
    return Direction(*_primitive(triple))


def cross(u, v) -> tuple[int, int, int]:
    ua, ub, uc = u
    va, vb, vc = v
    return (ub * vc - uc * vb, uc * va - ua * vc, ua * vb - ub * va)


def is_unit_distance_sphere(p: Direction, q: Direction) -> bool:
    """True iff ``p`` and ``q`` are at distance one on the sphere."""
    return p.dot(q) == 0


def is_antipodal(p: Direction, q: Direction) -> bool:
    return p.a == -q.a and p.b == -q.b and p.c == -q.c


class TwoPoints(NamedTuple):
    first: Direction
    second: Direction


class Circle(NamedTuple):
    """Every point of the great circle with this pole."""

    pole: Direction


class Degenerate(NamedTuple):
    """Both inputs coincide; the common neighbours form its polar circle."""

    pole: Direction


def common_unit_neighbors(p: Direction, q: Direction) -> TwoPoints | Circle | Degenerate:
    """Points at unit distance from both ``p`` and ``q``.

    Two non-antipodal, distinct points have exactly the two common neighbours
    ``+-cross(p, q)``; an antipodal pair shares its whole polar great circle.
    """
    if p == q:
        return Degenerate(p)
    if is_antipodal(p, q):
        return Circle(p)
    d = normalize(cross(p.vector, q.vector))
    return TwoPoints(d, -d)


class PlanarPoint(NamedTuple):
    x: Fraction
    y: Fraction

    @classmethod
    def of(cls, x: RationalLike, y: RationalLike) -> "PlanarPoint":
        return cls(as_fraction(x), as_fraction(y))


@dataclass(frozen=True, slots=True)
class PlanarLine:
    """The line ``a x + b y + c = 0`` in primitive integer form.

    The orientation of ``(a, b, c)`` is kept, since it selects which pole of
    the lifted great circle represents the line.
    """

    a: int
    b: int
    c: int

    @classmethod
    def of(cls, a: RationalLike, b: RationalLike, c: RationalLike) -> "PlanarLine":
        fa, fb = as_fraction(a), as_fraction(b)
        if fa == 0 and fb == 0:
            raise ValueError("a line needs (a, b) != (0, 0)")
        return cls(*_primitive((fa, fb, c)))

    def contains(self, p: PlanarPoint) -> bool:
        return self.a * p.x + self.b * p.y + self.c == 0


class R3Point(NamedTuple):
    x: Fraction
    y: Fraction
    z: Fraction

    @classmethod
    def of(cls, x: RationalLike, y: RationalLike, z: RationalLike) -> "R3Point":
        return cls(as_fraction(x), as_fraction(y), as_fraction(z))


def lift_point(p: PlanarPoint) -> Direction:
    """Central projection of the plane ``z = 1`` onto the sphere."""
    return normalize(p.x, p.y, 1)


def lift_line(line: PlanarLine) -> Direction:
    """Pole of the great circle through the lifted line.

    ``lift_point(p)`` is orthogonal to ``lift_line(l)`` exactly when ``p``
    lies on ``l``; ``-lift_line(l)`` is the other admissible pole.
    """
    return Direction(line.a, line.b, line.c)


def squared_distance_r3(p: R3Point, q: R3Point) -> Fraction:
    dx, dy, dz = p.x - q.x, p.y - q.y, p.z - q.z
    return dx * dx + dy * dy + dz * dz


def format_rational(value: RationalLike, always_ratio: bool = False) -> str:
    """``"num/den"``, with the denominator dropped when it is one unless
    ``always_ratio`` is set."""
    f = as_fraction(value)
    if f.denominator == 1 and not always_ratio:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"
