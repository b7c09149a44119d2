from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from udpaths.geometry import (
    Circle,
    Degenerate,
    Direction,
    PlanarLine,
    PlanarPoint,
    R3Point,
    TwoPoints,
    as_fraction,
    common_unit_neighbors,
    cross,
    format_rational,
    is_antipodal,
    is_unit_distance_sphere,
    lift_line,
    lift_point,
    normalize,
    squared_distance_r3,
)

ints = st.integers(-30, 30)
triples = st.tuples(ints, ints, ints).filter(any)


def test_normalize_examples():
    assert normalize(2, 4, 6) == Direction(1, 2, 3)
    assert normalize(-3, 0, 3) == Direction(-1, 0, 1)
    assert normalize(Fraction(1, 2), Fraction(1, 3), 0) == Direction(3, 2, 0)
    assert normalize("1/2", 0, 0) == Direction(1, 0, 0)


def test_normalize_rejects_zero_and_floats():
    with pytest.raises(ValueError):
        normalize(0, 0, 0)
    with pytest.raises(TypeError):
        normalize(0.5, 1, 0)
    with pytest.raises(TypeError):
        as_fraction(True)


def test_direction_requires_primitive():
    with pytest.raises(ValueError):
        Direction(2, 4, 6)


def test_unit_distance_examples():
    x, y, z = Direction(1, 0, 0), Direction(0, 1, 0), Direction(0, 0, 1)
    assert is_unit_distance_sphere(x, y)
    assert not is_unit_distance_sphere(x, normalize(1, 1, 0))
    assert not is_unit_distance_sphere(x, -x)
    assert is_antipodal(x, -x)
    assert not is_antipodal(x, x)


def test_common_neighbors_cases():
    x, y, z = Direction(1, 0, 0), Direction(0, 1, 0), Direction(0, 0, 1)
    assert common_unit_neighbors(x, y) == TwoPoints(z, -z)
    assert common_unit_neighbors(x, -x) == Circle(x)
    assert common_unit_neighbors(x, x) == Degenerate(x)


@given(triples, triples)
def test_common_neighbors_are_orthogonal(u, v):
    p, q = normalize(u), normalize(v)
    res = common_unit_neighbors(p, q)
    if isinstance(res, TwoPoints):
        for r in res:
            assert p.dot(r) == 0 and q.dot(r) == 0


@given(triples)
def test_normalize_is_idempotent_and_scale_free(t):
    d = normalize(t)
    assert normalize(d) == d
    assert normalize(tuple(7 * c for c in t)) == d
    assert normalize(tuple(-c for c in t)) == -d


@given(st.integers(-20, 20), st.integers(-20, 20), ints, ints, ints)
def test_lift_preserves_incidence(x, y, a, b, c):
    if a == 0 and b == 0:
        return
    p = PlanarPoint.of(x, y)
    line = PlanarLine.of(a, b, c)
    assert line.contains(p) == (lift_point(p).dot(lift_line(line)) == 0)


def test_lift_examples():
    assert lift_point(PlanarPoint.of(0, 0)) == Direction(0, 0, 1)
    assert lift_line(PlanarLine.of(1, -1, 0)) == Direction(1, -1, 0)
    assert lift_point(PlanarPoint.of("1/2", "1/3")) == Direction(3, 2, 6)


def test_r3_distance_and_format():
    p = R3Point.of(0, 0, 0)
    q = R3Point.of("1/2", "1/2", "1/2")
    assert squared_distance_r3(p, q) == Fraction(3, 4)
    assert format_rational(Fraction(3, 4)) == "3/4"
    assert format_rational(Fraction(4, 2)) == "2"


def test_cross_is_orthogonal():
    u, v = (1, 2, 3), (4, 5, 6)
    w = cross(u, v)
    assert sum(a * b for a, b in zip(u, w)) == 0 == sum(a * b for a, b in zip(v, w))
