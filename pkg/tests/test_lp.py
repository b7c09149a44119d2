import json
import random
from fractions import Fraction

import pytest

from udpaths.constructions import bipartite_r3_construction
from udpaths.geometry import R3Point
from udpaths.graph import K33, K4, PRISM, RegularGraphSpec
from udpaths.lp import (
    TypePair,
    base_case_check,
    candidate_pairs,
    class_counts,
    closed_form_x,
    enumerate_vertices_xi,
    is_realizable,
    solve_xi,
    verify_theorem3,
    violated_rows,
)

F = Fraction
CUBE = RegularGraphSpec.from_edges(
    [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4), (0, 4), (1, 5), (2, 6), (3, 7)], 8)


# Examples below use 0-based vertex indices; vertex "1" of a 1-based
# description is vertex 0 here.


def test_realizable_all_isolated():
    assert is_realizable(TypePair.of(K4, [], (3, 3, 3, 3)))


def test_zero_lambda_needs_full_h_degree():
    r = is_realizable(TypePair.of(K4, [], (3, 0, 3, 3)))
    assert not r and 1 in r.violations["v"]


def test_single_h_edge_example():
    r = is_realizable(TypePair.of(K4, [(0, 1)], (2, 0, 3, 3)))
    assert not r
    assert 0 not in r.violations.get("ii", [])
    assert 1 in r.violations["v"]


def test_type_pair_validation():
    with pytest.raises(ValueError):
        TypePair.of(K33, [(0, 1)], (1,) * 6)  # (0, 1) is not an edge of K_{3,3}
    with pytest.raises(ValueError):
        TypePair.of(K4, [], (4, 1, 1, 1))


def test_xi_all_isolated_k4():
    out = solve_xi(TypePair.of(K4, [], (3, 3, 3, 3)))
    assert out.xi == 2
    assert not violated_rows(TypePair.of(K4, [], (3, 3, 3, 3)), out.x_witness)
    assert out.closed_form_x == (F(1, 6),) * 4
    assert out.closed_form_objective == 2


def test_xi_all_zero_k4():
    tp = TypePair.of(K4, K4.edges, (0, 0, 0, 0))
    assert is_realizable(tp)
    assert solve_xi(tp).xi == 0


def test_closed_form_x_examples():
    # vertex 0: lam 3, isolated; vertex 1 of a path H: lam 1, degree 2
    tp = TypePair.of(K4, [(1, 2), (1, 3)], (3, 1, 2, 0))
    x = closed_form_x(tp)
    assert x[0] == F(1, 6)
    assert x[1] == F(5, 6)
    assert x[2] == F(1, 3)
    assert x[3] == 0


def test_class_counts_isolated():
    cc = class_counts(TypePair.of(K4, [], (3, 3, 3, 3)))
    assert cc.counts == (4, 0, 0, 0, 0, 0)
    assert cc.double_count_identity and cc.size_identity
    assert cc.printed_objective == cc.derived_objective == 2


def test_class_counts_only_isolated_gives_half():
    for lam in ((1, 1, 1, 1), (3, 1, 3, 1)):
        tp = TypePair.of(K4, [], lam)
        cc = class_counts(tp)
        assert cc.counts[1:] == (0, 0, 0, 0, 0)
        assert solve_xi(tp).closed_form_objective == F(cc.counts[0], 2) <= 2


def _realizable(G):
    return [tp for tp in candidate_pairs(G) if is_realizable(tp)]


def test_candidate_filter_loses_nothing_on_k4():
    # brute force over all 2^6 * 4^4 pairs
    from itertools import product
    edges = list(K4.edges)
    full = set()
    for mask in range(1 << len(edges)):
        H = [e for b, e in enumerate(edges) if mask >> b & 1]
        for lam in product(range(4), repeat=4):
            tp = TypePair.of(K4, H, lam)
            if is_realizable(tp):
                full.add(tp.encoding())
    assert full == {tp.encoding() for tp in _realizable(K4)}


@pytest.mark.parametrize("G", [K4, K33, PRISM], ids=["K4", "K33", "prism"])
def test_simplex_matches_vertex_enumeration(G):
    pairs = _realizable(G)
    rng = random.Random(1)
    sample = pairs if len(pairs) <= 40 else rng.sample(pairs, 40)
    for tp in sample:
        out = solve_xi(tp)
        assert out.feasible
        assert out.xi == enumerate_vertices_xi(tp)
        assert sum(l * x for l, x in zip(tp.lam, out.x_witness)) == out.xi
        assert out.xi <= out.closed_form_objective


def test_dual_certificate():
    tp = TypePair.of(PRISM, [], (3, 3, 3, 3, 3, 3))
    out = solve_xi(tp)
    assert sum(out.dual_certificate) == out.xi
    assert all(y >= 0 for y in out.dual_certificate)


def test_sweep_k4():
    rep = verify_theorem3(K4)
    assert rep.ok
    assert rep.max_xi == 2
    assert rep.argmax.H == frozenset() and rep.argmax.lam == (3, 3, 3, 3)
    cert = json.loads(rep.to_json())
    assert cert["max_xi"] == "2/1"
    assert "waived" in cert["interpretation"]


@pytest.mark.parametrize("G", [K33, PRISM, CUBE], ids=["K33", "prism", "cube"])
def test_sweep_half_k(G):
    rep = verify_theorem3(G)
    assert rep.ok
    assert rep.max_xi <= F(G.k, 2)


def test_corrected_class_formula_matches_closed_form():
    for G in (K4, K33):
        for tp in _realizable(G):
            out = solve_xi(tp)
            assert class_counts(tp).derived_objective == out.closed_form_objective


def test_identity_holds_where_expected():
    for G in (K4, K33, PRISM):
        for tp in _realizable(G):
            cc = class_counts(tp)
            if cc.identity_expected:
                assert cc.double_count_identity


def test_sweep_rejects_non_cubic():
    with pytest.raises(ValueError):
        verify_theorem3(RegularGraphSpec.from_edges([(0, 1), (1, 2), (2, 0)], 3))


def test_base_case_tetrahedron():
    h = R3Point.of
    pts = [h(1, 1, 1), h(1, -1, -1), h(-1, 1, -1), h(-1, -1, 1)]
    lengths = {e: F(8) for e in K4.edges}
    res = base_case_check(K4, [[p] for p in pts], lengths)
    assert res.precondition_ok and res.ok and res.small_parts == 4


def test_base_case_bipartite_instance():
    cfg = bipartite_r3_construction(6, 3 + 6)
    line, circle = K33.bipartition()
    parts = [None] * 6
    lengths = {}
    for s, v in enumerate(line):
        parts[v] = [cfg.line_points[s]]
    for s, v in enumerate(circle):
        parts[v] = list(cfg.circle_points[2 * s:2 * s + 2])
    for a, b in K33.edges:
        slot = line.index(a) if a in line else line.index(b)
        lengths[(a, b)] = cfg.prescribed_lengths[slot][0]
    res = base_case_check(K33, parts, lengths)
    assert res.precondition_ok and res.ok


def test_base_case_precondition_failure():
    pts = [R3Point.of(0, 0, i) for i in range(4)]
    res = base_case_check(K4, [[p] for p in pts])
    assert not res.precondition_ok and not res.ok
