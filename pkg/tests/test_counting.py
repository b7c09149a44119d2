import json
import random
from itertools import permutations
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from udpaths import _fast
from udpaths.constructions import (
    bipartite_r3_construction,
    cycle_construction,
    enhanced_path_construction,
    path_construction,
    quadratic_c4_config,
    SphereConfig,
)
from udpaths.counting import (
    automorphism_count,
    closed_form_pattern_count,
    closed_form_prescribed_count,
    count_antipodal_free_paths,
    count_cycles,
    count_paths,
    count_pattern_paths,
    count_prescribed_copies,
    count_subgraph_copies,
    full_report,
    ordered_rich_pairs,
    predicted_pattern_count,
)
from udpaths.geometry import Direction
from udpaths.graph import (
    K33,
    K4,
    PRISM,
    RegularGraphSpec,
    build_prescribed_graph,
    build_r3_graph,
    build_sphere_graph,
    complete_bipartite,
    complete_graph,
    cycle_graph,
    disjoint_parts,
    graph_from_edges,
)

TRIANGLE = graph_from_edges(3, [(0, 1), (1, 2), (0, 2)])


def random_graph(rng, n, p):
    return graph_from_edges(n, [(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < p])


def brute_paths(g, k):
    n = g.vertex_count
    return sum(1 for seq in permutations(range(n), k)
               if all(g.has_edge(seq[i], seq[i + 1]) for i in range(k - 1)))


def test_triangle_paths():
    r3 = count_paths(TRIANGLE, 3)
    assert (r3.ordered_paths, r3.unordered_paths) == (6, 3)
    assert count_paths(TRIANGLE, 2).unordered_paths == 3


def test_k_below_one_rejected():
    with pytest.raises(ValueError):
        count_paths(TRIANGLE, 0)


def test_quadratic_paths_match_oracle():
    g = build_sphere_graph(quadratic_c4_config(5))
    assert count_paths(g, 3).ordered_paths == count_paths(g, 3, engine="naive").ordered_paths == brute_paths(g, 3)


def test_antipodal_free_small_quadratic():
    cfg = quadratic_c4_config(5)
    g = build_sphere_graph(cfg)
    (a, b), = g.antipodal_pairs
    total = count_paths(g, 3).unordered_paths
    free = count_antipodal_free_paths(g, 3)
    # only the paths pole-circle-pole are removed, one per circle point
    assert total - free == 3
    assert free == count_antipodal_free_paths(g, 3, engine="naive")


def test_antipodal_free_without_pairs_equals_total():
    g = build_sphere_graph([Direction(1, 0, 0), Direction(0, 1, 0), Direction(0, 0, 1)])
    assert count_antipodal_free_paths(g, 3) == count_paths(g, 3).unordered_paths


def test_antipodal_free_needs_side_data():
    with pytest.raises(ValueError):
        count_antipodal_free_paths(TRIANGLE, 3)


def test_cycles_examples():
    assert count_cycles(graph_from_edges(4, K4.edges), 3) == 4
    assert count_cycles(build_sphere_graph(quadratic_c4_config(10)), 4) == 28
    kb = graph_from_edges(6, complete_bipartite(3, 3).edges)
    assert count_cycles(kb, 3) == 0
    with pytest.raises(ValueError):
        count_cycles(TRIANGLE, 2)


@pytest.mark.parametrize("n", [4, 5, 10, 20])
def test_quadratic_c4_closed_form(n):
    g = build_sphere_graph(quadratic_c4_config(n))
    assert count_cycles(g, 4) == count_cycles(g, 4, engine="naive") == comb(n - 2, 2)


def test_pattern_examples():
    assert closed_form_pattern_count(5, 7) == 7 ** 3
    assert closed_form_pattern_count(4, 7) == 7 ** 2
    assert closed_form_pattern_count(7, 5, E=16) == 400
    for k in range(1, 12):
        if k % 5 != 2:
            assert closed_form_pattern_count(k, 1) == 1


def test_enhanced_pattern_n2_grid():
    cfg = enhanced_path_construction(7, 80)
    assert cfg.meta["grid_N"] == 2 and ordered_rich_pairs(cfg) == 32
    q = cfg.q_size(0)
    assert count_pattern_paths(cfg, distinct=False) == 32 * q ** 2


@pytest.mark.parametrize("k", range(3, 11))
def test_pattern_exactness_paths(k):
    for n in (5 * k + 10, 8 * k + 20):
        cfg = path_construction(k, n) if k % 5 != 2 else enhanced_path_construction(k, max(n, 80))
        g = build_sphere_graph(cfg)
        for distinct in (False, True):
            assert count_pattern_paths(cfg, graph=g, distinct=distinct) == predicted_pattern_count(cfg, distinct)


@pytest.mark.parametrize("k", range(4, 11))
def test_pattern_exactness_cycles(k):
    cfg = cycle_construction(k, 6 * k + 10 if k % 5 != 2 else 90)
    g = build_sphere_graph(cfg)
    for distinct in (False, True):
        assert count_pattern_paths(cfg, graph=g, distinct=distinct) == predicted_pattern_count(cfg, distinct)


@pytest.mark.parametrize("k", [3, 4, 5, 6])
def test_pattern_soundness(k):
    cfg = path_construction(k, 40)
    g = build_sphere_graph(cfg)
    assert count_pattern_paths(cfg, graph=g) <= count_paths(g, k).unordered_paths


def test_pattern_needs_labels():
    cfg = SphereConfig((Direction(1, 0, 0), Direction(0, 1, 0)), ("x", "y"))
    with pytest.raises(ValueError):
        count_pattern_paths(cfg, k=2)


def test_monotone_under_point_addition():
    cfg = path_construction(5, 40)
    dirs = list(cfg.points)
    extra = Direction(1, 2, 3)
    assert extra not in dirs
    small = build_sphere_graph(dirs)
    big = build_sphere_graph(dirs + [extra])
    for k in (3, 4, 5):
        assert count_paths(big, k).ordered_paths >= count_paths(small, k).ordered_paths
        assert count_antipodal_free_paths(big, k) >= count_antipodal_free_paths(small, k)
    for k in (3, 4, 5):
        assert count_cycles(big, k) >= count_cycles(small, k)


def test_oracle_equivalence_with_antipodes():
    for k in (3, 5, 7):
        cfg = path_construction(k, 60)
        g = build_sphere_graph(cfg)
        for kk in range(1, 7):
            a = full_report(g, kk, engine="naive")
            b = full_report(g, kk, engine="optimized")
            assert a.ordered_paths == b.ordered_paths
            assert a.antipodal_free_unordered == b.antipodal_free_unordered
            assert a.cycles_dihedral == b.cycles_dihedral


@pytest.mark.parametrize("backend", ["python", "compiled"])
def test_backends_match_naive_on_random_graphs(backend):
    if backend == "compiled" and not _fast.available():
        pytest.skip("numba not installed")
    rng = random.Random(7)
    for _ in range(30):
        g = random_graph(rng, rng.randint(3, 16), 0.3)
        for k in range(1, 8):
            assert (count_paths(g, k, backend=backend).ordered_paths
                    == count_paths(g, k, engine="naive").ordered_paths)
            if k >= 3:
                assert count_cycles(g, k, backend=backend) == count_cycles(g, k, engine="naive")


def test_naive_matches_permutation_brute_force():
    rng = random.Random(11)
    for _ in range(10):
        g = random_graph(rng, 7, 0.4)
        for k in range(1, 6):
            assert count_paths(g, k, engine="naive").ordered_paths == brute_paths(g, k)


def test_result_independent_of_worker_count():
    g = build_sphere_graph(path_construction(5, 60))
    one = count_paths(g, 5, n_jobs=1, backend="python").ordered_paths
    two = count_paths(g, 5, n_jobs=2, backend="python").ordered_paths
    assert one == two


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 12), st.floats(0.1, 0.8), st.integers(0, 10 ** 6), st.integers(2, 6))
def test_report_invariants(n, p, seed, k):
    g = random_graph(random.Random(seed), n, p)
    r = count_paths(g, k)
    assert r.ordered_paths % 2 == 0
    assert r.unordered_paths * 2 == r.ordered_paths


def test_report_json_uses_strings():
    g = build_sphere_graph(quadratic_c4_config(8))
    data = json.loads(full_report(g, 4).to_json())
    assert isinstance(data["ordered_paths"], str)
    assert data["cycles_dihedral"] == str(comb(6, 2))


def test_big_counts_fall_back_to_python():
    # K_30 with k = 14 has about 30 * 29^13 paths, beyond the int64 guard
    g = graph_from_edges(30, complete_graph(30).edges)
    assert not _fast.fits_int64(g.adjacency, 14)
    with pytest.raises(ValueError):
        count_paths(g, 14, backend="compiled")


def test_k_larger_than_graph():
    assert count_paths(TRIANGLE, 4).ordered_paths == 0


# --- subgraph copies -------------------------------------------------------


def test_copies_k4_in_k4():
    g = graph_from_edges(4, K4.edges)
    assert count_subgraph_copies(g, K4) == 1
    assert count_subgraph_copies(g, K4, induced=True) == 1


def test_copies_c4_equal_cycles():
    g = build_sphere_graph(quadratic_c4_config(10))
    assert count_subgraph_copies(g, cycle_graph(4)) == 28
    rng = random.Random(5)
    for _ in range(15):
        h = random_graph(rng, 9, 0.4)
        for k in (3, 4, 5, 6):
            assert count_subgraph_copies(h, cycle_graph(k)) == count_cycles(h, k)


def test_copies_induced_is_smaller():
    g = graph_from_edges(4, K4.edges)
    assert count_subgraph_copies(g, cycle_graph(4)) == 3
    assert count_subgraph_copies(g, cycle_graph(4), induced=True) == 0


def test_copies_too_big_pattern():
    assert count_subgraph_copies(TRIANGLE, K4) == 0


def test_k33_in_r3_bipartite_graph_impossible():
    cfg = bipartite_r3_construction(6, 12)
    g = build_r3_graph(cfg.points, 1)
    assert count_subgraph_copies(g, K33) == 0


def test_automorphisms():
    assert automorphism_count(K4) == 24
    assert automorphism_count(K33) == 72
    assert automorphism_count(PRISM) == 12


def _k33_prescribed(total, parts=None):
    cfg = bipartite_r3_construction(6, total)
    mg = build_prescribed_graph(cfg, K33, parts)
    return cfg, mg


def test_prescribed_singletons_copy():
    cfg = bipartite_r3_construction(6, 6 + 1)
    line, circle = K33.bipartition()
    parts = [None] * 6
    for s, v in enumerate(line):
        parts[v] = [s]
    for s, v in enumerate(circle):
        parts[v] = [3 + s]
    mg = build_prescribed_graph(cfg, K33, parts)
    assert count_prescribed_copies(mg, K33) == 1


@pytest.mark.parametrize("c", [4, 5, 6])
def test_prescribed_shared_circle_parts(c):
    _, mg = _k33_prescribed(3 + c)
    assert count_prescribed_copies(mg, K33) == c * (c - 1) * (c - 2)


def test_prescribed_n20_ordered_choices():
    # three labelled circle slots drawn from 17 circle points
    _, mg = _k33_prescribed(20)
    assert count_prescribed_copies(mg, K33) == comb(17, 3) * 6 == 4080


@pytest.mark.parametrize("size", [2, 4, 7])
def test_prescribed_disjoint_parts(size):
    cfg = bipartite_r3_construction(6, 3 + 3 * size)
    parts = disjoint_parts(cfg, K33, size)
    mg = build_prescribed_graph(cfg, K33, parts)
    _, circle = K33.bipartition()
    assert count_prescribed_copies(mg, K33) == closed_form_prescribed_count(parts, circle) == size ** 3


def test_prescribed_empty_part():
    cfg = bipartite_r3_construction(6, 12)
    parts = disjoint_parts(cfg, K33, 3)
    _, circle = K33.bipartition()
    parts[circle[0]] = []
    mg = build_prescribed_graph(cfg, K33, parts)
    assert count_prescribed_copies(mg, K33) == 0


def test_prescribed_part_mismatch():
    _, mg = _k33_prescribed(10)
    with pytest.raises(ValueError):
        count_prescribed_copies(mg, RegularGraphSpec.from_edges([(0, 1)], 2))
