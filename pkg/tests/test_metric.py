import itertools
import math
import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from projkit.errors import DisconnectedError, PreconditionError, UnknownPointError
from projkit.io import cycle_instance, grid_instance
from projkit.metric import (BassSerreSpace, GraphSpace, detour_audit, space_from_json,
                            thin_delta)


def cycle(n):
    return GraphSpace(list(range(n)), [(i, (i + 1) % n) for i in range(n)])


def test_path_graph_distance():
    g = GraphSpace(["a", "b", "c"], [("a", "b"), ("b", "c")])
    assert g.distance("a", "c") == 2
    assert g.distance("b", "b") == 0


def test_unknown_point_and_disconnected():
    g = GraphSpace(["a", "b", "c"], [("a", "b")])
    assert g.distance("a", "c") == math.inf
    with pytest.raises(UnknownPointError):
        g.distance("a", "zz")
    with pytest.raises(DisconnectedError):
        g.all_geodesics("a", "c")


def test_four_cycle_has_two_geodesics():
    g = cycle(4)
    geo = g.all_geodesics(0, 2)
    assert geo.exhaustive
    assert sorted(map(tuple, geo.paths)) == [(0, 1, 2), (0, 3, 2)]


def test_grid_corner_geodesics_match_networkx():
    g = grid_instance(3, 3).space
    geo = g.all_geodesics("0,0", "2,2")
    assert len(geo.paths) == 6 and all(len(p) == 5 for p in geo.paths)
    G = nx.Graph(g.edges)
    want = sorted(tuple(p) for p in nx.all_shortest_paths(G, "0,0", "2,2"))
    assert sorted(map(tuple, geo.paths)) == want


def test_geodesic_cap_marks_partial():
    g = grid_instance(4, 4).space
    geo = g.all_geodesics("0,0", "3,3", cap=5)
    assert not geo.exhaustive and len(geo.paths) == 5


def test_complement_distance_six_cycle():
    g = cycle(6)
    assert g.complement_distance(0, 1, 1, 5) == 4
    assert g.complement_distance(0, 1, 2, 2) == 0
    with pytest.raises(PreconditionError):
        g.complement_distance(0, 2, 1, 3)


def test_complement_distance_tree_branches_disconnect():
    T = BassSerreSpace(2, 3, 4, 4)
    p = T.vertex("e", "K")
    a, b = T.tree_neighbors(p)[:2]
    for R in (1, 2, 4):
        assert T.complement_distance(p, R, a, b) == math.inf


def _tripod_oracle(G, a, b, c):
    """Largest tripod-map distance over all geodesic triangles on a, b, c."""
    d = dict(nx.all_pairs_shortest_path_length(G))
    best = 0
    sides = {}
    for x, y in itertools.permutations((a, b, c), 2):
        sides[x, y] = list(nx.all_shortest_paths(G, x, y))
    for x, y, z in ((a, b, c), (b, a, c), (c, a, b)):
        gp = (d[x][y] + d[x][z] - d[y][z]) // 2
        for p in sides[x, y]:
            for q in sides[x, z]:
                for t in range(gp + 1):
                    best = max(best, d[p[t]][q[t]])
    return best


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_thin_delta_on_cycles_matches_tripod_oracle(n):
    g = cycle(n)
    G = nx.cycle_graph(n)
    rep = thin_delta(g)
    want = max(_tripod_oracle(G, *t) for t in itertools.combinations_with_replacement(range(n), 3))
    assert rep.delta == want
    assert rep.witness is None or rep.witness["distance"] == want


def test_thin_delta_four_cycle_triple():
    rep = thin_delta(cycle(4), [(0, 1, 2)])
    assert rep.delta == _tripod_oracle(nx.cycle_graph(4), 0, 1, 2)


def test_thin_delta_degenerate_and_tree():
    g = GraphSpace(["a", "b"], [("a", "b")])
    assert thin_delta(g, [("a", "a", "b")]).delta == 0
    T = BassSerreSpace(2, 3, 2, 2)
    pts = list(T.points)
    sample = [(pts[i], pts[j], pts[k]) for i, j, k in itertools.combinations(range(len(pts)), 3)]
    rep = thin_delta(T, sample)
    assert rep.delta == 0 and rep.delta_op == 1


small_graphs = st.integers(min_value=3, max_value=8).flatmap(
    lambda n: st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)),
                       min_size=n, max_size=2 * n).map(lambda es: (n, es)))


@settings(max_examples=25, deadline=None)
@given(small_graphs)
def test_thin_delta_random_graphs(g):
    n, raw = g
    edges = sorted({tuple(sorted(e)) for e in raw if e[0] != e[1]})
    G = nx.empty_graph(n)
    G.add_edges_from(edges)
    space = GraphSpace(list(range(n)), edges)
    comp = max(nx.connected_components(G), key=len)
    triples = list(itertools.combinations_with_replacement(sorted(comp), 3))
    rep = thin_delta(space, triples)
    assert rep.delta == max(_tripod_oracle(G, *t) for t in triples)


@settings(max_examples=30, deadline=None)
@given(small_graphs, st.data())
def test_metric_axioms(g, data):
    n, raw = g
    edges = sorted({tuple(sorted(e)) for e in raw if e[0] != e[1]})
    space = GraphSpace(list(range(n)), edges)
    x, y, z = (data.draw(st.integers(0, n - 1)) for _ in range(3))
    assert space.distance(x, x) == 0
    assert space.distance(x, y) == space.distance(y, x)
    assert space.distance(x, z) <= space.distance(x, y) + space.distance(y, z)


def test_bass_serre_distance_matches_bfs():
    T = BassSerreSpace(2, 3, 38, 4)
    G = nx.Graph(T.edges)
    base = T.base
    hk = T.group.parse("h1k1")
    target = T.act(hk, base)
    assert T.distance(base, target) == nx.shortest_path_length(G, base, target) == 76
    rng = random.Random(7)
    for _ in range(200):
        a, b = rng.choice(T.points), rng.choice(T.points)
        assert T.distance(a, b) == nx.shortest_path_length(G, a, b)


def test_bass_serre_lazy_distance_beyond_truncation():
    small = BassSerreSpace(2, 3, 3, 2)
    big = BassSerreSpace(2, 3, 3, 6)
    far = big.vertex("h1k1h1k2h1", "K")
    assert far not in small
    assert small.distance(small.base, far) == big.distance(big.base, far)


def test_bass_serre_rejects_trivial_factors():
    with pytest.raises(ValueError):
        BassSerreSpace(1, 1, 1, 2)


def test_detour_audit_six_cycle_and_tree():
    g = cycle(6)
    rep = detour_audit(g, [(1, 5, 0)], 1)
    assert rep.passed and rep.stats["min_detour"] == 4
    T = BassSerreSpace(2, 3, 4, 3)
    m = T.vertex("e", "K")
    x, y = T.sphere(m, 3)[:2]
    rep = detour_audit(T, [(x, y, m)], 1)
    assert rep.passed and rep.stats["min_detour"] == math.inf
    assert any("vacuous" in n for n in rep.notes)


def test_detour_audit_unit_radius_rule():
    # x, y adjacent to m at R = 1: bound 2^0 = 1
    g = cycle(4)
    assert detour_audit(g, [(1, 3, 0)], 1).passed


def test_space_json_round_trip():
    for space in (cycle(5), BassSerreSpace(2, 3, 5, 3), cycle_instance(6).space):
        back = space_from_json(space.to_json())
        assert len(back) == len(space)
        a, b = space.points[0], space.points[-1]
        assert back.distance(back.parse(space.label(a)), back.parse(space.label(b))) == space.distance(a, b)
