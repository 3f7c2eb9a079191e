import math

import pytest
from hypothesis import given, settings, strategies as st

from projkit.canoe import validate_canoe
from projkit.complex import build_complex
from projkit.errors import PreconditionError
from projkit.io import cycle_instance
from projkit.projection import ApexFamily, build_projection_data
from projkit.windmill import (
    build_skeleton, canoe_between, certify_free_product, classify_element, cross_validate,
    intersection_audit, merged_skeleton, run_windmill, stage_report, translate_overlap_audit,
    tree_certificate,
)


def test_stage_shapes(t23_windmill):
    state = t23_windmill["state"]
    s0, s1, s2 = state.stages
    assert [state.label(r) for r in s0.reps] == ["e|38"]
    assert s0.W == {state.v0}
    assert s1.skeleton.is_tree
    assert s1.skeleton.certificate["vertices"] == 43
    assert s1.skeleton.certificate["edges"] == 42
    assert [state.label(o) for o in s1.new_factors] == ["e|38"]
    assert s2.saturated and not s1.saturated
    assert all(r.passed for r in stage_report(state))


def test_stages_are_nested(t23_windmill, dihedral_windmill):
    for state in (t23_windmill["state"], dihedral_windmill["state"]):
        for a, b in zip(state.stages, state.stages[1:]):
            assert a.W <= a.N <= b.W
        assert set(state.stages[-1].W) <= set(state.window)


def test_certificate_factors(t23_windmill):
    cert = certify_free_product(t23_windmill["state"])
    assert [f["group"] for f in cert["factors"]] == ["Z/2", "Z/3"]
    assert cert["free_product"] == "Z/2 * Z/3"
    cross = cert["cross_validation"]
    assert cross["ok"] and cross["words"] == 106 and cross["collisions"] == []
    for ev in cert["stages"]:
        assert ev["skeleton"]["tree"] and ev["edge_stabilizers"]["trivial"]
        assert ev["generation"]["ok"]


def test_dihedral_skeleton_is_a_line(dihedral_windmill):
    state = dihedral_windmill["state"]
    cert = certify_free_product(state)
    assert cert["free_product"] == "Z/2 * Z/2"
    sk = state.stage(1).skeleton
    assert sk.is_tree and sk.max_degree() <= 2


def test_fewer_cross_check_words_still_agree(t23_windmill):
    out = cross_validate(t23_windmill["state"], max_syllables=3)
    assert out["ok"] and out["words"] == 1 + 3 + 4 + 6


def test_merged_translates_break_the_tree(t23_windmill):
    sk = t23_windmill["state"].stage(1).skeleton
    bad = merged_skeleton(sk)
    assert not bad.is_tree
    assert bad.certificate["cycle_edge"] is not None


@given(st.integers(1, 12), st.data())
@settings(max_examples=60)
def test_tree_certificate_on_random_graphs(n, data):
    # random tree by parent pointers, optionally with one extra edge
    edges = [(i, data.draw(st.integers(0, i - 1))) for i in range(1, n)]
    assert tree_certificate(range(n), edges)["tree"]
    if n >= 3 and data.draw(st.booleans()):
        u = data.draw(st.integers(0, n - 1))
        v = data.draw(st.integers(0, n - 1).filter(lambda x: x != u))
        cert = tree_certificate(range(n), edges + [(u, v)])
        assert not cert["tree"] and cert["cycle_edge"] == (u, v)
    if n >= 2:
        assert not tree_certificate(range(n), edges[:-1])["tree"]


def test_skeleton_of_small_cover():
    sk = build_skeleton([{1, 2, 3}, {3, 4}, {4, 5, 6}, {3, 4}])
    assert len(sk.translates) == 3
    assert sk.points == [3, 4]
    assert sk.is_tree
    assert not build_skeleton([{1, 2, 3}, {2, 3, 4}]).is_tree  # two shared points close a cycle
    line = build_skeleton([{1, 2}, {2, 3}, {3, 4}])
    assert line.is_tree and line.max_degree() == 2
    assert line.distance(("T", 0), ("T", 2)) == 4
    assert line.node_of(1) == ("T", 0) and line.node_of(2) == ("q", 2)
    assert line.node_of(99) is None


def test_intersection_audit(t23_windmill):
    state, sp = t23_windmill["state"], t23_windmill["space"]
    G = sp.group
    k1 = G.letter(1)
    rep = intersection_audit(state, k1, k=1)
    assert rep.passed and rep.stats["intersection"] == ["e|38"]
    assert intersection_audit(state, k1 * k1, k=1).passed
    with pytest.raises(PreconditionError):
        intersection_audit(state, G.identity, k=1)
    with pytest.raises(PreconditionError):
        intersection_audit(state, G.letter(0), k=1)
    with pytest.raises(PreconditionError):
        intersection_audit(state, k1, k=0)


def test_translates_meet_in_at_most_a_point(t23_windmill):
    rep = translate_overlap_audit(t23_windmill["state"], 1)
    assert rep.passed and rep.stats["pairs"] > 0


def _pair_through(state, count):
    sk = state.stage(1).skeleton
    free = sorted(sk.covered() - set(sk.points), key=state.label)
    for x in free:
        for y in free:
            if y == x:
                continue
            route = sk.path(sk.node_of(x), sk.node_of(y))
            if sum(1 for n in route if n[0] == "T") == count:
                return x, y
    raise AssertionError("no such pair")


def test_canoe_across_three_translates(t23_windmill):
    state, pc = t23_windmill["state"], t23_windmill["pc"]
    x, y = _pair_through(state, 3)
    path = canoe_between(state, x, y, k=1)
    assert len(path.large_angle_points) == 2
    assert set(path.large_angle_points) <= set(state.stage(1).skeleton.points)
    C = 4 * pc.M + pc.K + 1
    assert validate_canoe(pc, path, C).passed
    assert pc.distance(x, y) >= 1


def test_canoe_inside_one_translate(t23_windmill):
    state, pc = t23_windmill["state"], t23_windmill["pc"]
    x, y = _pair_through(state, 1)
    path = canoe_between(state, x, y, k=1)
    assert path.large_angle_points == []
    assert path.endpoints == (x, y)
    with pytest.raises(PreconditionError):
        canoe_between(state, x, x, k=1)


def test_classify_generators_and_identity(t23_windmill):
    pc, fam, state, G = (t23_windmill[k] for k in ("pc", "family", "state", "space"))
    G = G.group
    for g in G.generators() + [G.letter(1, 2)]:
        assert classify_element(pc, fam, g, state=state)["kind"] == "elliptic"
    assert classify_element(pc, fam, G.identity, state=state)["kind"] == "elliptic"


def test_classify_product_is_loxodromic(t23_windmill):
    pc, fam, state, sp = (t23_windmill[k] for k in ("pc", "family", "state", "space"))
    out = classify_element(pc, fam, sp.group.parse("h1k1"), state=state)
    assert out["kind"] == "loxodromic" and out["bounds_hold"]
    for row in out["orbit"]:
        assert row["d_X"] >= 2 * (row["n"] - 1)
        if "d_P" in row:
            assert 4 * row["d_P"] >= row["m"] - 2
    assert classify_element(pc, fam, sp.group.parse("h1k1"))["kind"] == "unresolved"


@given(st.integers(0, 49), st.sampled_from(["h1", "k1", "k2"]))
@settings(max_examples=25, deadline=None)
def test_conjugates_of_vertex_elements_are_elliptic(t23_windmill, i, gen):
    pc, fam, state, sp = (t23_windmill[k] for k in ("pc", "family", "state", "space"))
    G = sp.group
    x = G.words(3)[i % len(G.words(3))]
    g = x * G.parse(gen) * x.inverse()
    assert classify_element(pc, fam, g, state=state)["kind"] == "elliptic"


def test_single_apex_cycle_certificate():
    inst = cycle_instance(20)
    data = build_projection_data(ApexFamily(inst.space, inst.apices, 10, 4), 1, check_family=False)
    pc = build_complex(data, check=False)
    state = run_windmill(pc, inst.family, inst.v0, 2, 3)
    cert = certify_free_product(state)
    assert cert["free_product"] == "Z/2"
    assert cert["cross_validation"]["words"] == 2
    assert all(s.saturated for s in state.stages[1:])
    assert math.isfinite(cert["window"]["radius"])
