import itertools

import networkx as nx
import numpy as np
import pytest

from projkit.axioms import (check_all, check_P1, check_P2, check_P2plus, check_P3,
                            large_projection_set, replay, verify_upgrade_contract)
from projkit.metric import GraphSpace
from projkit.projection import ApexFamily, build_projection_data


def separated_triple(t23):
    """Apices X, Y, Z with Y strictly between X and Z on the tree."""
    tree = t23["tree"]
    X = t23["apices"][0]
    Z = next(a for a in t23["apices"] if nx.shortest_path_length(tree, X, a) == 2)
    Y = nx.shortest_path(tree, X, Z)[1]
    return X, Y, Z


def other_branch_point(data, p, a):
    """A sphere point of p not in pi_p(a)."""
    return next(u for u in data.sphere[data.i(p)] if u not in data.projection(p, a))


def test_t23_window_passes_all_axioms(t23):
    reps = check_all(t23["data"], strong=True)
    assert [r.check for r in reps] == ["P1", "P2", "P2+", "P3"]
    assert all(r.passed and not r.witnesses for r in reps)


def test_p1_injected_diameter(t23):
    data = t23["data"]
    X, Y, Z = separated_triple(t23)
    pts = data.projection(Y, X) + [other_branch_point(data, Y, X)]
    bad = data.replace_projection(Y, X, pts)
    rep = check_P1(bad)
    assert rep.verdict == "fail"
    assert rep.witnesses == [{"Y": data.label(Y), "X": data.label(X), "diam": float("inf")}]


def test_p2_hand_built_violation(t23):
    data = t23["data"]
    X, Y, Z = separated_triple(t23)
    assert data.dist(Y, X, Z) > data.theta and data.dist(X, Y, Z) == 0
    bad = data.replace_projection(X, Y, [other_branch_point(data, X, Z)])
    rep = check_P2(bad)
    assert rep.verdict == "fail"
    labels = {data.label(v) for v in (X, Y, Z)}
    assert any({w.get("X"), w.get("Y"), w.get("Z")} == labels for w in rep.witnesses)


def test_p2plus_perturbation_has_replayable_witness(t23):
    data = t23["data"]
    X, Y, Z = separated_triple(t23)
    bad = data.replace_projection(X, Y, [other_branch_point(data, X, Y)])
    rep = check_P2plus(bad)
    assert rep.verdict == "fail"
    w = rep.witnesses[0]
    for key, value in replay(bad, w).items():
        assert value == w[key]
    # the same witness replayed on clean data no longer violates the implication
    clean = replay(data, w)
    assert any(clean[k] != w[k] for k in clean)


def test_p3_mediators_match_tree_interior(t23):
    data, tree = t23["data"], t23["tree"]
    for X, Z in itertools.combinations(t23["apices"], 2):
        path = nx.shortest_path(tree, X, Z)
        got = set(large_projection_set(data, X, Z, data.theta))
        assert got == set(path[1:-1])
    X = t23["apices"][0]
    Z = next(a for a in t23["apices"] if nx.shortest_path_length(tree, X, a) == 3)
    assert len(large_projection_set(data, X, Z, data.theta)) == 2


def test_p3_rejects_degenerate_pair(t23):
    X = t23["apices"][0]
    rep = check_P3(t23["data"], [(X, X)])
    assert rep.passed and rep.stats["rejected"] == 1 and rep.notes


def test_empty_index_set_is_vacuous():
    space = GraphSpace([0, 1], [(0, 1)])
    data = build_projection_data(ApexFamily(space, [], 10, 2), 1, check_family=False)
    assert all(r.passed for r in check_all(data))


def test_upgrade_contract(t23):
    data = t23["data"]
    rep = verify_upgrade_contract(data, data.with_theta(data.theta))
    assert rep.passed and rep.stats["slack"] == 0
    shifted = data.with_theta(data.theta)
    shifted.D = data.D.copy()
    yi, xi, zi = map(int, np.argwhere(data.D == 0)[0])
    shifted.D[yi, xi, zi] = 2 * data.theta + 1
    rep = verify_upgrade_contract(data, shifted)
    assert rep.verdict == "fail" and rep.stats["slack"] == 2 * data.theta + 1


def test_upgrade_contract_theta_zero(t23):
    zero = t23["data"].with_theta(0)
    assert verify_upgrade_contract(zero, zero).passed
