"""Acceptance criteria 1-10, one test each; every test prints a pass/fail line."""

import math
import subprocess
import sys
import time

from projkit.axioms import check_all, check_P2plus, replay
from projkit.cli import pipeline
from projkit.complex import bgi_audit, build_complex, standard_path_suite, tree_fidelity_audit
from projkit.constants import derive_parameters
from projkit.errors import ParameterError
from projkit.family import BassSerreFamily, check_spinning, spinning_bound_audit
from projkit.io import bass_serre_instance
from projkit.metric import BassSerreSpace
from projkit.projection import ApexFamily, build_projection_data
from projkit.windmill import certify_free_product, classify_element, merged_skeleton, run_windmill

import pytest


def test_constant_pipeline(criterion):
    with criterion(1, "constants R=16 theta=121 K=363 M=3146 L=16132, 65536 > 52796"):
        start = time.perf_counter()
        res = subprocess.run([sys.executable, "-m", "projkit.cli", "params", "--delta", "1",
                              "--rho", "38"], capture_output=True, text=True)
        elapsed = time.perf_counter() - start
        assert res.returncode == 0
        for line in ("R = 16", "theta = 121", "K = 363", "M = 3146", "L = 16132"):
            assert line in res.stdout.splitlines()
        assert "2^(16/1) = 65536 > 52796" in res.stdout
        assert elapsed < 1.0


@pytest.fixture(scope="module")
def t23_fresh():
    start = time.perf_counter()
    space = BassSerreSpace(2, 3, 38, 14)
    apices = space.vertices_within(space.base, 6)
    data = build_projection_data(ApexFamily(space, apices, 38, 16), 121, window={"P_radius": 6})
    return space, apices, data, time.perf_counter() - start


def test_axiom_suite_on_t23(criterion, t23_fresh):
    with criterion(2, "P1, P2, P2+, P3 exhaustive on the radius-6 window"):
        space, apices, data, built = t23_fresh
        start = time.perf_counter()
        reps = check_all(data, strong=True)
        assert [r.check for r in reps] == ["P1", "P2", "P2+", "P3"]
        assert all(r.passed and not r.witnesses for r in reps)
        assert built + time.perf_counter() - start < 120


def test_complex_is_the_tree(criterion, t23_fresh):
    with criterion(3, "projection complex isomorphic to the unsubdivided tree"):
        space, apices, data, _ = t23_fresh
        start = time.perf_counter()
        pc = build_complex(data)
        rep = tree_fidelity_audit(pc, space)
        assert rep.passed
        assert len(pc.edges) == len(apices) - 1
        assert time.perf_counter() - start < 30


def test_standard_path_suite(criterion, t23):
    with criterion(4, "standard path bounds, concat and tripod audits on all pairs"):
        reps = standard_path_suite(t23["pc"], t23["apices"])
        assert all(r.passed and not r.witnesses for r in reps)
        n = len(t23["apices"])
        assert reps[0].stats["pairs"] == n * (n - 1) // 2


def test_bgi_audit(criterion, t23):
    with criterion(5, "bounded geodesic image <= M at every window vertex"):
        pc = t23["pc"]
        worst = 0
        for Y in t23["apices"]:
            rep = bgi_audit(pc, Y, max_length=6)
            assert rep.passed
            worst = max(worst, rep.stats["max_observed"])
        assert worst <= pc.M
        print(f"bgi max observed {worst} (theta = {pc.theta}, sharp: {worst <= pc.theta})")


def test_spinning_audit(criterion, t23):
    with criterion(6, "spinning minimum is infinite, L = 16132 and 16374 satisfied"):
        pc, fam = t23["pc"], t23["family"]
        rep = check_spinning(pc, fam, 16132)
        assert rep.passed and rep.stats["min_observed"] == math.inf
        bound = spinning_bound_audit(fam, pc)
        assert bound.passed and bound.stats["bound"] == 16374


def test_windmill_certificate(criterion):
    with criterion(7, "windmill certifies Z/2 * Z/3 with tree skeletons"):
        start = time.perf_counter()
        inst = bass_serre_instance(2, 3, 38, radius=8)
        data = build_projection_data(ApexFamily(inst.space, inst.apices, 38, 16), 121)
        pc = build_complex(data)
        state = run_windmill(pc, inst.family, inst.v0, 2, 8)
        cert = certify_free_product(state)
        assert sorted(f["group"] for f in cert["factors"]) == ["Z/2", "Z/3"]
        for ev in cert["stages"]:
            assert ev["skeleton"]["tree"] and ev["edge_stabilizers"]["trivial"]
        assert state.word_bound == 6
        cross = cert["cross_validation"]
        assert cross["ok"] and not cross["collisions"] and cross["words"] >= 100
        assert cross["max_syllables"] == 8
        assert time.perf_counter() - start < 300


def test_classification(criterion, t23_windmill):
    with criterion(8, "vertex generators elliptic, hk loxodromic with orbit bounds"):
        pc, fam, state = t23_windmill["pc"], t23_windmill["family"], t23_windmill["state"]
        G = t23_windmill["space"].group
        for g in G.generators():
            assert classify_element(pc, fam, g, state=state)["kind"] == "elliptic"
        out = classify_element(pc, fam, G.parse("h1k1"), n_max=8, state=state)
        assert out["kind"] == "loxodromic"
        assert [r["n"] for r in out["orbit"]] == list(range(1, 9))
        assert all(r["d_X"] >= 2 * (r["n"] - 1) for r in out["orbit"])
        with_m = [r for r in out["orbit"] if "d_P" in r]
        assert with_m and all(4 * r["d_P"] >= r["m"] - 2 for r in with_m)


def test_negative_controls(criterion, t23, t23_windmill):
    with criterion(9, "P2+ injection, merged skeleton and rho = 37 all rejected"):
        data = t23["data"]
        tree = t23["tree"]
        X = t23["apices"][0]
        Y = next(iter(tree[X]))
        other = next(u for u in data.sphere[data.i(X)] if u not in data.projection(X, Y))
        bad = data.replace_projection(X, Y, [other])
        rep = check_P2plus(bad)
        assert rep.verdict == "fail" and rep.witnesses
        w = rep.witnesses[0]
        assert all(replay(bad, w)[k] == w[k] for k in replay(bad, w))
        assert not merged_skeleton(t23_windmill["state"].stage(1).skeleton).is_tree
        with pytest.raises(ParameterError):
            derive_parameters(1, 37)


def test_dihedral_pipeline(criterion):
    with criterion(10, "Z/2 * Z/2 pipeline with line skeletons"):
        inst = bass_serre_instance(2, 2, 38, radius=6)
        reports, cert = pipeline(inst, progress=lambda line: None)
        assert cert is not None and cert["free_product"] == "Z/2 * Z/2"
        assert all(r.verdict != "fail" for r in reports)
        stages = [r for r in reports if r.check.startswith("windmill stage")]
        assert stages and all(r.stats.get("skeleton", {}).get("max_degree", 0) <= 2 for r in stages)
