"""The projection complex on an apex index set, standard paths, and their audits."""

from __future__ import annotations

import sys
from collections import defaultdict

import numpy as np

from . import kernels
from .axioms import check_P1, check_P2plus, check_P3
from .errors import AxiomPreconditionError, DisconnectedError, PreconditionError
from .metric import INF, GraphSpace
from .projection import ProjectionData, _ext
from .reports import NOT_APPLICABLE, PASS, Report


class ProjectionComplex:
    """Graph on the index set: ``X ~ Z`` iff ``d_Y(X, Z) <= K`` for every other ``Y``."""

    def __init__(self, data: ProjectionData, K):
        self.data = data
        self.K = K
        self.theta = data.theta
        self.apices = data.apices
        n = len(data)
        with np.errstate(invalid="ignore"):
            big = np.nan_to_num(data.D, nan=-1.0) > K   # big[Y, X, Z]
        blocked = big.any(axis=0)
        adj = ~blocked
        np.fill_diagonal(adj, False)
        self.adjacency = adj
        edges = [(data.apices[i], data.apices[j]) for i, j in np.argwhere(np.triu(adj, 1))]
        self.graph = GraphSpace(data.apices, edges)
        self._big = big
        self._paths: dict = {}

    @property
    def M(self):
        return 8 * self.K + 2 * self.theta

    @property
    def window(self):
        return self.data.window

    def label(self, x) -> str:
        return self.data.label(x)

    @property
    def edges(self) -> list:
        return self.graph.edges

    def adjacent(self, X, Z) -> bool:
        return bool(self.adjacency[self.data.i(X), self.data.i(Z)])

    def distance(self, X, Z):
        return self.graph.distance(X, Z)

    def mediators(self, X, Z) -> list:
        """``Y_K(X, Z)``, unordered."""
        xi, zi = self.data.i(X), self.data.i(Z)
        col = self._big[:, xi, zi].copy()
        col[[xi, zi]] = False
        return [self.apices[i] for i in np.flatnonzero(col)]

    def angle_big(self, Y, X, Z) -> bool:
        return bool(self._big[self.data.i(Y), self.data.i(X), self.data.i(Z)])

    def standard_path(self, X, Z) -> list:
        """``[X] + Y_K(X, Z) + [Z]`` in the order ``Y1 < Y2 iff d_Y1(X, Y2) > K``."""
        key = (X, Z)
        if key in self._paths:
            return self._paths[key]
        if X == Z:
            raise PreconditionError("standard path needs distinct endpoints")
        if self.distance(X, Z) == INF:
            raise DisconnectedError(f"{self.label(X)} and {self.label(Z)} lie in different components")
        inner = self.mediators(X, Z)
        xi = self.data.i(X)
        idx = [self.data.i(Y) for Y in inner]
        # before[a, b]: inner[a] precedes inner[b]
        before = self._big[np.ix_(idx, [xi], idx)][:, 0, :] if idx else np.zeros((0, 0), bool)
        _verify_total_order(before, inner, self.label)
        order = sorted(range(len(inner)), key=lambda a: int(before[:, a].sum()))
        path = [X] + [inner[a] for a in order] + [Z]
        for A, B in zip(path, path[1:]):
            if not self.adjacent(A, B):
                raise PreconditionError(
                    f"standard path step {self.label(A)} -> {self.label(B)} is not an edge; "
                    "the projection data violates the axioms upstream")
        self._paths[key] = path
        return path


def _verify_total_order(before, items, label):
    n = len(items)
    if n == 0:
        return
    if before[np.arange(n), np.arange(n)].any():
        raise PreconditionError("standard path order is not irreflexive")
    both = before & before.T
    neither = ~(before | before.T)
    np.fill_diagonal(neither, False)
    if both.any() or neither.any():
        i, j = np.argwhere(both | neither)[0]
        raise PreconditionError(
            f"standard path order is not total on {label(items[i])}, {label(items[j])}")
    # a tournament is transitive iff its score sequence is 0, 1, ..., n-1
    scores = sorted(int(c) for c in before.sum(axis=0))
    if scores != list(range(n)):
        raise PreconditionError("standard path order is not transitive")


def build_complex(data: ProjectionData, K=None, check: bool = True) -> ProjectionComplex:
    if K is None:
        K = 3 * data.theta
    if K < 3 * data.theta:
        raise PreconditionError(f"K = {K} is below 3 theta = {3 * data.theta}")
    if check:
        reps = [check_P1(data), check_P2plus(data), check_P3(data)]
        bad = [r for r in reps if not r.passed]
        if bad:
            raise AxiomPreconditionError(
                "projection data fails the strong axioms: " + ", ".join(r.check for r in bad), bad)
    return ProjectionComplex(data, K)


# ---------------------------------------------------------------------------
# audits
# ---------------------------------------------------------------------------


def concat_audit(pc: ProjectionComplex, X, Y, Z) -> Report:
    """If ``d_Y(X, Z) > K`` the standard paths through ``Y`` concatenate."""
    rep = Report("concatenation", window=pc.window, stats={"K": pc.K})
    if len({X, Y, Z}) < 3 or not pc.angle_big(Y, X, Z):
        rep.verdict = NOT_APPLICABLE
        return rep
    left = pc.standard_path(X, Y)
    right = pc.standard_path(Y, Z)
    whole = pc.standard_path(X, Z)
    if left + right[1:] != whole:
        rep.fail({"X": pc.label(X), "Y": pc.label(Y), "Z": pc.label(Z),
                  "concatenation": [pc.label(v) for v in left + right[1:]],
                  "standard_path": [pc.label(v) for v in whole]})
    return rep.finish()


def tripod_audit(pc: ProjectionComplex, X, Y, Z) -> Report:
    """Standard path ``X -> Z`` lies in the union of the other two up to two consecutive vertices."""
    rep = Report("near tripod", window=pc.window, stats={"K": pc.K})
    if len({X, Y, Z}) < 3:
        rep.verdict = NOT_APPLICABLE
        return rep
    whole = pc.standard_path(X, Z)
    cover = set(pc.standard_path(X, Y)) | set(pc.standard_path(Y, Z))
    pos = [i for i, v in enumerate(whole) if v not in cover]
    rep.stats["exceptional"] = len(pos)
    if len(pos) > 2 or (len(pos) == 2 and pos[1] != pos[0] + 1):
        rep.fail({"X": pc.label(X), "Y": pc.label(Y), "Z": pc.label(Z),
                  "exceptional": [pc.label(whole[i]) for i in pos]})
    return rep.finish()


def qg_audit(pc: ProjectionComplex, X, Z) -> Report:
    """``floor(n/2) + 1 <= d_P(X, Z) <= n`` with ``n = |Y_K(X, Z)| + 1``."""
    if X == Z:
        raise PreconditionError("quasi-geodesic audit needs distinct endpoints")
    n = len(pc.mediators(X, Z)) + 1
    d = pc.distance(X, Z)
    rep = Report("standard path quasi-geodesic", window=pc.window,
                 stats={"n": n, "d_P": d, "lower": n // 2 + 1, "upper": n})
    if d == INF:
        raise DisconnectedError("endpoints lie in different components")
    if not n // 2 + 1 <= d <= n:
        rep.fail({"X": pc.label(X), "Z": pc.label(Z), "n": n, "d_P": d})
    return rep.finish()


def dist4_audit(pc: ProjectionComplex, X, Z, Y, W=None) -> Report:
    """Adjacent ``X, Z`` far from ``Y`` project identically to ``Y``."""
    rep = Report("distance-4 agreement", window=pc.window)
    if not pc.adjacent(X, Z) or pc.distance(Y, X) < 4 or pc.distance(Y, Z) < 4:
        rep.verdict = NOT_APPLICABLE
        return rep
    data = pc.data
    targets = [W] if W is not None else pc.apices
    checked = 0
    for w in targets:
        if w in (X, Y, Z):
            rep.notes.append(f"W = {pc.label(w)} coincides with X, Y or Z; excluded")
            continue
        checked += 1
        a, b = data.dist(Y, X, w), data.dist(Y, Z, w)
        if a != b:
            rep.fail({"X": pc.label(X), "Z": pc.label(Z), "Y": pc.label(Y), "W": pc.label(w),
                      "d_Y(X,W)": a, "d_Y(Z,W)": b})
    rep.stats["checked"] = checked
    if not checked:
        rep.verdict = NOT_APPLICABLE
    return rep.finish()


def bgi_audit(pc: ProjectionComplex, Y, max_length: int = 6) -> Report:
    """Prefix projections of P-geodesics that miss ``Y`` stay within ``M = 8K + 2 theta``.

    The set of pairs ``(gamma(0), gamma(t))`` over all P-geodesics of length
    ``<= max_length`` avoiding ``Y`` is exactly the set of pairs ``(u, v)`` with
    ``d_P(u, v) <= max_length`` for which some geodesic avoids ``Y``, i.e.
    ``d_{P - Y}(u, v) == d_P(u, v)``; prefixes of geodesics are geodesics.  So
    the maximum is taken over those pairs without listing paths.
    """
    M = pc.M
    data = pc.data
    g = pc.graph
    yi = data.i(Y)
    others = [v for v in pc.apices if v != Y]
    mask = np.zeros(len(g), dtype=np.uint8)
    mask[g.idx(Y)] = 1
    worst = 0
    pairs = 0
    rep = Report("bounded geodesic image", window=pc.window,
                 stats={"M": M, "theta": pc.theta, "K": pc.K, "Y": pc.label(Y),
                        "max_length": max_length})
    for u in others:
        ui = data.i(u)
        full = g.row(u)
        avoid = kernels.bfs(g.indptr, g.indices, g.idx(u), mask)
        ok = (full >= 0) & (full <= max_length) & (avoid == full)
        ok[g.idx(Y)] = False
        vs = np.flatnonzero(ok)
        pairs += len(vs)
        vals = data.D[yi, ui, [data.i(g.points[v]) for v in vs]]
        vals = np.nan_to_num(vals, nan=-1.0)
        if vals.size:
            worst = max(worst, float(vals.max()))
            for k in np.flatnonzero(vals > M):
                v = g.points[vs[k]]
                rep.fail({"Y": pc.label(Y), "start": pc.label(u), "end": pc.label(v),
                          "d_Y": _ext(vals[k]),
                          "geodesic": [pc.label(x) for x in _avoiding_geodesic(g, u, v, mask)]})
    rep.stats.update(max_observed=_ext(worst), pairs=pairs, within_theta=worst <= pc.theta)
    return rep.finish()


def _avoiding_geodesic(g: GraphSpace, u, v, mask) -> list:
    rv = kernels.bfs(g.indptr, g.indices, g.idx(v), mask)
    path = [g.idx(u)]
    while path[-1] != g.idx(v):
        a = path[-1]
        nbrs = g.indices[g.indptr[a]:g.indptr[a + 1]]
        path.append(int(min(b for b in nbrs if rv[b] == rv[a] - 1 and not mask[b])))
    return [g.points[i] for i in path]


def standard_path_suite(pc: ProjectionComplex, vertices=None) -> list:
    """Quasi-geodesic bounds on all pairs and concat/tripod audits on all triples."""
    vs = list(pc.apices if vertices is None else vertices)
    qg = Report("standard path quasi-geodesic (all pairs)", window=pc.window)
    cc = Report("concatenation (all triples)", window=pc.window)
    tp = Report("near tripod (all triples)", window=pc.window)
    counts = defaultdict(int)
    for i, X in enumerate(vs):
        for Z in vs[i + 1:]:
            r = qg_audit(pc, X, Z)
            counts["pairs"] += 1
            if not r.passed:
                qg.fail(r.witnesses[0])
    for xi, X in enumerate(vs):
        for Y in vs:
            if Y == X:
                continue
            for zi, Z in enumerate(vs):
                if Z == X or Z == Y:
                    continue
                r = concat_audit(pc, X, Y, Z)
                if r.verdict == PASS:
                    counts["concat_applicable"] += 1
                elif not r.passed:
                    cc.fail(r.witnesses[0])
                if xi < zi:
                    r = tripod_audit(pc, X, Y, Z)
                    counts["tripods"] += 1
                    if not r.passed:
                        tp.fail(r.witnesses[0])
    qg.stats["pairs"] = counts["pairs"]
    cc.stats["applicable"] = counts["concat_applicable"]
    tp.stats["triples"] = counts["tripods"]
    return [qg.finish(), cc.finish(), tp.finish()]


# ---------------------------------------------------------------------------
# tree canonical forms
# ---------------------------------------------------------------------------


def _tree_centers(adj: dict) -> list:
    deg = {v: len(ns) for v, ns in adj.items()}
    leaves = [v for v, d in deg.items() if d <= 1]
    remaining = len(adj)
    removed = set()
    while remaining > 2:
        remaining -= len(leaves)
        nxt = []
        for v in leaves:
            removed.add(v)
            for u in adj[v]:
                if u not in removed:
                    deg[u] -= 1
                    if deg[u] == 1:
                        nxt.append(u)
        leaves = nxt
    return [v for v in adj if v not in removed]


def _encode(adj, colors, root, parent) -> str:
    kids = sorted(_encode(adj, colors, c, root) for c in adj[root] if c != parent)
    return "(" + str(colors.get(root, "")) + "".join(kids) + ")"


def tree_canonical_form(vertices, edges, colors=None) -> str | None:
    """Center-rooted AHU encoding of a (vertex-colored) tree; ``None`` if not a tree."""
    vertices = list(vertices)
    colors = colors or {}
    if not vertices:
        return "()"
    if len(edges) != len(vertices) - 1:
        return None
    adj = {v: [] for v in vertices}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = {vertices[0]}
    stack = [vertices[0]]
    while stack:
        v = stack.pop()
        for u in adj[v]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    if len(seen) != len(vertices):
        return None
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * len(vertices) + 100))
    return min(_encode(adj, colors, c, None) for c in _tree_centers(adj))


def isomorphic_trees(a_vertices, a_edges, b_vertices, b_edges, a_colors=None, b_colors=None) -> bool:
    fa = tree_canonical_form(a_vertices, a_edges, a_colors)
    fb = tree_canonical_form(b_vertices, b_edges, b_colors)
    return fa is not None and fa == fb


def tree_fidelity_audit(pc: ProjectionComplex, space) -> Report:
    """P on Bass-Serre apices against the unsubdivided tree on the same vertices.

    Both graphs are compared as vertex-colored (H/K) trees by canonical form;
    edge sets are also compared directly.
    """
    rep = Report("projection complex vs Bass-Serre tree", window=pc.window)
    vs = list(pc.apices)
    vset = set(vs)
    tree_edges = {frozenset((v, u)) for v in vs for u in space.tree_neighbors(v) if u in vset}
    tree_edges = [tuple(e) for e in tree_edges]
    colors = {v: space.vertex_type(v) for v in vs}
    iso = isomorphic_trees(vs, pc.edges, vs, tree_edges, colors, colors)
    same = {frozenset(e) for e in pc.edges} == {frozenset(e) for e in tree_edges}
    rep.stats.update(vertices=len(vs), pc_edges=len(pc.edges), tree_edges=len(tree_edges),
                     isomorphic=iso, identical_edges=same)
    if not iso:
        rep.fail({"reason": "P is not isomorphic to the unsubdivided tree",
                  "pc_edges": len(pc.edges), "tree_edges": len(tree_edges)})
    return rep.finish()
