"""Exact geodesic metric spaces on unit-edge graphs.

Two backends share one interface:

* :class:`GraphSpace` -- an explicit finite graph.
* :class:`BassSerreSpace` -- the Bass-Serre tree of ``Z/m * Z/n`` with every
  edge subdivided ``s`` times.  Points are canonical ``(element, offset)`` pairs;
  the group acts by left multiplication on the element, so the action and the
  tree distance are exact on the whole infinite tree.  Graph searches (balls,
  complement metrics) run on a finite truncation by syllable length.

Distances are ``int`` or ``math.inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Hashable, Iterable, NamedTuple

import numpy as np

from . import kernels
from .errors import DisconnectedError, PreconditionError, UnknownPointError
from .groups import FreeProduct, FreeProductElement
from .reports import FAIL, PARTIAL, PASS, Report

INF = math.inf
DEFAULT_GEODESIC_CAP = 10_000


def _d(value) -> float | int:
    value = int(value)
    return INF if value < 0 else value


class Geodesics(NamedTuple):
    paths: list
    exhaustive: bool


class GraphSpace:
    """Finite unit-edge graph with exact path metric."""

    kind = "graph"

    def __init__(self, vertices: Iterable[Hashable], edges: Iterable, memoize: bool = True):
        self.points = list(dict.fromkeys(vertices))
        self.index = {v: i for i, v in enumerate(self.points)}
        adj = [set() for _ in self.points]
        for u, v in edges:
            iu, iv = self.idx(u), self.idx(v)
            if iu == iv:
                continue
            adj[iu].add(iv)
            adj[iv].add(iu)
        self.indptr = np.zeros(len(self.points) + 1, dtype=np.int32)
        self.indptr[1:] = np.cumsum([len(a) for a in adj])
        self.indices = np.fromiter(
            (j for a in adj for j in sorted(a)), dtype=np.int32, count=int(self.indptr[-1])
        )
        self.memoize = memoize
        self._rows: dict = {}
        self._crows: dict = {}

    # -- identifiers ---------------------------------------------------------

    def __len__(self):
        return len(self.points)

    def __contains__(self, x):
        return x in self.index

    def idx(self, x) -> int:
        try:
            return self.index[x]
        except (KeyError, TypeError):
            raise UnknownPointError(f"unknown point {x!r}") from None

    def label(self, x) -> str:
        return str(x)

    def parse(self, label: str):
        for v in self.points:
            if str(v) == label:
                return v
        raise UnknownPointError(f"unknown point label {label!r}")

    def sort_key(self, x):
        return self.index.get(x, len(self.points)), self.label(x)

    def neighbors(self, x) -> list:
        i = self.idx(x)
        return [self.points[j] for j in self.indices[self.indptr[i] : self.indptr[i + 1]]]

    @property
    def edges(self) -> list:
        out = []
        for i in range(len(self.points)):
            for j in self.indices[self.indptr[i] : self.indptr[i + 1]]:
                if i < j:
                    out.append((self.points[i], self.points[int(j)]))
        return out

    # -- BFS rows ------------------------------------------------------------

    def row(self, x) -> np.ndarray:
        """Distances from ``x`` to every point (``-1`` = other component)."""
        i = self.idx(x)
        r = self._rows.get(i)
        if r is None:
            r = kernels.bfs(self.indptr, self.indices, i)
            if self.memoize:
                self._rows[i] = r
        return r

    def rows(self, xs) -> np.ndarray:
        """Stacked distance rows for the points ``xs``."""
        ids = [self.idx(x) for x in xs]
        if not ids:
            return np.zeros((0, len(self)), dtype=np.int32)
        missing = [i for i in dict.fromkeys(ids) if i not in self._rows]
        fresh = {}
        if missing:
            fresh = dict(zip(missing, kernels.bfs_many(self.indptr, self.indices, missing)))
            if self.memoize:
                self._rows.update(fresh)
        return np.stack([self._rows[i] if i in self._rows else fresh[i] for i in ids])

    def open_ball_mask(self, p, R: int) -> np.ndarray:
        r = self.row(p)
        return (r >= 0) & (r < R)

    def complement_row(self, p, R: int, x) -> np.ndarray:
        """Distances from ``x`` in the path metric of ``X \\ B_R(p)`` (open ball)."""
        key = (self.idx(p), int(R), self.idx(x))
        r = self._crows.get(key)
        if r is None:
            mask = self.open_ball_mask(p, R).astype(np.uint8)
            r = kernels.bfs(self.indptr, self.indices, self.idx(x), mask)
            if self.memoize:
                self._crows[key] = r
        return r

    # -- metric operations -----------------------------------------------------

    def distance(self, x, y) -> float | int:
        return _d(self.row(x)[self.idx(y)])

    def ball(self, p, R: int) -> list:
        r = self.row(p)
        return [self.points[i] for i in np.flatnonzero((r >= 0) & (r < R))]

    def sphere(self, p, R: int) -> list:
        r = self.row(p)
        return [self.points[i] for i in np.flatnonzero(r == R)]

    def within(self, p, R: int) -> list:
        r = self.row(p)
        return [self.points[i] for i in np.flatnonzero((r >= 0) & (r <= R))]

    def interval_slice(self, x, y, t: int) -> list:
        """Points at distance ``t`` from ``x`` lying on some geodesic ``[x, y]``."""
        rx, ry = self.row(x), self.row(y)
        d = rx[self.idx(y)]
        if d < 0:
            raise DisconnectedError(f"{x!r} and {y!r} lie in different components")
        return [self.points[i] for i in np.flatnonzero((rx == t) & (ry == d - t))]

    def geodesic(self, x, y) -> list:
        """One geodesic, choosing the least-index vertex at each step."""
        ry = self.row(y)
        i, j = self.idx(x), self.idx(y)
        if ry[i] < 0:
            raise DisconnectedError(f"{x!r} and {y!r} lie in different components")
        rx = self.row(x)
        d = int(ry[i])
        inside = np.flatnonzero((rx >= 0) & (rx + ry == d))
        if len(inside) == d + 1:  # the geodesic is unique
            return [self.points[k] for k in inside[np.argsort(rx[inside])]]
        path = [i]
        while path[-1] != j:
            u = path[-1]
            nbrs = self.indices[self.indptr[u] : self.indptr[u + 1]]
            path.append(int(nbrs[ry[nbrs] == ry[u] - 1].min()))
        return [self.points[k] for k in path]

    def all_geodesics(self, x, y, cap: int = DEFAULT_GEODESIC_CAP) -> Geodesics:
        """Every geodesic edge path from ``x`` to ``y`` (partial when over ``cap``)."""
        ry = self.row(y)
        i, j = self.idx(x), self.idx(y)
        if ry[i] < 0:
            raise DisconnectedError(f"{x!r} and {y!r} lie in different components")
        out: list = []
        stack = [(i, [i])]
        while stack:
            u, path = stack.pop()
            if u == j:
                out.append([self.points[k] for k in path])
                if len(out) > cap:
                    return Geodesics(out[:cap], False)
                continue
            nbrs = self.indices[self.indptr[u] : self.indptr[u + 1]]
            for v in sorted((int(v) for v in nbrs if ry[v] == ry[u] - 1), reverse=True):
                stack.append((v, path + [v]))
        return Geodesics(out, True)

    def complement_distance(self, p, R: int, x, y) -> float | int:
        """Shortest path length from ``x`` to ``y`` avoiding the open ball ``B_R(p)``."""
        for z in (x, y):
            if 0 <= self.row(p)[self.idx(z)] < R:
                raise PreconditionError(f"{z!r} lies inside the open ball B_{R}({p!r})")
        if x == y:
            return 0
        return _d(self.complement_row(p, R, x)[self.idx(y)])

    def avoiding_distance(self, blocked: Iterable, x, y) -> float | int:
        """Distance from ``x`` to ``y`` in the graph with ``blocked`` points deleted."""
        mask = np.zeros(len(self), dtype=np.uint8)
        for b in blocked:
            mask[self.idx(b)] = 1
        return _d(kernels.bfs(self.indptr, self.indices, self.idx(x), mask)[self.idx(y)])

    def point_neighbors(self, x) -> list:
        return self.neighbors(x)

    def act(self, g, x):
        return g.act(x)

    def to_json(self) -> dict:
        return {
            "kind": "graph",
            "vertices": list(self.points),
            "edges": [list(e) for e in self.edges],
        }


# ---------------------------------------------------------------------------
# Bass-Serre trees
# ---------------------------------------------------------------------------

H, K = 0, 1


class BassSerreSpace(GraphSpace):
    """Subdivided Bass-Serre tree of ``Z/h_order * Z/k_order``.

    Edge ``w`` joins the vertices ``wH`` (offset 0) and ``wK`` (offset ``s``).
    The base point is the vertex ``H`` = ``(e, 0)``.
    """

    kind = "bass_serre"

    def __init__(self, h_order: int, k_order: int, subdivision: int, truncation_syllables: int,
                 memoize: bool = True):
        if h_order < 2 or k_order < 2:
            raise ValueError("trivial factors rejected: both orders must be >= 2")
        if subdivision < 1:
            raise ValueError("subdivision must be a positive integer")
        if truncation_syllables < 0:
            raise ValueError("truncation must be nonnegative")
        self.group = FreeProduct((h_order, k_order))
        self.h_order, self.k_order = h_order, k_order
        self.s = subdivision
        self.truncation = truncation_syllables
        self.base = (self.group.identity, 0)
        pts: dict = {}
        edges = []
        for w in self.group.words(truncation_syllables):
            prev = self.canonical(w, 0)
            pts.setdefault(prev, None)
            for off in range(1, self.s + 1):
                cur = self.canonical(w, off)
                pts.setdefault(cur, None)
                edges.append((prev, cur))
                prev = cur
        super().__init__(pts, edges, memoize=memoize)
        self._ancestors = lru_cache(maxsize=None)(self._ancestor_path)

    # -- point model ---------------------------------------------------------

    def canonical(self, w: FreeProductElement, off: int):
        if off == 0 and w.letters and w.letters[-1][0] == H:
            w = FreeProductElement(self.group, w.letters[:-1])
        elif off == self.s and w.letters and w.letters[-1][0] == K:
            w = FreeProductElement(self.group, w.letters[:-1])
        return (w, off)

    def is_vertex(self, x) -> bool:
        return x[1] in (0, self.s)

    def vertex_type(self, x) -> str:
        if x[1] == 0:
            return "H"
        if x[1] == self.s:
            return "K"
        raise ValueError(f"{x!r} is not an unsubdivided vertex")

    def vertex(self, word: FreeProductElement | str, kind: str = "H"):
        if isinstance(word, str):
            word = self.group.parse(word)
        return self.canonical(word, 0 if kind == "H" else self.s)

    def coset_rep(self, x) -> FreeProductElement:
        return x[0]

    def act(self, g: FreeProductElement, x):
        return self.canonical(g * x[0], x[1])

    def label(self, x) -> str:
        return f"{x[0].label}|{x[1]}"

    def parse(self, label: str):
        try:
            word, off = label.rsplit("|", 1)
            return self.canonical(self.group.parse(word), int(off))
        except ValueError:
            raise UnknownPointError(f"bad point label {label!r}") from None

    def sort_key(self, x):
        return (self.tree_distance(self.base, x), len(x[0].letters), x[0].letters, x[1])

    def apices(self) -> list:
        """Unsubdivided vertices present in the truncation."""
        return sorted((p for p in self.points if self.is_vertex(p)), key=self.sort_key)

    def vertices_within(self, center, steps: int) -> list:
        """Unsubdivided vertices at most ``steps`` tree edges from ``center``."""
        out = [center]
        seen = {center}
        frontier = [center]
        for _ in range(steps):
            nxt = []
            for v in frontier:
                for u in self.tree_neighbors(v):
                    if u not in seen:
                        seen.add(u)
                        nxt.append(u)
            out.extend(nxt)
            frontier = nxt
        return sorted(out, key=self.sort_key)

    def tree_neighbors(self, v) -> list:
        w, off = v
        if off == 0:
            return [self.canonical(w * x, self.s) for x in self.group.factor_elements(H)]
        return [self.canonical(w * x, 0) for x in self.group.factor_elements(K)]

    def point_neighbors(self, x) -> list:
        """Neighbors in the full (untruncated) subdivided tree."""
        w, off = x
        if off == 0:
            return [self.canonical(w * e, 1) for e in self.group.factor_elements(H)]
        if off == self.s:
            return [self.canonical(w * e, self.s - 1) for e in self.group.factor_elements(K)]
        return [self.canonical(w, off - 1), self.canonical(w, off + 1)]

    def ball_inside(self, center, radius: int) -> bool:
        """Whether the closed ball lies inside the truncation."""
        return center[0].syllables + radius // self.s + 2 <= self.truncation

    # -- lazy exact metric -----------------------------------------------------

    def _parent(self, v):
        w, off = v
        if not w.letters:
            return None if off == 0 else self.base
        return (FreeProductElement(self.group, w.letters[:-1]), self.s if off == 0 else 0)

    def _ancestor_path(self, v) -> tuple:
        path = []
        while v is not None:
            path.append(v)
            v = self._parent(v)
        return tuple(reversed(path))

    def vertex_distance(self, u, v) -> int:
        """Distance in the unsubdivided tree."""
        pu, pv = self._ancestors(u), self._ancestors(v)
        c = 0
        for a, b in zip(pu, pv):
            if a != b:
                break
            c += 1
        return len(pu) + len(pv) - 2 * c

    def _ends(self, x):
        w, off = x
        if off in (0, self.s):
            return [(x, 0)]
        return [(self.canonical(w, 0), off), (self.canonical(w, self.s), self.s - off)]

    def tree_distance(self, x, y) -> int:
        if x == y:
            return 0
        if not self.is_vertex(x) and not self.is_vertex(y) and x[0] == y[0]:
            return abs(x[1] - y[1])
        return min(
            da + db + self.s * self.vertex_distance(a, b)
            for a, da in self._ends(x)
            for b, db in self._ends(y)
        )

    def distance(self, x, y) -> int:
        for z in (x, y):
            if not (isinstance(z, tuple) and len(z) == 2 and isinstance(z[0], FreeProductElement)):
                raise UnknownPointError(f"unknown point {z!r}")
            if not 0 <= z[1] <= self.s or self.canonical(*z) != z:
                raise UnknownPointError(f"non-canonical point {z!r}")
        return self.tree_distance(x, y)

    def to_json(self) -> dict:
        return {
            "kind": "bass_serre",
            "h_order": self.h_order,
            "k_order": self.k_order,
            "subdivision": self.s,
            "truncation_syllables": self.truncation,
        }


def space_from_json(d: dict) -> GraphSpace:
    kind = d.get("kind", "graph")
    if kind == "bass_serre":
        return BassSerreSpace(
            int(d["h_order"]), int(d["k_order"]), int(d["subdivision"]),
            int(d.get("truncation_syllables", 6)),
        )
    if kind == "graph":
        edges = [tuple(e) for e in d["edges"]]
        return GraphSpace(d["vertices"], edges)
    raise ValueError(f"unknown space kind {kind!r}")


# ---------------------------------------------------------------------------
# thin triangles and detours
# ---------------------------------------------------------------------------


@dataclass
class ThinTriangleReport:
    delta: int
    witness: dict | None
    examined: int
    skipped: list = field(default_factory=list)
    label: str = "certified on sample"

    @property
    def delta_op(self) -> int:
        return max(self.delta, 1)


def _pairwise(space: GraphSpace, pts: list) -> np.ndarray:
    rows = space.rows(pts)
    return rows[:, [space.idx(p) for p in pts]]


def thin_delta(space: GraphSpace, sample=None) -> ThinTriangleReport:
    """Thinness constant of the sampled triangles under the tripod map.

    For each triangle corner ``a`` and each tripod coordinate ``t`` up to the
    Gromov product, the points of ``[a,b]`` and of ``[a,c]`` at distance ``t``
    from ``a`` range, over all geodesic choices, exactly over the interval
    slices; both sides are chosen independently, so the maximum over slice
    pairs is the maximum over all geodesic triangles on those vertices.
    """
    if sample is None:
        if len(space) > 200:
            raise PreconditionError("exhaustive thin_delta limited to spaces of <= 200 points")
        pts = list(space.points)
        sample = [(a, b, c) for i, a in enumerate(pts) for j, b in enumerate(pts[i:], i)
                  for c in pts[j:]]
    best, witness, examined, skipped = 0, None, 0, []
    for a, b, c in sample:
        dab, dac, dbc = space.distance(a, b), space.distance(a, c), space.distance(b, c)
        if INF in (dab, dac, dbc):
            skipped.append({"triple": [space.label(p) for p in (a, b, c)], "reason": "disconnected"})
            continue
        examined += 1
        corners = ((a, b, c, dab, dac, dbc), (b, a, c, dab, dbc, dac), (c, a, b, dac, dbc, dab))
        for x, y, z, dxy, dxz, dyz in corners:
            gp2 = dxy + dxz - dyz  # twice the Gromov product (y|z)_x
            for t in range(gp2 // 2 + 1):
                s1 = space.interval_slice(x, y, t)
                s2 = space.interval_slice(x, z, t)
                r1 = space.rows(s1)
                sub = r1[:, [space.idx(v) for v in s2]]
                m = int(sub.max())
                if m > best:
                    iu, iv = np.unravel_index(int(sub.argmax()), sub.shape)
                    u, v = s1[iu], s2[iv]
                    best = m
                    witness = {
                        "triple": [space.label(p) for p in (a, b, c)],
                        "corner": space.label(x),
                        "t": t,
                        "points": [space.label(u), space.label(v)],
                        "distance": m,
                        "geodesics": [
                            [space.label(p) for p in space.geodesic(x, u) + space.geodesic(u, y)[1:]],
                            [space.label(p) for p in space.geodesic(x, v) + space.geodesic(v, z)[1:]],
                        ],
                    }
    return ThinTriangleReport(best, witness, examined, skipped)


def _pow2_at_most(length, R: int, delta: int) -> bool:
    """``2 ** ((R - 1) / delta) <= length`` evaluated exactly."""
    if length == INF:
        return True
    if R <= 1:
        return length >= 1 or R < 1
    return int(length) ** delta >= 2 ** (R - 1)


def detour_audit(space: GraphSpace, samples, delta_op: int) -> Report:
    """Every path from x to y outside ``B_R(m)`` has length >= 2^((R-1)/delta_op)."""
    rep = Report("detour bound", stats={"delta_op": delta_op})
    if delta_op < 1:
        raise PreconditionError("delta_op must be >= 1")
    if isinstance(space, BassSerreSpace):
        rep.window = {"truncation_syllables": space.truncation}
    min_detour = INF
    vacuous = 0
    for x, y, m in samples:
        R = space.distance(x, m)
        if space.distance(m, y) != R or space.distance(x, y) != 2 * R:
            raise PreconditionError(f"{m!r} is not a geodesic midpoint of {x!r}, {y!r}")
        detour = space.complement_distance(m, R, x, y)
        min_detour = min(min_detour, detour)
        if detour == INF:
            vacuous += 1
        if not _pow2_at_most(detour, R, delta_op):
            rep.fail({
                "x": space.label(x), "y": space.label(y), "m": space.label(m), "R": R,
                "detour": detour, "bound": 2 ** ((R - 1) / delta_op),
            })
    rep.stats.update(min_detour=min_detour, samples=len(list(samples)) if not isinstance(samples, list) else len(samples),
                     disconnected=vacuous)
    if vacuous:
        rep.notes.append("disconnected: bound holds vacuously")
    return rep.finish()


__all__ = [
    "GraphSpace", "BassSerreSpace", "Geodesics", "ThinTriangleReport", "thin_delta",
    "detour_audit", "space_from_json", "INF", "FAIL", "PASS", "PARTIAL",
]
