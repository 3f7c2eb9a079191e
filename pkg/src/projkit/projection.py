"""Sphere projections onto apices and the projection distances ``d_p``.

For an apex ``p`` the sphere ``S_p`` is the set of points at distance ``R``
from ``p``; it carries the path metric of the complement of the open ball
``B_R(p)``.  The projection of a point ``a`` is the set of sphere points lying
on some geodesic ``[p, a]``, which on a unit-edge graph is exactly
``{u in S_p : d(p,u) = R, d(u,a) = d(p,a) - R}``.  This gives the projection
from two BFS rows with no geodesic enumeration, so projections are always
complete (never capped).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, UnknownPointError
from .metric import INF, GraphSpace
from .reports import NOT_APPLICABLE, Report

NAN = float("nan")


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("PROJKIT_WORKERS", "1")))
    except ValueError:
        return 1


def _ext(v):
    """numpy float cell -> int / inf / None (undefined)."""
    if v != v:
        return None
    if math.isinf(v):
        return INF
    return int(v)


@dataclass
class ApexFamily:
    space: GraphSpace
    apices: list
    rho: int
    R: int
    delta_op: int = 1

    def validate(self) -> Report:
        """Separation and the admissible radius window ``2+2d <= R <= rho/2 - 3d``."""
        rep = Report("apex family", stats={"rho": self.rho, "R": self.R, "delta_op": self.delta_op,
                                           "apices": len(self.apices)})
        d = self.delta_op
        if not 2 + 2 * d <= self.R:
            rep.fail({"inequality": "2 + 2*delta <= R", "R": self.R, "delta_op": d})
        if not 2 * self.R <= self.rho - 6 * d:
            rep.fail({"inequality": "R <= rho/2 - 3*delta", "R": self.R, "rho": self.rho,
                      "delta_op": d})
        sp = self.space
        rows = sp.rows(self.apices)
        ids = [sp.idx(a) for a in self.apices]
        sub = rows[:, ids].astype(np.int64)
        sub[sub < 0] = np.iinfo(np.int64).max
        np.fill_diagonal(sub, np.iinfo(np.int64).max)
        if len(ids) > 1:
            i, j = np.unravel_index(int(sub.argmin()), sub.shape)
            dmin = int(sub[i, j])
            if dmin == np.iinfo(np.int64).max:
                rep.stats["min_separation"] = INF
            else:
                rep.stats["min_separation"] = dmin
                if dmin < self.rho:
                    bad = np.argwhere(np.triu(sub < self.rho, 1))
                    for i, j in bad:
                        rep.fail({"apices": [sp.label(self.apices[i]), sp.label(self.apices[j])],
                                  "distance": int(sub[i, j]), "rho": self.rho})
        return rep.finish()


class ProjectionData:
    """Projection point-sets and projection distances over a finite index set.

    ``sphere[p]`` lists the points of ``S_p``; ``cmat[p]`` is their pairwise
    complement-metric distance matrix (float, ``inf`` across components);
    ``masks[p]`` is a boolean ``(n, |S_p|)`` array whose row ``a`` marks
    ``pi_p(a)``.  The dense table ``D[p, a, b] = d_p(a, b)`` is ``nan`` where
    undefined (``p`` equal to ``a`` or ``b``, or an empty projection).
    """

    def __init__(self, apices, sphere, cmat, masks, theta, R, delta_op, space=None,
                 window=None, labels=None):
        self.apices = list(apices)
        self.index = {a: i for i, a in enumerate(self.apices)}
        self.sphere = sphere
        self.cmat = cmat
        self.masks = masks
        self.theta = theta
        self.R = R
        self.delta_op = delta_op
        self.space = space
        self.window = window
        self._labels = labels
        self._extra: dict = {}
        self.D = self._table()

    # -- identifiers ---------------------------------------------------------

    def __len__(self):
        return len(self.apices)

    def label(self, x) -> str:
        if self.space is not None:
            return self.space.label(x)
        return str(x)

    def i(self, p) -> int:
        try:
            return self.index[p]
        except (KeyError, TypeError):
            raise UnknownPointError(f"{p!r} is not in the index set") from None

    # -- projections -----------------------------------------------------------

    def _table(self) -> np.ndarray:
        n = len(self.apices)
        D = np.full((n, n, n), NAN)
        for pi in range(n):
            C, m = self.cmat[pi], self.masks[pi]
            if m.shape[1] == 0:
                continue
            # X[a, v] = max_{u in pi(a)} C[u, v]; -1 marks an empty projection
            X = np.where(m[:, :, None], C[None, :, :], -1.0).max(axis=1)
            cross = np.where(m[None, :, :], X[:, None, :], -1.0).max(axis=2)
            inner = np.where(m, X, -1.0).max(axis=1)
            T = np.maximum(np.maximum(cross, cross.T), np.maximum(inner[:, None], inner[None, :]))
            empty = ~m.any(axis=1)
            T[empty, :] = NAN
            T[:, empty] = NAN
            T[pi, :] = NAN
            T[:, pi] = NAN
            D[pi] = T
        return D

    def projection(self, p, a) -> list:
        """``pi_p(a)`` as a sorted list of points."""
        if p == a:
            raise PreconditionError("projection of an apex to itself is undefined")
        pi = self.i(p)
        if a in self.index:
            row = self.masks[pi][self.i(a)]
        else:
            row = self._point_mask(pi, a)
        return [self.sphere[pi][j] for j in np.flatnonzero(row)]

    def _point_mask(self, pi, x) -> np.ndarray:
        key = (pi, x)
        m = self._extra.get(key)
        if m is None:
            if self.space is None:
                raise UnknownPointError(f"{x!r} is outside the stored index set")
            m = projection_mask(self.space, self.apices[pi], self.sphere[pi], self.R, x)
            self._extra[key] = m
        return m

    def dist(self, p, a, b):
        """``d_p(a, b)`` in the extended sense; ``None`` when a projection is empty."""
        if p == a or p == b:
            raise PreconditionError("d_p(a, b) needs p distinct from a and b")
        if a in self.index and b in self.index:
            return _ext(self.D[self.i(p), self.i(a), self.i(b)])
        pi = self.i(p)
        ma = self.masks[pi][self.i(a)] if a in self.index else self._point_mask(pi, a)
        mb = self.masks[pi][self.i(b)] if b in self.index else self._point_mask(pi, b)
        if not ma.any() or not mb.any():
            return None
        u = ma | mb
        return _ext(self.cmat[pi][np.ix_(u, u)].max())

    def diam(self, p, a):
        return self.dist(p, a, a)

    def sphere_distance(self, p, u, v):
        pi = self.i(p)
        s = self.sphere[pi]
        return _ext(self.cmat[pi][s.index(u), s.index(v)])

    def empty_pairs(self) -> list:
        out = []
        for pi, m in enumerate(self.masks):
            for ai in np.flatnonzero(~m.any(axis=1)):
                if ai != pi:
                    out.append((self.apices[pi], self.apices[ai]))
        return out

    def with_theta(self, theta) -> "ProjectionData":
        return ProjectionData(self.apices, self.sphere, self.cmat, self.masks, theta, self.R,
                              self.delta_op, self.space, self.window)

    def restrict(self, apices) -> "ProjectionData":
        """Data on a sub-index-set (same spheres, fewer rows)."""
        keep = [self.i(a) for a in apices]
        return ProjectionData(
            [self.apices[i] for i in keep],
            [self.sphere[i] for i in keep],
            [self.cmat[i] for i in keep],
            [self.masks[i][keep] for i in keep],
            self.theta, self.R, self.delta_op, self.space, self.window,
        )

    def replace_projection(self, p, a, points) -> "ProjectionData":
        """Copy with ``pi_p(a)`` replaced (used to build negative controls)."""
        pi, ai = self.i(p), self.i(a)
        masks = [m.copy() for m in self.masks]
        s = self.sphere[pi]
        for u in points:
            if u not in s:
                raise UnknownPointError(f"{u!r} is not on the sphere of {p!r}")
        masks[pi][ai] = np.array([u in points for u in s], dtype=bool)
        return ProjectionData(self.apices, self.sphere, self.cmat, masks, self.theta, self.R,
                              self.delta_op, self.space, self.window)

    # -- serialization ---------------------------------------------------------

    def to_json(self) -> dict:
        lab = self.label

        def num(v):
            return "inf" if math.isinf(v) else int(v)

        return {
            "theta": self.theta,
            "R": self.R,
            "delta_op": self.delta_op,
            "window": self.window,
            "apices": [lab(a) for a in self.apices],
            "spheres": {lab(p): [lab(u) for u in self.sphere[pi]] for pi, p in enumerate(self.apices)},
            "projections": {
                lab(p): [[lab(a), [lab(self.sphere[pi][j]) for j in np.flatnonzero(self.masks[pi][ai])]]
                         for ai, a in enumerate(self.apices) if ai != pi]
                for pi, p in enumerate(self.apices)
            },
            "sphere_distances": {
                lab(p): [[lab(s[i]), lab(s[j]), num(self.cmat[pi][i, j])]
                         for i in range(len(s)) for j in range(i + 1, len(s))]
                for pi, p in enumerate(self.apices) for s in [self.sphere[pi]]
            },
        }

    @classmethod
    def from_json(cls, d: dict, space=None) -> "ProjectionData":
        parse = space.parse if space is not None else (lambda s: s)
        apices = [parse(a) for a in d["apices"]]
        index = {a: i for i, a in enumerate(apices)}
        n = len(apices)
        spheres_raw = d.get("spheres")
        sphere, cmat, masks = [], [], []
        for pi, p in enumerate(apices):
            key = d["apices"][pi]
            entries = d["projections"].get(key, [])
            if spheres_raw is not None:
                pts = [parse(u) for u in spheres_raw.get(key, [])]
            else:
                pts = sorted({parse(u) for _, us in entries for u in us}, key=str)
            pos = {u: j for j, u in enumerate(pts)}
            C = np.zeros((len(pts), len(pts)))
            for u, v, dist in d.get("sphere_distances", {}).get(key, []):
                val = INF if dist == "inf" else float(dist)
                C[pos[parse(u)], pos[parse(v)]] = C[pos[parse(v)], pos[parse(u)]] = val
            m = np.zeros((n, len(pts)), dtype=bool)
            for a, us in entries:
                for u in us:
                    m[index[parse(a)], pos[parse(u)]] = True
            sphere.append(pts)
            cmat.append(C)
            masks.append(m)
        return cls(apices, sphere, cmat, masks, d["theta"], d["R"], d.get("delta_op", 1), space,
                   d.get("window"))


def projection_mask(space: GraphSpace, p, sphere: list, R: int, x) -> np.ndarray:
    if x not in space:
        # lazy backends: exact distances beyond the truncated view
        dists = np.array([space.distance(u, x) for u in sphere], dtype=float)
        return dists == dists.min() if len(sphere) else np.zeros(0, dtype=bool)
    rp, rx = space.row(p), space.row(x)
    dpx = rp[space.idx(x)]
    if dpx < 0:
        return np.zeros(len(sphere), dtype=bool)
    ids = np.array([space.idx(u) for u in sphere], dtype=np.int64)
    if dpx < R:
        # inside the ball: plain nearest points of the sphere
        r = rx[ids]
        return r == r[r >= 0].min() if (r >= 0).any() else np.zeros(len(sphere), dtype=bool)
    return rx[ids] == dpx - R


def _sphere_block(space: GraphSpace, p, R: int):
    sphere = space.sphere(p, R)
    ids = [space.idx(u) for u in sphere]
    C = np.zeros((len(sphere), len(sphere)))
    for j, u in enumerate(sphere):
        r = space.complement_row(p, R, u)[ids].astype(float)
        r[r < 0] = np.inf
        C[j] = r
    return sphere, C


def build_projection_data(fam: ApexFamily, theta=None, window=None, workers=None,
                          check_family: bool = True) -> ProjectionData:
    """Sphere projections for every ordered apex pair of ``fam``."""
    if check_family:
        rep = fam.validate()
        if not rep.passed:
            raise PreconditionError("apex family invariants fail: " + "; ".join(
                str(w) for w in rep.witnesses[:3]))
    if theta is None:
        theta = 121 * fam.delta_op
    space, R = fam.space, fam.R
    apices = list(fam.apices)
    space.rows(apices)
    workers = workers or default_workers()
    if workers > 1 and len(apices) > 1:
        with ThreadPoolExecutor(workers) as ex:
            blocks = list(ex.map(lambda p: _sphere_block(space, p, R), apices))
    else:
        blocks = [_sphere_block(space, p, R) for p in apices]
    sphere = [b[0] for b in blocks]
    cmat = [b[1] for b in blocks]
    masks = []
    rows = space.rows(apices)
    for pi, p in enumerate(apices):
        ids = np.array([space.idx(u) for u in sphere[pi]], dtype=np.int64)
        dp = rows[pi][[space.idx(a) for a in apices]]
        if len(ids):
            # mask[a, u] : d(u, a) == d(p, a) - R, read from the apex rows
            mask = rows[:, ids] == (dp[:, None] - R)
            mask &= (dp >= R)[:, None]
            mask &= (rows[:, ids] >= 0)
        else:
            mask = np.zeros((len(apices), 0), dtype=bool)
        mask[pi] = False
        masks.append(mask)
    return ProjectionData(apices, sphere, cmat, masks, theta, R, fam.delta_op, space, window)


# ---------------------------------------------------------------------------
# audits
# ---------------------------------------------------------------------------


def proj_distance(data: ProjectionData, p, a, b):
    return data.dist(p, a, b)


def diam_audit(data: ProjectionData) -> Report:
    """Largest projection diameter against ``4 * delta_op``."""
    bound = 4 * data.delta_op
    rep = Report("projection diameters", window=data.window, stats={"bound": bound})
    n = len(data)
    ar = np.arange(n)
    diag = data.D[:, ar, ar]
    vals = diag[~np.isnan(diag)]
    rep.stats["max_diameter"] = _ext(vals.max()) if vals.size else 0
    rep.stats["skipped_empty"] = len(data.empty_pairs())
    if rep.stats["skipped_empty"]:
        rep.notes.append("empty projections (different components) skipped")
    for pi, ai in np.argwhere(diag > bound):
        rep.fail({"p": data.label(data.apices[pi]), "a": data.label(data.apices[ai]),
                  "diameter": _ext(diag[pi, ai])})
    return rep.finish()


def bounded_proj_audit(data: ProjectionData, samples) -> Report:
    """If some geodesic ``[a, b]`` misses ``B_{R+2d}(c)`` then ``d_c(a, b) <= 4d``."""
    space = data.space
    if space is None:
        raise PreconditionError("bounded projection audit needs the underlying space")
    d = data.delta_op
    radius = data.R + 2 * d
    bound = 4 * d
    rep = Report("bounded projection", window=data.window, stats={"bound": bound, "radius": radius})
    applicable = 0
    worst = 0
    for a, b, c in samples:
        rc = space.row(c)
        if any(0 <= rc[space.idx(z)] < radius for z in (a, b)):
            continue
        dab = space.distance(a, b)
        if dab == INF or space.complement_distance(c, radius, a, b) != dab:
            continue
        applicable += 1
        val = data.dist(c, a, b)
        if val is None:
            continue
        worst = max(worst, val)
        if val > bound:
            rep.fail({"a": data.label(a), "b": data.label(b), "c": data.label(c), "d_c": val})
    rep.stats.update(applicable=applicable, max_observed=worst)
    if not applicable:
        rep.verdict = NOT_APPLICABLE
    return rep.finish()
