"""Angles along paths in a projection complex and canoeing-path validation."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import PreconditionError
from .metric import INF
from .reports import NOT_APPLICABLE, Report


@dataclass
class CanoePath:
    """A vertex path cut into segments.

    ``segments`` holds ``(start, end, split)`` index triples into ``vertices``;
    consecutive segments share their endpoint.  ``split`` is the index of the
    junction of a two-geodesic segment, or ``None`` for a single geodesic.
    """

    vertices: list
    segments: list = field(default_factory=list)
    C: object = None

    def __post_init__(self):
        if not self.segments and len(self.vertices) > 1:
            self.segments = [(0, len(self.vertices) - 1, None)]
        self.segments = [tuple(s) for s in self.segments]

    @property
    def junctions(self) -> list:
        """Indices of the large-angle points ``V_1 .. V_{m-1}``."""
        return [s[1] for s in self.segments[:-1]]

    @property
    def large_angle_points(self) -> list:
        return [self.vertices[i] for i in self.junctions]

    @property
    def endpoints(self):
        return self.vertices[0], self.vertices[-1]

    def subpath(self, lo: int, hi: int) -> "CanoePath":
        """The contiguous subpath ``vertices[lo..hi]`` with segments clipped."""
        segs = []
        for a, b, sp in self.segments:
            a2, b2 = max(a, lo), min(b, hi)
            if a2 < b2:
                keep = sp if sp is not None and a2 < sp < b2 else None
                segs.append((a2 - lo, b2 - lo, None if keep is None else keep - lo))
        return CanoePath(self.vertices[lo:hi + 1], segs, self.C)

    def to_json(self, label=str) -> dict:
        return {"vertices": [label(v) for v in self.vertices],
                "segments": [list(s) for s in self.segments], "C": self.C}

    @classmethod
    def from_json(cls, d: dict, parse=lambda s: s) -> "CanoePath":
        segs = [(int(a), int(b), None if sp is None else int(sp)) for a, b, sp in d.get("segments", [])]
        return cls([parse(v) for v in d["vertices"]], segs, d.get("C"))


def angle(pc, path, i: int):
    """``d_{X_i}(X_{i-1}, X_{i+1})``."""
    vs = path.vertices if isinstance(path, CanoePath) else list(path)
    if not 0 < i < len(vs) - 1:
        raise IndexError(f"angle index {i} is not an interior position of a {len(vs)}-vertex path")
    return pc.data.dist(vs[i], vs[i - 1], vs[i + 1])


def _is_geodesic(pc, vs) -> bool:
    return pc.distance(vs[0], vs[-1]) == len(vs) - 1


def validate_canoe(pc, path: CanoePath, C) -> Report:
    rep = Report("canoeing path", window=pc.window, stats={"C": C})
    vs = path.vertices
    if len(vs) < 2:
        rep.fail({"reason": "degenerate path", "vertices": [pc.label(v) for v in vs]})
        return rep.finish()
    prev_end = 0
    for k, (a, b, sp) in enumerate(path.segments):
        seg = vs[a:b + 1]
        where = {"segment": k, "vertices": [pc.label(v) for v in seg]}
        if a != prev_end or b <= a:
            rep.fail({**where, "reason": "segments do not tile the path"})
        prev_end = b
        if len(set(seg)) != len(seg):
            rep.fail({**where, "reason": "segment not embedded"})
            continue
        if any(not pc.adjacent(u, v) for u, v in zip(seg, seg[1:])):
            rep.fail({**where, "reason": "consecutive vertices not adjacent"})
            continue
        if sp is None:
            ok = _is_geodesic(pc, seg)
        else:
            ok = a < sp < b and _is_geodesic(pc, vs[a:sp + 1]) and _is_geodesic(pc, vs[sp:b + 1])
        if not ok:
            rep.fail({**where, "reason": "segment is not a geodesic or a concatenation of two",
                      "split": sp})
    if prev_end != len(vs) - 1:
        rep.fail({"reason": "segments do not reach the end of the path"})
    smallest = INF
    for i in path.junctions:
        a = angle(pc, path, i)
        if a is None:
            rep.fail({"junction": pc.label(vs[i]), "reason": "angle undefined"})
            continue
        smallest = min(smallest, a)
        if a < C:
            rep.fail({"junction": pc.label(vs[i]), "angle": a, "C": C})
    rep.stats.update(large_angle_points=len(path.junctions), min_angle=smallest)
    return rep.finish()


def endpoints_audit(pc, path: CanoePath, C) -> Report:
    """Large-angle points lie on the standard path between distinct endpoints."""
    threshold = 4 * pc.M + pc.K
    rep = Report("canoe endpoints", window=pc.window, stats={"C": C, "threshold": threshold})
    if not C > threshold:
        rep.verdict = NOT_APPLICABLE
        rep.notes.append(f"C = {C} does not exceed 4M + K = {threshold}")
        return rep
    v = validate_canoe(pc, path, C)
    if not v.passed:
        raise PreconditionError("path is not a valid canoeing path: " + str(v.witnesses[:1]))
    x, y = path.endpoints
    if len(set(path.vertices)) != len(path.vertices):
        rep.fail({"reason": "path not embedded"})
    if x == y:
        rep.fail({"reason": "endpoints coincide", "endpoint": pc.label(x)})
        return rep.finish()
    if path.junctions:
        sp = set(pc.standard_path(x, y))
        for V in path.large_angle_points:
            if V not in sp:
                rep.fail({"reason": "large-angle point off the standard path", "V": pc.label(V)})
    return rep.finish()


def distance_lower_bound(pc, path: CanoePath, C=None) -> Report:
    """``d_P(X, Y) >= k / 2`` with ``k`` large-angle points."""
    C = path.C if C is None else C
    if C is None or not C > 4 * pc.M + pc.K:
        raise PreconditionError("distance bound needs C > 4M + K")
    v = validate_canoe(pc, path, C)
    if not v.passed:
        raise PreconditionError("validation failed: " + str(v.witnesses[:1]))
    k = len(path.junctions)
    x, y = path.endpoints
    d = pc.distance(x, y)
    rep = Report("canoe distance bound", window=pc.window, stats={"k": k, "d_P": d, "bound": k / 2})
    if 2 * d < k:
        rep.fail({"x": pc.label(x), "y": pc.label(y), "k": k, "d_P": d})
    return rep.finish()
