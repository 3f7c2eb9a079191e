"""Rotating families: apex sets with finite rotation subgroups, and their checks.

Two kinds of family are supported:

* :class:`BassSerreFamily` -- every unsubdivided vertex of a Bass-Serre tree is
  an apex and ``G_c`` is its full stabilizer ``w H w^-1`` or ``w K w^-1``.
* :class:`ExplicitFamily` -- a finite graph with permutation generators and
  named generator lists per apex.
"""

from __future__ import annotations

from .constants import spin_angle_bound, pow2_at_most
from .errors import PartialActionError, PreconditionError, UnknownPointError
from .groups import Permutation, closure, enumerate_products
from .metric import INF, BassSerreSpace, GraphSpace
from .reports import NOT_APPLICABLE, PASS, Report

DEFAULT_WORD_BOUND = 6


class RotatingFamily:
    space: GraphSpace
    rho: int

    def is_apex(self, x) -> bool:
        raise NotImplementedError

    def subgroup_generators(self, c) -> list:
        raise NotImplementedError

    def group_generators(self) -> list:
        raise NotImplementedError

    def identity(self):
        raise NotImplementedError

    def act(self, g, x):
        raise NotImplementedError

    def subgroup(self, c) -> list:
        """All elements of ``G_c`` (finite)."""
        return closure(self.subgroup_generators(c), self.identity())

    def nontrivial(self, c) -> list:
        return [g for g in self.subgroup(c) if not g.is_identity]

    def elements(self, word_bound: int) -> list:
        """Elements of ``G`` that are products of at most ``word_bound`` generators."""
        elems, _ = enumerate_products(self.group_generators(), word_bound)
        return elems or [self.identity()]

    def label(self, x) -> str:
        return self.space.label(x)

    def to_json(self) -> dict:
        raise NotImplementedError


class BassSerreFamily(RotatingFamily):
    def __init__(self, space: BassSerreSpace, rho: int | None = None):
        self.space = space
        self.rho = space.s if rho is None else rho

    def is_apex(self, x) -> bool:
        return self.space.is_vertex(x)

    def subgroup_generators(self, c) -> list:
        w = c[0]
        f = 0 if c[1] == 0 else 1
        return [w * self.space.group.letter(f) * w.inverse()]

    def group_generators(self) -> list:
        return self.space.group.generators()

    def identity(self):
        return self.space.group.identity

    def act(self, g, x):
        return self.space.act(g, x)

    def elements(self, word_bound: int) -> list:
        # syllable bound on normal forms, matching the word bound convention
        return self.space.group.words(word_bound)

    def to_json(self) -> dict:
        return {"kind": "bass_serre_stabilizers", "rho": self.rho}


class ExplicitFamily(RotatingFamily):
    def __init__(self, space: GraphSpace, apices, generators: dict, subgroups: dict, rho: int):
        self.space = space
        self.apex_list = list(apices)
        self.apex_set = set(self.apex_list)
        self.generators = {name: (g if isinstance(g, Permutation) else Permutation(g))
                           for name, g in generators.items()}
        self.subgroups = {c: list(names) for c, names in subgroups.items()}
        self.rho = rho

    def is_apex(self, x) -> bool:
        return x in self.apex_set

    def subgroup_generators(self, c) -> list:
        if c not in self.apex_set:
            raise UnknownPointError(f"{c!r} is not an apex")
        return [self.generators[n] for n in self.subgroups.get(c, [])]

    def group_generators(self) -> list:
        return list(self.generators.values())

    def identity(self):
        return Permutation.identity()

    def act(self, g, x):
        return g.act(x)

    def to_json(self) -> dict:
        lab = self.space.label
        return {
            "kind": "explicit",
            "rho": self.rho,
            "apices": [lab(a) for a in self.apex_list],
            "generators": {n: {lab(x): lab(y) for x, y in (g.mapping or {}).items()}
                           for n, g in self.generators.items()},
            "subgroups": {lab(c): names for c, names in self.subgroups.items()},
        }


def family_from_json(d: dict, space: GraphSpace) -> RotatingFamily:
    kind = d.get("kind")
    if kind == "bass_serre_stabilizers":
        if not isinstance(space, BassSerreSpace):
            raise ValueError("stabilizer families need a bass_serre space")
        return BassSerreFamily(space, d.get("rho"))
    if kind == "explicit":
        p = space.parse
        gens = {n: Permutation({p(x): p(y) for x, y in m.items()}) for n, m in d["generators"].items()}
        subs = {p(c): names for c, names in d.get("subgroups", {}).items()}
        return ExplicitFamily(space, [p(a) for a in d["apices"]], gens, subs, int(d.get("rho", 1)))
    raise ValueError(f"unknown family kind {kind!r}")


def _safe_act(fam, g, x):
    try:
        return fam.act(g, x)
    except PartialActionError:
        return None


def _same_group(a: list, b: list) -> bool:
    return set(a) == set(b)


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------


def check_rotating(fam: RotatingFamily, window, word_bound: int = DEFAULT_WORD_BOUND) -> Report:
    """(a-1) invariance, (a-2) fixing, (a-3) conjugation equivariance."""
    rep = Report("rotating family", window={"apices": len(window), "word_bound": word_bound})
    boundary = 0
    gens = fam.group_generators()
    for c in window:
        for s in gens:
            img = _safe_act(fam, s, c)
            if img is None:
                boundary += 1
            elif not fam.is_apex(img):
                rep.fail({"condition": "a-1", "apex": fam.label(c), "generator": s.label,
                          "image": fam.label(img)})
        for g in fam.subgroup_generators(c):
            img = _safe_act(fam, g, c)
            if img != c:
                rep.fail({"condition": "a-2", "apex": fam.label(c), "element": g.label,
                          "image": None if img is None else fam.label(img)})
    rep.stats["a3_checks"] = _check_conjugation(fam, window, word_bound, rep)
    rep.stats["boundary_skipped"] = boundary
    if boundary:
        rep.notes.append("actions undefined near the truncation boundary were skipped")
    return rep.finish()


def _check_conjugation(fam, window, word_bound, rep) -> int:
    checks = 0
    elems = fam.elements(word_bound)
    cache = {}
    for c in window:
        Gc = fam.subgroup(c)
        for g in elems:
            gc = _safe_act(fam, g, c)
            if gc is None or not fam.is_apex(gc):
                continue
            if gc not in cache:
                try:
                    cache[gc] = fam.subgroup(gc)
                except UnknownPointError:
                    cache[gc] = None
            target = cache[gc]
            if target is None:
                continue
            checks += 1
            ginv = g.inverse()
            conj = [g * h * ginv for h in Gc]
            if not _same_group(conj, target):
                rep.fail({"condition": "a-3", "apex": fam.label(c), "element": g.label,
                          "image": fam.label(gc)})
    return checks


def check_fairly_rotating(fam: RotatingFamily, window, delta_op: int = 1) -> Report:
    """Some geodesic ``[x, gx]`` meets the closed 1-ball around ``c``."""
    rep = Report("fairly rotating", window={"apices": len(window)})
    space = fam.space
    checked = skipped = 0
    for c in window:
        ball = [c] + space.point_neighbors(c)
        for g in fam.nontrivial(c):
            for x in window:
                if x == c:
                    continue
                gx = _safe_act(fam, g, x)
                if gx is None:
                    skipped += 1
                    continue
                d = space.distance(x, gx)
                checked += 1
                if not any(space.distance(x, u) + space.distance(u, gx) == d for u in ball):
                    rep.fail({"c": fam.label(c), "g": g.label, "x": fam.label(x),
                              "gx": fam.label(gx), "d": d})
    rep.stats.update(checked=checked, boundary_skipped=skipped)
    return rep.finish()


def fairly_rotating_holds(fam: RotatingFamily, window) -> bool:
    return check_fairly_rotating(fam, window).passed


def check_very_rotating(fam: RotatingFamily, window, delta_op: int = 1) -> Report:
    """Annulus pairs ``x, y`` with ``d(gx, y) <= 15 delta`` are separated by ``c``."""
    lo, hi, near = 20 * delta_op, 40 * delta_op, 15 * delta_op
    rep = Report("very rotating", window={"apices": len(window)},
                 stats={"annulus": [lo, hi], "near": near})
    space = fam.space
    checked = skipped_apices = 0
    for c in window:
        if isinstance(space, BassSerreSpace) and not space.ball_inside(c, hi + near):
            skipped_apices += 1
            continue
        rc = space.row(c)
        annulus = [space.points[i] for i in ((rc >= lo) & (rc <= hi)).nonzero()[0]]
        if not annulus:
            continue
        ids = [space.idx(y) for y in annulus]
        blocked = {c}
        for g in fam.nontrivial(c):
            for x in annulus:
                gx = _safe_act(fam, g, x)
                if gx is None or gx not in space:
                    continue
                rg = space.row(gx)[ids]
                cands = [annulus[k] for k in (rg <= near).nonzero()[0] if rg[k] >= 0]
                if not cands:
                    continue
                rx = space.row(x)
                for y in cands:
                    checked += 1
                    d = int(rx[space.idx(y)])
                    if space.avoiding_distance(blocked, x, y) <= d:
                        rep.fail({"c": fam.label(c), "g": g.label, "x": fam.label(x),
                                  "y": fam.label(y), "d": d})
    rep.stats.update(checked=checked, boundary_skipped_apices=skipped_apices)
    if not checked:
        rep.verdict = NOT_APPLICABLE if rep.verdict == PASS else rep.verdict
        rep.notes.append("no annulus pairs in window: vacuous")
    return rep.finish()


def check_spinning(pc, fam: RotatingFamily, L, window=None, word_bound: int = DEFAULT_WORD_BOUND) -> Report:
    """Equivariance at the word bound and ``d_a(b, gb) >= L`` for nontrivial ``g`` in ``G_a``."""
    data = pc.data
    window = list(pc.apices if window is None else window)
    rep = Report("spinning", window={"apices": len(window), "word_bound": word_bound},
                 stats={"L": L})
    eq = Report("equivariance")
    rep.stats["equivariance_checks"] = _check_conjugation(fam, window, word_bound, eq)
    for w in eq.witnesses:
        rep.fail(w)
    low, triples, skipped = _spin_scan(data, fam, window)
    rep.stats.update(min_observed=low["value"], triples=triples, skipped=skipped)
    if low["value"] < L:
        for w in low["witnesses"]:
            if w["d_a(b,gb)"] < L:
                rep.fail(w)
    if L <= 0:
        rep.notes.append("L <= 0: spinning holds trivially")
    return rep.finish()


def _spin_scan(data, fam, window):
    low = {"value": INF, "witnesses": []}
    triples = skipped = 0
    for a in window:
        for g in fam.nontrivial(a):
            for b in window:
                if b == a:
                    continue
                gb = _safe_act(fam, g, b)
                if gb is None:
                    skipped += 1
                    continue
                try:
                    v = data.dist(a, b, gb)
                except UnknownPointError:
                    skipped += 1
                    continue
                if v is None:
                    skipped += 1
                    continue
                triples += 1
                w = {"a": fam.label(a), "b": fam.label(b), "g": g.label, "d_a(b,gb)": v}
                if v < low["value"]:
                    low = {"value": v, "witnesses": [w]}
                elif v == low["value"] and v != INF:
                    low["witnesses"].append(w)
    return low, triples, skipped


def spinning_bound_audit(fam: RotatingFamily, pc, window=None) -> Report:
    """``d_a(b, gb) >= 2^((R-2)/delta) - 4 - 6 delta`` on every window triple."""
    data = pc.data
    window = list(pc.apices if window is None else window)
    R, d = data.R, data.delta_op
    rep = Report("spinning lower bound", window={"apices": len(window)},
                 stats={"bound": spin_angle_bound(R, d), "R": R, "delta_op": d})
    low, triples, skipped = _spin_scan(data, fam, window)
    rep.stats.update(min_observed=low["value"], triples=triples, skipped=skipped)
    for w in low["witnesses"]:
        v = w["d_a(b,gb)"]
        # exact: v >= 2^((R-2)/d) - 4 - 6d  <=>  2^((R-2)/d) <= v + 4 + 6d
        if v != INF and not pow2_at_most(R - 2, d, v + 4 + 6 * d):
            rep.fail(w)
    if not triples:
        rep.verdict = NOT_APPLICABLE
        rep.notes.append("no triples in window: vacuous")
    return rep.finish()


def projection_equivariance(data, fam: RotatingFamily, pairs, elements) -> Report:
    """``g pi_X(Y) = pi_{gX}(gY)`` whenever both sides are computable."""
    rep = Report("projection equivariance")
    checked = 0
    for X, Y in pairs:
        for g in elements:
            gX, gY = _safe_act(fam, g, X), _safe_act(fam, g, Y)
            if gX is None or gY is None or gX not in data.index:
                continue
            try:
                lhs = {fam.act(g, u) for u in data.projection(X, Y)}
                rhs = set(data.projection(gX, gY))
            except (UnknownPointError, PartialActionError):
                continue
            checked += 1
            if lhs != rhs:
                rep.fail({"X": fam.label(X), "Y": fam.label(Y), "g": g.label})
    rep.stats["checked"] = checked
    return rep.finish()


__all__ = [
    "RotatingFamily", "BassSerreFamily", "ExplicitFamily", "family_from_json",
    "check_rotating", "check_fairly_rotating", "check_very_rotating", "check_spinning",
    "spinning_bound_audit", "projection_equivariance"
]
