"""Windmill recursion, skeleton trees, and free-product certificates.

Stage ``k`` keeps ``W_k``, its 1-neighborhood ``N_k``, generators of ``G_k`` and
orbit representatives, all restricted to a finite P-window around ``v0``.
Translates of ``N_{k-1}`` are enumerated through minimal decompositions
``g = g_1 ... g_m`` with ``g_i`` a nontrivial element of ``G_{v_i}`` and
``v_i`` in ``N_{k-1} - W_{k-1}``: a stabilizer letter from ``G_{k-1}`` can
always be shifted to the right where it fixes ``N_{k-1}``, so these products
reach every translate.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .canoe import CanoePath, validate_canoe
from .errors import ConstructionError, PartialActionError, PreconditionError
from .groups import FreeProductElement, enumerate_products, group_name
from .metric import INF
from .reports import FAIL, PASS, PARTIAL, Report

DEFAULT_WORD_BOUND = 6
CROSS_CHECK_SYLLABLES = 8


# ---------------------------------------------------------------------------
# union-find and tree certificates
# ---------------------------------------------------------------------------


class DisjointSets:
    def __init__(self, items=()):
        self.parent = {x: x for x in items}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> bool:
        """Merge; ``False`` if already joined (the new edge closes a cycle)."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


def tree_certificate(nodes, edges) -> dict:
    """Connected with ``|E| = |V| - 1``; reports the first cycle-closing edge."""
    nodes = list(nodes)
    ds = DisjointSets(nodes)
    cycle_edge = None
    for u, v in edges:
        if not ds.union(u, v) and cycle_edge is None:
            cycle_edge = (u, v)
    components = len({ds.find(x) for x in nodes})
    ok = bool(nodes) and components == 1 and len(edges) == len(nodes) - 1 and cycle_edge is None
    return {"tree": ok, "vertices": len(nodes), "edges": len(edges), "components": components,
            "cycle_edge": cycle_edge}


@dataclass
class Skeleton:
    """Bipartite incidence graph of translates (V1) and their intersection points (V2)."""

    translates: list
    points: list
    edges: list
    certificate: dict

    @property
    def is_tree(self) -> bool:
        return self.certificate["tree"]

    def nodes(self) -> list:
        return [("T", i) for i in range(len(self.translates))] + [("q", p) for p in self.points]

    def adjacency(self) -> dict:
        adj = {n: [] for n in self.nodes()}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj

    def path(self, a, b) -> list:
        adj = self.adjacency()
        prev = {a: None}
        queue = deque([a])
        while queue:
            u = queue.popleft()
            if u == b:
                break
            for w in adj[u]:
                if w not in prev:
                    prev[w] = u
                    queue.append(w)
        if b not in prev:
            return []
        out = [b]
        while out[-1] != a:
            out.append(prev[out[-1]])
        return out[::-1]

    def distance(self, a, b):
        p = self.path(a, b)
        return len(p) - 1 if p else INF

    def max_degree(self) -> int:
        adj = self.adjacency()
        return max((len(v) for v in adj.values()), default=0)

    def translates_containing(self, x) -> list:
        return [i for i, t in enumerate(self.translates) if x in t]

    def covered(self) -> set:
        """Points lying in some translate of the skeleton."""
        return set().union(*self.translates) if self.translates else set()

    def node_of(self, x):
        if x in self.points:
            return ("q", x)
        owners = self.translates_containing(x)
        return ("T", owners[0]) if owners else None


def build_skeleton(translates) -> Skeleton:
    """Skeleton of a cover by point-sets (duplicates removed, order kept)."""
    uniq = list(dict.fromkeys(frozenset(t) for t in translates))
    count: dict = {}
    for t in uniq:
        for x in t:
            count[x] = count.get(x, 0) + 1
    points = sorted((x for x, c in count.items() if c >= 2), key=repr)
    pset = set(points)
    edges = [(("T", i), ("q", x)) for i, t in enumerate(uniq) for x in sorted(t & pset, key=repr)]
    nodes = [("T", i) for i in range(len(uniq))] + [("q", x) for x in points]
    return Skeleton(uniq, points, edges, tree_certificate(nodes, edges))


def merged_skeleton(skeleton: Skeleton, i=None, j=None) -> Skeleton:
    """Skeleton after replacing translates ``i`` and ``j`` by their union.

    With no indices, merges the first pair of translates at skeleton distance
    four, which always closes a cycle through the translate between them.
    """
    Ts = skeleton.translates
    if i is None or j is None:
        pair = next(((a, b) for a in range(len(Ts)) for b in range(a + 1, len(Ts))
                     if skeleton.distance(("T", a), ("T", b)) == 4), None)
        if pair is None:
            raise PreconditionError("no translates at skeleton distance 4 to merge")
        i, j = pair
    merged = [T for n, T in enumerate(Ts) if n not in (i, j)] + [Ts[i] | Ts[j]]
    return build_skeleton(merged)


# ---------------------------------------------------------------------------
# windmill stages
# ---------------------------------------------------------------------------


@dataclass
class Stage:
    k: int
    W: set
    N: set
    generators: list
    reps: list                      # orbit representatives in N_k - W_k
    new_factors: list = field(default_factory=list)   # representatives used in G_k's decomposition
    translates: list = field(default_factory=list)    # (element, frozenset) pairs
    skeleton: Skeleton | None = None
    saturated: bool = False
    truncated: bool = False
    notes: list = field(default_factory=list)
    evidence: dict = field(default_factory=dict)


@dataclass
class WindmillState:
    pc: object
    family: object
    v0: object
    window: list
    radius: int
    word_bound: int
    stages: list = field(default_factory=list)

    @property
    def k(self) -> int:
        return len(self.stages) - 1

    def stage(self, k=None) -> Stage:
        return self.stages[self.k if k is None else k]

    def label(self, x) -> str:
        return self.pc.label(x)

    def orbit_representatives(self) -> list:
        """``O_{-1}, O_0, ...`` flattened."""
        out = [self.v0]
        for st in self.stages:
            out.extend(st.reps)
        return out


def window_apices(pc, v0, radius: int) -> list:
    row = pc.graph.row(v0)
    return [pc.apices[i] for i in range(len(pc.apices)) if 0 <= row[pc.graph.idx(pc.apices[i])] <= radius]


def _neighborhood(pc, S, allowed) -> set:
    out = set(S)
    for v in S:
        out.update(u for u in pc.graph.neighbors(v) if u in allowed)
    return out


def _act_set(fam, g, S):
    return frozenset(fam.act(g, x) for x in S)


def _element_pool(fam, generators, bound):
    """Elements of the subgroup generated by ``generators`` up to the bound.

    For free-product elements the bound is on normal-form syllables; a
    subgroup containing the ambient generators is the whole group.
    """
    if generators and isinstance(generators[0], FreeProductElement):
        group = generators[0].group
        if set(group.generators()) <= _closure_small(generators, group.generators()):
            return group.words(bound), True
        elems, _ = enumerate_products(generators, 4 * bound, limit=50_000)
        return [e for e in elems if e.syllables <= bound], False
    elems, closed = enumerate_products(generators, bound)
    return elems or [fam.identity()], closed


def _closure_small(gens, targets, depth: int = 6) -> set:
    """Which ``targets`` are products of at most ``depth`` of ``gens``."""
    elems, _ = enumerate_products(gens, depth, limit=20_000)
    s = set(elems)
    return {t for t in targets if t in s}


def _orbit_reps(fam, pool, S, label) -> list:
    S = set(S)
    ds = DisjointSets(S)
    for v in S:
        for g in pool:
            try:
                w = fam.act(g, v)
            except PartialActionError:
                continue
            if w in S:
                ds.union(v, w)
    classes: dict = {}
    for v in S:
        classes.setdefault(ds.find(v), []).append(v)
    return sorted((min(c, key=label) for c in classes.values()), key=label)


def _stage_zero(pc, fam, v0, window) -> Stage:
    wset = set(window)
    W = {v0}
    N = _neighborhood(pc, W, wset)
    gens = list(fam.subgroup_generators(v0))
    G0 = fam.subgroup(v0)
    reps = _orbit_reps(fam, G0, N - W, pc.label)
    st = Stage(0, W, N, gens, reps, new_factors=[], saturated=False)
    st.evidence["group_order"] = len(G0)
    st.truncated = any(u not in wset for v in N for u in _full_neighbors(pc, v))
    return st


def _full_neighbors(pc, v):
    return pc.graph.neighbors(v)


def _enumerate_translates(fam, base: frozenset, letters, window_set, bound):
    """BFS over minimal decompositions; keeps translates meeting the window."""
    one = fam.identity()
    seen = {base: one}
    order = [(one, base)]
    frontier = [(one, None, base)]
    pruned = 0
    for _ in range(bound):
        nxt = []
        for g, last, T in frontier:
            for v, x in letters:
                if v == last:
                    continue  # two letters from one vertex group merge
                h = g * x
                try:
                    S = _act_set(fam, h, base)
                except PartialActionError:
                    pruned += 1
                    continue
                if S in seen:
                    continue
                if not (S & window_set):
                    pruned += 1
                    continue
                seen[S] = h
                order.append((h, S))
                nxt.append((h, v, S))
        frontier = nxt
        if not frontier:
            break
    return order, pruned, bool(frontier)


def _next_stage(state: WindmillState, prev: Stage) -> Stage:
    pc, fam = state.pc, state.family
    wset = set(state.window)
    k = prev.k + 1
    gens = []
    for v in sorted(prev.N, key=pc.label):
        for g in fam.subgroup_generators(v):
            if g not in gens:
                gens.append(g)
    new_factors = list(prev.reps)
    if prev.N >= wset:
        # N_{k-1} fills the window: one translate covers everything visible
        st = Stage(k, set(wset), set(wset), gens, [], new_factors, saturated=True)
        st.translates = [(fam.identity(), frozenset(prev.N))]
        st.skeleton = build_skeleton([prev.N])
        st.notes.append("N_{k-1} fills the window; stage saturated")
        return st
    base = frozenset(prev.N)
    letters = [(v, x) for v in sorted(prev.N - prev.W, key=pc.label) for x in fam.nontrivial(v)]
    translates, pruned, open_frontier = _enumerate_translates(fam, base, letters, wset, state.word_bound)
    W = set()
    for _, T in translates:
        W.update(T & wset)
    N = _neighborhood(pc, W, wset)
    pool, whole = _element_pool(fam, gens, state.word_bound)
    reps = _orbit_reps(fam, pool, N - W, pc.label)
    st = Stage(k, W, N, gens, reps, new_factors, translates=translates)
    inside = [T for _, T in translates if T <= wset]
    st.skeleton = build_skeleton(inside)
    st.evidence["translates"] = len(translates)
    st.evidence["translates_inside_window"] = len(inside)
    st.evidence["pruned_outside_window"] = pruned
    st.evidence["element_pool"] = len(pool)
    st.evidence["whole_group"] = whole
    if open_frontier:
        st.truncated = True
        st.notes.append("translate enumeration stopped at the word bound with new translates pending")
    return st


def run_windmill(pc, family, v0, stages: int, window: int, word_bound: int = DEFAULT_WORD_BOUND,
                 spinning=None) -> WindmillState:
    """Stages ``0 .. stages`` of the windmill inside the P-ball of radius ``window``."""
    if spinning is not None and not spinning.passed:
        raise PreconditionError("spinning check failed; the windmill needs L > 4M + K")
    if v0 not in pc.data.index:
        raise PreconditionError(f"base vertex {pc.label(v0)} not in the complex")
    win = window_apices(pc, v0, window)
    state = WindmillState(pc, family, v0, win, window, word_bound)
    st = _stage_zero(pc, family, v0, win)
    state.stages.append(st)
    for _ in range(stages):
        st = _next_stage(state, st)
        state.stages.append(st)
    return state


# ---------------------------------------------------------------------------
# audits and certificates
# ---------------------------------------------------------------------------


def intersection_audit(state: WindmillState, g, v=None, k=None) -> Report:
    """``g N_{k-1} ∩ N_{k-1} = {v}`` for nontrivial ``g`` in ``G_v``."""
    k = state.k if k is None else k
    if k < 1:
        raise PreconditionError("intersection audit needs a stage >= 1")
    prev = state.stage(k - 1)
    fam = state.family
    wset = set(state.window)
    rep = Report("translate intersection", window={"radius": state.radius, "stage": k})
    if v is None:
        owners = [u for u in prev.N - prev.W if g in fam.subgroup(u)]
        if not owners or g.is_identity:
            raise PreconditionError("g must be a nontrivial element of G_v for v in N_{k-1} - W_{k-1}")
        v = owners[0]
    elif g.is_identity or g not in fam.subgroup(v) or v not in prev.N - prev.W:
        raise PreconditionError("g must be a nontrivial element of G_v for v in N_{k-1} - W_{k-1}")
    image = _act_set(fam, g, prev.N)
    meet = image & frozenset(prev.N)
    rep.stats.update(v=state.label(v), intersection=sorted(state.label(x) for x in meet))
    if meet != {v}:
        rep.fail({"g": g.label, "v": state.label(v),
                  "intersection": sorted(state.label(x) for x in meet)})
    if not image <= wset:
        rep.notes.append("translate leaves the window; intersection computed exactly by the action")
    return rep.finish()


def translate_overlap_audit(state: WindmillState, k=None) -> Report:
    """Distinct enumerated translates share at most one vertex."""
    st = state.stage(k)
    rep = Report("translate overlaps", window={"radius": state.radius, "stage": st.k})
    Ts = [T for _, T in st.translates]
    pairs = 0
    for i in range(len(Ts)):
        for j in range(i + 1, len(Ts)):
            pairs += 1
            common = Ts[i] & Ts[j]
            if len(common) > 1:
                rep.fail({"translates": [i, j], "common": sorted(state.label(x) for x in common)})
    rep.stats["pairs"] = pairs
    return rep.finish()


def _edge_stabilizers(state: WindmillState, st: Stage) -> dict:
    fam = state.family
    pool, _ = _element_pool(fam, st.generators, state.word_bound)
    nontrivial = [x for x in pool if not x.is_identity]
    bad = []
    sk = st.skeleton
    for (a, b) in sk.edges:
        T = sk.translates[a[1]]
        q = b[1]
        for x in nontrivial:
            if fam.act(x, q) == q and _act_set(fam, x, T) == T:
                bad.append({"translate": a[1], "point": state.label(q), "element": x.label})
                break
    return {"trivial": not bad, "edges": len(sk.edges), "elements": len(nontrivial),
            "violations": bad[:5]}


def _stabilizer_checks(state: WindmillState, st: Stage, prev: Stage) -> dict:
    """Stab(N_{k-1}) = G_{k-1} and Stab(v) = G_v, tested over the element pool."""
    fam = state.family
    pool, _ = _element_pool(fam, st.generators, state.word_bound)
    prev_pool = set(_element_pool(fam, prev.generators, state.word_bound)[0]) if prev.generators \
        else {fam.identity()}
    base = frozenset(prev.N)
    bad = []
    for x in pool:
        if _act_set(fam, x, base) == base and x not in prev_pool:
            bad.append({"element": x.label, "reason": "stabilizes N_{k-1} outside G_{k-1}"})
    for v in sorted(prev.N - prev.W, key=state.label):
        Gv = set(fam.subgroup(v))
        for x in pool:
            if fam.act(x, v) == v and x not in Gv:
                bad.append({"element": x.label, "vertex": state.label(v),
                            "reason": "fixes v outside G_v"})
    return {"ok": not bad, "violations": bad[:5]}


def _generation_check(state: WindmillState, st: Stage, prev: Stage) -> dict:
    """Generators of ``G_k`` lie in ``<G_{k-1}, G_o : o in O_{k-1}>`` (bounded products)."""
    fam = state.family
    gens = list(prev.generators)
    for o in st.new_factors:
        gens.extend(fam.subgroup_generators(o))
    reachable = _closure_small(gens, st.generators, depth=2 * state.word_bound + 1)
    missing = [g for g in st.generators if g not in reachable]
    return {"ok": not missing, "missing": [g.label for g in missing]}


def certify_free_product(state: WindmillState) -> dict:
    """Factor list and per-stage evidence; raises ConstructionError if evidence fails."""
    fam = state.family
    reps = state.orbit_representatives()
    factors = [{"apex": state.label(c), "group": group_name(fam.subgroup(c))} for c in reps]
    stages = []
    failures = []
    for k in range(1, len(state.stages)):
        st, prev = state.stages[k], state.stages[k - 1]
        ev = {"stage": k, "saturated": st.saturated, "truncated": st.truncated,
              "skeleton": _jsonable_cert(state, st.skeleton.certificate)}
        if st.saturated:
            ev["edge_stabilizers"] = {"trivial": True, "edges": 0}
            ev["stabilizers"] = {"ok": True}
        else:
            ev["edge_stabilizers"] = _edge_stabilizers(state, st)
            ev["stabilizers"] = _stabilizer_checks(state, st, prev)
        ev["generation"] = _generation_check(state, st, prev)
        ev["decomposition"] = (f"G_{k} = G_{k - 1}" + "".join(
            f" * {group_name(fam.subgroup(o))}<{state.label(o)}>" for o in st.new_factors))
        st.evidence.update(ev)
        ok = (st.skeleton.is_tree and ev["edge_stabilizers"]["trivial"] and ev["stabilizers"]["ok"]
              and ev["generation"]["ok"])
        if not ok:
            failures.append(ev)
        stages.append(ev)
    cross = cross_validate(state)
    cert = {
        "factors": factors,
        "free_product": " * ".join(f["group"] for f in factors),
        "stages": stages,
        "cross_validation": cross,
        "window": {"center": state.label(state.v0), "radius": state.radius,
                   "apices": len(state.window), "word_bound": state.word_bound},
        "truncated_stages": [st.k for st in state.stages if st.truncated],
    }
    if failures or not cross["ok"]:
        raise ConstructionError("free product evidence failed", {"stages": failures, "cross": cross,
                                                                   "certificate": cert})
    return cert


def _jsonable_cert(state, cert):
    out = dict(cert)
    if out.get("cycle_edge") is not None:
        out["cycle_edge"] = [str(n) for n in out["cycle_edge"]]
    return out


def _alternating_words(orders, max_syllables):
    """Reduced alternating words ``((factor, exponent), ...)`` over abstract cyclic factors."""
    out = [()]
    layer = [()]
    for _ in range(max_syllables):
        nxt = []
        for w in layer:
            last = w[-1][0] if w else None
            for f, n in enumerate(orders):
                if f == last:
                    continue
                for e in range(1, n):
                    nxt.append(w + ((f, e),))
        out.extend(nxt)
        layer = nxt
    return out


def cross_validate(state: WindmillState, max_syllables: int = CROSS_CHECK_SYLLABLES) -> dict:
    """Abstract free-product words over the certified factors act faithfully.

    Each factor must be cyclic; word ``((i, e), ...)`` maps to the product of
    ``gen_i ** e``.  Distinct words must give distinct elements, and words
    moving ``v0`` to the same point must differ by an element of ``G_{v0}``.
    """
    fam = state.family
    reps = state.orbit_representatives()
    gens, orders = [], []
    for c in reps:
        G = fam.subgroup(c)
        n = len(G)
        cyc = [g for g in G if _order(g, n) == n]
        if not cyc:
            return {"ok": False, "reason": f"factor at {state.label(c)} is not cyclic", "words": 0}
        gens.append(cyc[0])
        orders.append(n)
    words = _alternating_words(orders, max_syllables)
    one = fam.identity()
    images = {}
    collisions = []
    by_point = {}
    Gv0 = set(fam.subgroup(state.v0))
    orbit_bad = []
    for w in words:
        g = one
        for f, e in w:
            g = g * gens[f] ** e
        if g in images:
            collisions.append([_word_label(images[g], reps, state), _word_label(w, reps, state)])
            continue
        images[g] = w
        try:
            p = fam.act(g, state.v0)
        except PartialActionError:
            continue
        for h in by_point.get(p, []):
            if h.inverse() * g not in Gv0:
                orbit_bad.append([h.label, g.label])
        by_point.setdefault(p, []).append(g)
    return {"ok": not collisions and not orbit_bad, "words": len(words),
            "max_syllables": max_syllables, "collisions": collisions[:5],
            "orbit_violations": orbit_bad[:5]}


def _order(g, n):
    x = g
    for i in range(1, n + 1):
        if x.is_identity:
            return i
        x = x * g
    return n + 1


def _word_label(w, reps, state):
    if not w:
        return "1"
    return " ".join(f"[{state.label(reps[f])}]^{e}" for f, e in w)


# ---------------------------------------------------------------------------
# canoeing paths between windmill vertices
# ---------------------------------------------------------------------------


def _induced_path(pc, allowed: frozenset, a, b) -> list:
    prev = {a: None}
    queue = deque([a])
    while queue:
        u = queue.popleft()
        if u == b:
            break
        for w in pc.graph.neighbors(u):
            if w in allowed and w not in prev:
                prev[w] = u
                queue.append(w)
    if b not in prev:
        return []
    out = [b]
    while out[-1] != a:
        out.append(prev[out[-1]])
    return out[::-1]


def _segment(pc, path):
    """``(split)`` making ``path`` a geodesic (``None``) or two geodesics; ``False`` otherwise."""
    if pc.distance(path[0], path[-1]) == len(path) - 1:
        return None
    for s in range(1, len(path) - 1):
        if (pc.distance(path[0], path[s]) == s
                and pc.distance(path[s], path[-1]) == len(path) - 1 - s):
            return s
    return False


def canoe_between(state: WindmillState, x, y, k=None) -> CanoePath:
    """A canoeing path from ``x`` to ``y`` whose large-angle points are translate intersections."""
    pc = state.pc
    k = state.k if k is None else k
    st = state.stage(k)
    if x == y:
        raise PreconditionError("canoe path needs distinct endpoints")
    for z in (x, y):
        if z not in st.W:
            raise PreconditionError(f"{state.label(z)} is not in W_{k} within the window")
    if st.saturated or k == 0:
        if k == 0:
            raise PreconditionError("W_0 is a single vertex")
        lower = state.stage(k - 1)
        if x in lower.W and y in lower.W:
            return canoe_between(state, x, y, k - 1)
        # a saturated stage is one translate: a single (bi)geodesic inside it
        chain, translates = [x, y], [frozenset(st.W)]
    else:
        sk = st.skeleton
        a, b = sk.node_of(x), sk.node_of(y)
        if a is None or b is None:
            raise ConstructionError("endpoint not covered by a translate inside the window",
                                    {"x": state.label(x), "y": state.label(y)})
        route = sk.path(a, b)
        if not route:
            raise ConstructionError("skeleton does not connect the endpoints",
                                    {"x": state.label(x), "y": state.label(y)})
        chain = [x]
        translates = []
        for node in route:
            if node[0] == "q":
                if node[1] != chain[-1]:
                    chain.append(node[1])
            else:
                translates.append(sk.translates[node[1]])
        if chain[-1] != y:
            chain.append(y)
        if len(translates) != len(chain) - 1:
            # an endpoint was itself an intersection point: pick the translate shared by each pair
            translates = [next(T for T in sk.translates if u in T and v in T)
                          for u, v in zip(chain, chain[1:])]
    vertices = [chain[0]]
    segments = []
    for (u, v), T in zip(zip(chain, chain[1:]), translates):
        piece = _induced_path(pc, T, u, v)
        if not piece:
            raise ConstructionError("no path inside a translate",
                                    {"from": state.label(u), "to": state.label(v)})
        split = _segment(pc, piece)
        if split is False:
            raise ConstructionError("segment is not a geodesic or a concatenation of two",
                                    {"segment": [state.label(p) for p in piece]})
        start = len(vertices) - 1
        vertices.extend(piece[1:])
        segments.append((start, len(vertices) - 1, None if split is None else start + split))
    return CanoePath(vertices, segments)


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------


def classify_element(pc, family, g, n_max: int = 8, state: WindmillState | None = None,
                     word_bound: int = DEFAULT_WORD_BOUND) -> dict:
    """Elliptic (inside some ``G_c`` up to conjugacy) or loxodromic with orbit evidence."""
    label = pc.label
    if g.is_identity:
        return {"kind": "elliptic", "apex": "every vertex", "evidence": "identity"}
    apices = state.window if state is not None else pc.apices
    for c in apices:
        try:
            if family.act(g, c) == c and g in set(family.subgroup(c)):
                return {"kind": "elliptic", "apex": label(c), "evidence": "g lies in G_c"}
        except PartialActionError:
            continue
    reps = state.orbit_representatives() if state is not None else apices
    for x in family.elements(word_bound):
        conj = x.inverse() * g * x
        for o in reps:
            if conj in set(family.subgroup(o)):
                c = family.act(x, o)
                return {"kind": "elliptic", "apex": family.label(c),
                        "evidence": f"x^-1 g x lies in G_{label(o)} for x = {x.label}"}
    if state is None:
        return {"kind": "unresolved", "reason": "no windmill state for orbit evidence"}
    return _loxodromic_evidence(pc, family, g, n_max, state)


def _loxodromic_evidence(pc, family, g, n_max, state) -> dict:
    label = pc.label
    space = pc.data.space
    delta = pc.data.delta_op
    st = next((s for s in reversed(state.stages) if s.skeleton is not None and not s.saturated), None)
    if st is None or not st.skeleton.points:
        return {"kind": "unresolved", "reason": "no skeleton with intersection points"}
    sk = st.skeleton
    best = None
    for q in sk.points:
        gq = family.act(g, q)
        if gq in sk.points and gq != q:
            m = sk.distance(("q", q), ("q", gq))
            if best is None or m < best[0]:
                best = (m, q)
    if best is None:
        return {"kind": "unresolved", "reason": "no intersection point whose image is in the skeleton"}
    x0 = best[1]
    rows = []
    ok = True
    growth = []
    xn = x0
    for n in range(1, n_max + 1):
        xn = family.act(g, xn)
        row = {"n": n}
        if space is not None:
            d = space.distance(x0, xn)
            row["d_X"] = d
            row["space_bound"] = 2 * delta * (n - 1)
            row["space_ok"] = d >= 2 * delta * (n - 1)
            ok &= row["space_ok"]
        if xn in sk.points:
            m = sk.distance(("q", x0), ("q", xn))
            row["m"] = m
            growth.append(m)
            if xn in pc.data.index:
                dP = pc.distance(x0, xn)
                row["d_P"] = dP
                row["P_ok"] = 4 * dP >= m - 2
                ok &= row["P_ok"]
        rows.append(row)
    dists = [r["d_X"] for r in rows if "d_X" in r]
    increasing = ((len(growth) >= 2 and all(b > a for a, b in zip(growth, growth[1:])))
                  or (len(dists) >= 2 and all(b > a for a, b in zip(dists, dists[1:]))))
    if ok and increasing:
        kind = "loxodromic"
    else:
        kind = "unresolved"
    return {"kind": kind, "x0": label(x0), "stage": st.k, "orbit": rows,
            "skeleton_growth": growth, "bounds_hold": ok}


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


def stage_report(state: WindmillState) -> list:
    out = []
    for st in state.stages:
        r = Report(f"windmill stage {st.k}", window={"center": state.label(state.v0),
                                                     "radius": state.radius})
        r.stats.update(W=len(st.W), N=len(st.N), generators=len(st.generators),
                       orbit_reps=[state.label(v) for v in st.reps],
                       saturated=st.saturated)
        if st.skeleton is not None:
            r.stats["skeleton"] = {k: v for k, v in st.skeleton.certificate.items() if k != "cycle_edge"}
            r.stats["skeleton"]["max_degree"] = st.skeleton.max_degree()
            if not st.skeleton.is_tree:
                r.fail({"stage": st.k, "reason": "skeleton is not a tree"})
        if st.truncated:
            r.mark_partial("stage truncated by the window")
        r.notes.extend(st.notes)
        out.append(r.finish())
    return out


__all__ = [
    "DisjointSets", "tree_certificate", "Skeleton", "build_skeleton", "merged_skeleton", "Stage", "WindmillState",
    "window_apices", "run_windmill", "intersection_audit", "translate_overlap_audit",
    "certify_free_product", "cross_validate", "canoe_between", "classify_element",
    "stage_report", "validate_canoe", "FAIL", "PASS", "PARTIAL",
]
