"""Instance generation and JSON files.

An instance file bundles a space, an optional rotating family, the apex list
used for projections and a base vertex ``v0``::

    {"space": {...}, "family": {...} | null, "apices": [...], "v0": "...", "rho": 38}
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .family import BassSerreFamily, ExplicitFamily, family_from_json
from .metric import BassSerreSpace, GraphSpace, space_from_json
from .projection import ProjectionData
from .reports import to_jsonable


@dataclass
class Instance:
    space: GraphSpace
    family: object
    apices: list
    v0: object
    rho: int
    meta: dict

    def to_json(self) -> dict:
        lab = self.space.label
        return {
            "space": self.space.to_json(),
            "family": None if self.family is None else self.family.to_json(),
            "apices": [lab(a) for a in self.apices],
            "v0": None if self.v0 is None else lab(self.v0),
            "rho": self.rho,
            "meta": self.meta,
        }


def bass_serre_instance(h_order: int, k_order: int, subdivision: int, radius: int = 6,
                        truncation: int | None = None) -> Instance:
    """Bass-Serre tree of ``Z/h * Z/k`` with apices within ``radius`` tree steps of the base."""
    if truncation is None:
        truncation = 2 * radius + 2
    space = BassSerreSpace(h_order, k_order, subdivision, truncation)
    apices = space.vertices_within(space.base, radius)
    return Instance(space, BassSerreFamily(space, subdivision), apices, space.base, subdivision,
                    {"kind": "bass_serre", "orders": [h_order, k_order], "subdivision": subdivision,
                     "radius": radius, "truncation": truncation})


def cycle_instance(n: int) -> Instance:
    """Cycle ``C_n`` with one apex at 0 rotated by the reflection fixing it."""
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    space = GraphSpace(list(range(n)), [(i, (i + 1) % n) for i in range(n)])
    family = ExplicitFamily(space, [0], {"r": {i: (-i) % n for i in range(n)}}, {0: ["r"]}, n // 2)
    return Instance(space, family, [0], 0, n // 2, {"kind": "cycle", "n": n})


def grid_instance(rows: int, cols: int) -> Instance:
    if rows < 1 or cols < 1:
        raise ValueError("grid dimensions must be positive")
    verts = [f"{i},{j}" for i in range(rows) for j in range(cols)]
    edges = [(f"{i},{j}", f"{i},{j + 1}") for i in range(rows) for j in range(cols - 1)]
    edges += [(f"{i},{j}", f"{i + 1},{j}") for i in range(rows - 1) for j in range(cols)]
    space = GraphSpace(verts, edges)
    return Instance(space, None, [], verts[0], 0, {"kind": "grid", "rows": rows, "cols": cols})


def tree_instance(branching: int, depth: int) -> Instance:
    """Rooted tree with the given branching and depth; vertices named by child-index paths."""
    if branching < 1 or depth < 0:
        raise ValueError("tree needs branching >= 1 and depth >= 0")
    verts, edges = ["r"], []
    frontier = ["r"]
    for _ in range(depth):
        nxt = []
        for v in frontier:
            for c in range(branching):
                u = f"{v}.{c}"
                verts.append(u)
                edges.append((v, u))
                nxt.append(u)
        frontier = nxt
    space = GraphSpace(verts, edges)
    return Instance(space, None, [], "r", 0, {"kind": "tree", "branching": branching, "depth": depth})


GENERATORS = {
    "bass_serre": (bass_serre_instance, "h_order k_order subdivision"),
    "cycle": (cycle_instance, "n"),
    "grid": (grid_instance, "rows cols"),
    "tree": (tree_instance, "branching depth"),
}


def generate(kind: str, params: list, **options) -> Instance:
    if kind not in GENERATORS:
        raise ValueError(f"unknown instance kind {kind!r}; choose from {sorted(GENERATORS)}")
    fn, usage = GENERATORS[kind]
    need = len(usage.split())
    if len(params) != need:
        raise ValueError(f"{kind} takes {need} integers: {usage}")
    return fn(*[int(p) for p in params], **options)


def instance_from_json(d: dict) -> Instance:
    if "space" not in d:  # a bare space file
        d = {"space": d}
    space = space_from_json(d["space"])
    fam = d.get("family")
    family = family_from_json(fam, space) if fam else None
    if d.get("apices") is not None:
        apices = [space.parse(a) for a in d["apices"]]
    elif isinstance(space, BassSerreSpace):
        apices = space.apices()
    else:
        apices = []
    v0 = space.parse(d["v0"]) if d.get("v0") is not None else (apices[0] if apices else None)
    return Instance(space, family, apices, v0, int(d.get("rho") or 0), d.get("meta", {}))


def read_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def write_json(path: str, obj) -> None:
    with open(path, "w") as fh:
        json.dump(to_jsonable(obj), fh, indent=2, sort_keys=False)
        fh.write("\n")


def load_instance(path: str) -> Instance:
    return instance_from_json(read_json(path))


def data_to_json(data: ProjectionData) -> dict:
    d = data.to_json()
    if data.space is not None:
        d["space"] = data.space.to_json()
    return d


def data_from_json(d: dict, space=None) -> ProjectionData:
    if space is None and d.get("space") is not None:
        space = space_from_json(d["space"])
    return ProjectionData.from_json(d, space)


def json_number(v):
    return "inf" if isinstance(v, float) and math.isinf(v) else v
