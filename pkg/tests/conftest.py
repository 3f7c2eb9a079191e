import networkx as nx
import pytest

from projkit.complex import build_complex
from projkit.family import BassSerreFamily
from projkit.io import bass_serre_instance
from projkit.metric import BassSerreSpace
from projkit.projection import ApexFamily, build_projection_data
from projkit.windmill import run_windmill


def tree_graph(space, apices):
    """Unsubdivided Bass-Serre tree on ``apices`` as a networkx graph (test oracle)."""
    g = nx.Graph()
    vs = set(apices)
    g.add_nodes_from(apices)
    for v in apices:
        for u in space.tree_neighbors(v):
            if u in vs:
                g.add_edge(v, u)
    return g


@pytest.fixture(scope="session")
def t23():
    space = BassSerreSpace(2, 3, 38, 14)
    apices = space.vertices_within(space.base, 6)
    data = build_projection_data(ApexFamily(space, apices, 38, 16), 121, window={"P_radius": 6})
    pc = build_complex(data)
    return {"space": space, "apices": apices, "data": data, "pc": pc,
            "family": BassSerreFamily(space, 38), "tree": tree_graph(space, apices)}


def _windmill_setup(h, k):
    inst = bass_serre_instance(h, k, 38, radius=8)
    data = build_projection_data(ApexFamily(inst.space, inst.apices, 38, 16), 121)
    pc = build_complex(data)
    state = run_windmill(pc, inst.family, inst.v0, 2, 8)
    return {"inst": inst, "space": inst.space, "data": data, "pc": pc, "family": inst.family,
            "state": state}


@pytest.fixture(scope="session")
def t23_windmill():
    return _windmill_setup(2, 3)


@pytest.fixture(scope="session")
def dihedral_windmill():
    return _windmill_setup(2, 2)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Context manager recording one ``criterion N: pass|fail`` line per acceptance check."""
    import contextlib
    import time

    @contextlib.contextmanager
    def run(n, title):
        ok = False
        start = time.perf_counter()
        try:
            yield
            ok = True
        finally:
            line = f"criterion {n}: {'pass' if ok else 'fail'}  {title} ({time.perf_counter() - start:.1f}s)"
            print(line)
            ACCEPTANCE_LINES.append(line)

    return run


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
