import networkx as nx
import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from projkit import _kernels_py, kernels
from projkit.metric import GraphSpace


def csr(n, edges):
    g = GraphSpace(list(range(n)), edges)
    return g.indptr, g.indices


graphs = st.integers(min_value=1, max_value=25).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=3 * n),
    )
)


@settings(max_examples=60, deadline=None)
@given(graphs, st.data())
def test_bfs_matches_networkx(g, data):
    n, raw = g
    edges = sorted({tuple(sorted(e)) for e in raw if e[0] != e[1]})
    indptr, indices = csr(n, edges)
    src = data.draw(st.integers(0, n - 1))
    G = nx.empty_graph(n)
    G.add_edges_from(edges)
    oracle = nx.single_source_shortest_path_length(G, src)
    want = np.array([oracle.get(v, -1) for v in range(n)], dtype=np.int32)
    assert np.array_equal(_kernels_py.bfs(indptr, indices, src), want)
    assert np.array_equal(kernels.bfs(indptr, indices, src), want)


@settings(max_examples=40, deadline=None)
@given(graphs, st.data())
def test_blocked_bfs_backends_agree(g, data):
    n, raw = g
    edges = sorted({tuple(sorted(e)) for e in raw if e[0] != e[1]})
    indptr, indices = csr(n, edges)
    blocked = np.array(data.draw(st.lists(st.booleans(), min_size=n, max_size=n)), dtype=np.uint8)
    sources = list(range(n))
    a = _kernels_py.bfs_many(indptr, indices, sources, blocked)
    b = kernels.bfs_many(indptr, indices, sources, blocked)
    assert np.array_equal(a, b)
    # a blocked source reaches nothing, not even itself
    for s in np.flatnonzero(blocked):
        assert (a[s] == -1).all()


def test_compiled_backend_is_selected_when_built():
    if kernels.compiled_available():
        assert kernels.BACKEND == "cython"
    else:
        assert kernels.BACKEND == "python"


def test_pure_python_env_var_forces_fallback():
    import subprocess
    import sys

    out = subprocess.run(
        [sys.executable, "-c", "from projkit import kernels; print(kernels.BACKEND)"],
        env={"PROJKIT_PURE_PYTHON": "1", "PATH": ""}, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
