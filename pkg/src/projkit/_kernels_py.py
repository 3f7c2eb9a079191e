"""Pure-Python twins of the compiled BFS kernels (same signatures, same output)."""

from collections import deque

import numpy as np


def bfs(indptr, indices, source, blocked=None):
    indptr = np.asarray(indptr).tolist()
    indices = np.asarray(indices).tolist()
    n = len(indptr) - 1
    mask = None if blocked is None else np.asarray(blocked, dtype=bool).tolist()
    dist = [-1] * n
    if mask is None or not mask[source]:
        dist[source] = 0
        queue = deque([source])
        while queue:
            u = queue.popleft()
            du = dist[u] + 1
            for j in range(indptr[u], indptr[u + 1]):
                v = indices[j]
                if dist[v] != -1 or (mask is not None and mask[v]):
                    continue
                dist[v] = du
                queue.append(v)
    return np.asarray(dist, dtype=np.int32)


def bfs_many(indptr, indices, sources, blocked=None):
    sources = np.asarray(sources, dtype=np.int64).tolist()
    n = len(indptr) - 1
    out = np.empty((len(sources), n), dtype=np.int32)
    for r, s in enumerate(sources):
        out[r] = bfs(indptr, indices, s, blocked)
    return out
