# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled breadth-first search kernels over CSR adjacency arrays.

Distances are int32, ``-1`` marks unreachable vertices.  ``blocked`` is a
uint8 mask (or None); blocked vertices are never entered.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef void _bfs(const int[:] indptr, const int[:] indices, int source,
               const unsigned char[:] blocked, bint use_mask,
               int[:] dist, int[:] queue) noexcept nogil:
    cdef Py_ssize_t n = dist.shape[0]
    cdef Py_ssize_t i, head = 0, tail = 0
    cdef int u, v, j, du
    for i in range(n):
        dist[i] = -1
    if use_mask and blocked[source]:
        return
    dist[source] = 0
    queue[tail] = source
    tail += 1
    while head < tail:
        u = queue[head]
        head += 1
        du = dist[u] + 1
        for j in range(indptr[u], indptr[u + 1]):
            v = indices[j]
            if dist[v] != -1:
                continue
            if use_mask and blocked[v]:
                continue
            dist[v] = du
            queue[tail] = v
            tail += 1


def bfs(indptr, indices, int source, blocked=None):
    cdef const int[:] ip = np.ascontiguousarray(indptr, dtype=np.int32)
    cdef const int[:] ix = np.ascontiguousarray(indices, dtype=np.int32)
    cdef Py_ssize_t n = ip.shape[0] - 1
    out = np.empty(n, dtype=np.int32)
    cdef int[:] dist = out
    cdef int[:] queue = np.empty(max(n, 1), dtype=np.int32)
    cdef const unsigned char[:] mask
    cdef bint use_mask = blocked is not None
    if use_mask:
        mask = np.ascontiguousarray(blocked, dtype=np.uint8)
    else:
        mask = np.zeros(1, dtype=np.uint8)
    with nogil:
        _bfs(ip, ix, source, mask, use_mask, dist, queue)
    return out


def bfs_many(indptr, indices, sources, blocked=None):
    cdef const int[:] ip = np.ascontiguousarray(indptr, dtype=np.int32)
    cdef const int[:] ix = np.ascontiguousarray(indices, dtype=np.int32)
    cdef const int[:] src = np.ascontiguousarray(sources, dtype=np.int32)
    cdef Py_ssize_t n = ip.shape[0] - 1
    cdef Py_ssize_t k = src.shape[0]
    out = np.empty((k, n), dtype=np.int32)
    cdef int[:, :] dist = out
    cdef int[:] queue = np.empty(max(n, 1), dtype=np.int32)
    cdef const unsigned char[:] mask
    cdef bint use_mask = blocked is not None
    cdef Py_ssize_t r
    if use_mask:
        mask = np.ascontiguousarray(blocked, dtype=np.uint8)
    else:
        mask = np.zeros(1, dtype=np.uint8)
    with nogil:
        for r in range(k):
            _bfs(ip, ix, src[r], mask, use_mask, dist[r], queue)
    return out
