# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the percolation and group-walk inner loops."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


cdef Py_ssize_t _find(Py_ssize_t[::1] parent, Py_ssize_t x) noexcept nogil:
    cdef Py_ssize_t root = x, nxt
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


def label_components(Py_ssize_t n, const cnp.int64_t[::1] u, const cnp.int64_t[::1] v):
    """Union-find over ``n`` sites; labels numbered by first appearance."""
    cdef Py_ssize_t[::1] parent = np.arange(n, dtype=np.intp)
    cdef Py_ssize_t[::1] size = np.ones(n, dtype=np.intp)
    cdef Py_ssize_t i, a, b, m = u.shape[0]
    with nogil:
        for i in range(m):
            a = _find(parent, u[i])
            b = _find(parent, v[i])
            if a == b:
                continue
            if size[a] < size[b]:
                a, b = b, a
            parent[b] = a
            size[a] += size[b]
    out = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] labels = out
    cdef cnp.int64_t[::1] seen = np.full(n, -1, dtype=np.int64)
    cdef cnp.int64_t nxt = 0
    cdef Py_ssize_t r
    for i in range(n):
        r = _find(parent, i)
        if seen[r] < 0:
            seen[r] = nxt
            nxt += 1
        labels[i] = seen[r]
    return out


def bfs_path(const cnp.int64_t[::1] indptr, const cnp.int64_t[::1] indices,
             cnp.int64_t src, cnp.int64_t dst, const cnp.uint8_t[::1] allowed):
    """Shortest path from ``src`` to ``dst`` through allowed sites (empty if none)."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef cnp.int64_t[::1] prev = np.full(n, -2, dtype=np.int64)
    cdef cnp.int64_t[::1] queue = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t head = 0, tail = 0, k
    cdef cnp.int64_t x, w
    cdef bint found = False
    if not allowed[src] or not allowed[dst]:
        return np.empty(0, dtype=np.int64)
    prev[src] = -1
    queue[tail] = src
    tail += 1
    with nogil:
        while head < tail:
            x = queue[head]
            head += 1
            if x == dst:
                found = True
                break
            for k in range(indptr[x], indptr[x + 1]):
                w = indices[k]
                if allowed[w] and prev[w] == -2:
                    prev[w] = x
                    queue[tail] = w
                    tail += 1
    if not found:
        return np.empty(0, dtype=np.int64)
    path = []
    x = dst
    while x != -1:
        path.append(x)
        x = prev[x]
    return np.array(path[::-1], dtype=np.int64)


def walk_hits(const cnp.int64_t[:, ::1] cayley, const cnp.int64_t[::1] draws,
              cnp.int64_t start, cnp.int64_t target):
    """Left-multiply ``draws`` onto ``start``; return (steps to target or -1, final)."""
    cdef Py_ssize_t i, m = draws.shape[0]
    cdef cnp.int64_t cur = start
    for i in range(m):
        cur = cayley[draws[i], cur]
        if cur == target:
            return i + 1, cur
    return -1, cur
