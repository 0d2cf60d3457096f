"""Pure-Python versions of the compiled kernels (identical results)."""

from __future__ import annotations

from collections import deque

import numpy as np


def _find(parent: list, x: int) -> int:
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        parent[x], x = root, parent[x]
    return root


def label_components(n: int, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Union-find over ``n`` sites; labels numbered by first appearance."""
    parent = list(range(n))
    size = [1] * n
    for a, b in zip(u.tolist(), v.tolist()):
        a, b = _find(parent, a), _find(parent, b)
        if a == b:
            continue
        if size[a] < size[b]:
            a, b = b, a
        parent[b] = a
        size[a] += size[b]
    seen: dict = {}
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        out[i] = seen.setdefault(_find(parent, i), len(seen))
    return out


def bfs_path(indptr: np.ndarray, indices: np.ndarray, src: int, dst: int,
             allowed: np.ndarray) -> np.ndarray:
    """Shortest path from ``src`` to ``dst`` through allowed sites (empty if none)."""
    if not allowed[src] or not allowed[dst]:
        return np.empty(0, dtype=np.int64)
    ptr, idx, ok = indptr.tolist(), indices.tolist(), allowed.tolist()
    prev = {src: -1}
    queue = deque([src])
    while queue:
        x = queue.popleft()
        if x == dst:
            path = []
            while x != -1:
                path.append(x)
                x = prev[x]
            return np.array(path[::-1], dtype=np.int64)
        for w in idx[ptr[x]:ptr[x + 1]]:
            if ok[w] and w not in prev:
                prev[w] = x
                queue.append(w)
    return np.empty(0, dtype=np.int64)


def walk_hits(cayley: np.ndarray, draws: np.ndarray, start: int, target: int):
    """Left-multiply ``draws`` onto ``start``; return (steps to target or -1, final)."""
    cur = int(start)
    for i, g in enumerate(draws.tolist()):
        cur = int(cayley[g, cur])
        if cur == target:
            return i + 1, cur
    return -1, cur
