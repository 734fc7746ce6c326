"""Pure-Python / numpy implementations of the hot kernels.

Same signatures and results as the compiled ``_ckernels`` module; used when
the extension is not built or ``EPSNASH_PURE_PYTHON`` is set.
"""
from __future__ import annotations

from collections import deque

import numpy as np

_CHUNK = 1 << 18


def bfs_distances(adj: np.ndarray) -> np.ndarray:
    """All-pairs directed hop counts from a dense 0/1 adjacency matrix; -1 marks unreachable."""
    adj = np.asarray(adj, dtype=np.uint8)
    n = adj.shape[0]
    succ = [np.flatnonzero(adj[v]).tolist() for v in range(n)]
    dist = np.full((n, n), -1, dtype=np.int64)
    for src in range(n):
        row = dist[src]
        row[src] = 0
        queue = deque([src])
        while queue:
            v = queue.popleft()
            for w in succ[v]:
                if row[w] < 0:
                    row[w] = row[v] + 1
                    queue.append(w)
    return dist


def betweenness_sums(adj: np.ndarray) -> np.ndarray:
    """Unnormalized directed betweenness (Brandes accumulation over all sources).

    Entry v is the sum over ordered pairs (s, t), s != t, both != v, of the
    fraction of shortest s->t paths with v as an interior node.
    """
    adj = np.asarray(adj, dtype=np.uint8)
    n = adj.shape[0]
    succ = [np.flatnonzero(adj[v]).tolist() for v in range(n)]
    bc = [0.0] * n
    for src in range(n):
        dist = [-1] * n
        sigma = [0.0] * n
        preds: list[list[int]] = [[] for _ in range(n)]
        order = []
        dist[src] = 0
        sigma[src] = 1.0
        queue = deque([src])
        while queue:
            v = queue.popleft()
            order.append(v)
            for w in succ[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * n
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != src:
                bc[w] += delta[w]
    return np.asarray(bc, dtype=np.float64)


def security_grid_nash(n: int, levels: np.ndarray, penalty: float) -> np.ndarray:
    """Flat codes of grid profiles with no strictly profitable unilateral grid deviation.

    Profiles are indexed in mixed radix ``len(levels)`` with player 0 most
    significant, so ascending codes are lexicographic profiles. ``levels`` must
    be strictly increasing; the lowest level(s) of a profile are compromised
    and pay ``penalty``, everyone else pays their own level.
    """
    levels = np.asarray(levels, dtype=np.float64)
    g = levels.shape[0]
    total = g**n
    neg_level = -levels
    radix = g ** np.arange(n - 1, -1, -1, dtype=np.int64)
    found = []
    for start in range(0, total, _CHUNK):
        codes = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        idx = (codes[:, None] // radix[None, :]) % g
        ok = np.ones(codes.shape[0], dtype=bool)
        for i in range(n):
            if n > 1:
                others = np.delete(idx, i, axis=1).min(axis=1)
            else:
                others = np.full(codes.shape[0], g, dtype=np.int64)
            own = idx[:, i]
            current = np.where(own <= others, -penalty, neg_level[own])
            best = np.full(codes.shape[0], -np.inf)
            for t in range(g):
                np.maximum(best, np.where(t <= others, -penalty, neg_level[t]), out=best)
            ok &= best <= current
        found.append(codes[ok])
    return np.concatenate(found) if found else np.empty(0, dtype=np.int64)
