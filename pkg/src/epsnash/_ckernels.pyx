# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels. Mirrors ``_pykernels`` exactly."""
import numpy as np

from libc.stdlib cimport malloc, free


def bfs_distances(adj_in):
    cdef const unsigned char[:, ::1] adj = np.ascontiguousarray(adj_in, dtype=np.uint8)
    cdef Py_ssize_t n = adj.shape[0]
    out = np.full((n, n), -1, dtype=np.int64)
    cdef long long[:, ::1] dist = out
    cdef Py_ssize_t *queue = <Py_ssize_t *> malloc(max(n, 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t src, head, tail, v, w
    try:
        for src in range(n):
            dist[src, src] = 0
            queue[0] = src
            head = 0
            tail = 1
            while head < tail:
                v = queue[head]
                head += 1
                for w in range(n):
                    if adj[v, w] and dist[src, w] < 0:
                        dist[src, w] = dist[src, v] + 1
                        queue[tail] = w
                        tail += 1
    finally:
        free(queue)
    return out


def betweenness_sums(adj_in):
    cdef const unsigned char[:, ::1] adj = np.ascontiguousarray(adj_in, dtype=np.uint8)
    cdef Py_ssize_t n = adj.shape[0]
    out = np.zeros(n, dtype=np.float64)
    cdef double[::1] bc = out
    cdef Py_ssize_t *order = <Py_ssize_t *> malloc(max(n, 1) * sizeof(Py_ssize_t))
    cdef long long *dist = <long long *> malloc(max(n, 1) * sizeof(long long))
    cdef double *sigma = <double *> malloc(max(n, 1) * sizeof(double))
    cdef double *delta = <double *> malloc(max(n, 1) * sizeof(double))
    cdef Py_ssize_t src, head, tail, v, w, k
    cdef double coeff
    try:
        for src in range(n):
            for v in range(n):
                dist[v] = -1
                sigma[v] = 0.0
                delta[v] = 0.0
            dist[src] = 0
            sigma[src] = 1.0
            order[0] = src
            head = 0
            tail = 1
            while head < tail:
                v = order[head]
                head += 1
                for w in range(n):
                    if not adj[v, w]:
                        continue
                    if dist[w] < 0:
                        dist[w] = dist[v] + 1
                        order[tail] = w
                        tail += 1
                    if dist[w] == dist[v] + 1:
                        sigma[w] += sigma[v]
            # order[] holds the BFS visitation order; predecessors are recovered
            # from the adjacency matrix and the distance labels.
            for k in range(tail - 1, -1, -1):
                w = order[k]
                coeff = (1.0 + delta[w]) / sigma[w]
                for v in range(n):
                    if adj[v, w] and dist[v] >= 0 and dist[v] == dist[w] - 1:
                        delta[v] += sigma[v] * coeff
                if w != src:
                    bc[w] += delta[w]
    finally:
        free(order)
        free(dist)
        free(sigma)
        free(delta)
    return out


def security_grid_nash(int n, levels_in, double penalty):
    cdef const double[::1] levels = np.ascontiguousarray(levels_in, dtype=np.float64)
    cdef Py_ssize_t g = levels.shape[0]
    cdef long long total = 1
    cdef int i, j
    for i in range(n):
        total *= g
    cdef long long *idx = <long long *> malloc(n * sizeof(long long))
    cdef long long code, rem, others, t
    cdef double current, cand
    cdef bint ok
    found = []
    try:
        for code in range(total):
            rem = code
            for j in range(n - 1, -1, -1):
                idx[j] = rem % g
                rem //= g
            ok = True
            for i in range(n):
                others = g
                for j in range(n):
                    if j != i and idx[j] < others:
                        others = idx[j]
                if idx[i] <= others:
                    current = -penalty
                else:
                    current = -levels[idx[i]]
                for t in range(g):
                    if t <= others:
                        cand = -penalty
                    else:
                        cand = -levels[t]
                    if cand > current:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                found.append(code)
    finally:
        free(idx)
    return np.asarray(found, dtype=np.int64)
