"""Independent reference implementations used to cross-check the fast paths.

Nothing here shares code with the game modules: the security oracle is a
plain double loop, the formation oracle uses Floyd-Warshall plus explicit
shortest-path enumeration in exact rational arithmetic.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Sequence

__all__ = [
    "naive_security_grid_nash",
    "floyd_warshall",
    "enumerate_shortest_paths",
    "exact_node_cost",
    "naive_netform_verdict",
    "naive_tcp_max_gain",
]


def _security_payoff(levels: Sequence[float], i: int, penalty: float) -> float:
    if all(levels[i] <= x for x in levels):
        return -penalty
    return -levels[i]


def naive_security_grid_nash(n: int, penalty: float, points: int) -> list[tuple[float, ...]]:
    """Brute force over all grid profiles and all grid deviations (``points`` intervals on [0, P])."""
    grid = [penalty * k / points for k in range(points + 1)]
    grid[-1] = float(penalty)
    found = []
    for prof in itertools.product(grid, repeat=n):
        stable = True
        for i in range(n):
            here = _security_payoff(prof, i, penalty)
            for t in grid:
                alt = list(prof)
                alt[i] = t
                if _security_payoff(alt, i, penalty) > here:
                    stable = False
                    break
            if not stable:
                break
        if stable:
            found.append(tuple(prof))
    return found


def floyd_warshall(n: int, links) -> list[list[int | None]]:
    d: list[list[int | None]] = [[0 if a == b else None for b in range(n)] for a in range(n)]
    for a, b in links:
        d[a][b] = 1
    for k in range(n):
        for a in range(n):
            if d[a][k] is None:
                continue
            for b in range(n):
                if d[k][b] is None:
                    continue
                via = d[a][k] + d[k][b]
                if d[a][b] is None or via < d[a][b]:
                    d[a][b] = via
    return d


def enumerate_shortest_paths(n: int, links, src: int, dst: int, dist) -> list[list[int]]:
    succ = {a: sorted(b for x, b in links if x == a) for a in range(n)}
    target = dist[src][dst]
    if target is None:
        return []
    paths: list[list[int]] = []

    def walk(path):
        v = path[-1]
        if v == dst:
            paths.append(list(path))
            return
        for w in succ[v]:
            # stay on a geodesic: each hop must reduce the remaining distance by one
            if dist[w][dst] is not None and dist[w][dst] == target - len(path):
                path.append(w)
                walk(path)
                path.pop()

    walk([src])
    return paths


def exact_node_cost(n: int, links, i: int, s, l, r, m) -> Fraction | None:
    """Exact rational cost of node i, or None when some node is unreachable.

    The per-hop coefficient is the float ``l / n`` taken exactly, matching
    how a caller writes ``m = l / n`` at the boundary.
    """
    links = set(links)
    dist = floyd_warshall(n, links)
    if any(dist[i][j] is None for j in range(n)):
        return None
    total_dist = sum(dist[i][j] for j in range(n))
    through = Fraction(0)
    if n >= 3:
        for a in range(n):
            for b in range(n):
                if a == b or i in (a, b):
                    continue
                paths = enumerate_shortest_paths(n, links, a, b, dist)
                if paths:
                    hits = sum(1 for p in paths if i in p[1:-1])
                    through += Fraction(hits, len(paths))
        eb = through / ((n - 1) * (n - 2))
    else:
        eb = Fraction(0)
    deg = sum(1 for a, _ in links if a == i)
    per_hop = Fraction(l / n)
    return Fraction(s) / n + per_hop * total_dist + Fraction(r) * eb + Fraction(m) * deg


def _alternatives(n: int, i: int, current: frozenset, mode: str):
    others = [j for j in range(n) if j != i]
    if mode.replace("_", "-") == "single-link":
        for j in others:
            yield current ^ {j}
    else:
        for mask in range(1 << len(others)):
            yield frozenset(others[k] for k in range(len(others)) if mask >> k & 1)


def naive_netform_verdict(n: int, links, s, l, r, m, epsilon, mode: str) -> tuple[bool, float]:
    """(passed, max gain) from recomputing every deviation's cost from scratch."""
    links = frozenset(links)
    best = None
    for i in range(n):
        current = frozenset(b for a, b in links if a == i)
        kept = {(a, b) for a, b in links if a != i}
        base = exact_node_cost(n, links, i, s, l, r, m)
        for alt in _alternatives(n, i, current, mode):
            cost = exact_node_cost(n, kept | {(i, j) for j in alt}, i, s, l, r, m)
            if base is None:
                gain = float("inf")
            elif cost is None:
                gain = float("-inf")
            else:
                gain = base - cost
            if best is None or gain > best:
                best = gain
    passed = best <= Fraction(epsilon)
    return passed, float(best)


def naive_tcp_max_gain(n: int, c: float, K: float, points: int = 1000) -> float:
    """Best gain of one sender from all-ones over an explicit grid on [0, K+1]."""
    others = n - 1
    here = c * 1.0 / (others + 1.0)
    best = -float("inf")
    for k in range(points + 1):
        a = (K + 1) * k / points
        u = c * a / (others + a) if a > 0 else 0.0
        best = max(best, u - here)
    return best
