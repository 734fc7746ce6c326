"""Directed network-formation game.

Node i pays ``s/n + l*Ed_i + r*Eb_i + m*deg_out(i)`` where ``Ed_i`` is the
mean hop count from i (``(1/n) * sum_j d(i, j)``) and ``Eb_i`` the fraction of
shortest paths between other nodes that transit i. Utility is minus the cost,
or ``NEG_INF`` when some node is unreachable from i.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .core import NEG_INF, EquilibriumVerdict, Game, check_epsilon_equilibrium

__all__ = [
    "Topology",
    "NetFormParams",
    "NodeCost",
    "NetFormGame",
    "BandRow",
    "MAX_SUBSET_NODES",
    "all_pairs_distance",
    "expected_distance",
    "betweenness",
    "node_utility",
    "link_deviations",
    "make_topology",
    "parse_topology",
    "format_topology",
    "read_topology",
    "write_topology",
    "verify_full_graph",
    "verify_star",
    "epsilon_band_scan",
]

MAX_SUBSET_NODES = 16
_MODES = {"single-link": "single-link", "single_link": "single-link",
          "full-subset": "full-subset", "full_subset": "full-subset"}


def _mode(mode: str) -> str:
    try:
        return _MODES[mode]
    except KeyError:
        raise ValueError(f"unknown deviation mode {mode!r}") from None


@dataclass(frozen=True)
class Topology:
    n: int
    links: frozenset[tuple[int, int]]

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError("n must be an integer >= 2")
        links = frozenset((int(a), int(b)) for a, b in self.links)
        for a, b in links:
            if a == b:
                raise ValueError(f"self-loop at node {a}")
            if not (0 <= a < self.n and 0 <= b < self.n):
                raise ValueError(f"link ({a}, {b}) out of range for n={self.n}")
        object.__setattr__(self, "links", links)

    @classmethod
    def from_out_links(cls, out_links: Sequence[Iterable[int]]) -> "Topology":
        return cls(len(out_links), frozenset((i, j) for i, row in enumerate(out_links) for j in row))

    def out_links(self, i: int) -> frozenset[int]:
        return frozenset(b for a, b in self.links if a == i)

    def as_profile(self) -> tuple[frozenset[int], ...]:
        rows: list[set[int]] = [set() for _ in range(self.n)]
        for a, b in self.links:
            rows[a].add(b)
        return tuple(frozenset(r) for r in rows)

    def adjacency(self) -> np.ndarray:
        adj = np.zeros((self.n, self.n), dtype=np.uint8)
        for a, b in self.links:
            adj[a, b] = 1
        return adj


@dataclass(frozen=True)
class NetFormParams:
    s: float = 0.0
    l: float = 1.0
    r: float = 0.0
    m: float = 0.0

    def __post_init__(self):
        for name in ("s", "l", "r", "m"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"cost parameter {name} must be >= 0")


@dataclass(frozen=True)
class NodeCost:
    storage: float
    retrieval: float
    routing: float
    maintenance: float
    total: float


def _adjacency(profile: Sequence[Iterable[int]]) -> np.ndarray:
    n = len(profile)
    adj = np.zeros((n, n), dtype=np.uint8)
    for i, row in enumerate(profile):
        for j in row:
            adj[i, j] = 1
    return adj


def all_pairs_distance(t: Topology) -> np.ndarray:
    """Directed hop counts as floats, ``inf`` where unreachable."""
    d = kernels.bfs_distances(t.adjacency()).astype(np.float64)
    d[d < 0] = np.inf
    return d


def _distance_sum(adj: np.ndarray, i: int) -> float:
    row = kernels.bfs_distances(adj)[i]
    if np.any(row < 0):
        return math.inf
    return float(row.sum())


def _betweenness_from_adj(adj: np.ndarray, i: int) -> float:
    n = adj.shape[0]
    if n < 3:
        return 0.0
    return float(kernels.betweenness_sums(adj)[i]) / ((n - 1) * (n - 2))


def expected_distance(t: Topology, i: int) -> float:
    return _distance_sum(t.adjacency(), i) / t.n


def betweenness(t: Topology, i: int) -> float:
    return _betweenness_from_adj(t.adjacency(), i)


def _cost_terms(adj: np.ndarray, i: int) -> tuple[float, float, int]:
    return _distance_sum(adj, i), _betweenness_from_adj(adj, i), int(adj[i].sum())


def node_utility(t: Topology, i: int, params: NetFormParams) -> tuple[float, NodeCost]:
    dist_sum, eb, deg = _cost_terms(t.adjacency(), i)
    storage = params.s / t.n
    routing = params.r * eb
    maintenance = params.m * deg
    if math.isinf(dist_sum):
        cost = NodeCost(storage, math.inf, routing, maintenance, math.inf)
        return NEG_INF, cost
    retrieval = params.l * dist_sum / t.n
    total = storage + retrieval + routing + maintenance
    return -total, NodeCost(storage, retrieval, routing, maintenance, total)


def link_deviations(t: Topology | Sequence[Iterable[int]], i: int, mode: str) -> list[frozenset[int]]:
    """Alternative out-link sets for node i, sorted lexicographically by target tuple.

    ``single-link`` toggles exactly one link (additions and removals, the
    current set excluded); ``full-subset`` lists all ``2**(n-1)`` sets,
    the current one included.
    """
    mode = _mode(mode)
    if isinstance(t, Topology):
        n, current = t.n, t.out_links(i)
    else:
        n, current = len(t), frozenset(t[i])
    others = [j for j in range(n) if j != i]
    if mode == "single-link":
        alts = [current ^ {j} for j in others]
    else:
        if n > MAX_SUBSET_NODES:
            raise ValueError(f"full-subset deviations need n <= {MAX_SUBSET_NODES}")
        alts = [
            frozenset(c) for k in range(len(others) + 1) for c in itertools.combinations(others, k)
        ]
    return sorted(alts, key=lambda s: tuple(sorted(s)))


class NetFormGame(Game):
    """Formation game over out-link sets; profiles are tuples of frozensets."""

    def __init__(self, n: int, params: NetFormParams, mode: str = "single-link"):
        self.n_players = n
        self.params = params
        self.mode = _mode(mode)

    def validate_profile(self, profile):
        super().validate_profile(profile)
        Topology.from_out_links(profile)

    def utility(self, profile, i):
        return node_utility(Topology.from_out_links(profile), i, self.params)[0]

    def deviation_space(self, i, profile):
        return link_deviations(profile, i, self.mode)

    def deviation_gains(self, profile, i, alternatives):
        # Term-wise differences: the storage term cancels and integer distance
        # and degree changes are scaled once, so m == l/n ties come out exactly 0.
        p = self.params
        per_hop = p.l / self.n_players
        base = _cost_terms(_adjacency(profile), i)
        rows = list(profile)
        gains = np.empty(len(alternatives), dtype=np.float64)
        for k, alt in enumerate(alternatives):
            rows[i] = alt
            d_alt, eb_alt, deg_alt = _cost_terms(_adjacency(rows), i)
            if math.isinf(base[0]):
                gains[k] = math.inf
            elif math.isinf(d_alt):
                gains[k] = NEG_INF
            else:
                gains[k] = (
                    (base[0] - d_alt) * per_hop
                    + (base[2] - deg_alt) * p.m
                    + (base[1] - eb_alt) * p.r
                )
        return gains


def make_topology(kind: str, n: int, p: float | None = None, seed: int | None = None) -> Topology:
    """Canonical topologies: ``full``, ``star`` (centre 0, both directions), ``directed-ring``, ``random``."""
    if n < 2:
        raise ValueError("n must be >= 2")
    kind = kind.replace("_", "-")
    if kind == "full":
        links = {(a, b) for a in range(n) for b in range(n) if a != b}
    elif kind == "star":
        links = {(0, b) for b in range(1, n)} | {(b, 0) for b in range(1, n)}
    elif kind in ("directed-ring", "ring"):
        links = {(a, (a + 1) % n) for a in range(n)}
    elif kind == "random":
        if p is None or not 0.0 <= p <= 1.0:
            raise ValueError("random topology needs 0 <= p <= 1")
        draw = np.random.default_rng(seed).random((n, n))
        links = {(a, b) for a in range(n) for b in range(n) if a != b and draw[a, b] < p}
    else:
        raise ValueError(f"unknown topology kind {kind!r}")
    return Topology(n, frozenset(links))


def parse_topology(text: str) -> Topology:
    """Parse ``n=<int>`` followed by one ``i j`` link per line (0-indexed)."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].replace(" ", "").startswith("n="):
        raise ValueError("topology file must start with 'n=<int>'")
    try:
        n = int(lines[0].replace(" ", "")[2:])
    except ValueError:
        raise ValueError(f"bad node count line {lines[0]!r}") from None
    links = set()
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"bad link line {ln!r}")
        links.add((int(parts[0]), int(parts[1])))
    return Topology(n, frozenset(links))


def format_topology(t: Topology) -> str:
    body = "".join(f"{a} {b}\n" for a, b in sorted(t.links))
    return f"n={t.n}\n{body}"


def read_topology(path: str | Path) -> Topology:
    return parse_topology(Path(path).read_text(encoding="ascii"))


def write_topology(t: Topology, path: str | Path) -> None:
    Path(path).write_text(format_topology(t), encoding="ascii")


def _check(t: Topology, params: NetFormParams, epsilon: float, mode: str) -> EquilibriumVerdict:
    game = NetFormGame(t.n, params, mode)
    return check_epsilon_equilibrium(game, t.as_profile(), epsilon)


def verify_full_graph(
    params: NetFormParams, n: int, epsilon: float = 0.0, mode: str = "full-subset"
) -> EquilibriumVerdict:
    if n < 3:
        raise ValueError("n must be >= 3")
    return _check(make_topology("full", n), params, epsilon, mode)


def verify_star(
    params: NetFormParams, n: int, epsilon: float = 0.0, mode: str = "full-subset"
) -> EquilibriumVerdict:
    if n < 3:
        raise ValueError("n must be >= 3")
    return _check(make_topology("star", n), params, epsilon, mode)


@dataclass(frozen=True)
class BandRow:
    m: float
    max_gain: float
    passed: bool


def epsilon_band_scan(
    t: Topology,
    params: NetFormParams,
    epsilon: float,
    m_grid: Sequence[float],
    mode: str = "single-link",
) -> list[BandRow]:
    """Re-run the epsilon check on ``t`` for each maintenance cost in ``m_grid``."""
    if len(m_grid) == 0:
        raise ValueError("m_grid must be nonempty")
    rows = []
    for m in m_grid:
        p = NetFormParams(s=params.s, l=params.l, r=params.r, m=float(m))
        v = _check(t, p, epsilon, mode)
        rows.append(BandRow(m=float(m), max_gain=v.max_gain, passed=v.passed))
    return rows
