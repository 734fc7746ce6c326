import math

import numpy as np
import pytest

from epsnash.core import NEG_INF, best_deviation_gain, check_epsilon_equilibrium
from epsnash.netform import (
    NetFormGame,
    NetFormParams,
    Topology,
    all_pairs_distance,
    betweenness,
    epsilon_band_scan,
    expected_distance,
    format_topology,
    link_deviations,
    make_topology,
    node_utility,
    parse_topology,
    read_topology,
    verify_full_graph,
    verify_star,
    write_topology,
)
from epsnash.oracles import exact_node_cost, naive_netform_verdict


def test_distances_and_expected_distance():
    full = make_topology("full", 4)
    assert expected_distance(full, 0) == 0.75
    star = make_topology("star", 4)
    assert expected_distance(star, 1) == 1.25
    assert expected_distance(star, 0) == 0.75
    d = all_pairs_distance(make_topology("ring", 4))
    assert d[0].tolist() == [0, 1, 2, 3]
    assert d[1, 0] == 3


def test_unreachable_is_inf():
    t = Topology(3, frozenset({(0, 1)}))
    assert math.isinf(expected_distance(t, 0))
    assert math.isinf(all_pairs_distance(t)[1, 0])


@pytest.mark.parametrize("n", [3, 4, 6])
def test_betweenness_examples(n):
    star = make_topology("star", n)
    assert betweenness(star, 0) == 1.0
    assert all(betweenness(star, i) == 0.0 for i in range(1, n))
    assert all(betweenness(make_topology("full", n), i) == 0.0 for i in range(n))


def test_betweenness_ring_and_split_paths():
    assert betweenness(make_topology("ring", 3), 1) == 0.5
    # 0 -> {1, 2} -> 3: each middle node carries half of the (0, 3) pair
    diamond = Topology(4, frozenset({(0, 1), (0, 2), (1, 3), (2, 3)}))
    assert betweenness(diamond, 1) == pytest.approx(0.5 / 6)


def test_node_utility_components():
    star = make_topology("star", 4)
    params = NetFormParams(s=2, l=2, r=1, m=0.1)
    u, cost = node_utility(star, 0, params)
    # storage 0.5, retrieval 2 * 3/4, routing 1, maintenance 0.3
    assert cost.storage == 0.5 and cost.retrieval == 1.5 and cost.routing == 1.0
    assert cost.maintenance == pytest.approx(0.3)
    assert u == pytest.approx(-3.3)
    u_leaf, _ = node_utility(star, 1, params)
    assert u_leaf == pytest.approx(-(0.5 + 2 * 1.25 + 0.1))


def test_node_utility_disconnected():
    t = Topology(3, frozenset({(0, 1), (1, 0), (2, 0)}))
    u, cost = node_utility(t, 0, NetFormParams(1, 1, 1, 1))
    assert u == NEG_INF and math.isinf(cost.total)
    assert node_utility(t, 2, NetFormParams(1, 1, 1, 1))[0] > NEG_INF


@pytest.mark.parametrize("kind, n", [("full", 5), ("ring", 6), ("star", 5)])
def test_utilities_match_exact_oracle(kind, n):
    t = make_topology(kind, n)
    params = NetFormParams(s=1, l=2, r=0.5, m=0.3)
    for i in range(n):
        exact = exact_node_cost(n, t.links, i, 1, 2, 0.5, 0.3)
        assert node_utility(t, i, params)[0] == pytest.approx(-float(exact), abs=1e-12)


@pytest.mark.parametrize("kind", ["full", "ring"])
def test_vertex_transitive_equal_utilities(kind):
    t = make_topology(kind, 6)
    us = [node_utility(t, i, NetFormParams(1, 1, 1, 0.2))[0] for i in range(6)]
    assert max(us) - min(us) <= 1e-12


def test_link_deviation_counts():
    star = make_topology("star", 4)
    assert len(link_deviations(star, 1, "single-link")) == 3
    assert len(link_deviations(star, 1, "full-subset")) == 8
    assert star.out_links(1) in link_deviations(star, 1, "full-subset")
    assert star.out_links(1) not in link_deviations(star, 1, "single_link")
    assert len(link_deviations(make_topology("ring", 7), 2, "single-link")) == 6
    alts = link_deviations(star, 0, "full-subset")
    assert alts == sorted(alts, key=lambda s: tuple(sorted(s)))
    with pytest.raises(ValueError):
        link_deviations(star, 0, "pairs")
    with pytest.raises(ValueError):
        link_deviations(make_topology("ring", 17), 0, "full-subset")


# q <= n - 2 so at least one out-link survives
@pytest.mark.parametrize("n, q", [(n, q) for n in (3, 4, 5, 6) for q in (1, 2) if q <= n - 2])
def test_full_graph_drop_gain(n, q):
    params = NetFormParams(s=0, l=1, r=0.7, m=0.4)
    t = make_topology("full", n)
    game = NetFormGame(n, params, "full-subset")
    drop = frozenset(range(1, n)) - frozenset(range(1, 1 + q))
    gain = game.deviation_gains(t.as_profile(), 0, [drop])[0]
    assert gain == pytest.approx(q * (0.4 - 1 / n), abs=1e-12)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_full_graph_boundary_is_exactly_zero(n):
    v = verify_full_graph(NetFormParams(s=0, l=1, r=0, m=1 / n), n)
    assert v.max_gain == 0.0 and v.passed
    assert verify_full_graph(NetFormParams(0, 1, 0, 1 / n - 1e-3), n).passed
    assert not verify_full_graph(NetFormParams(0, 1, 0, 1 / n + 1e-3), n).passed


@pytest.mark.parametrize("r", [0.0, 1.0, 3.0])
def test_star_chord_gain(r):
    n = 5
    params = NetFormParams(s=0, l=1, r=r, m=0.1)
    star = make_topology("star", n)
    game = NetFormGame(n, params)
    gain = game.deviation_gains(star.as_profile(), 1, [frozenset({0, 2})])[0]
    assert gain == pytest.approx(-0.1 + 1 / n, abs=1e-12)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_star_verdict(n):
    # dropping the centre link disconnects a leaf, so only chords matter
    assert verify_star(NetFormParams(0, 1, 0, 1 / n + 1e-3), n).passed
    assert not verify_star(NetFormParams(0, 1, 0, 1 / n - 1e-3), n).passed
    assert verify_star(NetFormParams(0, 1, 1, 1 / n + 1e-3), n).passed


def test_verify_rejects_small_n():
    with pytest.raises(ValueError):
        verify_star(NetFormParams(), 2)
    with pytest.raises(ValueError):
        verify_full_graph(NetFormParams(), 2)


def _oracle_cases():
    cases = []
    for n in (3, 4, 5):
        for kind in ("full", "star", "ring"):
            cases.append((make_topology(kind, n), "full-subset"))
        for seed in range(3):
            cases.append((make_topology("random", n, p=0.6, seed=seed), "single-link"))
    return cases


@pytest.mark.parametrize("t, mode", _oracle_cases())
@pytest.mark.parametrize("r, m", [(0.0, 0.2), (1.0, 0.3), (0.5, 0.45)])
def test_matches_naive_oracle(t, mode, r, m):
    params = NetFormParams(s=1, l=1, r=r, m=m)
    v = check_epsilon_equilibrium(NetFormGame(t.n, params, mode), t.as_profile(), 0.01)
    passed, max_gain = naive_netform_verdict(t.n, t.links, 1, 1, r, m, 0.01, mode)
    assert v.passed == passed
    if math.isinf(max_gain):
        assert v.max_gain == max_gain
    else:
        assert v.max_gain == pytest.approx(max_gain, abs=1e-12)


def test_disconnected_profile_has_infinite_gain():
    t = Topology(3, frozenset({(0, 1), (1, 2)}))
    v = check_epsilon_equilibrium(NetFormGame(3, NetFormParams()), t.as_profile(), 1e9)
    assert v.max_gain == math.inf and not v.passed


def test_gain_monotone_in_m():
    t = make_topology("full", 5)
    gains = [
        check_epsilon_equilibrium(NetFormGame(5, NetFormParams(0, 1, 0, m)), t.as_profile(), 0).max_gain
        for m in np.linspace(0, 1, 21)
    ]
    assert gains == sorted(gains)


def test_band_scan_full_graph():
    n = 4
    rows = epsilon_band_scan(make_topology("full", n), NetFormParams(0, 1, 0, 0), 0.05,
                             [0.1, 0.25, 0.3, 0.31], mode="single-link")
    assert [r.passed for r in rows] == [True, True, True, False]
    assert rows[1].max_gain == 0.0
    with pytest.raises(ValueError):
        epsilon_band_scan(make_topology("full", n), NetFormParams(), 0.1, [])


def test_band_scan_ring_counterexample():
    # the ring is never stable: a chord halves some distances for one link
    rows = epsilon_band_scan(make_topology("ring", 6), NetFormParams(0, 1, 0, 0), 0.01,
                             np.linspace(0, 0.5, 11).tolist())
    assert not any(r.passed for r in rows)


def test_make_topology():
    assert len(make_topology("full", 5).links) == 20
    assert len(make_topology("star", 5).links) == 8
    assert len(make_topology("directed-ring", 5).links) == 5
    assert make_topology("random", 6, p=0.0, seed=1).links == frozenset()
    assert len(make_topology("random", 6, p=1.0, seed=1).links) == 30
    assert make_topology("random", 8, p=0.4, seed=3) == make_topology("random", 8, p=0.4, seed=3)
    with pytest.raises(ValueError):
        make_topology("random", 5)
    with pytest.raises(ValueError):
        make_topology("mesh", 5)


def test_topology_file_round_trip(tmp_path):
    t = make_topology("random", 7, p=0.5, seed=9)
    path = tmp_path / "t.txt"
    write_topology(t, path)
    assert read_topology(path) == t
    assert parse_topology("# comment\nn=3\n0 1\n\n1 2\n") == Topology(3, frozenset({(0, 1), (1, 2)}))
    assert format_topology(Topology(3, frozenset({(1, 2), (0, 1)}))) == "n=3\n0 1\n1 2\n"


@pytest.mark.parametrize("text", ["n=3\n1 1\n", "n=3\n0 3\n", "0 1\n", "n=3\n0 1 2\n", "n=x\n"])
def test_topology_parse_errors(text):
    with pytest.raises(ValueError):
        parse_topology(text)


def test_best_deviation_reports_alternative():
    n = 4
    t = make_topology("full", n)
    game = NetFormGame(n, NetFormParams(0, 1, 0, 0.4), "full-subset")
    rep = best_deviation_gain(game, t.as_profile(), 0, game.deviation_space(0, t.as_profile()))
    # keeping a single link saves 2 * (m - l/n); {1} is the first such set in lexicographic order
    assert rep.best_alternative == frozenset({1})
    assert rep.gain == pytest.approx(2 * (0.4 - 0.25), abs=1e-12)
