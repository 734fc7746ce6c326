import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epsnash.core import check_epsilon_equilibrium
from epsnash.oracles import naive_tcp_max_gain
from epsnash.tcp import (
    TcpGame,
    TcpParams,
    tcp_allones_max_gain,
    tcp_deviation_gain,
    tcp_epsilon_bound,
    tcp_escalation,
    tcp_unbounded_scan,
    tcp_utility,
)


def test_utility_examples():
    p = TcpParams(10, 100.0)
    assert all(tcp_utility([1.0] * 10, p, i) == pytest.approx(10.0, abs=1e-12) for i in range(10))
    assert tcp_utility([0.0] + [1.0] * 9, p, 0) == 0.0
    assert tcp_utility([6.0] + [1.0] * 9, p, 0) == pytest.approx(40.0, abs=1e-12)
    assert tcp_utility([0.0, 0.0], TcpParams(2, 100.0), 1) == 0.0
    with pytest.raises(ValueError):
        tcp_utility([1.0, -1.0], TcpParams(2, 100.0), 0)


def test_deviation_gain_examples():
    assert tcp_deviation_gain(1.0, 6.0, 9.0, 100.0) == pytest.approx(30.0, abs=1e-12)
    p = TcpParams(10, 100.0)
    direct = tcp_utility([6.0] + [1.0] * 9, p, 0) - tcp_utility([1.0] * 10, p, 0)
    assert tcp_deviation_gain(1.0, 6.0, 9.0, 100.0) == pytest.approx(direct, abs=1e-12)
    assert tcp_deviation_gain(3.0, 3.0, 9.0, 100.0) == 0.0
    with pytest.raises(ValueError):
        tcp_deviation_gain(1.0, 2.0, 0.0, 100.0)


def test_unbounded_scan_approaches_capacity():
    grid, gains, limit = tcp_unbounded_scan(0.0, 9.0, 100.0, alpha_max=1e6)
    assert limit == 100.0
    assert grid[-1] == pytest.approx(1e6)
    assert np.all(np.diff(gains) > 0)
    assert abs(gains[-1] - limit) <= 0.01 * limit


def test_unbounded_scan_nonzero_baseline_limit():
    _, gains, limit = tcp_unbounded_scan(2.0, 9.0, 100.0, alpha_max=1e6)
    assert limit == pytest.approx(100.0 * 9 / 11)
    assert abs(gains[-1] - limit) <= 0.01 * limit


@settings(max_examples=500)
@given(
    a=st.floats(0, 50), ap=st.floats(0, 50), A=st.floats(0.01, 50), c=st.floats(0.1, 100),
)
def test_identity_fuzz(a, ap, A, c):
    p = TcpParams(2, c)
    direct = tcp_utility([ap, A], p, 0) - tcp_utility([a, A], p, 0)
    assert abs(tcp_deviation_gain(a, ap, A, c) - direct) <= 1e-12


def test_epsilon_bound_values():
    assert tcp_epsilon_bound(TcpParams(10, 100.0, 5.0)) == 50.0
    assert tcp_epsilon_bound(TcpParams(1000, 100.0, 5.0)) == 0.5


@pytest.mark.parametrize("n, K", [(2, 1), (3, 2), (10, 5), (20, 10), (7, 3)])
def test_allones_max_gain_matches_grid_oracle(n, K):
    p = TcpParams(n, 100.0, float(K))
    closed = tcp_allones_max_gain(p)
    assert naive_tcp_max_gain(n, 100.0, float(K)) == pytest.approx(closed, abs=1e-9)
    v = check_epsilon_equilibrium(TcpGame(p, mode="bounded"), (1.0,) * n, tcp_epsilon_bound(p))
    assert v.passed
    assert v.max_gain == pytest.approx(closed, abs=1e-9)
    assert all(r.best_alternative == pytest.approx(K + 1) for r in v.per_player)
    assert not check_epsilon_equilibrium(TcpGame(p, mode="bounded"), (1.0,) * n, closed - 1e-6).passed


def test_bound_ordering_grid():
    for n in range(2, 40):
        for K in np.linspace(0.1, 20, 25):
            p = TcpParams(n, 100.0, float(K))
            assert tcp_allones_max_gain(p) <= tcp_epsilon_bound(p) < p.c or n * 1.0 <= K


def test_bound_below_capacity_when_k_small():
    for n in range(2, 30):
        for K in range(1, n):
            p = TcpParams(n, 100.0, float(K))
            assert tcp_allones_max_gain(p) <= tcp_epsilon_bound(p) < p.c


@settings(max_examples=100)
@given(st.lists(st.floats(0, 30), min_size=2, max_size=6), st.integers(0, 5), st.floats(0.01, 5))
def test_utility_range_and_monotone(alphas, i, bump):
    i = i % len(alphas)
    p = TcpParams(len(alphas), 100.0)
    u = tcp_utility(alphas, p, i)
    assert 0 <= u <= p.c
    others = sum(a for j, a in enumerate(alphas) if j != i)
    # below ~1 ulp of alpha_i the share rounds to exactly 1
    if others > 1e-9 * (alphas[i] + 1):
        assert u < p.c
        raised = list(alphas)
        raised[i] += bump
        assert tcp_utility(raised, p, i) > u


def test_utility_finite_difference_positive():
    p = TcpParams(3, 100.0)
    for a in (0.5, 1.0, 4.0, 20.0):
        h = 1e-6
        d = (tcp_utility([a + h, 1.0, 1.0], p, 0) - tcp_utility([a - h, 1.0, 1.0], p, 0)) / (2 * h)
        assert d == pytest.approx(100.0 * 2 / (2 + a) ** 2, rel=1e-5)
        assert d > 0


def test_escalation_strictly_increases():
    traj = tcp_escalation(TcpParams(3, 100.0, 2.0), 10)
    arr = np.array(traj.profiles)
    assert len(traj.profiles) == 1 + 3 * 10
    for k, (rnd, player) in enumerate(traj.steps):
        assert arr[k + 1, player] == pytest.approx(arr[k, player] + 2.0)
    assert np.all(np.diff(arr, axis=0) >= 0)
    p = TcpParams(3, 100.0, 2.0)
    for prof in traj.profiles:
        assert sum(tcp_utility(prof, p, i) for i in range(3)) == pytest.approx(100.0, abs=1e-9)


def test_escalation_k_zero_is_constant():
    traj = tcp_escalation(TcpParams(3, 100.0, 0.0), 5)
    assert traj.profiles == [(1.0, 1.0, 1.0)]
    assert traj.converged


def test_probe_window_excludes_current():
    g = TcpGame(TcpParams(3, 100.0, 2.0), step=0.5, mode="probe")
    assert g.deviation_space(0, (1.0, 1.0, 1.0)) == [1.5, 2.0, 2.5, 3.0]


def test_unbounded_mode_needs_eps_near_c():
    p = TcpParams(10, 100.0, 5.0)
    g = TcpGame(p, mode="unbounded")
    prof = (0.0,) + (1.0,) * 9
    v = check_epsilon_equilibrium(g, prof, 0.0)
    assert v.per_player[0].gain >= 0.99 * p.c
