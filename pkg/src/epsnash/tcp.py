"""TCP SACK additive-increase game.

Sender i's goodput is ``c * a_i / (A + a_i)`` with ``A`` the sum of the other
senders' additive-increase parameters. The multiplicative-decrease factor is
held fixed and is not a strategy.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Game, Trajectory, best_response_dynamics

__all__ = [
    "TcpParams",
    "TcpGame",
    "tcp_utility",
    "tcp_deviation_gain",
    "tcp_epsilon_bound",
    "tcp_allones_max_gain",
    "tcp_unbounded_scan",
    "tcp_escalation",
]


@dataclass(frozen=True)
class TcpParams:
    n: int
    c: float
    K: float = 1.0
    alpha_max: float = 1e6

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError("n must be an integer >= 2")
        if not self.c > 0:
            raise ValueError("capacity c must be > 0")
        if not self.K >= 0:
            raise ValueError("deviation cap K must be >= 0")


def _goodput(alpha, others, c):
    alpha = np.asarray(alpha, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        share = np.where(alpha > 0, alpha / (others + alpha), 0.0)
    return c * share


def tcp_utility(alphas: Sequence[float], params: TcpParams, i: int) -> float:
    """Goodput of sender i; 0 when its own alpha is 0."""
    if any(a < 0 for a in alphas):
        raise ValueError("alpha values must be >= 0")
    a = float(alphas[i])
    if a == 0.0:
        return 0.0
    others = sum(float(x) for j, x in enumerate(alphas) if j != i)
    return params.c * (a / (others + a))


def tcp_deviation_gain(alpha_i: float, alpha_prime: float, A: float, c: float) -> float:
    """Closed-form utility change ``c*A*(a' - a) / ((A + a')(A + a))`` for moving a -> a'."""
    if alpha_i < 0 or alpha_prime < 0 or c < 0:
        raise ValueError("arguments must be >= 0")
    if not A > 0:
        raise ValueError("A must be > 0; use direct utilities when opponents send nothing")
    return c * A * (alpha_prime - alpha_i) / ((A + alpha_prime) * (A + alpha_i))


def tcp_epsilon_bound(params: TcpParams) -> float:
    """Epsilon above which all-ones is an equilibrium under per-move cap K: ``cK/n``."""
    return params.c * params.K / params.n


def tcp_allones_max_gain(params: TcpParams) -> float:
    """Exact best bounded gain from the all-ones profile, ``c(n-1)K / (n(n+K))``."""
    n, K = params.n, params.K
    return params.c * (n - 1) * K / (n * (n + K))


def tcp_unbounded_scan(
    alpha: float, A: float, c: float, alpha_max: float = 1e6, points: int = 200
) -> tuple[np.ndarray, np.ndarray, float]:
    """Gains on a geometric alpha' grid up to ``alpha_max`` and their analytic limit ``cA/(A + alpha)``."""
    lo = max(alpha, 1e-3) if alpha > 0 else 1e-3
    grid = np.geomspace(lo, alpha_max, points)
    gains = np.array([tcp_deviation_gain(alpha, a, A, c) for a in grid])
    return grid, gains, c * A / (A + alpha)


class TcpGame(Game):
    """TCP game with grid deviation sets.

    ``mode`` selects each sender's deviation set around its current alpha:

    * ``"bounded"``: grid on ``[0, alpha + K]`` (from all-ones this is [0, K+1])
    * ``"probe"``: grid on ``(alpha, alpha + K]``, one probing step
    * ``"unbounded"``: 0 plus a geometric grid up to ``alpha_max``
    """

    modes = ("bounded", "probe", "unbounded")

    def __init__(self, params: TcpParams, step: float | None = None, mode: str = "bounded"):
        if mode not in self.modes:
            raise ValueError(f"unknown deviation mode {mode!r}")
        self.params = params
        self.n_players = params.n
        self.mode = mode
        self.step = (params.K + 1) / 1000 if step is None else step
        if not self.step > 0:
            raise ValueError("grid step must be > 0")

    def utility(self, profile, i):
        return tcp_utility(profile, self.params, i)

    def strategy_bounds(self, i):
        return (0.0, float("inf"))

    def validate_profile(self, profile):
        super().validate_profile(profile)
        if any(a < 0 for a in profile):
            raise ValueError("alpha values must be >= 0")

    def deviation_space(self, i, profile):
        a = float(profile[i])
        K = self.params.K
        if self.mode == "bounded":
            top = a + K
            points = max(1, int(round(top / self.step)))
            return np.linspace(0.0, top, points + 1).tolist()
        if self.mode == "probe":
            if K <= 0:
                return []
            points = max(1, int(round(K / self.step)))
            return (a + K * np.arange(1, points + 1) / points).tolist()
        return [0.0] + np.geomspace(1e-3, self.params.alpha_max, 400).tolist()

    def deviation_gains(self, profile, i, alternatives):
        alts = np.asarray(alternatives, dtype=np.float64)
        if np.any(alts < 0):
            raise ValueError("alpha values must be >= 0")
        others = sum(float(x) for j, x in enumerate(profile) if j != i)
        return _goodput(alts, others, self.params.c) - self.utility(profile, i)


def tcp_escalation(
    params: TcpParams,
    rounds: int,
    initial: Sequence[float] | None = None,
    step: float | None = None,
) -> Trajectory:
    """Round-robin best-response probing where each move raises alpha by at most K."""
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    start = tuple(float(a) for a in initial) if initial is not None else (1.0,) * params.n
    game = TcpGame(params, step=step if step is not None else max(params.K, 1.0) / 100, mode="probe")
    return best_response_dynamics(game, start, max_rounds=rounds)
