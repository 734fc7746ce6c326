"""Security-level game against a first-stage DDoS attacker.

Each of n users picks a security level in [0, P]. The user(s) with the lowest
level are compromised and pay P; everyone else pays their own level.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .core import ContinuousDistribution, Game

__all__ = [
    "SecurityParams",
    "SecurityGame",
    "MixedGain",
    "MAX_GRID_PROFILES",
    "compromised_set",
    "security_utility",
    "security_cdf",
    "security_quantile",
    "security_distribution",
    "expected_utility_closed_form",
    "expected_utility_general",
    "mixed_epsilon_gain",
    "security_grid",
    "enumerate_grid_nash",
]

MAX_GRID_PROFILES = 10**8


@dataclass(frozen=True)
class SecurityParams:
    n: int
    P: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError("n must be an integer >= 2")
        if not self.P > 0:
            raise ValueError("penalty P must be > 0")


def _check_levels(levels: Sequence[float], params: SecurityParams) -> None:
    for s in levels:
        if not 0.0 <= s <= params.P:
            raise ValueError(f"security level {s} outside [0, {params.P}]")


def compromised_set(levels: Sequence[float]) -> frozenset[int]:
    """Indices of every player at the minimum level (ties are all compromised)."""
    if len(levels) == 0:
        raise ValueError("empty profile")
    low = min(levels)
    return frozenset(i for i, s in enumerate(levels) if s == low)


def security_utility(levels: Sequence[float], params: SecurityParams) -> tuple[float, ...]:
    _check_levels(levels, params)
    hit = compromised_set(levels)
    return tuple(-params.P if i in hit else -float(s) for i, s in enumerate(levels))


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def security_cdf(s, params: SecurityParams):
    """Equilibrium-spreading CDF: ``1 - (1 - s/P)**(1/(n-1))`` on [0, P)."""
    s = np.asarray(s, dtype=np.float64)
    inside = np.clip(s / params.P, 0.0, 1.0)
    body = 1.0 - (1.0 - inside) ** (1.0 / (params.n - 1))
    out = np.where(s <= 0.0, 0.0, np.where(s >= params.P, 1.0, body))
    return _scalar_or_array(out)


def security_quantile(u, params: SecurityParams):
    u = np.asarray(u, dtype=np.float64)
    if np.any(~((u >= 0.0) & (u <= 1.0))):
        raise ValueError("u must lie in [0, 1]")
    return _scalar_or_array(params.P * (1.0 - (1.0 - u) ** (params.n - 1)))


def security_distribution(params: SecurityParams) -> ContinuousDistribution:
    return ContinuousDistribution(
        lo=0.0,
        hi=float(params.P),
        cdf=lambda s: security_cdf(s, params),
        quantile=lambda u: security_quantile(u, params),
        label=f"security-cdf(n={params.n},P={params.P:g})",
    )


def expected_utility_closed_form(s, params: SecurityParams):
    """``-P + s(1 - s/P)``; valid when every opponent plays ``security_distribution``."""
    arr = np.asarray(s, dtype=np.float64)
    if np.any(~((arr >= 0.0) & (arr <= params.P))):
        raise ValueError(f"level outside [0, {params.P}]")
    return _scalar_or_array(-params.P + arr * (1.0 - arr / params.P))


def expected_utility_general(
    s, opponent_cdf: ContinuousDistribution | Callable, params: SecurityParams
):
    """Expected utility of level s when all n-1 opponents draw i.i.d. from ``opponent_cdf``.

    The player is counted as compromised only when every opponent is strictly
    above s, i.e. with probability ``(1 - F(s))**(n-1)``.
    """
    arr = np.asarray(s, dtype=np.float64)
    if np.any(~((arr >= 0.0) & (arr <= params.P))):
        raise ValueError(f"level outside [0, {params.P}]")
    if isinstance(opponent_cdf, ContinuousDistribution):
        if opponent_cdf.lo < 0.0 or opponent_cdf.hi > params.P:
            raise ValueError("opponent distribution must be supported on [0, P]")
        cdf = opponent_cdf.cdf
    else:
        cdf = opponent_cdf
    above = (1.0 - np.asarray(cdf(arr), dtype=np.float64)) ** (params.n - 1)
    return _scalar_or_array(-params.P * above - arr * (1.0 - above))


@dataclass(frozen=True)
class MixedGain:
    """Result of :func:`mixed_epsilon_gain`.

    ``quadrature_error`` is the change in the expected payoff when the
    quadrature grid is halved (a Richardson-style error estimate).
    """

    gain: float
    best_level: float
    best_utility: float
    expected_utility: float
    quadrature_error: float


def _quantile_trapezoid(g: Callable, dist: ContinuousDistribution, points: int) -> float:
    u = np.linspace(0.0, 1.0, points + 1)
    vals = np.asarray(g(np.clip(dist.quantile(u), dist.lo, dist.hi)), dtype=np.float64)
    return float(np.trapezoid(vals, u))


def mixed_epsilon_gain(
    params: SecurityParams,
    strategy: ContinuousDistribution,
    s_grid_step: float | None = None,
) -> MixedGain:
    """Largest gain from a pure deviation when every player uses ``strategy``.

    The payoff of a level s is the expected utility against n-1 opponents
    drawing from ``strategy``; the gain is the best grid level's payoff minus
    the payoff of drawing one's own level from ``strategy``. That expectation
    is integrated in quantile space (``E[g(X)] = int_0^1 g(Q(u)) du``) with
    the trapezoid rule, which stays exact for point masses and avoids the
    density singularity at P for n >= 3.
    """
    step = params.P / 1000 if s_grid_step is None else s_grid_step
    if not step > 0:
        raise ValueError("grid step must be > 0")
    points = max(2, int(round(params.P / step)))
    grid = np.linspace(0.0, params.P, points + 1)

    def eu(s):
        return expected_utility_general(s, strategy, params)

    values = np.asarray(eu(grid))
    k = int(np.argmax(values))
    fine = _quantile_trapezoid(eu, strategy, points)
    coarse = _quantile_trapezoid(eu, strategy, max(1, points // 2))
    return MixedGain(
        gain=float(values[k] - fine),
        best_level=float(grid[k]),
        best_utility=float(values[k]),
        expected_utility=fine,
        quadrature_error=abs(fine - coarse),
    )


def security_grid(P: float, step: float) -> np.ndarray:
    if not step > 0:
        raise ValueError("grid step must be > 0")
    ratio = P / step
    points = int(round(ratio))
    if points < 1 or not math.isclose(ratio, points, rel_tol=1e-9, abs_tol=1e-9):
        raise ValueError(f"step {step} does not divide P={P}")
    return np.linspace(0.0, P, points + 1)


class SecurityGame(Game):
    """Security game with levels restricted to a uniform grid on [0, P] for deviations."""

    def __init__(self, params: SecurityParams, step: float | None = None):
        self.params = params
        self.n_players = params.n
        self.step = params.P / 1000 if step is None else step
        self.grid = security_grid(params.P, self.step)
        self._grid_list = [float(x) for x in self.grid]

    def utility(self, profile, i):
        return security_utility(profile, self.params)[i]

    def deviation_space(self, i, profile):
        return self._grid_list

    def strategy_bounds(self, i):
        return (0.0, float(self.params.P))

    def validate_profile(self, profile):
        super().validate_profile(profile)
        _check_levels(profile, self.params)

    def deviation_gains(self, profile, i, alternatives):
        alts = np.asarray(alternatives, dtype=np.float64)
        _check_levels(alts, self.params)
        others = min(s for j, s in enumerate(profile) if j != i)
        alt_u = np.where(alts <= others, -self.params.P, -alts)
        return alt_u - self.utility(profile, i)

    def batch_utility(self, draws, i):
        own = draws[:, i]
        others = np.delete(draws, i, axis=1).min(axis=1)
        return np.where(own <= others, -self.params.P, -own)


def enumerate_grid_nash(params: SecurityParams, step: float) -> list[tuple[float, ...]]:
    """Every grid profile in which no player has a strictly profitable grid deviation.

    Profiles come back in lexicographic order of their levels.
    """
    grid = security_grid(params.P, step)
    count = len(grid) ** params.n
    if count > MAX_GRID_PROFILES:
        raise ValueError(
            f"grid enumeration of {count} profiles exceeds the {MAX_GRID_PROFILES} guard"
        )
    codes = kernels.security_grid_nash(params.n, grid, float(params.P))
    g = len(grid)
    radix = g ** np.arange(params.n - 1, -1, -1, dtype=np.int64)
    idx = (np.asarray(codes, dtype=np.int64)[:, None] // radix[None, :]) % g
    return [tuple(float(grid[k]) for k in row) for row in idx]
