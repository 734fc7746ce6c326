"""Game-agnostic equilibrium machinery.

Utilities are plain floats; a disconnected or otherwise infinitely bad outcome
is ``NEG_INF`` (``float('-inf')``). Gains measured from a ``NEG_INF``
baseline are ``+inf`` so they fail every finite epsilon.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

__all__ = [
    "NEG_INF",
    "extended_gain",
    "with_strategy",
    "Game",
    "DeviationReport",
    "EquilibriumVerdict",
    "Trajectory",
    "ContinuousDistribution",
    "MonteCarloEstimate",
    "point_mass",
    "uniform",
    "best_deviation_gain",
    "check_epsilon_equilibrium",
    "best_response_dynamics",
    "inverse_transform_sample",
    "mc_expected_utility",
]

NEG_INF = float("-inf")

Profile = tuple


def extended_gain(alternative: float, baseline: float) -> float:
    """``alternative - baseline`` with a ``NEG_INF`` baseline mapped to ``+inf``."""
    if baseline == NEG_INF:
        return math.inf
    return alternative - baseline


def with_strategy(profile: Sequence, i: int, strategy: Any) -> Profile:
    out = list(profile)
    out[i] = strategy
    return tuple(out)


class Game:
    """Base class for n-player games with enumerable deviation sets.

    Subclasses set ``n_players`` and implement ``utility`` and
    ``deviation_space``. ``deviation_gains`` and ``batch_utility`` have
    generic implementations that games may override with vectorized or
    numerically tighter versions; overrides must agree with direct utility
    differences to 1e-12.
    """

    n_players: int

    def utility(self, profile: Profile, i: int) -> float:
        raise NotImplementedError

    def deviation_space(self, i: int, profile: Profile) -> Sequence:
        raise NotImplementedError

    def strategy_bounds(self, i: int) -> tuple[float, float] | None:
        """Closed real interval of player i's strategies, or None for non-numeric spaces."""
        return None

    def validate_profile(self, profile: Profile) -> None:
        if len(profile) != self.n_players:
            raise ValueError(
                f"profile has {len(profile)} entries, game has {self.n_players} players"
            )

    def deviation_gains(self, profile: Profile, i: int, alternatives: Sequence) -> np.ndarray:
        base = self.utility(profile, i)
        return np.array(
            [
                extended_gain(self.utility(with_strategy(profile, i, a), i), base)
                for a in alternatives
            ],
            dtype=np.float64,
        )

    def batch_utility(self, draws: np.ndarray, i: int) -> np.ndarray:
        """Utility of player i for each row of ``draws`` (samples x players)."""
        return np.array([self.utility(tuple(row.tolist()), i) for row in draws])


@dataclass(frozen=True)
class DeviationReport:
    player: int
    best_alternative: Any
    gain: float


@dataclass(frozen=True)
class EquilibriumVerdict:
    epsilon: float
    per_player: tuple[DeviationReport, ...]
    max_gain: float
    passed: bool


@dataclass
class Trajectory:
    """Best-response path. ``steps[k]`` is ``(round, player)`` for the move producing ``profiles[k + 1]``."""

    profiles: list[Profile]
    steps: list[tuple[int, int]] = field(default_factory=list)
    converged: bool = False
    rounds: int = 0


def best_deviation_gain(
    game: Game, profile: Profile, i: int, deviations: Sequence
) -> DeviationReport:
    """Best alternative for player i among ``deviations`` and its gain over staying.

    Ties go to the first alternative in the given order. The gain may be
    negative when the set omits the current strategy.
    """
    alternatives = list(deviations)
    if not alternatives:
        raise ValueError("empty deviation set")
    if not 0 <= i < game.n_players:
        raise ValueError(f"player {i} out of range for {game.n_players} players")
    gains = np.asarray(game.deviation_gains(profile, i, alternatives), dtype=np.float64)
    k = int(np.argmax(gains))
    return DeviationReport(player=i, best_alternative=alternatives[k], gain=float(gains[k]))


def check_epsilon_equilibrium(
    game: Game,
    profile: Profile,
    epsilon: float,
    deviations: Sequence[Sequence] | None = None,
) -> EquilibriumVerdict:
    """Verdict on whether no player gains more than ``epsilon`` by deviating.

    ``deviations[i]`` is player i's deviation set; when omitted the game's own
    ``deviation_space`` is used. ``epsilon=0`` is the pure Nash check.
    """
    if epsilon < 0 or math.isnan(epsilon):
        raise ValueError("epsilon must be >= 0")
    profile = tuple(profile)
    game.validate_profile(profile)
    reports = []
    for i in range(game.n_players):
        devs = game.deviation_space(i, profile) if deviations is None else deviations[i]
        reports.append(best_deviation_gain(game, profile, i, devs))
    max_gain = max(r.gain for r in reports)
    return EquilibriumVerdict(
        epsilon=float(epsilon),
        per_player=tuple(reports),
        max_gain=max_gain,
        passed=max_gain <= epsilon,
    )


def best_response_dynamics(
    game: Game,
    initial: Profile,
    max_rounds: int,
    order: str = "round-robin",
    seed: int | None = None,
) -> Trajectory:
    """Sequential best-response dynamics with strict-improvement moves.

    Each round visits every player once (fixed order, or a fresh seeded
    shuffle per round when ``order='random'``); a player moves only when its
    best deviation has gain > 0. Players with an empty deviation set are
    skipped. Converged means a whole round passed without a move.
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    if order not in ("round-robin", "random"):
        raise ValueError(f"unknown player order {order!r}")
    profile = tuple(initial)
    game.validate_profile(profile)
    rng = np.random.default_rng(seed) if order == "random" else None
    traj = Trajectory(profiles=[profile])
    for rnd in range(1, max_rounds + 1):
        players = list(range(game.n_players))
        if rng is not None:
            players = [int(p) for p in rng.permutation(game.n_players)]
        moved = False
        for i in players:
            devs = list(game.deviation_space(i, profile))
            if not devs:
                continue
            report = best_deviation_gain(game, profile, i, devs)
            if report.gain > 0:
                profile = with_strategy(profile, i, report.best_alternative)
                traj.profiles.append(profile)
                traj.steps.append((rnd, i))
                moved = True
        traj.rounds = rnd
        if not moved:
            traj.converged = True
            break
    return traj


@dataclass(frozen=True)
class ContinuousDistribution:
    """Mixed strategy over ``[lo, hi]`` given by its CDF and quantile function.

    Both callables accept scalars or numpy arrays.
    """

    lo: float
    hi: float
    cdf: Callable[[Any], Any]
    quantile: Callable[[Any], Any]
    label: str = ""


def point_mass(x: float) -> ContinuousDistribution:
    x = float(x)
    return ContinuousDistribution(
        lo=x,
        hi=x,
        cdf=lambda s: np.where(np.asarray(s) >= x, 1.0, 0.0)[()],
        quantile=lambda u: np.full_like(np.asarray(u, dtype=np.float64), x)[()],
        label=f"point({x:g})",
    )


def uniform(lo: float, hi: float) -> ContinuousDistribution:
    lo, hi = float(lo), float(hi)
    if not hi > lo:
        raise ValueError("uniform needs hi > lo")
    width = hi - lo
    return ContinuousDistribution(
        lo=lo,
        hi=hi,
        cdf=lambda s: np.clip((np.asarray(s, dtype=np.float64) - lo) / width, 0.0, 1.0)[()],
        quantile=lambda u: (lo + width * np.asarray(u, dtype=np.float64))[()],
        label=f"uniform({lo:g},{hi:g})",
    )


def inverse_transform_sample(dist: ContinuousDistribution, u):
    """Map uniform(s) ``u`` in [0, 1] through the distribution's quantile function."""
    arr = np.asarray(u, dtype=np.float64)
    if np.any(~((arr >= 0.0) & (arr <= 1.0))):
        raise ValueError("u must lie in [0, 1]")
    out = np.clip(np.asarray(dist.quantile(arr), dtype=np.float64), dist.lo, dist.hi)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: float
    std_error: float
    samples: int
    seed: int


_U53 = 2.0**-53


def _uniform_block(seed: int, start: int, count: int, n: int) -> np.ndarray:
    # Counter-based layout: sample k owns Philox blocks [k*b, (k+1)*b), so any
    # chunking of the sample range reproduces the same uniforms.
    blocks = -(-n // 4)
    bg = np.random.Philox(key=seed)
    bg.advance(start * blocks)
    raw = bg.random_raw(count * blocks * 4).reshape(count, blocks * 4)[:, :n]
    return (raw >> np.uint64(11)).astype(np.float64) * _U53


def mc_expected_utility(
    game: Game,
    mixed: Sequence[ContinuousDistribution],
    i: int,
    samples: int,
    seed: int,
    chunk_size: int = 1 << 16,
    workers: int = 1,
) -> MonteCarloEstimate:
    """Monte Carlo estimate of player i's expected utility under independent mixed strategies.

    Deterministic in ``(seed, samples)``; ``chunk_size`` and ``workers`` only
    change how the work is split.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    n = game.n_players
    if len(mixed) != n:
        raise ValueError(f"need {n} distributions, got {len(mixed)}")
    for j, dist in enumerate(mixed):
        bounds = game.strategy_bounds(j)
        if bounds is None:
            raise ValueError("game has no continuous strategy space")
        if dist.lo < bounds[0] or dist.hi > bounds[1]:
            raise ValueError(
                f"support [{dist.lo}, {dist.hi}] of player {j} outside strategy space {bounds}"
            )

    def run_chunk(start: int) -> np.ndarray:
        count = min(chunk_size, samples - start)
        u = _uniform_block(seed, start, count, n)
        draws = np.empty_like(u)
        for j, dist in enumerate(mixed):
            draws[:, j] = inverse_transform_sample(dist, u[:, j])
        return np.asarray(game.batch_utility(draws, i), dtype=np.float64)

    starts = range(0, samples, chunk_size)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run_chunk, starts))
    else:
        parts = [run_chunk(s) for s in starts]
    values = np.concatenate(parts)
    if np.all(values == values[0]):
        mean = float(values[0])
        std_error = 0.0
    else:
        mean = float(np.mean(values))
        std_error = float(np.std(values, ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return MonteCarloEstimate(mean=mean, std_error=std_error, samples=samples, seed=seed)
