"""Nash and epsilon-equilibrium analysis for three networked-system games.

``security``: security-level choice under a first-stage DDoS attacker.
``tcp``: TCP SACK additive-increase competition.
``netform``: directed network formation with distance, transit and link costs.
"""
from .core import (
    NEG_INF,
    ContinuousDistribution,
    DeviationReport,
    EquilibriumVerdict,
    Game,
    MonteCarloEstimate,
    Trajectory,
    best_deviation_gain,
    best_response_dynamics,
    check_epsilon_equilibrium,
    inverse_transform_sample,
    mc_expected_utility,
    point_mass,
    uniform,
)
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "NEG_INF",
    "ContinuousDistribution",
    "DeviationReport",
    "EquilibriumVerdict",
    "Game",
    "MonteCarloEstimate",
    "Trajectory",
    "best_deviation_gain",
    "best_response_dynamics",
    "check_epsilon_equilibrium",
    "inverse_transform_sample",
    "mc_expected_utility",
    "point_mass",
    "uniform",
]
