"""JSON-configured experiments writing CSV tables.

Exit codes: 0 when the check passed or the analysis is descriptive, 1 when an
equilibrium check failed, 2 for configuration errors (raised as
:class:`ConfigError` and mapped by the CLI).
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .core import best_response_dynamics, check_epsilon_equilibrium, mc_expected_utility, point_mass
from .netform import NetFormGame, NetFormParams, Topology, epsilon_band_scan, make_topology, read_topology
from .security import (
    SecurityGame,
    SecurityParams,
    enumerate_grid_nash,
    expected_utility_closed_form,
    security_distribution,
)
from .tcp import TcpGame, TcpParams, tcp_escalation

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "parse_config", "run", "fmt", "csv_text"]

GAMES = ("security", "tcp", "netform")
ANALYSES = {
    "security": ("pure_nash", "epsilon_check", "mixed_mc", "br_dynamics"),
    "tcp": ("epsilon_check", "br_dynamics", "escalation"),
    "netform": ("epsilon_check", "band_scan", "br_dynamics"),
}
PARAM_KEYS = {
    "security": ({"n", "P"}, set()),
    "tcp": ({"n", "c", "K"}, {"alpha_max"}),
    "netform": ({"n"}, {"s", "l", "r", "m"}),
}
TOP_KEYS = {
    "game", "params", "analysis", "epsilon", "grid_step", "samples", "seed",
    "deviation_mode", "output_path", "profile", "topology", "m_grid", "rounds",
    "s_values", "order",
}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    game: str
    params: dict
    analysis: str
    epsilon: float = 0.0
    grid_step: float | None = None
    samples: int = 100_000
    seed: int = 0
    deviation_mode: str = "single_link"
    output_path: str | None = None
    profile: list | None = None
    topology: dict | None = None
    m_grid: Any = None
    rounds: int = 10
    s_values: list | None = None
    order: str = "round-robin"
    base_dir: Path = Path(".")


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigError(msg)


def parse_config(doc: dict, base_dir: Path | str = ".") -> ExperimentConfig:
    _need(isinstance(doc, dict), "config must be a JSON object")
    unknown = set(doc) - TOP_KEYS
    _need(not unknown, f"unknown config keys: {', '.join(sorted(unknown))}")
    for key in ("game", "params", "analysis"):
        _need(key in doc, f"missing required key {key!r}")
    game = doc["game"]
    _need(game in GAMES, f"game must be one of {GAMES}")
    analysis = doc["analysis"]
    _need(analysis in ANALYSES[game], f"analysis {analysis!r} not available for game {game!r}")
    params = doc["params"]
    _need(isinstance(params, dict), "params must be an object")
    required, optional = PARAM_KEYS[game]
    _need(required <= set(params), f"{game} params need {sorted(required)}")
    extra = set(params) - required - optional
    _need(not extra, f"unknown {game} params: {', '.join(sorted(extra))}")
    cfg = ExperimentConfig(game=game, params=params, analysis=analysis, base_dir=Path(base_dir))
    if "epsilon" in doc:
        cfg.epsilon = float(doc["epsilon"])
        _need(cfg.epsilon >= 0, "epsilon must be >= 0")
    if "grid_step" in doc:
        cfg.grid_step = float(doc["grid_step"])
        _need(cfg.grid_step > 0, "grid_step must be > 0")
    if "samples" in doc:
        _need(isinstance(doc["samples"], int) and doc["samples"] > 0, "samples must be a positive integer")
        cfg.samples = doc["samples"]
    if "seed" in doc:
        _need(isinstance(doc["seed"], int) and 0 <= doc["seed"] < 2**64, "seed must be a u64 integer")
        cfg.seed = doc["seed"]
    if "deviation_mode" in doc:
        _need(game == "netform", "deviation_mode applies to netform only")
        _need(doc["deviation_mode"] in ("single_link", "full_subset"), "deviation_mode must be single_link or full_subset")
        cfg.deviation_mode = doc["deviation_mode"]
    if "rounds" in doc:
        _need(isinstance(doc["rounds"], int) and doc["rounds"] >= 1, "rounds must be an integer >= 1")
        cfg.rounds = doc["rounds"]
    if "order" in doc:
        _need(doc["order"] in ("round-robin", "random"), "order must be round-robin or random")
        cfg.order = doc["order"]
    if "output_path" in doc:
        cfg.output_path = str(doc["output_path"])
    if "profile" in doc:
        _need(game != "netform", "netform uses 'topology', not 'profile'")
        _need(isinstance(doc["profile"], list), "profile must be a list")
        cfg.profile = [float(x) for x in doc["profile"]]
    if "topology" in doc:
        _need(game == "netform", "topology applies to netform only")
        _need(isinstance(doc["topology"], dict), "topology must be an object")
        cfg.topology = doc["topology"]
    if "m_grid" in doc:
        _need(analysis == "band_scan", "m_grid applies to band_scan only")
        cfg.m_grid = doc["m_grid"]
    if "s_values" in doc:
        _need(analysis == "mixed_mc", "s_values applies to mixed_mc only")
        cfg.s_values = [float(x) for x in doc["s_values"]]
    if game == "netform":
        _need(cfg.topology is not None, "netform analyses need a 'topology'")
    return cfg


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from None
    return parse_config(doc, base_dir=path.parent)


def fmt(value: Any) -> str:
    """CSV cell text: 12 significant digits, ``-inf``/``inf`` tokens, lowercase booleans."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isinf(v):
            return "-inf" if v < 0 else "inf"
        if v == 0:
            return "0"
        return format(v, ".12g")
    if isinstance(value, (frozenset, set)):
        return ";".join(str(j) for j in sorted(value))
    if isinstance(value, (tuple, list)):
        return ",".join(fmt(x) for x in value)
    return str(value)


def csv_text(header: list[str], rows: list[list[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()


def _security(cfg: ExperimentConfig) -> SecurityParams:
    try:
        return SecurityParams(n=int(cfg.params["n"]), P=float(cfg.params["P"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _tcp(cfg: ExperimentConfig) -> TcpParams:
    p = cfg.params
    try:
        return TcpParams(n=int(p["n"]), c=float(p["c"]), K=float(p["K"]),
                         alpha_max=float(p.get("alpha_max", 1e6)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _netform(cfg: ExperimentConfig) -> tuple[int, NetFormParams, Topology]:
    p = cfg.params
    n = int(p["n"])
    try:
        params = NetFormParams(**{k: float(p[k]) for k in ("s", "l", "r", "m") if k in p})
        tcfg = dict(cfg.topology)
        if "path" in tcfg:
            _need(set(tcfg) == {"path"}, "topology file entry takes only 'path'")
            path = Path(tcfg["path"])
            topo = read_topology(path if path.is_absolute() else cfg.base_dir / path)
        else:
            _need("kind" in tcfg, "topology needs 'kind' or 'path'")
            _need(set(tcfg) <= {"kind", "p", "seed"}, "topology keys are kind, p, seed")
            topo = make_topology(tcfg["kind"], n, p=tcfg.get("p"), seed=tcfg.get("seed"))
    except OSError as exc:
        raise ConfigError(f"cannot read topology: {exc}") from None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    _need(topo.n == n, f"topology has {topo.n} nodes, params say n={n}")
    return n, params, topo


def _profile(cfg: ExperimentConfig, n: int, default: float) -> tuple:
    if cfg.profile is None:
        return (default,) * n
    _need(len(cfg.profile) == n, f"profile needs {n} entries")
    return tuple(cfg.profile)


def _verdict_rows(verdict) -> list[list[Any]]:
    return [[r.player, r.best_alternative, r.gain, verdict.epsilon, r.gain <= verdict.epsilon]
            for r in verdict.per_player]


def _trajectory_rows(game, traj) -> list[list[Any]]:
    rows = []
    for k, prof in enumerate(traj.profiles):
        rnd = 0 if k == 0 else traj.steps[k - 1][0]
        for i in range(game.n_players):
            rows.append([rnd, i, prof[i], game.utility(prof, i)])
    return rows


def execute(cfg: ExperimentConfig) -> tuple[int, str]:
    """Run the analysis; returns (exit code, CSV text)."""
    g, a = cfg.game, cfg.analysis
    verdict_header = ["player", "best_alternative", "gain", "epsilon", "passed"]
    traj_header = ["round", "player", "strategy", "utility"]
    try:
        if g == "security":
            params = _security(cfg)
            game = SecurityGame(params, cfg.grid_step)
            if a == "pure_nash":
                found = enumerate_grid_nash(params, game.step)
                return 0, csv_text(["levels"], [[prof] for prof in found])
            if a == "epsilon_check":
                v = check_epsilon_equilibrium(game, _profile(cfg, params.n, params.P), cfg.epsilon)
                return (0 if v.passed else 1), csv_text(verdict_header, _verdict_rows(v))
            if a == "mixed_mc":
                P = params.P
                s_values = cfg.s_values or [0.0, P / 4, P / 2, 3 * P / 4, P]
                dist = security_distribution(params)
                rows = []
                for s in s_values:
                    mixed = [point_mass(s)] + [dist] * (params.n - 1)
                    est = mc_expected_utility(game, mixed, 0, cfg.samples, cfg.seed)
                    rows.append([s, expected_utility_closed_form(s, params), est.mean, est.std_error, est.samples])
                return 0, csv_text(["s", "eu_closed", "eu_mc", "std_err", "samples"], rows)
            traj = best_response_dynamics(game, _profile(cfg, params.n, 0.0), cfg.rounds, cfg.order, cfg.seed)
            return 0, csv_text(traj_header, _trajectory_rows(game, traj))
        if g == "tcp":
            params = _tcp(cfg)
            if a == "epsilon_check":
                game = TcpGame(params, cfg.grid_step, mode="bounded")
                v = check_epsilon_equilibrium(game, _profile(cfg, params.n, 1.0), cfg.epsilon)
                return (0 if v.passed else 1), csv_text(verdict_header, _verdict_rows(v))
            if a == "escalation":
                traj = tcp_escalation(params, cfg.rounds, cfg.profile, cfg.grid_step)
                return 0, csv_text(traj_header, _trajectory_rows(TcpGame(params), traj))
            game = TcpGame(params, cfg.grid_step, mode="probe")
            traj = best_response_dynamics(game, _profile(cfg, params.n, 1.0), cfg.rounds, cfg.order, cfg.seed)
            return 0, csv_text(traj_header, _trajectory_rows(game, traj))
        n, params, topo = _netform(cfg)
        mode = cfg.deviation_mode
        if a == "epsilon_check":
            v = check_epsilon_equilibrium(NetFormGame(n, params, mode), topo.as_profile(), cfg.epsilon)
            return (0 if v.passed else 1), csv_text(verdict_header, _verdict_rows(v))
        if a == "band_scan":
            rows = epsilon_band_scan(topo, params, cfg.epsilon, _m_grid(cfg, params, n), mode)
            code = 0 if all(r.passed for r in rows) else 1
            return code, csv_text(["m", "max_gain", "passed"], [[r.m, r.max_gain, r.passed] for r in rows])
        game = NetFormGame(n, params, mode)
        traj = best_response_dynamics(game, topo.as_profile(), cfg.rounds, cfg.order, cfg.seed)
        return 0, csv_text(traj_header, _trajectory_rows(game, traj))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _m_grid(cfg: ExperimentConfig, params: NetFormParams, n: int) -> list[float]:
    grid = cfg.m_grid
    if grid is None:
        centre = params.l / n
        return np.linspace(centre - cfg.epsilon, centre + cfg.epsilon, 11).tolist()
    if isinstance(grid, list):
        _need(len(grid) > 0, "m_grid must be nonempty")
        return [float(x) for x in grid]
    _need(isinstance(grid, dict) and set(grid) == {"lo", "hi", "points"},
          "m_grid must be a list or {lo, hi, points}")
    _need(int(grid["points"]) >= 1, "m_grid points must be >= 1")
    return np.linspace(float(grid["lo"]), float(grid["hi"]), int(grid["points"])).tolist()


def run(cfg: ExperimentConfig, out: str | Path | None = None) -> int:
    """Execute ``cfg`` and write its CSV to ``out`` (or the config's output_path)."""
    target = out if out is not None else cfg.output_path
    _need(target is not None, "no output path: set output_path or pass --out")
    code, text = execute(cfg)
    target = Path(target)
    if not target.is_absolute() and out is None:
        target = cfg.base_dir / target
    target.parent.mkdir(parents=True, exist_ok=True)
    with open(target, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return code
