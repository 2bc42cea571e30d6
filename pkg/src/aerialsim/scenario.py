"""Scenario driver: outer control loop, metrics, and output files."""

import csv
import dataclasses
import math
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
import yaml

from .channel import AtgEnvironment, RadioParams
from .deployment import (DEFAULT_ANTENNA_HEIGHT, DEFAULT_GROUND_TX_DBM,
                         PlacementGrid, drop_users_ppp, grid_index_to_position,
                         hex_layout)
from .geometry import ConfigurationError, Position3D, ServiceArea, square_area
from .mobility import MobilityParams, init_users, step
from .placement import (LearningConfig, QTable, learn_placement, load_qtable,
                        save_qtable)
from .radio import (DEFAULT_AERIAL_TX_DBM, NetworkState, aggregate_qos,
                    link_report, throughput)

BASELINE_GROUND = "ground19"
BASELINE_AERIAL = "aerial18plus1"

OUT_DIR_ENV_VAR = "AERIALSIM_OUT_DIR"


@dataclass(frozen=True)
class GridSpec:
    n_x: int = 21
    n_y: int = 21
    n_h: int = 11


@dataclass(frozen=True)
class ScenarioConfig:
    seed: int = 0
    n_users: int = 150
    n_rings: int = 2
    area_side: float = 2000.0          # meters; square service area
    h_min: float = 25.0
    h_max: float = 525.0
    antenna_height: float = DEFAULT_ANTENNA_HEIGHT
    ground_tx_power: float = DEFAULT_GROUND_TX_DBM
    aerial_tx_power: float = DEFAULT_AERIAL_TX_DBM
    grid: GridSpec = field(default_factory=GridSpec)
    env: AtgEnvironment = field(default_factory=AtgEnvironment)
    radio: RadioParams = field(default_factory=RadioParams)
    mobility: MobilityParams = field(default_factory=MobilityParams)
    learning: LearningConfig = field(default_factory=LearningConfig)
    t_min: float = 10.0                # aerial dwell / slot length, s
    mobility_dt: float = 1.0
    sim_duration: float = 300.0
    baseline_mode: str = BASELINE_AERIAL
    disabled_bs: Optional[int] = None  # defaults to the center site (id 0)
    qtable_path: Optional[str] = None  # warm-start persistence across runs

    def __post_init__(self):
        if self.baseline_mode not in (BASELINE_GROUND, BASELINE_AERIAL):
            raise ConfigurationError(f"unknown baseline_mode {self.baseline_mode!r}")
        if self.t_min <= 0 or self.sim_duration < self.t_min:
            raise ConfigurationError("need 0 < t_min <= sim_duration")
        if self.n_users < 0:
            raise ConfigurationError("n_users must be >= 0")

    def service_area(self) -> ServiceArea:
        return square_area(self.area_side, self.h_min, self.h_max)

    def placement_grid(self) -> PlacementGrid:
        return PlacementGrid(self.service_area(), self.grid.n_x, self.grid.n_y,
                             self.grid.n_h)


@dataclass(frozen=True)
class TimeSlotRecord:
    t: float
    qos: float
    qos_th: float
    aerial_pos: Optional[Position3D]
    user_sinr: np.ndarray  # linear, per user
    learning_triggered: bool
    episodes_used: int


@dataclass
class ScenarioRun:
    records: List[TimeSlotRecord]
    reward_traces: List[np.ndarray]
    qtable: Optional[QTable]


def run_scenario(cfg: ScenarioConfig) -> ScenarioRun:
    """Execute one scenario: threshold snapshot, then slot-by-slot control loop."""
    area = cfg.service_area()
    grid = cfg.placement_grid()
    streams = np.random.SeedSequence(cfg.seed).spawn(3)
    rng_drop = np.random.default_rng(streams[0])
    rng_mob = np.random.default_rng(streams[1])
    rng_learn = np.random.default_rng(streams[2])

    bss = hex_layout(cfg.n_rings, area, cfg.antenna_height, cfg.ground_tx_power)
    users = init_users(drop_users_ppp(cfg.n_users, area, rng_drop),
                       cfg.mobility, rng_mob)

    def make_state(users_now, ground, aerial_state):
        aerial_pos = (grid_index_to_position(grid, aerial_state)
                      if aerial_state is not None else None)
        return NetworkState(ground_bs=ground, users=users_now, env=cfg.env,
                            radio=cfg.radio, aerial_pos=aerial_pos,
                            aerial_tx_power=cfg.aerial_tx_power)

    # Threshold snapshot: full ground network, no aerial.
    th_state = make_state(users, bss, None)
    qos_th = aggregate_qos(th_state)
    rep0 = link_report(th_state) if users else None
    records = [TimeSlotRecord(t=0.0, qos=qos_th, qos_th=qos_th, aerial_pos=None,
                              user_sinr=rep0.sinr if rep0 else np.empty(0),
                              learning_triggered=False, episodes_used=0)]
    traces: List[np.ndarray] = []

    aerial_mode = cfg.baseline_mode == BASELINE_AERIAL
    if aerial_mode:
        off = cfg.disabled_bs if cfg.disabled_bs is not None else 0
        if off not in {b.id for b in bss}:
            raise ConfigurationError(f"disabled_bs {off} is not a ground BS id")
        ground = [replace(b, active=False) if b.id == off else b for b in bss]
        aerial_state: Optional[int] = grid.center_state()
        if cfg.qtable_path and Path(cfg.qtable_path).exists():
            qtable = load_qtable(cfg.qtable_path)
            if qtable.values.shape[0] != grid.n_states:
                raise ConfigurationError("persisted Q-table does not match the grid")
        else:
            qtable = QTable.zeros(grid.n_states)
    else:
        ground = bss
        aerial_state = None
        qtable = None

    n_slots = int(math.floor(cfg.sim_duration / cfg.t_min))
    for k in range(1, n_slots + 1):
        remaining = cfg.t_min
        while remaining > 1e-9:
            dt = min(cfg.mobility_dt, remaining)
            users = step(users, dt, cfg.mobility, area, rng_mob)
            remaining -= dt

        state = make_state(users, ground, aerial_state)
        qos_now = aggregate_qos(state)
        triggered = False
        episodes = 0
        if aerial_mode and qos_now < qos_th:
            result = learn_placement(aerial_state, state, qtable, cfg.learning,
                                     grid, rng_learn)
            aerial_state = result.best_state
            qtable = result.qtable
            traces.append(result.rewards)
            triggered = True
            episodes = cfg.learning.max_episodes
            state = make_state(users, ground, aerial_state)
            qos_now = aggregate_qos(state)

        rep = link_report(state) if users else None
        records.append(TimeSlotRecord(
            t=k * cfg.t_min, qos=qos_now, qos_th=qos_th,
            aerial_pos=state.aerial_pos,
            user_sinr=rep.sinr if rep else np.empty(0),
            learning_triggered=triggered, episodes_used=episodes))

    if aerial_mode and cfg.qtable_path:
        save_qtable(cfg.qtable_path, qtable)
    return ScenarioRun(records=records, reward_traces=traces, qtable=qtable)


# ---------------------------------------------------------------------------
# Metrics


def per_user_mean_sinr_db(records: Sequence[TimeSlotRecord]) -> np.ndarray:
    """Time-averaged linear SINR per user, in dB."""
    slots = [r.user_sinr for r in records if r.user_sinr.size]
    if not slots:
        return np.empty(0)
    mean_lin = np.mean(np.vstack(slots), axis=0)
    return 10.0 * np.log10(mean_lin)


def sinr_cdf(records: Sequence[TimeSlotRecord]) -> Tuple[np.ndarray, np.ndarray]:
    """Empirical CDF of per-user time-averaged SINR on a 0.1 dB grid."""
    if not records:
        raise ValueError("no records")
    vals = np.sort(per_user_mean_sinr_db(records))
    if vals.size == 0:
        return np.empty(0), np.empty(0)
    lo = math.floor(vals[0] * 10.0) / 10.0
    hi = math.ceil(vals[-1] * 10.0) / 10.0
    xs = np.round(np.arange(lo, hi + 0.05, 0.1), 1)
    cdf = np.searchsorted(vals, xs, side="right") / vals.size
    return xs, cdf


def spectral_efficiency_summary(records: Sequence[TimeSlotRecord]) -> float:
    """Mean per-user spectral efficiency over users and slots (bits/s/Hz)."""
    if not records:
        raise ValueError("no records")
    per_slot = [throughput(r.user_sinr) for r in records if r.user_sinr.size]
    if not per_slot:
        return 0.0
    return float(np.mean(np.concatenate(per_slot)))


# ---------------------------------------------------------------------------
# Output files


def _fmt(x: float) -> str:
    return repr(float(x))


def emit_outputs(records: Sequence[TimeSlotRecord],
                 reward_traces: Sequence[np.ndarray], out_dir,
                 config: Optional[ScenarioConfig] = None) -> List[Path]:
    """Write timeslots.csv, sinr_cdf.csv, reward_trace.csv, and summary.yaml.

    Outputs are a pure function of the inputs (no timestamps), so a repeated
    run with the same seed and config is byte-identical.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        paths = []

        p = out / "timeslots.csv"
        with open(p, "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["t", "qos", "qos_th", "aerial_x", "aerial_y", "aerial_h",
                        "triggered"])
            for r in records:
                ap = r.aerial_pos
                w.writerow([_fmt(r.t), _fmt(r.qos), _fmt(r.qos_th),
                            _fmt(ap.x) if ap else "", _fmt(ap.y) if ap else "",
                            _fmt(ap.h) if ap else "", int(r.learning_triggered)])
        paths.append(p)

        p = out / "sinr_cdf.csv"
        with open(p, "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["sinr_db", "cdf"])
            if records:
                xs, cdf = sinr_cdf(records)
                for x, c in zip(xs, cdf):
                    w.writerow([f"{x:.1f}", _fmt(c)])
        paths.append(p)

        p = out / "reward_trace.csv"
        with open(p, "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["iteration", "reward"])
            i = 0
            for trace in reward_traces:
                for r in trace:
                    w.writerow([i, _fmt(r)])
                    i += 1
        paths.append(p)

        p = out / "summary.yaml"
        summary = {
            "config": config_to_dict(config) if config else None,
            "seed": config.seed if config else None,
            "n_slots": len(records),
            "learning_runs": len(reward_traces),
            "qos_th": float(records[0].qos_th) if records else None,
            "qos_mean": float(np.mean([r.qos for r in records])) if records else None,
            "qos_final": float(records[-1].qos) if records else None,
            "spectral_efficiency_mean":
                spectral_efficiency_summary(records) if records else None,
        }
        with open(p, "w", encoding="utf-8", newline="\n") as f:
            yaml.safe_dump(summary, f, sort_keys=True)
        paths.append(p)
        return paths
    except OSError as e:
        raise OSError(f"failed writing outputs under {out}: {e}") from e


# ---------------------------------------------------------------------------
# Config serialization and presets


def config_to_dict(cfg: ScenarioConfig) -> dict:
    return dataclasses.asdict(cfg)


def _merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


_NESTED_TYPES = {
    "grid": GridSpec,
    "env": AtgEnvironment,
    "radio": RadioParams,
    "mobility": MobilityParams,
    "learning": LearningConfig,
}


def config_from_dict(d: dict) -> ScenarioConfig:
    known = {f.name for f in dataclasses.fields(ScenarioConfig)}
    unknown = set(d) - known
    if unknown:
        raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
    kwargs = {}
    for k, v in d.items():
        if k in _NESTED_TYPES and isinstance(v, dict):
            kwargs[k] = _NESTED_TYPES[k](**v)
        else:
            kwargs[k] = v
    return ScenarioConfig(**kwargs)


PRESETS = {
    # Full-size setup: 19 ground sites, 4 km^2, 21x21x11 placement grid.
    "paper": {
        "n_users": 150,
        "n_rings": 2,
        "grid": {"n_x": 21, "n_y": 21, "n_h": 11},
        "learning": {"max_episodes": 5000, "max_steps": 40},
        "sim_duration": 300.0,
    },
    # Small setup sized for fast verification runs.
    "desk": {
        "n_users": 100,
        "n_rings": 1,
        "grid": {"n_x": 5, "n_y": 5, "n_h": 3},
        "learning": {"max_episodes": 600, "max_steps": 30},
        "sim_duration": 300.0,
    },
}


def build_config(preset: Optional[str] = None, config_file=None,
                 overrides: Optional[dict] = None) -> ScenarioConfig:
    """Layer preset < config file < explicit overrides into a ScenarioConfig."""
    d: dict = {}
    if preset:
        if preset not in PRESETS:
            raise ConfigurationError(f"unknown preset {preset!r}")
        d = _merge(d, PRESETS[preset])
    if config_file:
        with open(config_file, "r", encoding="utf-8") as f:
            loaded = yaml.safe_load(f) or {}
        if not isinstance(loaded, dict):
            raise ConfigurationError("config file must be a mapping")
        d = _merge(d, loaded)
    if overrides:
        d = _merge(d, overrides)
    return config_from_dict(d)


def default_out_dir() -> Path:
    return Path(os.environ.get(OUT_DIR_ENV_VAR, "out"))
