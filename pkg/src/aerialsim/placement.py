"""Tabular Q-learning placement of the aerial station on the 3D grid."""

from dataclasses import dataclass, field, replace
from enum import IntEnum
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .deployment import PlacementGrid, grid_index_to_position
from .geometry import ConfigurationError
from .radio import NetworkState, aggregate_qos

N_ACTIONS = 6

QTABLE_FORMAT_VERSION = 1


class Action(IntEnum):
    """Six unit moves on the grid; enum order is also the greedy tie-break order."""

    PLUS_X = 0
    MINUS_X = 1
    PLUS_Y = 2
    MINUS_Y = 3
    PLUS_H = 4
    MINUS_H = 5


_ACTION_DELTAS = {
    Action.PLUS_X: (1, 0, 0),
    Action.MINUS_X: (-1, 0, 0),
    Action.PLUS_Y: (0, 1, 0),
    Action.MINUS_Y: (0, -1, 0),
    Action.PLUS_H: (0, 0, 1),
    Action.MINUS_H: (0, 0, -1),
}


@dataclass
class QTable:
    values: np.ndarray        # (n_states, 6)
    visit_counts: np.ndarray  # (n_states, 6), int64
    gamma: float = 0.9
    epsilon: float = 0.9
    alpha_mode: str = "inverse_visits"  # inverse_visits | constant
    alpha: float = 0.5                  # used in constant mode
    literal_update: bool = False        # printed-form update without the Q(s,a) base

    @classmethod
    def zeros(cls, n_states: int, **kwargs) -> "QTable":
        return cls(values=np.zeros((n_states, N_ACTIONS)),
                   visit_counts=np.zeros((n_states, N_ACTIONS), dtype=np.int64),
                   **kwargs)

    def copy(self) -> "QTable":
        return replace(self, values=self.values.copy(),
                       visit_counts=self.visit_counts.copy())


@dataclass(frozen=True)
class LearningConfig:
    max_episodes: int = 2500
    max_steps: int = 30
    epsilon_decay: float = 0.998   # multiplier per episode
    epsilon_floor: float = 0.02
    # "chain": each episode starts where the previous one ended (the agent's
    # latest virtual position); "fixed": always restart from the physical one.
    episode_start: str = "chain"

    def __post_init__(self):
        if self.max_episodes <= 0 or self.max_steps <= 0:
            raise ConfigurationError("episode/step counts must be positive")
        if not 0 < self.epsilon_decay <= 1:
            raise ConfigurationError("epsilon_decay must be in (0, 1]")
        if self.episode_start not in ("chain", "fixed"):
            raise ConfigurationError(f"unknown episode_start {self.episode_start!r}")


def apply_action(s: int, a: Action, grid: PlacementGrid) -> int:
    """Neighbor state one step along the action axis; clamps at grid edges."""
    ix, iy, ih = grid.unravel(s)
    dx, dy, dh = _ACTION_DELTAS[Action(a)]
    nx, ny, nh = ix + dx, iy + dy, ih + dh
    if not (0 <= nx < grid.n_x and 0 <= ny < grid.n_y and 0 <= nh < grid.n_h):
        return s
    return grid.ravel(nx, ny, nh)


def reward(qos_t: float, qos_prev: float) -> float:
    return qos_t - qos_prev


def q_update(q: QTable, s: int, a: int, r: float, s_next: int) -> QTable:
    """One temporal-difference backup; increments the (s, a) visit count."""
    q.visit_counts[s, a] += 1
    if q.alpha_mode == "inverse_visits":
        alpha = 1.0 / q.visit_counts[s, a]
    elif q.alpha_mode == "constant":
        alpha = q.alpha
    else:
        raise ConfigurationError(f"unknown alpha_mode {q.alpha_mode!r}")
    target_err = r + q.gamma * np.max(q.values[s_next]) - q.values[s, a]
    if q.literal_update:
        q.values[s, a] = alpha * target_err
    else:
        q.values[s, a] += alpha * target_err
    return q


def select_action(q: QTable, s: int, epsilon: float,
                  rng: np.random.Generator) -> Action:
    """Epsilon-greedy; greedy ties resolve in fixed Action order."""
    if rng.random() < epsilon:
        return Action(int(rng.integers(N_ACTIONS)))
    return Action(int(np.argmax(q.values[s])))


def greedy_rollout(q: QTable, s: int, grid: PlacementGrid,
                   max_steps: Optional[int] = None) -> int:
    """Follow the greedy policy from s; stops on a clamp or a revisit.

    On a revisit (greedy cycle) the cycle member with the higher greedy value
    is returned, so the rollout terminal is well defined.
    """
    if max_steps is None:
        max_steps = grid.n_x + grid.n_y + grid.n_h
    seen = {s}
    for _ in range(max_steps):
        a = Action(int(np.argmax(q.values[s])))
        s_next = apply_action(s, a, grid)
        if s_next == s:
            break
        if s_next in seen:
            if np.max(q.values[s_next]) > np.max(q.values[s]):
                s = s_next
            break
        seen.add(s_next)
        s = s_next
    return s


def make_qos_table(snapshot: NetworkState, grid: PlacementGrid) -> Callable[[int], float]:
    """Memoized QoS(state): aggregate QoS with the aerial at that grid point.

    The cache stores plain aggregate_qos outputs, so cached reads are
    bit-identical to recomputation.
    """
    cache: Dict[int, float] = {}

    def qos(s: int) -> float:
        if s not in cache:
            st = replace(snapshot, aerial_pos=grid_index_to_position(grid, s))
            cache[s] = aggregate_qos(st)
        return cache[s]

    return qos


@dataclass
class LearnResult:
    best_state: int
    qtable: QTable
    rewards: np.ndarray            # one entry per learning step (Fig.-7 style trace)
    episode_greedy_qos: np.ndarray  # greedy-rollout terminal QoS after each episode

    def episodes_to_reach(self, qos_target: float) -> Optional[int]:
        """First episode (1-based) whose greedy rollout attains qos_target."""
        hits = np.nonzero(self.episode_greedy_qos >= qos_target)[0]
        return int(hits[0]) + 1 if hits.size else None


def learn_placement(initial_state: int, snapshot: NetworkState, q: QTable,
                    cfg: LearningConfig, grid: PlacementGrid,
                    rng: np.random.Generator) -> LearnResult:
    """Run the episodic act/reward/update loop on a frozen user snapshot."""
    if grid.n_states < 1:
        raise ConfigurationError("placement grid is empty")
    grid.unravel(initial_state)  # validates

    qos = make_qos_table(snapshot, grid)
    rewards: List[float] = []
    episode_qos = np.empty(cfg.max_episodes)
    epsilon = q.epsilon
    s = initial_state
    for ep in range(cfg.max_episodes):
        if cfg.episode_start == "fixed":
            s = initial_state
        qos_s = qos(s)
        for _ in range(cfg.max_steps):
            a = select_action(q, s, epsilon, rng)
            s_next = apply_action(s, a, grid)
            qos_next = qos(s_next)
            r = reward(qos_next, qos_s)
            q_update(q, s, a, r, s_next)
            rewards.append(r)
            s, qos_s = s_next, qos_next
        epsilon = max(cfg.epsilon_floor, epsilon * cfg.epsilon_decay)
        episode_qos[ep] = qos(greedy_rollout(q, initial_state, grid))

    best = greedy_rollout(q, initial_state, grid)
    return LearnResult(best_state=best, qtable=q,
                       rewards=np.array(rewards), episode_greedy_qos=episode_qos)


def save_qtable(path, q: QTable) -> None:
    """Persist a Q-table (versioned .npz) for warm starts across processes."""
    np.savez(path, format_version=QTABLE_FORMAT_VERSION, values=q.values,
             visit_counts=q.visit_counts, gamma=q.gamma, epsilon=q.epsilon,
             alpha_mode=q.alpha_mode, alpha=q.alpha,
             literal_update=q.literal_update)


def load_qtable(path) -> QTable:
    with np.load(path, allow_pickle=False) as f:
        version = int(f["format_version"])
        if version != QTABLE_FORMAT_VERSION:
            raise ConfigurationError(f"unsupported Q-table format version {version}")
        return QTable(values=f["values"], visit_counts=f["visit_counts"],
                      gamma=float(f["gamma"]), epsilon=float(f["epsilon"]),
                      alpha_mode=str(f["alpha_mode"]), alpha=float(f["alpha"]),
                      literal_update=bool(f["literal_update"]))
