"""Exhaustive-search ground truth for the placement objective."""

import csv
from dataclasses import dataclass, replace

import numpy as np

from .deployment import PlacementGrid, grid_index_to_position
from .geometry import ConfigurationError
from .radio import NetworkState, aggregate_qos


@dataclass(frozen=True)
class OracleResult:
    best_state: int
    best_qos: float
    qos_per_state: np.ndarray


def exhaustive_search(snapshot: NetworkState, grid: PlacementGrid) -> OracleResult:
    """Evaluate the aggregate QoS at every grid state and return the maximizer.

    Deliberately naive: each state is an independent aggregate_qos call with
    a fresh max-SINR association, no incremental shortcuts. Ties go to the
    lowest state index.
    """
    if grid.n_states < 1:
        raise ConfigurationError("placement grid is empty")
    qos = np.empty(grid.n_states)
    for s in range(grid.n_states):
        state = replace(snapshot, aerial_pos=grid_index_to_position(grid, s))
        qos[s] = aggregate_qos(state)
    best = int(np.argmax(qos))  # first maximum = lowest index on ties
    return OracleResult(best_state=best, best_qos=float(qos[best]), qos_per_state=qos)


def export_qos_csv(result: OracleResult, grid: PlacementGrid, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["state", "x", "y", "h", "qos"])
        for s, q in enumerate(result.qos_per_state):
            p = grid_index_to_position(grid, s)
            w.writerow([s, repr(p.x), repr(p.y), repr(p.h), repr(float(q))])
