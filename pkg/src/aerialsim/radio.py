"""SINR, max-SINR association, throughput, and the aggregate QoS objective."""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .channel import (AtgEnvironment, RadioParams, atg_pathloss_hl, dbm_to_mw,
                      ground_pathloss_d)
from .deployment import GroundBS
from .geometry import Position3D

AERIAL_ID = -1  # BS identifier reserved for the aerial station
DEFAULT_AERIAL_TX_DBM = 36.0


@dataclass(frozen=True)
class NetworkState:
    """One instant of the network: sites, users, and radio parameters."""

    ground_bs: Sequence[GroundBS]
    users: Sequence  # mobility.User or bare Position2D
    env: AtgEnvironment
    radio: RadioParams
    aerial_pos: Optional[Position3D] = None
    aerial_tx_power: float = DEFAULT_AERIAL_TX_DBM


@dataclass(frozen=True)
class AssociationMap:
    """Per-user serving BS id (ground id, or AERIAL_ID for the aerial)."""

    assign: List[int]


@dataclass(frozen=True)
class LinkReport:
    serving: List[int]
    sinr: np.ndarray        # linear, per user
    throughput: np.ndarray  # bits/s/Hz, per user


def user_xy(state: NetworkState) -> np.ndarray:
    pts = [getattr(u, "pos", u) for u in state.users]
    if not pts:
        return np.empty((0, 2))
    return np.array([[p.x, p.y] for p in pts], dtype=float)


def active_bs_ids(state: NetworkState) -> List[int]:
    ids = [bs.id for bs in state.ground_bs if bs.active]
    if state.aerial_pos is not None:
        ids.append(AERIAL_ID)
    return ids


def received_power_matrix(state: NetworkState) -> np.ndarray:
    """Linear received power (mW), shape (n_users, n_active_bs).

    Column order matches active_bs_ids: active ground BSs first, aerial last.
    """
    xy = user_xy(state)
    n = xy.shape[0]
    cols = []
    for bs in state.ground_bs:
        if not bs.active:
            continue
        d = np.sqrt((xy[:, 0] - bs.pos.x) ** 2 + (xy[:, 1] - bs.pos.y) ** 2
                    + bs.pos.h ** 2) if n else np.empty(0)
        cols.append(dbm_to_mw(bs.tx_power - ground_pathloss_d(d, state.radio)))
    if state.aerial_pos is not None:
        ap = state.aerial_pos
        l = np.hypot(xy[:, 0] - ap.x, xy[:, 1] - ap.y) if n else np.empty(0)
        pl = atg_pathloss_hl(ap.h, l, state.env, state.radio)
        cols.append(dbm_to_mw(state.aerial_tx_power - pl))
    if not cols:
        raise ValueError("network has no active base station")
    return np.column_stack(cols) if n else np.empty((0, len(cols)))


def sinr_matrix(state: NetworkState) -> np.ndarray:
    """Linear SINR per (user, candidate serving BS) under full-buffer reuse-1."""
    p = received_power_matrix(state)
    noise_mw = dbm_to_mw(state.radio.noise_power)
    total = p.sum(axis=1, keepdims=True)
    return p / (noise_mw + total - p)


def sinr(user, serving: int, state: NetworkState) -> float:
    """SINR of a single user served by the given BS id."""
    probe = NetworkState(ground_bs=state.ground_bs, users=[user], env=state.env,
                         radio=state.radio, aerial_pos=state.aerial_pos,
                         aerial_tx_power=state.aerial_tx_power)
    ids = active_bs_ids(probe)
    if serving not in ids:
        raise ValueError(f"serving BS {serving} is not active")
    return float(sinr_matrix(probe)[0, ids.index(serving)])


def associate_max_sinr(state: NetworkState) -> AssociationMap:
    """Each user picks the SINR-maximizing BS; ties go to the lowest BS index."""
    ids = active_bs_ids(state)
    s = sinr_matrix(state)
    if s.shape[0] == 0:
        return AssociationMap(assign=[])
    # Column order is ascending ground id then aerial; reorder so argmax's
    # first-max rule breaks ties toward the lowest BS index (aerial id -1 first).
    order = np.argsort(np.array(ids), kind="stable")
    best = order[np.argmax(s[:, order], axis=1)]
    return AssociationMap(assign=[ids[k] for k in best])


def throughput(sinr_linear) -> float:
    return np.log2(1.0 + sinr_linear)


def link_report(state: NetworkState) -> LinkReport:
    ids = active_bs_ids(state)
    assoc = associate_max_sinr(state)
    s = sinr_matrix(state)
    col = {b: k for k, b in enumerate(ids)}
    per_user = np.array([s[i, col[b]] for i, b in enumerate(assoc.assign)])
    return LinkReport(serving=assoc.assign, sinr=per_user,
                      throughput=throughput(per_user))


def aggregate_qos(state: NetworkState) -> float:
    """Sum of per-user spectral efficiency under max-SINR association."""
    if not state.users:
        return 0.0
    return float(link_report(state).throughput.sum())
