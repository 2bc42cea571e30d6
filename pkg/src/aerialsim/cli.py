"""Command-line entry point: run / oracle / compare subcommands."""

import argparse
import csv
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from .geometry import ConfigurationError
from .oracle import exhaustive_search, export_qos_csv
from .scenario import (BASELINE_AERIAL, BASELINE_GROUND, build_config,
                       default_out_dir, emit_outputs, per_user_mean_sinr_db,
                       run_scenario)

ORACLE_STATE_LIMIT = 200_000


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="YAML config file")
    p.add_argument("--seed", type=int, help="random seed (overrides config)")
    p.add_argument("--out-dir", help=f"output directory (default: $AERIALSIM_OUT_DIR or ./out)")
    p.add_argument("--preset", choices=["paper", "desk"], default="desk")


def _config_from_args(args, extra=None):
    overrides = dict(extra or {})
    if args.seed is not None:
        overrides["seed"] = args.seed
    return build_config(preset=args.preset, config_file=args.config,
                        overrides=overrides)


def cmd_run(args) -> int:
    cfg = _config_from_args(args)
    out = Path(args.out_dir) if args.out_dir else default_out_dir()
    t0 = time.perf_counter()
    run = run_scenario(cfg)
    paths = emit_outputs(run.records, run.reward_traces, out, config=cfg)
    elapsed = time.perf_counter() - t0
    print(f"wrote {len(paths)} files to {out} "
          f"({len(run.records)} slots, {elapsed:.1f}s)", file=sys.stderr)
    return 0


def cmd_oracle(args) -> int:
    cfg = _config_from_args(args)
    grid = cfg.placement_grid()
    if grid.n_states > ORACLE_STATE_LIMIT and not args.force:
        raise ConfigurationError(
            f"grid has {grid.n_states} states (> {ORACLE_STATE_LIMIT}); "
            "pass --force to enumerate anyway")
    # Snapshot at t_st with the configured BS disabled and no aerial yet.
    from .deployment import drop_users_ppp, hex_layout
    from .mobility import init_users
    from .radio import NetworkState
    area = cfg.service_area()
    streams = np.random.SeedSequence(cfg.seed).spawn(3)
    bss = hex_layout(cfg.n_rings, area, cfg.antenna_height, cfg.ground_tx_power)
    off = cfg.disabled_bs if cfg.disabled_bs is not None else 0
    bss = [replace(b, active=False) if b.id == off else b for b in bss]
    users = init_users(
        drop_users_ppp(cfg.n_users, area, np.random.default_rng(streams[0])),
        cfg.mobility, np.random.default_rng(streams[1]))
    snapshot = NetworkState(ground_bs=bss, users=users, env=cfg.env,
                            radio=cfg.radio, aerial_pos=None,
                            aerial_tx_power=cfg.aerial_tx_power)
    t0 = time.perf_counter()
    result = exhaustive_search(snapshot, grid)
    out = Path(args.out_dir) if args.out_dir else default_out_dir()
    out.mkdir(parents=True, exist_ok=True)
    export_qos_csv(result, grid, out / "oracle_qos.csv")
    from .deployment import grid_index_to_position
    p = grid_index_to_position(grid, result.best_state)
    print(f"best state {result.best_state} at ({p.x:.1f}, {p.y:.1f}, {p.h:.1f}) "
          f"qos={result.best_qos:.4f} ({time.perf_counter() - t0:.1f}s)",
          file=sys.stderr)
    return 0


def _compare_one(payload):
    seed, preset, config_file = payload
    base = build_config(preset=preset, config_file=config_file,
                        overrides={"seed": seed, "baseline_mode": BASELINE_GROUND})
    aerial = replace(base, baseline_mode=BASELINE_AERIAL)
    rb = run_scenario(base)
    ra = run_scenario(aerial)
    lag = [k for k, r in enumerate(rb.records) if r.qos < r.qos_th]
    wins = sum(1 for k in lag if ra.records[k].qos >= rb.records[k].qos)
    return {
        "seed": seed,
        "qos_base_mean": float(np.mean([r.qos for r in rb.records])),
        "qos_aerial_mean": float(np.mean([r.qos for r in ra.records])),
        "lagging_slots": len(lag),
        "aerial_wins_at_lagging": wins,
        "median_sinr_base_db": float(np.median(per_user_mean_sinr_db(rb.records))),
        "median_sinr_aerial_db": float(np.median(per_user_mean_sinr_db(ra.records))),
    }


def cmd_compare(args) -> int:
    seeds = [args.seed + k if args.seed is not None else k
             for k in range(args.n_seeds)]
    payloads = [(s, args.preset, args.config) for s in seeds]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            rows = list(ex.map(_compare_one, payloads))
    else:
        rows = [_compare_one(p) for p in payloads]
    out = Path(args.out_dir) if args.out_dir else default_out_dir()
    out.mkdir(parents=True, exist_ok=True)
    path = out / "compare.csv"
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.DictWriter(f, fieldnames=list(rows[0].keys()), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    gains = sum(1 for r in rows
                if r["lagging_slots"] == 0
                or r["aerial_wins_at_lagging"] / r["lagging_slots"] >= 0.5)
    print(f"wrote {path}; aerial helps at lagging slots in {gains}/{len(rows)} seeds",
          file=sys.stderr)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="aerialsim",
        description="Downlink cellular simulator with Q-learning aerial-BS placement")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario and write metrics")
    _add_common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_oracle = sub.add_parser("oracle",
                              help="exhaustive QoS map for a t_st snapshot")
    _add_common(p_oracle)
    p_oracle.add_argument("--force", action="store_true",
                          help="allow very large grids")
    p_oracle.set_defaults(func=cmd_oracle)

    p_cmp = sub.add_parser("compare",
                           help="paired ground-only vs aerial-assisted seeds")
    _add_common(p_cmp)
    p_cmp.add_argument("--n-seeds", type=int, default=20)
    p_cmp.add_argument("--jobs", type=int, default=1)
    p_cmp.set_defaults(func=cmd_compare)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
