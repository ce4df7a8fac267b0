"""Sweep orchestration: parameter points x seeds, with per-point aggregates.

Run seeds
    ``seed_mode="mixed"`` (default): ``run_seed = derive_seed(seed, point)``,
    so every (point, seed) pair gets an independent stream and adding a
    point to a grid never changes the runs of other points.
    ``seed_mode="shared"``: ``run_seed = seed`` for every point (common
    random numbers; paired comparisons across points).

Rows are plain dicts.  Run rows carry the point echo, ``seed``,
``run_seed`` and metrics, or an ``error`` string if the run raised.
After each point's runs comes one aggregate row (``aggregate=True``)
holding the mean and sample standard deviation (``<metric>_std``) over the
point's successful runs and their count ``n``.
"""

from __future__ import annotations

import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import STAGE_KNOBS, ExperimentConfig
from .evac import EvacParams, run_evacuation
from .rng import derive_seed
from .stage import StageParams, run_stage_sim

EVAC_METRICS = ("avg_V", "avg_N", "ratio", "avg_all", "G1", "G2", "G3", "G4", "censored", "ticks")
STAGE_METRICS = ("F", "APS", "switch_count")


def metric_names(mode: str) -> tuple[str, ...]:
    return EVAC_METRICS if mode == "evac" else STAGE_METRICS


def run_seed_for(cfg: ExperimentConfig, seed: int, point_index: int) -> int:
    return seed if cfg.seed_mode == "shared" else derive_seed(seed, point_index)


def _run_one(mode, point, params, run_seed, trace_path):
    fh = open(trace_path, "w", encoding="utf-8", newline="\n") if trace_path else None
    try:
        if mode == "evac":
            m = run_evacuation(point["scenario"], point["strategy"], EvacParams(**params),
                               seed=run_seed, trace=fh)
            return m.as_dict()
        sp = StageParams(map=point["map"], **{k: point[k] for k in STAGE_KNOBS}, **params)
        m = run_stage_sim(sp, seed=run_seed, trace=fh)
        return {"F": m.F, "APS": m.APS, "switch_count": m.switch_count}
    finally:
        if fh:
            fh.close()


def _job(args):
    mode, point, params, run_seed, trace_path = args
    try:
        return _run_one(mode, point, params, run_seed, trace_path), None
    except Exception as e:  # recorded in the row, the sweep goes on
        return None, f"{type(e).__name__}: {e}"


def aggregate(rows: list[dict], mode: str) -> dict:
    """Mean and sample std of each metric over successful ``rows``."""
    ok = [r for r in rows if not r.get("error")]
    agg = {"n": len(ok)}
    for m in metric_names(mode):
        vals = [float(r[m]) for r in ok]
        agg[m] = statistics.fmean(vals) if vals else None
        agg[f"{m}_std"] = statistics.stdev(vals) if len(vals) > 1 else None
    return agg


def run_experiment(cfg: ExperimentConfig, workers: int | None = None) -> list[dict]:
    """Execute every (point, seed) pair and return sorted run + aggregate rows."""
    points = cfg.points()
    jobs, keys = [], []
    trace_dir = Path(cfg.trace) if cfg.trace else None
    if trace_dir:
        trace_dir.mkdir(parents=True, exist_ok=True)
    for pi, point in enumerate(points):
        for seed in cfg.seeds:
            rs = run_seed_for(cfg, seed, pi)
            tp = str(trace_dir / f"p{pi:03d}_s{seed}.jsonl") if trace_dir else None
            jobs.append((cfg.mode, point, cfg.params, rs, tp))
            keys.append((pi, seed, rs))

    workers = cfg.workers if workers is None else workers
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_job, jobs))
    else:
        results = [_job(j) for j in jobs]

    by_point: dict[int, list[dict]] = {}
    for (pi, seed, rs), (metrics, err) in zip(keys, results):
        row = {"mode": cfg.mode, "point": pi, **points[pi], "seed": seed,
               "run_seed": rs, "aggregate": False, "n": 1 if err is None else 0,
               "error": err or ""}
        row.update(metrics or {m: None for m in metric_names(cfg.mode)})
        by_point.setdefault(pi, []).append(row)

    out = []
    for pi in sorted(by_point):
        runs = sorted(by_point[pi], key=lambda r: r["seed"])
        out.extend(runs)
        agg = {"mode": cfg.mode, "point": pi, **points[pi], "seed": None,
               "run_seed": None, "aggregate": True, "error": ""}
        agg.update(aggregate(runs, cfg.mode))
        n_err = sum(1 for r in runs if r["error"])
        if n_err:
            agg["error"] = f"{n_err} of {len(runs)} runs failed"
        out.append(agg)
    return out


def point_means(rows: list[dict], metric: str, **match) -> float:
    """Mean of ``metric`` from the aggregate row matching ``match``."""
    for r in rows:
        if r["aggregate"] and all(r.get(k) == v for k, v in match.items()):
            v = r[metric]
            return math.nan if v is None else v
    raise KeyError(f"no aggregate row matching {match}")
