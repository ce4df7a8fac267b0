"""Experiment configuration: a versioned JSON schema with strict validation.

Schema (version 1)::

    {
      "schema_version": 1,
      "mode": "evac" | "stage",
      "seeds": [int, ...],                    # non-empty, unsigned 64-bit
      "seed_mode": "mixed" | "shared",        # default "mixed"

      # evac only
      "scenarios": ["S1", ...],               # default all four
      "strategies": ["RGA", ...],             # default all three

      # stage only
      "maps": ["A", "B", "C"],                # or "map": "C"; default ["A"]
      "PN": 500, "BRF": 50, "PT": 10, "ST": 30, "SI": 10,
      "grid": {"SI": [10, 20, 30, 40]},       # lists over PN/BRF/PT/ST/SI

      "params": {...},                        # any EvacParams / StageParams field
      "output": "report.csv" | null,
      "trace": "trace_dir" | null,
      "workers": 1
    }

``scenario`` and ``strategy`` are accepted as single-value shorthands for
the list keys, as ``map`` is for ``maps``.  Unknown keys anywhere are
rejected.  Every error is a :class:`ConfigError` whose ``key`` attribute
names the offending key.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

from .evac import SCENARIOS, STRATEGIES, EvacParams
from .stage import MAPS, StageParams

SCHEMA_VERSION = 1
STAGE_KNOBS = ("PN", "BRF", "PT", "ST", "SI")
STAGE_DEFAULTS = {"PN": 500, "BRF": 50, "PT": 10, "ST": 30, "SI": 10}

_COMMON_KEYS = {"schema_version", "mode", "seeds", "seed_mode", "params",
                "output", "trace", "workers"}
_EVAC_KEYS = _COMMON_KEYS | {"scenario", "scenarios", "strategy", "strategies"}
_STAGE_KEYS = _COMMON_KEYS | {"map", "maps", "grid", *STAGE_KNOBS}
_MAX_SEED = (1 << 64) - 1


class ConfigError(ValueError):
    """Invalid configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass
class ExperimentConfig:
    mode: str
    seeds: list[int]
    seed_mode: str = "mixed"
    scenarios: list[str] = field(default_factory=list)
    strategies: list[str] = field(default_factory=list)
    maps: list[str] = field(default_factory=list)
    base: dict = field(default_factory=dict)   # scalar PN/BRF/PT/ST/SI
    grid: dict = field(default_factory=dict)   # knob -> list of values
    params: dict = field(default_factory=dict)
    output: str | None = None
    trace: str | None = None
    workers: int = 1
    schema_version: int = SCHEMA_VERSION

    def points(self) -> list[dict]:
        """Parameter points in their canonical order (index = position)."""
        if self.mode == "evac":
            return [{"scenario": sc, "strategy": st}
                    for sc in self.scenarios for st in self.strategies]
        knobs = [k for k in STAGE_KNOBS if k in self.grid]
        combos = [{}]
        for k in knobs:
            combos = [dict(c, **{k: v}) for c in combos for v in self.grid[k]]
        return [dict({"map": m}, **dict(self.base, **c)) for m in self.maps for c in combos]

    def to_dict(self) -> dict:
        d = {"schema_version": self.schema_version, "mode": self.mode,
             "seeds": list(self.seeds), "seed_mode": self.seed_mode}
        if self.mode == "evac":
            d["scenarios"] = list(self.scenarios)
            d["strategies"] = list(self.strategies)
        else:
            d["maps"] = list(self.maps)
            d.update(self.base)
            if self.grid:
                d["grid"] = {k: list(v) for k, v in self.grid.items()}
        if self.params:
            d["params"] = dict(self.params)
        d["output"] = self.output
        d["trace"] = self.trace
        d["workers"] = self.workers
        return d


def _int(key, v, lo=1, hi=None):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(key, f"expected an integer, got {v!r}")
    if v < lo or (hi is not None and v > hi):
        bound = f">= {lo}" if hi is None else f"in [{lo}, {hi}]"
        raise ConfigError(key, f"must be {bound}, got {v}")
    return v


def _choices(d, one_key, many_key, allowed, default):
    if one_key in d and many_key in d:
        raise ConfigError(one_key, f"give either {one_key!r} or {many_key!r}, not both")
    if one_key in d:
        vals = [d[one_key]]
        key = one_key
    elif many_key in d:
        vals = d[many_key]
        key = many_key
        if not isinstance(vals, list) or not vals:
            raise ConfigError(key, "must be a non-empty list")
    else:
        return list(default)
    for v in vals:
        if v not in allowed:
            raise ConfigError(key, f"unknown value {v!r}; expected one of {list(allowed)}")
    if len(set(vals)) != len(vals):
        raise ConfigError(key, "duplicate values")
    return list(vals)


def _check_params(mode: str, params) -> dict:
    if not isinstance(params, dict):
        raise ConfigError("params", "must be an object")
    cls = EvacParams if mode == "evac" else StageParams
    names = {f.name for f in dataclasses.fields(cls)}
    for k in params:
        if k not in names:
            raise ConfigError(f"params.{k}", f"unknown {cls.__name__} field")
        if mode == "stage" and k in STAGE_KNOBS + ("map",):
            raise ConfigError(f"params.{k}", "set this at the top level")
    try:
        cls(**params)
    except (TypeError, ValueError) as e:
        bad = next((k for k in params if str(e).startswith(k)), None)
        raise ConfigError(f"params.{bad}" if bad else "params", str(e)) from None
    return dict(params)


def config_from_dict(d) -> ExperimentConfig:
    if not isinstance(d, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    if "schema_version" not in d:
        raise ConfigError("schema_version", "missing")
    if d["schema_version"] != SCHEMA_VERSION:
        raise ConfigError("schema_version", f"unsupported version {d['schema_version']!r}")
    mode = d.get("mode")
    if mode not in ("evac", "stage"):
        raise ConfigError("mode", f"must be 'evac' or 'stage', got {mode!r}")
    allowed = _EVAC_KEYS if mode == "evac" else _STAGE_KEYS
    for k in d:
        if k not in allowed:
            raise ConfigError(k, f"unknown key for mode {mode!r}")

    seeds = d.get("seeds")
    if not isinstance(seeds, list) or not seeds:
        raise ConfigError("seeds", "must be a non-empty list")
    seeds = [_int("seeds", s, 0, _MAX_SEED) for s in seeds]
    if len(set(seeds)) != len(seeds):
        raise ConfigError("seeds", "duplicate seeds")
    seed_mode = d.get("seed_mode", "mixed")
    if seed_mode not in ("mixed", "shared"):
        raise ConfigError("seed_mode", "must be 'mixed' or 'shared'")

    cfg = ExperimentConfig(mode=mode, seeds=seeds, seed_mode=seed_mode)
    if mode == "evac":
        cfg.scenarios = _choices(d, "scenario", "scenarios", SCENARIOS, SCENARIOS)
        cfg.strategies = _choices(d, "strategy", "strategies", STRATEGIES, STRATEGIES)
    else:
        cfg.maps = _choices(d, "map", "maps", sorted(MAPS), [StageParams().map])
        cfg.base = {k: _int(k, d.get(k, STAGE_DEFAULTS[k])) for k in STAGE_KNOBS}
        grid = d.get("grid", {})
        if not isinstance(grid, dict):
            raise ConfigError("grid", "must be an object")
        for k, vals in grid.items():
            if k not in STAGE_KNOBS:
                raise ConfigError(f"grid.{k}", f"not a sweepable parameter; use one of {list(STAGE_KNOBS)}")
            if not isinstance(vals, list) or not vals:
                raise ConfigError(f"grid.{k}", "must be a non-empty list")
            vals = [_int(f"grid.{k}", v) for v in vals]
            if len(set(vals)) != len(vals):
                raise ConfigError(f"grid.{k}", "duplicate values")
            cfg.grid[k] = vals
    cfg.params = _check_params(mode, d.get("params", {}))

    for key in ("output", "trace"):
        v = d.get(key)
        if v is not None and (not isinstance(v, str) or not v):
            raise ConfigError(key, "must be a non-empty string or null")
        setattr(cfg, key, v)
    cfg.workers = _int("workers", d.get("workers", 1))

    if mode == "stage":
        # a point is only valid if the stage model accepts it
        for p in cfg.points():
            try:
                StageParams(**{k: v for k, v in p.items()}, **cfg.params)
            except ValueError as e:
                key = next((k for k in STAGE_KNOBS if str(e).startswith(k)), "params")
                raise ConfigError(key, str(e)) from None
    return cfg


def parse_config(path) -> ExperimentConfig:
    """Read, validate and default-fill a JSON config file."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError("<file>", f"config file not found: {path}")
    try:
        d = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError("<file>", f"malformed JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
    return config_from_dict(d)


def serialize_config(cfg: ExperimentConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=False) + "\n"
