"""Two-stage festival grid world with a crowd-triggered stage-switch controller.

The world is a 51 x 51 patch grid, origin at the bottom-left.  Stages are
solid rectangles; the bar and restroom are single solid patches.  Every
other patch holds at most one agent.

One tick is: intents -> movement -> state detection -> controller.

The bar and restroom behave as buildings: an agent that gets within
``facility_radius`` of one steps inside (off the grid) for BRT ticks and
then re-enters on the nearest free patch.

Every BRF ticks each agent not on a trip starts one with probability
``trip_fraction``.  An agent walking back from a facility is still on its
trip unless it is blocked at that moment (``return_leg``).

Agent states
    panic   heading for bar/restroom and blocked for more than PT ticks
    surge   heading for a stage and blocked for more than ST ticks
Subarea state
    crowded  more than 70 % of its patches occupied and at least one
             panicking or surging agent inside
Controller
    a subarea crowded for more than SI consecutive ticks with at least two
    crowded 4-neighbours closes the open stage and opens the other one.

Subareas are 5 x 5 tiles in a 10 x 10 arrangement; the last row and column
of tiles are 6 patches wide so the tiling covers all 51 x 51 patches.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import IntEnum

import numba as nb
import numpy as np

from .rng import RngStream, draw_int, draw_real, permutation, shuffle_inplace

GRID = 51
N_SUB = 10  # subareas per side
CROWD_FRACTION = 0.70

# (x0, y0, x1, y1), inclusive patch bounds; first entry is the left stage
MAPS: dict[str, tuple[tuple[int, int, int, int], tuple[int, int, int, int]]] = {
    # every stage is an 11x11 block so maps differ only in placement
    "A": ((0, 20, 10, 30), (40, 20, 50, 30)),
    "B": ((0, 20, 10, 30), (40, 0, 50, 10)),
    "C": ((0, 40, 10, 50), (40, 0, 50, 10)),
}
BAR = (25, 2)
RESTROOM = (25, 48)
FACILITIES = np.array([BAR, RESTROOM], dtype=np.int64)

# N, NE, E, SE, S, SW, W, NW  (y up)
NEIGHBOR_DX = np.array([0, 1, 1, 1, 0, -1, -1, -1], dtype=np.int64)
NEIGHBOR_DY = np.array([1, 1, 0, -1, -1, -1, 0, 1], dtype=np.int64)

EMPTY = -1
_RETURN_LEG = {"none": 0, "until_blocked": 1, "until_arrival": 2}
SOLID = -2


class Activity(IntEnum):
    TO_STAGE = 0
    AT_STAGE = 1
    TO_FACILITY = 2
    AT_FACILITY = 3
    HESITATING = 4


class Destination(IntEnum):
    LEFT_STAGE = 0
    RIGHT_STAGE = 1
    BAR = 2
    RESTROOM = 3


class StagePlacementError(RuntimeError):
    pass


@dataclass
class StageParams:
    PN: int = 500
    BRF: int = 50
    BRT: int = 50
    trip_fraction: float = 0.4
    PT: int = 10
    ST: int = 30
    SI: int = 10
    run_length: int = 5000
    map: str = "A"
    initial_open: str = "right"
    trip_mode: str = "bernoulli"  # or "quota"
    facility_radius: float = 2.0
    # overrides the map's (left, right) stage rectangles
    stage_rects: tuple | None = None
    counterflow_swaps: bool = True
    yield_to_leavers: bool = True
    # who may start a trip while walking back from a facility: "none" = any
    # such agent, "until_blocked" = only one currently blocked, "until_arrival"
    # = nobody until back within comfort distance of a stage
    return_leg: str = "until_blocked"
    make_way: bool = False
    comfort_range: tuple[int, int] = (1, 10)
    hesitation_range: tuple[int, int] = (1, 20)

    def __post_init__(self):
        self.comfort_range = tuple(self.comfort_range)
        self.hesitation_range = tuple(self.hesitation_range)
        self.validate()

    def validate(self):
        for name in ("PN", "BRF", "BRT", "PT", "ST", "SI", "run_length"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or v <= 0:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")
        if not self.facility_radius >= 1.0:
            raise ValueError("facility_radius must be >= 1")
        if not 0.0 <= self.trip_fraction <= 1.0:
            raise ValueError("trip_fraction must lie in [0, 1]")
        if self.map not in MAPS:
            raise ValueError(f"map must be one of {sorted(MAPS)}, got {self.map!r}")
        if self.initial_open not in ("left", "right"):
            raise ValueError("initial_open must be 'left' or 'right'")
        if self.return_leg not in _RETURN_LEG:
            raise ValueError(f"return_leg must be one of {sorted(_RETURN_LEG)}")
        if self.trip_mode not in ("bernoulli", "quota"):
            raise ValueError("trip_mode must be 'bernoulli' or 'quota'")
        if self.stage_rects is not None:
            self.stage_rects = tuple(tuple(int(v) for v in r) for r in self.stage_rects)
            if len(self.stage_rects) != 2 or any(len(r) != 4 for r in self.stage_rects):
                raise ValueError("stage_rects must be two (x0, y0, x1, y1) rectangles")
            for x0, y0, x1, y1 in self.stage_rects:
                if not (0 <= x0 <= x1 < GRID and 0 <= y0 <= y1 < GRID):
                    raise ValueError(f"stage rectangle {(x0, y0, x1, y1)} outside the grid")
        for name in ("comfort_range", "hesitation_range"):
            lo, hi = getattr(self, name)
            if not 0 < lo <= hi:
                raise ValueError(f"{name} must satisfy 0 < lo <= hi")


@dataclass
class StageAgent:
    id: int
    position: tuple[int, int]
    speed: int
    comfort_distance: int
    hesitation: int
    activity: Activity
    destination: Destination
    block_counter_stage: int
    block_counter_facility: int
    surge_flag: bool
    panic_flag: bool
    dwell_remaining: int
    hesitation_remaining: int
    returning: bool = False


@dataclass
class StageWorld:
    params: StageParams
    rng: RngStream
    occ: np.ndarray           # (51, 51) agent id, EMPTY or SOLID; indexed [x, y]
    dist: np.ndarray          # (4, 51, 51) distance to each destination
    reentry: np.ndarray       # (2, m, 2) patches by distance from bar / restroom
    sub_of: np.ndarray        # (51, 51) subarea index
    sub_size: np.ndarray      # (100,)
    stages: tuple
    x: np.ndarray
    y: np.ndarray
    speed: np.ndarray
    comfort: np.ndarray
    hesitation: np.ndarray
    activity: np.ndarray
    dest: np.ndarray
    block_stage: np.ndarray
    block_fac: np.ndarray
    surge: np.ndarray
    panic: np.ndarray
    dwell: np.ndarray
    hes_left: np.ndarray
    returning: np.ndarray     # walking back from a facility (trip not over)
    open_stage: int = 1
    tick: int = 0
    sub_count: np.ndarray = None
    crowded: np.ndarray = None
    crowded_since: np.ndarray = None
    switch_log: list = field(default_factory=list)
    trips_eligible: int = 0
    trips_started: int = 0

    def __post_init__(self):
        if self.sub_count is None:
            self.sub_count = np.zeros(N_SUB * N_SUB, dtype=np.int64)
            self.crowded = np.zeros(N_SUB * N_SUB, dtype=np.bool_)
            self.crowded_since = np.zeros(N_SUB * N_SUB, dtype=np.int64)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def on_grid(self) -> np.ndarray:
        return self.activity != Activity.AT_FACILITY

    def agent(self, i: int) -> StageAgent:
        return StageAgent(
            id=i,
            position=(int(self.x[i]), int(self.y[i])),
            speed=int(self.speed[i]),
            comfort_distance=int(self.comfort[i]),
            hesitation=int(self.hesitation[i]),
            activity=Activity(int(self.activity[i])),
            destination=Destination(int(self.dest[i])),
            block_counter_stage=int(self.block_stage[i]),
            block_counter_facility=int(self.block_fac[i]),
            surge_flag=bool(self.surge[i]),
            panic_flag=bool(self.panic[i]),
            dwell_remaining=int(self.dwell[i]),
            hesitation_remaining=int(self.hes_left[i]),
            returning=bool(self.returning[i]),
        )

    @property
    def agents(self) -> list[StageAgent]:
        return [self.agent(i) for i in range(self.n)]

    def stage_open(self, which: int) -> bool:
        return self.open_stage == which

    def distance_to(self, i: int, dest: int | None = None) -> float:
        d = int(self.dest[i]) if dest is None else dest
        return float(self.dist[d, self.x[i], self.y[i]])

    def place(self, i: int, x: int, y: int) -> None:
        """Move agent ``i`` to an empty patch (test/scene-building helper)."""
        if self.occ[x, y] != EMPTY:
            raise ValueError(f"patch ({x}, {y}) is not free")
        self.occ[self.x[i], self.y[i]] = EMPTY
        self.x[i], self.y[i] = x, y
        self.occ[x, y] = i


@dataclass
class StageMetrics:
    F: float
    APS: float
    switch_count: int
    run_length: int
    panic_timeline: np.ndarray
    surge_timeline: np.ndarray
    switch_log: list

    @classmethod
    def from_timeline(cls, panic, surge, switch_log, run_length):
        panic = np.asarray(panic, dtype=np.int64)
        surge = np.asarray(surge, dtype=np.int64)
        return cls(
            F=len(switch_log) / run_length,
            APS=float((panic + surge).sum()) / run_length,
            switch_count=len(switch_log),
            run_length=run_length,
            panic_timeline=panic,
            surge_timeline=surge,
            switch_log=list(switch_log),
        )


# ------------------------------------------------------------- map building

def subarea_map() -> tuple[np.ndarray, np.ndarray]:
    idx = np.minimum(np.arange(GRID) // 5, N_SUB - 1)
    sub_of = idx[:, None] * N_SUB + idx[None, :]  # [x, y] -> col * 10 + row
    sub_size = np.bincount(sub_of.ravel(), minlength=N_SUB * N_SUB)
    return sub_of.astype(np.int64), sub_size.astype(np.int64)


def _rect_distance(rect) -> np.ndarray:
    x0, y0, x1, y1 = rect
    xs = np.arange(GRID)[:, None]
    ys = np.arange(GRID)[None, :]
    dx = np.maximum(np.maximum(x0 - xs, xs - x1), 0)
    dy = np.maximum(np.maximum(y0 - ys, ys - y1), 0)
    return np.hypot(dx, dy)


def _reentry_order(dist_field, occ) -> np.ndarray:
    free = np.argwhere(occ != SOLID)
    d = dist_field[free[:, 0], free[:, 1]]
    order = np.lexsort((free[:, 1], free[:, 0], d))
    return free[order].astype(np.int64)


def build_stage_world(params: StageParams, seed: int) -> StageWorld:
    """Lay out the map and place ``PN`` agents.

    RNG order: shuffle of free patches (first PN taken, agent id order),
    shuffle of ids (first PN // 2 get speed 2), then per agent in id order
    comfort distance and hesitation.
    """
    rng = RngStream(seed)
    stages = params.stage_rects or MAPS[params.map]
    occ = np.full((GRID, GRID), EMPTY, dtype=np.int64)
    for x0, y0, x1, y1 in stages:
        occ[x0:x1 + 1, y0:y1 + 1] = SOLID
    occ[BAR] = SOLID
    occ[RESTROOM] = SOLID
    dist = np.stack([
        _rect_distance(stages[0]),
        _rect_distance(stages[1]),
        _rect_distance((*BAR, *BAR)),
        _rect_distance((*RESTROOM, *RESTROOM)),
    ])
    free = np.argwhere(occ == EMPTY)  # row-major over (x, y)
    if params.PN > len(free):
        raise StagePlacementError(
            f"map {params.map}: PN={params.PN} exceeds {len(free)} free patches"
        )
    pick = np.arange(len(free))
    shuffle_inplace(rng.state, pick)
    spots = free[pick[: params.PN]]
    n = params.PN
    x = spots[:, 0].astype(np.int64).copy()
    y = spots[:, 1].astype(np.int64).copy()
    fast = rng.permutation(n)[: n // 2]
    speed = np.ones(n, dtype=np.int64)
    speed[fast] = 2
    comfort = np.empty(n, dtype=np.int64)
    hesitation = np.empty(n, dtype=np.int64)
    for i in range(n):
        comfort[i] = rng.uniform_int(*params.comfort_range)
        hesitation[i] = rng.uniform_int(*params.hesitation_range)
    open_stage = 1 if params.initial_open == "right" else 0
    sub_of, sub_size = subarea_map()
    z = lambda dt: np.zeros(n, dtype=dt)  # noqa: E731
    reentry = np.stack([_reentry_order(dist[2], occ), _reentry_order(dist[3], occ)])
    occ[x, y] = np.arange(n)
    return StageWorld(
        params=params, rng=rng, occ=occ, dist=dist, reentry=reentry, sub_of=sub_of, sub_size=sub_size,
        stages=stages, x=x, y=y, speed=speed, comfort=comfort, hesitation=hesitation,
        activity=z(np.int64) + Activity.TO_STAGE,
        dest=z(np.int64) + open_stage,
        block_stage=z(np.int64), block_fac=z(np.int64),
        surge=z(np.bool_), panic=z(np.bool_),
        dwell=z(np.int64), hes_left=z(np.int64), returning=z(np.bool_),
        open_stage=open_stage,
    )


# ------------------------------------------------------------------ kernels

@nb.njit(cache=True)
def _retarget(i, new_dest, activity, dest, block_stage, block_fac, surge, panic, act):
    if dest[i] != new_dest:
        block_stage[i] = 0
        block_fac[i] = 0
        surge[i] = False
        panic[i] = False
    dest[i] = new_dest
    activity[i] = act


@nb.njit(cache=True)
def _intent_kernel(tick, brf, brt, trip_fraction, quota, open_stage, rng_state,
                   x, y, comfort, activity, dest, block_stage, block_fac,
                   surge, panic, dwell, hes_left, dist, occ, reentry, fac_radius,
                   facilities, returning, return_leg):
    n = x.shape[0]
    for i in range(n):
        a = activity[i]
        if a == 4:  # hesitating
            if hes_left[i] == 0:
                _retarget(i, open_stage, activity, dest, block_stage, block_fac, surge, panic, 0)
            else:
                hes_left[i] -= 1
        elif a == 3:  # inside facility
            dwell[i] -= 1
            if dwell[i] <= 0:
                order = reentry[dest[i] - 2]
                for k in range(order.shape[0]):
                    px = order[k, 0]
                    py = order[k, 1]
                    if occ[px, py] == -1:
                        dwell[i] = 0
                        x[i] = px
                        y[i] = py
                        occ[px, py] = i
                        returning[i] = return_leg > 0
                        _retarget(i, open_stage, activity, dest, block_stage, block_fac,
                                  surge, panic, 0)
                        break

    eligible = 0
    started = 0
    if tick > 0 and tick % brf == 0:
        cand = np.empty(n, dtype=np.int64)
        for i in range(n):
            a = activity[i]
            # on the way back from a facility: only a blocked agent may
            # start another trip (return_leg 1), or none may (2)
            busy = returning[i] and (return_leg == 2 or block_stage[i] == 0)
            if (a == 0 or a == 1 or a == 4) and not busy:
                cand[eligible] = i
                eligible += 1
        if quota:
            k = int(math.floor(trip_fraction * eligible + 0.5))
            pool = cand[:eligible].copy()
            shuffle_inplace(rng_state, pool)
            chosen = np.zeros(n, dtype=np.bool_)
            for j in range(k):
                chosen[pool[j]] = True
            for j in range(eligible):
                i = cand[j]
                if chosen[i]:
                    fac = 2 + draw_int(rng_state, 0, 1)
                    _retarget(i, fac, activity, dest, block_stage, block_fac, surge, panic, 2)
                    started += 1
        else:
            for j in range(eligible):
                i = cand[j]
                if draw_real(rng_state, 0.0, 1.0) < trip_fraction:
                    fac = 2 + draw_int(rng_state, 0, 1)
                    _retarget(i, fac, activity, dest, block_stage, block_fac, surge, panic, 2)
                    started += 1

    for i in range(n):
        a = activity[i]
        d = dist[dest[i], x[i], y[i]]
        if a == 0 and d <= comfort[i]:
            activity[i] = 1
            returning[i] = False
        elif a == 1 and d > comfort[i]:
            activity[i] = 0
        elif a == 2 and d <= fac_radius:
            activity[i] = 3
            dwell[i] = brt
            occ[x[i], y[i]] = -1
            f = dest[i] - 2
            x[i] = facilities[f, 0]
            y[i] = facilities[f, 1]
    return eligible, started


@nb.njit(cache=True)
def _step_kernel(order, occ, dist, x, y, speed, comfort, activity, dest,
                 block_stage, block_fac, surge, panic, ndx, ndy, swaps, yielding, fac_radius,
                 make_way):
    g = occ.shape[0]
    for oi in range(order.shape[0]):
        i = order[oi]
        a = activity[i]
        if a != 0 and a != 2:
            continue
        field = dist[dest[i]]
        reach = comfort[i] if dest[i] < 2 else fac_radius
        if field[x[i], y[i]] <= reach:
            continue
        moved = False
        for _ in range(speed[i]):
            cx = x[i]
            cy = y[i]
            d0 = field[cx, cy]
            if d0 <= reach:
                break
            best = -1
            best_d = d0
            for k in range(8):
                nx = cx + ndx[k]
                ny = cy + ndy[k]
                if nx < 0 or ny < 0 or nx >= g or ny >= g:
                    continue
                j = occ[nx, ny]
                if j == -2:
                    continue
                d = field[nx, ny]
                if d >= best_d:
                    continue
                if j >= 0:
                    aj = activity[j]
                    if aj == 1 or aj == 4:
                        # idle spectators step aside for agents leaving for a
                        # facility, and (make_way) for fans of their own stage
                        # as long as they stay within their comfort distance
                        if yielding and dest[i] >= 2:
                            pass
                        elif not (make_way and aj == 1 and dest[j] == dest[i]
                                  and dist[dest[j]][cx, cy] <= comfort[j]):
                            continue
                    elif aj == 0 or aj == 2:
                        # counterflow swap: only with a traveller that also gains
                        if not swaps:
                            continue
                        fj = dist[dest[j]]
                        reach_j = comfort[j] if dest[j] < 2 else fac_radius
                        if not fj[cx, cy] < fj[nx, ny] or fj[nx, ny] <= reach_j:
                            continue
                    else:
                        continue
                best_d = d
                best = k
            if best < 0:
                break
            nx = cx + ndx[best]
            ny = cy + ndy[best]
            j = occ[nx, ny]
            occ[cx, cy] = j
            if j >= 0:
                x[j] = cx
                y[j] = cy
            x[i] = nx
            y[i] = ny
            occ[nx, ny] = i
            moved = True
        to_stage = dest[i] < 2
        if moved:
            if to_stage:
                block_stage[i] = 0
                surge[i] = False
            else:
                block_fac[i] = 0
                panic[i] = False
        else:
            if to_stage:
                block_stage[i] += 1
            else:
                block_fac[i] += 1


@nb.njit(cache=True)
def _detect_kernel(pt, st, x, y, activity, dest, block_stage, block_fac, surge, panic,
                   sub_of, sub_size, sub_count, sub_flagged, crowded, crowded_since, frac):
    n = x.shape[0]
    sub_count[:] = 0
    sub_flagged[:] = 0
    n_panic = 0
    n_surge = 0
    for i in range(n):
        if activity[i] == 3:
            surge[i] = False
            panic[i] = False
            continue
        s = sub_of[x[i], y[i]]
        sub_count[s] += 1
        if dest[i] < 2:
            panic[i] = False
            surge[i] = block_stage[i] > st
        else:
            surge[i] = False
            panic[i] = block_fac[i] > pt
        if surge[i]:
            n_surge += 1
            sub_flagged[s] += 1
        if panic[i]:
            n_panic += 1
            sub_flagged[s] += 1
    for s in range(sub_size.shape[0]):
        c = sub_count[s] / sub_size[s] > frac and sub_flagged[s] > 0
        crowded[s] = c
        if c:
            crowded_since[s] += 1
        else:
            crowded_since[s] = 0
    return n_panic, n_surge


# ------------------------------------------------------------- public API

def plan_agent_intent(world: StageWorld) -> tuple[int, int]:
    """Update destinations and activities for this tick.

    Order per tick: hesitation and facility dwell countdowns, then (every BRF
    ticks) trip initiation over eligible agents in id order, then arrival
    checks against comfort distance.  Returns (eligible, started) trip
    counts for this tick.
    """
    p = world.params
    eligible, started = _intent_kernel(
        world.tick, p.BRF, p.BRT, p.trip_fraction, p.trip_mode == "quota",
        world.open_stage, world.rng.state, world.x, world.y, world.comfort,
        world.activity, world.dest, world.block_stage, world.block_fac,
        world.surge, world.panic, world.dwell, world.hes_left, world.dist,
        world.occ, world.reentry, float(p.facility_radius), FACILITIES,
        world.returning, _RETURN_LEG[p.return_leg],
    )
    world.trips_eligible += eligible
    world.trips_started += started
    return eligible, started


def stage_step(world: StageWorld) -> StageWorld:
    """Move every travelling agent (seeded shuffled order) and advance the
    tick.  Each of up to ``speed`` single-patch moves goes to the free
    8-neighbour closest to the destination, provided it is strictly closer;
    ties follow N, NE, E, SE, S, SW, W, NW."""
    order = permutation(world.rng.state, world.n)
    _step_kernel(order, world.occ, world.dist, world.x, world.y, world.speed,
                 world.comfort, world.activity, world.dest, world.block_stage,
                 world.block_fac, world.surge, world.panic, NEIGHBOR_DX, NEIGHBOR_DY,
                 world.params.counterflow_swaps, world.params.yield_to_leavers,
                 float(world.params.facility_radius), world.params.make_way)
    world.tick += 1
    return world


def detect_states(world: StageWorld) -> tuple[int, int]:
    """Recompute panic/surge flags and subarea crowding; returns
    (panic count, surge count)."""
    p = world.params
    flagged = np.zeros_like(world.sub_count)
    return _detect_kernel(p.PT, p.ST, world.x, world.y, world.activity, world.dest, world.block_stage,
                          world.block_fac, world.surge, world.panic, world.sub_of,
                          world.sub_size, world.sub_count, flagged, world.crowded,
                          world.crowded_since, CROWD_FRACTION)


def sub_neighbors(s: int) -> list[int]:
    col, row = divmod(s, N_SUB)
    out = []
    for dc, dr in ((0, 1), (1, 0), (0, -1), (-1, 0)):
        c, r = col + dc, row + dr
        if 0 <= c < N_SUB and 0 <= r < N_SUB:
            out.append(c * N_SUB + r)
    return out


_NEIGHBORS = [sub_neighbors(s) for s in range(N_SUB * N_SUB)]


def switch_trigger(world: StageWorld) -> int | None:
    """First subarea (lowest index) that satisfies the switch rule, if any."""
    si = world.params.SI
    crowded = world.crowded
    for s in np.nonzero(world.crowded_since > si)[0]:
        if sum(1 for t in _NEIGHBORS[s] if crowded[t]) >= 2:
            return int(s)
    return None


def switch_controller(world: StageWorld) -> int | None:
    """Apply the switch rule; returns the triggering subarea or None."""
    s = switch_trigger(world)
    if s is None:
        return None
    old = world.open_stage
    world.open_stage = 1 - old
    world.switch_log.append(world.tick)
    world.crowded_since[:] = 0
    sel = (world.dest == old) & (world.activity != Activity.HESITATING)
    world.activity[sel] = Activity.HESITATING
    world.hes_left[sel] = world.hesitation[sel]
    world.block_stage[sel] = 0
    return s


def trace_record(world: StageWorld, n_panic: int, n_surge: int, switched_by,
                 agents: bool = False) -> dict:
    """One tick as a JSON-ready dict.  With ``agents`` it also lists every
    agent as [id, x, y, activity, dest, block_stage, block_fac, surge, panic]."""
    frac = world.sub_count / world.sub_size
    rec = {
        "tick": world.tick,
        "open_stage": "left" if world.open_stage == 0 else "right",
        "panic": int(n_panic),
        "surge": int(n_surge),
        "subareas": [
            [round(float(f), 4), bool(c), int(t)]
            for f, c, t in zip(frac, world.crowded, world.crowded_since)
        ],
        "switch": switched_by is not None,
        "switch_subarea": switched_by,
    }
    if agents:
        rec["agents"] = [
            [i, int(world.x[i]), int(world.y[i]), int(world.activity[i]), int(world.dest[i]),
             int(world.block_stage[i]), int(world.block_fac[i]),
             bool(world.surge[i]), bool(world.panic[i])]
            for i in range(world.n)
        ]
    return rec


def run_stage_sim(params: StageParams | None = None, seed: int = 0, trace=None,
                  trace_agents: bool = False) -> StageMetrics:
    """Run ``run_length`` ticks of intent -> step -> detect -> controller.

    With ``trace`` (a text file handle) one JSON line per tick is written;
    subarea timers are recorded before any switch reset."""
    params = params or StageParams()
    world = build_stage_world(params, seed)
    panic_tl = np.zeros(params.run_length, dtype=np.int64)
    surge_tl = np.zeros(params.run_length, dtype=np.int64)
    for t in range(params.run_length):
        plan_agent_intent(world)
        stage_step(world)
        n_panic, n_surge = detect_states(world)
        panic_tl[t] = n_panic
        surge_tl[t] = n_surge
        if trace is not None:
            s = switch_trigger(world)
            rec = trace_record(world, n_panic, n_surge, s, trace_agents)
            trace.write(json.dumps(rec) + "\n")
        switch_controller(world)
    return StageMetrics.from_timeline(panic_tl, surge_tl, world.switch_log, params.run_length)


def simulate(params: StageParams, seed: int, ticks: int | None = None) -> StageWorld:
    """Like :func:`run_stage_sim` but returns the final world."""
    world = build_stage_world(params, seed)
    for _ in range(params.run_length if ticks is None else ticks):
        plan_agent_intent(world)
        stage_step(world)
        detect_states(world)
        switch_controller(world)
    return world
