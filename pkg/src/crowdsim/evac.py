"""Continuous-space evacuation with gate-assignment strategies.

Arena coordinates are metres in screen orientation: origin at the top-left
corner, y pointing down.  Gates sit in the four corners:

    G1 (0, 0) ----- G2 (W, 0)
       |               |
    G3 (0, H) ----- G4 (W, H)

Each tick every remaining agent (in a seeded shuffled order) picks the best
of a small candidate set: staying put, or stepping its full speed in one of
``n_directions`` evenly spaced headings, starting with the heading towards
its gate.  A candidate is scored by how close it gets to the gate corner,
penalised linearly for each neighbour inside the personal radius; any
candidate within the contact radius of another agent is discarded.

Greedy argmax can lock a few agents into a mutual personal-space standoff.
An agent that has stayed put for ``stall_patience`` consecutive ticks
therefore scores its next move on gate distance alone (contact stays hard).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields
from enum import IntEnum
from fractions import Fraction

import numba as nb
import numpy as np

from .geometry import OccupancyIndex, Vec2, neighbors_within
from .rng import RngStream, permutation

GATE_IDS = ("G1", "G2", "G3", "G4")
SCENARIOS = ("S1", "S2", "S3", "S4")
STRATEGIES = ("RGA", "VEGA", "CGA")
# top-left, top-right, bottom-left, bottom-right
S4_SHARES = (Fraction(75, 100), Fraction(10, 100), Fraction(10, 100), Fraction(5, 100))
_EPS = 1e-9


class AgentKind(IntEnum):
    NORMAL = 0
    VULNERABLE = 1


class PlacementError(RuntimeError):
    pass


class FairnessUndefinedError(ArithmeticError):
    pass


@dataclass
class EvacParams:
    width: float = 100.0
    height: float = 100.0
    gate_size: float = 5.0
    n_vulnerable: int = 340
    n_normal: int = 1023
    normal_speed: tuple[float, float] = (1.0, 1.3)
    vulnerable_speed: tuple[float, float] = (0.5, 0.65)
    personal_radius: float = 1.2
    contact_radius: float = 0.4
    repulsion: float = 2.0
    n_directions: int = 16
    stall_patience: int = 10
    designated_gate: str = "G1"
    # side of the S2 gathering square as a fraction of the arena width,
    # and its centre as fractions of (width, height)
    s2_side: float = 0.35
    s2_center: tuple[float, float] = (0.275, 0.275)
    # VEGA: normal agents may not use the designated gate
    vega_exclusive: bool = True
    # also reject a step whose straight path passes within contact_radius of
    # another agent (off: only the landing point is checked)
    swept_contact: bool = False
    max_ticks: int = 2000
    placement_retries: int = 2000

    def __post_init__(self):
        self.normal_speed = tuple(self.normal_speed)
        self.vulnerable_speed = tuple(self.vulnerable_speed)
        self.s2_center = tuple(self.s2_center)
        self.validate()

    def validate(self):
        for name in ("width", "height", "gate_size", "personal_radius",
                     "contact_radius", "s2_side"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.repulsion < 0:
            raise ValueError("repulsion must be non-negative")
        if self.n_vulnerable < 0 or self.n_normal < 0:
            raise ValueError("population counts must be non-negative")
        if self.n_vulnerable + self.n_normal == 0:
            raise ValueError("population must be positive")
        for name in ("normal_speed", "vulnerable_speed"):
            lo, hi = getattr(self, name)
            if not 0 < lo <= hi:
                raise ValueError(f"{name} must satisfy 0 < lo <= hi")
        if self.stall_patience < 1:
            raise ValueError("stall_patience must be >= 1")
        if self.n_directions < 1:
            raise ValueError("n_directions must be >= 1")
        if self.designated_gate not in GATE_IDS:
            raise ValueError(f"designated_gate must be one of {GATE_IDS}")
        if self.max_ticks <= 0:
            raise ValueError("max_ticks must be positive")
        if 2 * self.gate_size > min(self.width, self.height):
            raise ValueError("gate regions overlap")

    @property
    def population(self) -> int:
        return self.n_vulnerable + self.n_normal


@dataclass(frozen=True)
class Gate:
    id: str
    region: tuple[float, float, float, float]  # x0, y0, x1, y1
    anchor: Vec2

    def contains(self, p) -> bool:
        x, y = p
        x0, y0, x1, y1 = self.region
        return x0 - _EPS <= x <= x1 + _EPS and y0 - _EPS <= y <= y1 + _EPS


def make_gates(width: float, height: float, size: float) -> list[Gate]:
    corners = [(0.0, 0.0), (width, 0.0), (0.0, height), (width, height)]
    gates = []
    for gid, (cx, cy) in zip(GATE_IDS, corners):
        x0 = 0.0 if cx == 0.0 else width - size
        y0 = 0.0 if cy == 0.0 else height - size
        gates.append(Gate(gid, (x0, y0, x0 + size, y0 + size), Vec2(cx, cy)))
    return gates


@dataclass
class EvacAgent:
    id: int
    kind: AgentKind
    position: Vec2
    speed: float
    assigned_gate: str
    evac_time: int | None


@dataclass
class EvacWorld:
    params: EvacParams
    gates: list[Gate]
    pos: np.ndarray          # (n, 2) float64
    speed: np.ndarray        # (n,) float64
    kind: np.ndarray         # (n,) int8, AgentKind values
    gate: np.ndarray         # (n,) int64 gate index, -1 = unassigned
    evac_time: np.ndarray    # (n,) int64, -1 while inside
    rng: RngStream
    stalled: np.ndarray | None = None  # (n,) int64 consecutive ticks without moving
    scenario: str = ""
    tick: int = 0

    def __post_init__(self):
        if self.stalled is None:
            self.stalled = np.zeros(self.pos.shape[0], dtype=np.int64)

    @property
    def n(self) -> int:
        return self.pos.shape[0]

    @property
    def bounds(self) -> tuple[float, float]:
        return self.params.width, self.params.height

    @property
    def active(self) -> np.ndarray:
        return self.evac_time < 0

    @property
    def remaining(self) -> int:
        return int(np.count_nonzero(self.evac_time < 0))

    @property
    def evacuated(self) -> int:
        return self.n - self.remaining

    def agent(self, i: int) -> EvacAgent:
        g = int(self.gate[i])
        t = int(self.evac_time[i])
        return EvacAgent(
            id=i,
            kind=AgentKind(int(self.kind[i])),
            position=Vec2(float(self.pos[i, 0]), float(self.pos[i, 1])),
            speed=float(self.speed[i]),
            assigned_gate=GATE_IDS[g] if g >= 0 else "",
            evac_time=t if t >= 0 else None,
        )

    @property
    def agents(self) -> list[EvacAgent]:
        return [self.agent(i) for i in range(self.n)]

    def gate_arrays(self):
        anchors = np.array([[g.anchor.x, g.anchor.y] for g in self.gates])
        rects = np.array([g.region for g in self.gates], dtype=np.float64)
        return anchors, rects


@dataclass
class EvacMetrics:
    avg_V: float
    avg_N: float
    ratio: float
    avg_all: float
    gate_times: tuple[int, int, int, int]
    censored: int = 0
    ticks: int = 0

    def as_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "gate_times"}
        for gid, t in zip(GATE_IDS, self.gate_times):
            d[gid] = int(t)
        return d


# ---------------------------------------------------------------- scenarios

def largest_remainder(total: int, shares) -> list[int]:
    """Integer quotas summing to ``total``; leftover units go to the largest
    fractional parts, ties to the lower index."""
    raw = [Fraction(total) * Fraction(s) for s in shares]
    base = [int(math.floor(r)) for r in raw]
    left = total - sum(base)
    order = sorted(range(len(raw)), key=lambda k: (-(raw[k] - base[k]), k))
    for k in order[:left]:
        base[k] += 1
    return base


def scenario_regions(scenario: str, params: EvacParams):
    """List of (rect, count) placement regions for ``scenario``."""
    w, h, n = params.width, params.height, params.population
    if scenario == "S1":
        return [((w / 4, h / 4, 3 * w / 4, 3 * h / 4), n)]
    if scenario == "S2":
        s = params.s2_side * w
        cx, cy = params.s2_center[0] * w, params.s2_center[1] * h
        return [((cx - s / 2, cy - s / 2, cx + s / 2, cy + s / 2), n)]
    if scenario == "S3":
        return [((0.0, 0.0, w, h), n)]
    if scenario == "S4":
        quads = [
            (0.0, 0.0, w / 2, h / 2),    # top-left
            (w / 2, 0.0, w, h / 2),      # top-right
            (0.0, h / 2, w / 2, h),      # bottom-left
            (w / 2, h / 2, w, h),        # bottom-right
        ]
        return list(zip(quads, largest_remainder(n, S4_SHARES)))
    raise ValueError(f"unknown scenario {scenario!r}")


def generate_scenario(scenario: str, params: EvacParams, rng: RngStream) -> EvacWorld:
    """Place the population for ``scenario`` and draw kinds and speeds.

    RNG order: positions (agent id order, rejection retries inline), then a
    shuffle of ids whose first ``n_vulnerable`` entries become vulnerable,
    then one speed draw per agent in id order.
    """
    if scenario not in SCENARIOS:
        raise ValueError(f"unknown scenario {scenario!r}")
    gates = make_gates(params.width, params.height, params.gate_size)
    n = params.population
    pos = np.empty((n, 2))
    cr = params.contact_radius
    cell = cr
    buckets: dict[tuple[int, int], list[int]] = {}
    i = 0
    for (x0, y0, x1, y1), count in scenario_regions(scenario, params):
        x0, x1 = max(x0, 0.0), min(x1, params.width)
        y0, y1 = max(y0, 0.0), min(y1, params.height)
        for _ in range(count):
            for _attempt in range(params.placement_retries):
                x = rng.uniform_real(x0, x1)
                y = rng.uniform_real(y0, y1)
                if any(g.contains((x, y)) for g in gates):
                    continue
                cx, cy = int(x // cell), int(y // cell)
                clash = False
                for bx in (cx - 1, cx, cx + 1):
                    for by in (cy - 1, cy, cy + 1):
                        for j in buckets.get((bx, by), ()):
                            if math.hypot(pos[j, 0] - x, pos[j, 1] - y) <= cr:
                                clash = True
                                break
                if not clash:
                    break
            else:
                raise PlacementError(
                    f"scenario {scenario}: could not place agent {i} without overlap "
                    f"after {params.placement_retries} attempts"
                )
            pos[i] = x, y
            buckets.setdefault((cx, cy), []).append(i)
            i += 1

    ids = list(range(n))
    rng.shuffle(ids)
    kind = np.zeros(n, dtype=np.int8)
    kind[ids[: params.n_vulnerable]] = AgentKind.VULNERABLE
    speed = np.empty(n)
    for k in range(n):
        lo, hi = params.vulnerable_speed if kind[k] else params.normal_speed
        speed[k] = rng.uniform_real(lo, hi)
    return EvacWorld(
        params=params,
        gates=gates,
        pos=pos,
        speed=speed,
        kind=kind,
        gate=np.full(n, -1, dtype=np.int64),
        evac_time=np.full(n, -1, dtype=np.int64),
        rng=rng,
        scenario=scenario,
    )


def world_from_agents(params: EvacParams, positions, speeds, kinds=None, seed: int = 0) -> EvacWorld:
    """Hand-built scene (tests, micro-benchmarks).  ``kinds`` defaults to
    all normal; gates are left unassigned."""
    pos = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
    n = pos.shape[0]
    speed = np.asarray(speeds, dtype=np.float64).reshape(n)
    kind = np.zeros(n, dtype=np.int8) if kinds is None else np.asarray(kinds, dtype=np.int8)
    if np.any(speed <= 0):
        raise ValueError("speeds must be positive")
    if np.any(pos < 0) or np.any(pos[:, 0] > params.width) or np.any(pos[:, 1] > params.height):
        raise ValueError("positions must lie inside the arena")
    return EvacWorld(
        params=params,
        gates=make_gates(params.width, params.height, params.gate_size),
        pos=pos.copy(), speed=speed.copy(), kind=kind,
        gate=np.full(n, -1, dtype=np.int64),
        evac_time=np.full(n, -1, dtype=np.int64),
        rng=RngStream(seed),
    )


def nearest_gate(world: EvacWorld, p, exclude: int = -1) -> int:
    """Index of the gate whose corner is closest to ``p``; ties go to the
    lower gate id."""
    x, y = p
    best, best_d = -1, math.inf
    for k, g in enumerate(world.gates):
        if k == exclude:
            continue
        d = math.hypot(g.anchor.x - x, g.anchor.y - y)
        if d < best_d:
            best, best_d = k, d
    return best


def assign_gates(strategy: str, world: EvacWorld, designated_gate: str | None = None,
                 rng: RngStream | None = None) -> EvacWorld:
    """Set every agent's gate.  Only RGA consumes randomness (one draw per
    agent, id order).

    Under VEGA the designated gate is reserved for vulnerable agents; normal
    agents take the nearest of the remaining gates unless
    ``params.vega_exclusive`` is off.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    rng = rng or world.rng
    designated = GATE_IDS.index(designated_gate or world.params.designated_gate)
    reserved = designated if world.params.vega_exclusive else -1
    for i in range(world.n):
        if strategy == "RGA":
            world.gate[i] = rng.uniform_int(0, len(GATE_IDS) - 1)
        elif strategy == "VEGA":
            if world.kind[i] == AgentKind.VULNERABLE:
                world.gate[i] = designated
            else:
                world.gate[i] = nearest_gate(world, world.pos[i], exclude=reserved)
        else:
            world.gate[i] = nearest_gate(world, world.pos[i])
    return world


# ------------------------------------------------------------------ kernels

@nb.njit(cache=True)
def _candidates(px, py, speed, ax, ay, k_dirs, width, height):
    out = np.empty((k_dirs + 1, 2))
    out[0, 0] = px
    out[0, 1] = py
    m = 1
    theta0 = math.atan2(ay - py, ax - px)
    for k in range(k_dirs):
        th = theta0 + 2.0 * math.pi * k / k_dirs
        cx = px + speed * math.cos(th)
        cy = py + speed * math.sin(th)
        if 0.0 <= cx <= width and 0.0 <= cy <= height:
            out[m, 0] = cx
            out[m, 1] = cy
            m += 1
    return out[:m]


@nb.njit(cache=True)
def _seg_dist(px, py, qx, qy, x, y):
    """Distance from (x, y) to the segment p-q."""
    vx = qx - px
    vy = qy - py
    L2 = vx * vx + vy * vy
    t = 0.0
    if L2 > 0.0:
        t = min(max(((x - px) * vx + (y - py) * vy) / L2, 0.0), 1.0)
    return math.hypot(px + t * vx - x, py + t * vy - y)


@nb.njit(cache=True)
def _in_rect(x, y, rect):
    return (rect[0] - _EPS <= x <= rect[2] + _EPS) and (rect[1] - _EPS <= y <= rect[3] + _EPS)


@nb.njit(cache=True)
def _cell_of(x, y, cell, nx, ny):
    cx = min(max(int(x / cell), 0), nx - 1)
    cy = min(max(int(y / cell), 0), ny - 1)
    return cy * nx + cx


@nb.njit(cache=True)
def _grid_insert(i, c, head, nxt, prv, cell_of):
    cell_of[i] = c
    prv[i] = -1
    nxt[i] = head[c]
    if head[c] >= 0:
        prv[head[c]] = i
    head[c] = i


@nb.njit(cache=True)
def _grid_remove(i, head, nxt, prv, cell_of):
    c = cell_of[i]
    if prv[i] >= 0:
        nxt[prv[i]] = nxt[i]
    else:
        head[c] = nxt[i]
    if nxt[i] >= 0:
        prv[nxt[i]] = prv[i]
    nxt[i] = -1
    prv[i] = -1
    cell_of[i] = -1


@nb.njit(cache=True)
def _build_grid(pos, active, cell, nx, ny):
    n = pos.shape[0]
    head = np.full(nx * ny, -1, dtype=np.int64)
    nxt = np.full(n, -1, dtype=np.int64)
    prv = np.full(n, -1, dtype=np.int64)
    cell_of = np.full(n, -1, dtype=np.int64)
    for i in range(n):
        if active[i]:
            _grid_insert(i, _cell_of(pos[i, 0], pos[i, 1], cell, nx, ny), head, nxt, prv, cell_of)
    return head, nxt, prv, cell_of


@nb.njit(cache=True)
def _step_kernel(pos, speed, gate, evac_time, stalled, order, anchors, rects, tick,
                 width, height, k_dirs, rho, contact, w_rep, patience, swept,
                 cell, nx, ny, head, nxt, prv, cell_of, nbr_buf):
    n_exit = 0
    for oi in range(order.shape[0]):
        i = order[oi]
        if evac_time[i] >= 0:
            continue
        g = gate[i]
        ax = anchors[g, 0]
        ay = anchors[g, 1]
        px = pos[i, 0]
        py = pos[i, 1]
        reach = speed[i] + max(rho, contact)
        # gather neighbours within reach of the current position
        lo_x = max(int((px - reach) / cell), 0)
        hi_x = min(int((px + reach) / cell), nx - 1)
        lo_y = max(int((py - reach) / cell), 0)
        hi_y = min(int((py + reach) / cell), ny - 1)
        m = 0
        for cy in range(lo_y, hi_y + 1):
            for cx in range(lo_x, hi_x + 1):
                j = head[cy * nx + cx]
                while j >= 0:
                    if j != i:
                        dx = pos[j, 0] - px
                        dy = pos[j, 1] - py
                        if dx * dx + dy * dy <= reach * reach:
                            if m == nbr_buf.shape[0]:
                                break
                            nbr_buf[m] = j
                            m += 1
                    j = nxt[j]
        cands = _candidates(px, py, speed[i], ax, ay, k_dirs, width, height)
        w_i = w_rep if stalled[i] < patience else 0.0
        best = -1
        best_u = -np.inf
        for c in range(cands.shape[0]):
            qx = cands[c, 0]
            qy = cands[c, 1]
            u = -math.hypot(qx - ax, qy - ay)
            feasible = True
            for k in range(m):
                j = nbr_buf[k]
                d = math.hypot(pos[j, 0] - qx, pos[j, 1] - qy)
                if d <= contact:
                    feasible = False
                    break
                # no stepping through another agent on the way
                if swept and c > 0 and _seg_dist(px, py, qx, qy, pos[j, 0], pos[j, 1]) <= contact:
                    feasible = False
                    break
                if d < rho:
                    u -= w_i * (rho - d)
            if feasible and u > best_u:
                best_u = u
                best = c
        if best > 0:
            stalled[i] = 0
            nx_ = cands[best, 0]
            ny_ = cands[best, 1]
            pos[i, 0] = nx_
            pos[i, 1] = ny_
            newc = _cell_of(nx_, ny_, cell, nx, ny)
            if newc != cell_of[i]:
                _grid_remove(i, head, nxt, prv, cell_of)
                _grid_insert(i, newc, head, nxt, prv, cell_of)
        else:
            stalled[i] += 1
        if _in_rect(pos[i, 0], pos[i, 1], rects[g]):
            evac_time[i] = tick + 1
            _grid_remove(i, head, nxt, prv, cell_of)
            n_exit += 1
    return n_exit


class _Grid:
    """Kernel-side cell lists, kept in sync with a world between ticks."""

    def __init__(self, world: EvacWorld):
        p = world.params
        self.cell = max(p.personal_radius, p.contact_radius)
        self.nx = int(p.width // self.cell) + 1
        self.ny = int(p.height // self.cell) + 1
        self.head, self.nxt, self.prv, self.cell_of = _build_grid(
            world.pos, world.active, self.cell, self.nx, self.ny
        )
        self.nbr_buf = np.empty(max(world.n, 1), dtype=np.int64)


# ------------------------------------------------------------- public API

def candidate_positions(world: EvacWorld, agent_id: int) -> list[Vec2]:
    """Stay-put plus ``n_directions`` full-speed steps, starting towards the
    assigned gate; out-of-bounds points are dropped."""
    i = agent_id
    if world.evac_time[i] >= 0:
        raise ValueError(f"agent {i} already evacuated")
    a = world.gates[int(world.gate[i])].anchor
    c = _candidates(world.pos[i, 0], world.pos[i, 1], world.speed[i], a.x, a.y,
                    world.params.n_directions, world.params.width, world.params.height)
    return [Vec2(float(x), float(y)) for x, y in c]


def position_utility(world: EvacWorld, agent_id: int, pos, index: OccupancyIndex | None = None) -> float:
    """Score of moving ``agent_id`` to ``pos``; ``-inf`` if infeasible.

    ``-|pos - gate corner| - repulsion * sum(personal_radius - d_j)`` over the
    other remaining agents j with ``d_j < personal_radius``.  The repulsion
    term is dropped for a stalled agent.
    """
    p = world.params
    w_rep = p.repulsion if world.stalled[agent_id] < p.stall_patience else 0.0
    if index is None:
        ids = np.nonzero(world.active)[0]
        index = OccupancyIndex(ids, world.pos[ids], cell_size=p.personal_radius)
    a = world.gates[int(world.gate[agent_id])].anchor
    x, y = pos
    px, py = (float(v) for v in world.pos[agent_id])
    u = -math.hypot(x - a.x, y - a.y)
    if p.swept_contact and (x, y) != (px, py):
        step = math.hypot(x - px, y - py)
        for j, _ in neighbors_within(index, (px, py), step + p.contact_radius):
            if j != agent_id and _seg_dist(px, py, x, y, *world.pos[j]) <= p.contact_radius:
                return -math.inf
    for j, d in neighbors_within(index, (x, y), max(p.personal_radius, p.contact_radius)):
        if j == agent_id:
            continue
        if d <= p.contact_radius:
            return -math.inf
        if d < p.personal_radius:
            u -= w_rep * (p.personal_radius - d)
    return u


def evac_step(world: EvacWorld, grid: _Grid | None = None, trace=None) -> EvacWorld:
    """Advance one tick in place.  Agent order is a fresh seeded shuffle of
    the remaining ids."""
    if world.remaining == 0:
        raise ValueError("no agents left to evacuate")
    if grid is None:
        grid = _Grid(world)
    p = world.params
    active_ids = np.nonzero(world.evac_time < 0)[0]
    order = active_ids[permutation(world.rng.state, active_ids.shape[0])]
    anchors, rects = world.gate_arrays()
    _step_kernel(world.pos, world.speed, world.gate, world.evac_time, world.stalled,
                 order, anchors, rects, world.tick, p.width, p.height, p.n_directions,
                 p.personal_radius, p.contact_radius, p.repulsion, p.stall_patience,
                 p.swept_contact,
                 grid.cell, grid.nx, grid.ny, grid.head, grid.nxt, grid.prv,
                 grid.cell_of, grid.nbr_buf)
    world.tick += 1
    if trace is not None:
        write_trace_tick(trace, world, active_ids)
    return world


def write_trace_tick(fh, world: EvacWorld, ids) -> None:
    for i in ids:
        fh.write(json.dumps({
            "tick": world.tick, "id": int(i),
            "x": round(float(world.pos[i, 0]), 6), "y": round(float(world.pos[i, 1]), 6),
            "evacuated": bool(world.evac_time[i] >= 0),
        }) + "\n")


def fairness_index(avg_V: float, avg_N: float) -> float:
    if not avg_V > 0:
        raise FairnessUndefinedError(f"fairness index undefined for avg_V={avg_V}")
    return avg_N / avg_V


def compute_metrics(world: EvacWorld, max_ticks: int) -> EvacMetrics:
    exited = world.evac_time >= 0
    times = np.where(exited, world.evac_time, max_ticks).astype(np.float64)
    vul = world.kind == AgentKind.VULNERABLE
    nor = ~vul
    for label, mask in (("vulnerable", vul), ("normal", nor)):
        if not np.any(mask & exited):
            raise FairnessUndefinedError(f"no evacuated agents in the {label} group")
    avg_V = float(times[vul].mean())
    avg_N = float(times[nor].mean())
    avg_all = (avg_V * vul.sum() + avg_N * nor.sum()) / world.n
    gate_times = []
    for k in range(len(world.gates)):
        sel = exited & (world.gate == k)
        gate_times.append(int(world.evac_time[sel].max()) if np.any(sel) else 0)
    return EvacMetrics(
        avg_V=avg_V, avg_N=avg_N, ratio=fairness_index(avg_V, avg_N),
        avg_all=float(avg_all), gate_times=tuple(gate_times),
        censored=int(np.count_nonzero(~exited)), ticks=world.tick,
    )


def simulate(world: EvacWorld, max_ticks: int, trace=None) -> EvacWorld:
    grid = _Grid(world)
    if trace is not None:
        write_trace_tick(trace, world, np.arange(world.n))
    while world.tick < max_ticks and world.remaining > 0:
        evac_step(world, grid, trace)
    return world


def run_evacuation(scenario: str, strategy: str, params: EvacParams | None = None,
                   seed: int = 0, max_ticks: int | None = None, trace=None) -> EvacMetrics:
    """Build, assign and run one evacuation; agents still inside at
    ``max_ticks`` are censored at ``max_ticks``."""
    params = params or EvacParams()
    max_ticks = params.max_ticks if max_ticks is None else max_ticks
    if max_ticks <= 0:
        raise ValueError("max_ticks must be positive")
    rng = RngStream(seed)
    world = generate_scenario(scenario, params, rng)
    assign_gates(strategy, world, params.designated_gate, rng)
    simulate(world, max_ticks, trace)
    return compute_metrics(world, max_ticks)
