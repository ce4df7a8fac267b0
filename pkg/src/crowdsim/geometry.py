"""2D points and a uniform-grid occupancy index with radius queries."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba as nb
import numpy as np


@dataclass(frozen=True)
class Vec2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite Vec2({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y

    def dist(self, other: "Vec2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@nb.njit(cache=True)
def _build_csr(pos, origin, cell, nx, ny):
    n = pos.shape[0]
    keys = np.empty(n, dtype=np.int64)
    for i in range(n):
        cx = min(max(int((pos[i, 0] - origin[0]) / cell), 0), nx - 1)
        cy = min(max(int((pos[i, 1] - origin[1]) / cell), 0), ny - 1)
        keys[i] = cy * nx + cx
    order = np.argsort(keys, kind="mergesort")
    start = np.zeros(nx * ny + 1, dtype=np.int64)
    for i in range(n):
        start[keys[i] + 1] += 1
    for c in range(nx * ny):
        start[c + 1] += start[c]
    return order, start, keys


@nb.njit(cache=True)
def _query(pos, order, start, origin, cell, nx, ny, qx, qy, r):
    lo_x = max(int(math.floor((qx - r - origin[0]) / cell)), 0)
    hi_x = min(int(math.floor((qx + r - origin[0]) / cell)), nx - 1)
    lo_y = max(int(math.floor((qy - r - origin[1]) / cell)), 0)
    hi_y = min(int(math.floor((qy + r - origin[1]) / cell)), ny - 1)
    hits = []
    dists = []
    for cy in range(lo_y, hi_y + 1):
        for cx in range(lo_x, hi_x + 1):
            c = cy * nx + cx
            for k in range(start[c], start[c + 1]):
                i = order[k]
                d = math.hypot(pos[i, 0] - qx, pos[i, 1] - qy)
                if d <= r:
                    hits.append(i)
                    dists.append(d)
    return np.array(hits, dtype=np.int64), np.array(dists, dtype=np.float64)


class OccupancyIndex:
    """Static uniform-grid hash over a set of agent positions.

    Agents are bucketed into square cells of side ``cell_size``; a radius
    query scans only the cells overlapping the query disc.  Rebuild after
    agents move.
    """

    def __init__(self, ids, positions, cell_size: float = 1.0):
        if cell_size <= 0:
            raise ValueError("cell_size must be positive")
        self.ids = np.asarray(ids, dtype=np.int64)
        pos = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
        if pos.shape[0] != self.ids.shape[0]:
            raise ValueError("ids and positions differ in length")
        if not np.all(np.isfinite(pos)):
            raise ValueError("non-finite position in index")
        self.positions = pos
        self.cell_size = float(cell_size)
        if len(pos):
            self.origin = pos.min(axis=0)
            span = pos.max(axis=0) - self.origin
        else:
            self.origin = np.zeros(2)
            span = np.zeros(2)
        self.nx = int(span[0] // cell_size) + 1
        self.ny = int(span[1] // cell_size) + 1
        self._order, self._start, self._cell_of = _build_csr(
            pos, self.origin, self.cell_size, self.nx, self.ny
        )

    def __len__(self):
        return len(self.ids)

    def cell_members(self, cell: int) -> list[int]:
        s, e = self._start[cell], self._start[cell + 1]
        return [int(self.ids[i]) for i in self._order[s:e]]

    def cell_of(self, agent_id: int) -> int:
        (idx,) = np.nonzero(self.ids == agent_id)
        return int(self._cell_of[idx[0]])

    def query_radius(self, pos, r: float) -> list[tuple[int, float]]:
        return neighbors_within(self, pos, r)


def neighbors_within(index: OccupancyIndex, pos, r: float) -> list[tuple[int, float]]:
    """Agents within Euclidean distance ``r`` of ``pos`` as (id, distance),
    sorted by distance then id."""
    if r < 0:
        raise ValueError(f"radius must be non-negative, got {r}")
    if len(index) == 0:
        return []
    qx, qy = (float(v) for v in pos)
    # the kernel over-selects by a hair; distances and the cut are then
    # redone with math.hypot so results match a plain scan bit for bit
    rows, _ = _query(
        index.positions, index._order, index._start, index.origin,
        index.cell_size, index.nx, index.ny, qx, qy, float(r) * (1 + 1e-12) + 1e-12,
    )
    out = []
    for i in rows:
        d = math.hypot(index.positions[i, 0] - qx, index.positions[i, 1] - qy)
        if d <= r:
            out.append((int(index.ids[i]), d))
    out.sort(key=lambda t: (t[1], t[0]))
    return out
