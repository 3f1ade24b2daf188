"""Numeric hot kernels: batch 1-NN classification and occupancy-grid A*.

Both kernels are numba @njit-compiled by default. Setting GUIDESIM_NO_NUMBA=1
(or any non-empty value other than "0") selects the fallback path: a
vectorized numpy implementation for the 1-NN scan and the uncompiled search
for A*. The two paths produce bit-identical outputs; tests assert this and
benchmarks/bench_kernels.py compares their throughput.
"""

from __future__ import annotations

import heapq
import os

import numpy as np

SQRT2 = 2.0 ** 0.5


def numba_disabled() -> bool:
    flag = os.environ.get("GUIDESIM_NO_NUMBA", "")
    return flag not in ("", "0")


def _knn_nearest_loop(px, py, sx, sy, tau):
    """Index of the nearest sample per point, -1 beyond tau; first-wins ties."""
    n = px.shape[0]
    m = sx.shape[0]
    out = np.full(n, -1, dtype=np.int64)
    tau2 = tau * tau
    for i in range(n):
        best = -1
        best_d2 = 1e300
        for j in range(m):
            dx = px[i] - sx[j]
            dy = py[i] - sy[j]
            d2 = dx * dx + dy * dy
            if d2 < best_d2:
                best = j
                best_d2 = d2
        if best >= 0 and best_d2 > tau2:
            best = -1
        out[i] = best
    return out


def _knn_nearest_numpy(px, py, sx, sy, tau):
    """Vectorized fallback with the same tie-breaking (argmin keeps first)."""
    n = px.shape[0]
    if sx.shape[0] == 0:
        return np.full(n, -1, dtype=np.int64)
    dx = px[:, None] - sx[None, :]
    dy = py[:, None] - sy[None, :]
    d2 = dx * dx + dy * dy
    idx = np.argmin(d2, axis=1).astype(np.int64)
    idx[d2[np.arange(n), idx] > tau * tau] = -1
    return idx


def _astar_cells(occ, start_r, start_c, goal_r, goal_c):
    """8-connected A* over an occupancy grid; returns flat cell indices.

    Ties in the open list break on (f, h, cell index) so the expansion order,
    and therefore the returned path, is identical however the function is
    compiled. Diagonal moves may not cut blocked corners. An empty array
    means no path exists.
    """
    H, W = occ.shape
    n = H * W
    start = start_r * W + start_c
    goal = goal_r * W + goal_c
    empty = np.empty(0, dtype=np.int64)
    if occ[start_r, start_c] != 0 or occ[goal_r, goal_c] != 0:
        return empty
    if start == goal:
        res = np.empty(1, dtype=np.int64)
        res[0] = start
        return res
    g = np.full(n, 1e30)
    came = np.full(n, -1, dtype=np.int64)
    closed = np.zeros(n, dtype=np.uint8)
    dx = abs(goal_c - start_c)
    dy = abs(goal_r - start_r)
    h0 = (max(dx, dy) + (SQRT2 - 1.0) * min(dx, dy)) * 1.0
    heap = [(h0, h0, start)]
    g[start] = 0.0
    found = False
    while len(heap) > 0:
        f, h, idx = heapq.heappop(heap)
        if closed[idx] == 1:
            continue
        closed[idx] = 1
        if idx == goal:
            found = True
            break
        r = idx // W
        c = idx % W
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                if dr == 0 and dc == 0:
                    continue
                nr = r + dr
                nc = c + dc
                if nr < 0 or nr >= H or nc < 0 or nc >= W:
                    continue
                if occ[nr, nc] != 0:
                    continue
                if dr != 0 and dc != 0:
                    if occ[r, nc] != 0 or occ[nr, c] != 0:
                        continue
                    step = SQRT2
                else:
                    step = 1.0
                nidx = nr * W + nc
                ng = g[idx] + step
                if ng < g[nidx]:
                    g[nidx] = ng
                    came[nidx] = idx
                    ddx = abs(goal_c - nc)
                    ddy = abs(goal_r - nr)
                    nh = (max(ddx, ddy) + (SQRT2 - 1.0) * min(ddx, ddy)) * 1.0
                    heapq.heappush(heap, (ng + nh, nh, nidx))
    if not found:
        return empty
    cnt = 1
    cur = goal
    while came[cur] != -1:
        cnt += 1
        cur = came[cur]
    res = np.empty(cnt, dtype=np.int64)
    cur = goal
    for i in range(cnt - 1, -1, -1):
        res[i] = cur
        cur = came[cur]
    return res


NUMBA_ACTIVE = False
if not numba_disabled():
    try:
        from numba import njit

        knn_nearest = njit(cache=True)(_knn_nearest_loop)
        astar_cells = njit(cache=True)(_astar_cells)
        NUMBA_ACTIVE = True
    except ImportError:  # pragma: no cover - numba is a hard dependency
        knn_nearest = _knn_nearest_numpy
        astar_cells = _astar_cells
else:
    knn_nearest = _knn_nearest_numpy
    astar_cells = _astar_cells


def warmup() -> None:
    """Force JIT compilation so timed paths pay no compile cost."""
    occ = np.zeros((4, 4), dtype=np.uint8)
    astar_cells(occ, 0, 0, 3, 3)
    pts = np.zeros(1)
    knn_nearest(pts, pts, np.zeros(1), np.zeros(1), 1.0)
