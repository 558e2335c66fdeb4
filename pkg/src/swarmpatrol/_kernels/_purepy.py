"""Numpy implementations of the per-tick hot kernels.

This is the fallback backend used when the compiled extension is missing.
Both backends must stay bit-identical: every floating-point operation here
is ordered exactly like its counterpart in ``_native.pyx`` (growth and
evaporation first, then one diffusion pass accumulating neighbor mass in
N, S, W, E order).
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def step_field(
    urgency: np.ndarray,
    presence: np.ndarray,
    blocked: np.ndarray,
    nbr_count: np.ndarray,
    growth: float,
    evaporation: float,
    diffusion: float,
    presence_evaporation: float,
) -> None:
    """One tick of grid dynamics, in place.

    Unblocked cells: urgency <- (urgency + growth) * (1 - evaporation), then
    each cell hands ``diffusion`` times its value to every unblocked 4-neighbor.
    Presence only evaporates. Blocked cells are pinned at zero.
    """
    blk = blocked != 0  # uint8 and bool masks both arrive here
    open_mask = ~blk

    grown = (urgency + growth) * (1.0 - evaporation)
    grown[blk] = 0.0

    if diffusion > 0.0:
        inflow = np.zeros_like(grown)
        inflow[1:, :] += grown[:-1, :]
        inflow[:-1, :] += grown[1:, :]
        inflow[:, 1:] += grown[:, :-1]
        inflow[:, :-1] += grown[:, 1:]
        out = grown * (1.0 - diffusion * nbr_count) + diffusion * inflow
        out[blk] = 0.0
        urgency[...] = out
    else:
        urgency[...] = grown

    presence *= 1.0 - presence_evaporation
    presence[blk] = 0.0
    np.maximum(urgency, 0.0, out=urgency, where=open_mask)
    np.maximum(presence, 0.0, out=presence, where=open_mask)


def _bfs_window(blocked: np.ndarray, row: int, col: int, radius: int):
    """BFS distances from (row, col) on a clipped window, -1 = unreached."""
    h, w = blocked.shape
    r0, c0 = max(0, row - radius), max(0, col - radius)
    r1, c1 = min(h, row + radius + 1), min(w, col + radius + 1)
    open_win = blocked[r0:r1, c0:c1] == 0
    dist = np.full(open_win.shape, -1, dtype=np.int32)
    dist[row - r0, col - c0] = 0
    frontier = dist == 0
    for d in range(1, radius + 1):
        grown = np.zeros_like(frontier)
        grown[1:, :] |= frontier[:-1, :]
        grown[:-1, :] |= frontier[1:, :]
        grown[:, 1:] |= frontier[:, :-1]
        grown[:, :-1] |= frontier[:, 1:]
        newly = grown & open_win & (dist < 0)
        if not newly.any():
            break
        dist[newly] = d
        frontier = newly
    return dist, r0, c0


def gradient_step(
    urgency: np.ndarray,
    presence: np.ndarray,
    blocked: np.ndarray,
    row: int,
    col: int,
    radius: int,
    goal_row: int = -1,
    goal_col: int = -1,
) -> tuple[int, int, int, int]:
    """Pick the best reachable cell within ``radius`` BFS steps of (row, col).

    Score is urgency - presence; the winner must beat the score at the start
    cell strictly, ties broken by lowest (row, col). Returns
    (target_row, target_col, next_row, next_col) where next is the first step
    of a shortest path, found by backtracking from the target through the
    lexicographically smallest neighbor one BFS level down.

    With an explicit goal cell the argmax is skipped and the path step heads
    there instead; an unreachable goal returns the stay-put sentinel.
    """
    dist, r0, c0 = _bfs_window(blocked, row, col, radius)
    lr, lc = row - r0, col - c0
    if goal_row >= 0:
        tr, tc = goal_row - r0, goal_col - c0
        if not (0 <= tr < dist.shape[0] and 0 <= tc < dist.shape[1]) or dist[tr, tc] <= 0:
            return row, col, row, col
    else:
        score = urgency[r0 : r0 + dist.shape[0], c0 : c0 + dist.shape[1]] - presence[
            r0 : r0 + dist.shape[0], c0 : c0 + dist.shape[1]
        ]
        masked = np.where(dist >= 0, score, -np.inf)
        flat = int(np.argmax(masked))
        tr, tc = flat // masked.shape[1], flat % masked.shape[1]
        if not masked[tr, tc] > score[lr, lc]:
            return row, col, row, col

    cr, cc = tr, tc
    hh, ww = dist.shape
    while dist[cr, cc] > 1:
        want = dist[cr, cc] - 1
        for nr, nc in ((cr - 1, cc), (cr, cc - 1), (cr, cc + 1), (cr + 1, cc)):
            if 0 <= nr < hh and 0 <= nc < ww and dist[nr, nc] == want:
                cr, cc = nr, nc
                break
    return tr + r0, tc + c0, cr + r0, cc + c0


def reachable_mask(blocked: np.ndarray, row: int, col: int, radius: int) -> np.ndarray:
    """Boolean grid of cells reachable from (row, col) in <= radius steps."""
    dist, r0, c0 = _bfs_window(blocked, row, col, radius)
    mask = np.zeros(blocked.shape, dtype=bool)
    mask[r0 : r0 + dist.shape[0], c0 : c0 + dist.shape[1]] = dist >= 0
    return mask
