"""Grid path planning for command conversion.

Shortest 4-connected path over the no-fly mask. Among equal-length paths
the planner returns the one whose successive cells are lexicographically
smallest: it walks forward from the start, always stepping onto the
smallest (row, col) neighbor that still lies on some shortest path. That
rule is simple enough to restate in an independent oracle, which is the
point.
"""

from __future__ import annotations

from collections import deque
from typing import Optional

import numpy as np

from swarmpatrol.field import Cell


def shortest_path(blocked: np.ndarray, start: Cell, goal: Cell) -> Optional[list[Cell]]:
    """Cell path from start to goal inclusive, or None when walled off."""
    h, w = blocked.shape
    for name, (r, c) in (("start", start), ("goal", goal)):
        if not (0 <= r < h and 0 <= c < w):
            raise ValueError(f"{name} cell out of bounds: {(r, c)}")
        if blocked[r, c]:
            raise ValueError(f"{name} cell is blocked: {(r, c)}")
    if start == goal:
        return [start]

    # BFS from the goal so the forward walk can descend the distance map.
    dist = np.full((h, w), -1, dtype=np.int32)
    dist[goal] = 0
    queue = deque([goal])
    while queue:
        r, c = queue.popleft()
        d = dist[r, c]
        for nr, nc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
            if 0 <= nr < h and 0 <= nc < w and not blocked[nr, nc] and dist[nr, nc] < 0:
                dist[nr, nc] = d + 1
                queue.append((nr, nc))
    if dist[start] < 0:
        return None

    path = [start]
    cur = start
    while cur != goal:
        r, c = cur
        step = None
        for nr, nc in ((r - 1, c), (r, c - 1), (r, c + 1), (r + 1, c)):  # lexicographic
            if 0 <= nr < h and 0 <= nc < w and dist[nr, nc] == dist[cur] - 1:
                step = (nr, nc)
                break
        assert step is not None  # BFS guarantees a descent neighbor
        path.append(step)
        cur = step
    return path


def compress_corners(path: list[Cell]) -> list[Cell]:
    """Drop interior cells of straight runs, keeping turns and endpoints."""
    if len(path) <= 2:
        return list(path)
    out = [path[0]]
    for prev, cur, nxt in zip(path, path[1:], path[2:]):
        if (cur[0] - prev[0], cur[1] - prev[1]) != (nxt[0] - cur[0], nxt[1] - cur[1]):
            out.append(cur)
    out.append(path[-1])
    return out
