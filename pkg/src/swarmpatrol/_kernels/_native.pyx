# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the hot per-tick kernels.

Must stay bit-identical to ``_purepy``: identical operation order (growth and
evaporation, then one diffusion pass summing neighbors N, S, W, E), no fast-math,
no reassociation.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "native"


def step_field(
    double[:, ::1] urgency,
    double[:, ::1] presence,
    cnp.uint8_t[:, ::1] blocked,
    int[:, ::1] nbr_count,
    double growth,
    double evaporation,
    double diffusion,
    double presence_evaporation,
):
    cdef Py_ssize_t h = urgency.shape[0]
    cdef Py_ssize_t w = urgency.shape[1]
    cdef Py_ssize_t r, c
    cdef double keep = 1.0 - evaporation
    cdef double p_keep = 1.0 - presence_evaporation
    cdef double inflow, v
    cdef cnp.ndarray[cnp.float64_t, ndim=2] grown_arr = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] grown = grown_arr

    for r in range(h):
        for c in range(w):
            if blocked[r, c]:
                grown[r, c] = 0.0
            else:
                grown[r, c] = (urgency[r, c] + growth) * keep

    if diffusion > 0.0:
        for r in range(h):
            for c in range(w):
                if blocked[r, c]:
                    urgency[r, c] = 0.0
                    continue
                inflow = 0.0
                if r > 0:
                    inflow += grown[r - 1, c]
                if r < h - 1:
                    inflow += grown[r + 1, c]
                if c > 0:
                    inflow += grown[r, c - 1]
                if c < w - 1:
                    inflow += grown[r, c + 1]
                urgency[r, c] = grown[r, c] * (1.0 - diffusion * nbr_count[r, c]) + diffusion * inflow
    else:
        for r in range(h):
            for c in range(w):
                urgency[r, c] = grown[r, c]

    for r in range(h):
        for c in range(w):
            if blocked[r, c]:
                presence[r, c] = 0.0
            else:
                presence[r, c] = presence[r, c] * p_keep
                if urgency[r, c] < 0.0:
                    urgency[r, c] = 0.0
                if presence[r, c] < 0.0:
                    presence[r, c] = 0.0


def gradient_step(
    double[:, ::1] urgency,
    double[:, ::1] presence,
    cnp.uint8_t[:, ::1] blocked,
    int row,
    int col,
    int radius,
    int goal_row=-1,
    int goal_col=-1,
):
    cdef Py_ssize_t h = urgency.shape[0]
    cdef Py_ssize_t w = urgency.shape[1]
    cdef Py_ssize_t r0 = max(0, row - radius)
    cdef Py_ssize_t c0 = max(0, col - radius)
    cdef Py_ssize_t r1 = min(h, row + radius + 1)
    cdef Py_ssize_t c1 = min(w, col + radius + 1)
    cdef Py_ssize_t hh = r1 - r0
    cdef Py_ssize_t ww = c1 - c0

    cdef cnp.ndarray[cnp.int32_t, ndim=2] dist_arr = np.full((hh, ww), -1, dtype=np.int32)
    cdef int[:, ::1] dist = dist_arr
    cdef cnp.ndarray[cnp.int32_t, ndim=1] queue_arr = np.empty(hh * ww, dtype=np.int32)
    cdef int[::1] queue = queue_arr

    cdef Py_ssize_t lr = row - r0
    cdef Py_ssize_t lc = col - c0
    cdef Py_ssize_t head = 0, tail = 0
    cdef Py_ssize_t cr, cc, nr, nc
    cdef int d, want

    dist[lr, lc] = 0
    queue[tail] = <int>(lr * ww + lc)
    tail += 1
    while head < tail:
        cr = queue[head] // ww
        cc = queue[head] % ww
        head += 1
        d = dist[cr, cc]
        if d >= radius:
            continue
        if cr > 0 and dist[cr - 1, cc] < 0 and not blocked[r0 + cr - 1, c0 + cc]:
            dist[cr - 1, cc] = d + 1
            queue[tail] = <int>((cr - 1) * ww + cc)
            tail += 1
        if cr < hh - 1 and dist[cr + 1, cc] < 0 and not blocked[r0 + cr + 1, c0 + cc]:
            dist[cr + 1, cc] = d + 1
            queue[tail] = <int>((cr + 1) * ww + cc)
            tail += 1
        if cc > 0 and dist[cr, cc - 1] < 0 and not blocked[r0 + cr, c0 + cc - 1]:
            dist[cr, cc - 1] = d + 1
            queue[tail] = <int>(cr * ww + cc - 1)
            tail += 1
        if cc < ww - 1 and dist[cr, cc + 1] < 0 and not blocked[r0 + cr, c0 + cc + 1]:
            dist[cr, cc + 1] = d + 1
            queue[tail] = <int>(cr * ww + cc + 1)
            tail += 1

    # Row-major scan with strict improvement keeps the first occurrence of the
    # maximum: lowest row, then lowest column, same as the numpy argmax.
    cdef double origin_score = urgency[row, col] - presence[row, col]
    cdef double best = origin_score
    cdef Py_ssize_t tr = lr, tc = lc
    cdef double sc
    if goal_row >= 0:
        tr = goal_row - r0
        tc = goal_col - c0
        if tr < 0 or tr >= hh or tc < 0 or tc >= ww or dist[tr, tc] <= 0:
            return row, col, row, col
    else:
        for cr in range(hh):
            for cc in range(ww):
                if dist[cr, cc] < 0:
                    continue
                sc = urgency[r0 + cr, c0 + cc] - presence[r0 + cr, c0 + cc]
                if sc > best:
                    best = sc
                    tr = cr
                    tc = cc
        if tr == lr and tc == lc:
            return row, col, row, col

    cr = tr
    cc = tc
    while dist[cr, cc] > 1:
        want = dist[cr, cc] - 1
        if cr > 0 and dist[cr - 1, cc] == want:
            cr -= 1
            continue
        if cc > 0 and dist[cr, cc - 1] == want:
            cc -= 1
            continue
        if cc < ww - 1 and dist[cr, cc + 1] == want:
            cc += 1
            continue
        cr += 1
    return tr + r0, tc + c0, cr + r0, cc + c0


def reachable_mask(cnp.uint8_t[:, ::1] blocked, int row, int col, int radius):
    cdef Py_ssize_t h = blocked.shape[0]
    cdef Py_ssize_t w = blocked.shape[1]
    cdef Py_ssize_t r0 = max(0, row - radius)
    cdef Py_ssize_t c0 = max(0, col - radius)
    cdef Py_ssize_t r1 = min(h, row + radius + 1)
    cdef Py_ssize_t c1 = min(w, col + radius + 1)
    cdef Py_ssize_t hh = r1 - r0
    cdef Py_ssize_t ww = c1 - c0
    cdef cnp.ndarray[cnp.int32_t, ndim=2] dist_arr = np.full((hh, ww), -1, dtype=np.int32)
    cdef int[:, ::1] dist = dist_arr
    cdef cnp.ndarray[cnp.int32_t, ndim=1] queue_arr = np.empty(hh * ww, dtype=np.int32)
    cdef int[::1] queue = queue_arr
    cdef Py_ssize_t head = 0, tail = 0
    cdef Py_ssize_t cr, cc
    cdef int d

    dist[row - r0, col - c0] = 0
    queue[tail] = <int>((row - r0) * ww + (col - c0))
    tail += 1
    while head < tail:
        cr = queue[head] // ww
        cc = queue[head] % ww
        head += 1
        d = dist[cr, cc]
        if d >= radius:
            continue
        if cr > 0 and dist[cr - 1, cc] < 0 and not blocked[r0 + cr - 1, c0 + cc]:
            dist[cr - 1, cc] = d + 1
            queue[tail] = <int>((cr - 1) * ww + cc)
            tail += 1
        if cr < hh - 1 and dist[cr + 1, cc] < 0 and not blocked[r0 + cr + 1, c0 + cc]:
            dist[cr + 1, cc] = d + 1
            queue[tail] = <int>((cr + 1) * ww + cc)
            tail += 1
        if cc > 0 and dist[cr, cc - 1] < 0 and not blocked[r0 + cr, c0 + cc - 1]:
            dist[cr, cc - 1] = d + 1
            queue[tail] = <int>(cr * ww + cc - 1)
            tail += 1
        if cc < ww - 1 and dist[cr, cc + 1] < 0 and not blocked[r0 + cr, c0 + cc + 1]:
            dist[cr, cc + 1] = d + 1
            queue[tail] = <int>(cr * ww + cc + 1)
            tail += 1

    mask = np.zeros((h, w), dtype=bool)
    mask[r0:r1, c0:c1] = dist_arr >= 0
    return mask
