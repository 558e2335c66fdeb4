"""Benchmark the compiled kernels against the numpy fallback.

Times the two per-tick hot spots (field stencil, gradient BFS) on the
default mission scale, checks the backends agree bit-for-bit while at it,
and reports a whole-mission tick rate for each backend.

    python benchmarks/bench_kernels.py [--grid 64] [--ticks 2000] [--uavs 12]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from swarmpatrol._kernels import get_backend
from swarmpatrol.field import FieldParams, PheromoneField
from swarmpatrol.swarm import SwarmParams, Vehicle, World


def neighbor_counts(blocked: np.ndarray) -> np.ndarray:
    open_f = (~blocked).astype(np.int32)
    count = np.zeros_like(open_f)
    count[1:, :] += open_f[:-1, :]
    count[:-1, :] += open_f[1:, :]
    count[:, 1:] += open_f[:, :-1]
    count[:, :-1] += open_f[:, 1:]
    return count


def bench_step(backend, grid: int, iterations: int) -> float:
    rng = np.random.default_rng(1)
    urgency = rng.random((grid, grid)) * 100
    presence = rng.random((grid, grid)) * 10
    blocked = rng.random((grid, grid)) < 0.05
    urgency[blocked] = presence[blocked] = 0.0
    counts = neighbor_counts(blocked)
    blocked_u8 = blocked.view(np.uint8)
    start = time.perf_counter()
    for _ in range(iterations):
        backend.step_field(urgency, presence, blocked_u8, counts, 1.0, 0.0005, 0.05, 0.2)
    return (time.perf_counter() - start) / iterations


def bench_gradient(backend, grid: int, radius: int, iterations: int) -> float:
    rng = np.random.default_rng(2)
    urgency = rng.random((grid, grid)) * 100
    presence = rng.random((grid, grid)) * 10
    blocked = rng.random((grid, grid)) < 0.05
    urgency[blocked] = presence[blocked] = 0.0
    blocked_u8 = blocked.view(np.uint8)
    opens = np.argwhere(~blocked)
    picks = opens[rng.integers(0, len(opens), size=iterations)]
    start = time.perf_counter()
    for r, c in picks:
        backend.gradient_step(urgency, presence, blocked_u8, int(r), int(c), radius)
    return (time.perf_counter() - start) / iterations


def bench_mission(kernel_name: str, grid: int, ticks: int, uavs: int) -> float:
    import swarmpatrol._kernels as kernels

    original = (kernels.step_field, kernels.gradient_step, kernels.reachable_mask)
    backend = get_backend(kernel_name)
    kernels.step_field = backend.step_field
    kernels.gradient_step = backend.gradient_step
    kernels.reachable_mask = backend.reachable_mask
    try:
        field = PheromoneField(grid, grid, cell_size=25.0, params=FieldParams())
        world = World(field, params=SwarmParams(), seed=0)
        for i in range(uavs):
            world.add_vehicle(Vehicle(f"uav{i:02d}", 150.0 + 30 * (i % 6),
                                      180.0 + 30 * (i // 6), 20.0, 40.0))
        start = time.perf_counter()
        for _ in range(ticks):
            world.step()
        return ticks / (time.perf_counter() - start)
    finally:
        kernels.step_field, kernels.gradient_step, kernels.reachable_mask = original


def verify_parity(grid: int) -> None:
    native = get_backend("native")
    python = get_backend("python")
    rng = np.random.default_rng(3)
    urgency = rng.random((grid, grid)) * 100
    presence = rng.random((grid, grid)) * 10
    blocked = rng.random((grid, grid)) < 0.05
    urgency[blocked] = presence[blocked] = 0.0
    counts = neighbor_counts(blocked)
    u1, p1, u2, p2 = urgency.copy(), presence.copy(), urgency.copy(), presence.copy()
    native.step_field(u1, p1, blocked.view(np.uint8), counts, 1.0, 0.0005, 0.05, 0.2)
    python.step_field(u2, p2, blocked.view(np.uint8), counts, 1.0, 0.0005, 0.05, 0.2)
    assert (u1 == u2).all() and (p1 == p2).all(), "backends diverged"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--grid", type=int, default=64)
    parser.add_argument("--ticks", type=int, default=2000)
    parser.add_argument("--uavs", type=int, default=12)
    parser.add_argument("--radius", type=int, default=8)
    args = parser.parse_args()

    try:
        get_backend("native")
        have_native = True
    except ImportError:
        have_native = False
        print("native kernels not built; showing the python backend only\n")

    names = ["native", "python"] if have_native else ["python"]
    if have_native:
        verify_parity(args.grid)
        print(f"parity check on {args.grid}x{args.grid}: backends bit-identical\n")

    print(f"{'kernel':<22}{'step_field':>14}{'gradient_step':>16}{'mission rate':>16}")
    rows = {}
    for name in names:
        backend = get_backend(name)
        step_us = bench_step(backend, args.grid, 300) * 1e6
        grad_us = bench_gradient(backend, args.grid, args.radius, 2000) * 1e6
        rate = bench_mission(name, args.grid, args.ticks, args.uavs)
        rows[name] = (step_us, grad_us, rate)
        print(f"{name:<22}{step_us:>11.1f} us{grad_us:>13.1f} us{rate:>11.0f} t/s")
    if have_native:
        s_n, g_n, r_n = rows["native"]
        s_p, g_p, r_p = rows["python"]
        print(
            f"\nnative speedup: step x{s_p / s_n:.1f}, gradient x{g_p / g_n:.1f}, "
            f"mission x{r_n / r_p:.1f}"
        )


if __name__ == "__main__":
    main()
