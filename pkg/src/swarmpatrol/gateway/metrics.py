"""Coverage and workload metrics, computed from the mission log only.

Revisit intervals per cell are the gaps between consecutive scans of that
cell, counting the stretch before the first scan and after the last one, so
a never-scanned cell has one interval equal to the whole run. The per-cell
mean interval therefore reduces to T / (scans + 1); the per-cell max keeps
the spacing information.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class CoverageMetrics:
    mean_revisit: float
    max_revisit: float
    frac_within_target: float
    target: int
    ticks: int
    cells: int


@dataclass
class WorkloadTraceRow:
    tick: int
    continuous: float
    discrete_windowed: int
    discrete_continuous: int


@dataclass
class MetricsCollector:
    """Accumulates scan records and workload rows during a run."""

    n_cells: int
    target: int = 120
    last_scan: np.ndarray = field(init=False)
    scan_count: np.ndarray = field(init=False)
    max_gap: np.ndarray = field(init=False)
    ticks: int = 0
    workload_rows: list[WorkloadTraceRow] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.last_scan = np.zeros(self.n_cells, dtype=np.int64)
        self.scan_count = np.zeros(self.n_cells, dtype=np.int64)
        self.max_gap = np.zeros(self.n_cells, dtype=np.int64)

    def record_scans(self, tick: int, scanned: list[int]) -> None:
        self.ticks = max(self.ticks, tick)
        if scanned:
            idx = np.asarray(scanned, dtype=np.int64)
            gaps = tick - self.last_scan[idx]
            self.max_gap[idx] = np.maximum(self.max_gap[idx], gaps)
            self.scan_count[idx] += 1
            self.last_scan[idx] = tick

    def record_workload(self, row: WorkloadTraceRow) -> None:
        self.workload_rows.append(row)

    def coverage(self) -> CoverageMetrics:
        ticks = max(self.ticks, 1)
        tail = ticks - self.last_scan
        final_max = np.maximum(self.max_gap, tail)
        mean_per_cell = ticks / (self.scan_count + 1.0)
        return CoverageMetrics(
            mean_revisit=float(mean_per_cell.mean()),
            max_revisit=float(final_max.max()),
            frac_within_target=float((mean_per_cell <= self.target).mean()),
            target=self.target,
            ticks=ticks,
            cells=self.n_cells,
        )


def coverage_from_log(entries: list[dict], n_cells: int, target: int = 120) -> CoverageMetrics:
    """Recompute coverage purely from logged per-tick scan records."""
    collector = MetricsCollector(n_cells=n_cells, target=target)
    for entry in entries:
        if entry["category"] == "coverage":
            collector.record_scans(entry["tick"], entry["body"]["scanned"])
    return collector.coverage()


def metrics_csv(collector: MetricsCollector) -> str:
    """One CSV: per-tick workload trace rows plus a final coverage row."""
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow([
        "kind", "tick", "continuous", "discrete_windowed", "discrete_continuous",
        "mean_revisit", "max_revisit", "frac_within_target",
    ])
    for row in collector.workload_rows:
        writer.writerow([
            "workload", row.tick, f"{row.continuous:.6f}",
            row.discrete_windowed, row.discrete_continuous, "", "", "",
        ])
    cov = collector.coverage()
    writer.writerow([
        "coverage", cov.ticks, "", "", "",
        f"{cov.mean_revisit:.3f}", f"{cov.max_revisit:.0f}", f"{cov.frac_within_target:.4f}",
    ])
    return out.getvalue()
