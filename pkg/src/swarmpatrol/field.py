"""Dual pheromone field driving the patrol.

Two scalar grids over the airbase: *urgency* builds up wherever nothing has
scanned recently and pulls patrollers in, *presence* is dropped by each UAV
on its own cell and pushes others away. A boolean no-fly mask carves holes
in the grid; regions it encloses become unreachable for gradient followers
and show up as anomalies once their urgency has stayed high long enough.

Per-tick update order (step): growth -> evaporation -> diffusion, then the
anomaly age counters; scans and presence deposits happen between steps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from swarmpatrol import _kernels

Cell = tuple[int, int]


class FieldError(ValueError):
    """Raised on out-of-bounds or blocked-cell misuse of field operations."""


@dataclass(frozen=True)
class FieldParams:
    """Rates of the per-tick dynamics; all are per tick.

    ``diffusion_rate`` is the fraction handed to each unblocked 4-neighbor,
    so it must not exceed 0.25 or a cell could give away more than it has.
    ``anomaly_threshold`` is absolute when set; otherwise the threshold is
    ``anomaly_threshold_factor`` times the mean urgency of unblocked cells,
    re-evaluated every tick.
    """

    urgency_growth: float = 1.0
    # Low evaporation keeps urgency proportional to neglect age over whole
    # missions; at 0.01 it saturates near growth/rate and neglected regions
    # become indistinguishable, which ruins gradient patrol.
    evaporation_rate: float = 0.0005
    diffusion_rate: float = 0.05
    presence_deposit: float = 10.0
    presence_evaporation: float = 0.2
    anomaly_threshold: Optional[float] = None
    anomaly_threshold_factor: float = 5.0
    anomaly_min_age: int = 50

    def __post_init__(self) -> None:
        if self.urgency_growth < 0:
            raise ValueError("urgency_growth must be >= 0")
        if not 0.0 <= self.evaporation_rate < 1.0:
            raise ValueError("evaporation_rate must be in [0, 1)")
        if not 0.0 <= self.diffusion_rate <= 0.25:
            raise ValueError("diffusion_rate must be in [0, 0.25]")
        if self.presence_deposit < 0:
            raise ValueError("presence_deposit must be >= 0")
        if not 0.0 <= self.presence_evaporation < 1.0:
            raise ValueError("presence_evaporation must be in [0, 1)")
        if self.anomaly_threshold is not None and self.anomaly_threshold <= 0:
            raise ValueError("anomaly_threshold must be > 0 when set")
        if self.anomaly_threshold_factor <= 0:
            raise ValueError("anomaly_threshold_factor must be > 0")
        if self.anomaly_min_age < 1:
            raise ValueError("anomaly_min_age must be >= 1")


@dataclass(frozen=True)
class AnomalyReport:
    """A 4-connected unblocked region stuck above the urgency threshold."""

    region: frozenset[Cell]
    severity: float  # max urgency inside the region
    age: int  # consecutive ticks the whole region has been above threshold

    def __post_init__(self) -> None:
        if not self.region:
            raise ValueError("anomaly region must be non-empty")


class PheromoneField:
    """The shared grid state. Width/height are cell counts, fixed at creation.

    Mutation happens only through step/scan/deposit/block_cells; simulation
    code owns the single writer, readers should take ``copy()`` snapshots.
    """

    def __init__(
        self,
        width: int,
        height: int,
        cell_size: float = 25.0,
        params: FieldParams | None = None,
        blocked: np.ndarray | None = None,
    ) -> None:
        if width < 1 or height < 1:
            raise ValueError("grid dimensions must be positive")
        if cell_size <= 0:
            raise ValueError("cell_size must be > 0")
        self.width = int(width)
        self.height = int(height)
        self.cell_size = float(cell_size)
        self.params = params or FieldParams()
        self.urgency = np.zeros((self.height, self.width), dtype=np.float64)
        self.presence = np.zeros((self.height, self.width), dtype=np.float64)
        if blocked is None:
            self.blocked = np.zeros((self.height, self.width), dtype=bool)
        else:
            blocked = np.asarray(blocked, dtype=bool)
            if blocked.shape != (self.height, self.width):
                raise ValueError("blocked mask shape must match (height, width)")
            self.blocked = blocked.copy()
        self.above_age = np.zeros((self.height, self.width), dtype=np.int32)
        self._refresh_neighbor_counts()

    # -- geometry helpers -------------------------------------------------

    def in_bounds(self, cell: Cell) -> bool:
        r, c = cell
        return 0 <= r < self.height and 0 <= c < self.width

    def cell_of(self, x: float, y: float) -> Cell:
        """Grid cell containing map point (x, y) in meters, clamped to bounds."""
        c = min(self.width - 1, max(0, int(x // self.cell_size)))
        r = min(self.height - 1, max(0, int(y // self.cell_size)))
        return r, c

    def center_of(self, cell: Cell) -> tuple[float, float]:
        r, c = cell
        return (c + 0.5) * self.cell_size, (r + 0.5) * self.cell_size

    def _refresh_neighbor_counts(self) -> None:
        open_f = (~self.blocked).astype(np.int32)
        count = np.zeros_like(open_f)
        count[1:, :] += open_f[:-1, :]
        count[:-1, :] += open_f[1:, :]
        count[:, 1:] += open_f[:, :-1]
        count[:, :-1] += open_f[:, 1:]
        self._nbr_count = np.ascontiguousarray(count)

    def _blocked_u8(self) -> np.ndarray:
        return self.blocked.view(np.uint8)

    # -- mutations ---------------------------------------------------------

    def block_cells(self, cells: Iterable[Cell]) -> None:
        """Mark cells no-fly. Their pheromone and age state is wiped."""
        cells = list(cells)
        for cell in cells:
            if not self.in_bounds(cell):
                raise FieldError(f"no-fly cell out of bounds: {cell}")
        for r, c in cells:
            self.blocked[r, c] = True
            self.urgency[r, c] = 0.0
            self.presence[r, c] = 0.0
            self.above_age[r, c] = 0
        self._refresh_neighbor_counts()

    def step(self) -> None:
        """Advance the grids one tick and update the anomaly age counters."""
        p = self.params
        _kernels.step_field(
            self.urgency,
            self.presence,
            self._blocked_u8(),
            self._nbr_count,
            p.urgency_growth,
            p.evaporation_rate,
            p.diffusion_rate,
            p.presence_evaporation,
        )
        threshold = self.effective_anomaly_threshold()
        above = (self.urgency > threshold) & ~self.blocked if threshold > 0 else np.zeros_like(self.blocked)
        self.above_age = np.where(above, self.above_age + 1, 0).astype(np.int32)

    def scan(self, footprint: Iterable[Cell], deposit_at: Cell | None = None) -> None:
        """Zero urgency under the sensor footprint; drop presence at the UAV cell.

        Out-of-bounds footprint cells are rejected before anything mutates.
        """
        cells = list(footprint)
        for cell in cells:
            if not self.in_bounds(cell):
                raise FieldError(f"footprint cell out of bounds: {cell}")
        if deposit_at is not None and not self.in_bounds(deposit_at):
            raise FieldError(f"deposit cell out of bounds: {deposit_at}")
        for r, c in cells:
            if not self.blocked[r, c]:
                self.urgency[r, c] = 0.0
        if deposit_at is not None and not self.blocked[deposit_at]:
            self.presence[deposit_at] += self.params.presence_deposit

    def deposit_presence(self, cell: Cell, amount: float | None = None) -> None:
        """Extra presence drop, e.g. a patroller claiming its current target."""
        if not self.in_bounds(cell):
            raise FieldError(f"deposit cell out of bounds: {cell}")
        if amount is None:
            amount = self.params.presence_deposit
        if amount < 0:
            raise ValueError("presence amount must be >= 0")
        if not self.blocked[cell]:
            self.presence[cell] += amount

    # -- queries -----------------------------------------------------------

    def effective_anomaly_threshold(self) -> float:
        """Absolute threshold if configured, else factor x mean open-cell urgency."""
        if self.params.anomaly_threshold is not None:
            return self.params.anomaly_threshold
        open_cells = ~self.blocked
        if not open_cells.any():
            return 0.0
        return self.params.anomaly_threshold_factor * float(self.urgency[open_cells].mean())

    def gradient_target(self, pos: Cell, radius: int) -> Cell:
        """Best-scoring (urgency - presence) cell reachable within ``radius`` steps.

        Requires a strict improvement over the score at ``pos``; ties go to the
        lowest row, then column. Unreachable cells (e.g. walled-off islets) are
        never returned.
        """
        tr, tc, _, _ = self.gradient_step(pos, radius)
        return tr, tc

    def gradient_step(
        self, pos: Cell, radius: int, goal: Cell | None = None
    ) -> tuple[int, int, int, int]:
        """Like gradient_target but also returns the first path step toward it.

        With ``goal`` set, skips target selection and paths toward that cell;
        the stay-put result signals an unreachable goal.
        """
        if not self.in_bounds(pos):
            raise FieldError(f"position out of bounds: {pos}")
        if self.blocked[pos]:
            raise FieldError(f"position is inside a no-fly cell: {pos}")
        if radius < 0:
            raise FieldError("radius must be >= 0")
        gr, gc = goal if goal is not None else (-1, -1)
        return _kernels.gradient_step(
            self.urgency, self.presence, self._blocked_u8(), pos[0], pos[1], radius, gr, gc
        )

    def reachable_from(self, pos: Cell, radius: int) -> np.ndarray:
        """Boolean mask of cells reachable from pos within ``radius`` steps."""
        if not self.in_bounds(pos):
            raise FieldError(f"position out of bounds: {pos}")
        return _kernels.reachable_mask(self._blocked_u8(), pos[0], pos[1], radius)

    def detect_anomalies(
        self, threshold: float | None = None, min_age: int | None = None
    ) -> list[AnomalyReport]:
        """Maximal 4-connected regions above threshold for >= min_age ticks.

        Age counters are maintained per tick against the field's effective
        threshold; an explicit ``threshold`` additionally filters current
        membership. Reports are ordered by their topmost-leftmost cell.
        """
        if threshold is None:
            threshold = self.effective_anomaly_threshold()
            if threshold <= 0:
                return []
        elif threshold <= 0:
            raise ValueError("threshold must be > 0")
        if min_age is None:
            min_age = self.params.anomaly_min_age
        mask = (self.above_age >= min_age) & (self.urgency > threshold) & ~self.blocked
        if not mask.any():
            return []
        reports = []
        seen = np.zeros_like(mask)
        for r in range(self.height):
            for c in range(self.width):
                if not mask[r, c] or seen[r, c]:
                    continue
                stack = [(r, c)]
                seen[r, c] = True
                region = []
                while stack:
                    cr, cc = stack.pop()
                    region.append((cr, cc))
                    for nr, nc in ((cr - 1, cc), (cr + 1, cc), (cr, cc - 1), (cr, cc + 1)):
                        if 0 <= nr < self.height and 0 <= nc < self.width:
                            if mask[nr, nc] and not seen[nr, nc]:
                                seen[nr, nc] = True
                                stack.append((nr, nc))
                severity = max(float(self.urgency[cell]) for cell in region)
                age = min(int(self.above_age[cell]) for cell in region)
                reports.append(AnomalyReport(frozenset(region), severity, age))
        return reports

    def total_urgency(self) -> float:
        return float(self.urgency.sum())

    def copy(self) -> "PheromoneField":
        """Immutable-enough snapshot for concurrent readers."""
        snap = PheromoneField.__new__(PheromoneField)
        snap.width = self.width
        snap.height = self.height
        snap.cell_size = self.cell_size
        snap.params = self.params
        snap.urgency = self.urgency.copy()
        snap.presence = self.presence.copy()
        snap.blocked = self.blocked.copy()
        snap.above_age = self.above_age.copy()
        snap._nbr_count = self._nbr_count.copy()
        return snap
