"""Pheromone field dynamics, gradient following, and anomaly detection."""

from __future__ import annotations

import numpy as np
import pytest

from swarmpatrol import _kernels
from swarmpatrol.field import AnomalyReport, FieldError, FieldParams, PheromoneField

from oracles import bfs_reachable, connected_regions, stencil_step, unscanned_cell_recurrence


def make_field(w=8, h=8, blocked=None, **params):
    return PheromoneField(w, h, params=FieldParams(**params), blocked=blocked)


class TestStep:
    def test_single_cell_accumulates_growth(self):
        f = make_field(1, 1, urgency_growth=1.0, evaporation_rate=0.0, diffusion_rate=0.0)
        f.step()
        assert f.urgency[0, 0] == 1.0

    def test_diffusion_conserves_mass(self):
        rng = np.random.default_rng(3)
        f = make_field(12, 9, urgency_growth=0.0, evaporation_rate=0.0, diffusion_rate=0.2)
        f.urgency[...] = rng.random((9, 12)) * 50
        before = f.total_urgency()
        for _ in range(25):
            f.step()
        assert f.total_urgency() == pytest.approx(before, rel=1e-9)

    def test_center_spike_matches_hand_computed_stencil(self):
        f = make_field(3, 3, urgency_growth=0.0, evaporation_rate=0.0, diffusion_rate=0.1)
        f.urgency[1, 1] = 9.0
        expected = stencil_step(f.urgency.copy(), f.blocked.tolist(), 0.0, 0.0, 0.1)
        f.step()
        assert f.urgency[1, 1] == pytest.approx(5.4)
        for r, c in ((0, 1), (2, 1), (1, 0), (1, 2)):
            assert f.urgency[r, c] == pytest.approx(0.9)
        for r, c in ((0, 0), (0, 2), (2, 0), (2, 2)):
            assert f.urgency[r, c] == 0.0
        np.testing.assert_allclose(f.urgency, expected, rtol=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_random_fields_match_stencil_oracle(self, seed):
        rng = np.random.default_rng(seed)
        blocked = rng.random((7, 11)) < 0.2
        f = make_field(
            11, 7, blocked=blocked,
            urgency_growth=rng.uniform(0, 2),
            evaporation_rate=rng.uniform(0, 0.3),
            diffusion_rate=rng.uniform(0, 0.25),
        )
        f.urgency[~blocked] = rng.random((~blocked).sum()) * 20
        expected = stencil_step(
            f.urgency.copy(), blocked.tolist(),
            f.params.urgency_growth, f.params.evaporation_rate, f.params.diffusion_rate,
        )
        f.step()
        np.testing.assert_allclose(f.urgency, expected, rtol=1e-12, atol=1e-12)

    def test_blocked_cells_stay_zero_and_nonnegative(self):
        rng = np.random.default_rng(11)
        blocked = rng.random((10, 10)) < 0.3
        f = make_field(10, 10, blocked=blocked, diffusion_rate=0.25, evaporation_rate=0.5)
        for tick in range(60):
            f.urgency[~blocked] += rng.random((~blocked).sum())
            f.step()
            assert (f.urgency[blocked] == 0).all()
            assert (f.presence[blocked] == 0).all()
            assert (f.urgency >= 0).all()
            assert (f.presence >= 0).all()

    def test_presence_evaporates_without_diffusing(self):
        f = make_field(5, 5, presence_evaporation=0.5)
        f.presence[2, 2] = 8.0
        f.step()
        assert f.presence[2, 2] == pytest.approx(4.0)
        assert f.presence.sum() == pytest.approx(4.0)  # nothing leaked sideways

    def test_never_scanned_cell_monotone_without_diffusion(self):
        # Growth-only neglect: with zero evaporation and zero diffusion the
        # urgency of an unscanned cell can never drop, whatever gets scanned.
        rng = np.random.default_rng(5)
        f = make_field(6, 6, urgency_growth=0.7, evaporation_rate=0.0, diffusion_rate=0.0)
        watched = (3, 3)
        last = 0.0
        for _ in range(50):
            f.step()
            cells = [(int(r), int(c)) for r, c in rng.integers(0, 6, (4, 2)) if (r, c) != watched]
            f.scan(cells)
            assert f.urgency[watched] >= last
            last = f.urgency[watched]

    def test_uniform_unscanned_field_grows_monotonically_with_diffusion(self):
        blocked = np.zeros((6, 6), dtype=bool)
        blocked[2, 2] = True
        f = make_field(6, 6, blocked=blocked, urgency_growth=1.0,
                       evaporation_rate=0.0, diffusion_rate=0.2)
        last = f.urgency.copy()
        for _ in range(30):
            f.step()
            assert (f.urgency[~blocked] >= last[~blocked] - 1e-12).all()
            last = f.urgency.copy()


class TestScan:
    def test_full_scan_resets_everything(self):
        f = make_field(6, 4)
        for _ in range(10):
            f.step()
        f.scan([(r, c) for r in range(4) for c in range(6)])
        assert f.total_urgency() == 0.0

    def test_empty_footprint_only_deposits(self):
        f = make_field(4, 4)
        for _ in range(3):
            f.step()
        before = f.urgency.copy()
        f.scan([], deposit_at=(1, 1))
        np.testing.assert_array_equal(f.urgency, before)
        assert f.presence[1, 1] == f.params.presence_deposit

    def test_out_of_bounds_footprint_rejected_without_mutation(self):
        f = make_field(4, 4)
        f.step()
        before = f.urgency.copy()
        with pytest.raises(FieldError):
            f.scan([(0, 0), (9, 9)])
        np.testing.assert_array_equal(f.urgency, before)

    def test_unscanned_half_follows_scalar_recurrence(self):
        # Keep diffusion off so each right-half cell obeys the 1-cell recurrence.
        f = make_field(8, 4, urgency_growth=1.0, evaporation_rate=0.03, diffusion_rate=0.0)
        left = [(r, c) for r in range(4) for c in range(4)]
        for _ in range(200):
            f.step()
            f.scan(left)
        expected = unscanned_cell_recurrence(1.0, 0.03, 200)
        right_mean = f.urgency[:, 4:].mean()
        assert right_mean == pytest.approx(expected, rel=1e-12)
        assert f.urgency[:, :4].max() == 0.0

    def test_scan_skips_blocked_cells(self):
        blocked = np.zeros((3, 3), dtype=bool)
        blocked[1, 1] = True
        f = make_field(3, 3, blocked=blocked)
        f.scan([(1, 1)], deposit_at=(1, 1))  # allowed, but a no-op on both grids
        assert f.urgency[1, 1] == 0.0
        assert f.presence[1, 1] == 0.0


class TestGradientTarget:
    def test_uniform_field_stays_put(self):
        f = make_field(7, 7)
        assert f.gradient_target((3, 3), 3) == (3, 3)

    def test_unique_maximum_is_chosen(self):
        f = make_field(7, 7)
        f.urgency[3, 4] = 5.0
        assert f.gradient_target((3, 3), 2) == (3, 4)

    def test_presence_repels(self):
        f = make_field(7, 7)
        f.urgency[3, 4] = 5.0
        f.urgency[3, 2] = 4.0
        f.presence[3, 4] = 3.0  # knocks the bigger peak below the smaller one
        assert f.gradient_target((3, 3), 2) == (3, 2)

    def test_tie_breaks_lowest_row_then_column(self):
        f = make_field(5, 5)
        for cell in ((1, 3), (3, 1), (1, 1)):
            f.urgency[cell] = 7.0
        assert f.gradient_target((2, 2), 3) == (1, 1)

    def test_blocked_start_rejected(self):
        blocked = np.zeros((4, 4), dtype=bool)
        blocked[2, 2] = True
        f = make_field(4, 4, blocked=blocked)
        with pytest.raises(FieldError):
            f.gradient_target((2, 2), 2)

    def test_walled_islet_never_selected(self):
        # 10x10 with a closed ring around (4..6, 4..6); interior urgency is huge.
        blocked = np.zeros((10, 10), dtype=bool)
        for c in range(3, 8):
            blocked[3, c] = blocked[7, c] = True
        for r in range(3, 8):
            blocked[r, 3] = blocked[r, 7] = True
        f = make_field(10, 10, blocked=blocked)
        interior = [(r, c) for r in range(4, 7) for c in range(4, 7)]
        for cell in interior:
            f.urgency[cell] = 1000.0
        for r in range(10):
            for c in range(10):
                if blocked[r, c] or (r, c) in interior:
                    continue
                target = f.gradient_target((r, c), 9)
                assert target not in interior
                reachable = bfs_reachable(blocked.tolist(), (r, c), 9)
                assert target in reachable

    @pytest.mark.parametrize("seed", range(8))
    def test_target_always_reachable_on_random_fields(self, seed):
        rng = np.random.default_rng(seed)
        blocked = rng.random((12, 12)) < 0.35
        f = make_field(12, 12, blocked=blocked)
        f.urgency[~blocked] = rng.random((~blocked).sum()) * 10
        f.presence[~blocked] = rng.random((~blocked).sum()) * 2
        starts = np.argwhere(~blocked)
        for r, c in starts[:: max(1, len(starts) // 20)]:
            start = (int(r), int(c))
            radius = int(rng.integers(1, 7))
            target = f.gradient_target(start, radius)
            assert target in bfs_reachable(blocked.tolist(), start, radius)

    def test_gradient_step_returns_adjacent_first_move(self):
        f = make_field(9, 9)
        f.urgency[0, 8] = 9.0
        tr, tc, nr, nc = f.gradient_step((4, 4), 8)
        assert (tr, tc) == (0, 8)
        assert abs(nr - 4) + abs(nc - 4) == 1


class TestAnomalies:
    def test_fresh_field_has_none(self):
        f = make_field(8, 8)
        assert f.detect_anomalies() == []

    def _ring_field(self, threshold=10.0, min_age=5):
        blocked = np.zeros((10, 10), dtype=bool)
        for c in range(3, 8):
            blocked[3, c] = blocked[7, c] = True
        for r in range(3, 8):
            blocked[r, 3] = blocked[r, 7] = True
        f = make_field(
            10, 10, blocked=blocked,
            urgency_growth=1.0, evaporation_rate=0.0, diffusion_rate=0.05,
            anomaly_threshold=threshold, anomaly_min_age=min_age,
        )
        interior = frozenset((r, c) for r in range(4, 7) for c in range(4, 7))
        return f, interior

    def test_enclosed_islet_reported_exactly_once(self):
        f, interior = self._ring_field()
        outside = [(r, c) for r in range(10) for c in range(10)
                   if not f.blocked[r, c] and (r, c) not in interior]
        for _ in range(40):
            f.step()
            f.scan(outside)
        reports = f.detect_anomalies(threshold=10.0, min_age=5)
        assert len(reports) == 1
        assert reports[0].region == interior
        assert reports[0].severity > 10.0
        assert reports[0].age >= 5
        assert connected_regions(reports[0].region) == [interior]

    def test_region_needs_min_age_not_just_level(self):
        f, interior = self._ring_field(threshold=10.0, min_age=30)
        outside = [(r, c) for r in range(10) for c in range(10)
                   if not f.blocked[r, c] and (r, c) not in interior]
        for _ in range(20):  # enough to pass the level, not the age
            f.step()
            f.scan(outside)
        assert f.urgency[4, 4] > 10.0
        assert f.detect_anomalies(threshold=10.0, min_age=30) == []

    def test_two_islets_give_two_disjoint_reports(self):
        blocked = np.zeros((12, 12), dtype=bool)
        for box_r, box_c in ((1, 1), (7, 7)):
            for d in range(3):
                blocked[box_r, box_c + d] = blocked[box_r + 2, box_c + d] = True
                blocked[box_r + d, box_c] = blocked[box_r + d, box_c + 2] = True
        f = make_field(12, 12, blocked=blocked, urgency_growth=1.0,
                       evaporation_rate=0.0, diffusion_rate=0.0,
                       anomaly_threshold=5.0, anomaly_min_age=3)
        islets = [frozenset({(2, 2)}), frozenset({(8, 8)})]
        outside = [(r, c) for r in range(12) for c in range(12)
                   if not blocked[r, c] and (r, c) not in {(2, 2), (8, 8)}]
        for _ in range(10):
            f.step()
            f.scan(outside)
        reports = f.detect_anomalies(threshold=5.0, min_age=3)
        assert [rep.region for rep in reports] == islets
        assert reports[0].region.isdisjoint(reports[1].region)
        expected = connected_regions({(2, 2), (8, 8)})
        assert sorted(map(sorted, (r.region for r in reports))) == sorted(map(sorted, expected))

    def test_bad_threshold_rejected(self):
        f = make_field(4, 4)
        with pytest.raises(ValueError):
            f.detect_anomalies(threshold=-1.0)


class TestDeterminismAndParams:
    def test_identical_runs_are_bit_identical(self):
        def run():
            f = make_field(16, 16, urgency_growth=1.0)
            rng = np.random.default_rng(9)
            for _ in range(120):
                f.step()
                cells = [(int(r), int(c)) for r, c in rng.integers(0, 16, (6, 2))]
                f.scan(cells, deposit_at=cells[0])
            return f
        a, b = run(), run()
        assert (a.urgency == b.urgency).all()
        assert (a.presence == b.presence).all()
        assert (a.above_age == b.above_age).all()

    def test_param_ranges_enforced(self):
        with pytest.raises(ValueError):
            FieldParams(evaporation_rate=1.0)
        with pytest.raises(ValueError):
            FieldParams(diffusion_rate=0.3)
        with pytest.raises(ValueError):
            FieldParams(presence_evaporation=-0.1)
        with pytest.raises(ValueError):
            FieldParams(anomaly_min_age=0)

    def test_dimensions_immutable_and_snapshot_isolated(self):
        f = make_field(6, 5)
        snap = f.copy()
        f.step()
        assert snap.total_urgency() == 0.0
        assert (snap.width, snap.height) == (6, 5)

    def test_block_cells_wipes_state(self):
        f = make_field(5, 5)
        for _ in range(5):
            f.step()
        f.presence[2, 2] = 3.0
        f.block_cells([(2, 2)])
        assert f.blocked[2, 2]
        assert f.urgency[2, 2] == 0.0
        assert f.presence[2, 2] == 0.0


class TestKernelBackends:
    def test_backends_agree_bit_for_bit(self):
        nat = pytest.importorskip("swarmpatrol._kernels._native")
        pp = _kernels.get_backend("python")
        rng = np.random.default_rng(21)
        for _ in range(40):
            h, w = rng.integers(2, 24, 2)
            u = rng.random((h, w)) * 10
            p = rng.random((h, w)) * 3
            blocked = rng.random((h, w)) < 0.25
            u[blocked] = 0
            p[blocked] = 0
            open_f = (~blocked).astype(np.int32)
            k = np.zeros_like(open_f)
            k[1:, :] += open_f[:-1, :]
            k[:-1, :] += open_f[1:, :]
            k[:, 1:] += open_f[:, :-1]
            k[:, :-1] += open_f[:, 1:]
            args = (rng.uniform(0, 2), rng.uniform(0, 0.5), rng.uniform(0, 0.25), rng.uniform(0, 0.9))
            u1, p1, u2, p2 = u.copy(), p.copy(), u.copy(), p.copy()
            nat.step_field(u1, p1, blocked.view(np.uint8), k, *args)
            pp.step_field(u2, p2, blocked.view(np.uint8), k, *args)
            assert (u1 == u2).all() and (p1 == p2).all()
            opens = np.argwhere(~blocked)
            if len(opens):
                r, c = (int(v) for v in opens[rng.integers(len(opens))])
                radius = int(rng.integers(0, 9))
                assert nat.gradient_step(u1, p1, blocked.view(np.uint8), r, c, radius) == tuple(
                    pp.gradient_step(u2, p2, blocked.view(np.uint8), r, c, radius)
                )
                assert (
                    nat.reachable_mask(blocked.view(np.uint8), r, c, radius)
                    == pp.reachable_mask(blocked.view(np.uint8), r, c, radius)
                ).all()
