"""Workload estimators: windowed level criteria, discounted sum, agreement."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swarmpatrol.workload import (
    CONTINUOUS,
    WINDOWED,
    EventKind,
    MissionEvent,
    WorkloadParams,
    WorkloadTracker,
    calibrate_agreement,
    classify_windowed,
    level_continuous,
)

from oracles import brute_force_workload


def events(*specs):
    """specs: (tick, 'c'|'a') pairs -> MissionEvent list."""
    kinds = {"c": EventKind.COMMAND, "a": EventKind.ALARM}
    return [MissionEvent(t, kinds[k], f"s{i}") for i, (t, k) in enumerate(specs)]


class TestWindowed:
    def test_quiet_log_is_level_one(self):
        assert classify_windowed([], now=1000).discrete_level == 1

    def test_single_command_is_level_two(self):
        log = events((950, "c"))
        assert classify_windowed(log, now=1000).discrete_level == 2

    def test_single_alarm_is_level_three(self):
        log = events((950, "a"))
        assert classify_windowed(log, now=1000).discrete_level == 3

    def test_several_alarms_are_level_four(self):
        log = events((950, "a"), (980, "a"))
        assert classify_windowed(log, now=1000).discrete_level == 4

    def test_alarms_outrank_commands(self):
        log = events((940, "c"), (950, "c"), (960, "c"), (970, "a"))
        assert classify_windowed(log, now=1000).discrete_level == 3

    def test_exhaustive_count_grid(self):
        # All command x alarm combinations from 0..3: the level rule in full.
        for n_cmd in range(4):
            for n_alarm in range(4):
                log = events(*[(900 + i, "c") for i in range(n_cmd)],
                             *[(950 + i, "a") for i in range(n_alarm)])
                expected = 4 if n_alarm >= 2 else 3 if n_alarm == 1 else 2 if n_cmd else 1
                assert classify_windowed(log, now=1000).discrete_level == expected

    def test_events_outside_window_are_invisible(self):
        params = WorkloadParams(window=180)
        stale = events((700, "a"), (819, "a"), (820, "c"))
        # (now - W, now] with now=1000, W=180 -> ticks 821..1000 count
        assert classify_windowed(stale, now=1000, params=params).discrete_level == 1
        edge = events((821, "a"))
        assert classify_windowed(edge, now=1000, params=params).discrete_level == 3

    def test_future_events_do_not_count(self):
        log = events((1500, "a"))
        assert classify_windowed(log, now=1000).discrete_level == 1

    def test_unordered_log_rejected(self):
        log = events((900, "a"), (800, "c"))
        with pytest.raises(ValueError):
            classify_windowed(log, now=1000)


class TestContinuous:
    def test_empty_log_is_zero_level_one(self):
        state = level_continuous([], now=500)
        assert state.continuous_level == 0.0
        assert state.discrete_level == 1

    def test_single_fresh_alarm(self):
        state = level_continuous(events((1000, "a")), now=1000)
        assert state.continuous_level == pytest.approx(2.5)
        assert state.discrete_level == 3

    def test_alarm_decays_through_half_life(self):
        params = WorkloadParams()
        log = events((1000 - int(params.half_life), "a"), (1000, "a"))
        state = level_continuous(log, now=1000, params=params)
        assert state.continuous_level == pytest.approx(3.75)
        assert state.discrete_level == 3
        log3 = log + events((1000, "a"))
        state3 = level_continuous(log3, now=1000, params=params)
        assert state3.continuous_level == pytest.approx(6.25)
        assert state3.discrete_level == 4

    def test_matches_brute_force_oracle(self):
        log = events((0, "c"), (40, "a"), (41, "c"), (300, "a"), (301, "a"), (990, "c"))
        params = WorkloadParams()
        expected = brute_force_workload(
            [(e.tick, e.kind.value) for e in log], 1000, params.w_cmd, params.w_alarm, params.half_life
        )
        assert level_continuous(log, now=1000).continuous_level == pytest.approx(expected, rel=1e-12)

    @given(
        st.lists(
            st.tuples(st.integers(0, 5000), st.sampled_from(["c", "a"])),
            max_size=200,
        ),
        st.integers(0, 6000),
    )
    @settings(max_examples=150, deadline=None)
    def test_tracker_equals_brute_force_on_random_logs(self, raw, now):
        raw.sort(key=lambda p: p[0])
        log = events(*raw)
        tracker = WorkloadTracker()
        for event in log:
            tracker.append(event)
        expected = brute_force_workload(
            [(e.tick, e.kind.value) for e in log], now,
            tracker.params.w_cmd, tracker.params.w_alarm, tracker.params.half_life,
        )
        got = tracker.continuous(now) if now >= (log[-1].tick if log else 0) else None
        if got is not None:
            assert got == pytest.approx(expected, rel=1e-9, abs=1e-12)

    @given(st.integers(0, 2000), st.sampled_from(list(EventKind)))
    @settings(max_examples=60, deadline=None)
    def test_append_never_decreases_level_at_that_instant(self, tick, kind):
        tracker = WorkloadTracker()
        tracker.append(MissionEvent(tick, EventKind.COMMAND, "seed"))
        later = tick + 100
        before = tracker.continuous(later)
        tracker.append(MissionEvent(later, kind, "x"))
        assert tracker.continuous(later) > before

    def test_decay_is_strictly_decreasing_toward_zero(self):
        tracker = WorkloadTracker()
        tracker.append(MissionEvent(0, EventKind.ALARM, "a"))
        levels = [tracker.continuous(now) for now in range(0, 4000, 200)]
        assert all(a > b for a, b in zip(levels, levels[1:]))
        assert levels[-1] < 1e-6

    def test_tracker_rejects_out_of_order_appends(self):
        tracker = WorkloadTracker()
        tracker.append(MissionEvent(100, EventKind.ALARM, "a"))
        with pytest.raises(ValueError):
            tracker.append(MissionEvent(50, EventKind.COMMAND, "c"))


class TestAgreement:
    def test_defaults_agree_on_all_canonical_scenarios(self):
        report = calibrate_agreement()
        assert report.all_agree
        assert [c.windowed_level for c in report.cases] == [1, 2, 3, 4]

    def test_weak_alarm_weight_breaks_single_alarm_case(self):
        report = calibrate_agreement(WorkloadParams(w_alarm=1.0))
        assert not report.all_agree
        broken = {c.scenario for c in report.disagreements()}
        assert "one_alarm" in broken

    def test_threshold_permutation_rejected(self):
        with pytest.raises(ValueError):
            WorkloadParams(thresholds=(2.0, 0.5, 4.5))

    def test_state_accessors(self):
        tracker = WorkloadTracker()
        tracker.append(MissionEvent(10, EventKind.ALARM, "a1"))
        windowed = tracker.state(20, WINDOWED)
        continuous = tracker.state(20, CONTINUOUS)
        assert windowed.method == WINDOWED and windowed.discrete_level == 3
        assert continuous.method == CONTINUOUS and continuous.discrete_level == 3
