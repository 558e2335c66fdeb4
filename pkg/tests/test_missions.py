"""Mode-table authority rules, table validation, and beacons."""

from __future__ import annotations

import random

import pytest

from swarmpatrol.missions import (
    Authority,
    BeaconError,
    BeaconRegistry,
    ModeTable,
    ModeTableError,
    OperatingMode,
    Requester,
    SelectionPolicy,
    Stage,
    default_mode_table,
)


def landing_table():
    """Single-task table with the classic three Act-stage landing modes."""
    table = ModeTable()
    table.add_cell("landing", Stage.OBSERVE, [
        OperatingMode("obs-auto", Stage.OBSERVE, Authority.SYSTEM_ONLY),
    ])
    table.add_cell("landing", Stage.ORIENT, [
        OperatingMode("orient-auto", Stage.ORIENT, Authority.SYSTEM_ONLY),
    ])
    table.add_cell("landing", Stage.DECIDE, [
        OperatingMode("decide-auto", Stage.DECIDE, Authority.SYSTEM_WITH_VETO),
        OperatingMode("decide-manual", Stage.DECIDE, Authority.OPERATOR_ONLY),
    ])
    table.add_cell("landing", Stage.ACT, [
        OperatingMode("full-auto", Stage.ACT, Authority.SYSTEM_ONLY),
        OperatingMode("auto-veto", Stage.ACT, Authority.SYSTEM_WITH_VETO),
        OperatingMode("full-manual", Stage.ACT, Authority.OPERATOR_ONLY),
    ], active="auto-veto")
    return table


class TestActivateMode:
    def test_reactivating_active_mode_is_idempotent(self):
        table = landing_table()
        before = dict(table.active)
        change = table.activate_mode("landing", Stage.ACT, "auto-veto", Requester.OPERATOR)
        assert change is None
        assert table.active == before
        assert table.change_log == []

    def test_operator_activates_full_manual_for_landing_act(self):
        table = landing_table()
        change = table.activate_mode("landing", Stage.ACT, "full-manual", Requester.OPERATOR)
        assert change is not None and change.applied
        assert table.active[("landing", Stage.ACT)] == "full-manual"

    def test_system_request_on_operator_cell_becomes_proposal(self):
        table = landing_table()
        table.selection[("landing", Stage.ACT)] = SelectionPolicy.OPERATOR_SELECTS
        change = table.activate_mode("landing", Stage.ACT, "full-auto", Requester.SYSTEM)
        assert change is not None and not change.applied
        assert table.active[("landing", Stage.ACT)] == "auto-veto"

    def test_operator_request_on_system_cell_becomes_proposal(self):
        table = landing_table()
        table.selection[("landing", Stage.DECIDE)] = SelectionPolicy.SYSTEM_SELECTS
        change = table.activate_mode("landing", Stage.DECIDE, "decide-manual", Requester.OPERATOR)
        assert not change.applied
        assert table.active[("landing", Stage.DECIDE)] == "decide-auto"

    def test_operator_priority_sticks_until_operator_moves_on(self):
        table = landing_table()
        assert table.activate_mode("landing", Stage.ACT, "full-auto", Requester.SYSTEM).applied
        assert table.activate_mode("landing", Stage.ACT, "full-manual", Requester.OPERATOR).applied
        blocked = table.activate_mode("landing", Stage.ACT, "full-auto", Requester.SYSTEM)
        assert not blocked.applied
        assert table.active[("landing", Stage.ACT)] == "full-manual"

    def test_unknown_cell_and_mode_raise_cleanly(self):
        table = landing_table()
        with pytest.raises(ModeTableError):
            table.activate_mode("takeoff", Stage.ACT, "full-auto", Requester.OPERATOR)
        with pytest.raises(ModeTableError):
            table.activate_mode("landing", Stage.ACT, "warp-drive", Requester.OPERATOR)
        assert table.change_log == []


class TestValidateTable:
    def test_default_table_is_total(self):
        assert default_mode_table().validate() == []

    def test_fig_one_shaped_table_is_total(self):
        assert landing_table().validate() == []

    def test_missing_active_is_reported_once(self):
        table = landing_table()
        del table.active[("landing", Stage.DECIDE)]
        violations = table.validate()
        assert len(violations) == 1
        assert (violations[0].task, violations[0].stage) == ("landing", Stage.DECIDE)

    def test_foreign_active_id_is_a_violation(self):
        table = landing_table()
        table.active[("landing", Stage.OBSERVE)] = "full-manual"  # belongs to Act
        violations = table.validate()
        assert len(violations) == 1
        assert violations[0].stage is Stage.OBSERVE

    def test_empty_cell_rejected_at_construction(self):
        table = ModeTable()
        with pytest.raises(ModeTableError):
            table.add_cell("t", Stage.ACT, [])


class TestAuthorityProperties:
    def test_random_sequences_keep_table_total_and_sound(self):
        table = default_mode_table()
        rng = random.Random(1234)
        keys = list(table.cells)
        applied = proposals = 0
        for tick in range(10_000):
            key = keys[rng.randrange(len(keys))]
            task, stage = key
            modes = table.cells[key]
            mode = modes[rng.randrange(len(modes))]
            requester = Requester.OPERATOR if rng.random() < 0.5 else Requester.SYSTEM
            may = table._may_apply(key, requester)
            change = table.activate_mode(task, stage, mode.id, requester, tick=tick)
            assert table.validate() == []
            if change is None:
                continue
            if change.applied:
                applied += 1
                assert may, "unauthorized change was applied"
                assert table.active[key] == mode.id
            else:
                proposals += 1
                assert not may
        assert applied > 0 and proposals > 0
        assert len(table.change_log) == applied + proposals


class TestBeacons:
    def test_place_and_lookup_by_id_and_label(self):
        reg = BeaconRegistry(1600, 1600)
        beacon = reg.place(800, 800, "alpha")
        assert reg.by_id(beacon.id) == beacon
        assert reg.by_label("ALPHA") == beacon

    def test_duplicate_label_rejected(self):
        reg = BeaconRegistry(1600, 1600)
        reg.place(100, 100, "alpha")
        with pytest.raises(BeaconError):
            reg.place(200, 200, "Alpha")

    def test_out_of_bounds_rejected(self):
        reg = BeaconRegistry(1600, 1600)
        with pytest.raises(BeaconError):
            reg.place(-5, 100, "west")
