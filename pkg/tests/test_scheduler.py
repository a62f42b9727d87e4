import random
from datetime import datetime, timedelta

import pytest

from sealab.errors import NotFoundError, SchedulingError
from sealab.server.clock import ManualClock
from sealab.server.config import SchedulerConfig
from sealab.server.scheduler import Reservation, Scheduler
from sealab.server.store import Store

MONDAY = datetime(2026, 8, 10, 8, 0)


def make_scheduler(tmp_path, clock=None, **cfg):
    clock = clock or ManualClock(MONDAY)
    return Scheduler(Store(tmp_path), clock, SchedulerConfig(**cfg)), clock


def brute_force_overlap(reservations) -> bool:
    """Oracle: any two non-cancelled bookings whose occupied intervals
    (block + cooldown) intersect."""
    active = [r for r in reservations if r.status != "cancelled"]
    for i, a in enumerate(active):
        for b in active[i + 1:]:
            if a.start < b.blocked_until and b.start < a.blocked_until:
                return True
    return False


def test_reserve_books_block_and_cooldown(tmp_path):
    sched, _ = make_scheduler(tmp_path)
    res = sched.reserve("u1", "sysid", datetime(2026, 8, 10, 10, 0))
    assert res.end == datetime(2026, 8, 10, 12, 0)
    assert res.blocked_until == datetime(2026, 8, 10, 12, 30)
    assert res.effective_status(MONDAY) == "reserved"


def test_conflicts_include_cooldown(tmp_path):
    sched, _ = make_scheduler(tmp_path)
    sched.reserve("u1", "sysid", datetime(2026, 8, 10, 10, 0))
    # 12:00 overlaps the cooldown that runs until 12:30
    with pytest.raises(SchedulingError, match="conflict"):
        sched.reserve("u2", "sysid", datetime(2026, 8, 10, 12, 0))
    sched.reserve("u2", "sysid", datetime(2026, 8, 10, 12, 30))


def test_no_duplicate_pending_reservation(tmp_path):
    sched, _ = make_scheduler(tmp_path)
    sched.reserve("u1", "sysid", datetime(2026, 8, 10, 10, 0))
    with pytest.raises(SchedulingError, match="unfinished"):
        sched.reserve("u1", "sysid", datetime(2026, 8, 11, 10, 0))
    # a different experiment on a free day is fine
    sched.reserve("u1", "feedback", datetime(2026, 8, 11, 10, 0))


def test_duplicate_allowed_after_previous_finishes(tmp_path):
    sched, clock = make_scheduler(tmp_path)
    sched.reserve("u1", "sysid", datetime(2026, 8, 10, 10, 0))
    clock.set(datetime(2026, 8, 10, 13, 0))  # first one is done
    sched.reserve("u1", "sysid", datetime(2026, 8, 11, 10, 0))


def test_window_bounds(tmp_path):
    sched, _ = make_scheduler(tmp_path)
    with pytest.raises(SchedulingError, match="between"):
        sched.reserve("u1", "sysid", datetime(2026, 8, 10, 8, 30))
    with pytest.raises(SchedulingError, match="between"):
        sched.reserve("u1", "sysid", datetime(2026, 8, 10, 17, 0))
    # 16:30 start is the last selectable cell and fits before 18:30
    sched.reserve("u1", "sysid", datetime(2026, 8, 10, 16, 30))


def test_block_must_fit_daily_window(tmp_path):
    # with an early day end, a 16:00 start would run past the window
    sched, _ = make_scheduler(tmp_path, day_end="17:00", last_start="16:30")
    with pytest.raises(SchedulingError, match="daily window"):
        sched.reserve("u1", "sysid", datetime(2026, 8, 10, 16, 0))
    sched.reserve("u1", "sysid", datetime(2026, 8, 10, 15, 0))


def test_grid_alignment_required(tmp_path):
    sched, _ = make_scheduler(tmp_path)
    with pytest.raises(SchedulingError, match="grid"):
        sched.reserve("u1", "sysid", datetime(2026, 8, 10, 10, 15))


def test_no_past_reservations(tmp_path):
    sched, clock = make_scheduler(tmp_path)
    clock.set(datetime(2026, 8, 10, 11, 0))
    with pytest.raises(SchedulingError, match="passed"):
        sched.reserve("u1", "sysid", datetime(2026, 8, 10, 10, 0))


def test_cancel_before_start_only(tmp_path):
    sched, clock = make_scheduler(tmp_path)
    res = sched.reserve("u1", "sysid", datetime(2026, 8, 10, 10, 0))
    clock.set(datetime(2026, 8, 10, 9, 59))
    sched.cancel("u1", res.id)  # one minute before start: allowed
    res2 = sched.reserve("u1", "sysid", datetime(2026, 8, 10, 10, 30))
    clock.set(datetime(2026, 8, 10, 10, 30))
    with pytest.raises(SchedulingError, match="started"):
        sched.cancel("u1", res2.id)


def test_cancel_frees_slot(tmp_path):
    sched, _ = make_scheduler(tmp_path)
    res = sched.reserve("u1", "sysid", datetime(2026, 8, 10, 10, 0))
    sched.cancel("u1", res.id)
    sched.reserve("u2", "sysid", datetime(2026, 8, 10, 10, 0))


def test_cancel_requires_ownership(tmp_path):
    sched, _ = make_scheduler(tmp_path)
    res = sched.reserve("u1", "sysid", datetime(2026, 8, 10, 10, 0))
    with pytest.raises(SchedulingError, match="another user"):
        sched.cancel("u2", res.id)
    with pytest.raises(NotFoundError):
        sched.cancel("u1", "r-9999")


def test_reservations_survive_restart(tmp_path):
    sched, clock = make_scheduler(tmp_path)
    res = sched.reserve("u1", "sysid", datetime(2026, 8, 10, 10, 0))
    reloaded = Scheduler(Store(tmp_path), clock, SchedulerConfig())
    assert [r.to_dict() for r in reloaded.reservations] == [res.to_dict()]


def test_calendar_states(tmp_path):
    sched, clock = make_scheduler(tmp_path)
    clock.set(datetime(2026, 8, 10, 9, 40))
    sched.reserve("u1", "sysid", datetime(2026, 8, 10, 10, 0))
    sched.reserve("u2", "sysid", datetime(2026, 8, 10, 13, 0))
    cal = sched.calendar("sysid", datetime(2026, 8, 10).date(), "u1")
    monday = cal["days"][0]
    states = {c["start"][-8:]: c["state"] for c in monday["cells"]}
    assert states["09:00:00"] == "past"     # already begun
    assert states["10:00:00"] == "own"      # green block
    assert states["11:30:00"] == "own"
    assert states["12:00:00"] == "cooldown" # red cooldown
    assert states["13:00:00"] == "taken"    # someone else: gray
    assert states["15:00:00"] == "taken"    # their cooldown is gray too
    assert states["15:30:00"] == "free"
    tuesday = cal["days"][1]
    assert all(c["state"] == "free" for c in tuesday["cells"])


def test_randomized_operations_against_oracle(tmp_path):
    """Randomized reserve/cancel/advance sequences never produce two
    overlapping non-cancelled bookings (cooldowns included)."""
    rng = random.Random(1234)
    users = ["u1", "u2", "u3"]
    experiments = ["sysid", "feedback"]
    total_ops = 0
    for seq in range(60):
        data = tmp_path / f"seq{seq}"
        clock = ManualClock(MONDAY)
        sched = Scheduler(Store(data), clock, SchedulerConfig())
        for _ in range(60):
            total_ops += 1
            op = rng.random()
            if op < 0.55:
                day = rng.randrange(0, 5)
                slot = rng.randrange(0, 16)
                start = datetime(2026, 8, 10 + day, 9, 0) + timedelta(minutes=30 * slot)
                try:
                    sched.reserve(rng.choice(users), rng.choice(experiments), start)
                except SchedulingError:
                    pass
            elif op < 0.85 and sched.reservations:
                r = rng.choice(sched.reservations)
                try:
                    sched.cancel(r.user_id if rng.random() < 0.9 else rng.choice(users), r.id)
                except SchedulingError:
                    pass
            else:
                clock.advance(rng.randrange(1, 8) * 3600)
            assert not brute_force_overlap(sched.reservations)
            for r in sched.reservations:
                if r.status != "cancelled":
                    assert r.start.minute % 30 == 0
    assert total_ops == 3600
