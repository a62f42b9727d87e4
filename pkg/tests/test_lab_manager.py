import threading
from datetime import datetime, timedelta

import pytest

from conftest import FAST_EXPERIMENTS

from sealab.errors import SchedulingError
from sealab.gr1 import build_spec, synthesize
from sealab.server.archive import ArchiveStore
from sealab.server.clock import ManualClock
from sealab.server.config import StreamConfig
from sealab.server.experiments import load_experiments
from sealab.server.labs import LabManager
from sealab.server.machine import SimulatedMachine
from sealab.server.scheduler import Reservation
from sealab.server.store import Store


def make_manager(tmp_path):
    experiments = load_experiments(FAST_EXPERIMENTS)
    specs = {eid: build_spec(list(e.question_chain)) for eid, e in experiments.items()}
    strategies = {eid: synthesize(spec) for eid, spec in specs.items()}
    clock = ManualClock(datetime(2026, 8, 10, 10, 1))
    stream = StreamConfig()
    return LabManager(
        experiments=experiments,
        strategies=strategies,
        specs=specs,
        machine=SimulatedMachine(stream),
        archives=ArchiveStore(Store(tmp_path)),
        clock=clock,
        stream=stream,
    )


def reservation(user, experiment, rid="r-0001"):
    return Reservation(
        id=rid, user_id=user, experiment=experiment,
        start=datetime(2026, 8, 10, 10, 0), duration_minutes=120,
        cooldown_minutes=30, status="reserved",
    )


def test_concurrent_start_lab_single_winner(tmp_path):
    # many clients race to open labs for different users: exactly one user
    # may hold the machine
    manager = make_manager(tmp_path)
    results = []
    barrier = threading.Barrier(8)

    def attempt(user, experiment, rid):
        barrier.wait()
        try:
            manager.start_lab(user, experiment, reservation(user, experiment, rid))
            results.append(("ok", user))
        except SchedulingError:
            results.append(("blocked", user))

    threads = [
        threading.Thread(target=attempt, args=(f"user{i % 4}", "sysid" if i % 2 else "feedback", f"r-{i}"))
        for i in range(8)
    ]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    winners = {u for status, u in results if status == "ok"}
    assert len(winners) == 1, f"machine lock admitted {winners}"
    assert manager.machine_lock.holder_user in winners


def test_concurrent_events_single_active_run(tmp_path):
    # hammer start_run from many threads: exactly one run starts, the rest
    # are rejected either by the engine (no longer offered) or the run guard
    manager = make_manager(tmp_path)
    ctx = manager.start_lab("u1", "sysid", reservation("u1", "sysid"))
    manager.submit_answer(ctx, "sweep_top", 300.0)
    outcomes = []
    barrier = threading.Barrier(6)

    def attempt():
        barrier.wait()
        try:
            manager.start_run(ctx)
            outcomes.append("started")
        except Exception:
            outcomes.append("rejected")

    threads = [threading.Thread(target=attempt) for _ in range(6)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert outcomes.count("started") == 1
    # wait for the run thread to finish and archive
    for _ in range(200):
        if not ctx.run_active and ctx.last_archive_id:
            break
        import time

        time.sleep(0.05)
    assert ctx.last_archive_id is not None


def test_lock_expires_with_reservation_window(tmp_path):
    manager = make_manager(tmp_path)
    manager.start_lab("u1", "sysid", reservation("u1", "sysid"))
    # after u1's window ends, another user may start
    manager.clock.set(datetime(2026, 8, 10, 12, 1))
    res2 = Reservation(
        id="r-0002", user_id="u2", experiment="feedback",
        start=datetime(2026, 8, 10, 12, 0), duration_minutes=120,
        cooldown_minutes=30, status="reserved",
    )
    ctx = manager.start_lab("u2", "feedback", res2)
    assert ctx.user_id == "u2"
