"""Reservation book for the single shared testbed.

One machine serves everyone, so any two non-cancelled bookings conflict if
their occupied intervals overlap, where a booking occupies its experiment
block plus the trailing cooldown that protects the actuator from
back-to-back runs.  Cancellation is allowed only before the block starts.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, datetime, time, timedelta

from ..errors import NotFoundError, SchedulingError
from .clock import Clock
from .config import SchedulerConfig
from .store import Store

RESERVATIONS_FILE = "reservations.json"


@dataclass
class Reservation:
    id: str
    user_id: str
    experiment: str
    start: datetime
    duration_minutes: int
    cooldown_minutes: int
    status: str  # "reserved" | "cancelled"

    @property
    def end(self) -> datetime:
        return self.start + timedelta(minutes=self.duration_minutes)

    @property
    def blocked_until(self) -> datetime:
        return self.end + timedelta(minutes=self.cooldown_minutes)

    def effective_status(self, now: datetime) -> str:
        if self.status == "cancelled":
            return "cancelled"
        if now < self.start:
            return "reserved"
        if now < self.end:
            return "active"
        return "done"

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "user_id": self.user_id,
            "experiment": self.experiment,
            "start": self.start.isoformat(),
            "duration_minutes": self.duration_minutes,
            "cooldown_minutes": self.cooldown_minutes,
            "status": self.status,
        }

    @staticmethod
    def from_dict(d: dict) -> "Reservation":
        return Reservation(
            id=d["id"],
            user_id=d["user_id"],
            experiment=d["experiment"],
            start=datetime.fromisoformat(d["start"]),
            duration_minutes=int(d["duration_minutes"]),
            cooldown_minutes=int(d["cooldown_minutes"]),
            status=d["status"],
        )


def _parse_hhmm(s: str) -> time:
    h, m = s.split(":")
    return time(int(h), int(m))


class Scheduler:
    def __init__(self, store: Store, clock: Clock, config: SchedulerConfig):
        self.store = store
        self.clock = clock
        self.config = config
        self._load()

    def _load(self) -> None:
        docs = self.store.read_json(RESERVATIONS_FILE, default=[])
        self.reservations = [Reservation.from_dict(d) for d in docs]

    def _save(self) -> None:
        self.store.write_json(RESERVATIONS_FILE, [r.to_dict() for r in self.reservations])

    def _next_id(self) -> str:
        return f"r-{len(self.reservations) + 1:04d}"

    def active_bookings(self):
        return [r for r in self.reservations if r.status != "cancelled"]

    def reserve(self, user_id: str, experiment: str, start: datetime) -> Reservation:
        cfg = self.config
        now = self.clock.now()
        if start <= now:
            raise SchedulingError("cannot reserve a time that has already passed")
        if (start.minute % cfg.slot_minutes) != 0 or start.second or start.microsecond:
            raise SchedulingError(f"start must align to the {cfg.slot_minutes}-minute grid")
        day_start = _parse_hhmm(cfg.day_start)
        last_start = _parse_hhmm(cfg.last_start)
        day_end = _parse_hhmm(cfg.day_end)
        if not (day_start <= start.time() <= last_start):
            raise SchedulingError(
                f"start must lie between {cfg.day_start} and {cfg.last_start}"
            )
        end = start + timedelta(minutes=cfg.duration_minutes)
        day_end_dt = datetime.combine(start.date(), day_end)
        if end > day_end_dt:
            raise SchedulingError("experiment block exceeds the daily window")
        for r in self.active_bookings():
            if r.user_id == user_id and r.experiment == experiment and r.effective_status(now) in ("reserved", "active"):
                raise SchedulingError(
                    "an unfinished reservation for this experiment already exists"
                )
        blocked_until = end + timedelta(minutes=cfg.cooldown_minutes)
        for r in self.active_bookings():
            if start < r.blocked_until and r.start < blocked_until:
                raise SchedulingError(
                    f"conflicts with reservation {r.id} ({r.start.isoformat()} "
                    f"to {r.blocked_until.isoformat()} incl. cooldown)"
                )
        res = Reservation(
            id=self._next_id(),
            user_id=user_id,
            experiment=experiment,
            start=start,
            duration_minutes=cfg.duration_minutes,
            cooldown_minutes=cfg.cooldown_minutes,
            status="reserved",
        )
        self.reservations.append(res)
        self._save()
        return res

    def cancel(self, user_id: str, reservation_id: str) -> None:
        res = self.get(reservation_id)
        if res.user_id != user_id:
            raise SchedulingError("reservation belongs to another user")
        if res.status == "cancelled":
            raise SchedulingError("reservation is already cancelled")
        if self.clock.now() >= res.start:
            raise SchedulingError("cannot cancel once the lab section has started")
        res.status = "cancelled"
        self._save()

    def get(self, reservation_id: str) -> Reservation:
        for r in self.reservations:
            if r.id == reservation_id:
                return r
        raise NotFoundError(f"no reservation '{reservation_id}'")

    def current_for(self, user_id: str, experiment: str) -> Reservation | None:
        now = self.clock.now()
        for r in self.active_bookings():
            if (
                r.user_id == user_id
                and r.experiment == experiment
                and r.effective_status(now) == "active"
            ):
                return r
        return None

    def calendar(self, experiment: str, week_of: date, user_id: str) -> dict:
        """Seven days of slot cells with display states.

        States follow the booking interface convention: free cells are
        selectable, "own" is the user's confirmed block (green), "cooldown"
        its trailing cooldown (red), everything taken or past is gray.
        """
        cfg = self.config
        monday = week_of - timedelta(days=week_of.weekday())
        now = self.clock.now()
        days = []
        for d in range(7):
            day = monday + timedelta(days=d)
            cells = []
            slot = datetime.combine(day, _parse_hhmm(cfg.day_start))
            last = datetime.combine(day, _parse_hhmm(cfg.last_start))
            while slot <= last:
                cell_end = slot + timedelta(minutes=cfg.slot_minutes)
                state = "free"
                for r in self.active_bookings():
                    if slot < r.end and r.start < cell_end:
                        state = "own" if r.user_id == user_id else "taken"
                        break
                    if slot < r.blocked_until and r.end <= slot:
                        state = "cooldown" if r.user_id == user_id else "taken"
                        break
                if state == "free" and slot <= now:
                    state = "past"
                cells.append({"start": slot.isoformat(), "state": state})
                slot = cell_end
            days.append({"date": day.isoformat(), "cells": cells})
        own = [
            r.to_dict()
            for r in self.active_bookings()
            if r.user_id == user_id and r.effective_status(now) in ("reserved", "active")
        ]
        return {"week_of": monday.isoformat(), "days": days, "own_reservations": own}
