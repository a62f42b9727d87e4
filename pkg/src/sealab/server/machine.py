"""Simulated testbed behind the server-to-machine message contract, plus
the fan-out streaming hub.

The machine boundary has exactly two messages: trigger(experiment
parameters) returns a result carrying the sampled record, or an error.  A
real hardware bridge could replace SimulatedMachine behind the same
contract.  While a run is in flight the machine emits decimated frames
through a callback; the hub broadcasts them to any number of clients,
never letting a slow or vanished consumer stall the run.
"""

from __future__ import annotations

import math
import threading
import time
from collections import deque
from dataclasses import dataclass

from ..chirp import ChirpConfig, chirp_phase
from ..errors import SimulationError
from ..lti import TransferFunction
from ..plant import ExperimentRecord, NoiseConfig, PlantParams, run_closed_loop, run_open_loop
from .config import StreamConfig


@dataclass(frozen=True)
class StreamFrame:
    seq: int
    t: float
    u: float
    f: float
    belt: float   # drive-belt phase angle, rad, for the animated device view
    defl: float   # spring deflection, m

    def to_dict(self) -> dict:
        return {
            "seq": self.seq,
            "t": round(self.t, 6),
            "u": round(self.u, 6),
            "f": round(self.f, 6),
            "anim": {"belt": round(self.belt, 6), "defl": round(self.defl, 9)},
        }


@dataclass
class MachineReply:
    kind: str                      # "result" | "error"
    record: ExperimentRecord | None = None
    message: str = ""


class SimulatedMachine:
    """Runs experiments on the simulated plant and streams frames."""

    def __init__(self, stream: StreamConfig):
        self.stream = stream
        self.fail_next: str | None = None  # test hook: message of an injected fault

    def trigger(self, params: dict, on_frame=None) -> MachineReply:
        """Execute one experiment; returns result-with-record or error."""
        if self.fail_next is not None:
            message, self.fail_next = self.fail_next, None
            return MachineReply(kind="error", message=message)
        try:
            plant = PlantParams.from_dict(params["plant"])
            chirp = ChirpConfig.from_dict(params["chirp"])
            noise = NoiseConfig.from_dict(params["noise"])
            if params.get("kind") == "closed_loop":
                lead = TransferFunction(tuple(params["lead"]["num"]), tuple(params["lead"]["den"]))
                record = run_closed_loop(plant, lead, float(params["k_ss"]), chirp, noise)
            else:
                record = run_open_loop(plant, chirp, noise)
        except (SimulationError, ValueError, KeyError) as exc:
            return MachineReply(kind="error", message=str(exc))
        self._stream_record(record, plant, on_frame)
        return MachineReply(kind="result", record=record)

    def _stream_record(self, record: ExperimentRecord, plant: PlantParams, on_frame) -> None:
        if on_frame is None:
            return
        stride = max(1, int(round(record.f_s / self.stream.decimate_hz)))
        pace_sleep = (stride / record.f_s) / self.stream.pace if self.stream.pace > 0 else 0.0
        seq = 0
        for i in range(0, record.n_samples, stride):
            frame = StreamFrame(
                seq=seq,
                t=float(record.t[i]),
                u=float(record.u[i]),
                f=float(record.f[i]),
                belt=float(chirp_phase(record.chirp, record.t[i]) % (2.0 * math.pi)),
                defl=float(record.f[i] / plant.k_s),
            )
            on_frame(frame)
            seq += 1
            if pace_sleep:
                time.sleep(pace_sleep)


_CLOSE = object()


class BroadcastHub:
    """One producer, many independent consumers with bounded queues.

    Late subscribers receive a backfill of recent frames first.  When a
    consumer's queue is full the oldest frame is dropped; the producer
    never blocks.
    """

    def __init__(self, stream: StreamConfig):
        backfill = int(stream.backfill_seconds * stream.decimate_hz)
        self.history: deque = deque(maxlen=max(1, backfill))
        self.client_queue = stream.client_queue
        self._lock = threading.Lock()
        self._subscribers: list = []
        self.closed = False
        self.final_message: dict | None = None

    def publish(self, frame: StreamFrame) -> None:
        doc = frame.to_dict()
        with self._lock:
            self.history.append(doc)
            subs = list(self._subscribers)
        for q, cond in subs:
            with cond:
                q.append(doc)
                cond.notify()

    def close(self, final: dict) -> None:
        with self._lock:
            self.closed = True
            self.final_message = final
            subs = list(self._subscribers)
        for q, cond in subs:
            with cond:
                q.append(final)
                q.append(_CLOSE)
                cond.notify()

    def subscribe(self):
        """Iterator over frame dicts: backfill, then live, then the final
        message.  Ends when the run completes or is already over."""
        q: deque = deque(maxlen=self.client_queue)
        cond = threading.Condition()
        with self._lock:
            for doc in self.history:
                q.append(doc)
            if self.closed:
                q.append(self.final_message)
                q.append(_CLOSE)
            else:
                self._subscribers.append((q, cond))
        try:
            while True:
                with cond:
                    if not q:
                        cond.wait(timeout=0.25)
                    item = q.popleft() if q else None
                if item is _CLOSE:
                    return
                if item is not None:
                    yield item
        finally:
            with self._lock:
                self._subscribers = [(qq, cc) for qq, cc in self._subscribers if qq is not q]
