import threading
import time

from sealab.server.config import StreamConfig
from sealab.server.machine import BroadcastHub, SimulatedMachine, StreamFrame


def frame(seq: int) -> StreamFrame:
    return StreamFrame(seq=seq, t=seq * 0.05, u=0.1, f=1.0, belt=0.5, defl=1e-6)


def collect(hub, out, limit=None):
    for doc in hub.subscribe():
        out.append(doc)
        if limit and len(out) >= limit:
            break


def test_subscriber_sees_frames_in_seq_order():
    hub = BroadcastHub(StreamConfig())
    out = []
    t = threading.Thread(target=collect, args=(hub, out))
    t.start()
    for i in range(50):
        hub.publish(frame(i))
    hub.close({"done": True, "archive_id": "a1"})
    t.join(timeout=5)
    assert not t.is_alive()
    seqs = [d["seq"] for d in out if "seq" in d]
    assert seqs == sorted(seqs) == list(range(50))
    assert out[-1] == {"done": True, "archive_id": "a1"}


def test_late_joiner_gets_backfill_then_live():
    cfg = StreamConfig(decimate_hz=20.0, backfill_seconds=1.0)  # backfill = 20 frames
    hub = BroadcastHub(cfg)
    for i in range(100):
        hub.publish(frame(i))
    out = []
    t = threading.Thread(target=collect, args=(hub, out))
    t.start()
    time.sleep(0.05)
    for i in range(100, 110):
        hub.publish(frame(i))
    hub.close({"done": True})
    t.join(timeout=5)
    seqs = [d["seq"] for d in out if "seq" in d]
    assert seqs[0] == 80  # last 1 s of history
    assert seqs == list(range(80, 110))


def test_subscribe_after_close_returns_history_and_final():
    hub = BroadcastHub(StreamConfig(backfill_seconds=0.5))
    for i in range(30):
        hub.publish(frame(i))
    hub.close({"done": True, "archive_id": "x"})
    out = list(hub.subscribe())
    assert out[-1]["done"] is True
    assert [d["seq"] for d in out[:-1]] == list(range(20, 30))


def test_slow_consumer_drops_oldest_not_producer():
    cfg = StreamConfig(client_queue=16)
    hub = BroadcastHub(cfg)
    out = []
    # subscribe but do not consume until the producer is done
    gen = hub.subscribe()
    for i in range(100):
        hub.publish(frame(i))
    hub.close({"done": True})
    for doc in gen:
        out.append(doc)
    seqs = [d["seq"] for d in out if "seq" in d]
    # bounded queue: only the newest frames survive, in order, ending with done
    assert len(seqs) <= 16
    assert seqs == sorted(seqs)
    assert out[-1]["done"] is True


def test_zero_consumers_is_fine():
    hub = BroadcastHub(StreamConfig())
    for i in range(10):
        hub.publish(frame(i))
    hub.close({"done": True})
    assert hub.closed


def test_multiple_consumers_identical_suffix():
    hub = BroadcastHub(StreamConfig(backfill_seconds=100.0))
    outs = [[], []]
    t1 = threading.Thread(target=collect, args=(hub, outs[0]))
    t1.start()
    for i in range(40):
        hub.publish(frame(i))
    t2 = threading.Thread(target=collect, args=(hub, outs[1]))
    t2.start()
    time.sleep(0.05)
    for i in range(40, 60):
        hub.publish(frame(i))
    hub.close({"done": True})
    t1.join(timeout=5)
    t2.join(timeout=5)
    s1 = [d["seq"] for d in outs[0] if "seq" in d]
    s2 = [d["seq"] for d in outs[1] if "seq" in d]
    assert s1 == list(range(60))
    assert s2 == list(range(60))  # deep backfill: the joiner catches up fully


def test_machine_trigger_produces_decimated_frames():
    machine = SimulatedMachine(StreamConfig(decimate_hz=20.0))
    frames = []
    params = {
        "plant": {"m_k": 80.0, "b_eff": 1400.0, "k_s": 350000.0, "beta": 50.0, "loop_delay": 0.002, "f_s": 1000.0},
        "chirp": {"u_a": 1.0, "u_b": 0.0, "omega_0": 5.0, "omega_1": 50.0, "t_0": 0.0, "t_f": 4.0},
        "noise": {"sigma_f": 0.0, "seed": 0},
        "kind": "open_loop",
    }
    reply = machine.trigger(params, on_frame=frames.append)
    assert reply.kind == "result"
    assert reply.record.n_samples == 4000
    assert len(frames) == 80  # 4 s at 20 Hz
    assert [f.seq for f in frames] == list(range(80))
    assert all(hasattr(f, "belt") and hasattr(f, "defl") for f in frames)


def test_machine_error_injection():
    machine = SimulatedMachine(StreamConfig())
    machine.fail_next = "belt jammed"
    reply = machine.trigger({}, on_frame=None)
    assert reply.kind == "error"
    assert reply.message == "belt jammed"
    # bad parameters also come back as errors, not exceptions
    reply = machine.trigger({"plant": {}}, on_frame=None)
    assert reply.kind == "error"
