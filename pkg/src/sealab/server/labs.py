"""Live lab orchestration: engine-driven question flow, runs, archiving.

One lab context exists per active reservation; all devices logged in as
the same user share it.  Client events translate to environment actions
for the synthesized engine: an answer becomes enter_<var>, the grade
becomes the checker's verdict, "start run" becomes press_start followed by
the machine's result or error.  The machine holds a single global token,
so at most one run can be in flight across the whole server.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from datetime import datetime

import numpy as np

from .. import leaddesign
from ..errors import SchedulingError, SimulationError
from ..gr1.spec import GameSpec
from ..gr1.strategy import EngineSession, Strategy
from ..plant import plant_tf
from ..sysid import analytic_bode_data, measure_margins, piecewise_fft_bode
from .archive import ArchiveStore
from .clock import Clock
from .config import StreamConfig
from .experiments import ExperimentDef
from .machine import BroadcastHub, SimulatedMachine

PIECEWISE_SEGMENTS = 120


@dataclass
class MachineLock:
    holder_user: str | None = None
    reservation_id: str | None = None
    expires: datetime | None = None

    def held_by_other(self, user_id: str, now: datetime) -> bool:
        if self.holder_user is None:
            return False
        if self.expires is not None and now >= self.expires:
            return False
        return self.holder_user != user_id

    def acquire(self, user_id: str, reservation_id: str, expires: datetime) -> None:
        self.holder_user = user_id
        self.reservation_id = reservation_id
        self.expires = expires

    def release(self) -> None:
        self.holder_user = None
        self.reservation_id = None
        self.expires = None


@dataclass
class LabContext:
    experiment: ExperimentDef
    user_id: str
    reservation_id: str
    engine: EngineSession
    design: leaddesign.LeadDesignState | None
    started_at: str
    lock: threading.RLock = field(default_factory=threading.RLock)
    hub: BroadcastHub | None = None
    run_active: bool = False
    run_seq: int = 0
    last_archive_id: str | None = None
    last_run_error: str | None = None
    last_verdict: dict | None = None
    event_log: list = field(default_factory=list)
    run_counter: int = 0

    def log(self, kind: str, detail: dict) -> None:
        self.event_log.append({"kind": kind, **detail})


class LabManager:
    def __init__(
        self,
        experiments: dict,
        strategies: dict,
        specs: dict,
        machine: SimulatedMachine,
        archives: ArchiveStore,
        clock: Clock,
        stream: StreamConfig,
        design_catalog: list | None = None,
    ):
        self.experiments = experiments
        self.strategies = strategies
        self.specs = specs
        self.machine = machine
        self.archives = archives
        self.clock = clock
        self.stream = stream
        self.design_catalog = design_catalog or leaddesign.load_question_catalog()
        self.machine_lock = MachineLock()
        self.contexts: dict = {}
        self._guard = threading.Lock()

    # --- lab lifecycle -----------------------------------------------------

    def start_lab(self, user_id: str, experiment_id: str, reservation) -> LabContext:
        exp = self.experiments[experiment_id]
        now = self.clock.now()
        with self._guard:
            existing = self.contexts.get(experiment_id)
            if existing is not None and existing.user_id == user_id and existing.reservation_id == reservation.id:
                return existing  # additional device joins the same context
            if self.machine_lock.held_by_other(user_id, now):
                raise SchedulingError("the machine is in use by another user's lab session")
            self.machine_lock.acquire(user_id, reservation.id, reservation.end)
            ctx = LabContext(
                experiment=exp,
                user_id=user_id,
                reservation_id=reservation.id,
                engine=EngineSession(self.strategies[experiment_id], self.specs[experiment_id]),
                design=self._calibrate(exp) if exp.design_chain else None,
                started_at=now.isoformat(),
            )
            ctx.log("lab_started", {"at": now.isoformat(), "user": user_id})
            self.contexts[experiment_id] = ctx
            return ctx

    def context(self, user_id: str, experiment_id: str) -> LabContext:
        ctx = self.contexts.get(experiment_id)
        if ctx is None or ctx.user_id != user_id:
            raise SchedulingError("no active lab context for this user and experiment")
        return ctx

    def _calibrate(self, exp: ExperimentDef) -> leaddesign.LeadDesignState:
        """Open-loop reference run: measured Bode (amplified by k_ss) plus
        its margins seed the design ledger the answers are graded against."""
        reply = self.machine.trigger(self._run_params(exp, calibration=True), on_frame=None)
        if reply.kind != "result":
            raise SimulationError(f"calibration run failed: {reply.message}")
        bode = piecewise_fft_bode(reply.record, PIECEWISE_SEGMENTS).shifted(
            20.0 * np.log10(exp.k_ss)
        )
        report = measure_margins(bode)
        if not report.crossover_found:
            raise SimulationError("calibration Bode never crosses 0 dB; check k_ss")
        return leaddesign.LeadDesignState(
            k_ss=exp.k_ss,
            phi_pm=report.phi_pm,
            omega_gc_min=report.omega_gc,
            phi_d=float(exp.phi_d if exp.phi_d is not None else 45.0),
            bode=bode,
        )

    def _run_params(self, exp: ExperimentDef, calibration: bool = False, ctx: LabContext | None = None) -> dict:
        seed = exp.noise.seed + (0 if calibration else 1 + (ctx.run_counter if ctx else 0))
        params = {
            "plant": exp.plant.to_dict(),
            "chirp": exp.chirp.to_dict(),
            "noise": {"sigma_f": exp.noise.sigma_f, "seed": seed},
            "kind": "open_loop",
        }
        if exp.design_chain and not calibration and ctx is not None and ctx.design is not None:
            lead = leaddesign.lead_tf(ctx.design.k, ctx.design.p, ctx.design.z)
            params["kind"] = "closed_loop"
            params["lead"] = {"num": list(lead.num), "den": list(lead.den)}
            params["k_ss"] = exp.k_ss
        return params

    # --- client events -----------------------------------------------------

    def submit_answer(self, ctx: LabContext, variable: str, value) -> dict:
        with ctx.lock:
            ctx.engine.step(f"enter_{variable}")  # raises if not asked
            if ctx.experiment.design_chain:
                verdict = leaddesign.check_answer(variable, value, ctx.design, self.design_catalog)
                correct = verdict.correct
                tolerance = verdict.tolerance_used
            else:
                q = next(q for q in ctx.experiment.simple_questions if q.id == variable)
                correct = abs(float(value) - q.answer) <= q.tolerance_rel * abs(q.answer)
                tolerance = f"{q.tolerance_rel:.0%} relative"
            state = ctx.engine.step("check_pass" if correct else "check_fail")
            if correct:
                stored = value if np.isscalar(value) else list(value)
                ctx.engine.accept_value(variable, stored)
            ctx.last_verdict = {"variable": variable, "correct": correct, "tolerance": tolerance}
            ctx.log("answer", {"variable": variable, "correct": correct})
            return {"correct": correct, "tolerance": tolerance, "state": self.state_mirror(ctx, state)}

    def reset(self, ctx: LabContext) -> dict:
        with ctx.lock:
            state = ctx.engine.step("press_reset")
            if ctx.experiment.design_chain:
                measured = ctx.design
                ctx.design = leaddesign.LeadDesignState(
                    k_ss=measured.k_ss,
                    phi_pm=measured.phi_pm,
                    omega_gc_min=measured.omega_gc_min,
                    phi_d=measured.phi_d,
                    bode=measured.bode,
                )
            ctx.last_verdict = None
            ctx.log("reset", {})
            return {"state": self.state_mirror(ctx, state)}

    def start_run(self, ctx: LabContext) -> dict:
        with ctx.lock:
            if ctx.run_active:
                raise SchedulingError("a run is already in progress")
            state = ctx.engine.step("press_start")  # raises unless offered
            ctx.hub = BroadcastHub(self.stream)
            ctx.run_active = True
            ctx.run_seq = 0
            ctx.last_run_error = None
            params = self._run_params(ctx.experiment, ctx=ctx)
            ctx.run_counter += 1
            ctx.log("run_started", {"kind": params["kind"]})
        thread = threading.Thread(target=self._run_machine, args=(ctx, params), daemon=True)
        thread.start()
        return {"state": self.state_mirror(ctx, state)}

    def _run_machine(self, ctx: LabContext, params: dict) -> None:
        def on_frame(frame):
            ctx.run_seq = frame.seq + 1
            ctx.hub.publish(frame)

        reply = self.machine.trigger(params, on_frame=on_frame)
        with ctx.lock:
            ctx.run_active = False
            if reply.kind == "result":
                ctx.engine.step("machine_result")
                archive = self._finalize_run(ctx, params, reply.record)
                ctx.last_archive_id = archive.archive_id
                ctx.log("run_finished", {"archive_id": archive.archive_id})
                ctx.hub.close({"done": True, "archive_id": archive.archive_id})
            else:
                ctx.engine.step("machine_error")
                if ctx.experiment.design_chain:
                    # engine cleared the value holds; mirror the design ledger
                    measured = ctx.design
                    ctx.design = leaddesign.LeadDesignState(
                        k_ss=measured.k_ss,
                        phi_pm=measured.phi_pm,
                        omega_gc_min=measured.omega_gc_min,
                        phi_d=measured.phi_d,
                        bode=measured.bode,
                    )
                ctx.last_run_error = reply.message
                ctx.log("run_error", {"message": reply.message})
                ctx.hub.close({"done": True, "error": reply.message})

    # --- archiving -----------------------------------------------------------

    def _finalize_run(self, ctx: LabContext, params: dict, record):
        exp = ctx.experiment
        measured = piecewise_fft_bode(record, PIECEWISE_SEGMENTS)
        if record.kind == "open_loop":
            # margins are read off the k_ss-amplified diagram; the stored
            # ideal matches the raw measurement (the shift is recorded)
            margins_bode = measured.shifted(20.0 * np.log10(exp.k_ss))
            ideal_tf = plant_tf(exp.plant)
        else:
            margins_bode = measured
            lead_doc = params["lead"]
            from ..lti import TransferFunction

            ideal_tf = TransferFunction(tuple(lead_doc["num"]), tuple(lead_doc["den"])) * (
                exp.k_ss * plant_tf(exp.plant)
            )
        ideal = analytic_bode_data(ideal_tf, exp.plant.loop_delay, measured.omega)
        report = measure_margins(margins_bode)
        stamp = self.clock.now().strftime("%Y%m%d-%H%M%S")
        archive_id = self.archives.next_id(exp.id, stamp)
        summary = {
            "archive_id": archive_id,
            "user_id": ctx.user_id,
            "experiment": exp.id,
            "kind": record.kind,
            "created_at": self.clock.now().isoformat(),
            "margins": {
                "phi_pm_deg": (report.phi_pm if report.crossover_found else None),
                "omega_gc_rad_s": (report.omega_gc if report.crossover_found else None),
                "crossover_found": report.crossover_found,
                "magnitude_shift_db": (20.0 * float(np.log10(exp.k_ss)) if record.kind == "open_loop" else 0.0),
            },
            "phase_window_deg": [-270.0, 90.0],
            "design": self._design_snapshot(ctx),
            "bode": {
                "measured": _bode_arrays(measured),
                "ideal": _bode_arrays(ideal),
                "dropped_segments": measured.meta.get("dropped_segments", 0),
            },
            "accepted_values": dict(ctx.engine.accepted_values),
            "event_log": list(ctx.event_log),
        }
        if exp.design_chain and ctx.design is not None:
            summary["margins"]["phi_d_deg"] = ctx.design.phi_d
            if report.crossover_found:
                summary["margins"]["phi_pm_vs_target_deg"] = report.phi_pm - ctx.design.phi_d
                summary["margins"]["open_loop_phi_pm_deg"] = ctx.design.phi_pm
        record_meta = record.metadata(exp.plant, None)
        record_meta["noise"] = params["noise"]
        return self.archives.write(archive_id, summary, record, record_meta, measured, ideal)

    def _design_snapshot(self, ctx: LabContext) -> dict | None:
        if ctx.design is None:
            return None
        d = ctx.design
        return {
            "k_ss": d.k_ss,
            "phi_pm": d.phi_pm,
            "omega_gc_min": d.omega_gc_min,
            "phi_d": d.phi_d,
            **d.accepted(),
        }

    # --- state mirror --------------------------------------------------------

    def state_mirror(self, ctx: LabContext, step_result=None) -> dict:
        r = ctx.engine.describe() if step_result is None else step_result
        exp = ctx.experiment
        question = None
        if r.asks:
            qid = r.asks[0]
            if exp.design_chain:
                q = next(q for q in self.design_catalog if q["id"] == qid)
                question = {"id": qid, "prompt": q["prompt"], "fields": q["fields"], "units": q.get("units", "")}
            else:
                q = next(q for q in exp.simple_questions if q.id == qid)
                question = {"id": qid, "prompt": q.prompt, "fields": [qid], "units": q.units}
        design = None
        if ctx.design is not None:
            design = {
                "phi_d": ctx.design.phi_d,
                "phi_pm": ctx.design.phi_pm,
                "omega_gc_min": ctx.design.omega_gc_min,
            }
        return {
            "experiment": exp.id,
            "annotation": r.annotation,
            "question": question,
            "asks": list(r.asks),
            "offers_start": r.offers_start,
            "offers_reset": r.offers_reset,
            "checking": r.checking,
            "result_held": r.result_held,
            "run": {
                "active": ctx.run_active,
                "seq": ctx.run_seq,
                "archive_id": ctx.last_archive_id,
                "error": ctx.last_run_error,
            },
            "accepted_values": dict(ctx.engine.accepted_values),
            "design": design,
            "last_verdict": ctx.last_verdict,
        }


def _bode_arrays(bode) -> dict:
    return {
        "omega_rad_s": [float(x) for x in bode.omega],
        "mag_db": [float(x) for x in bode.mag_db],
        "phase_deg": [float(x) for x in bode.phase_deg],
    }
