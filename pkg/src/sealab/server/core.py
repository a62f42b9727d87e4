"""Server assembly: load data, synthesize (or cache-load) the engines,
and expose the operations the HTTP layer calls.

The interaction engines are synthesized once per question chain and cached
in the data directory keyed by a hash of the chain, so a restart with an
unchanged catalog loads them from disk.
"""

from __future__ import annotations

import hashlib
import json
from datetime import date, datetime
from importlib import resources

from ..errors import SchedulingError
from ..gr1 import build_spec, synthesize
from ..gr1.strategy import Strategy
from .archive import ArchiveStore
from .auth import Auth
from .clock import Clock, SystemClock
from .config import ServerConfig
from .experiments import load_experiments
from .labs import LabManager
from .machine import SimulatedMachine
from .prelab import Prelab
from .scheduler import Scheduler
from .store import Store

_SEED_FILES = {
    "users.json": "users.json",
    "experiments.json": "experiments.json",
    "prelab_sysid.json": "prelab_sysid.json",
    "prelab_feedback.json": "prelab_feedback.json",
    "design_questions.json": "design_questions.json",
}


def _seed_defaults(store: Store) -> None:
    for target, packaged in _SEED_FILES.items():
        if not store.exists(target):
            text = resources.files("sealab.data").joinpath(packaged).read_text()
            store.write_text(target, text)


class LabServer:
    def __init__(self, config: ServerConfig, clock: Clock | None = None):
        self.config = config
        self.clock = clock or SystemClock()
        self.store = Store(config.data_dir)
        _seed_defaults(self.store)

        self.auth = Auth(self.store.read_json("users.json"))
        self.experiments = load_experiments(self.store.read_json("experiments.json"))
        prelab_catalogs = {}
        for exp_id in self.experiments:
            doc = self.store.read_json(f"prelab_{exp_id}.json", default=[])
            prelab_catalogs[exp_id] = doc
        self.prelab = Prelab(self.store, prelab_catalogs)
        self.scheduler = Scheduler(self.store, self.clock, config.scheduler)
        self.archives = ArchiveStore(self.store)
        self.machine = SimulatedMachine(config.stream)

        specs, strategies = {}, {}
        for exp_id, exp in self.experiments.items():
            spec = build_spec(list(exp.question_chain))
            specs[exp_id] = spec
            strategies[exp_id] = self._load_or_synthesize(exp_id, spec)
        from .. import leaddesign

        self.labs = LabManager(
            experiments=self.experiments,
            strategies=strategies,
            specs=specs,
            machine=self.machine,
            archives=self.archives,
            clock=self.clock,
            stream=config.stream,
            design_catalog=leaddesign.load_question_catalog(self.store.path("design_questions.json")),
        )

    def _load_or_synthesize(self, exp_id: str, spec) -> Strategy:
        key = hashlib.sha256(json.dumps(list(spec.question_chain)).encode()).hexdigest()[:16]
        cache_name = f"cache/strategy-{exp_id}-{key}.json"
        if self.store.exists(cache_name):
            try:
                return Strategy.from_json(self.store.read_text(cache_name))
            except (ValueError, KeyError):
                pass  # stale or foreign cache entry: re-synthesize below
        strategy = synthesize(spec)
        self.store.write_text(cache_name, strategy.to_json())
        return strategy

    # --- operations used by the API layer -----------------------------------

    def experiment_listing(self, user_id: str) -> list:
        out = []
        for exp in self.experiments.values():
            out.append({
                "id": exp.id,
                "title": exp.title,
                "prelab_completed": self.prelab.completed(user_id, exp.id),
                "prelab_questions": len(self.prelab.catalogs.get(exp.id, [])),
                "question_chain": list(exp.question_chain),
                "phi_d": exp.phi_d,
            })
        return out

    def require_prelab(self, user_id: str, experiment_id: str) -> None:
        if not self.prelab.completed(user_id, experiment_id):
            raise SchedulingError("complete the prelab before scheduling this experiment")

    def reserve(self, user_id: str, experiment_id: str, start: str):
        if experiment_id not in self.experiments:
            raise SchedulingError(f"unknown experiment '{experiment_id}'")
        self.require_prelab(user_id, experiment_id)
        return self.scheduler.reserve(user_id, experiment_id, datetime.fromisoformat(start))

    def calendar(self, user_id: str, experiment_id: str, week: str | None):
        week_of = date.fromisoformat(week) if week else self.clock.now().date()
        return self.scheduler.calendar(experiment_id, week_of, user_id)

    def start_lab(self, user_id: str, experiment_id: str):
        res = self.scheduler.current_for(user_id, experiment_id)
        if res is None:
            raise SchedulingError(
                "lab unlocks only during a reserved window (reserve first, then return at the start time)"
            )
        return self.labs.start_lab(user_id, experiment_id, res)
