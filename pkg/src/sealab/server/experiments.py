"""Experiment catalog: physics configuration plus the question chain.

Each experiment pairs a plant/chirp/noise setup with a guided question
chain.  The feedback-control experiment uses the six-step compensator
design chain graded by the design module; other experiments define simple
catalog-graded questions (value within tolerance).  Catalogs are data,
editable without touching code.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..chirp import ChirpConfig
from ..plant import NoiseConfig, PlantParams

LEAD_DESIGN_CHAIN = ("delta_phi", "phi_max", "alpha", "omega_gc_max", "omega_gc", "controller")


@dataclass
class SimpleQuestion:
    id: str
    prompt: str
    answer: float
    tolerance_rel: float
    units: str = ""


@dataclass
class ExperimentDef:
    id: str
    title: str
    plant: PlantParams
    chirp: ChirpConfig
    noise: NoiseConfig
    k_ss: float
    kind: str                     # "open_loop" | "closed_loop"
    phi_d: float | None = None    # target phase margin for design experiments
    design_chain: bool = False    # True: six-question compensator design
    simple_questions: list = field(default_factory=list)

    @property
    def question_chain(self) -> tuple:
        if self.design_chain:
            return LEAD_DESIGN_CHAIN
        return tuple(q.id for q in self.simple_questions)

    @staticmethod
    def from_dict(d: dict) -> "ExperimentDef":
        simple = [
            SimpleQuestion(
                id=q["id"],
                prompt=q["prompt"],
                answer=float(q["answer"]),
                tolerance_rel=float(q.get("tolerance_rel", 0.01)),
                units=q.get("units", ""),
            )
            for q in d.get("questions", [])
        ]
        return ExperimentDef(
            id=d["id"],
            title=d["title"],
            plant=PlantParams.from_dict(d["plant"]),
            chirp=ChirpConfig.from_dict(d["chirp"]),
            noise=NoiseConfig.from_dict(d["noise"]),
            k_ss=float(d.get("k_ss", 1.0)),
            kind=d.get("experiment_kind", "open_loop"),
            phi_d=(float(d["phi_d"]) if "phi_d" in d else None),
            design_chain=bool(d.get("design_chain", False)),
            simple_questions=simple,
        )


def load_experiments(doc: list) -> dict:
    defs = [ExperimentDef.from_dict(d) for d in doc]
    out = {}
    for e in defs:
        if e.id in out:
            raise ValueError(f"duplicate experiment id '{e.id}'")
        if not e.question_chain:
            raise ValueError(f"experiment '{e.id}' defines no questions")
        out[e.id] = e
    return out
