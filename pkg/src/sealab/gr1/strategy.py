"""Synthesized Mealy strategy: representation, execution, serialization.

A strategy state remembers the system's last reaction (its label); a
transition consumes one environment action (or the empty stutter) and
yields the next reaction.  EngineSession executes a strategy for one lab
session, tracking accepted numeric values alongside the boolean protocol
state, and raises ProtocolViolationError naming the violated safety
assumption when a client attempts an inadmissible action.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..errors import ProtocolViolationError
from .spec import GameSpec, Valuation

FORMAT = "sealab-strategy-v1"


def move_key(move) -> str:
    """Canonical transition key: sorted AP names, '' for the stutter step."""
    return ",".join(sorted(move))


@dataclass(frozen=True)
class StrategyState:
    id: int
    label: tuple      # sorted system AP names true in this state
    annotation: str


@dataclass(frozen=True)
class Transition:
    output: tuple     # sorted system AP names of the reaction
    next: int


@dataclass
class Strategy:
    states: dict
    initial: int
    transitions: dict           # state id -> {move key -> Transition}
    question_chain: tuple
    env_ap_names: tuple
    sys_ap_names: tuple
    metadata: dict = field(default_factory=dict)

    def label_set(self, state_id: int) -> Valuation:
        return frozenset(self.states[state_id].label)

    def to_json(self) -> str:
        doc = {
            "format": FORMAT,
            "initial": self.initial,
            "question_chain": list(self.question_chain),
            "env_aps": list(self.env_ap_names),
            "sys_aps": list(self.sys_ap_names),
            "metadata": self.metadata,
            "states": [
                {"id": s.id, "label": list(s.label), "annotation": s.annotation}
                for s in sorted(self.states.values(), key=lambda s: s.id)
            ],
            "transitions": [
                {"from": sid, "on": mk, "output": list(tr.output), "to": tr.next}
                for sid in sorted(self.transitions)
                for mk, tr in sorted(self.transitions[sid].items())
            ],
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "Strategy":
        doc = json.loads(text)
        if doc.get("format") != FORMAT:
            raise ValueError(f"not a strategy document (format {doc.get('format')!r})")
        states = {
            s["id"]: StrategyState(id=s["id"], label=tuple(s["label"]), annotation=s["annotation"])
            for s in doc["states"]
        }
        transitions: dict = {s: {} for s in states}
        for t in doc["transitions"]:
            transitions[t["from"]][t["on"]] = Transition(output=tuple(t["output"]), next=t["to"])
        return Strategy(
            states=states,
            initial=doc["initial"],
            transitions=transitions,
            question_chain=tuple(doc["question_chain"]),
            env_ap_names=tuple(doc["env_aps"]),
            sys_ap_names=tuple(doc["sys_aps"]),
            metadata=doc.get("metadata", {}),
        )

    def to_dot(self) -> str:
        """Graph description for documentation (graphviz digraph syntax)."""
        lines = ["digraph strategy {", "  rankdir=LR;", '  node [shape=box, fontsize=10];']
        for s in sorted(self.states.values(), key=lambda s: s.id):
            shape = ', penwidth=2' if s.id == self.initial else ""
            lines.append(f'  s{s.id} [label="{s.id}: {s.annotation}"{shape}];')
        for sid in sorted(self.transitions):
            for mk, tr in sorted(self.transitions[sid].items()):
                label = mk if mk else "(stutter)"
                lines.append(f'  s{sid} -> s{tr.next} [label="{label}", fontsize=9];')
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass
class StepResult:
    state: int
    output: tuple
    annotation: str
    asks: tuple
    offers_start: bool
    offers_reset: bool
    checking: str | None
    triggered: bool
    result_held: bool


class EngineSession:
    """Single-writer execution of a strategy for one lab session."""

    def __init__(self, strategy: Strategy, spec: GameSpec | None = None):
        self.strategy = strategy
        self.spec = spec
        self.current = strategy.initial
        self.accepted_values: dict = {}
        self.history: list = []

    @property
    def result_held(self) -> bool:
        return "hold_result" in self.strategy.states[self.current].label

    def describe(self, state_id: int | None = None) -> StepResult:
        sid = self.current if state_id is None else state_id
        st = self.strategy.states[sid]
        label = set(st.label)
        chain = self.strategy.question_chain
        asks = tuple(q for q in chain if f"ask_{q}" in label)
        checking = next((q for q in chain if f"request_check_{q}" in label), None)
        return StepResult(
            state=sid,
            output=st.label,
            annotation=st.annotation,
            asks=asks,
            offers_start="offer_start" in label,
            offers_reset="offer_reset" in label,
            checking=checking,
            triggered="trigger_run" in label,
            result_held="hold_result" in label,
        )

    def admissible(self, action: str | None) -> bool:
        return move_key(self._move(action)) in self.strategy.transitions[self.current]

    def _move(self, action: str | None) -> Valuation:
        if action is None:
            return frozenset()
        if action not in self.strategy.env_ap_names:
            raise ValueError(f"unknown environment action '{action}'")
        return frozenset({action})

    def step(self, action: str | None) -> StepResult:
        """Advance one step on an environment action (None = stutter)."""
        move = self._move(action)
        key = move_key(move)
        trans = self.strategy.transitions[self.current].get(key)
        if trans is None:
            name = None
            if self.spec is not None:
                name = self.spec.violated_assumption(self.strategy.label_set(self.current), move)
            raise ProtocolViolationError(
                f"action {action!r} is not admissible in state {self.current} "
                f"({self.strategy.states[self.current].annotation})"
                + (f": violates {name}" if name else ""),
                assumption=name,
            )
        self.history.append((key, trans.output))
        if action == "press_reset" or (action == "machine_error"):
            # value holds were cleared by the engine; mirror the numeric side
            self.accepted_values.clear()
        self.current = trans.next
        return self.describe()

    def accept_value(self, variable: str, value: float) -> None:
        if variable not in self.strategy.question_chain:
            raise ValueError(f"unknown question variable '{variable}'")
        self.accepted_values[variable] = value

    def reset_session(self) -> StepResult:
        return self.step("press_reset")
