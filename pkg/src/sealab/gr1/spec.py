"""Two-player game specification for the guided-experiment protocol.

The controller ("system") mediates between three external actors: the
student, the answer checker, and the machine that runs the experiment.
Per time step the environment performs at most one action, then the system
reacts within the same step.  The environment's admissible behavior is
constrained by safety assumptions, the system's reaction by safety
requirements; the assumptions also include recurrence ("any external
action remains available forever"), used by the solver's fixed point.

Protocol constraints, in standard assume/guarantee numbering:

  safety assumption 1   at most one external action per step
  safety assumption 2   a value can be entered only right after it was asked
  safety assumption 3   the run can be started only right after it was offered
  safety assumption 4   reset can be pressed only right after it was offered
  safety assumption 5   the machine reports a result or an error exactly in
                        the step after a trigger
  safety assumption 6   the checker replies pass or fail in the step after a
                        value check (one-directional: spurious verdicts at
                        other times are admissible)
  liveness assumption   every external action recurs

  safety requirement 1  ask a value exactly when it is unheld, its
                        prerequisite is held, and the system is in student mode
  safety requirement 2  offer the run exactly when the final value is held in
                        student mode
  safety requirement 3  offer reset exactly in student mode
  safety requirement 4  send a value to the checker exactly when the student
                        enters it (same step)
  safety requirement 5  trigger the machine exactly when the student starts
                        the run (same step)
  safety requirement 6  mode bookkeeping: machine mode iff triggering,
                        checker mode iff checking, student mode otherwise
  safety requirement 7  a value is held next step iff (held now or entered
                        next) and not revoked by a failed check of that value,
                        a machine error, or a reset
  safety requirement 8  the result is held next step iff (held now or
                        reported next) and no reset arrives

Assumption 6 is deliberately one-directional (only the response after a
check is forced); the synthesized controller must tolerate spurious
checker verdicts at any step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

Valuation = frozenset

CATEGORY_OWNERS = {
    "ask": "system",
    "check": "system",
    "trigger": "system",
    "self": "system",
    "input": "environment",
    "verdict": "environment",
    "report": "environment",
}


@dataclass(frozen=True)
class AtomicProposition:
    name: str
    owner: str       # "system" | "environment"
    category: str    # key of CATEGORY_OWNERS

    def __post_init__(self):
        if self.category not in CATEGORY_OWNERS:
            raise ValueError(f"unknown AP category '{self.category}'")
        if CATEGORY_OWNERS[self.category] != self.owner:
            raise ValueError(f"category '{self.category}' implies owner '{CATEGORY_OWNERS[self.category]}', got '{self.owner}'")


@dataclass(frozen=True)
class Predicate:
    """Transition predicate over (current valuation, next valuation).

    Environment-safety predicates may read the current valuation and the
    next step's environment variables; system-safety predicates may read
    the current valuation's system variables and the full next valuation.
    `aps` declares the support (checked against the spec's declarations).
    """

    name: str
    aps: frozenset
    fn: Callable[[Valuation, Valuation], bool]

    def holds(self, cur: Valuation, nxt: Valuation) -> bool:
        return self.fn(cur, nxt)


@dataclass(frozen=True)
class Recurrence:
    """State predicate asserted to hold infinitely often."""

    name: str
    aps: frozenset
    fn: Callable[[Valuation], bool]

    def holds(self, v: Valuation) -> bool:
        return self.fn(v)


@dataclass
class GameSpec:
    env_aps: tuple
    sys_aps: tuple
    env_safety: tuple
    env_liveness: tuple
    sys_safety: tuple
    sys_liveness: tuple
    question_chain: tuple
    initial_state: Valuation
    # ordered (ap name, fn(cur, partial_next) -> bool) entries that compute
    # the forced part of the system reaction; APs not listed are enumerated
    # by the solver
    sys_determination: tuple = ()
    # candidate environment moves; default: stutter plus each single action
    env_move_candidates: tuple | None = None

    def env_names(self) -> frozenset:
        return frozenset(a.name for a in self.env_aps)

    def sys_names(self) -> frozenset:
        return frozenset(a.name for a in self.sys_aps)

    def validate(self) -> "GameSpec":
        names = [a.name for a in self.env_aps] + [a.name for a in self.sys_aps]
        if len(set(names)) != len(names):
            raise ValueError("duplicate atomic proposition names")
        declared = frozenset(names)
        for pred in (*self.env_safety, *self.sys_safety):
            if not pred.aps <= declared:
                raise ValueError(f"predicate '{pred.name}' references undeclared APs {sorted(pred.aps - declared)}")
        for rec in (*self.env_liveness, *self.sys_liveness):
            if not rec.aps <= declared:
                raise ValueError(f"recurrence '{rec.name}' references undeclared APs {sorted(rec.aps - declared)}")
        if len(set(self.question_chain)) != len(self.question_chain):
            raise ValueError("question chain must not repeat variables")
        if not self.initial_state <= declared:
            raise ValueError("initial state references undeclared APs")
        determined = [n for n, _ in self.sys_determination]
        if len(set(determined)) != len(determined):
            raise ValueError("duplicate determination entries")
        return self

    def default_env_moves(self) -> tuple:
        if self.env_move_candidates is not None:
            return self.env_move_candidates
        moves = [frozenset()]
        moves.extend(frozenset({a.name}) for a in self.env_aps)
        return tuple(moves)

    def admissible_moves(self, cur: Valuation) -> list:
        return [m for m in self.default_env_moves() if all(p.holds(cur, m) for p in self.env_safety)]

    def violated_assumption(self, cur: Valuation, move: Valuation) -> str | None:
        for p in self.env_safety:
            if not p.holds(cur, move):
                return p.name
        return None

    def complete_reaction(self, cur: Valuation, env_move: Valuation) -> Valuation:
        """Apply the determination entries on top of an environment move."""
        nxt = set(env_move)
        for name, fn in self.sys_determination:
            if fn(cur, nxt):
                nxt.add(name)
        return frozenset(nxt)


def chain_from_prerequisites(questions: Sequence[str], prerequisites: dict | None) -> tuple:
    """Order the questions by their prerequisite edges; reject non-chains."""
    qs = list(questions)
    if not qs:
        raise ValueError("at least one question variable required")
    if len(set(qs)) != len(qs):
        raise ValueError("duplicate question variable names")
    if prerequisites is None:
        return tuple(qs)
    prereq = dict(prerequisites)
    unknown = set(prereq) - set(qs) | set(v for v in prereq.values() if v is not None) - set(qs)
    if unknown:
        raise ValueError(f"prerequisites reference unknown variables {sorted(unknown)}")
    roots = [q for q in qs if prereq.get(q) is None]
    if not roots:
        raise ValueError("prerequisite chain is cyclic (no root variable)")
    if len(roots) > 1:
        raise ValueError(f"prerequisite chain must have exactly one root, found {len(roots)}")
    successors = {}
    for q, pre in prereq.items():
        if pre is not None:
            if pre in successors:
                raise ValueError(f"prerequisite chain branches at '{pre}'")
            successors[pre] = q
    order = [roots[0]]
    while order[-1] in successors:
        nxt = successors[order[-1]]
        if nxt in order:
            raise ValueError("prerequisite chain is cyclic")
        order.append(nxt)
    if len(order) != len(qs):
        raise ValueError("prerequisite chain is cyclic or disconnected")
    return tuple(order)


def build_spec(questions: Sequence[str], final_var: str | None = None, prerequisites: dict | None = None) -> GameSpec:
    """Assemble the full game for an ordered question chain.

    `questions` lists the variables the student must provide; by default
    they form a linear chain in the given order (an explicit prerequisite
    map may reorder it, and is rejected if cyclic or branching).  The final
    variable gates the experiment offer.  The initial state is the
    post-reset state: nothing held, student mode, first question asked.
    """
    chain = chain_from_prerequisites(questions, prerequisites)
    if final_var is None:
        final_var = chain[-1]
    if final_var != chain[-1]:
        raise ValueError(f"final variable must be the chain's last element '{chain[-1]}'")

    env_aps = []
    sys_aps = []
    for q in chain:
        env_aps.append(AtomicProposition(f"enter_{q}", "environment", "input"))
        sys_aps.append(AtomicProposition(f"ask_{q}", "system", "ask"))
        sys_aps.append(AtomicProposition(f"request_check_{q}", "system", "check"))
        sys_aps.append(AtomicProposition(f"hold_{q}", "system", "self"))
    env_aps.append(AtomicProposition("press_start", "environment", "input"))
    env_aps.append(AtomicProposition("press_reset", "environment", "input"))
    env_aps.append(AtomicProposition("check_pass", "environment", "verdict"))
    env_aps.append(AtomicProposition("check_fail", "environment", "verdict"))
    env_aps.append(AtomicProposition("machine_result", "environment", "report"))
    env_aps.append(AtomicProposition("machine_error", "environment", "report"))
    sys_aps.append(AtomicProposition("offer_start", "system", "ask"))
    sys_aps.append(AtomicProposition("offer_reset", "system", "ask"))
    sys_aps.append(AtomicProposition("trigger_run", "system", "trigger"))
    sys_aps.append(AtomicProposition("mode_student", "system", "self"))
    sys_aps.append(AtomicProposition("mode_checker", "system", "self"))
    sys_aps.append(AtomicProposition("mode_machine", "system", "self"))
    sys_aps.append(AtomicProposition("hold_result", "system", "self"))

    env_names = frozenset(a.name for a in env_aps)

    env_safety = [
        Predicate(
            "safety assumption 1: at most one external action per step",
            env_names,
            lambda cur, nxt, _e=env_names: len(nxt & _e) <= 1,
        )
    ]
    for q in chain:
        env_safety.append(Predicate(
            f"safety assumption 2: value '{q}' entered before it was asked",
            frozenset({f"ask_{q}", f"enter_{q}"}),
            lambda cur, nxt, a=f"ask_{q}", e=f"enter_{q}": a in cur or e not in nxt,
        ))
    env_safety.append(Predicate(
        "safety assumption 3: run started before it was offered",
        frozenset({"offer_start", "press_start"}),
        lambda cur, nxt: "offer_start" in cur or "press_start" not in nxt,
    ))
    env_safety.append(Predicate(
        "safety assumption 4: reset pressed before it was offered",
        frozenset({"offer_reset", "press_reset"}),
        lambda cur, nxt: "offer_reset" in cur or "press_reset" not in nxt,
    ))
    env_safety.append(Predicate(
        "safety assumption 5: machine report exactly after a trigger",
        frozenset({"trigger_run", "machine_result", "machine_error"}),
        lambda cur, nxt: ("trigger_run" in cur) == ("machine_result" in nxt or "machine_error" in nxt),
    ))
    for q in chain:
        env_safety.append(Predicate(
            f"safety assumption 6: checker must reply after checking '{q}'",
            frozenset({f"request_check_{q}", "check_pass", "check_fail"}),
            lambda cur, nxt, c=f"request_check_{q}": c not in cur or ("check_pass" in nxt or "check_fail" in nxt),
        ))

    env_liveness = tuple(
        Recurrence(f"liveness assumption: '{a.name}' recurs", frozenset({a.name}), lambda v, n=a.name: n in v)
        for a in env_aps
    )

    sys_safety = []
    prev = None
    for q in chain:
        sys_safety.append(Predicate(
            f"safety requirement 1: ask '{q}' exactly at its turn in the chain",
            frozenset({f"ask_{q}", f"hold_{q}", "mode_student"} | ({f"hold_{prev}"} if prev else set())),
            lambda cur, nxt, a=f"ask_{q}", h=f"hold_{q}", hp=(f"hold_{prev}" if prev else None): (
                (a in nxt) == (h not in nxt and (hp is None or hp in nxt) and "mode_student" in nxt)
            ),
        ))
        prev = q
    sys_safety.append(Predicate(
        "safety requirement 2: offer the run exactly when the chain is complete",
        frozenset({"offer_start", f"hold_{final_var}", "mode_student"}),
        lambda cur, nxt, hf=f"hold_{final_var}": ("offer_start" in nxt) == (hf in nxt and "mode_student" in nxt),
    ))
    sys_safety.append(Predicate(
        "safety requirement 3: offer reset exactly in student mode",
        frozenset({"offer_reset", "mode_student"}),
        lambda cur, nxt: ("offer_reset" in nxt) == ("mode_student" in nxt),
    ))
    for q in chain:
        sys_safety.append(Predicate(
            f"safety requirement 4: check '{q}' exactly when it is entered",
            frozenset({f"enter_{q}", f"request_check_{q}"}),
            lambda cur, nxt, e=f"enter_{q}", c=f"request_check_{q}": (e in nxt) == (c in nxt),
        ))
    sys_safety.append(Predicate(
        "safety requirement 5: trigger the machine exactly when the run is started",
        frozenset({"press_start", "trigger_run"}),
        lambda cur, nxt: ("press_start" in nxt) == ("trigger_run" in nxt),
    ))
    check_names = frozenset(f"request_check_{q}" for q in chain)
    sys_safety.append(Predicate(
        "safety requirement 6: mode bookkeeping",
        frozenset({"mode_student", "mode_checker", "mode_machine", "trigger_run"} | check_names),
        lambda cur, nxt, _c=check_names: (
            (("mode_machine" in nxt) == ("trigger_run" in nxt))
            and (("mode_checker" in nxt) == bool(nxt & _c))
            and (("mode_student" in nxt) == ("mode_machine" not in nxt and "mode_checker" not in nxt))
        ),
    ))
    for q in chain:
        sys_safety.append(Predicate(
            f"safety requirement 7: retention of value '{q}'",
            frozenset({f"hold_{q}", f"enter_{q}", f"request_check_{q}", "check_fail", "machine_error", "press_reset"}),
            lambda cur, nxt, h=f"hold_{q}", e=f"enter_{q}", c=f"request_check_{q}": (
                (h in nxt) == (
                    (h in cur or e in nxt)
                    and (c not in cur or "check_fail" not in nxt)
                    and "machine_error" not in nxt
                    and "press_reset" not in nxt
                )
            ),
        ))
    sys_safety.append(Predicate(
        "safety requirement 8: retention of the experiment result",
        frozenset({"hold_result", "machine_result", "press_reset"}),
        lambda cur, nxt: (
            ("hold_result" in nxt) == (
                ("hold_result" in cur or "machine_result" in nxt) and "press_reset" not in nxt
            )
        ),
    ))

    # forced reaction, in dependency order: checks/trigger from the incoming
    # action, modes from those, holds from retention, asks/offers from holds
    determination = []
    for q in chain:
        determination.append((f"request_check_{q}", lambda cur, nxt, e=f"enter_{q}": e in nxt))
    determination.append(("trigger_run", lambda cur, nxt: "press_start" in nxt))
    determination.append(("mode_machine", lambda cur, nxt: "trigger_run" in nxt))
    determination.append(("mode_checker", lambda cur, nxt, _c=check_names: bool(nxt & _c)))
    determination.append(("mode_student", lambda cur, nxt: "mode_machine" not in nxt and "mode_checker" not in nxt))
    for q in chain:
        determination.append((f"hold_{q}", lambda cur, nxt, h=f"hold_{q}", e=f"enter_{q}", c=f"request_check_{q}": (
            (h in cur or e in nxt)
            and (c not in cur or "check_fail" not in nxt)
            and "machine_error" not in nxt
            and "press_reset" not in nxt
        )))
    determination.append(("hold_result", lambda cur, nxt: (
        ("hold_result" in cur or "machine_result" in nxt) and "press_reset" not in nxt
    )))
    prev = None
    for q in chain:
        determination.append((f"ask_{q}", lambda cur, nxt, h=f"hold_{q}", hp=(f"hold_{prev}" if prev else None): (
            h not in nxt and (hp is None or hp in nxt) and "mode_student" in nxt
        )))
        prev = q
    determination.append(("offer_start", lambda cur, nxt, hf=f"hold_{final_var}": hf in nxt and "mode_student" in nxt))
    determination.append(("offer_reset", lambda cur, nxt: "mode_student" in nxt))

    spec = GameSpec(
        env_aps=tuple(env_aps),
        sys_aps=tuple(sys_aps),
        env_safety=tuple(env_safety),
        env_liveness=env_liveness,
        sys_liveness=(),
        sys_safety=tuple(sys_safety),
        question_chain=chain,
        initial_state=frozenset(),  # placeholder, replaced below
        sys_determination=tuple(determination),
    )
    # post-reset initial state: the reaction to an empty history
    spec.initial_state = spec.complete_reaction(frozenset(), frozenset())
    return spec.validate()
