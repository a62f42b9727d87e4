"""Explicit-state GR(1) game solving and strategy extraction.

Positions are full valuations of one time step (the environment action
taken that step plus the system's reaction and state flags).  A move is:
the environment picks an admissible action for the next step, then the
system completes the next valuation subject to its safety requirements.

The winning set is the standard three-nested fixed point

    Z = nu Z . AND_j  mu Y . OR_i  nu X .
            (goal_j and cpre(Z)) or cpre(Y) or (not live_i and cpre(X))

over system recurrence goals j and environment recurrence assumptions i,
where cpre(S) holds at a position if for every admissible environment
action there is a legal system completion landing in S (positions where
the environment is stuck count as winning).  A spec with no system
recurrence goals gets the trivially-true goal, reducing the condition to
maintaining the safety requirements against all admissible environment
behavior; the X term still lets the system win by sitting in a region the
environment can leave only by serving a starved recurrence assumption.

The extracted strategy is deterministic and total over admissible moves,
then minimized by bisimulation-quotient partition refinement.  States that
differ only in the environment bits of their valuation collapse; the
constraint format (nothing reads the *previous* step's environment bits)
makes that collapse exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from ..errors import UnrealizableError
from .spec import GameSpec, Recurrence, Valuation
from .strategy import Strategy, StrategyState, Transition, move_key

MAX_POSITIONS = 10**6
MAX_FREE_ENUM = 2**16


@dataclass
class GameGraph:
    spec: GameSpec
    positions: list                 # index -> valuation
    index: dict                     # valuation -> index
    # per position: list of (env move, tuple of next-position indices)
    edges: list


def _completions(spec: GameSpec, cur: Valuation, env_move: Valuation) -> list:
    determined = spec.complete_reaction(cur, env_move)
    free = sorted(spec.sys_names() - {n for n, _ in spec.sys_determination})
    if free:
        if 2 ** len(free) > MAX_FREE_ENUM:
            raise UnrealizableError(
                f"{len(free)} undetermined system APs is beyond the explicit enumeration limit"
            )
        candidates = [
            determined | frozenset(combo)
            for r in range(len(free) + 1)
            for combo in itertools.combinations(free, r)
        ]
    else:
        candidates = [determined]
    return [c for c in candidates if all(p.holds(cur, c) for p in spec.sys_safety)]


def build_graph(spec: GameSpec) -> GameGraph:
    positions = [spec.initial_state]
    index = {spec.initial_state: 0}
    edges = [None]
    frontier = [0]
    while frontier:
        next_frontier = []
        for i in frontier:
            cur = positions[i]
            out = []
            for move in spec.admissible_moves(cur):
                opts = []
                for nxt in _completions(spec, cur, move):
                    j = index.get(nxt)
                    if j is None:
                        j = len(positions)
                        if j >= MAX_POSITIONS:
                            raise UnrealizableError("reachable game exceeds the position limit")
                        index[nxt] = j
                        positions.append(nxt)
                        edges.append(None)
                        next_frontier.append(j)
                    opts.append(j)
                out.append((move, tuple(opts)))
            edges[i] = tuple(out)
        frontier = next_frontier
    return GameGraph(spec=spec, positions=positions, index=index, edges=edges)


def _cpre(graph: GameGraph, target: set) -> set:
    out = set()
    for i, moves in enumerate(graph.edges):
        if all(any(j in target for j in opts) for _, opts in moves):
            out.add(i)
    return out


@dataclass
class Strata:
    """Fixed-point iterates retained for strategy extraction."""

    goal: Recurrence
    target: set                      # goal and cpre(Z)
    y_levels: list = field(default_factory=list)   # increasing Y iterates
    x_sets: list = field(default_factory=list)     # per Y level: per assumption X set


TRIVIAL_GOAL = Recurrence("trivial recurrence goal (true)", frozenset(), lambda v: True)
TRIVIAL_ASSUMPTION = Recurrence("trivial recurrence assumption (true)", frozenset(), lambda v: True)


def solve(spec: GameSpec):
    """Winning set plus extraction strata; raises if the game is unrealizable."""
    graph = build_graph(spec)
    goals = list(spec.sys_liveness) or [TRIVIAL_GOAL]
    assumptions = list(spec.env_liveness) or [TRIVIAL_ASSUMPTION]
    n = len(graph.positions)
    goal_sets = [{i for i in range(n) if g.holds(graph.positions[i])} for g in goals]
    live_sets = [{i for i in range(n) if a.holds(graph.positions[i])} for a in assumptions]

    z = set(range(n))
    strata: list = []
    while True:
        z_changed = False
        strata = []
        for goal_set, goal in zip(goal_sets, goals):
            target = goal_set & _cpre(graph, z)
            st = Strata(goal=goal, target=target)
            y: set = set()
            while True:
                base = target | _cpre(graph, y)
                new_y = set(base)
                level_x = []
                for live in live_sets:
                    x = set(z)
                    while True:
                        new_x = base | ((set(range(n)) - live) & _cpre(graph, x))
                        if new_x == x:
                            break
                        x = new_x
                    level_x.append(x)
                    new_y |= x
                if new_y == y:
                    break
                y = new_y
                st.y_levels.append(set(y))
                st.x_sets.append(level_x)
            if z - y:
                z = z & y
                z_changed = True
            strata.append(st)
        if not z_changed:
            break

    if 0 not in z:
        raise UnrealizableError(
            "interaction spec is unrealizable: the environment can force a "
            "requirement violation from the initial state",
            counter_trace=_counter_trace(graph, z),
        )
    return graph, z, strata, goals


def _counter_trace(graph: GameGraph, win: set) -> list:
    """A short environment strategy witnessing unrealizability.

    From losing positions the environment picks a move whose every legal
    completion stays losing (or admits none); ranks guarantee progress
    toward a position where the system is stuck outright.
    """
    n = len(graph.positions)
    lose = set(range(n)) - win
    rank = {}
    changed = True
    while changed:
        changed = False
        for i in sorted(lose):
            if i in rank:
                continue
            for move, opts in graph.edges[i]:
                if not opts:
                    if rank.get(i, None) != 0:
                        rank[i] = 0
                        changed = True
                    break
                if all(j in rank for j in opts):
                    r = 1 + max(rank[j] for j in opts)
                    if rank.get(i, r + 1) > r:
                        rank[i] = r
                        changed = True
    trace = []
    i = 0
    seen = set()
    while i in rank and rank[i] > 0 and i not in seen:
        seen.add(i)
        best = None
        for move, opts in graph.edges[i]:
            if opts and all(j in rank for j in opts):
                worst = max(rank[j] for j in opts)
                if best is None or worst < best[0]:
                    best = (worst, move, opts)
        if best is None:
            break
        _, move, opts = best
        nxt = max(opts, key=lambda j: -rank[j])
        trace.append({"env": sorted(move), "reaction": sorted(graph.positions[nxt] - move)})
        i = nxt
    if i in rank and rank[i] == 0:
        stuck = next((sorted(m) for m, opts in graph.edges[i] if not opts), [])
        trace.append({"env": stuck, "reaction": None})
    return trace


def synthesize(spec: GameSpec) -> Strategy:
    """Solve the game and extract a minimized deterministic Mealy strategy."""
    spec.validate()
    graph, win, strata, goals = solve(spec)
    env_names = spec.env_names()

    n_goals = len(strata)

    def pick(pos: int, goal_idx: int):
        """Choose, per admissible move, a completion per the fixed-point rule."""
        st = strata[goal_idx]
        choice = {}
        advance = pos in st.target
        if advance:
            allowed = win
        else:
            level = next(k for k, y in enumerate(st.y_levels) if pos in y)
            if level > 0 and _in_cpre(graph, pos, st.y_levels[level - 1]):
                allowed = st.y_levels[level - 1]
            else:
                x_allowed = None
                for x in st.x_sets[level]:
                    if pos in x:
                        x_allowed = x
                        break
                allowed = x_allowed if x_allowed is not None else win
        for move, opts in graph.edges[pos]:
            target_opt = next((j for j in opts if j in allowed), None)
            if target_opt is None:
                target_opt = next((j for j in opts if j in win), opts[0] if opts else None)
            choice[move] = target_opt
        next_goal = (goal_idx + 1) % n_goals if advance else goal_idx
        return choice, next_goal

    # walk the product (position, goal memory), emitting raw Mealy states
    raw_states = {}
    raw_trans = {}
    start = (0, 0)
    stack = [start]
    while stack:
        key = stack.pop()
        if key in raw_states:
            continue
        pos, gi = key
        raw_states[key] = len(raw_states)
        choice, next_gi = pick(pos, gi)
        entry = {}
        for move, j in choice.items():
            if j is None:
                continue
            succ = (j, next_gi)
            entry[move_key(move)] = (frozenset(graph.positions[j] - env_names), succ)
            if succ not in raw_states:
                stack.append(succ)
        raw_trans[key] = entry

    # bisimulation quotient: refine on (own system bits, per-move outputs),
    # then successor classes
    keys = sorted(raw_states, key=lambda k: raw_states[k])
    sys_label = {k: frozenset(graph.positions[k[0]] - env_names) for k in keys}
    sig0 = {
        k: (tuple(sorted(sys_label[k])), tuple(sorted((mk, tuple(sorted(out))) for mk, (out, _) in raw_trans[k].items())))
        for k in keys
    }
    classes = {}
    for k in keys:
        classes.setdefault(sig0[k], []).append(k)
    cls_of = {k: i for i, members in enumerate(classes.values()) for k in members}
    while True:
        sig = {
            k: (cls_of[k], tuple(sorted((mk, cls_of[succ]) for mk, (_, succ) in raw_trans[k].items())))
            for k in keys
        }
        new_classes = {}
        for k in keys:
            new_classes.setdefault(sig[k], []).append(k)
        new_cls_of = {k: i for i, members in enumerate(new_classes.values()) for k in members}
        if len(new_classes) == len(set(cls_of.values())):
            cls_of = new_cls_of
            break
        cls_of = new_cls_of

    # renumber classes by BFS order from the initial one for stable output
    order = []
    seen = set()
    queue = [cls_of[start]]
    rep_of = {}
    for k in keys:
        rep_of.setdefault(cls_of[k], k)
    while queue:
        c = queue.pop(0)
        if c in seen:
            continue
        seen.add(c)
        order.append(c)
        rep = rep_of[c]
        for mk in sorted(raw_trans[rep]):
            succ_c = cls_of[raw_trans[rep][mk][1]]
            if succ_c not in seen:
                queue.append(succ_c)
    renum = {c: i for i, c in enumerate(order)}

    states = {}
    transitions = {}
    for c in order:
        rep = rep_of[c]
        sid = renum[c]
        label = sys_label[rep]
        states[sid] = StrategyState(id=sid, label=tuple(sorted(label)), annotation=_annotate(label, spec))
        transitions[sid] = {
            mk: Transition(output=tuple(sorted(out)), next=renum[cls_of[succ]])
            for mk, (out, succ) in raw_trans[rep].items()
        }

    return Strategy(
        states=states,
        initial=renum[cls_of[start]],
        transitions=transitions,
        question_chain=tuple(spec.question_chain),
        env_ap_names=tuple(sorted(env_names)),
        sys_ap_names=tuple(sorted(spec.sys_names())),
        metadata={
            "positions": len(graph.positions),
            "raw_states": len(raw_states),
            "minimized_states": len(states),
            "env_actions": len(spec.env_aps),
            "sys_actions": len(spec.sys_aps),
            "goals": [g.name for g in goals],
        },
    )


def _in_cpre(graph: GameGraph, pos: int, target: set) -> bool:
    """True if every admissible move from pos has a completion in target."""
    return all(any(j in target for j in opts) for _, opts in graph.edges[pos])


def _annotate(label: Valuation, spec: GameSpec) -> str:
    if "trigger_run" in label:
        return "running experiment"
    checking = [q for q in spec.question_chain if f"request_check_{q}" in label]
    if checking:
        return f"awaiting check of '{checking[0]}'"
    asking = [q for q in spec.question_chain if f"ask_{q}" in label]
    suffix = "; result saved" if "hold_result" in label else ""
    if asking:
        return f"asking '{asking[0]}'" + suffix
    if "offer_start" in label:
        return ("done: result saved; run again or reset" if "hold_result" in label
                else "ready to run")
    return "idle" + suffix
