"""Guided lead-compensator design: reference answers and grading.

The student walks a fixed six-question chain, each step building on the
accepted answers of the earlier ones:

    delta_phi -> phi_max -> alpha -> omega_gc_max -> omega_gc -> (k, p, z)

delta_phi is the gap between the desired and the measured phase margin.
phi_max follows the rule of thumb "5-10 degrees above delta_phi" (the
engine's own reference is the midpoint).  alpha = (1+sin)/(1-sin) of
phi_max sets the pole/zero ratio, omega_gc_max is read off the magnitude
curve shifted up by 20*log10(alpha), the new crossover omega_gc must sit
strictly between the old one and omega_gc_max, and the controller is

    G_c(s) = k_ss * k * (s + z) / (s + p),  k = alpha,
    p = omega_gc * sqrt(alpha),  z = omega_gc / sqrt(alpha).

Grading tolerances come from a JSON catalog so instructors can edit them
without touching code.  Later questions grade against the student's own
accepted upstream values, so any in-band phi_max choice stays consistent
through the rest of the chain.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources

from .errors import DesignInfeasibleError, PrerequisiteError
from .lti import TransferFunction
from .sysid import BodeData, shifted_crossover

QUESTION_ORDER = ("delta_phi", "phi_max", "alpha", "omega_gc_max", "omega_gc", "controller")

PHI_MAX_MARGIN_LO = 5.0
PHI_MAX_MARGIN_HI = 10.0


@dataclass
class LeadDesignState:
    """Design ledger for one session.

    Measured context (k_ss, phi_pm, omega_gc_min, phi_d and the session's
    Bode diagram) is fixed at construction; the six design fields start
    unset (None) and are filled in as answers are accepted.
    """

    k_ss: float
    phi_pm: float
    omega_gc_min: float
    phi_d: float
    bode: BodeData | None = None
    delta_phi: float | None = None
    phi_max: float | None = None
    alpha: float | None = None
    omega_gc_max: float | None = None
    omega_gc: float | None = None
    k: float | None = None
    p: float | None = None
    z: float | None = None

    def accepted(self) -> dict:
        out = {}
        for name in ("delta_phi", "phi_max", "alpha", "omega_gc_max", "omega_gc", "k", "p", "z"):
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        return out


@dataclass(frozen=True)
class AnswerVerdict:
    correct: bool
    expected_summary: str  # instructor-facing; never shown to the student
    tolerance_used: str


def delta_phi(phi_d: float, phi_pm: float) -> float:
    """Required phase-margin increase, deg."""
    return phi_d - phi_pm


def phi_max_accepted_range(dphi: float) -> tuple[float, float]:
    """Accepted band for the peak compensator lead, deg.

    Rule of thumb: 5-10 degrees above the required increase, to cover the
    extra phase the plant loses when the gain shift moves the crossover up.
    """
    if dphi < 0:
        raise ValueError("delta_phi must be nonnegative")
    lo, hi = dphi + PHI_MAX_MARGIN_LO, dphi + PHI_MAX_MARGIN_HI
    if hi >= 90.0:
        raise DesignInfeasibleError(
            f"phi_max band [{lo:.1f}, {hi:.1f}] deg reaches 90 deg; "
            "a single lead section cannot supply that much phase"
        )
    return lo, hi


def reference_phi_max(dphi: float) -> float:
    lo, hi = phi_max_accepted_range(dphi)
    return 0.5 * (lo + hi)


def alpha_from_phi_max(phi_max: float) -> float:
    """Pole/zero ratio delivering a peak lead of phi_max, deg."""
    if not 0.0 <= phi_max < 90.0:
        raise ValueError("phi_max must lie in [0, 90) degrees")
    s = math.sin(math.radians(phi_max))
    return (1.0 + s) / (1.0 - s)


def controller_params(alpha: float, omega_gc: float) -> tuple[float, float, float]:
    """Gain, pole and zero placing the peak lead at omega_gc."""
    if alpha < 1.0:
        raise ValueError("alpha must be >= 1")
    if omega_gc <= 0.0:
        raise ValueError("omega_gc must be positive")
    root = math.sqrt(alpha)
    return alpha, omega_gc * root, omega_gc / root


def controller_tf(state: LeadDesignState) -> TransferFunction:
    """First-order lead section k_ss * k * (s+z)/(s+p)."""
    for name in ("k", "p", "z"):
        if getattr(state, name) is None:
            raise PrerequisiteError(f"controller field '{name}' not set")
    g = state.k_ss * state.k
    return TransferFunction(num=(g, g * state.z), den=(1.0, state.p))


def lead_tf(k: float, p: float, z: float) -> TransferFunction:
    return TransferFunction(num=(k, k * z), den=(1.0, p))


# --- question catalog -------------------------------------------------------

_PREREQS = {
    "delta_phi": (),
    "phi_max": ("delta_phi",),
    "alpha": ("phi_max",),
    "omega_gc_max": ("alpha",),
    "omega_gc": ("omega_gc_max",),
    "controller": ("omega_gc",),
}


def load_question_catalog(path=None) -> list[dict]:
    """Question ids, prompts, prerequisites and tolerance specs.

    Loaded from the packaged JSON by default, or from an instructor-edited
    file.  The catalog is validated against the fixed chain order; prompts
    and tolerances are free to change.
    """
    if path is None:
        text = resources.files("sealab.data").joinpath("design_questions.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    catalog = json.loads(text)
    ids = [q["id"] for q in catalog]
    if ids != list(QUESTION_ORDER):
        raise ValueError(f"design question catalog must define the chain {QUESTION_ORDER} in order, got {ids}")
    for q in catalog:
        if tuple(q.get("prerequisites", ())) != _PREREQS[q["id"]]:
            raise ValueError(f"question '{q['id']}' has wrong prerequisites")
    return catalog


def _tolerances(catalog: list[dict] | None) -> dict:
    tol = {
        "delta_phi": 0.5,      # absolute, deg
        "alpha": 0.02,         # relative
        "omega_gc_max": 0.10,  # relative
        "controller": 0.02,    # relative, each of k, p, z
    }
    if catalog:
        for q in catalog:
            if "tolerance" in q:
                tol[q["id"]] = float(q["tolerance"])
    return tol


def _require(state: LeadDesignState, question_id: str) -> None:
    chain_pos = QUESTION_ORDER.index(question_id)
    for prior in QUESTION_ORDER[:chain_pos]:
        fields = ("k", "p", "z") if prior == "controller" else (prior,)
        for name in fields:
            if getattr(state, name) is None:
                raise PrerequisiteError(
                    f"question '{question_id}' graded before '{prior}' was accepted"
                )


def check_answer(question_id: str, submitted, state: LeadDesignState, catalog: list[dict] | None = None) -> AnswerVerdict:
    """Grade one submission against the state's accepted upstream values.

    On a correct answer the submitted value is written into the state, so
    downstream questions follow the student's own (in-tolerance) numbers
    rather than the engine's references.
    """
    if question_id not in QUESTION_ORDER:
        raise ValueError(f"unknown design question '{question_id}'")
    _require(state, question_id)
    tol = _tolerances(catalog)

    if question_id == "delta_phi":
        expected = delta_phi(state.phi_d, state.phi_pm)
        ok = bool(abs(float(submitted) - expected) <= tol["delta_phi"])
        if ok:
            state.delta_phi = float(submitted)
        return AnswerVerdict(ok, f"delta_phi = {expected:.3f} deg", f"+/-{tol['delta_phi']} deg absolute")

    if question_id == "phi_max":
        lo, hi = phi_max_accepted_range(state.delta_phi)
        ok = bool(lo <= float(submitted) <= hi)
        if ok:
            state.phi_max = float(submitted)
        return AnswerVerdict(ok, f"phi_max in [{lo:.2f}, {hi:.2f}] deg (reference {0.5 * (lo + hi):.2f})", f"closed band [{lo:.2f}, {hi:.2f}] deg")

    if question_id == "alpha":
        expected = alpha_from_phi_max(state.phi_max)
        ok = _within_rel(float(submitted), expected, tol["alpha"])
        if ok:
            state.alpha = float(submitted)
        return AnswerVerdict(ok, f"alpha = {expected:.4f}", f"{tol['alpha']:.0%} relative")

    if question_id == "omega_gc_max":
        if state.bode is None:
            raise PrerequisiteError("omega_gc_max grading needs the session's measured Bode diagram")
        expected = shifted_crossover(state.bode, 20.0 * math.log10(state.alpha))
        ok = _within_rel(float(submitted), expected, tol["omega_gc_max"])
        if ok:
            state.omega_gc_max = float(submitted)
        return AnswerVerdict(ok, f"omega_gc_max = {expected:.2f} rad/s", f"{tol['omega_gc_max']:.0%} relative")

    if question_id == "omega_gc":
        lo, hi = state.omega_gc_min, state.omega_gc_max
        ok = bool(lo < float(submitted) < hi)
        if ok:
            state.omega_gc = float(submitted)
        return AnswerVerdict(ok, f"omega_gc strictly inside ({lo:.2f}, {hi:.2f}) rad/s", "open interval")

    # controller: three-component answer (k, p, z)
    try:
        k, p, z = (float(x) for x in submitted)
    except (TypeError, ValueError):
        return AnswerVerdict(False, "controller answer must be the triple (k, p, z)", "format")
    ek, ep, ez = controller_params(state.alpha, state.omega_gc)
    ok = (
        _within_rel(k, ek, tol["controller"])
        and _within_rel(p, ep, tol["controller"])
        and _within_rel(z, ez, tol["controller"])
        and p > z > 0
    )
    if ok:
        state.k, state.p, state.z = k, p, z
    return AnswerVerdict(
        ok,
        f"(k, p, z) = ({ek:.4f}, {ep:.3f}, {ez:.4f})",
        f"{tol['controller']:.0%} relative on each component",
    )


def reference_answer(question_id: str, state: LeadDesignState):
    """The engine's own answer for a question, from the accepted state."""
    _require(state, question_id)
    if question_id == "delta_phi":
        return delta_phi(state.phi_d, state.phi_pm)
    if question_id == "phi_max":
        return reference_phi_max(state.delta_phi)
    if question_id == "alpha":
        return alpha_from_phi_max(state.phi_max)
    if question_id == "omega_gc_max":
        if state.bode is None:
            raise PrerequisiteError("omega_gc_max reference needs the session's measured Bode diagram")
        return shifted_crossover(state.bode, 20.0 * math.log10(state.alpha))
    if question_id == "omega_gc":
        # the crossover of the +10*log10(alpha) shifted curve: exactly where
        # the compensator's own sqrt(alpha) gain will put the new crossover
        if state.bode is None:
            raise PrerequisiteError("omega_gc reference needs the session's measured Bode diagram")
        return shifted_crossover(state.bode, 10.0 * math.log10(state.alpha))
    if question_id == "controller":
        return controller_params(state.alpha, state.omega_gc)
    raise ValueError(f"unknown design question '{question_id}'")


def run_reference_chain(state: LeadDesignState, catalog: list[dict] | None = None) -> LeadDesignState:
    """Feed the engine's own answers through the grader, end to end."""
    for qid in QUESTION_ORDER:
        verdict = check_answer(qid, reference_answer(qid, state), state, catalog)
        if not verdict.correct:
            raise RuntimeError(f"reference answer for '{qid}' rejected: {verdict.expected_summary}")
    return state


def _within_rel(value: float, expected: float, rel: float) -> bool:
    return bool(abs(value - expected) <= rel * abs(expected))
