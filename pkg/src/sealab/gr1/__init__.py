"""Interaction-engine synthesis: a GR(1) safety game over the
student / checker / machine protocol, solved into a Mealy machine.
"""

from .spec import AtomicProposition, GameSpec, Predicate, Recurrence, build_spec
from .game import synthesize
from .strategy import EngineSession, Strategy
from .verify import VerificationReport, verify

__all__ = [
    "AtomicProposition",
    "GameSpec",
    "Predicate",
    "Recurrence",
    "build_spec",
    "synthesize",
    "Strategy",
    "EngineSession",
    "verify",
    "VerificationReport",
]
