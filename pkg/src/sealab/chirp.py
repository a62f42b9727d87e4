"""Exponential chirp generation.

The excitation current sweeps its angular frequency geometrically from
omega_0 to omega_1 over t_f seconds:

    u(t)   = u_a * sin(phase(t)) + u_b
    phase(t) = (r**(t - t_0) - 1) / ln(r) * omega_0,   r = (omega_1/omega_0)**(1/t_f)

so the instantaneous frequency is omega_0 * r**(t - t_0).  The degenerate
constant-frequency case omega_1 == omega_0 is the analytic limit
phase(t) = (t - t_0) * omega_0, taken automatically when |ln r| underflows.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log

import numpy as np

_LN_RHO_EPS = 1e-12


@dataclass(frozen=True)
class ChirpConfig:
    """Amplitude/offset in amps, frequencies in rad/s, times in seconds."""

    u_a: float
    u_b: float
    omega_0: float
    omega_1: float
    t_0: float = 0.0
    t_f: float = 120.0

    def __post_init__(self):
        if self.u_a <= 0:
            raise ValueError("chirp amplitude must be positive")
        if self.omega_0 <= 0 or self.omega_1 <= 0:
            raise ValueError("chirp frequencies must be positive")
        if self.omega_1 < self.omega_0:
            raise ValueError("chirp must sweep upward (omega_1 >= omega_0)")
        if self.t_f <= 0:
            raise ValueError("chirp duration must be positive")

    @property
    def ln_rho(self) -> float:
        return log(self.omega_1 / self.omega_0) / self.t_f

    def to_dict(self) -> dict:
        return {
            "u_a": self.u_a,
            "u_b": self.u_b,
            "omega_0": self.omega_0,
            "omega_1": self.omega_1,
            "t_0": self.t_0,
            "t_f": self.t_f,
        }

    @staticmethod
    def from_dict(d: dict) -> "ChirpConfig":
        return ChirpConfig(**{k: float(d[k]) for k in ("u_a", "u_b", "omega_0", "omega_1", "t_0", "t_f")})


def chirp_phase(config: ChirpConfig, t):
    """Accumulated angle (rad) at time t; t may be scalar or array."""
    tau = np.asarray(t, dtype=float) - config.t_0
    ln_rho = config.ln_rho
    if abs(ln_rho) < _LN_RHO_EPS:
        return tau * config.omega_0
    return np.expm1(tau * ln_rho) / ln_rho * config.omega_0


def chirp_sample(config: ChirpConfig, t):
    """Commanded current (A) at time t."""
    return config.u_a * np.sin(chirp_phase(config, t)) + config.u_b


def instantaneous_frequency(config: ChirpConfig, t_k, f_s: float):
    """Discrete instantaneous frequency (rad/s) at sample time t_k.

    Backward difference of the accumulated angle over one sample period:
    f_s * (phase(t_k) - phase(t_k - 1/f_s)).  The angle is already in
    radians, so the sample-rate factor alone yields rad/s.
    """
    dt = 1.0 / float(f_s)
    return (chirp_phase(config, t_k) - chirp_phase(config, np.asarray(t_k, dtype=float) - dt)) * f_s
