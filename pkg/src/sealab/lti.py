"""Continuous-time transfer functions, bilinear discretization, and exact
frequency responses.

A TransferFunction is a rational function of the Laplace variable stored as
coefficient arrays in descending powers of s.  Transport delay is never
folded into the rational part; operations that need it take the delay as a
separate argument (analytic_bode) or as an integer sample shift
(simulation code in plant.py).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from .errors import AliasingError, EstimationError


@dataclass(frozen=True)
class TransferFunction:
    """Proper rational function num(s)/den(s), descending powers of s."""

    num: tuple[float, ...]
    den: tuple[float, ...]

    def __post_init__(self):
        num = _trim(self.num)
        den = _trim(self.den)
        if not den or den[0] == 0.0:
            raise ValueError("denominator leading coefficient must be nonzero")
        if len(num) > len(den):
            raise ValueError("transfer function must be proper (deg num <= deg den)")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @property
    def order(self) -> int:
        return len(self.den) - 1

    def __mul__(self, other: "TransferFunction | float") -> "TransferFunction":
        if isinstance(other, TransferFunction):
            return TransferFunction(
                tuple(np.polymul(self.num, other.num)),
                tuple(np.polymul(self.den, other.den)),
            )
        return TransferFunction(tuple(np.asarray(self.num) * float(other)), self.den)

    __rmul__ = __mul__

    def response(self, omega) -> np.ndarray:
        """Complex frequency response at angular frequencies omega (rad/s)."""
        s = 1j * np.atleast_1d(np.asarray(omega, dtype=float))
        return np.polyval(self.num, s) / np.polyval(self.den, s)

    def poles(self) -> np.ndarray:
        return np.roots(self.den)

    def zeros(self) -> np.ndarray:
        return np.roots(self.num) if len(self.num) > 1 else np.array([])

    @staticmethod
    def gain(g: float) -> "TransferFunction":
        return TransferFunction((float(g),), (1.0,))


def _trim(coeffs) -> tuple[float, ...]:
    c = [float(x) for x in coeffs]
    while len(c) > 1 and c[0] == 0.0:
        c.pop(0)
    return tuple(c)


@dataclass(frozen=True)
class DiscreteFilter:
    """Difference-equation coefficients b/a (descending powers of z) at rate f_s."""

    b: tuple[float, ...]
    a: tuple[float, ...]
    f_s: float
    poles: tuple[complex, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "poles", tuple(np.roots(self.a)))

    def is_stable(self) -> bool:
        return all(abs(p) < 1.0 for p in self.poles)

    def apply(self, u: np.ndarray) -> np.ndarray:
        """Run the filter over the full input sequence (zero initial state)."""
        return signal.lfilter(self.b, self.a, np.asarray(u, dtype=float))

    def response(self, omega) -> np.ndarray:
        """Complex response at continuous angular frequencies omega (rad/s)."""
        w = np.atleast_1d(np.asarray(omega, dtype=float)) / self.f_s
        _, h = signal.freqz(self.b, self.a, worN=w)
        return h


def discretize(tf: TransferFunction, f_s: float) -> DiscreteFilter:
    """Bilinear (trapezoidal) transform of tf at sample rate f_s.

    Preserves DC gain and stability; the response matches the continuous one
    closely for omega well below pi*f_s.  Rejects sample rates at or below
    twice the fastest pole/zero (in Hz), which would alias the dynamics.
    """
    if f_s <= 0:
        raise ValueError("sample rate must be positive")
    roots = np.concatenate([tf.poles(), tf.zeros()]) if len(tf.num) > 1 else tf.poles()
    if roots.size:
        fastest_hz = float(np.max(np.abs(roots))) / (2.0 * np.pi)
        if f_s <= 2.0 * fastest_hz:
            raise AliasingError(
                f"sample rate {f_s} Hz too low for dynamics at {fastest_hz:.1f} Hz "
                "(need f_s > 2x fastest pole/zero)"
            )
    b, a = signal.bilinear(tf.num, tf.den, fs=f_s)
    return DiscreteFilter(tuple(b), tuple(a), float(f_s))


def analytic_bode(tf: TransferFunction, delay: float, omega) -> tuple[np.ndarray, np.ndarray]:
    """Exact magnitude (dB) and continuously unwrapped phase (deg) of
    tf(j w) * exp(-j w delay) on the given frequency grid.

    The rational part is unwrapped across the grid and the delay term is
    added exactly, so sparse grids stay continuous even when the delay
    phase spans many turns.  Frequencies sitting on an imaginary-axis pole
    are rejected.
    """
    w = np.asarray(omega, dtype=float)
    if w.ndim != 1 or w.size < 1:
        raise ValueError("omega must be a 1-D array")
    if np.any(w <= 0) or np.any(np.diff(w) <= 0):
        raise ValueError("omega must be positive and strictly increasing")
    den_vals = np.polyval(tf.den, 1j * w)
    scale = max(abs(c) for c in tf.den)
    if np.any(np.abs(den_vals) < 1e-12 * scale):
        raise EstimationError("frequency grid hits a pole on the imaginary axis")
    h = np.polyval(tf.num, 1j * w) / den_vals
    mag_db = 20.0 * np.log10(np.abs(h))
    phase = np.degrees(np.unwrap(np.angle(h)))
    phase = phase - np.degrees(w * float(delay))
    return mag_db, phase
