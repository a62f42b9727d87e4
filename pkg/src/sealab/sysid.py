"""Frequency-response estimation from chirp runs, and stability margins.

The single-FFT estimate divides the output spectrum by the input spectrum
over the whole record; sensor noise makes it ragged.  The piecewise method
splits the record into contiguous equal-length subsections, windows and
FFTs each one, and keeps only the transfer ratio at the bin nearest that
subsection's instantaneous chirp frequency.  Because each subsection's
excitation energy is concentrated in a narrow band, broadband noise at all
other frequencies is rejected and the resulting diagram is clean.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chirp import instantaneous_frequency
from .errors import EstimationError
from .lti import TransferFunction, analytic_bode
from .plant import ExperimentRecord

MIN_SEGMENT_SAMPLES = 64


@dataclass
class BodeData:
    """Frequency grid with magnitude (dB) and unwrapped phase (deg)."""

    omega: np.ndarray
    mag_db: np.ndarray
    phase_deg: np.ndarray
    source: str  # "piecewise_fft" | "single_fft" | "analytic"
    meta: dict = field(default_factory=dict)

    def validate(self) -> "BodeData":
        n = len(self.omega)
        if n < 2 or len(self.mag_db) != n or len(self.phase_deg) != n:
            raise EstimationError("Bode arrays must have equal length >= 2")
        if np.any(np.diff(self.omega) <= 0):
            raise EstimationError("Bode frequency grid must be strictly increasing")
        if np.any(np.abs(np.diff(self.phase_deg)) >= 180.0):
            raise EstimationError("Bode phase must be continuous (|step| < 180 deg)")
        return self

    def shifted(self, shift_db: float) -> "BodeData":
        return BodeData(self.omega, self.mag_db + float(shift_db), self.phase_deg, self.source, dict(self.meta))

    def to_csv(self) -> str:
        lines = ["omega_rad_s,mag_db,phase_deg"]
        for w, m, p in zip(self.omega, self.mag_db, self.phase_deg):
            lines.append(f"{w:.9g},{m:.9g},{p:.9g}")
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_csv(text: str, source: str = "file", meta: dict | None = None) -> "BodeData":
        lines = text.strip().splitlines()
        if not lines or lines[0].strip() != "omega_rad_s,mag_db,phase_deg":
            raise ValueError("Bode CSV must start with header 'omega_rad_s,mag_db,phase_deg'")
        data = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
        return BodeData(data[:, 0], data[:, 1], data[:, 2], source, meta or {})


@dataclass(frozen=True)
class MarginReport:
    """Phase margin and gain-crossover frequency read off a Bode diagram."""

    phi_pm: float
    omega_gc: float
    crossover_found: bool


def analytic_bode_data(tf: TransferFunction, delay: float, omega) -> BodeData:
    mag, phase = analytic_bode(tf, delay, omega)
    return BodeData(np.asarray(omega, dtype=float), mag, phase, "analytic")


def single_fft_bode(record: ExperimentRecord) -> BodeData:
    """Output/input spectrum ratio over the whole record, chirp band only.

    Kept as the noisy baseline: with measurement noise the excitation at any
    single frequency is brief, so every bin carries the full noise floor.
    """
    n = record.n_samples
    spec_u = np.fft.rfft(np.asarray(record.u, dtype=float))
    spec_f = np.fft.rfft(np.asarray(record.f, dtype=float))
    omega = np.fft.rfftfreq(n, d=1.0 / record.f_s) * 2.0 * np.pi
    lo, hi = record.chirp.omega_0, record.chirp.omega_1
    band = (omega >= lo) & (omega <= hi)
    usable = band & (np.abs(spec_u) > 1e-12)
    dropped = int(np.count_nonzero(band) - np.count_nonzero(usable))
    h = spec_f[usable] / spec_u[usable]
    data = BodeData(
        omega=omega[usable],
        mag_db=20.0 * np.log10(np.abs(h)),
        phase_deg=np.degrees(np.unwrap(np.angle(h))),
        source="single_fft",
        meta={"dropped_bins": dropped},
    )
    return data


def piecewise_fft_bode(record: ExperimentRecord, n_segments: int = 120, window: str = "hann") -> BodeData:
    """One Bode point per subsection, read at the chirp's own frequency.

    The record is split into n_segments contiguous, non-overlapping pieces.
    Each piece is windowed and FFT'd; its point is the transfer ratio at the
    FFT bin nearest the instantaneous chirp frequency at the piece midpoint,
    reported at that midpoint frequency.  Pieces whose midpoint frequency
    falls below their own FFT resolution cannot localize it and are dropped
    (counted in meta["dropped_segments"]).  Phase is unwrapped across the
    emitted sequence, anchored so the first point lies in (-180, 180].
    """
    if n_segments < 2:
        raise EstimationError("piecewise estimation needs at least 2 segments to localize frequency")
    seg_len = record.n_samples // int(n_segments)
    if seg_len < MIN_SEGMENT_SAMPLES:
        raise EstimationError(
            f"segments too short: {seg_len} samples/segment (need >= {MIN_SEGMENT_SAMPLES})"
        )
    win = _window(window, seg_len)
    d_omega = 2.0 * np.pi * record.f_s / seg_len  # FFT bin spacing of one segment
    bin_omegas = np.arange(seg_len // 2 + 1) * d_omega

    omegas, mags, phases = [], [], []
    dropped = 0
    for k in range(int(n_segments)):
        a = k * seg_len
        seg_t_mid = record.t[a] + 0.5 * seg_len / record.f_s
        w_c = float(instantaneous_frequency(record.chirp, seg_t_mid, record.f_s))
        if w_c < d_omega:
            dropped += 1
            continue
        idx = int(np.argmin(np.abs(bin_omegas - w_c)))
        if idx == 0:
            dropped += 1
            continue
        spec_u = np.fft.rfft(win * record.u[a:a + seg_len])
        spec_f = np.fft.rfft(win * record.f[a:a + seg_len])
        if abs(spec_u[idx]) < 1e-12:
            dropped += 1
            continue
        h = spec_f[idx] / spec_u[idx]
        omegas.append(w_c)
        mags.append(20.0 * np.log10(abs(h)))
        phases.append(np.angle(h))
    if len(omegas) < 2:
        raise EstimationError("piecewise estimation produced fewer than 2 usable points")
    phase_deg = np.degrees(np.unwrap(np.array(phases)))
    data = BodeData(
        omega=np.array(omegas),
        mag_db=np.array(mags),
        phase_deg=phase_deg,
        source="piecewise_fft",
        meta={"n_segments": int(n_segments), "dropped_segments": dropped, "window": window},
    )
    return data.validate()


def _window(name: str, n: int) -> np.ndarray:
    if name == "hann":
        return np.hanning(n)
    if name == "boxcar":
        return np.ones(n)
    raise ValueError(f"unknown window '{name}'")


def measure_margins(bode: BodeData) -> MarginReport:
    """Gain-crossover frequency and phase margin by interpolation.

    The crossover is the first downward 0 dB crossing, interpolated linearly
    in (log omega, dB); the phase there is interpolated the same way and the
    margin is 180 deg plus that phase.  If the magnitude never crosses 0 dB
    the absence is reported in the flag rather than raised.
    """
    crossing = _crossover(bode.omega, bode.mag_db, 0.0)
    if crossing is None:
        return MarginReport(phi_pm=float("nan"), omega_gc=float("nan"), crossover_found=False)
    w_gc, i, frac = crossing
    phase = bode.phase_deg[i] + frac * (bode.phase_deg[i + 1] - bode.phase_deg[i])
    return MarginReport(phi_pm=float(180.0 + phase), omega_gc=float(w_gc), crossover_found=True)


def shifted_crossover(bode: BodeData, shift_db: float) -> float:
    """Gain-crossover frequency after shifting the magnitude curve up."""
    if not np.isfinite(shift_db):
        raise ValueError("shift must be finite")
    crossing = _crossover(bode.omega, bode.mag_db + float(shift_db), 0.0)
    if crossing is None:
        raise EstimationError(
            f"shifted magnitude ({shift_db:+.2f} dB) never crosses 0 dB: "
            "shift too large for the measured band"
        )
    return crossing[0]


def _crossover(omega: np.ndarray, mag_db: np.ndarray, level: float):
    """First downward crossing of level; returns (omega, index, fraction)."""
    m = mag_db - level
    for i in range(len(m) - 1):
        if m[i] > 0.0 and m[i + 1] <= 0.0:
            frac = m[i] / (m[i] - m[i + 1])
            logw = np.log10(omega[i]) + frac * (np.log10(omega[i + 1]) - np.log10(omega[i]))
            return float(10.0 ** logw), i, float(frac)
    return None


def display_phase_window(bode: BodeData, lo: float = -270.0, hi: float = 90.0, mode: str = "clip") -> BodeData:
    """Presentation view of a Bode diagram with a fixed phase axis window.

    "clip" (default) leaves the data untouched and only records the axis
    window in metadata; "wrap" maps each phase point by whole turns into
    [lo, hi) where possible.  The input object is never modified.
    """
    if lo >= hi:
        raise ValueError("phase window requires lo < hi")
    phase = np.array(bode.phase_deg, copy=True)
    if mode == "wrap":
        span = hi - lo
        turns = np.ceil((lo - phase) / 360.0)
        wrapped = phase + 360.0 * turns
        phase = np.where(wrapped < lo + span, wrapped, phase)
    elif mode != "clip":
        raise ValueError("mode must be 'clip' or 'wrap'")
    meta = dict(bode.meta)
    meta["phase_window"] = [lo, hi]
    meta["phase_window_mode"] = mode
    return BodeData(np.array(bode.omega, copy=True), np.array(bode.mag_db, copy=True), phase, bode.source, meta)
