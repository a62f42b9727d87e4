// Chart data models and canvas painters.
//
// The models are pure and unit-tested: the strip chart accepts stream
// frames in sequence order (tolerating gaps from dropped frames, rejecting
// regressions), the Bode overlay pairs the measured curve with the ideal
// one plus margin annotations.  The painters draw onto a 2D context and
// no-op when the environment provides none (tests run without canvas).

import { RingBuffer } from "./buffers.js";
import type { ArchiveDoc, BodeArrays, StreamFrame } from "./types.js";

export interface StripPoint {
  t: number;
  value: number;
}

export class StripChartModel {
  readonly u: RingBuffer<StripPoint>;
  readonly f: RingBuffer<StripPoint>;
  received = 0;
  dropped_gaps = 0;
  lastSeq = -1;

  constructor(capacity = 10_000) {
    this.u = new RingBuffer<StripPoint>(capacity);
    this.f = new RingBuffer<StripPoint>(capacity);
  }

  /** Append one frame; returns false for out-of-order or duplicate seq. */
  append(frame: StreamFrame): boolean {
    if (frame.seq <= this.lastSeq) return false;
    if (this.lastSeq >= 0 && frame.seq > this.lastSeq + 1) {
      this.dropped_gaps += frame.seq - this.lastSeq - 1;
    }
    this.lastSeq = frame.seq;
    this.received += 1;
    this.u.push({ t: frame.t, value: frame.u });
    this.f.push({ t: frame.t, value: frame.f });
    return true;
  }

  clear(): void {
    this.u.clear();
    this.f.clear();
    this.received = 0;
    this.dropped_gaps = 0;
    this.lastSeq = -1;
  }
}

export interface BodeSeries {
  label: string;
  omega: number[];
  mag: number[];
  phase: number[];
}

export interface BodeOverlayModel {
  measured: BodeSeries;
  ideal: BodeSeries;
  phaseWindow: [number, number];
  phiPm: number | null;
  omegaGc: number | null;
  phiD: number | null;
  magnitudeShiftDb: number;
}

export function overlayFromArchive(doc: ArchiveDoc): BodeOverlayModel {
  const series = (label: string, b: BodeArrays): BodeSeries => ({
    label,
    omega: b.omega_rad_s,
    mag: b.mag_db,
    phase: b.phase_deg,
  });
  return {
    measured: series("measured", doc.bode.measured),
    ideal: series("ideal", doc.bode.ideal),
    phaseWindow: doc.phase_window_deg,
    phiPm: doc.margins.phi_pm_deg,
    omegaGc: doc.margins.omega_gc_rad_s,
    phiD: doc.margins.phi_d_deg ?? null,
    magnitudeShiftDb: doc.margins.magnitude_shift_db,
  };
}

// --- painting ---------------------------------------------------------------

function ctx2d(canvas: HTMLCanvasElement | null): CanvasRenderingContext2D | null {
  if (!canvas || typeof canvas.getContext !== "function") return null;
  try {
    return canvas.getContext("2d");
  } catch {
    return null;
  }
}

export function drawStrip(
  canvas: HTMLCanvasElement | null,
  points: readonly StripPoint[],
  color: string,
  label: string,
): void {
  const ctx = ctx2d(canvas);
  if (!ctx || !canvas) return;
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  ctx.fillStyle = "#888";
  ctx.font = "11px sans-serif";
  ctx.fillText(label, 6, 14);
  if (points.length < 2) return;
  let lo = Infinity;
  let hi = -Infinity;
  for (const p of points) {
    if (p.value < lo) lo = p.value;
    if (p.value > hi) hi = p.value;
  }
  if (hi - lo < 1e-9) {
    lo -= 1;
    hi += 1;
  }
  const t0 = points[0].t;
  const t1 = points[points.length - 1].t;
  ctx.strokeStyle = color;
  ctx.beginPath();
  points.forEach((p, i) => {
    const x = ((p.t - t0) / Math.max(t1 - t0, 1e-9)) * (w - 10) + 5;
    const y = h - 8 - ((p.value - lo) / (hi - lo)) * (h - 24);
    if (i === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  });
  ctx.stroke();
}

function logx(omega: number, lo: number, hi: number, w: number): number {
  return ((Math.log10(omega) - Math.log10(lo)) / (Math.log10(hi) - Math.log10(lo))) * (w - 50) + 45;
}

export function drawBodeOverlay(
  magCanvas: HTMLCanvasElement | null,
  phaseCanvas: HTMLCanvasElement | null,
  model: BodeOverlayModel,
): void {
  drawBodePanel(magCanvas, model, "mag");
  drawBodePanel(phaseCanvas, model, "phase");
}

function drawBodePanel(
  canvas: HTMLCanvasElement | null,
  model: BodeOverlayModel,
  which: "mag" | "phase",
): void {
  const ctx = ctx2d(canvas);
  if (!ctx || !canvas) return;
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  const omegaLo = Math.min(model.measured.omega[0], model.ideal.omega[0]);
  const omegaHi = Math.max(
    model.measured.omega[model.measured.omega.length - 1],
    model.ideal.omega[model.ideal.omega.length - 1],
  );
  let lo: number;
  let hi: number;
  if (which === "phase") {
    [lo, hi] = model.phaseWindow;
  } else {
    const all = [...model.measured.mag, ...model.ideal.mag];
    lo = Math.min(...all) - 3;
    hi = Math.max(...all) + 3;
  }
  const y = (v: number) => h - 18 - ((Math.min(Math.max(v, lo), hi) - lo) / (hi - lo)) * (h - 30);
  for (const [series, style] of [
    [model.ideal, "#999"],
    [model.measured, "#0b62a4"],
  ] as const) {
    const values = which === "mag" ? series.mag : series.phase;
    ctx.strokeStyle = style;
    ctx.beginPath();
    series.omega.forEach((om, i) => {
      const px = logx(om, omegaLo, omegaHi, w);
      const py = y(values[i]);
      if (i === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    });
    ctx.stroke();
  }
  if (model.omegaGc !== null) {
    const px = logx(model.omegaGc, omegaLo, omegaHi, w);
    ctx.strokeStyle = "#c33";
    ctx.setLineDash([4, 3]);
    ctx.beginPath();
    ctx.moveTo(px, 10);
    ctx.lineTo(px, h - 18);
    ctx.stroke();
    ctx.setLineDash([]);
  }
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.fillText(which === "mag" ? "magnitude (dB)" : "phase (deg)", 6, 12);
}
