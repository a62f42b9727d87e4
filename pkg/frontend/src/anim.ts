// Animated device view: the drive belt's phase angle and the spring's
// deflection, redrawn from each stream frame.  This panel stands in for a
// camera feed pointed at the machine.

export function drawDevice(canvas: HTMLCanvasElement | null, belt: number, defl: number): void {
  if (!canvas || typeof canvas.getContext !== "function") return;
  let ctx: CanvasRenderingContext2D | null = null;
  try {
    ctx = canvas.getContext("2d");
  } catch {
    return;
  }
  if (!ctx) return;
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);

  // motor pulley with a rotating spoke (belt phase)
  const cx = w * 0.25;
  const cy = h * 0.5;
  const r = Math.min(w, h) * 0.22;
  ctx.strokeStyle = "#333";
  ctx.lineWidth = 3;
  ctx.beginPath();
  ctx.arc(cx, cy, r, 0, 2 * Math.PI);
  ctx.stroke();
  ctx.beginPath();
  ctx.moveTo(cx, cy);
  ctx.lineTo(cx + r * Math.cos(belt), cy + r * Math.sin(belt));
  ctx.stroke();

  // series spring: zigzag whose compression follows the deflection
  const springX0 = w * 0.45;
  const springX1 = w * 0.9;
  const scale = 2.5e4; // meters of deflection to pixels, exaggerated for visibility
  const stretch = Math.max(-18, Math.min(18, defl * scale));
  const coils = 7;
  ctx.strokeStyle = "#0b62a4";
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(springX0, cy);
  const span = springX1 - springX0 + stretch;
  for (let i = 1; i <= coils; i++) {
    const x = springX0 + (span * i) / coils;
    const y = cy + (i % 2 === 0 ? -14 : 14);
    ctx.lineTo(x, y);
  }
  ctx.lineTo(springX0 + span, cy);
  ctx.stroke();

  ctx.fillStyle = "#666";
  ctx.font = "10px sans-serif";
  ctx.fillText(`belt ${(belt % (2 * Math.PI)).toFixed(2)} rad`, 8, h - 8);
  ctx.fillText(`defl ${(defl * 1e3).toFixed(3)} mm`, w * 0.45, h - 8);
}
