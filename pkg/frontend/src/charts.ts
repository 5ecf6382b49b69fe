// Minimal strip charts: series drawn over the rolling window with a shared
// symmetric y-scale, newest sample at the right edge.

import { RollingBuffer } from "./buffers.js";

export interface Series {
  buffer: RollingBuffer;
  color: string;
  label: string;
}

export function drawStripChart(
  canvas: HTMLCanvasElement,
  series: Series[],
  title: string,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const w = canvas.width;
  const h = canvas.height;
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#ccc";
  ctx.strokeRect(0.5, 0.5, w - 1, h - 1);

  const windowS = series[0]?.buffer.windowS ?? 30;
  const tEnd = Math.max(...series.map((s) => s.buffer.latestT() ?? 0));
  const tStart = tEnd - windowS;

  let peak = 1e-9;
  for (const s of series) {
    for (const v of s.buffer.series().vs) peak = Math.max(peak, Math.abs(v));
  }
  peak *= 1.1;

  const xOf = (t: number) => ((t - tStart) / windowS) * (w - 2) + 1;
  const yOf = (v: number) => h / 2 - (v / peak) * (h / 2 - 6);

  ctx.strokeStyle = "#e4e4e4";
  ctx.beginPath();
  ctx.moveTo(1, h / 2);
  ctx.lineTo(w - 1, h / 2);
  ctx.stroke();

  for (const s of series) {
    const { ts, vs } = s.buffer.series();
    if (ts.length < 2) continue;
    ctx.strokeStyle = s.color;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    for (let i = 0; i < ts.length; i++) {
      const x = xOf(ts[i]);
      const y = yOf(vs[i]);
      if (i === 0) ctx.moveTo(x, y);
      else ctx.lineTo(x, y);
    }
    ctx.stroke();
  }

  ctx.font = "11px sans-serif";
  ctx.fillStyle = "#333";
  ctx.fillText(`${title}  (±${peak.toFixed(2)})`, 6, 13);
  let lx = w - 6;
  for (const s of [...series].reverse()) {
    const tw = ctx.measureText(s.label).width;
    lx -= tw + 14;
    ctx.fillStyle = s.color;
    ctx.fillRect(lx, 6, 9, 9);
    ctx.fillStyle = "#333";
    ctx.fillText(s.label, lx + 12, 14);
  }
}
