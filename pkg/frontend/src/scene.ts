// Top-down scene: wall line at h = 0, robot marker, velocity arrow,
// rendered force arrow with a ghost arrow for the raw reference cue,
// tank-energy bar and barrier readout.

import { CockpitState, wallDirection } from "./state.js";

const PX_PER_M = 55;
const FORCE_SCALE = 1.2; // m of arrow per unit force, for visibility
const VEL_SCALE = 1.0;

interface Frame {
  w: number;
  h: number;
  cx: number;
  cy: number;
}

function toScreen(frame: Frame, x: number, y: number): [number, number] {
  // world +y up on screen
  return [frame.cx + x * PX_PER_M, frame.cy - y * PX_PER_M];
}

function arrow(
  ctx: CanvasRenderingContext2D,
  frame: Frame,
  from: [number, number],
  vec: [number, number],
  color: string,
  width: number,
): void {
  const len = Math.hypot(vec[0], vec[1]);
  if (len * PX_PER_M < 2) return;
  const [x0, y0] = toScreen(frame, from[0], from[1]);
  const [x1, y1] = toScreen(frame, from[0] + vec[0], from[1] + vec[1]);
  ctx.strokeStyle = color;
  ctx.fillStyle = color;
  ctx.lineWidth = width;
  ctx.beginPath();
  ctx.moveTo(x0, y0);
  ctx.lineTo(x1, y1);
  ctx.stroke();
  const ang = Math.atan2(y1 - y0, x1 - x0);
  const head = 7 + width;
  ctx.beginPath();
  ctx.moveTo(x1, y1);
  ctx.lineTo(x1 - head * Math.cos(ang - 0.45), y1 - head * Math.sin(ang - 0.45));
  ctx.lineTo(x1 - head * Math.cos(ang + 0.45), y1 - head * Math.sin(ang + 0.45));
  ctx.closePath();
  ctx.fill();
}

export function drawScene(canvas: HTMLCanvasElement, state: CockpitState): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const frame: Frame = { w: canvas.width, h: canvas.height, cx: canvas.width / 2, cy: canvas.height - 60 };
  ctx.clearRect(0, 0, frame.w, frame.h);

  const session = state.session;
  const sample = state.latest;

  // wall: the line a.x + b = 0; beyond it (h < 0) is unsafe
  if (session) {
    const a = session.wall.a;
    const n = Math.hypot(a[0], a[1]) || 1;
    const px = (-session.wall.b * a[0]) / (n * n);
    const py = (-session.wall.b * a[1]) / (n * n);
    const tx = -a[1] / n;
    const ty = a[0] / n;
    const [wx0, wy0] = toScreen(frame, px - tx * 50, py - ty * 50);
    const [wx1, wy1] = toScreen(frame, px + tx * 50, py + ty * 50);
    const dir = wallDirection(state);
    const [gx, gy] = toScreen(frame, px + dir[0] * 0.6, py + dir[1] * 0.6);
    ctx.save();
    ctx.strokeStyle = "#d9534f";
    ctx.lineWidth = 4;
    ctx.beginPath();
    ctx.moveTo(wx0, wy0);
    ctx.lineTo(wx1, wy1);
    ctx.stroke();
    ctx.setLineDash([4, 6]);
    ctx.strokeStyle = "#d9534f55";
    ctx.lineWidth = 18;
    ctx.beginPath();
    ctx.moveTo(wx0 + (gx - toScreen(frame, px, py)[0]), wy0 + (gy - toScreen(frame, px, py)[1]));
    ctx.lineTo(wx1 + (gx - toScreen(frame, px, py)[0]), wy1 + (gy - toScreen(frame, px, py)[1]));
    ctx.stroke();
    ctx.restore();
  }

  if (!sample) return;

  const pos: [number, number] = [sample.x1[0], sample.x1[1]];

  // ghost arrow: raw reference cue; solid arrow: rendered force
  arrow(ctx, frame, pos, [sample.f_ref[0] * FORCE_SCALE, sample.f_ref[1] * FORCE_SCALE], "#b8b8b8", 2);
  arrow(ctx, frame, pos, [sample.x2[0] * VEL_SCALE, sample.x2[1] * VEL_SCALE], "#4a90d9", 3);
  arrow(ctx, frame, pos, [sample.f[0] * FORCE_SCALE, sample.f[1] * FORCE_SCALE], "#e8a33d", 4);

  // robot marker; saturation shows as a ring
  const [rx, ry] = toScreen(frame, pos[0], pos[1]);
  ctx.fillStyle = "#2f2f2f";
  ctx.beginPath();
  ctx.arc(rx, ry, 8, 0, 2 * Math.PI);
  ctx.fill();
  if (sample.saturated) {
    ctx.strokeStyle = "#e8a33d";
    ctx.lineWidth = 3;
    ctx.beginPath();
    ctx.arc(rx, ry, 13, 0, 2 * Math.PI);
    ctx.stroke();
  }

  // tank bar + barrier readout
  if (session) {
    const barW = 160;
    const frac = session.e_max > 0 ? Math.min(1, sample.e / session.e_max) : 0;
    ctx.fillStyle = "#ddd";
    ctx.fillRect(16, 16, barW, 14);
    ctx.fillStyle = frac >= 1 ? "#5cb85c" : "#7fb3e8";
    ctx.fillRect(16, 16, barW * frac, 14);
    ctx.strokeStyle = "#888";
    ctx.strokeRect(16, 16, barW, 14);
    ctx.fillStyle = "#333";
    ctx.font = "12px sans-serif";
    ctx.fillText(
      `tank ${sample.e.toFixed(4)} / ${session.e_max.toFixed(2)}`, 16 + barW + 8, 27,
    );
    ctx.fillText(`h = ${sample.h.toFixed(3)} m`, 16, 48);
    ctx.fillText(`t = ${sample.t.toFixed(2)} s`, 16, 64);
  }
}
