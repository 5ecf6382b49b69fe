// Cockpit entry point: wires the pad, sockets, scene and charts together.

import { drawStripChart } from "./charts.js";
import { openCockpitSocket } from "./net.js";
import { parseServerMessage } from "./protocol.js";
import { drawScene } from "./scene.js";
import {
  applyServerMessage,
  clearSessionData,
  newCockpitState,
  releaseStylus,
  SessionInfo,
  setStylus,
} from "./state.js";
import { dragToStylusCm, PAD_RANGE_CM, PX_PER_CM, stylusToVelocity } from "./stylus.js";

const state = newCockpitState();

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

const sceneCanvas = byId<HTMLCanvasElement>("scene");
const forceChart = byId<HTMLCanvasElement>("force-chart");
const stateChart = byId<HTMLCanvasElement>("state-chart");
const pad = byId<HTMLCanvasElement>("pad");
const statusEl = byId<HTMLSpanElement>("status");
const modeSelect = byId<HTMLSelectElement>("mode");
const cmdReadout = byId<HTMLSpanElement>("cmd-readout");

const base = new URL(window.location.href);
const wsUrl =
  base.searchParams.get("ws") ??
  `${base.protocol === "https:" ? "wss" : "ws"}://${base.host}/ws`;
const httpBase = base.searchParams.get("api") ?? "";

async function loadSession(): Promise<void> {
  try {
    const res = await fetch(`${httpBase}/session`);
    state.session = (await res.json()) as SessionInfo;
    modeSelect.value = state.session.mode;
  } catch {
    state.session = null;
  }
}

const socket = openCockpitSocket(
  wsUrl,
  (raw) => applyServerMessage(state, parseServerMessage(raw)),
  (status) => {
    state.connection = status;
    if (status === "open") void loadSession();
  },
);

// --- stylus pad -----------------------------------------------------------

let padPointer: number | null = null;

function padCenter(): [number, number] {
  return [pad.width / 2, pad.height / 2];
}

function handlePadMove(ev: PointerEvent): void {
  const rect = pad.getBoundingClientRect();
  const [cx, cy] = padCenter();
  const dx = (ev.clientX - rect.left) * (pad.width / rect.width) - cx;
  const dy = (ev.clientY - rect.top) * (pad.height / rect.height) - cy;
  setStylus(state, dragToStylusCm(dx, dy));
}

pad.addEventListener("pointerdown", (ev) => {
  if (state.connection !== "open") return; // input disabled while disconnected
  padPointer = ev.pointerId;
  pad.setPointerCapture(ev.pointerId);
  handlePadMove(ev);
});
pad.addEventListener("pointermove", (ev) => {
  if (padPointer === ev.pointerId) handlePadMove(ev);
});
for (const evName of ["pointerup", "pointercancel"] as const) {
  pad.addEventListener(evName, (ev) => {
    if (padPointer === ev.pointerId) {
      padPointer = null;
      releaseStylus(state);
    }
  });
}

function drawPad(): void {
  const ctx = pad.getContext("2d");
  if (!ctx) return;
  const [cx, cy] = padCenter();
  ctx.clearRect(0, 0, pad.width, pad.height);
  const disabled = state.connection !== "open";
  ctx.fillStyle = disabled ? "#e9e9e9" : "#f7f7f7";
  ctx.fillRect(0, 0, pad.width, pad.height);
  ctx.strokeStyle = "#bbb";
  ctx.strokeRect(0.5, 0.5, pad.width - 1, pad.height - 1);
  // working range and the 1 cm dead-zone ring
  ctx.strokeStyle = "#ccc";
  ctx.beginPath();
  ctx.arc(cx, cy, PAD_RANGE_CM * PX_PER_CM, 0, 2 * Math.PI);
  ctx.stroke();
  const deadZone = state.session?.stylus.dead_zone_cm ?? 1.0;
  ctx.strokeStyle = disabled ? "#c9c9c9" : "#8aa8c8";
  ctx.setLineDash([5, 4]);
  ctx.beginPath();
  ctx.arc(cx, cy, deadZone * PX_PER_CM, 0, 2 * Math.PI);
  ctx.stroke();
  ctx.setLineDash([]);
  // stylus knob (screen y is inverted relative to world y)
  const kx = cx + state.stylusCm[0] * PX_PER_CM;
  const ky = cy - state.stylusCm[1] * PX_PER_CM;
  ctx.fillStyle = disabled ? "#aaa" : state.dragging ? "#4a90d9" : "#777";
  ctx.beginPath();
  ctx.arc(kx, ky, 10, 0, 2 * Math.PI);
  ctx.fill();
}

// --- command pump at the telemetry rate ------------------------------------

let lastSentFrames = -1;

function pumpCommands(): void {
  // one command per received telemetry frame keeps the stream at loop rate
  if (state.connection === "open" && state.frames !== lastSentFrames) {
    lastSentFrames = state.frames;
    socket.sendStylus(state.stylusCm);
  }
}
window.setInterval(pumpCommands, 10);

// --- controls ---------------------------------------------------------------

modeSelect.addEventListener("change", async () => {
  await fetch(`${httpBase}/session/restart`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify({ mode: modeSelect.value }),
  });
  clearSessionData(state);
  await loadSession();
});

byId<HTMLButtonElement>("download").addEventListener("click", () => {
  window.open(`${httpBase}/trace`, "_blank");
});

// --- render loop -------------------------------------------------------------

function render(): void {
  statusEl.textContent =
    state.connection + (state.readOnly ? " (read-only)" : "") +
    (state.badFrames > 0 ? ` · ${state.badFrames} bad frames` : "");
  statusEl.className = `badge ${state.connection}`;
  if (state.session) {
    const v = stylusToVelocity(
      state.stylusCm,
      state.session.stylus.dead_zone_cm,
      state.session.stylus.gain_mps_per_cm,
    );
    cmdReadout.textContent = `stylus [${state.stylusCm[0].toFixed(1)}, ${state.stylusCm[1].toFixed(1)}] cm → x2d [${v[0].toFixed(2)}, ${v[1].toFixed(2)}] m/s`;
  }
  drawPad();
  drawScene(sceneCanvas, state);
  drawStripChart(
    forceChart,
    [
      { buffer: state.buffers.fRef, color: "#b8b8b8", label: "F_ref" },
      { buffer: state.buffers.f, color: "#e8a33d", label: "F" },
    ],
    "force toward wall",
  );
  drawStripChart(
    stateChart,
    [
      { buffer: state.buffers.x2, color: "#4a90d9", label: "x2" },
      { buffer: state.buffers.h, color: "#5cb85c", label: "h" },
    ],
    "velocity toward wall / barrier",
  );
  window.requestAnimationFrame(render);
}

window.requestAnimationFrame(render);
