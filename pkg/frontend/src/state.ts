// One view-state atom; network and pointer events mutate it through the
// functions below, rendering reads it at display refresh. The server owns
// the simulation — this state is disposable and rebuilds from live frames.

import { RollingBuffer } from "./buffers.js";
import { ServerMsg, TelemetryMsg } from "./protocol.js";

export type Connection = "connecting" | "open" | "closed";

export interface SessionInfo {
  name: string;
  mode: string;
  dt: number;
  dim: number;
  e_max: number;
  k: number;
  wall: { a: number[]; b: number };
  stylus: { dead_zone_cm: number; gain_mps_per_cm: number };
}

export interface CockpitState {
  connection: Connection;
  session: SessionInfo | null;
  latest: TelemetryMsg | null;
  frames: number;
  badFrames: number;
  readOnly: boolean;
  stylusCm: [number, number];
  dragging: boolean;
  buffers: {
    f: RollingBuffer;
    fRef: RollingBuffer;
    x2: RollingBuffer;
    h: RollingBuffer;
  };
}

export const CHART_WINDOW_S = 30;

export function newCockpitState(windowS = CHART_WINDOW_S): CockpitState {
  return {
    connection: "connecting",
    session: null,
    latest: null,
    frames: 0,
    badFrames: 0,
    readOnly: false,
    stylusCm: [0, 0],
    dragging: false,
    buffers: {
      f: new RollingBuffer(windowS),
      fRef: new RollingBuffer(windowS),
      x2: new RollingBuffer(windowS),
      h: new RollingBuffer(windowS),
    },
  };
}

/** Unit vector toward the wall (opposite the safe-set inward normal). */
export function wallDirection(state: CockpitState): [number, number] {
  const a = state.session?.wall.a ?? [0, -1];
  const n = Math.hypot(a[0], a[1]) || 1;
  return [-a[0] / n, -a[1] / n];
}

function along(v: readonly number[], dir: readonly number[]): number {
  return v[0] * dir[0] + v[1] * dir[1];
}

/** Fold one validated server frame into the state. */
export function applyServerMessage(state: CockpitState, msg: ServerMsg | null): void {
  if (msg === null) {
    state.badFrames += 1;
    return;
  }
  if (msg.type === "error") {
    state.readOnly = msg.error === "read_only";
    return;
  }
  if (msg.type !== "telemetry") return;
  state.latest = msg;
  state.frames += 1;
  const dir = wallDirection(state);
  state.buffers.f.push(msg.t, along(msg.f, dir));
  state.buffers.fRef.push(msg.t, along(msg.f_ref, dir));
  state.buffers.x2.push(msg.t, along(msg.x2, dir));
  state.buffers.h.push(msg.t, msg.h);
}

export function setStylus(state: CockpitState, cm: [number, number]): void {
  state.dragging = true;
  state.stylusCm = cm;
}

/** Pointer released: the stylus snaps back to the dead zone center. */
export function releaseStylus(state: CockpitState): void {
  state.dragging = false;
  state.stylusCm = [0, 0];
}

export function clearSessionData(state: CockpitState): void {
  state.latest = null;
  state.frames = 0;
  state.badFrames = 0;
  state.readOnly = false;
  for (const b of Object.values(state.buffers)) b.clear();
}
