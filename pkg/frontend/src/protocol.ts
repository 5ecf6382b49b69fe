// Wire schema shared with the teleop service (JSON text frames, version 1).

export const PROTOCOL_VERSION = 1;

export interface TelemetryMsg {
  type: "telemetry";
  t: number;
  x1: number[];
  x2: number[];
  x2d: number[];
  f: number[];
  f_ref: number[];
  e: number;
  h: number;
  radius_sq: number;
  saturated: boolean;
  seq_ack: number;
}

export interface PingMsg {
  type: "ping";
  t: number;
}

export interface ErrorMsg {
  type: "error";
  error: string;
}

export type ServerMsg = TelemetryMsg | PingMsg | ErrorMsg;

function finiteVector(v: unknown): v is number[] {
  return Array.isArray(v) && v.length > 0 && v.every((x) => typeof x === "number" && Number.isFinite(x));
}

function finiteNumber(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}

/** Validate a raw server frame; null means "skip it" (and count a bad frame). */
export function parseServerMessage(raw: string): ServerMsg | null {
  let obj: any;
  try {
    obj = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof obj !== "object" || obj === null || obj.v !== PROTOCOL_VERSION) return null;
  if (obj.type === "ping" && finiteNumber(obj.t)) return { type: "ping", t: obj.t };
  if (obj.type === "error" && typeof obj.error === "string") return { type: "error", error: obj.error };
  if (obj.type !== "telemetry") return null;
  const vectors = ["x1", "x2", "x2d", "f", "f_ref"] as const;
  if (!vectors.every((k) => finiteVector(obj[k]))) return null;
  const scalars = ["t", "e", "h", "radius_sq", "seq_ack"] as const;
  if (!scalars.every((k) => finiteNumber(obj[k]))) return null;
  if (typeof obj.saturated !== "boolean") return null;
  return {
    type: "telemetry",
    t: obj.t,
    x1: obj.x1,
    x2: obj.x2,
    x2d: obj.x2d,
    f: obj.f,
    f_ref: obj.f_ref,
    e: obj.e,
    h: obj.h,
    radius_sq: obj.radius_sq,
    saturated: obj.saturated,
    seq_ack: obj.seq_ack,
  };
}

/** Builds command frames with a strictly increasing sequence number. */
export class CommandStream {
  private seq = 0;

  next(stylusCm: [number, number]): string {
    if (!stylusCm.every(Number.isFinite)) throw new Error("stylus vector must be finite");
    this.seq += 1;
    return JSON.stringify({
      v: PROTOCOL_VERSION,
      type: "command",
      seq: this.seq,
      stylus_cm: [stylusCm[0], stylusCm[1]],
    });
  }

  get lastSeq(): number {
    return this.seq;
  }
}
