import { describe, expect, it } from "vitest";

import { CommandStream, parseServerMessage, PROTOCOL_VERSION } from "./protocol.js";

const TELEMETRY = {
  v: 1,
  type: "telemetry",
  t: 0.05,
  x1: [0, 0.1],
  x2: [0, 0.5],
  x2d: [0, 0.5],
  f: [0, -0.2],
  f_ref: [0, -1.5],
  e: 0.01,
  h: 3.9,
  radius_sq: 0.8,
  saturated: true,
  seq_ack: 7,
};

describe("parseServerMessage", () => {
  it("accepts a full telemetry frame", () => {
    const msg = parseServerMessage(JSON.stringify(TELEMETRY));
    expect(msg).not.toBeNull();
    if (msg?.type === "telemetry") {
      expect(msg.h).toBeCloseTo(3.9);
      expect(msg.saturated).toBe(true);
      expect(msg.f_ref).toEqual([0, -1.5]);
    } else {
      throw new Error("expected telemetry");
    }
  });

  it("accepts pings and errors", () => {
    expect(parseServerMessage(JSON.stringify({ v: 1, type: "ping", t: 1.0 }))).toEqual({
      type: "ping",
      t: 1.0,
    });
    expect(
      parseServerMessage(JSON.stringify({ v: 1, type: "error", error: "read_only" })),
    ).toEqual({ type: "error", error: "read_only" });
  });

  it.each([
    ["not json", "{{{"],
    ["wrong version", JSON.stringify({ ...TELEMETRY, v: 2 })],
    ["unknown type", JSON.stringify({ ...TELEMETRY, type: "mystery" })],
    ["missing vector", JSON.stringify({ ...TELEMETRY, f: undefined })],
    ["non-finite value", JSON.stringify({ ...TELEMETRY, h: null })],
    ["non-numeric vector", JSON.stringify({ ...TELEMETRY, x2: [0, "fast"] })],
    ["bad saturated flag", JSON.stringify({ ...TELEMETRY, saturated: 1 })],
  ])("rejects %s", (_label, raw) => {
    expect(parseServerMessage(raw)).toBeNull();
  });
});

describe("CommandStream", () => {
  it("produces versioned frames with strictly increasing seq", () => {
    const stream = new CommandStream();
    const a = JSON.parse(stream.next([0, 1]));
    const b = JSON.parse(stream.next([2, 3]));
    expect(a.v).toBe(PROTOCOL_VERSION);
    expect(a.type).toBe("command");
    expect(b.seq).toBeGreaterThan(a.seq);
    expect(b.stylus_cm).toEqual([2, 3]);
    expect(stream.lastSeq).toBe(2);
  });

  it("refuses non-finite stylus vectors", () => {
    const stream = new CommandStream();
    expect(() => stream.next([NaN, 0])).toThrow();
  });
});
