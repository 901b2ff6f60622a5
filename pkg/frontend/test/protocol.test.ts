import { describe, expect, it } from "vitest";

import {
  ClientMessage,
  FORMAT_VERSION,
  parseInbound,
  Snapshot,
  validateOutbound,
} from "../src/protocol.js";

const snapshotFixture = {
  type: "snapshot",
  format_version: FORMAT_VERSION,
  tick: 12,
  t: 1.2,
  mode: "teleop",
  running: true,
  robot: { x: 1.0, y: 2.0, heading: 0.3, floor: 0, gait: "walk" },
  observations: [
    { object_id: 1, x: 3.0, y: 2.0, yaw: 0.1, label_id: 0, score: 0.7 },
  ],
  beliefs: [
    {
      object_id: 1,
      pos_mean: [3.0, 2.0],
      pos_cov: [
        [0.5, 0.0],
        [0.0, 0.5],
      ],
      yaw_mean: 0.1,
      yaw_var: 0.05,
      label_probs: [0.9, 0.1],
      status: "to_be_inspected",
      floor: 0,
    },
  ],
  occupancy_window: { x0: 0, y0: 0, cell_size: 0.5, rows: ["###", "#.#", "###"] },
  covered: ["000", "010", "000"],
  behavior: "teleop",
  inspected_count: 0,
  reward_cost: -1.5,
  budget_s: 300,
};

describe("outbound validation", () => {
  it("accepts every command type", () => {
    const messages = [
      { type: "cmd_vel", format_version: 1, tick: 0, vx: 1, vy: 0, omega: 0 },
      { type: "trigger_inspect", format_version: 1, tick: 3, object_id: 2 },
      { type: "set_gait", format_version: 1, tick: 4, mode: "stair" },
      { type: "start", format_version: 1, tick: 0, run_to_tick: 100 },
      { type: "pause", format_version: 1, tick: 9 },
    ];
    for (const msg of messages) {
      expect(() => validateOutbound(msg)).not.toThrow();
    }
  });

  it("rejects a missing format version", () => {
    expect(() =>
      validateOutbound({ type: "pause", tick: 1 }),
    ).toThrow();
  });

  it("rejects unknown types and bad fields", () => {
    expect(() =>
      validateOutbound({ type: "warp", format_version: 1, tick: 0 }),
    ).toThrow();
    expect(() =>
      validateOutbound({
        type: "cmd_vel",
        format_version: 1,
        tick: 0,
        vx: Number.NaN,
        vy: 0,
        omega: 0,
      }),
    ).toThrow();
    expect(() =>
      validateOutbound({
        type: "set_gait",
        format_version: 1,
        tick: 0,
        mode: "crawl",
      }),
    ).toThrow();
  });

  it("round-trips through JSON unchanged", () => {
    const msg: ClientMessage = validateOutbound({
      type: "cmd_vel",
      format_version: 1,
      tick: 7,
      vx: 0.25,
      vy: -0.5,
      omega: 1.5,
    });
    expect(JSON.parse(JSON.stringify(msg))).toEqual(msg);
  });
});

describe("inbound parsing", () => {
  it("parses a full snapshot", () => {
    const msg = parseInbound(JSON.stringify(snapshotFixture));
    expect(msg).not.toBeNull();
    expect(msg!.type).toBe("snapshot");
    const snap = msg as Snapshot;
    expect(snap.beliefs[0].label_probs[0]).toBeCloseTo(0.9);
  });

  it("parses events and session end", () => {
    const ev = parseInbound(
      JSON.stringify({
        type: "event",
        format_version: 1,
        tick: 3,
        payload: { event: "inspect_success", object: 1 },
      }),
    );
    expect(ev!.type).toBe("event");
    const end = parseInbound(
      JSON.stringify({
        type: "session_end",
        format_version: 1,
        tick: 600,
        summary: { inspected_count: 2 },
      }),
    );
    expect(end!.type).toBe("session_end");
  });

  it("returns null on malformed frames instead of throwing", () => {
    expect(parseInbound("not json")).toBeNull();
    expect(parseInbound(JSON.stringify({ type: "snapshot" }))).toBeNull();
    const wrongVersion = { ...snapshotFixture, format_version: 99 };
    expect(parseInbound(JSON.stringify(wrongVersion))).toBeNull();
  });
});
