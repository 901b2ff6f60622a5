import { describe, expect, it } from "vitest";

import {
  COMMAND_PERIOD_MS,
  CommandSource,
  inspectCandidate,
  velocityFromKeys,
} from "../src/input.js";
import { ClientMessage, validateOutbound } from "../src/protocol.js";

const limits = { v_max: 1.0, v_lat_max: 0.5, omega_max: 1.5 };

function beliefAt(id: number, x: number, y: number, prob = 0.9, status = "to_be_inspected") {
  return {
    object_id: id,
    pos_mean: [x, y] as [number, number],
    pos_cov: [
      [0.1, 0],
      [0, 0.1],
    ],
    yaw_mean: 0,
    yaw_var: 0.1,
    label_probs: [prob, 1 - prob],
    status,
    floor: 0,
  };
}

const robot = { x: 0, y: 0, heading: 0, floor: 0, gait: "walk" as const };

describe("velocityFromKeys", () => {
  it("is zero with no keys held", () => {
    expect(velocityFromKeys(new Set(), limits)).toEqual({ vx: 0, vy: 0, omega: 0 });
  });

  it("maps forward key to the configured limit", () => {
    expect(velocityFromKeys(new Set(["KeyW"]), limits).vx).toBe(1.0);
    expect(velocityFromKeys(new Set(["ArrowUp"]), limits).vx).toBe(1.0);
  });

  it("opposing keys cancel", () => {
    const v = velocityFromKeys(new Set(["KeyW", "KeyS"]), limits);
    expect(v.vx).toBe(0);
  });

  it("never exceeds the limits", () => {
    const v = velocityFromKeys(
      new Set(["KeyW", "KeyA", "KeyQ", "ArrowUp"]),
      limits,
    );
    expect(Math.abs(v.vx)).toBeLessThanOrEqual(limits.v_max);
    expect(Math.abs(v.vy)).toBeLessThanOrEqual(limits.v_lat_max);
    expect(Math.abs(v.omega)).toBeLessThanOrEqual(limits.omega_max);
  });
});

describe("inspectCandidate", () => {
  it("picks the nearest pending confident belief", () => {
    const snap = {
      robot,
      beliefs: [beliefAt(1, 5, 0), beliefAt(2, 2, 0), beliefAt(3, 3, 0)],
    };
    expect(inspectCandidate(snap)!.object_id).toBe(2);
  });

  it("skips resolved, far-floor, and unconfident beliefs", () => {
    const snap = {
      robot,
      beliefs: [
        beliefAt(1, 1, 0, 0.9, "inspected"),
        { ...beliefAt(2, 2, 0), floor: 1 },
        { ...beliefAt(3, 3, 0), label_probs: [0.34, 0.33, 0.33] },
      ],
    };
    expect(inspectCandidate(snap)).toBeNull();
  });
});

describe("CommandSource", () => {
  it("emits schema-valid velocity commands and rate limits repeats", () => {
    const src = new CommandSource(limits);
    const keys = new Set(["KeyW"]);
    const first = src.velocityCommand(keys, 10, 0);
    expect(first).not.toBeNull();
    expect(() => validateOutbound(first!)).not.toThrow();
    // unchanged command inside the rate window is suppressed
    expect(src.velocityCommand(keys, 11, COMMAND_PERIOD_MS / 2)).toBeNull();
    // after the window it repeats (zero-order hold refresh)
    expect(src.velocityCommand(keys, 12, COMMAND_PERIOD_MS + 1)).not.toBeNull();
  });

  it("sends immediately when the command changes", () => {
    const src = new CommandSource(limits);
    expect(src.velocityCommand(new Set(["KeyW"]), 0, 0)).not.toBeNull();
    const changed = src.velocityCommand(new Set(["KeyW", "KeyA"]), 1, 5);
    expect(changed).not.toBeNull();
    expect((changed as { vy: number }).vy).toBe(0.5);
  });

  it("suppresses idle zero commands", () => {
    const src = new CommandSource(limits);
    expect(src.velocityCommand(new Set(), 0, 0)).toBeNull();
    // a stop after motion is a change and must go out
    expect(src.velocityCommand(new Set(["KeyW"]), 1, 10)).not.toBeNull();
    const stop = src.velocityCommand(new Set(), 2, 20);
    expect(stop).not.toBeNull();
    expect((stop as { vx: number }).vx).toBe(0);
  });

  it("inspect command guards on missing candidates", () => {
    const src = new CommandSource(limits);
    const none = src.inspectCommand({ robot, beliefs: [] }, 5);
    expect(none.message).toBeNull();
    expect(none.hint).toMatch(/no confident/);
    const some = src.inspectCommand(
      { robot, beliefs: [beliefAt(4, 1, 1)] },
      5,
    );
    expect(some.message).not.toBeNull();
    expect((some.message as { object_id: number }).object_id).toBe(4);
  });

  it("gait command toggles", () => {
    const src = new CommandSource(limits);
    expect((src.gaitCommand("walk", 0) as { mode: string }).mode).toBe("stair");
    expect((src.gaitCommand("stair", 0) as { mode: string }).mode).toBe("walk");
  });

  it("every emitted message validates against the protocol schema", () => {
    const src = new CommandSource(limits);
    const emitted: (ClientMessage | null)[] = [
      src.velocityCommand(new Set(["KeyW", "KeyQ"]), 3, 0),
      src.inspectCommand({ robot, beliefs: [beliefAt(1, 1, 0)] }, 3).message,
      src.gaitCommand("walk", 3),
      src.startCommand(0),
      src.pauseCommand(4),
    ];
    for (const msg of emitted) {
      expect(msg).not.toBeNull();
      expect(() => validateOutbound(msg!)).not.toThrow();
    }
  });
});
