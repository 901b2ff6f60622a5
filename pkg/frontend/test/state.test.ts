import { describe, expect, it } from "vitest";

import { parseInbound, Snapshot } from "../src/protocol.js";
import { SessionView } from "../src/state.js";

function snap(tick: number, extra: Record<string, unknown> = {}): Snapshot {
  const raw = {
    type: "snapshot",
    format_version: 1,
    tick,
    t: tick / 10,
    mode: "teleop",
    running: true,
    robot: { x: 0, y: 0, heading: 0, floor: 0, gait: "walk" },
    observations: [],
    beliefs: [],
    occupancy_window: { x0: 0, y0: 0, cell_size: 0.5, rows: ["."] },
    covered: ["0"],
    behavior: "teleop",
    inspected_count: 0,
    reward_cost: 0,
    budget_s: 300,
    ...extra,
  };
  const parsed = parseInbound(JSON.stringify(raw));
  if (parsed === null || parsed.type !== "snapshot") throw new Error("bad fixture");
  return parsed;
}

describe("SessionView", () => {
  it("keeps only the latest snapshot (one-slot buffer)", () => {
    const view = new SessionView();
    for (let i = 0; i < 5000; i++) view.acceptSnapshot(snap(i));
    expect(view.snapshot!.tick).toBe(4999);
  });

  it("retains static info from the first snapshot", () => {
    const view = new SessionView();
    view.acceptSnapshot(
      snap(0, {
        static: {
          scenario_name: "open-seek",
          grid: { cell_size: 0.5, cols: 2, rows: 1, floors: { "0": [".."] } },
          labels: [{ name: "fire_extinguisher", standoff: 1.0 }],
          limits: { v_max: 1, v_lat_max: 0.5, omega_max: 1.5 },
          tick_hz: 10,
        },
      }),
    );
    view.acceptSnapshot(snap(1));
    expect(view.info!.scenario_name).toBe("open-seek");
    expect(view.snapshot!.tick).toBe(1);
  });

  it("flags malformed frames but keeps the last good one", () => {
    const view = new SessionView();
    view.acceptSnapshot(snap(3));
    view.malformed();
    expect(view.banner).toMatch(/malformed/);
    expect(view.snapshot!.tick).toBe(3);
    view.acceptSnapshot(snap(4));
    expect(view.banner).toBeNull();
  });

  it("bounds the event log", () => {
    const view = new SessionView();
    for (let i = 0; i < 500; i++) view.acceptEvent({ event: `e${i}` });
    expect(view.recentEvents.length).toBeLessThanOrEqual(50);
    expect(view.recentEvents.at(-1)).toBe("e499");
  });

  it("records the end summary", () => {
    const view = new SessionView();
    view.acceptEnd({ inspected_count: 2, terminal: "budget" });
    expect(view.endSummary!.inspected_count).toBe(2);
  });
});
