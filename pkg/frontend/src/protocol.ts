/**
 * Wire protocol shared with the sim server: zod schemas for every message.
 *
 * Outbound messages MUST pass their schema before send; inbound messages are
 * parsed defensively so a malformed frame never corrupts the view.
 */

import { z } from "zod";

export const FORMAT_VERSION = 1;

// ---- client -> server -------------------------------------------------

const base = {
  format_version: z.literal(FORMAT_VERSION),
  tick: z.number().int().nonnegative(),
};

export const CmdVel = z.object({
  type: z.literal("cmd_vel"),
  ...base,
  vx: z.number().finite(),
  vy: z.number().finite(),
  omega: z.number().finite(),
});

export const TriggerInspect = z.object({
  type: z.literal("trigger_inspect"),
  ...base,
  object_id: z.number().int().nonnegative(),
});

export const SetGait = z.object({
  type: z.literal("set_gait"),
  ...base,
  mode: z.enum(["walk", "stair"]),
});

export const Start = z.object({
  type: z.literal("start"),
  ...base,
  run_to_tick: z.number().int().positive().optional(),
});

export const Pause = z.object({
  type: z.literal("pause"),
  ...base,
});

export const ClientMessage = z.discriminatedUnion("type", [
  CmdVel,
  TriggerInspect,
  SetGait,
  Start,
  Pause,
]);
export type ClientMessage = z.infer<typeof ClientMessage>;

// ---- server -> client -------------------------------------------------

export const RobotView = z.object({
  x: z.number(),
  y: z.number(),
  heading: z.number(),
  floor: z.number().int(),
  gait: z.enum(["walk", "stair"]),
});

export const BeliefView = z.object({
  object_id: z.number().int(),
  pos_mean: z.tuple([z.number(), z.number()]).or(z.array(z.number()).length(2)),
  pos_cov: z.array(z.array(z.number()).length(2)).length(2),
  yaw_mean: z.number(),
  yaw_var: z.number(),
  label_probs: z.array(z.number()),
  status: z.string(),
  floor: z.number().int(),
});
export type BeliefView = z.infer<typeof BeliefView>;

export const ObservationView = z.object({
  object_id: z.number().int(),
  x: z.number(),
  y: z.number(),
  yaw: z.number(),
  label_id: z.number().int(),
  score: z.number().min(0).max(1),
});

export const StaticInfo = z.object({
  scenario_name: z.string(),
  grid: z.object({
    cell_size: z.number().positive(),
    cols: z.number().int().positive(),
    rows: z.number().int().positive(),
    floors: z.record(z.array(z.string())),
  }),
  labels: z.array(
    z.object({ name: z.string(), standoff: z.number() }).passthrough(),
  ),
  limits: z.object({
    v_max: z.number().positive(),
    v_lat_max: z.number().nonnegative(),
    omega_max: z.number().positive(),
  }),
  tick_hz: z.number().positive(),
});
export type StaticInfo = z.infer<typeof StaticInfo>;

export const Snapshot = z.object({
  type: z.literal("snapshot"),
  format_version: z.literal(FORMAT_VERSION),
  tick: z.number().int().nonnegative(),
  t: z.number().nonnegative(),
  mode: z.enum(["teleop", "autonomous"]),
  running: z.boolean(),
  robot: RobotView,
  observations: z.array(ObservationView),
  beliefs: z.array(BeliefView),
  occupancy_window: z.object({
    x0: z.number().int(),
    y0: z.number().int(),
    cell_size: z.number().positive(),
    rows: z.array(z.string()),
  }),
  covered: z.array(z.string()),
  behavior: z.string(),
  inspected_count: z.number().int().nonnegative(),
  reward_cost: z.number(),
  budget_s: z.number().positive(),
  static: StaticInfo.optional(),
});
export type Snapshot = z.infer<typeof Snapshot>;

export const EventMessage = z.object({
  type: z.literal("event"),
  format_version: z.literal(FORMAT_VERSION),
  tick: z.number().int().nonnegative(),
  payload: z.record(z.unknown()),
});

export const SessionEnd = z.object({
  type: z.literal("session_end"),
  format_version: z.literal(FORMAT_VERSION),
  tick: z.number().int().nonnegative(),
  summary: z.record(z.unknown()),
});

export const ServerMessage = z.discriminatedUnion("type", [
  Snapshot,
  EventMessage,
  SessionEnd,
]);
export type ServerMessage = z.infer<typeof ServerMessage>;

/** Validate an outbound message; throws on violation (never send raw). */
export function validateOutbound(msg: unknown): ClientMessage {
  return ClientMessage.parse(msg);
}

/** Parse an inbound frame; returns null rather than throwing. */
export function parseInbound(raw: string): ServerMessage | null {
  try {
    return ServerMessage.parse(JSON.parse(raw));
  } catch {
    return null;
  }
}
