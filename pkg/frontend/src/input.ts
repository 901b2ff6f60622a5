/**
 * Keyboard state -> protocol commands.
 *
 * WASD/arrows steer, Q/E turn, F inspects the nearest confident belief,
 * G toggles gait. Commands are rate limited to the server tick rate and
 * validated against the schema before they leave this module.
 */

import {
  BeliefView,
  ClientMessage,
  FORMAT_VERSION,
  Snapshot,
  validateOutbound,
} from "./protocol.js";

export const COMMAND_PERIOD_MS = 100; // 10 Hz

export interface Limits {
  v_max: number;
  v_lat_max: number;
  omega_max: number;
}

export type KeySet = ReadonlySet<string>;

export function velocityFromKeys(keys: KeySet, limits: Limits): {
  vx: number;
  vy: number;
  omega: number;
} {
  let vx = 0;
  let vy = 0;
  let omega = 0;
  if (keys.has("KeyW") || keys.has("ArrowUp")) vx += limits.v_max;
  if (keys.has("KeyS") || keys.has("ArrowDown")) vx -= limits.v_max;
  if (keys.has("KeyA")) vy += limits.v_lat_max;
  if (keys.has("KeyD")) vy -= limits.v_lat_max;
  if (keys.has("KeyQ") || keys.has("ArrowLeft")) omega += limits.omega_max;
  if (keys.has("KeyE") || keys.has("ArrowRight")) omega -= limits.omega_max;
  return { vx, vy, omega };
}

/** Nearest pending belief confident enough to be worth a trigger. */
export function inspectCandidate(
  snapshot: Pick<Snapshot, "robot" | "beliefs">,
  minLabelProb = 0.5,
): BeliefView | null {
  const { robot } = snapshot;
  let best: BeliefView | null = null;
  let bestDist = Infinity;
  for (const b of snapshot.beliefs) {
    if (b.status !== "to_be_inspected") continue;
    if (b.floor !== robot.floor) continue;
    if (Math.max(...b.label_probs) < minLabelProb) continue;
    const d = Math.hypot(b.pos_mean[0] - robot.x, b.pos_mean[1] - robot.y);
    if (d < bestDist) {
      best = b;
      bestDist = d;
    }
  }
  return best;
}

export interface CommandOutcome {
  message: ClientMessage | null;
  hint: string | null;
}

export class CommandSource {
  private lastSentMs = -Infinity;
  private lastVelocity = { vx: 0, vy: 0, omega: 0 };

  constructor(private limits: Limits) {}

  setLimits(limits: Limits): void {
    this.limits = limits;
  }

  /** Velocity command for this animation frame, or null when rate-limited
   * and unchanged. */
  velocityCommand(keys: KeySet, tick: number, nowMs: number): ClientMessage | null {
    const v = velocityFromKeys(keys, this.limits);
    const changed =
      v.vx !== this.lastVelocity.vx ||
      v.vy !== this.lastVelocity.vy ||
      v.omega !== this.lastVelocity.omega;
    if (!changed && nowMs - this.lastSentMs < COMMAND_PERIOD_MS) return null;
    if (!changed && v.vx === 0 && v.vy === 0 && v.omega === 0) return null;
    this.lastSentMs = nowMs;
    this.lastVelocity = v;
    return validateOutbound({
      type: "cmd_vel",
      format_version: FORMAT_VERSION,
      tick,
      ...v,
    });
  }

  inspectCommand(
    snapshot: Pick<Snapshot, "robot" | "beliefs">,
    tick: number,
  ): CommandOutcome {
    const candidate = inspectCandidate(snapshot);
    if (candidate === null) {
      return { message: null, hint: "no confident inspection target in view" };
    }
    return {
      message: validateOutbound({
        type: "trigger_inspect",
        format_version: FORMAT_VERSION,
        tick,
        object_id: candidate.object_id,
      }),
      hint: null,
    };
  }

  gaitCommand(current: "walk" | "stair", tick: number): ClientMessage {
    return validateOutbound({
      type: "set_gait",
      format_version: FORMAT_VERSION,
      tick,
      mode: current === "walk" ? "stair" : "walk",
    });
  }

  startCommand(tick: number): ClientMessage {
    return validateOutbound({
      type: "start",
      format_version: FORMAT_VERSION,
      tick,
    });
  }

  pauseCommand(tick: number): ClientMessage {
    return validateOutbound({
      type: "pause",
      format_version: FORMAT_VERSION,
      tick,
    });
  }
}
