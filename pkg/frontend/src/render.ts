/**
 * Canvas drawing for the belief-view world: occupancy, coverage, the robot
 * with its field-of-view wedge, belief ellipses tinted by label confidence,
 * raw observations, and the session readout.
 */

import { BeliefView, Snapshot, StaticInfo } from "./protocol.js";

export interface EllipseSpec {
  rx: number;
  ry: number;
  angle: number;
}

/** 95%-ish ellipse axes/orientation from a 2x2 symmetric covariance. */
export function ellipseFromCovariance(cov: number[][], k = 2.0): EllipseSpec {
  const a = cov[0][0];
  const b = cov[0][1];
  const c = cov[1][1];
  const tr = a + c;
  const det = a * c - b * b;
  const disc = Math.sqrt(Math.max(0, (tr * tr) / 4 - det));
  const l1 = Math.max(0, tr / 2 + disc);
  const l2 = Math.max(0, tr / 2 - disc);
  const angle = Math.abs(b) < 1e-12 ? 0 : Math.atan2(l1 - a, b);
  return { rx: k * Math.sqrt(l1), ry: k * Math.sqrt(l2), angle };
}

export interface Viewport {
  scale: number; // pixels per meter
  height: number; // canvas pixel height (for y flip)
}

export function worldToScreen(
  x: number,
  y: number,
  view: Viewport,
): [number, number] {
  return [x * view.scale, view.height - y * view.scale];
}

function labelColor(b: BeliefView): string {
  const confidence = Math.max(...b.label_probs);
  const hue = 120 * confidence; // red (uncertain) to green (confident)
  return `hsl(${hue.toFixed(0)}, 80%, 45%)`;
}

const FOV_HALF_ANGLE = Math.PI / 4;
const FOV_RANGE_M = 10;

export function renderSnapshot(
  ctx: CanvasRenderingContext2D,
  snap: Snapshot,
  info: StaticInfo,
  banner: string | null,
): void {
  const cell = info.grid.cell_size;
  const view: Viewport = {
    scale: Math.min(
      ctx.canvas.width / (info.grid.cols * cell),
      ctx.canvas.height / (info.grid.rows * cell),
    ),
    height: ctx.canvas.height,
  };
  ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);

  drawFloor(ctx, snap, info, view);
  drawCoverage(ctx, snap, info, view);
  drawObservations(ctx, snap, view);
  for (const b of snap.beliefs) {
    if (b.floor === snap.robot.floor) drawBelief(ctx, b, view);
  }
  drawRobot(ctx, snap, view);
  drawReadout(ctx, snap, banner);
}

function drawFloor(
  ctx: CanvasRenderingContext2D,
  snap: Snapshot,
  info: StaticInfo,
  view: Viewport,
): void {
  const cell = info.grid.cell_size;
  const rows = info.grid.floors[String(snap.robot.floor)];
  if (!rows) return;
  const nRows = rows.length;
  for (let r = 0; r < nRows; r++) {
    const row = rows[r];
    const iy = nRows - 1 - r; // file rows are top-first
    for (let ix = 0; ix < row.length; ix++) {
      const ch = row[ix];
      ctx.fillStyle =
        ch === "#" ? "#30343b" : ch === "?" ? "#8a8f98" : "#e8e6df";
      const [px, py] = worldToScreen(ix * cell, (iy + 1) * cell, view);
      ctx.fillRect(px, py, cell * view.scale + 0.5, cell * view.scale + 0.5);
    }
  }
}

function drawCoverage(
  ctx: CanvasRenderingContext2D,
  snap: Snapshot,
  info: StaticInfo,
  view: Viewport,
): void {
  const cell = info.grid.cell_size;
  ctx.fillStyle = "rgba(90, 160, 255, 0.25)";
  for (let iy = 0; iy < snap.covered.length; iy++) {
    const row = snap.covered[iy];
    for (let ix = 0; ix < row.length; ix++) {
      if (row[ix] !== "1") continue;
      const [px, py] = worldToScreen(ix * cell, (iy + 1) * cell, view);
      ctx.fillRect(px, py, cell * view.scale + 0.5, cell * view.scale + 0.5);
    }
  }
}

function drawObservations(
  ctx: CanvasRenderingContext2D,
  snap: Snapshot,
  view: Viewport,
): void {
  ctx.fillStyle = "rgba(250, 180, 40, 0.9)";
  for (const z of snap.observations) {
    const [px, py] = worldToScreen(z.x, z.y, view);
    ctx.beginPath();
    ctx.arc(px, py, 3, 0, 2 * Math.PI);
    ctx.fill();
  }
}

function drawBelief(
  ctx: CanvasRenderingContext2D,
  b: BeliefView,
  view: Viewport,
): void {
  const spec = ellipseFromCovariance(b.pos_cov);
  const [px, py] = worldToScreen(b.pos_mean[0], b.pos_mean[1], view);
  ctx.strokeStyle = labelColor(b);
  ctx.lineWidth = b.status === "to_be_inspected" ? 2 : 1;
  ctx.beginPath();
  ctx.ellipse(
    px,
    py,
    Math.max(2, spec.rx * view.scale),
    Math.max(2, spec.ry * view.scale),
    -spec.angle,
    0,
    2 * Math.PI,
  );
  ctx.stroke();
  if (b.status === "inspected" || b.status === "ascended") {
    ctx.fillStyle = "rgba(40, 170, 60, 0.9)";
    ctx.fillRect(px - 3, py - 3, 6, 6);
  } else if (b.status === "dismissed") {
    ctx.strokeStyle = "#999";
    ctx.beginPath();
    ctx.moveTo(px - 4, py - 4);
    ctx.lineTo(px + 4, py + 4);
    ctx.moveTo(px - 4, py + 4);
    ctx.lineTo(px + 4, py - 4);
    ctx.stroke();
  }
}

function drawRobot(
  ctx: CanvasRenderingContext2D,
  snap: Snapshot,
  view: Viewport,
): void {
  const { x, y, heading, gait } = snap.robot;
  const [px, py] = worldToScreen(x, y, view);
  // field-of-view wedge (canvas y is flipped, so angles negate)
  ctx.fillStyle = "rgba(120, 200, 120, 0.15)";
  ctx.beginPath();
  ctx.moveTo(px, py);
  ctx.arc(
    px,
    py,
    FOV_RANGE_M * view.scale,
    -(heading + FOV_HALF_ANGLE),
    -(heading - FOV_HALF_ANGLE),
  );
  ctx.closePath();
  ctx.fill();
  ctx.fillStyle = gait === "stair" ? "#c24" : "#246";
  ctx.beginPath();
  ctx.arc(px, py, 5, 0, 2 * Math.PI);
  ctx.fill();
  ctx.strokeStyle = "#fff";
  ctx.beginPath();
  ctx.moveTo(px, py);
  ctx.lineTo(
    px + 10 * Math.cos(-heading),
    py + 10 * Math.sin(-heading),
  );
  ctx.stroke();
}

function drawReadout(
  ctx: CanvasRenderingContext2D,
  snap: Snapshot,
  banner: string | null,
): void {
  ctx.fillStyle = "#111";
  ctx.font = "13px monospace";
  const line = `t=${snap.t.toFixed(1)}s/${snap.budget_s.toFixed(0)}s  ` +
    `inspected=${snap.inspected_count}  reward=${snap.reward_cost.toFixed(1)}  ` +
    `${snap.running ? "running" : "paused"}`;
  ctx.fillText(line, 8, 16);
  if (banner) {
    ctx.fillStyle = "#b00";
    ctx.fillText(banner, 8, 32);
  }
}
