/** Boot: wire the canvas, keyboard, and WebSocket together. */

import { SimClient } from "./client.js";
import { CommandSource } from "./input.js";
import { renderSnapshot } from "./render.js";

const canvas = document.getElementById("world") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const hintEl = document.getElementById("hint")!;

const params = new URLSearchParams(window.location.search);
const wsUrl = params.get("server") ?? `ws://${window.location.hostname || "127.0.0.1"}:8750/ws`;

const client = new SimClient();
const commands = new CommandSource({ v_max: 1.0, v_lat_max: 0.5, omega_max: 1.5 });
const keys = new Set<string>();

window.addEventListener("keydown", (ev) => {
  if (ev.repeat) return;
  keys.add(ev.code);
  const snap = client.view.snapshot;
  const tick = snap?.tick ?? 0;
  if (ev.code === "KeyF" && snap) {
    const { message, hint } = commands.inspectCommand(snap, tick);
    if (message) client.send(message);
    hintEl.textContent = hint ?? "";
  } else if (ev.code === "KeyG" && snap) {
    client.send(commands.gaitCommand(snap.robot.gait, tick));
  } else if (ev.code === "Space") {
    const running = snap?.running ?? false;
    client.send(running ? commands.pauseCommand(tick) : commands.startCommand(tick));
    ev.preventDefault();
  }
});
window.addEventListener("keyup", (ev) => keys.delete(ev.code));

client.onchange = () => {
  const info = client.view.info;
  if (info) commands.setLimits(info.limits);
};

function frame(nowMs: number): void {
  const snap = client.view.snapshot;
  const info = client.view.info;
  if (snap && info) {
    if (snap.running) {
      const cmd = commands.velocityCommand(keys, snap.tick, nowMs);
      if (cmd) client.send(cmd);
    }
    renderSnapshot(ctx, snap, info, client.view.banner);
    const end = client.view.endSummary;
    if (end) {
      hintEl.textContent =
        `session over: inspected ${end.inspected_count}, ` +
        `reward ${Number(end.reward_cost).toFixed(1)} (${end.terminal})`;
    }
  }
  requestAnimationFrame(frame);
}

client.connect(wsUrl);
requestAnimationFrame(frame);
