"""Live simulator bridge: JSON messages over a WebSocket, teleop or spectator.

Fog of war is enforced at the serialization boundary: outbound messages carry
the belief, raw observations, and coverage, never ground-truth object state.
Commands are tick-stamped, applied at tick boundaries, at most one per tick
with the latest arrival winning.
"""

from __future__ import annotations

import asyncio
import time as wallclock
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .graph import Executor
from .scenario import WorldScenario
from .trace import Trace
from .types import ControlInput, Gait, SetGait, TriggerInspect

PROTOCOL_VERSION = 1
SNAPSHOT_WINDOW_CELLS = 12          # half-width of the occupancy window
DISCONNECT_GRACE_S = 30.0           # wall-clock pause before aborting teleop

CLIENT_TYPES = ("cmd_vel", "trigger_inspect", "set_gait", "start", "pause")


@dataclass
class Command:
    seq: int
    tick: int
    payload: dict


@dataclass
class Session:
    """One run of the simulator, driven tick by tick from the server loop."""

    scenario: WorldScenario
    mode: str = "teleop"                       # or "autonomous"
    executor: Executor = None
    commands: list[Command] = field(default_factory=list)
    held: ControlInput = ControlInput()
    running: bool = False
    ended: bool = False
    run_to_tick: Optional[int] = None
    _seq: int = 0

    def __post_init__(self) -> None:
        if self.mode not in ("teleop", "autonomous"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.executor is None:
            self.executor = Executor(self.scenario, method="full",
                                     teleop=self.mode == "teleop")

    # -- inbound -----------------------------------------------------------

    def enqueue(self, msg: dict) -> None:
        mtype = msg.get("type")
        if mtype not in CLIENT_TYPES:
            raise ValueError(f"unknown message type {mtype!r}")
        if msg.get("format_version") != PROTOCOL_VERSION:
            raise ValueError("missing or unsupported format_version")
        tick = int(msg.get("tick", 0))
        if mtype == "start":
            self.running = True
            if "run_to_tick" in msg and msg["run_to_tick"] is not None:
                self.run_to_tick = int(msg["run_to_tick"])
            return
        if mtype == "pause":
            self.running = False
            return
        self._seq += 1
        self.commands.append(Command(self._seq, tick, msg))

    def hold_zero(self) -> None:
        self.held = ControlInput()

    # -- tick --------------------------------------------------------------

    def _consume_command(self) -> None:
        now = self.executor.tick_index
        eligible = [c for c in self.commands if c.tick <= now]
        if not eligible:
            return
        winner = max(eligible, key=lambda c: c.seq)
        self.commands = [c for c in self.commands if c.tick > now]
        msg = winner.payload
        if msg["type"] == "cmd_vel":
            self.held = ControlInput(
                vx=float(msg["vx"]), vy=float(msg["vy"]), omega=float(msg["omega"]))
        elif msg["type"] == "trigger_inspect":
            self.held = ControlInput(
                self.held.vx, self.held.vy, self.held.omega,
                TriggerInspect(int(msg["object_id"]), 0.0, 0.0))
        elif msg["type"] == "set_gait":
            self.held = ControlInput(
                self.held.vx, self.held.vy, self.held.omega,
                SetGait(Gait(msg["mode"])))

    def tick(self) -> list[dict]:
        """Advance one tick; returns outbound event payloads."""
        if self.ended:
            return []
        ex = self.executor
        events: list[dict] = []
        if self.mode == "teleop":
            self._consume_command()
            u = self.held
            events = ex.tick(external_u=u)
            # one-shot actions must not repeat on the held command
            if self.held.action is not None:
                self.held = ControlInput(self.held.vx, self.held.vy, self.held.omega)
        else:
            events = ex.tick()
        if ex.done or (self.run_to_tick is not None
                       and ex.tick_index >= self.run_to_tick):
            self.ended = True
            self.running = False
        return events

    def finish(self) -> Trace:
        return self.executor.finish()

    # -- outbound ----------------------------------------------------------

    def snapshot(self, include_static: bool = False) -> dict:
        ex = self.executor
        belief = ex.belief
        robot = belief.robot
        grid = self.scenario.grid
        floor = robot.floor
        rx, ry = float(robot.mean[0]), float(robot.mean[1])
        ix, iy = grid.cell_of(rx, ry)
        w = SNAPSHOT_WINDOW_CELLS
        x0, y0 = max(0, ix - w), max(0, iy - w)
        x1, y1 = min(grid.cols, ix + w + 1), min(grid.rows, iy + w + 1)
        layer = grid.floors[floor]
        window = ["".join(".#?"[int(v)] for v in layer[yy, x0:x1])
                  for yy in range(y0, y1)]
        mask = ex.coverage.coverage.covered[floor]
        covered = ["".join("1" if v else "0" for v in mask[yy])
                   for yy in range(grid.rows)]
        msg = {
            "type": "snapshot",
            "format_version": PROTOCOL_VERSION,
            "tick": ex.tick_index,
            "t": ex.world.time,
            "mode": self.mode,
            "running": self.running,
            "robot": {
                "x": rx, "y": ry, "heading": float(robot.mean[2]),
                "floor": floor, "gait": robot.gait.value,
            },
            "observations": [z.to_dict() for z in ex.last_observations],
            "beliefs": [belief.objects[oid].to_dict()
                        for oid in belief.tracked_ids()],
            "occupancy_window": {
                "x0": x0, "y0": y0, "cell_size": grid.cell_size, "rows": window,
            },
            "covered": covered,
            "behavior": "teleop" if self.mode == "teleop"
                        else ex.state.active.value,
            "inspected_count": ex.believed_resolved_count(),
            "reward_cost": ex.reward_cost_running(),
            "budget_s": self.scenario.budget_s,
        }
        if include_static:
            msg["static"] = {
                "scenario_name": self.scenario.name,
                "grid": {
                    "cell_size": grid.cell_size,
                    "cols": grid.cols,
                    "rows": grid.rows,
                    "floors": {str(f): rows for f, rows in grid.to_rows().items()},
                },
                "labels": self.scenario.registry.to_dict(),
                "limits": {
                    "v_max": self.scenario.limits.v_max,
                    "v_lat_max": self.scenario.limits.v_lat_max,
                    "omega_max": self.scenario.limits.omega_max,
                },
                "tick_hz": self.scenario.tick_hz,
            }
        return msg

    def event_message(self, payload: dict) -> dict:
        return {
            "type": "event",
            "format_version": PROTOCOL_VERSION,
            "tick": self.executor.tick_index,
            "payload": payload,
        }

    def end_message(self, summary: dict) -> dict:
        fog_safe = {k: summary[k] for k in
                    ("ticks", "elapsed_s", "inspected_count", "path_length_m",
                     "reward_cost", "terminal", "method") if k in summary}
        return {
            "type": "session_end",
            "format_version": PROTOCOL_VERSION,
            "tick": self.executor.tick_index,
            "summary": fog_safe,
        }


def run_scripted_session(scenario: WorldScenario, schedule: list[dict],
                         run_to_tick: int, mode: str = "teleop") -> tuple[Session, Trace]:
    """Drive a session synchronously from a command schedule (no sockets).

    The schedule entries are protocol messages; this is the headless twin of
    a live client, used for replay verification and tests.
    """
    session = Session(scenario, mode=mode)
    for msg in schedule:
        session.enqueue(msg)
    session.enqueue({"type": "start", "format_version": PROTOCOL_VERSION,
                     "tick": 0, "run_to_tick": run_to_tick})
    while not session.ended:
        session.tick()
    trace = session.finish()
    return session, trace


class SessionHub:
    """Owns the tick loop; websocket handlers only move messages in and out.

    The session keeps running (or gracefully aborts) across client drops:
    a teleop disconnect zeroes the held command, pauses, and aborts after
    the grace period unless a client reattaches.
    """

    def __init__(self, session: Session, pace: str, grace_s: Optional[float] = None):
        self.session = session
        self.pace = pace
        self.grace_s = grace_s
        self.inbox: asyncio.Queue = asyncio.Queue()
        self.subscribers: list[asyncio.Queue] = []
        self.clients = 0
        self.disconnected_at: Optional[float] = None

    def attach(self) -> asyncio.Queue:
        q: asyncio.Queue = asyncio.Queue()
        self.subscribers.append(q)
        self.clients += 1
        self.disconnected_at = None
        return q

    def detach(self, q: asyncio.Queue) -> None:
        if q in self.subscribers:
            self.subscribers.remove(q)
        self.clients -= 1
        if self.clients <= 0 and self.session.mode == "teleop":
            self.session.hold_zero()
            self.session.running = False
            self.disconnected_at = wallclock.monotonic()

    async def _broadcast(self, msg: dict) -> None:
        for q in self.subscribers:
            await q.put(msg)

    async def run(self) -> None:
        session = self.session
        dt_wall = 1.0 / session.scenario.tick_hz
        grace = self.grace_s if self.grace_s is not None else DISCONNECT_GRACE_S
        next_tick_at = wallclock.monotonic()
        aborted = False
        while not session.ended:
            while True:
                try:
                    msg = self.inbox.get_nowait()
                except asyncio.QueueEmpty:
                    break
                try:
                    session.enqueue(msg)
                except ValueError as e:
                    await self._broadcast({
                        "type": "event",
                        "format_version": PROTOCOL_VERSION,
                        "tick": session.executor.tick_index,
                        "payload": {"event": "protocol_error", "detail": str(e)},
                    })
            if self.disconnected_at is not None:
                if wallclock.monotonic() - self.disconnected_at > grace:
                    session.ended = True
                    aborted = True
                    break
                await asyncio.sleep(0.02)
                continue
            if not session.running:
                await asyncio.sleep(0.01)
                next_tick_at = wallclock.monotonic()
                continue
            events = session.tick()
            for ev in events:
                await self._broadcast(session.event_message(ev))
            await self._broadcast(session.snapshot())
            if self.pace == "realtime":
                next_tick_at += dt_wall
                delay = next_tick_at - wallclock.monotonic()
                if delay > 0:
                    await asyncio.sleep(delay)
            else:
                await asyncio.sleep(0)
        if not aborted:
            trace = session.finish()
            await self._broadcast(session.end_message(trace.summary_record()))


def build_app(scenario: WorldScenario, mode: str = "teleop",
              pace: str = "realtime", ui_dir: Optional[str] = None) -> FastAPI:
    """FastAPI app exposing one session over /ws (and the browser UI, if built)."""
    if pace not in ("realtime", "fast"):
        raise ValueError(f"unknown pace {pace!r}")
    session = Session(scenario, mode=mode)
    hub = SessionHub(session, pace)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        task = asyncio.create_task(hub.run())
        yield
        task.cancel()

    app = FastAPI(title="beliefgraph sim server", lifespan=lifespan)
    app.state.session = session
    app.state.hub = hub
    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    @app.websocket("/ws")
    async def ws_endpoint(sock: WebSocket) -> None:
        await sock.accept()
        await sock.send_json(session.snapshot(include_static=True))
        outbox = hub.attach()

        async def forward() -> None:
            while True:
                await sock.send_json(await outbox.get())

        forward_task = asyncio.create_task(forward())
        try:
            while True:
                msg = await sock.receive_json()
                await hub.inbox.put(msg)
        except WebSocketDisconnect:
            pass
        except Exception:
            pass
        finally:
            forward_task.cancel()
            hub.detach(outbox)

    return app
