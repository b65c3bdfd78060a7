"""Realtime teleop server: WebSocket wire protocol around the simulation loop.

One background task advances the world at the controller rate with drop-late
pacing (a late tick runs immediately, never skipped, so simulation time stays
tick_count / rate). Clients connect to ``/ws``: the first connection to send
a ``cmd`` frame becomes the operator; everyone else is a viewer. State frames
are fanned out through bounded per-client queues; viewers that fall behind
are disconnected rather than stalling the loop.

Frames (JSON over text):
  client -> server: {"type": "cmd", "steer": <rad>, "speed": <m/s>}
                    {"type": "reset"}
  server -> client: {"type": "state", "t": <s>, "vehicles": [...]}
                    {"type": "error", "msg": <str>}
Unknown frame types produce an error frame; the connection stays open. A
reset restores the initial poses but keeps the operator's held command.
"""

from __future__ import annotations

import asyncio
import json
import math
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from .engine import PlatoonWorld, step_realtime
from .scenario import ScenarioSpec
from .vehicle import ChassisCommand, clamp

# Lead command hold after the operator vanishes, mirroring the follower
# policy for lost markers.
OPERATOR_HOLD_TIMEOUT = 0.5

_QUEUE_SIZE = 16


class TeleopHub:
    """Shared state between the tick loop and the websocket handlers."""

    def __init__(self, spec: ScenarioSpec):
        self.spec = spec
        self.world = PlatoonWorld(spec)
        self.clients: dict[WebSocket, asyncio.Queue[str]] = {}
        self.operator: WebSocket | None = None
        self.held_cmd = ChassisCommand(0.0, 0.0)
        self.ticks_since_operator_loss: int | None = None
        self.reset_requested = False

    def lead_limits(self) -> tuple[float, float]:
        geom = self.spec.vehicles[0].geometry
        return geom.max_speed, geom.max_steer

    def apply_cmd(self, speed: float, steer: float) -> None:
        max_speed, max_steer = self.lead_limits()
        self.held_cmd = ChassisCommand(
            clamp(speed, 0.0, max_speed), clamp(steer, -max_steer, max_steer)
        )

    def operator_lost(self) -> None:
        self.operator = None
        self.ticks_since_operator_loss = 0

    def current_cmd(self) -> ChassisCommand:
        if self.operator is not None:
            return self.held_cmd
        if self.ticks_since_operator_loss is None:
            return self.held_cmd
        hold_ticks = OPERATOR_HOLD_TIMEOUT * self.spec.controller_rate
        if self.ticks_since_operator_loss <= hold_ticks:
            return self.held_cmd
        return ChassisCommand(0.0, 0.0)

    def tick(self) -> str:
        if self.reset_requested:
            self.world = PlatoonWorld(self.spec)
            self.reset_requested = False
        if self.operator is None and self.ticks_since_operator_loss is not None:
            self.ticks_since_operator_loss += 1
        frame = step_realtime(self.world, self.current_cmd())
        return json.dumps(frame)

    def broadcast(self, message: str) -> list[WebSocket]:
        """Queue a frame for every client; return those too slow to keep up."""
        stragglers = []
        for ws, queue in self.clients.items():
            try:
                queue.put_nowait(message)
            except asyncio.QueueFull:
                stragglers.append(ws)
        return stragglers


async def _run_loop(hub: TeleopHub) -> None:
    loop = asyncio.get_running_loop()
    period = 1.0 / hub.spec.controller_rate
    next_deadline = loop.time() + period
    while True:
        delay = next_deadline - loop.time()
        if delay > 0:
            await asyncio.sleep(delay)
        next_deadline += period
        message = hub.tick()
        for straggler in hub.broadcast(message):
            hub.clients.pop(straggler, None)
            if hub.operator is straggler:
                hub.operator_lost()
            try:
                await straggler.close()
            except Exception:
                pass


def build_app(spec: ScenarioSpec, static_dir: str | Path | None = None) -> FastAPI:
    """Assemble the teleop application for one scenario."""
    from contextlib import asynccontextmanager

    hub = TeleopHub(spec)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        task = asyncio.create_task(_run_loop(hub))
        try:
            yield
        finally:
            task.cancel()

    app = FastAPI(lifespan=lifespan)
    app.state.hub = hub

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket) -> None:
        await ws.accept()
        queue: asyncio.Queue[str] = asyncio.Queue(maxsize=_QUEUE_SIZE)
        hub.clients[ws] = queue

        async def sender() -> None:
            while True:
                await ws.send_text(await queue.get())

        send_task = asyncio.create_task(sender())
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    frame = json.loads(raw)
                except json.JSONDecodeError:
                    await ws.send_text(json.dumps({"type": "error", "msg": "invalid JSON"}))
                    continue
                kind = frame.get("type") if isinstance(frame, dict) else None
                if kind == "cmd":
                    if hub.operator is None:
                        hub.operator = ws
                        hub.ticks_since_operator_loss = None
                    if hub.operator is not ws:
                        await ws.send_text(
                            json.dumps({"type": "error", "msg": "operator already connected"})
                        )
                        continue
                    speed = frame.get("speed", 0.0)
                    steer = frame.get("steer", 0.0)
                    if not (
                        isinstance(speed, (int, float))
                        and isinstance(steer, (int, float))
                        and math.isfinite(speed)
                        and math.isfinite(steer)
                    ):
                        await ws.send_text(
                            json.dumps({"type": "error", "msg": "cmd fields must be finite numbers"})
                        )
                        continue
                    hub.apply_cmd(float(speed), float(steer))
                elif kind == "reset":
                    hub.reset_requested = True
                else:
                    await ws.send_text(
                        json.dumps({"type": "error", "msg": f"unknown frame type {kind!r}"})
                    )
        except WebSocketDisconnect:
            pass
        finally:
            send_task.cancel()
            hub.clients.pop(ws, None)
            if hub.operator is ws:
                hub.operator_lost()

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="cockpit")

    return app


def serve(spec: ScenarioSpec, host: str, port: int, static_dir: str | Path | None = None) -> None:
    """Run the teleop server until interrupted. Raises OSError if the port is busy."""
    import uvicorn

    app = build_app(spec, static_dir=static_dir)
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except SystemExit as exc:
        # uvicorn exits with its own status on startup failure (busy port);
        # surface it as an IO error so the CLI keeps its exit-code contract.
        if exc.code not in (0, None):
            raise OSError(f"server startup failed (status {exc.code})") from exc
