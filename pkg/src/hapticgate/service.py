"""Real-time teleoperation service: the simulation loop behind a WebSocket.

One control-loop task owns all simulation state and ticks at the scenario dt.
Network handlers never touch that state directly: commands land in a
last-writer-wins cell, telemetry fans out through per-client queues. Messages
are JSON text objects with a protocol version field:

    command   {"v": 1, "type": "command", "seq": N,
               "stylus_cm": [..] | "x2d_mps": [..]}   (exactly one of the two)
    telemetry {"v": 1, "type": "telemetry", "t", "x1", "x2", "x2d", "f",
               "f_ref", "e", "h", "radius_sq", "saturated", "seq_ack"}
    ping      {"v": 1, "type": "ping", "t": ...}      (heartbeat, 1/s)

The first client to send a command becomes the controller; other connections
receive telemetry read-only. Commands with non-increasing seq are dropped.
When no fresh command arrives for `timeout_steps`, the commanded velocity
decays linearly to zero over `decay_steps` (dead-man behavior).

GET /trace returns the session trace in the CSV schema of `trace_io`, so
every offline audit applies to live sessions unchanged.
"""

from __future__ import annotations

import asyncio
import contextlib
import json
import logging
import time
from pathlib import Path

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse, PlainTextResponse, Response
from fastapi.staticfiles import StaticFiles

from .dynamics import RobotState
from .errors import ConfigError
from .operators import stylus_to_velocity
from .rendering import TankState
from .scenario import ScenarioConfig, disturbance_sequence, with_mode
from .simulation import TraceSample, simulate_step
from .trace_io import trace_to_csv

logger = logging.getLogger("hapticgate.service")

PROTOCOL_VERSION = 1
COMMAND_TIMEOUT_STEPS = 10
DEADMAN_DECAY_STEPS = 5
TELEMETRY_QUEUE_SIZE = 512


class ProtocolError(ValueError):
    """Client message violates the wire schema."""


class RealTimePacer:
    """Wall-clock pacing at dt per tick; overruns skip forward, never burst.

    Simulated time still advances exactly one dt per tick — a late tick is
    logged and the deadline re-anchored to now (skip-free catch-up).
    """

    def __init__(self, dt: float):
        self.dt = dt
        self._deadline: float | None = None

    async def tick(self) -> None:
        now = time.monotonic()
        if self._deadline is None:
            self._deadline = now + self.dt
            await asyncio.sleep(self.dt)
            return
        self._deadline += self.dt
        delay = self._deadline - now
        if delay > 0:
            await asyncio.sleep(delay)
        else:
            if delay < -self.dt:
                logger.warning("control loop overran by %.3f s; skipping forward", -delay)
            self._deadline = now


class FreeRunPacer:
    """Run as fast as the event loop allows (tests and batch-style sessions)."""

    def __init__(self, min_sleep: float = 0.0005):
        self.min_sleep = min_sleep

    async def tick(self) -> None:
        await asyncio.sleep(self.min_sleep)


def parse_command(text: str, dim: int) -> tuple[int, str, np.ndarray]:
    """Validate a raw command message; returns (seq, field, vector)."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ProtocolError("message must be a JSON object")
    if obj.get("v") != PROTOCOL_VERSION:
        raise ProtocolError(f"unsupported protocol version {obj.get('v')!r}")
    if obj.get("type") != "command":
        raise ProtocolError(f"unsupported message type {obj.get('type')!r}")
    seq = obj.get("seq")
    if not isinstance(seq, int):
        raise ProtocolError("seq must be an integer")
    has_stylus = "stylus_cm" in obj
    has_velocity = "x2d_mps" in obj
    if has_stylus == has_velocity:
        raise ProtocolError("exactly one of stylus_cm or x2d_mps is required")
    field = "stylus_cm" if has_stylus else "x2d_mps"
    try:
        vec = np.asarray(obj[field], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ProtocolError(f"{field} must be a numeric vector") from exc
    if vec.shape != (dim,):
        raise ProtocolError(f"{field} must have dimension {dim}")
    if not np.all(np.isfinite(vec)):
        raise ProtocolError(f"{field} must be finite")
    return seq, field, vec


class TeleopSession:
    """Simulation state owned by the control loop, plus the command cell."""

    def __init__(self, config: ScenarioConfig, timeout_steps: int = COMMAND_TIMEOUT_STEPS,
                 decay_steps: int = DEADMAN_DECAY_STEPS):
        self.timeout_steps = timeout_steps
        self.decay_steps = decay_steps
        self.subscribers: set[asyncio.Queue] = set()
        self.controller_id: int | None = None
        self.reset(config)

    def reset(self, config: ScenarioConfig) -> None:
        self.config = config
        self.state: RobotState = config.initial
        self.tank = TankState(e=0.0)
        self.step_index = 0
        self.trace: list[TraceSample] = []
        self.last_seq = -1
        self.command_x2d: np.ndarray | None = None
        self.command_step = -1
        self._disturbance = disturbance_sequence(
            config.disturbance, config.n_steps, config.dim, config.dt, config.seed
        )

    def submit_command(self, seq: int, field: str, vec: np.ndarray) -> bool:
        """Accept a command if seq advances; returns False for stale ones."""
        if seq <= self.last_seq:
            return False
        self.last_seq = seq
        x2d = stylus_to_velocity(vec, self.config.stylus) if field == "stylus_cm" else vec.astype(float)
        self.command_x2d = x2d
        self.command_step = self.step_index
        return True

    def current_x2d(self) -> np.ndarray:
        """Latest command with dead-man decay when it goes stale."""
        if self.command_x2d is None:
            return np.zeros(self.config.dim)
        stale = self.step_index - self.command_step
        if stale <= self.timeout_steps:
            return self.command_x2d
        fade = 1.0 - (stale - self.timeout_steps) / self.decay_steps
        if fade <= 0.0:
            return np.zeros(self.config.dim)
        return self.command_x2d * fade

    def _disturbance_at(self, i: int) -> np.ndarray:
        # Extend deterministically past the configured horizon on demand;
        # batch regeneration with the same seed is prefix-stable.
        while i >= len(self._disturbance):
            self._disturbance = disturbance_sequence(
                self.config.disturbance,
                2 * len(self._disturbance),
                self.config.dim,
                self.config.dt,
                self.config.seed,
            )
        return self._disturbance[i]

    def step_once(self) -> TraceSample:
        t = self.step_index * self.config.dt
        x2d = self.current_x2d()
        sample, self.state, self.tank = simulate_step(
            self.config, self.state, self.tank, x2d, self._disturbance_at(self.step_index), t
        )
        self.trace.append(sample)
        self.step_index += 1
        return sample

    def snapshot(self) -> list[TraceSample]:
        return list(self.trace)

    def broadcast(self, message: dict) -> None:
        text = json.dumps(message)
        for queue in self.subscribers:
            if queue.full():
                with contextlib.suppress(asyncio.QueueEmpty):
                    queue.get_nowait()
            queue.put_nowait(text)


def telemetry_message(sample: TraceSample, seq_ack: int) -> dict:
    return {
        "v": PROTOCOL_VERSION,
        "type": "telemetry",
        "t": sample.t,
        "x1": [float(v) for v in sample.x1],
        "x2": [float(v) for v in sample.x2],
        "x2d": [float(v) for v in sample.x2d],
        "f": [float(v) for v in sample.f],
        "f_ref": [float(v) for v in sample.f_ref],
        "e": sample.e,
        "h": sample.h,
        "radius_sq": sample.radius_sq,
        "saturated": bool(sample.saturated),
        "seq_ack": seq_ack,
    }


def create_app(config: ScenarioConfig, pacer=None, ui_dir: str | Path | None = None) -> FastAPI:
    """Build the service app around one session; the loop runs for the app's life."""
    session = TeleopSession(config)
    loop_pacer = pacer if pacer is not None else RealTimePacer(config.dt)
    ping_every = max(1, round(1.0 / config.dt))

    async def control_loop() -> None:
        while True:
            await loop_pacer.tick()
            sample = session.step_once()
            session.broadcast(telemetry_message(sample, session.last_seq))
            if session.step_index % ping_every == 0:
                session.broadcast({"v": PROTOCOL_VERSION, "type": "ping", "t": sample.t})

    @contextlib.asynccontextmanager
    async def lifespan(_: FastAPI):
        task = asyncio.create_task(control_loop())
        try:
            yield
        finally:
            task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await task

    app = FastAPI(lifespan=lifespan)
    app.state.session = session

    @app.get("/healthz")
    async def healthz():
        return {"ok": True, "steps": session.step_index}

    @app.get("/session")
    async def session_info():
        cfg = session.config
        return {
            "v": PROTOCOL_VERSION,
            "name": cfg.name,
            "mode": cfg.mode,
            "dt": cfg.dt,
            "dim": cfg.dim,
            "e_max": cfg.params.e_max,
            "k": cfg.params.k,
            "wall": {"a": [float(v) for v in cfg.halfspace.a], "b": cfg.halfspace.b},
            "stylus": {
                "dead_zone_cm": cfg.stylus.dead_zone_cm,
                "gain_mps_per_cm": cfg.stylus.gain_mps_per_cm,
            },
            "steps": session.step_index,
        }

    @app.post("/session/restart")
    async def session_restart(body: dict | None = None):
        mode = (body or {}).get("mode", session.config.mode)
        try:
            new_config = with_mode(session.config, mode)
        except ConfigError as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        session.controller_id = None
        session.reset(new_config)
        return {"ok": True, "mode": mode}

    @app.get("/trace")
    async def trace_csv():
        text = trace_to_csv(session.snapshot(), dim=session.config.dim)
        return Response(
            content=text,
            media_type="text/csv",
            headers={"Content-Disposition": "attachment; filename=trace.csv"},
        )

    @app.websocket("/ws")
    async def websocket_endpoint(ws: WebSocket):
        await ws.accept()
        queue: asyncio.Queue = asyncio.Queue(maxsize=TELEMETRY_QUEUE_SIZE)
        session.subscribers.add(queue)
        client_id = id(ws)

        async def sender():
            try:
                while True:
                    await ws.send_text(await queue.get())
            except (WebSocketDisconnect, RuntimeError):
                return  # socket closed under us; the receive side cleans up

        send_task = asyncio.create_task(sender())

        async def stop_sender():
            send_task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await send_task

        try:
            while True:
                text = await ws.receive_text()
                try:
                    seq, field, vec = parse_command(text, session.config.dim)
                except ProtocolError as exc:
                    await stop_sender()
                    await ws.close(code=1002, reason=str(exc)[:120])
                    return
                if session.controller_id is None:
                    session.controller_id = client_id
                if session.controller_id != client_id:
                    await ws.send_text(json.dumps(
                        {"v": PROTOCOL_VERSION, "type": "error", "error": "read_only"}
                    ))
                    continue
                session.submit_command(seq, field, vec)
        except WebSocketDisconnect:
            pass
        finally:
            await stop_sender()
            session.subscribers.discard(queue)
            if session.controller_id == client_id:
                session.controller_id = None

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    else:
        @app.get("/")
        async def index():
            return PlainTextResponse(
                "hapticgate teleop service\n"
                "WS /ws | GET /trace | GET /session | POST /session/restart\n"
            )

    return app


def serve(config: ScenarioConfig, host: str, port: int, ui_dir: str | Path | None = None) -> None:
    """Run the service until interrupted (blocking)."""
    import uvicorn

    app = create_app(config, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")
