"""Live mission service: one operator, one WebSocket, one tick loop.

The tick task owns all mutable state; the socket handler only parses
inbound frames into the runtime queue (applied at the next tick) and the
tick task fans frames out. A second concurrent connection is refused, which
mirrors the single-operator premise of the whole system.
"""

from __future__ import annotations

import asyncio
import contextlib
from dataclasses import dataclass, field

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from swarmpatrol.gateway import protocol
from swarmpatrol.gateway.runtime import Inbound, MissionRuntime, TickOutput
from swarmpatrol.gateway.scenario import Scenario

TICK_SECONDS = 1.0  # simulated seconds per tick; wall pace = TICK_SECONDS / speed


@dataclass
class SessionState:
    websocket: WebSocket
    seq: int = 0
    encoder: protocol.GridStreamEncoder = field(default_factory=protocol.GridStreamEncoder)

    def next_seq(self) -> int:
        self.seq += 1
        return self.seq


def create_app(
    scenario: Scenario,
    seed: int,
    speed: float = 1.0,
    max_ticks: int | None = None,
) -> FastAPI:
    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        app.state.tick_task = asyncio.create_task(tick_loop())
        try:
            yield
        finally:
            app.state.tick_task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await app.state.tick_task

    app = FastAPI(title="swarmpatrol gateway", lifespan=lifespan)
    runtime = MissionRuntime(scenario, seed)
    app.state.runtime = runtime
    app.state.session: SessionState | None = None
    app.state.speed = max(speed, 1e-6)

    async def send_frame(kind: str, payload: dict) -> None:
        session = app.state.session
        if session is None:
            return
        frame = protocol.make_frame(session.next_seq(), runtime.world.tick, kind, payload)
        try:
            await session.websocket.send_text(frame.to_json())
        except Exception:
            app.state.session = None  # connection died mid-send

    async def broadcast_tick(output: TickOutput) -> None:
        for payload in output.events:
            await send_frame(protocol.EVENT, payload)
        for payload in output.mode_changes:
            await send_frame(protocol.MODE_CHANGE, payload)
        for payload in output.requests:
            await send_frame(protocol.COMPLETION_REQUEST, payload)
        for payload in output.emissions:
            await send_frame(protocol.EMISSION, payload)
        for payload in output.errors:
            await send_frame(protocol.ERROR, payload)
        session = app.state.session
        cadence = scenario.options.snapshot_cadence
        if session is not None and runtime.world.tick % cadence == 0:
            await send_frame(protocol.SNAPSHOT, runtime.snapshot_payload(session.encoder))

    async def tick_loop() -> None:
        ticked = 0
        while max_ticks is None or ticked < max_ticks:
            await asyncio.sleep(TICK_SECONDS / app.state.speed)
            output = runtime.tick()
            ticked += 1
            await broadcast_tick(output)

    @app.websocket("/ws")
    async def operator_socket(websocket: WebSocket) -> None:
        await websocket.accept()
        if app.state.session is not None:
            refusal = protocol.make_frame(
                0, runtime.world.tick, protocol.ERROR,
                {"error": "session refused: another operator is connected"},
            )
            await websocket.send_text(refusal.to_json())
            await websocket.close(code=1008)
            return
        session = SessionState(websocket=websocket)
        app.state.session = session
        # greet with an immediate snapshot so the console can draw at once
        hello = protocol.make_frame(
            session.next_seq(), runtime.world.tick, protocol.SNAPSHOT,
            runtime.snapshot_payload(session.encoder),
        )
        await websocket.send_text(hello.to_json())
        try:
            while True:
                raw = await websocket.receive_text()
                try:
                    frame = protocol.parse_frame(raw)
                except protocol.FrameError as exc:
                    error = protocol.make_frame(
                        session.next_seq(), runtime.world.tick, protocol.ERROR,
                        {"error": str(exc)},
                    )
                    await websocket.send_text(error.to_json())
                    continue
                runtime.submit(
                    Inbound(frame.kind, frame.payload, cid=frame.payload.get("cid"))
                )
        except WebSocketDisconnect:
            pass
        finally:
            if app.state.session is session:
                app.state.session = None

    return app
