"""Real-time session server: one WebSocket client per session, ticks on a
wall-clock timer, JSON messages both ways.

The live path reuses the exact headless session machinery; only the input
driver differs. It sleeps until each tick's absolute deadline and hands the
most recent client input to that tick (last write wins, presses latched so
a press between ticks is never lost). Everything is logged through the
session module, so a live game replays like any other.
"""

from __future__ import annotations

import asyncio
import json
import math
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from fastapi import FastAPI, WebSocket
from fastapi.staticfiles import StaticFiles

from .agents import AgentObservation, Driver, DriverDisconnected
from .config import GameConfig
from .display import quantize_frame
from .gaze import HandSample
from .glove import quantize_glove
from .session import (
    PhaseRecord,
    SCENARIOS,
    SessionLog,
    run_scenario,
    write_log,
)
from .world import EventKind, Phase, WorldState, visible_entities

PROTOCOL_VERSION = 1


@dataclass
class LiveInput:
    """Latest client input, shared between the socket reader and the tick
    loop. Presses latch until a tick consumes them."""
    hand: tuple[float, float, float, bool] = (0.0, 0.0, 0.0, False)
    trigger: bool = False
    pending_press: bool = False
    paused: bool = False
    disconnected: bool = False
    lock: threading.Lock = field(default_factory=threading.Lock)

    def set_hand(self, x: float, y: float, z: float, valid: bool) -> None:
        if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(z)):
            valid = False
        self.hand = (x, y, z, valid)

    def set_trigger(self, pressed: bool) -> None:
        with self.lock:
            self.trigger = pressed
            if pressed:
                self.pending_press = True

    def consume(self) -> tuple[tuple[float, float, float, bool], bool]:
        with self.lock:
            trigger = self.trigger or self.pending_press
            self.pending_press = False
            return self.hand, trigger


class LiveDriver(Driver):
    """Wall-clock input source: one sample per tick at the configured rate,
    streaming every frame, scene, cue, and metric to a message sink."""

    def __init__(self, config: GameConfig, inputs: LiveInput,
                 sink: Callable[[dict], None]):
        self._config = config
        self._inputs = inputs
        self._sink = sink
        self._period = 1.0 / config.tick_rate
        self._start: float | None = None
        self._count = 0
        self._score = 0

    def begin_phase(self, phase: str, game_index: int = 0) -> None:
        self._score = 0
        self._sink({"type": "phase", "name": phase, "game": game_index})

    def next_sample(self, tick: int) -> HandSample:
        if self._start is None:
            self._start = time.perf_counter()
        deadline = self._start + (self._count + 1) * self._period
        self._count += 1
        while True:
            if self._inputs.disconnected:
                raise DriverDisconnected("client went away")
            if self._inputs.paused:
                pause_began = time.perf_counter()
                while self._inputs.paused and not self._inputs.disconnected:
                    time.sleep(0.005)
                shift = time.perf_counter() - pause_began
                self._start += shift
                deadline += shift
                continue
            now = time.perf_counter()
            if now >= deadline:
                break
            time.sleep(min(deadline - now, 0.02))
        (x, y, z, valid), trigger = self._inputs.consume()
        return HandSample(x, y, z, valid=valid, trigger=trigger,
                          timestamp_tick=tick)

    def observe_frames(self, obs: AgentObservation) -> None:
        self._sink({"type": "motor", "tick": obs.tick,
                    "cols": obs.motor_frame.cols, "rows": obs.motor_frame.rows,
                    "data": quantize_frame(obs.motor_frame)})
        self._sink({"type": "glove", "tick": obs.tick,
                    "data": quantize_glove(obs.glove_frame)})

    def observe_world(self, world: WorldState) -> None:
        self._sink({
            "type": "scene", "tick": world.tick,
            "avatar": {"x": world.avatar.x, "y": world.avatar.y,
                       "heading": world.avatar.heading},
            "entities": [
                {"id": v.entity_id, "kind": v.kind.value, "azimuth": v.azimuth,
                 "elevation": v.elevation, "distance": v.distance}
                for v in visible_entities(world)],
        })
        self._sink({"type": "state", "tick": world.tick, "score": self._score,
                    "phase": world.phase.value})

    def observe_events(self, events: list, audio: list[str], tick: int) -> None:
        for event in events:
            if event.kind is EventKind.MONSTER_KILLED:
                self._score += 1
            elif event.kind is EventKind.BARREL_HIT:
                self._score -= 1
        for cue in audio:
            self._sink({"type": "audio", "tick": tick, "cue": cue})

    def end_phase(self, record: PhaseRecord) -> None:
        if record.metrics is not None:
            m = record.metrics
            self._sink({"type": "metrics", "game": m.game_index,
                        "monsters_killed": m.monsters_killed,
                        "barrels_hit": m.barrels_hit, "misses": m.misses,
                        "shots": m.shots, "score": m.score,
                        "accuracy": m.accuracy,
                        "mistake_ratio": m.mistake_ratio})


def run_live_scenario(config: GameConfig, inputs: LiveInput,
                      sink: Callable[[dict], None], scenario: str = "game",
                      participant: str = "live",
                      log_path: str | Path | None = None) -> SessionLog:
    """Run one wall-clock session against a message sink. Blocking; this is
    the only wall-clock-coupled path in the artifact. The log is written
    here, in the session thread, so it survives a dropped connection."""
    driver = LiveDriver(config, inputs, sink)
    log = run_scenario(config, driver, scenario, participant=participant)
    if log_path is not None:
        path = Path(log_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        write_log(log, path)
    sink({"type": "end", "truncated": log.truncated})
    return log


# -- the websocket service ----------------------------------------------------


def _error(message: str) -> dict:
    return {"type": "error", "message": message}


def _apply_client_message(raw: str, inputs: LiveInput) -> dict | None:
    """Validate and apply one client message; an error dict on rejection.

    Every malformed or unknown message is answered and dropped; the
    connection stays alive no matter what arrives.
    """
    try:
        msg = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError, RecursionError):
        return _error("malformed JSON")
    if not isinstance(msg, dict):
        return _error("message must be a JSON object")
    kind = msg.get("type")
    if kind == "hand":
        try:
            x = float(msg.get("x", 0.0))
            y = float(msg.get("y", 0.0))
            z = float(msg.get("z", 0.0))
        except (TypeError, ValueError):
            return _error("hand coordinates must be numbers")
        inputs.set_hand(x, y, z, bool(msg.get("valid", True)))
        return None
    if kind == "trigger":
        pressed = msg.get("pressed")
        if not isinstance(pressed, bool):
            return _error("trigger.pressed must be a boolean")
        inputs.set_trigger(pressed)
        return None
    if kind == "control":
        action = msg.get("action")
        if action == "pause":
            inputs.paused = True
            return None
        if action == "start":
            inputs.paused = False
            return None
        if action == "mode":
            return _error("mode is fixed per connection; reconnect with "
                          "?scenario=game|demo|protocol")
        return _error(f"unknown control action {action!r}")
    return _error(f"unknown message type {kind!r}")


def build_app(config: GameConfig, scenario: str = "game",
              log_dir: str | Path | None = None,
              frontend_dir: str | Path | None = None) -> FastAPI:
    """FastAPI app with the /ws session endpoint; optionally serves the
    browser client statics."""
    app = FastAPI(title="hapticgaze service")
    counter = {"n": 0}

    @app.get("/healthz")
    def healthz() -> dict:
        return {"ok": True}

    @app.websocket("/ws")
    async def ws_session(ws: WebSocket) -> None:
        await ws.accept()
        chosen = ws.query_params.get("scenario", scenario)
        if chosen not in SCENARIOS:
            await ws.send_text(json.dumps(_error(f"unknown scenario {chosen!r}")))
            await ws.close()
            return
        await ws.send_text(json.dumps({
            "type": "hello", "version": PROTOCOL_VERSION,
            "scenario": chosen, "config": config.to_dict(),
        }, sort_keys=True))
        inputs = LiveInput()
        loop = asyncio.get_running_loop()
        outbox: asyncio.Queue[dict | None] = asyncio.Queue()

        def sink(msg: dict) -> None:
            loop.call_soon_threadsafe(outbox.put_nowait, msg)

        async def sender() -> None:
            while True:
                msg = await outbox.get()
                if msg is None:
                    return
                try:
                    await ws.send_text(json.dumps(msg, sort_keys=True))
                except Exception:
                    inputs.disconnected = True
                    return

        async def reader() -> None:
            while True:
                message = await ws.receive()
                if message["type"] == "websocket.disconnect":
                    inputs.disconnected = True
                    return
                raw = message.get("text")
                if raw is None:
                    reply = _error("binary frames are not part of this protocol")
                else:
                    reply = _apply_client_message(raw, inputs)
                if reply is not None:
                    sink(reply)

        log_path = None
        if log_dir is not None:
            counter["n"] += 1
            log_path = (Path(log_dir)
                        / f"live-{counter['n']:03d}-s{config.seed:016x}.log")
        session_job = asyncio.create_task(asyncio.to_thread(
            run_live_scenario, config, inputs, sink, chosen,
            log_path=log_path))
        reader_job = asyncio.create_task(reader())
        sender_job = asyncio.create_task(sender())
        try:
            await session_job
            await outbox.put(None)
            await sender_job
        finally:
            inputs.disconnected = True
            reader_job.cancel()
            sender_job.cancel()
            try:
                await ws.close()
            except Exception:
                pass

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True),
                  name="frontend")
    return app


def serve(config: GameConfig, host: str = "127.0.0.1", port: int = 8765,
          scenario: str = "game", log_dir: str | Path | None = None,
          frontend_dir: str | Path | None = None) -> None:
    """Run the session server until shutdown."""
    import uvicorn

    app = build_app(config, scenario=scenario, log_dir=log_dir,
                    frontend_dir=frontend_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")
