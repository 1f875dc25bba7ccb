"""Study protocol runner, metrics, and deterministic replayable logs.

A session is: a gaze-only intro exercise, the demo room, then a fixed
number of scored hallway games with seeds derived from the session seed.
Everything a session consumes (seeds, per-tick hand samples) is recorded,
and re-simulating from the record reproduces the exact event stream,
metrics, and bytes.
"""

from __future__ import annotations

import hashlib
import json
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .agents import AgentObservation, Driver, DriverDisconnected
from .config import GameConfig
from .display import MotorFrame, render_peripheral_frame
from .gaze import GazePoint, HandSample, TrackerCalibration, map_hand_to_gaze
from .glove import GloveFrame, foveate, render_glove_frame
from .world import (
    EventKind,
    GameEvent,
    GameOverReason,
    Phase,
    WorldState,
    compute_score,
    generate_demo_room,
    generate_level,
    step,
    visible_entities,
)

LOG_FORMAT = "hapticgaze-log"
LOG_VERSION = 1

AUDIO_EXPLOSION = "ExplosionAudio"
AUDIO_WIN = "WinAudio"
AUDIO_MUSIC = "MusicStart"

PHASE_INTRO = "intro"
PHASE_DEMO = "demo"
PHASE_GAME = "game"


class MalformedLogError(ValueError):
    """A log or event list that cannot be finalized or replayed."""


@dataclass(frozen=True)
class TrialMetrics:
    """Per-game outcome measures.

    mistake_ratio is barrels over monsters; with zero monsters killed it is
    undefined and recorded as None, excluded from aggregation.
    """
    game_index: int
    monsters_killed: int
    barrels_hit: int
    misses: int
    shots: int
    score: int
    accuracy: float
    mistake_ratio: float | None

    @classmethod
    def from_counts(cls, game_index: int, monsters_killed: int,
                    barrels_hit: int, misses: int) -> "TrialMetrics":
        shots = monsters_killed + barrels_hit + misses
        hits = monsters_killed + barrels_hit
        return cls(
            game_index=game_index,
            monsters_killed=monsters_killed,
            barrels_hit=barrels_hit,
            misses=misses,
            shots=shots,
            score=compute_score(monsters_killed, barrels_hit),
            accuracy=hits / shots if shots else 0.0,
            mistake_ratio=(barrels_hit / monsters_killed
                           if monsters_killed else None),
        )


def finalize_game(events: list[GameEvent], game_index: int = 0) -> TrialMetrics:
    """Count a finished game's events into TrialMetrics."""
    if not events or events[-1].kind is not EventKind.GAME_OVER:
        raise MalformedLogError("game events do not end with GameOver")
    kinds = [e.kind for e in events]
    return TrialMetrics.from_counts(
        game_index=game_index,
        monsters_killed=kinds.count(EventKind.MONSTER_KILLED),
        barrels_hit=kinds.count(EventKind.BARREL_HIT),
        misses=kinds.count(EventKind.MISSED),
    )


def derive_game_seed(session_seed: int, game_index: int) -> int:
    """Stable per-game seed: first 8 big-endian bytes of
    blake2b("game:<session_seed>:<game_index>")."""
    digest = hashlib.blake2b(f"game:{session_seed}:{game_index}".encode(),
                             digest_size=8).digest()
    return int.from_bytes(digest, "big")


@dataclass
class PhaseRecord:
    name: str
    game_index: int
    seed: int | None
    inputs: list[HandSample] = field(default_factory=list)
    events: list[GameEvent] = field(default_factory=list)
    audio: list[tuple[int, str]] = field(default_factory=list)
    metrics: TrialMetrics | None = None


@dataclass
class SessionLog:
    session_id: str
    config: GameConfig
    participant: str
    phases: list[PhaseRecord] = field(default_factory=list)
    truncated: bool = False

    @property
    def games(self) -> list[PhaseRecord]:
        return [p for p in self.phases if p.name == PHASE_GAME]

    @property
    def metrics(self) -> list[TrialMetrics]:
        return [p.metrics for p in self.games if p.metrics is not None]


class TickPipeline:
    """One phase's per-tick machinery: hand sample in; smoothed gaze, world
    step, both haptic frames, and audio cues out."""

    def __init__(self, config: GameConfig, world: WorldState):
        self.config = config
        self.world = world
        self.gaze: GazePoint | None = None
        self.calib = TrackerCalibration(config.calib_x_min, config.calib_x_max,
                                        config.calib_y_min, config.calib_y_max)

    def advance(self, sample: HandSample) -> "TickResult":
        config = self.config
        self.gaze = map_hand_to_gaze(sample, self.calib, self.gaze,
                                     config.smoothing_alpha)
        self.world, events = step(self.world, sample.trigger, self.gaze)
        visible = visible_entities(self.world)
        motor = render_peripheral_frame(visible, self.gaze, self.world.tick, config)
        target = foveate(self.gaze, visible, config.fov_h, config.fov_v,
                         config.foveal_radius)
        glove = render_glove_frame(target[1] if target else None,
                                   self.world.tick, config)
        audio = []
        for event in events:
            if event.kind is EventKind.MONSTER_KILLED:
                audio.append(AUDIO_WIN)
            elif event.kind is EventKind.BARREL_HIT:
                audio.append(AUDIO_EXPLOSION)
        return TickResult(
            tick=self.world.tick, gaze=self.gaze, events=events, audio=audio,
            motor=motor, glove=glove,
            done=self.world.phase is Phase.FINISHED,
        )


@dataclass(frozen=True)
class TickResult:
    tick: int
    gaze: GazePoint
    events: list[GameEvent]
    audio: list[str]
    motor: MotorFrame
    glove: GloveFrame
    done: bool


def _observe(driver: Driver, result: TickResult, world: WorldState | None) -> None:
    driver.observe_frames(AgentObservation(motor_frame=result.motor,
                                           glove_frame=result.glove,
                                           tick=result.tick))
    if world is not None:
        driver.observe_world(world)
    if result.events or result.audio:
        driver.observe_events(result.events, result.audio, result.tick)


def _run_intro(config: GameConfig, driver: Driver, record: PhaseRecord) -> None:
    """Gaze tracking only: no entities, no shots, fixed duration."""
    calib = TrackerCalibration(config.calib_x_min, config.calib_x_max,
                               config.calib_y_min, config.calib_y_max)
    gaze: GazePoint | None = None
    for tick in range(1, config.intro_ticks + 1):
        sample = driver.next_sample(tick)
        record.inputs.append(sample)
        gaze = map_hand_to_gaze(sample, calib, gaze, config.smoothing_alpha)
        motor = render_peripheral_frame([], gaze, tick, config)
        glove = render_glove_frame(None, tick, config)
        driver.observe_frames(AgentObservation(motor, glove, tick))


def _run_demo(config: GameConfig, driver: Driver, record: PhaseRecord) -> None:
    """Demo room until the driver reports done or the timeout lapses."""
    pipeline = TickPipeline(config, generate_demo_room(config))
    for tick in range(1, config.demo_timeout_ticks + 1):
        sample = driver.next_sample(tick)
        record.inputs.append(sample)
        result = pipeline.advance(sample)
        record.events.extend(result.events)
        record.audio.extend((result.tick, cue) for cue in result.audio)
        _observe(driver, result, pipeline.world)
        if result.done or driver.demo_done():
            break


def _run_game(config: GameConfig, driver: Driver, record: PhaseRecord) -> None:
    game_config = config.replace(seed=record.seed)
    pipeline = TickPipeline(config, generate_level(game_config))
    record.audio.append((0, AUDIO_MUSIC))
    while True:
        sample = driver.next_sample(pipeline.world.tick + 1)
        record.inputs.append(sample)
        result = pipeline.advance(sample)
        record.events.extend(result.events)
        record.audio.extend((result.tick, cue) for cue in result.audio)
        _observe(driver, result, pipeline.world)
        if result.done:
            break
    record.metrics = finalize_game(record.events, record.game_index)


SCENARIOS = ("protocol", "game", "demo")


def _scenario_plan(config: GameConfig, scenario: str, games: int) -> list[PhaseRecord]:
    if scenario == "demo":
        return [PhaseRecord(name=PHASE_DEMO, game_index=0, seed=None)]
    game_phases = [PhaseRecord(name=PHASE_GAME, game_index=i,
                               seed=derive_game_seed(config.seed, i))
                   for i in range(1, games + 1)]
    if scenario == "game":
        return game_phases[:1]
    if scenario == "protocol":
        return [PhaseRecord(name=PHASE_INTRO, game_index=0, seed=None),
                PhaseRecord(name=PHASE_DEMO, game_index=0, seed=None),
                *game_phases]
    raise ValueError(f"unknown scenario {scenario!r}; choose from {SCENARIOS}")


def run_scenario(config: GameConfig, driver: Driver, scenario: str,
                 participant: str = "agent", games: int | None = None) -> SessionLog:
    """Run one scenario (full protocol, single game, or demo room).

    A driver disconnect truncates the session; the partial log is returned
    with its truncation marker set.
    """
    games = config.games_per_session if games is None else games
    log = SessionLog(session_id=f"s{config.seed:016x}", config=config,
                     participant=participant)
    try:
        for record in _scenario_plan(config, scenario, games):
            driver.begin_phase(record.name, record.game_index)
            log.phases.append(record)
            if record.name == PHASE_INTRO:
                _run_intro(config, driver, record)
            elif record.name == PHASE_DEMO:
                _run_demo(config, driver, record)
            else:
                _run_game(config, driver, record)
            driver.end_phase(record)
    except DriverDisconnected:
        log.truncated = True
    return log


def run_protocol(config: GameConfig, driver: Driver, participant: str = "agent",
                 games: int | None = None) -> SessionLog:
    """The full study protocol: intro exercise, demo room, then the scored
    games with per-game derived seeds."""
    return run_scenario(config, driver, "protocol", participant, games)


# -- replay -----------------------------------------------------------------


class _TraceDriver(Driver):
    """Feeds a recorded input trace back through the pipeline."""

    def __init__(self, inputs: list[HandSample]):
        self._inputs = inputs
        self._i = 0

    def next_sample(self, tick: int) -> HandSample:
        if self._i >= len(self._inputs):
            raise DriverDisconnected("input trace exhausted")
        sample = self._inputs[self._i]
        self._i += 1
        return sample


def replay_phase(config: GameConfig, original: PhaseRecord) -> PhaseRecord:
    """Re-simulate one recorded phase from its input trace."""
    record = PhaseRecord(name=original.name, game_index=original.game_index,
                         seed=original.seed)
    driver = _TraceDriver(list(original.inputs))
    if original.name == PHASE_INTRO:
        record.inputs = list(original.inputs)
        return record
    try:
        if original.name == PHASE_DEMO:
            _run_demo(config, driver, record)
        else:
            _run_game(config, driver, record)
    except DriverDisconnected:
        pass
    return record


def verify_replay(log: SessionLog) -> list[str]:
    """Re-simulate every phase of a log; list every divergence found."""
    problems: list[str] = []
    for original in log.phases:
        if original.name == PHASE_INTRO:
            continue
        redone = replay_phase(log.config, original)
        label = (f"game {original.game_index}" if original.name == PHASE_GAME
                 else original.name)
        if [_event_record(e) for e in redone.events] != \
                [_event_record(e) for e in original.events]:
            problems.append(f"{label}: event stream diverged")
        if redone.audio != original.audio:
            problems.append(f"{label}: audio cues diverged")
        if original.name == PHASE_GAME and redone.metrics != original.metrics:
            problems.append(f"{label}: metrics diverged")
    return problems


# -- aggregation ------------------------------------------------------------


@dataclass(frozen=True)
class GameAggregate:
    """Across-session mean and sample deviation per game index; the
    quantities one would plot over the 7 trials."""
    game_index: int
    sessions: int
    score_mean: float
    score_sd: float
    misses_mean: float
    misses_sd: float
    barrels_mean: float
    barrels_sd: float
    accuracy_mean: float
    accuracy_sd: float
    mistake_ratio_mean: float | None
    mistake_ratio_sd: float | None
    mistake_ratio_n: int


def _mean_sd(values: list[float]) -> tuple[float, float]:
    if not values:
        return 0.0, 0.0
    mean = statistics.fmean(values)
    sd = statistics.stdev(values) if len(values) > 1 else 0.0
    return mean, sd


def aggregate(logs: list[SessionLog]) -> list[GameAggregate]:
    """Per-game-index summary across sessions. Undefined mistake ratios are
    excluded from that metric's mean."""
    if not logs:
        raise ValueError("aggregate needs at least one session log")
    by_index: dict[int, list[TrialMetrics]] = {}
    for log in logs:
        for metrics in log.metrics:
            by_index.setdefault(metrics.game_index, []).append(metrics)
    out = []
    for game_index in sorted(by_index):
        rows = by_index[game_index]
        score = _mean_sd([float(m.score) for m in rows])
        misses = _mean_sd([float(m.misses) for m in rows])
        barrels = _mean_sd([float(m.barrels_hit) for m in rows])
        accuracy = _mean_sd([m.accuracy for m in rows])
        ratios = [m.mistake_ratio for m in rows if m.mistake_ratio is not None]
        ratio_mean, ratio_sd = _mean_sd(ratios)
        out.append(GameAggregate(
            game_index=game_index, sessions=len(rows),
            score_mean=score[0], score_sd=score[1],
            misses_mean=misses[0], misses_sd=misses[1],
            barrels_mean=barrels[0], barrels_sd=barrels[1],
            accuracy_mean=accuracy[0], accuracy_sd=accuracy[1],
            mistake_ratio_mean=ratio_mean if ratios else None,
            mistake_ratio_sd=ratio_sd if ratios else None,
            mistake_ratio_n=len(ratios),
        ))
    return out


# -- log serialization --------------------------------------------------------


def _dumps(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def _event_record(event: GameEvent) -> dict:
    record: dict = {"kind": event.kind.value, "tick": event.tick}
    if event.entity_id is not None:
        record["entity"] = event.entity_id
    if event.gaze is not None:
        record["u"], record["v"] = event.gaze
    if event.reason is not None:
        record["reason"] = event.reason.value
    return record


def _metrics_record(metrics: TrialMetrics) -> dict:
    return {
        "game": metrics.game_index,
        "monsters_killed": metrics.monsters_killed,
        "barrels_hit": metrics.barrels_hit,
        "misses": metrics.misses,
        "shots": metrics.shots,
        "score": metrics.score,
        "accuracy": metrics.accuracy,
        "mistake_ratio": metrics.mistake_ratio,
    }


def log_to_lines(log: SessionLog) -> list[str]:
    """Line-delimited records: versioned header, then per-tick inputs and
    per-event lines in order, then an end marker."""
    lines = [_dumps({
        "format": LOG_FORMAT, "version": LOG_VERSION,
        "session_id": log.session_id, "participant": log.participant,
        "config": log.config.to_dict(),
    })]
    for phase in log.phases:
        head = {"t": "phase", "name": phase.name}
        if phase.name == PHASE_GAME:
            head["game"] = phase.game_index
            head["seed"] = phase.seed
        lines.append(_dumps(head))
        # Interleave chronologically: events of a tick right after that
        # tick's input, audio after the events it derives from.
        by_tick: dict[int, list[dict]] = {}
        for event in phase.events:
            by_tick.setdefault(event.tick, []).append(
                {"t": "ev", **_event_record(event)})
        for tick, cue in phase.audio:
            by_tick.setdefault(tick, []).append(
                {"t": "audio", "tick": tick, "cue": cue})
        lines.extend(_dumps(r) for r in by_tick.get(0, []))
        for i, sample in enumerate(phase.inputs):
            tick = i + 1
            lines.append(_dumps({
                "t": "in", "tick": tick, "x": sample.x, "y": sample.y,
                "z": sample.z, "valid": sample.valid, "trig": sample.trigger,
            }))
            lines.extend(_dumps(r) for r in by_tick.get(tick, []))
        if phase.metrics is not None:
            lines.append(_dumps({"t": "metrics", **_metrics_record(phase.metrics)}))
    lines.append(_dumps({"t": "end", "truncated": log.truncated}))
    return lines


def write_log(log: SessionLog, path: str | Path) -> None:
    Path(path).write_text("\n".join(log_to_lines(log)) + "\n")


def _event_from_record(record: dict) -> GameEvent:
    gaze = None
    if "u" in record:
        gaze = (record["u"], record["v"])
    return GameEvent(
        tick=record["tick"],
        kind=EventKind(record["kind"]),
        entity_id=record.get("entity"),
        gaze=gaze,
        reason=GameOverReason(record["reason"]) if "reason" in record else None,
    )


def parse_log(text: str) -> SessionLog:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise MalformedLogError("empty log")
    header = json.loads(lines[0])
    if header.get("format") != LOG_FORMAT:
        raise MalformedLogError("not a session log")
    if header.get("version") != LOG_VERSION:
        raise MalformedLogError(f"unsupported log version {header.get('version')}")
    log = SessionLog(
        session_id=header["session_id"],
        config=GameConfig.from_dict(header["config"]),
        participant=header["participant"],
    )
    phase: PhaseRecord | None = None
    for line in lines[1:]:
        record = json.loads(line)
        t = record["t"]
        if t not in ("phase", "end") and phase is None:
            raise MalformedLogError(f"{t!r} record before any phase")
        if t == "phase":
            phase = PhaseRecord(name=record["name"],
                                game_index=record.get("game", 0),
                                seed=record.get("seed"))
            log.phases.append(phase)
        elif t == "in":
            phase.inputs.append(HandSample(
                x=record["x"], y=record["y"], z=record["z"],
                valid=record["valid"], trigger=record["trig"],
                timestamp_tick=record["tick"]))
        elif t == "ev":
            phase.events.append(_event_from_record(record))
        elif t == "audio":
            phase.audio.append((record["tick"], record["cue"]))
        elif t == "metrics":
            phase.metrics = TrialMetrics(
                game_index=record["game"],
                monsters_killed=record["monsters_killed"],
                barrels_hit=record["barrels_hit"],
                misses=record["misses"],
                shots=record["shots"],
                score=record["score"],
                accuracy=record["accuracy"],
                mistake_ratio=record["mistake_ratio"],
            )
        elif t == "end":
            log.truncated = record["truncated"]
        else:
            raise MalformedLogError(f"unknown record type {t!r}")
    return log


def read_log(path: str | Path) -> SessionLog:
    return parse_log(Path(path).read_text())


# -- CSV export ---------------------------------------------------------------


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


METRICS_CSV_HEADER = ("session_id,participant,game_index,seed,monsters_killed,"
                      "barrels_hit,misses,shots,score,accuracy,mistake_ratio")


def metrics_csv(logs: Iterable[SessionLog]) -> str:
    """One row per scored game across the given sessions; byte-stable."""
    rows = [METRICS_CSV_HEADER]
    for log in logs:
        for game in log.games:
            m = game.metrics
            if m is None:
                continue
            rows.append(",".join(_csv_cell(v) for v in (
                log.session_id, log.participant, m.game_index, game.seed,
                m.monsters_killed, m.barrels_hit, m.misses, m.shots, m.score,
                m.accuracy, m.mistake_ratio)))
    return "\n".join(rows) + "\n"


AGGREGATE_CSV_HEADER = ("game_index,sessions,score_mean,score_sd,misses_mean,"
                        "misses_sd,barrels_mean,barrels_sd,accuracy_mean,"
                        "accuracy_sd,mistake_ratio_mean,mistake_ratio_sd,"
                        "mistake_ratio_n")


def aggregate_csv(aggregates: list[GameAggregate]) -> str:
    rows = [AGGREGATE_CSV_HEADER]
    for a in aggregates:
        rows.append(",".join(_csv_cell(v) for v in (
            a.game_index, a.sessions, a.score_mean, a.score_sd, a.misses_mean,
            a.misses_sd, a.barrels_mean, a.barrels_sd, a.accuracy_mean,
            a.accuracy_sd, a.mistake_ratio_mean, a.mistake_ratio_sd,
            a.mistake_ratio_n)))
    return "\n".join(rows) + "\n"
