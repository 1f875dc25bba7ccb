"""Headless drivers that close the perception-action loop.

Three policies with three levels of sight:
  - OracleDriver sees the full world state (verification upper bound),
  - HapticDriver perceives nothing but motor and glove frames (the
    information-sufficiency proof),
  - RandomDriver flails (floor baseline).

The haptic agent's interface is AgentObservation, which carries no world
state at all; its behavior is a pure function of the frame history.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace

from .config import GameConfig
from .display import MotorFrame
from .gaze import (
    GazePoint,
    HandSample,
    TrackerCalibration,
    hand_for_uv,
    map_hand_to_gaze,
)
from .geometry import clamp01, ray_to_uv, uv_to_cell, uv_to_ray
from .glove import GloveFrame
from .world import (
    EntityKind,
    WorldState,
    advance_avatar,
    select_target,
    visible_entities,
)

HAND_Z_MM = 150.0


@dataclass(frozen=True)
class AgentObservation:
    """Everything a haptic-only player gets: the two frames and the clock."""
    motor_frame: MotorFrame
    glove_frame: GloveFrame
    tick: int


class DriverDisconnected(Exception):
    """An input source went away mid-session; the log is truncated."""


class Driver:
    """Input source for the session loop. Subclasses override what they use."""

    def begin_phase(self, phase: str, game_index: int = 0) -> None:
        pass

    def next_sample(self, tick: int) -> HandSample:
        return HandSample(0.0, 0.0, HAND_Z_MM, valid=False, timestamp_tick=tick)

    def observe_frames(self, obs: AgentObservation) -> None:
        pass

    def observe_world(self, world: WorldState) -> None:
        pass

    def observe_events(self, events: list, audio: list[str], tick: int) -> None:
        pass

    def end_phase(self, record) -> None:
        pass

    def demo_done(self) -> bool:
        return False


def _calibration(config: GameConfig) -> TrackerCalibration:
    return TrackerCalibration(config.calib_x_min, config.calib_x_max,
                              config.calib_y_min, config.calib_y_max)


class StillDriver(Driver):
    """Holds the hand at the volume center and never fires."""

    def __init__(self, config: GameConfig):
        self._calib = _calibration(config)

    def next_sample(self, tick: int) -> HandSample:
        x, y = hand_for_uv(0.5, 0.5, self._calib)
        return HandSample(x, y, HAND_Z_MM, timestamp_tick=tick)


class RandomDriver(Driver):
    """Uniform random hand positions, trigger with probability p per tick.

    Back-to-back trigger ticks are suppressed so every press is an edge.
    """

    def __init__(self, config: GameConfig, fire_prob: float | None = None):
        self._config = config
        self._calib = _calibration(config)
        self._p = config.random_fire_prob if fire_prob is None else fire_prob
        self._rng = random.Random(config.seed)
        self._held = False

    def begin_phase(self, phase: str, game_index: int = 0) -> None:
        self._rng = random.Random((self._config.seed, phase, game_index).__repr__())
        self._held = False

    def next_sample(self, tick: int) -> HandSample:
        rng = self._rng
        x = rng.uniform(self._calib.x_min, self._calib.x_max)
        y = rng.uniform(self._calib.y_min, self._calib.y_max)
        trigger = (not self._held) and rng.random() < self._p
        self._held = trigger
        return HandSample(x, y, HAND_Z_MM, trigger=trigger, timestamp_tick=tick)


class OracleDriver(Driver):
    """Full-state upper bound: snaps the gaze onto the nearest killable
    monster and fires exactly when the resulting shot is predicted to kill
    it. Never fires at barrels; one press per monster."""

    def __init__(self, config: GameConfig):
        self._config = config
        self._calib = _calibration(config)
        self._world: WorldState | None = None
        self._gaze: GazePoint | None = None
        self._held = False

    def begin_phase(self, phase: str, game_index: int = 0) -> None:
        self._world = None
        self._gaze = None
        self._held = False

    def observe_world(self, world: WorldState) -> None:
        self._world = world

    def demo_done(self) -> bool:
        if self._world is None:
            return False
        return not any(e.alive and e.kind is EntityKind.MONSTER
                       for e in self._world.entities)

    def _emit(self, hand_u: float, hand_v: float, trigger: bool, tick: int) -> HandSample:
        x, y = hand_for_uv(hand_u, hand_v, self._calib)
        sample = HandSample(x, y, HAND_Z_MM, trigger=trigger, timestamp_tick=tick)
        # Mirror the session's exact smoothing so the aim never drifts.
        self._gaze = map_hand_to_gaze(sample, self._calib, self._gaze,
                                      self._config.smoothing_alpha)
        self._held = trigger
        return sample

    def next_sample(self, tick: int) -> HandSample:
        config = self._config
        world = self._world
        if world is None:
            return self._emit(0.5, 0.5, False, tick)
        # The shot resolves after the avatar advances, so aim at the
        # entity's bearing from the avatar's next position.
        predicted = replace(world, avatar=advance_avatar(world.avatar, config))
        visible = visible_entities(predicted)
        monsters = [v for v in visible if v.kind is EntityKind.MONSTER]
        if not monsters:
            return self._emit(0.5, 0.5, False, tick)
        alpha = config.smoothing_alpha
        for target in monsters:
            u_des, v_des = ray_to_uv(target.azimuth, target.elevation,
                                     config.fov_h, config.fov_v)
            if self._gaze is None:
                hand_u, hand_v = clamp01(u_des), clamp01(v_des)
            else:
                hand_u = clamp01((u_des - (1.0 - alpha) * self._gaze.u) / alpha)
                hand_v = clamp01((v_des - (1.0 - alpha) * self._gaze.v) / alpha)
            x, y = hand_for_uv(hand_u, hand_v, self._calib)
            probe = HandSample(x, y, HAND_Z_MM, timestamp_tick=tick)
            gaze_after = map_hand_to_gaze(probe, self._calib, self._gaze, alpha)
            ray = uv_to_ray(gaze_after.u, gaze_after.v, config.fov_h, config.fov_v)
            hit = select_target(visible, ray[0], ray[1], config.foveal_radius)
            if hit is not None and hit.kind is EntityKind.MONSTER and not self._held:
                return self._emit(hand_u, hand_v, True, tick)
            if target is monsters[0] and (hit is None or hit.kind is EntityKind.MONSTER):
                # Keep converging on the nearest monster when no shot is
                # ready; try farther monsters only when a barrel blocks it.
                return self._emit(hand_u, hand_v, False, tick)
        return self._emit(hand_u, hand_v, False, tick)


# Haptic policy modes
_SEEK, _ALIGN, _SCAN, _CLASSIFY, _COOLDOWN = range(5)


@dataclass
class HapticMemory:
    """Bounded agent state: per-cell pulse bookkeeping over the last pulse
    period plus the scan state machine. No world-state fields."""
    last_zero: list[int] = field(default_factory=list)
    last_mid: list[int] = field(default_factory=list)
    scan_cooldown: list[int] = field(default_factory=list)
    gaze: GazePoint | None = None
    hand_u: float = 0.5
    hand_v: float = 0.5
    mode: int = _SEEK
    target_cell: int = -1
    scan_line: int = 0
    scan_u: float = 0.0
    contact_ones: int = 0
    contact_zeros: int = 0
    contact_gap: bool = False
    cooldown: int = 0
    barrel_marks: list[tuple[float, float, int]] = field(default_factory=list)


class HapticPolicy:
    """The paper strategy, made mechanical: feel the pulsating cells, feel
    the solid gaze cell, move the hand to join them, then sweep inside the
    cell until the glove speaks; fire only on the pulsing fingertip pattern.

    Classification uses the fingertip intensity trace alone (within one
    contact episode, silence between two active ticks can only be a pulse
    gap, and a half-period of unbroken activity can only be the steady
    pattern); the GloveFrame.pattern tag is display metadata the agent
    deliberately ignores.
    """

    SCAN_STEP_DEG = 1.5
    SCAN_LINES = (0.0, 1.0 / 3.0, 2.0 / 3.0)

    def __init__(self, config: GameConfig):
        self._config = config
        self._calib = _calibration(config)
        self._cells = config.grid_cols * config.grid_rows
        self._scan_step = self.SCAN_STEP_DEG / config.fov_h
        mark = 1.2 * config.foveal_radius / config.fov_h
        self._mark_halfwidth = mark
        self._mark_ttl = config.pulse_period
        self._cell_cooldown_ticks = config.pulse_period

    def reset(self) -> HapticMemory:
        n = self._cells
        return HapticMemory(
            last_zero=[-10**9] * n,
            last_mid=[-10**9] * n,
            scan_cooldown=[-10**9] * n,
        )

    # -- perception ---------------------------------------------------

    def _ingest_motor(self, mem: HapticMemory, frame: MotorFrame, tick: int) -> None:
        # A cell is pulsating iff it showed both silence and a sub-solid
        # level within the last pulse period; the solid gaze cell never
        # shows a sub-solid level, an overlapped cell reads solid.
        solid = self._config.gaze_amplitude
        for i, val in enumerate(frame.intensities):
            if val == 0.0:
                mem.last_zero[i] = tick
            elif val < solid:
                mem.last_mid[i] = tick

    def _candidate_cells(self, mem: HapticMemory, tick: int) -> list[int]:
        window = self._config.pulse_period
        return [i for i in range(self._cells)
                if tick - mem.last_zero[i] <= window
                and tick - mem.last_mid[i] <= window
                and tick - mem.scan_cooldown[i] > self._cell_cooldown_ticks]

    def _cell_of_gaze(self, mem: HapticMemory) -> int:
        g = mem.gaze
        u, v = (g.u, g.v) if g is not None else (0.5, 0.5)
        col, row = uv_to_cell(u, v, self._config.grid_cols, self._config.grid_rows)
        return row * self._config.grid_cols + col

    # -- actuation helpers ---------------------------------------------

    def _hold_at_gaze(self, mem: HapticMemory) -> None:
        if mem.gaze is not None:
            mem.hand_u, mem.hand_v = mem.gaze.u, mem.gaze.v

    def _cell_center(self, cell: int) -> tuple[float, float]:
        cols, rows = self._config.grid_cols, self._config.grid_rows
        col, row = cell % cols, cell // cols
        return (col + 0.5) / cols, (row + 0.5) / rows

    def _in_barrel_mark(self, mem: HapticMemory, u: float, tick: int) -> bool:
        return any(lo <= u <= hi and tick <= expiry
                   for lo, hi, expiry in mem.barrel_marks)

    # -- the policy ----------------------------------------------------

    def step(self, obs: AgentObservation, mem: HapticMemory) -> HandSample:
        config = self._config
        tick = obs.tick
        self._ingest_motor(mem, obs.motor_frame, tick)
        glove_on = max(obs.glove_frame.fingertips) > 0.5
        trigger = False
        pm = config.monster_pulse_period

        if mem.mode == _CLASSIFY:
            if glove_on:
                if mem.contact_gap:
                    # Active, silent, active again within one episode: only
                    # the pulsing pattern does that. Fire where we feel it.
                    trigger = True
                    mem.mode = _COOLDOWN
                    mem.cooldown = 2
                else:
                    mem.contact_ones += 1
                    mem.contact_zeros = 0
                    if mem.contact_ones >= pm:
                        # A solid half-period with no gap: steady pattern.
                        u = mem.gaze.u if mem.gaze else mem.hand_u
                        mem.barrel_marks.append(
                            (u - self._mark_halfwidth, u + self._mark_halfwidth,
                             tick + self._mark_ttl))
                        mem.barrel_marks = [m for m in mem.barrel_marks
                                            if m[2] >= tick][-8:]
                        self._mark_scanned(mem, tick)
                        mem.mode = _SEEK
            else:
                mem.contact_zeros += 1
                if mem.contact_ones > 0:
                    mem.contact_gap = True
                if mem.contact_zeros >= pm:
                    # Contact lost; resume the sweep, or re-seek if contact
                    # came before any scan target existed.
                    mem.mode = _SCAN if mem.target_cell >= 0 else _SEEK
            self._hold_at_gaze(mem)
        elif glove_on:
            mem.mode = _CLASSIFY
            mem.contact_ones = 1
            mem.contact_zeros = 0
            mem.contact_gap = False
            self._hold_at_gaze(mem)

        if mem.mode == _COOLDOWN and not trigger:
            mem.cooldown -= 1
            self._hold_at_gaze(mem)
            if mem.cooldown <= 0:
                self._mark_scanned(mem, tick)
                mem.mode = _SEEK

        if mem.mode == _SEEK:
            candidates = self._candidate_cells(mem, tick)
            if candidates:
                here = self._cell_of_gaze(mem)
                cols = config.grid_cols
                mem.target_cell = min(
                    candidates,
                    key=lambda c: (abs(c % cols - here % cols)
                                   + abs(c // cols - here // cols), c))
                mem.mode = _ALIGN
            else:
                mem.hand_u, mem.hand_v = 0.5, 0.5

        if mem.mode == _ALIGN:
            center_u, center_v = self._cell_center(mem.target_cell)
            mem.hand_u, mem.hand_v = center_u, center_v
            g = mem.gaze
            if g is not None and self._cell_of_gaze(mem) == mem.target_cell \
                    and abs(g.u - center_u) < 0.3 / config.grid_cols \
                    and abs(g.v - center_v) < 0.3 / config.grid_rows:
                mem.mode = _SCAN
                mem.scan_line = 0
                mem.scan_u = (mem.target_cell % config.grid_cols) / config.grid_cols

        if mem.mode == _SCAN and not glove_on:
            cols, rows = config.grid_cols, config.grid_rows
            col, row = mem.target_cell % cols, mem.target_cell // cols
            u_end = (col + 1) / cols
            u = mem.scan_u + self._scan_step
            while self._in_barrel_mark(mem, u, tick) and u <= u_end:
                u += self._scan_step
            if u > u_end:
                mem.scan_line += 1
                if mem.scan_line >= len(self.SCAN_LINES):
                    self._mark_scanned(mem, tick)
                    mem.mode = _SEEK
                    mem.hand_u, mem.hand_v = 0.5, 0.5
                else:
                    u = col / cols
            if mem.mode == _SCAN:
                mem.scan_u = u
                mem.hand_u = u
                mem.hand_v = (row + self.SCAN_LINES[mem.scan_line]) / rows

        x, y = hand_for_uv(clamp01(mem.hand_u), clamp01(mem.hand_v), self._calib)
        sample = HandSample(x, y, HAND_Z_MM, trigger=trigger, timestamp_tick=tick)
        mem.gaze = map_hand_to_gaze(sample, self._calib, mem.gaze,
                                    config.smoothing_alpha)
        return sample

    def _mark_scanned(self, mem: HapticMemory, tick: int) -> None:
        if 0 <= mem.target_cell < self._cells:
            mem.scan_cooldown[mem.target_cell] = tick


def haptic_agent(obs: AgentObservation, memory: HapticMemory,
                 policy: HapticPolicy) -> tuple[HandSample, HapticMemory]:
    """Functional form of the haptic policy: (observation, memory) in,
    (action, memory) out. Nothing else reaches the agent."""
    sample = policy.step(obs, memory)
    return sample, memory


class HapticDriver(Driver):
    """Session adapter for the haptic policy. Only observe_frames feeds it;
    observe_world stays the base no-op, so world state cannot leak in."""

    def __init__(self, config: GameConfig):
        self._policy = HapticPolicy(config)
        self._memory = self._policy.reset()
        self._last_obs: AgentObservation | None = None
        self._config = config

    def begin_phase(self, phase: str, game_index: int = 0) -> None:
        self._memory = self._policy.reset()
        self._last_obs = None

    def observe_frames(self, obs: AgentObservation) -> None:
        self._last_obs = obs

    def next_sample(self, tick: int) -> HandSample:
        if self._last_obs is None:
            x, y = hand_for_uv(0.5, 0.5, _calibration(self._config))
            sample = HandSample(x, y, HAND_Z_MM, timestamp_tick=tick)
            self._memory.gaze = map_hand_to_gaze(
                sample, _calibration(self._config), self._memory.gaze,
                self._config.smoothing_alpha)
            return sample
        sample, self._memory = haptic_agent(self._last_obs, self._memory,
                                            self._policy)
        return HandSample(sample.x, sample.y, sample.z, sample.valid,
                          sample.trigger, tick)


AGENT_NAMES = ("oracle", "haptic", "random", "still")


def make_driver(name: str, config: GameConfig) -> Driver:
    """CLI-facing agent registry."""
    if name == "oracle":
        return OracleDriver(config)
    if name == "haptic":
        return HapticDriver(config)
    if name == "random":
        return RandomDriver(config)
    if name == "still":
        return StillDriver(config)
    raise ValueError(f"unknown agent {name!r}; choose from {AGENT_NAMES}")
