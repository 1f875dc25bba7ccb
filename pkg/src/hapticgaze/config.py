"""Game configuration: one flat dataclass holding every tunable default.

Precedence when assembling a config: built-in defaults < JSON config file
< environment variables (HAPTICGAZE_<FIELD>) < explicit overrides (CLI).
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any

ENV_PREFIX = "HAPTICGAZE_"


class ConfigError(ValueError):
    """Raised when a configuration violates its invariants."""


@dataclass(frozen=True)
class GameConfig:
    # World layout
    room_count: int = 10
    monster_total: int = 11
    barrel_total: int = 5
    room_size: float = 8.0           # rooms are room_size x room_size squares
    doorway_width: float = 2.0       # gap centered on the hallway axis
    wall_margin: float = 0.75        # entity placement clearance from walls

    # Clock and avatar
    tick_rate: int = 35              # ticks per second
    game_duration: int | None = None  # ticks; defaults to 90 s * tick_rate
    avatar_speed: float = 1.4        # auto-run, meters/second

    # Field of view and aiming
    fov_h: float = 90.0
    fov_v: float = 60.0
    foveal_radius: float = 3.0       # degrees half-angle: feel it = can hit it

    # Back display
    grid_cols: int = 8
    grid_rows: int = 4
    pulse_period: int = 14           # entity square-wave period, ticks
    entity_amplitude: float = 0.8
    gaze_amplitude: float = 1.0

    # Glove
    monster_pulse_period: int = 6    # ticks, 50% duty

    # Hand tracking
    calib_x_min: float = -150.0      # millimeters, tracker interaction plane
    calib_x_max: float = 150.0
    calib_y_min: float = 80.0
    calib_y_max: float = 380.0
    smoothing_alpha: float = 0.5     # per-tick EMA weight on the raw sample

    # Session protocol
    games_per_session: int = 7
    intro_ticks: int = 350           # gaze-only warmup, 10 s at 35 Hz
    demo_timeout_ticks: int = 1050   # demo room cap, 30 s at 35 Hz

    # Agents
    random_fire_prob: float = 0.02

    seed: int = 0

    def __post_init__(self) -> None:
        if self.game_duration is None:
            object.__setattr__(self, "game_duration", 90 * self.tick_rate)
        self.validate()

    def validate(self) -> None:
        if self.room_count < 1:
            raise ConfigError("room_count must be >= 1")
        if self.monster_total < 0 or self.barrel_total < 0:
            raise ConfigError("entity totals must be >= 0")
        if not (0.0 < self.fov_h <= 220.0):
            raise ConfigError("fov_h must be in (0, 220] degrees")
        if not (0.0 < self.fov_v <= 180.0):
            raise ConfigError("fov_v must be in (0, 180] degrees")
        if self.foveal_radius <= 0.0:
            raise ConfigError("foveal_radius must be > 0")
        if self.grid_cols < 1 or self.grid_rows < 1:
            raise ConfigError("grid dimensions must be >= 1")
        if self.tick_rate < 1:
            raise ConfigError("tick_rate must be >= 1")
        if self.avatar_speed < 0.0:
            raise ConfigError("avatar_speed must be >= 0")
        if self.calib_x_min >= self.calib_x_max or self.calib_y_min >= self.calib_y_max:
            raise ConfigError("calibration bounds must satisfy min < max")
        if not (0.0 < self.smoothing_alpha <= 1.0):
            raise ConfigError("smoothing_alpha must be in (0, 1]")
        if self.pulse_period < 2 or self.monster_pulse_period < 2:
            raise ConfigError("pulse periods must be >= 2 ticks")
        if self.wall_margin * 2 >= self.room_size:
            raise ConfigError("wall_margin too large for room_size")

    @property
    def hallway_length(self) -> float:
        return self.room_count * self.room_size

    def replace(self, **changes: Any) -> "GameConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "GameConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


def _coerce(name: str, raw: str) -> Any:
    """Parse an env/CLI string into the declared field type."""
    ftype = {f.name: f.type for f in fields(GameConfig)}[name]
    if "bool" in str(ftype):
        return raw.lower() in ("1", "true", "yes", "on")
    if "int" in str(ftype):
        return int(raw)
    if "float" in str(ftype):
        return float(raw)
    return raw


def load_config(
    path: str | Path | None = None,
    env: dict[str, str] | None = None,
    overrides: dict[str, Any] | None = None,
) -> GameConfig:
    """Assemble a GameConfig from file, environment, and explicit overrides."""
    data: dict[str, Any] = {}
    if path is not None:
        try:
            data.update(json.loads(Path(path).read_text()))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    env = os.environ if env is None else env
    known = {f.name for f in fields(GameConfig)}
    for key, raw in env.items():
        if key.startswith(ENV_PREFIX):
            name = key[len(ENV_PREFIX):].lower()
            if name in known:
                data[name] = _coerce(name, raw)
    if overrides:
        for name, value in overrides.items():
            if value is not None:
                data[name] = value
    return GameConfig.from_dict(data)
