"""The foveal channel: what the gaze covers, rendered as fingertip
vibration patterns. Monsters pulse fast on all five fingertips, barrels
hold a steady vibration, so the two are separable from the intensity
trace alone.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .config import GameConfig
from .gaze import GazePoint, gaze_to_view_ray
from .geometry import square_wave
from .world import EntityKind, VisibleEntity, select_target

FINGERTIPS = 5


class GlovePattern(enum.Enum):
    NONE = 0
    MONSTER = 1
    BARREL = 2


@dataclass(frozen=True)
class GloveFrame:
    fingertips: tuple[float, ...]    # thumb..pinky intensities in [0, 1]
    pattern: GlovePattern
    tick: int = 0


def foveate(gaze: GazePoint, visible: list[VisibleEntity], fov_h: float,
            fov_v: float, foveal_radius: float) -> tuple[int, EntityKind] | None:
    """Entity under the gaze: nearest visible entity within the foveal
    radius of the gaze ray, or None. Uses the exact selection rule the
    firing path uses, so what you feel is what you would hit."""
    azimuth, elevation = gaze_to_view_ray(gaze, fov_h, fov_v)
    target = select_target(visible, azimuth, elevation, foveal_radius)
    if target is None:
        return None
    return target.entity_id, target.kind


def render_glove_frame(target: EntityKind | None, tick: int,
                       config: GameConfig) -> GloveFrame:
    """One tick of the glove. Monster: all fingertips pulse together at the
    fast period. Barrel: constant full intensity. Nothing: silence."""
    if target is None:
        return GloveFrame(fingertips=(0.0,) * FINGERTIPS,
                          pattern=GlovePattern.NONE, tick=tick)
    if target is EntityKind.BARREL:
        return GloveFrame(fingertips=(1.0,) * FINGERTIPS,
                          pattern=GlovePattern.BARREL, tick=tick)
    level = 1.0 if square_wave(tick, config.monster_pulse_period) else 0.0
    return GloveFrame(fingertips=(level,) * FINGERTIPS,
                      pattern=GlovePattern.MONSTER, tick=tick)


def quantize_glove(frame: GloveFrame) -> list[int]:
    """5 quantized fingertip bytes plus 1 pattern byte for the wire."""
    return [round(x * 255) for x in frame.fingertips] + [frame.pattern.value]
