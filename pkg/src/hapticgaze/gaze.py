"""Hand tracking to gaze: raw tracker samples become a smoothed, clamped
point on the avatar's field of view.

Only x and y of the hand drive the gaze; depth toward the sensor is
ignored. Non-finite coordinates are treated as a lost hand, and a lost
hand holds the last fresh value so the gaze never jumps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import clamp01, uv_to_cell, uv_to_ray

#: Gaze at the center of the field of view, used before any sample arrives.
CENTER_U = 0.5
CENTER_V = 0.5


@dataclass(frozen=True)
class HandSample:
    x: float                 # millimeters in tracker space
    y: float
    z: float
    valid: bool = True       # hand detected
    trigger: bool = False    # glove button state
    timestamp_tick: int = 0


@dataclass(frozen=True)
class TrackerCalibration:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self) -> None:
        if self.x_min >= self.x_max or self.y_min >= self.y_max:
            raise ValueError("calibration bounds must satisfy min < max")


@dataclass(frozen=True)
class GazePoint:
    u: float                 # 0 = left edge of FOV
    v: float                 # 0 = top edge
    fresh: bool = True       # False when the hand was lost and the value held


def rest_gaze() -> GazePoint:
    return GazePoint(CENTER_U, CENTER_V, fresh=False)


def map_hand_to_gaze(
    sample: HandSample,
    calib: TrackerCalibration,
    previous: GazePoint | None,
    alpha: float = 0.5,
) -> GazePoint:
    """Project a hand sample onto the FOV plane, clamp, then smooth.

    Valid sample: normalize x and y over the calibration plane (y grows
    upward in tracker space, so v is inverted), clamp to [0, 1], then blend
    alpha * raw + (1 - alpha) * previous. With no previous gaze the raw
    value is used unsmoothed. Invalid sample: hold `previous`, flagged
    stale.
    """
    usable = sample.valid and math.isfinite(sample.x) and math.isfinite(sample.y)
    if not usable:
        held = previous if previous is not None else rest_gaze()
        return GazePoint(held.u, held.v, fresh=False)
    u_raw = clamp01((sample.x - calib.x_min) / (calib.x_max - calib.x_min))
    v_raw = clamp01(1.0 - (sample.y - calib.y_min) / (calib.y_max - calib.y_min))
    if previous is None:
        return GazePoint(u_raw, v_raw, fresh=True)
    u = alpha * u_raw + (1.0 - alpha) * previous.u
    v = alpha * v_raw + (1.0 - alpha) * previous.v
    return GazePoint(clamp01(u), clamp01(v), fresh=True)


def gaze_to_cell(gaze: GazePoint, cols: int, rows: int) -> tuple[int, int]:
    """Back-display cell under the gaze marker."""
    return uv_to_cell(gaze.u, gaze.v, cols, rows)


def gaze_to_view_ray(gaze: GazePoint, fov_h: float, fov_v: float) -> tuple[float, float]:
    """(azimuth, elevation) of the gaze in degrees, linear over the FOV."""
    return uv_to_ray(gaze.u, gaze.v, fov_h, fov_v)


def hand_for_uv(u: float, v: float, calib: TrackerCalibration) -> tuple[float, float]:
    """Tracker-space (x, y) whose raw mapping is exactly (u, v).

    Inverse of the projection above; used by agents to place their hand.
    """
    x = calib.x_min + u * (calib.x_max - calib.x_min)
    y = calib.y_min + (1.0 - v) * (calib.y_max - calib.y_min)
    return x, y
