"""Shared angular math: view rays, grid cells, square waves.

Conventions used everywhere in the simulator:
  - azimuth in degrees relative to the avatar heading, negative = left
  - elevation in degrees, positive = up
  - normalized field-of-view coordinates (u, v) with u=0 at the left
    edge and v=0 at the top edge
"""

from __future__ import annotations

import math


def normalize_degrees(angle: float) -> float:
    """Wrap an angle into (-180, 180]."""
    a = math.fmod(angle, 360.0)
    if a > 180.0:
        a -= 360.0
    elif a <= -180.0:
        a += 360.0
    return a


def clamp01(x: float) -> float:
    if x < 0.0:
        return 0.0
    if x > 1.0:
        return 1.0
    return x


def uv_to_cell(u: float, v: float, cols: int, rows: int) -> tuple[int, int]:
    """Map normalized (u, v) to a grid cell by floor, clamping the far edges.

    This single function backs both the gaze marker and entity projection;
    the alignment between the two channels depends on them sharing it.
    """
    col = min(int(u * cols), cols - 1)
    row = min(int(v * rows), rows - 1)
    return max(col, 0), max(row, 0)


def ray_to_uv(azimuth: float, elevation: float, fov_h: float, fov_v: float) -> tuple[float, float]:
    """Inverse of uv_to_ray: angular offsets to normalized FOV coordinates."""
    return azimuth / fov_h + 0.5, 0.5 - elevation / fov_v


def uv_to_ray(u: float, v: float, fov_h: float, fov_v: float) -> tuple[float, float]:
    """Linear angular mapping from FOV coordinates to (azimuth, elevation)."""
    return (u - 0.5) * fov_h, (0.5 - v) * fov_v


def direction_vector(azimuth: float, elevation: float) -> tuple[float, float, float]:
    """Unit direction in the avatar frame (x forward, y right, z up)."""
    az = math.radians(azimuth)
    el = math.radians(elevation)
    ce = math.cos(el)
    return ce * math.cos(az), ce * math.sin(az), math.sin(el)


def angular_distance(az1: float, el1: float, az2: float, el2: float) -> float:
    """Great-circle angle in degrees between two (azimuth, elevation) rays."""
    x1, y1, z1 = direction_vector(az1, el1)
    x2, y2, z2 = direction_vector(az2, el2)
    dot = x1 * x2 + y1 * y2 + z1 * z2
    dot = max(-1.0, min(1.0, dot))
    return math.degrees(math.acos(dot))


def square_wave(tick: int, period: int) -> bool:
    """True during the on-half of a 50%-duty square wave of `period` ticks."""
    return (tick % period) < (period - period // 2)
