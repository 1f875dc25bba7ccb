"""The back-mounted motor grid: pulsating cells mark entities in view,
one solid cell marks the gaze. Overlaps blend by per-cell maximum so the
solid gaze signature survives and intensities stay bounded.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import GameConfig
from .gaze import GazePoint, gaze_to_cell
from .geometry import clamp01, ray_to_uv, square_wave, uv_to_cell
from .world import VisibleEntity


@dataclass(frozen=True)
class MotorFrame:
    cols: int
    rows: int
    intensities: tuple[float, ...]   # row-major, cols * rows values in [0, 1]
    tick: int = 0

    def cell(self, col: int, row: int) -> float:
        return self.intensities[row * self.cols + col]


def project_to_grid(view: VisibleEntity, fov_h: float, fov_v: float,
                    cols: int, rows: int) -> tuple[int, int]:
    """Grid cell of an in-frustum entity, via the same floor/clamp rule as
    the gaze marker."""
    u, v = ray_to_uv(view.azimuth, view.elevation, fov_h, fov_v)
    return uv_to_cell(clamp01(u), clamp01(v), cols, rows)


def render_peripheral_frame(visible: list[VisibleEntity], gaze: GazePoint,
                            tick: int, config: GameConfig) -> MotorFrame:
    """One tick of the back display: entity cells carry the square-wave
    amplitude, the gaze cell a constant one, everything else is silent."""
    cols, rows = config.grid_cols, config.grid_rows
    cells = [0.0] * (cols * rows)
    if square_wave(tick, config.pulse_period):
        amp = config.entity_amplitude
        for view in visible:
            col, row = project_to_grid(view, config.fov_h, config.fov_v, cols, rows)
            idx = row * cols + col
            if amp > cells[idx]:
                cells[idx] = amp
    g_col, g_row = gaze_to_cell(gaze, cols, rows)
    g_idx = g_row * cols + g_col
    if config.gaze_amplitude > cells[g_idx]:
        cells[g_idx] = config.gaze_amplitude
    return MotorFrame(cols=cols, rows=rows, intensities=tuple(cells), tick=tick)


def quantize_frame(frame: MotorFrame) -> list[int]:
    """Row-major 8-bit intensities for the wire message."""
    return [round(x * 255) for x in frame.intensities]
