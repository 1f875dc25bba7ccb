"""Two-channel haptic hallway game: a back-grid for peripheral awareness,
a fingertip glove for foveal identity, hand-position gazing, gaze-directed
firing, deterministic replay, and headless agents."""

from .config import ConfigError, GameConfig, load_config
from .gaze import GazePoint, HandSample, TrackerCalibration
from .session import SessionLog, TrialMetrics, run_protocol, run_scenario
from .world import (
    Avatar,
    Entity,
    EntityKind,
    GameEvent,
    Phase,
    VisibleEntity,
    WorldState,
    generate_demo_room,
    generate_level,
    step,
)

__version__ = "0.1.0"

__all__ = [
    "Avatar",
    "ConfigError",
    "Entity",
    "EntityKind",
    "GameConfig",
    "GameEvent",
    "GazePoint",
    "HandSample",
    "Phase",
    "SessionLog",
    "TrackerCalibration",
    "TrialMetrics",
    "VisibleEntity",
    "WorldState",
    "__version__",
    "generate_demo_room",
    "generate_level",
    "load_config",
    "run_protocol",
    "run_scenario",
    "step",
]
