import pytest

from hapticgaze.config import GameConfig
from hapticgaze.gaze import TrackerCalibration


@pytest.fixture
def config() -> GameConfig:
    return GameConfig(seed=7)


@pytest.fixture
def calib(config) -> TrackerCalibration:
    return TrackerCalibration(config.calib_x_min, config.calib_x_max,
                              config.calib_y_min, config.calib_y_max)
