"""Glove channel: foveation and the two fingertip patterns."""

import statistics

from hypothesis import given, settings
from hypothesis import strategies as st

from hapticgaze.config import GameConfig
from hapticgaze.gaze import GazePoint
from hapticgaze.glove import GlovePattern, foveate, quantize_glove, render_glove_frame
from hapticgaze.world import (
    Avatar,
    Entity,
    EntityKind,
    EventKind,
    VisibleEntity,
    WorldState,
    fire,
    visible_entities,
)

CENTER = GazePoint(0.5, 0.5)


def view(az, el=0.0, dist=5.0, id=0, kind=EntityKind.MONSTER):
    return VisibleEntity(entity_id=id, kind=kind, azimuth=az, elevation=el,
                         distance=dist)


class TestFoveate:
    def test_nothing_visible(self):
        assert foveate(CENTER, [], 90.0, 60.0, 3.0) is None

    def test_entity_on_the_ray(self):
        assert foveate(CENTER, [view(0.0)], 90.0, 60.0, 3.0) == (0, EntityKind.MONSTER)

    def test_just_outside_radius(self):
        # Angular-distance oracle at the boundary: elevation 0 on both rays,
        # so the great-circle angle equals the azimuth gap exactly.
        assert foveate(CENTER, [view(3.1)], 90.0, 60.0, 3.0) is None
        assert foveate(CENTER, [view(2.9)], 90.0, 60.0, 3.0) is not None

    def test_nearest_within_radius_wins(self):
        views = [view(1.0, dist=9.0, id=0, kind=EntityKind.BARREL),
                 view(-1.0, dist=4.0, id=1)]
        assert foveate(CENTER, views, 90.0, 60.0, 3.0) == (1, EntityKind.MONSTER)

    @given(r1=st.floats(0.5, 10.0), r2=st.floats(0.5, 10.0))
    @settings(max_examples=100)
    def test_radius_monotonicity(self, r1, r2):
        views = [view(2.0, dist=6.0, id=0), view(-4.0, dist=3.0, id=1)]
        lo, hi = sorted((r1, r2))
        at_lo = foveate(CENTER, views, 90.0, 60.0, lo)
        at_hi = foveate(CENTER, views, 90.0, 60.0, hi)
        if at_lo is not None:
            assert at_hi is not None
            lo_dist = next(v.distance for v in views if v.entity_id == at_lo[0])
            hi_dist = next(v.distance for v in views if v.entity_id == at_hi[0])
            assert hi_dist <= lo_dist

    def test_consistency_with_fire(self):
        # Same state, same gaze: the glove's pick equals the shot's victim.
        config = GameConfig(seed=3)
        entities = (
            Entity(0, EntityKind.BARREL, 7.0, 0.2, 0.0, 0),
            Entity(1, EntityKind.MONSTER, 5.0, -0.1, 0.0, 0),
            Entity(2, EntityKind.MONSTER, 3.0, 2.9, 0.0, 0),
        )
        avatar = Avatar(1.0, 0.0, 0.0, config.fov_h, config.fov_v, 0.0)
        world = WorldState(config=config, entities=entities, avatar=avatar)
        for u in (0.4, 0.5, 0.52, 0.6, 0.75):
            gaze = GazePoint(u, 0.5)
            felt = foveate(gaze, visible_entities(world), config.fov_h,
                           config.fov_v, config.foveal_radius)
            shot = fire(world, gaze)
            if felt is None:
                assert shot.kind is EventKind.MISSED
            else:
                assert shot.entity_id == felt[0]


class TestRenderGloveFrame:
    def test_no_target_is_silent(self, config):
        frame = render_glove_frame(None, 0, config)
        assert frame.fingertips == (0.0,) * 5
        assert frame.pattern is GlovePattern.NONE

    def test_barrel_steady_across_ticks(self, config):
        for tick in range(30):
            frame = render_glove_frame(EntityKind.BARREL, tick, config)
            assert frame.fingertips == (1.0,) * 5
            assert frame.pattern is GlovePattern.BARREL

    def test_monster_square_wave(self, config):
        # Period 6 at 50% duty: any 12-tick span holds exactly 6 ticks at
        # 1.0 and 6 at 0.0, in alternating half-period blocks.
        trace = [render_glove_frame(EntityKind.MONSTER, t, config).fingertips[0]
                 for t in range(12)]
        assert trace == [1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0]
        assert trace.count(1.0) == 6
        assert trace.count(0.0) == 6

    def test_all_fingertips_agree(self, config):
        for kind in (EntityKind.MONSTER, EntityKind.BARREL, None):
            for tick in range(14):
                frame = render_glove_frame(kind, tick, config)
                assert len(set(frame.fingertips)) == 1

    @given(start=st.integers(0, 200))
    def test_discriminability_over_any_window(self, start):
        # Variance of a fingertip over any monster_pulse_period-long window
        # is zero for barrels and positive for monsters.
        config = GameConfig()
        window = range(start, start + config.monster_pulse_period)
        monster = [render_glove_frame(EntityKind.MONSTER, t, config).fingertips[2]
                   for t in window]
        barrel = [render_glove_frame(EntityKind.BARREL, t, config).fingertips[2]
                  for t in window]
        assert statistics.pvariance(monster) > 0
        assert statistics.pvariance(barrel) == 0

    def test_quantized_wire_form(self, config):
        frame = render_glove_frame(EntityKind.BARREL, 3, config)
        assert quantize_glove(frame) == [255, 255, 255, 255, 255, 2]
        silent = render_glove_frame(None, 3, config)
        assert quantize_glove(silent) == [0, 0, 0, 0, 0, 0]
