"""The hallway game: level generation, tick loop, visibility, firing, score.

The world is a straight corridor of square rooms joined by doorways on the
hallway axis. The avatar auto-runs down the axis; the player only gazes and
fires. All functions here are pure: step(state, input) -> (state, events).
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass, replace

from .config import GameConfig
from .gaze import GazePoint
from .geometry import angular_distance, normalize_degrees, uv_to_ray


class EntityKind(enum.Enum):
    MONSTER = "Monster"
    BARREL = "Barrel"


class Phase(enum.Enum):
    RUNNING = "Running"
    FINISHED = "Finished"


class EventKind(enum.Enum):
    SHOT_FIRED = "ShotFired"
    MONSTER_KILLED = "MonsterKilled"
    BARREL_HIT = "BarrelHit"
    MISSED = "Missed"
    GAME_OVER = "GameOver"


class GameOverReason(enum.Enum):
    TIMEOUT = "Timeout"
    COURSE_COMPLETE = "CourseComplete"


@dataclass(frozen=True)
class Entity:
    id: int
    kind: EntityKind
    x: float
    y: float
    z: float            # base height; generated levels put everything at eye level
    room_index: int
    alive: bool = True


@dataclass(frozen=True)
class Avatar:
    x: float
    y: float
    heading: float      # yaw degrees, 0 = down the hallway axis
    fov_h: float
    fov_v: float
    speed: float        # meters/second, auto-run


@dataclass(frozen=True)
class VisibleEntity:
    entity_id: int
    kind: EntityKind
    azimuth: float      # degrees, negative = left
    elevation: float    # degrees, positive = up
    distance: float     # meters


@dataclass(frozen=True)
class GameEvent:
    tick: int
    kind: EventKind
    entity_id: int | None = None
    gaze: tuple[float, float] | None = None
    reason: GameOverReason | None = None


@dataclass(frozen=True)
class WorldState:
    config: GameConfig
    entities: tuple[Entity, ...]
    avatar: Avatar
    tick: int = 0
    rng_state: int = 0          # the seed the level was built from
    phase: Phase = Phase.RUNNING
    trigger_held: bool = False  # last consumed trigger state, for edge detection


def _room_bounds(config: GameConfig, room_index: int) -> tuple[float, float, float, float]:
    """(x_lo, x_hi, y_lo, y_hi) of a room; rooms tile the x axis."""
    s = config.room_size
    return room_index * s, (room_index + 1) * s, -s / 2.0, s / 2.0


def room_of(config: GameConfig, x: float) -> int:
    """Room index for an x coordinate, clamped to the corridor."""
    idx = int(x // config.room_size)
    return max(0, min(idx, config.room_count - 1))


def _assign_rooms(rng: random.Random, total: int, room_count: int) -> list[int]:
    """Pick a room per entity, denser toward the far end of the corridor.

    Rooms are drawn with weight (index + 1); any surplus beyond total // 2
    in the front half is moved to a weighted rear room so the rear half
    never holds fewer entities than the front half.
    """
    weights = [i + 1 for i in range(room_count)]
    rooms = rng.choices(range(room_count), weights=weights, k=total)
    front = room_count // 2
    if front == 0:
        return rooms
    rear_rooms = list(range(front, room_count))
    rear_weights = weights[front:]
    front_positions = [i for i, r in enumerate(rooms) if r < front]
    excess = len(front_positions) - total // 2
    for _ in range(max(0, excess)):
        pos = front_positions.pop(rng.randrange(len(front_positions)))
        rooms[pos] = rng.choices(rear_rooms, weights=rear_weights, k=1)[0]
    return rooms


def _place_in_room(rng: random.Random, config: GameConfig, room_index: int) -> tuple[float, float]:
    x_lo, x_hi, y_lo, y_hi = _room_bounds(config, room_index)
    m = config.wall_margin
    return rng.uniform(x_lo + m, x_hi - m), rng.uniform(y_lo + m, y_hi - m)


def _start_avatar(config: GameConfig, speed: float) -> Avatar:
    return Avatar(
        x=1.0, y=0.0, heading=0.0,
        fov_h=config.fov_h, fov_v=config.fov_v, speed=speed,
    )


def generate_level(config: GameConfig) -> WorldState:
    """Build the scored hallway: monsters and barrels spread over the rooms,
    denser toward the end, identical output for identical seed.

    Raises ConfigError for an invalid config (room counts, totals, bounds
    are all re-validated here since configs can arrive from files)."""
    config.validate()
    rng = random.Random(config.seed)
    entities: list[Entity] = []
    next_id = 0
    for kind, total in ((EntityKind.MONSTER, config.monster_total),
                        (EntityKind.BARREL, config.barrel_total)):
        for room_index in _assign_rooms(rng, total, config.room_count):
            x, y = _place_in_room(rng, config, room_index)
            entities.append(Entity(id=next_id, kind=kind, x=x, y=y, z=0.0,
                                   room_index=room_index))
            next_id += 1
    return WorldState(
        config=config,
        entities=tuple(entities),
        avatar=_start_avatar(config, config.avatar_speed),
        rng_state=config.seed,
    )


def generate_demo_room(config: GameConfig) -> WorldState:
    """Single-room training scene: one monster and one barrel flanking the
    initial view, avatar stationary. Seed parity picks which side is which."""
    config.validate()
    demo = config.replace(room_count=1, monster_total=1, barrel_total=1)
    avatar = _start_avatar(demo, speed=0.0)
    flank_azimuth = 20.0
    distance = 4.0
    dy = distance * math.sin(math.radians(flank_azimuth))
    dx = distance * math.cos(math.radians(flank_azimuth))
    monster_left = config.seed % 2 == 0
    monster_y = avatar.y + dy if monster_left else avatar.y - dy   # +y is left
    entities = (
        Entity(id=0, kind=EntityKind.MONSTER, x=avatar.x + dx, y=monster_y,
               z=0.0, room_index=0),
        Entity(id=1, kind=EntityKind.BARREL, x=avatar.x + dx, y=-monster_y,
               z=0.0, room_index=0),
    )
    return WorldState(config=demo, entities=entities, avatar=avatar,
                      rng_state=config.seed)


def _segment_blocked(config: GameConfig, ax: float, ay: float,
                     ex: float, ey: float, room_a: int, room_b: int) -> bool:
    """Occlusion rule: blocked when the segment crosses the solid part of a
    divider wall belonging to a room neither endpoint occupies. Dividers
    between adjacent occupied rooms never block; doorway gaps never block."""
    lo, hi = min(room_a, room_b), max(room_a, room_b)
    if hi - lo <= 1:
        return False
    half_gap = config.doorway_width / 2.0
    s = config.room_size
    dx = ex - ax
    for k in range(lo + 1, hi + 1):
        wall_x = k * s
        # Divider k separates rooms k-1 and k; with hi - lo >= 2 at least one
        # of them is unoccupied, so every divider in range qualifies.
        t = (wall_x - ax) / dx
        if t <= 0.0 or t >= 1.0:
            continue
        y_cross = ay + t * (ey - ay)
        if abs(y_cross) > half_gap:
            return True
    return False


def entity_view(avatar: Avatar, entity: Entity) -> VisibleEntity:
    """Angular position of an entity relative to the avatar, frustum aside."""
    dx = entity.x - avatar.x
    dy = entity.y - avatar.y
    horizontal = math.hypot(dx, dy)
    bearing = math.degrees(math.atan2(dy, dx))
    azimuth = -normalize_degrees(bearing - avatar.heading)  # +y is left
    elevation = math.degrees(math.atan2(entity.z, horizontal)) if horizontal > 0 else 0.0
    distance = math.hypot(horizontal, entity.z)
    return VisibleEntity(entity.id, entity.kind, azimuth, elevation, distance)


def visible_entities(world: WorldState) -> list[VisibleEntity]:
    """Alive entities inside the frustum that pass the occlusion rule,
    nearest first."""
    config = world.config
    avatar = world.avatar
    half_h = avatar.fov_h / 2.0
    half_v = avatar.fov_v / 2.0
    avatar_room = room_of(config, avatar.x)
    ax, ay, heading = avatar.x, avatar.y, avatar.heading
    out: list[VisibleEntity] = []
    # Same math as entity_view, inlined so rejected entities cost no
    # allocation; this loop runs every tick of every game.
    for entity in world.entities:
        if not entity.alive:
            continue
        dx = entity.x - ax
        dy = entity.y - ay
        horizontal = math.hypot(dx, dy)
        distance = math.hypot(horizontal, entity.z)
        if distance <= 0.0:
            continue
        azimuth = -normalize_degrees(math.degrees(math.atan2(dy, dx)) - heading)
        if azimuth < -half_h or azimuth > half_h:
            continue
        elevation = math.degrees(math.atan2(entity.z, horizontal)) if horizontal > 0.0 else 0.0
        if elevation < -half_v or elevation > half_v:
            continue
        gap = entity.room_index - avatar_room
        if (gap > 1 or gap < -1) and _segment_blocked(
                config, ax, ay, entity.x, entity.y, avatar_room, entity.room_index):
            continue
        out.append(VisibleEntity(entity.id, entity.kind, azimuth, elevation,
                                 distance))
    out.sort(key=lambda v: (v.distance, v.entity_id))
    return out


def select_target(visible: list[VisibleEntity], ray_azimuth: float,
                  ray_elevation: float, foveal_radius: float) -> VisibleEntity | None:
    """Nearest visible entity within the foveal radius of a view ray.

    Shared by the glove (what you feel) and by fire (what you hit), so the
    two channels can never disagree. Ties break toward the lower entity id.
    """
    best: VisibleEntity | None = None
    for view in visible:
        if angular_distance(ray_azimuth, ray_elevation,
                            view.azimuth, view.elevation) <= foveal_radius:
            if best is None or (view.distance, view.entity_id) < (best.distance, best.entity_id):
                best = view
    return best


def fire(world: WorldState, gaze: GazePoint) -> GameEvent:
    """Resolve one shot along the gaze ray. Does not mutate the world;
    `step` applies the kill."""
    azimuth, elevation = uv_to_ray(gaze.u, gaze.v, world.avatar.fov_h, world.avatar.fov_v)
    target = select_target(visible_entities(world), azimuth, elevation,
                           world.config.foveal_radius)
    if target is None:
        return GameEvent(tick=world.tick, kind=EventKind.MISSED)
    if target.kind is EntityKind.MONSTER:
        return GameEvent(tick=world.tick, kind=EventKind.MONSTER_KILLED,
                         entity_id=target.entity_id)
    return GameEvent(tick=world.tick, kind=EventKind.BARREL_HIT,
                     entity_id=target.entity_id)


def _kill(entities: tuple[Entity, ...], entity_id: int) -> tuple[Entity, ...]:
    return tuple(replace(e, alive=False) if e.id == entity_id else e
                 for e in entities)


def advance_avatar(avatar: Avatar, config: GameConfig) -> Avatar:
    """One tick of auto-run along the heading."""
    if avatar.speed <= 0.0:
        return avatar
    step_len = avatar.speed / config.tick_rate
    heading = math.radians(avatar.heading)
    return Avatar(avatar.x + step_len * math.cos(heading),
                  avatar.y + step_len * math.sin(heading),
                  avatar.heading, avatar.fov_h, avatar.fov_v, avatar.speed)


def step(world: WorldState, trigger: bool, gaze: GazePoint) -> tuple[WorldState, list[GameEvent]]:
    """Advance one tick: auto-run, resolve an edge-triggered shot, check end.

    Stepping a finished world is an explicit no-op with no events.
    """
    if world.phase is Phase.FINISHED:
        return world, []
    config = world.config
    tick = world.tick + 1
    avatar = advance_avatar(world.avatar, config)
    entities = world.entities
    events: list[GameEvent] = []
    if trigger and not world.trigger_held:
        events.append(GameEvent(tick=tick, kind=EventKind.SHOT_FIRED,
                                gaze=(gaze.u, gaze.v)))
        moved = WorldState(config, entities, avatar, tick, world.rng_state,
                           Phase.RUNNING, trigger)
        result = replace(fire(moved, gaze), tick=tick)
        events.append(result)
        if result.entity_id is not None:
            entities = _kill(entities, result.entity_id)
    phase = Phase.RUNNING
    if tick >= config.game_duration:
        events.append(GameEvent(tick=tick, kind=EventKind.GAME_OVER,
                                reason=GameOverReason.TIMEOUT))
        phase = Phase.FINISHED
    elif avatar.x > config.hallway_length:
        events.append(GameEvent(tick=tick, kind=EventKind.GAME_OVER,
                                reason=GameOverReason.COURSE_COMPLETE))
        phase = Phase.FINISHED
    return WorldState(config, entities, avatar, tick, world.rng_state,
                      phase, trigger), events


def compute_score(monsters_killed: int, barrels_hit: int) -> int:
    """Score a finished game: monsters killed minus barrels hit."""
    if monsters_killed < 0 or barrels_hit < 0:
        raise ValueError("kill counts must be non-negative")
    return monsters_killed - barrels_hit
