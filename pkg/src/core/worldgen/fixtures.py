"""Hand-authored floorplans shipped with the simulator.

Six environments form the seen (training) split and four the unseen
(evaluation-only) split. A few extra layouts exist for tests and smoke runs.
"""

from collections.abc import Callable

from src.core.models.geometry import (
    Bounds,
    CircleObstacle,
    GoalObject,
    PolygonObstacle,
    Segment,
)
from src.core.worldgen.environment import EnvironmentSpec

# Narrowest gap between two obstacles of the confined office.
OFFICE_MIN_CORRIDOR = 0.9


def _bounds(width: float, height: float) -> Bounds:
    return Bounds(xmin=0.0, ymin=0.0, xmax=width, ymax=height)


def _rect(x0: float, y0: float, x1: float, y1: float, category: str = "furniture") -> PolygonObstacle:
    return PolygonObstacle(
        vertices=[(x0, y0), (x1, y0), (x1, y1), (x0, y1)], category=category
    )


def _circle(x: float, y: float, radius: float, category: str = "furniture") -> CircleObstacle:
    return CircleObstacle(center=(x, y), radius=radius, category=category)


def _goal(x: float, y: float, category: str, instance_id: str, radius: float = 0.25) -> GoalObject:
    return GoalObject(position=(x, y), radius=radius, category=category, instance_id=instance_id)


def _wall(x0: float, y0: float, x1: float, y1: float) -> Segment:
    return Segment(start=(x0, y0), end=(x1, y1))


def living_room() -> EnvironmentSpec:
    return EnvironmentSpec(
        id="living_room",
        bounds=_bounds(10.0, 8.0),
        obstacles=[
            _rect(1.0, 5.5, 4.0, 6.5, "sofa"),
            _rect(1.8, 3.8, 3.2, 4.6, "table"),
            _circle(6.5, 6.5, 0.5, "armchair"),
            _rect(8.6, 0.5, 9.6, 3.0, "bookshelf"),
        ],
        goal_objects=[
            _goal(2.5, 7.3, "teddy_bear", "living_room/teddy_bear"),
            _goal(9.3, 7.3, "plant", "living_room/plant"),
            _goal(5.5, 2.0, "ball", "living_room/ball"),
        ],
    )


def kitchen() -> EnvironmentSpec:
    return EnvironmentSpec(
        id="kitchen",
        bounds=_bounds(9.0, 9.0),
        obstacles=[
            _rect(0.2, 8.2, 6.0, 8.8, "counter"),
            _rect(3.5, 3.5, 5.5, 5.0, "island"),
            _circle(7.0, 2.0, 0.7, "table"),
            _rect(0.2, 0.2, 1.0, 1.2, "fridge"),
        ],
        goal_objects=[
            _goal(7.2, 7.5, "bottle", "kitchen/bottle"),
            _goal(1.5, 5.0, "vase", "kitchen/vase"),
            _goal(3.0, 1.2, "backpack", "kitchen/backpack"),
        ],
    )


def office_open() -> EnvironmentSpec:
    return EnvironmentSpec(
        id="office_open",
        bounds=_bounds(12.0, 10.0),
        obstacles=[
            _rect(2.0, 2.0, 4.0, 3.0, "desk"),
            _rect(2.0, 5.0, 4.0, 6.0, "desk"),
            _rect(7.0, 2.0, 9.0, 3.0, "desk"),
            _rect(7.0, 5.0, 9.0, 6.0, "desk"),
            _circle(5.5, 8.0, 0.3, "pillar"),
            _circle(10.5, 8.0, 0.3, "pillar"),
        ],
        goal_objects=[
            _goal(3.0, 3.6, "laptop", "office_open/laptop"),
            _goal(8.0, 4.2, "chair", "office_open/chair"),
            _goal(1.0, 9.0, "plant", "office_open/plant"),
            _goal(11.0, 1.0, "backpack", "office_open/backpack"),
        ],
    )


def hallway_rooms() -> EnvironmentSpec:
    return EnvironmentSpec(
        id="hallway_rooms",
        bounds=_bounds(14.0, 8.0),
        walls=[
            _wall(0.0, 4.0, 5.0, 4.0),
            _wall(6.2, 4.0, 9.0, 4.0),
            _wall(10.2, 4.0, 14.0, 4.0),
        ],
        obstacles=[
            _circle(3.0, 6.0, 0.5, "table"),
            _rect(11.0, 1.0, 12.5, 2.0, "cabinet"),
            _circle(7.5, 2.0, 0.4, "stool"),
        ],
        goal_objects=[
            _goal(2.0, 1.5, "teddy_bear", "hallway_rooms/teddy_bear"),
            _goal(12.5, 6.5, "ball", "hallway_rooms/ball"),
            _goal(7.5, 6.8, "vase", "hallway_rooms/vase"),
        ],
    )


def pillar_hall() -> EnvironmentSpec:
    pillars = [
        _circle(x, y, 0.3, "pillar") for x in (3.0, 6.0, 9.0) for y in (3.0, 6.0, 9.0)
    ]
    return EnvironmentSpec(
        id="pillar_hall",
        bounds=_bounds(12.0, 12.0),
        obstacles=pillars,
        goal_objects=[
            _goal(1.5, 10.5, "chair", "pillar_hall/chair"),
            _goal(10.5, 1.5, "plant", "pillar_hall/plant"),
            _goal(6.0, 10.8, "bottle", "pillar_hall/bottle"),
            _goal(10.8, 6.0, "ball", "pillar_hall/ball"),
        ],
    )


def bedroom() -> EnvironmentSpec:
    return EnvironmentSpec(
        id="bedroom",
        bounds=_bounds(10.0, 9.0),
        obstacles=[
            _rect(6.0, 5.0, 9.5, 8.5, "bed"),
            _rect(0.2, 6.5, 1.2, 8.8, "wardrobe"),
            _rect(0.2, 0.2, 2.5, 1.0, "desk"),
            _circle(5.4, 8.2, 0.35, "nightstand"),
        ],
        goal_objects=[
            _goal(7.5, 4.3, "teddy_bear", "bedroom/teddy_bear"),
            _goal(3.5, 0.6, "backpack", "bedroom/backpack"),
            _goal(1.2, 1.5, "laptop", "bedroom/laptop"),
        ],
    )


def confined_office() -> EnvironmentSpec:
    columns = [(1.0, 2.6), (3.5, 5.1), (6.0, 7.6), (8.5, 10.1)]
    rows = [(1.5, 2.3), (3.2, 4.0), (6.0, 6.8)]
    desks = [_rect(x0, y0, x1, y1, "desk") for y0, y1 in rows for x0, x1 in columns]
    return EnvironmentSpec(
        id="confined_office",
        bounds=_bounds(12.0, 10.0),
        obstacles=desks,
        goal_objects=[
            _goal(1.8, 8.5, "laptop", "confined_office/laptop"),
            _goal(10.8, 5.0, "chair", "confined_office/chair"),
            _goal(4.3, 5.0, "plant", "confined_office/plant"),
            _goal(11.2, 0.6, "bottle", "confined_office/bottle"),
        ],
    )


def l_shaped_lounge() -> EnvironmentSpec:
    return EnvironmentSpec(
        id="l_shaped_lounge",
        bounds=_bounds(10.0, 10.0),
        obstacles=[
            _rect(5.5, 5.5, 9.9, 9.9, "closed_off"),
            _circle(2.5, 7.5, 0.5, "table"),
            _rect(7.0, 1.5, 8.5, 2.5, "sofa"),
        ],
        goal_objects=[
            _goal(1.0, 9.0, "vase", "l_shaped_lounge/vase"),
            _goal(9.0, 4.2, "ball", "l_shaped_lounge/ball"),
            _goal(4.2, 4.2, "teddy_bear", "l_shaped_lounge/teddy_bear"),
        ],
    )


def storage_room() -> EnvironmentSpec:
    return EnvironmentSpec(
        id="storage_room",
        bounds=_bounds(11.0, 9.0),
        obstacles=[
            _rect(1.5, 1.5, 2.1, 6.5, "shelf"),
            _rect(3.5, 2.5, 4.1, 7.5, "shelf"),
            _rect(5.5, 1.5, 6.1, 6.5, "shelf"),
            _rect(7.5, 2.5, 8.1, 7.5, "shelf"),
        ],
        goal_objects=[
            _goal(9.5, 8.0, "backpack", "storage_room/backpack"),
            _goal(2.8, 8.0, "bottle", "storage_room/bottle"),
            _goal(9.7, 1.0, "chair", "storage_room/chair"),
            _goal(4.8, 0.8, "plant", "storage_room/plant"),
        ],
    )


def studio() -> EnvironmentSpec:
    return EnvironmentSpec(
        id="studio",
        bounds=_bounds(13.0, 9.0),
        walls=[_wall(6.5, 0.0, 6.5, 5.5)],
        obstacles=[
            _rect(1.0, 1.0, 3.5, 2.0, "sofa"),
            _circle(3.5, 6.0, 0.6, "table"),
            _rect(9.0, 7.8, 12.5, 8.6, "counter"),
            _rect(9.0, 1.0, 12.0, 3.5, "bed"),
        ],
        goal_objects=[
            _goal(2.2, 2.6, "teddy_bear", "studio/teddy_bear"),
            _goal(11.5, 6.5, "vase", "studio/vase"),
            _goal(4.9, 6.0, "laptop", "studio/laptop"),
            _goal(8.0, 4.5, "ball", "studio/ball"),
        ],
    )


def empty_room() -> EnvironmentSpec:
    return EnvironmentSpec(
        id="empty_room",
        bounds=_bounds(10.0, 10.0),
        goal_objects=[_goal(7.0, 5.0, "ball", "empty_room/ball")],
    )


def corridor() -> EnvironmentSpec:
    return EnvironmentSpec(
        id="corridor",
        bounds=_bounds(12.0, 2.0),
        goal_objects=[_goal(11.0, 1.0, "plant", "corridor/plant")],
    )


SEEN_FIXTURES: dict[str, Callable[[], EnvironmentSpec]] = {
    "living_room": living_room,
    "kitchen": kitchen,
    "office_open": office_open,
    "hallway_rooms": hallway_rooms,
    "pillar_hall": pillar_hall,
    "bedroom": bedroom,
}

UNSEEN_FIXTURES: dict[str, Callable[[], EnvironmentSpec]] = {
    "confined_office": confined_office,
    "l_shaped_lounge": l_shaped_lounge,
    "storage_room": storage_room,
    "studio": studio,
}

EXTRA_FIXTURES: dict[str, Callable[[], EnvironmentSpec]] = {
    "empty_room": empty_room,
    "corridor": corridor,
}


def all_fixture_specs() -> list[EnvironmentSpec]:
    builders = {**SEEN_FIXTURES, **UNSEEN_FIXTURES, **EXTRA_FIXTURES}
    return [build() for build in builders.values()]
