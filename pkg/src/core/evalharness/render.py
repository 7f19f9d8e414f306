"""Top-view SVG of an environment with a trajectory overlaid.

Drawing happens in world coordinates inside a y-flipped group, so the
``points`` of the ``path`` polyline are the logged (x, y) positions.
"""

from pathlib import Path
from xml.sax.saxutils import quoteattr

from src.core.models.dynamics import Terminal
from src.core.models.geometry import CircleObstacle, PolygonObstacle
from src.core.rollouts.episode import Trajectory
from src.core.worldgen.environment import Environment

_MARKER_RADIUS = 0.12
_SCALE = 50.0  # pixels per meter


class RenderError(Exception):
    def __init__(self, path: str | Path, reason: str):
        super().__init__(f"Could not write render '{path}': {reason}")


def _num(value: float) -> str:
    return repr(float(value))


def _circle(cx: float, cy: float, r: float, css: str, fill: str, stroke: str = "none") -> str:
    return (
        f'<circle class="{css}" cx="{_num(cx)}" cy="{_num(cy)}" r="{_num(r)}" '
        f'fill="{fill}" stroke="{stroke}" stroke-width="0.03"/>'
    )


def svg_document(env: Environment, trajectory: Trajectory) -> str:
    b = env.bounds
    goal_ids = set()
    if trajectory.scenario is not None:
        goal_ids = {g.instance_id for g in env.goals_matching(trajectory.scenario.goal)}

    parts = [
        f'<rect class="bounds" x="{_num(b.xmin)}" y="{_num(b.ymin)}" '
        f'width="{_num(b.width)}" height="{_num(b.height)}" fill="white" stroke="black" '
        'stroke-width="0.05"/>'
    ]
    for wall in env.walls:
        parts.append(
            f'<line class="wall" x1="{_num(wall.start[0])}" y1="{_num(wall.start[1])}" '
            f'x2="{_num(wall.end[0])}" y2="{_num(wall.end[1])}" stroke="black" stroke-width="0.05"/>'
        )
    for obstacle in env.obstacles:
        if isinstance(obstacle, PolygonObstacle):
            points = " ".join(f"{_num(x)},{_num(y)}" for x, y in obstacle.vertices)
            parts.append(f'<polygon class="obstacle" points="{points}" fill="#999999"/>')
        elif isinstance(obstacle, CircleObstacle):
            parts.append(_circle(*obstacle.center, obstacle.radius, "obstacle", "#999999"))
    for goal in env.goal_objects:
        if goal.instance_id in goal_ids:
            parts.append(_circle(*goal.position, goal.radius, "goal", "#2ca02c"))
        else:
            parts.append(_circle(*goal.position, goal.radius, "object", "#cccccc"))

    poses = trajectory.poses
    if len(poses) > 1:
        points = " ".join(f"{_num(p.x)},{_num(p.y)}" for p in poses)
        parts.append(
            f'<polyline class="path" points="{points}" fill="none" stroke="#1f77b4" '
            'stroke-width="0.04"/>'
        )
    if poses:
        parts.append(_circle(poses[0].x, poses[0].y, _MARKER_RADIUS, "start", "red"))
        parts.append(_circle(poses[-1].x, poses[-1].y, _MARKER_RADIUS, "end", "blue"))
        if trajectory.terminal == Terminal.COLLISION:
            end = poses[-1]
            parts.append(
                _circle(end.x, end.y, 2 * _MARKER_RADIUS, "collision", "none", stroke="black")
            )

    title = trajectory.scenario.id if trajectory.scenario is not None else env.id
    width, height = b.width * _SCALE, b.height * _SCALE
    return "\n".join(
        [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:g}" height="{height:g}" '
            f'viewBox="{_num(b.xmin)} {_num(-b.ymax)} {_num(b.width)} {_num(b.height)}">',
            f"<title>{quoteattr(title)[1:-1]}</title>",
            '<g transform="scale(1,-1)">',
            *parts,
            "</g>",
            "</svg>",
            "",
        ]
    )


def render_trajectory(env: Environment, trajectory: Trajectory, path: str | Path) -> Path:
    if trajectory.scenario is not None and trajectory.scenario.env_id != env.id:
        raise RenderError(path, f"trajectory belongs to '{trajectory.scenario.env_id}'")
    path = Path(path)
    try:
        path.write_text(svg_document(env, trajectory))
    except OSError as e:
        raise RenderError(path, str(e)) from e
    return path
