"""Trajectory logs: newline-delimited JSON.

The first record is a header, then one record per step, then an end record.
Observations are stored as base64 of ``ObservationStack.to_bytes()`` unless
elided.
"""

import base64
import json
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, ValidationError

from src.constants import TRAJECTORY_FORMAT
from src.core.models.dynamics import Terminal
from src.core.models.geometry import Pose
from src.core.models.perception import ObservationStack
from src.core.models.scenario import Scenario
from src.core.rollouts.dense import DenseTrajectory
from src.core.rollouts.episode import Trajectory, TrajectoryStep


class TrajectoryFormatError(Exception):
    def __init__(self, path: str | Path, line: int, reason: str):
        super().__init__(f"Trajectory log '{path}' line {line}: {reason}")


class HeaderRecord(BaseModel):
    type: Literal["header"] = "header"
    format: str = TRAJECTORY_FORMAT
    scenario: Scenario | None = None
    grid_size: int | None = None
    observations: bool = True
    dense: bool = False


class StepRecord(BaseModel):
    type: Literal["step"] = "step"
    t: int
    pose: list[float] | None = None
    action: int
    reward: float
    reward_parts: list[float] | None = None
    observation: str | None = None
    q_targets: list[float] | None = None
    q_mask: list[bool] | None = None


class EndRecord(BaseModel):
    type: Literal["end"] = "end"
    length: int
    terminal: Terminal
    success: bool
    final_pose: list[float] | None = None


def write_trajectory(
    path: str | Path,
    trajectory: Trajectory | DenseTrajectory,
    include_observations: bool = True,
) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    dense = trajectory if isinstance(trajectory, DenseTrajectory) else None
    base = dense.base if dense is not None else trajectory

    grid_size = None
    for s in base.steps:
        if s.observation is not None:
            grid_size = s.observation.n
            break
    keep = include_observations and grid_size is not None
    records: list[BaseModel] = [
        HeaderRecord(
            scenario=base.scenario,
            grid_size=grid_size,
            observations=keep,
            dense=dense is not None,
        )
    ]
    for t, s in enumerate(base.steps):
        record = StepRecord(
            t=t,
            pose=s.pose.as_list() if s.pose is not None else None,
            action=s.action,
            reward=s.reward,
            reward_parts=list(s.reward_parts) if s.reward_parts is not None else None,
        )
        if keep and s.observation is not None:
            record.observation = base64.b64encode(s.observation.to_bytes()).decode("ascii")
        if dense is not None:
            record.q_targets = [float(v) for v in dense.q_targets[t]]
            record.q_mask = [bool(v) for v in dense.q_mask[t]]
        records.append(record)
    records.append(
        EndRecord(
            length=len(base),
            terminal=base.terminal,
            success=base.success,
            final_pose=base.final_pose.as_list() if base.final_pose is not None else None,
        )
    )
    with open(path, "w") as f:
        for record in records:
            f.write(record.model_dump_json(exclude_none=True) + "\n")


def read_trajectory(path: str | Path) -> Trajectory | DenseTrajectory:
    """Parse a log written by ``write_trajectory``."""
    path = Path(path)
    lines = [line for line in path.read_text().splitlines() if line.strip()]
    if not lines:
        raise TrajectoryFormatError(path, 1, "empty file")
    try:
        header = HeaderRecord.model_validate_json(lines[0])
    except ValidationError as e:
        raise TrajectoryFormatError(path, 1, f"bad header ({e})") from e
    if header.format != TRAJECTORY_FORMAT:
        raise TrajectoryFormatError(path, 1, f"unsupported format '{header.format}'")

    steps: list[TrajectoryStep] = []
    targets: list[list[float]] = []
    masks: list[list[bool]] = []
    end: EndRecord | None = None
    for number, line in enumerate(lines[1:], start=2):
        try:
            kind = json.loads(line).get("type")
            if kind == "step":
                record = StepRecord.model_validate_json(line)
            elif kind == "end":
                end = EndRecord.model_validate_json(line)
                break
            else:
                raise TrajectoryFormatError(path, number, f"unknown record type '{kind}'")
        except (json.JSONDecodeError, ValidationError) as e:
            raise TrajectoryFormatError(path, number, str(e)) from e
        observation = None
        if record.observation is not None and header.grid_size is not None:
            observation = ObservationStack.from_bytes(
                base64.b64decode(record.observation), header.grid_size
            )
        steps.append(
            TrajectoryStep(
                pose=Pose.from_list(record.pose) if record.pose is not None else None,
                observation=observation,
                action=record.action,
                reward=record.reward,
                reward_parts=tuple(record.reward_parts) if record.reward_parts else None,
            )
        )
        if header.dense:
            targets.append(record.q_targets or [])
            masks.append(record.q_mask or [])

    if end is None:
        raise TrajectoryFormatError(path, len(lines), "missing end record")
    if end.length != len(steps):
        raise TrajectoryFormatError(path, len(lines), f"expected {end.length} steps, found {len(steps)}")
    trajectory = Trajectory(
        steps=steps,
        terminal=end.terminal,
        success=end.success,
        scenario=header.scenario,
        final_pose=Pose.from_list(end.final_pose) if end.final_pose is not None else None,
    )
    if not header.dense:
        return trajectory
    k = len(targets[0]) if targets else 0
    return DenseTrajectory(
        trajectory,
        np.asarray(targets, dtype=np.float64).reshape(len(steps), k),
        np.asarray(masks, dtype=bool).reshape(len(steps), k),
    )
