import math
import os
from pathlib import Path

if os.getenv("DIVIS_DATA_DIR") is not None:
    _data_dir = Path(os.environ["DIVIS_DATA_DIR"])
else:
    _data_dir = Path.cwd() / "data"

DATA_DIR = _data_dir
ENVIRONMENTS_SUBDIR = "environments"

ENV_FORMAT = "divis-env/1"
SCENARIO_FORMAT = "divis-scn/1"
SUITE_FORMAT = "divis-suite/1"
TRAJECTORY_FORMAT = "divis-traj/1"
CHECKPOINT_FORMAT = "divis-ckpt/1"
TRAIN_CONFIG_FORMAT = "divis-train/1"
EVAL_CONFIG_FORMAT = "divis-eval/1"
MANIFEST_FORMAT = "divis-manifest/1"

# Action space
DEFAULT_NUM_ACTIONS = 9
DEFAULT_ROTATION_RANGE = math.pi
DEFAULT_VELOCITY = 0.25

# Rewards and termination
DEFAULT_AGENT_RADIUS = 0.16
DEFAULT_CLEARANCE_THRESHOLD = 1.0
DEFAULT_SUCCESS_DISTANCE = 0.30
MIN_COLLISION_REWARD = -1.0

# Egocentric grid
DEFAULT_GRID_SIZE = 16
DEFAULT_FOV = math.radians(120.0)
DEFAULT_MAX_RANGE = 2.0
DEFAULT_SIGHT_RANGE = 8.0

# Rollouts
DEFAULT_GAMMA = 0.95
DEFAULT_MAX_STEPS = 40

# Scenario sampling
SCENARIO_MAX_RETRIES = 1000
FREE_SPACE_RESOLUTION = 0.05
MIN_POCKET_AREA = 0.5

# Perception seeds: seen seeds live in the lower half of the 64-bit range,
# unseen seeds in the upper half.
SEED_SPACE_BITS = 64
UNSEEN_SEED_BIT = 1 << (SEED_SPACE_BITS - 1)
