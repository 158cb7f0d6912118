"""Closed-loop synthetic field: two rows of plant discs, a column-raycast RGB-D
camera that emits oracle masks, and unicycle kinematics.

World frame: rows run along +x starting at x = 0, the row centerline is y = 0,
heading ``theta`` is measured counter-clockwise from +x.
"""
import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import controller, kernels
from .controller import ControllerConfig, Decision, SteeringDecision, VelocityCommand
from .masks import NO_RETURN, MaskHistory, PipelineConfig, process_frame


@dataclass(frozen=True)
class WorldSpec:
    row_length: float = 8.0
    row_spacing: float = 1.5
    plant_spacing: float = 0.4
    plant_radius_mean: float = 0.15
    plant_radius_jitter: float = 0.03
    plant_height: float = 0.6
    seed: int = 0
    dropout_rate: float = 0.0
    mask_noise_rate: float = 0.0

    def __post_init__(self):
        if not self.row_length > 0:
            raise ValueError("row_length must be > 0")
        if not self.row_spacing > 0:
            raise ValueError("row_spacing must be > 0")
        if not self.plant_spacing > 0:
            raise ValueError("plant_spacing must be > 0")
        if not self.plant_radius_mean > 0:
            raise ValueError("plant_radius_mean must be > 0")
        if not 0 <= self.plant_radius_jitter < self.plant_radius_mean:
            raise ValueError("plant_radius_jitter must be in [0, plant_radius_mean)")
        if not self.plant_height > 0:
            raise ValueError("plant_height must be > 0")
        if not 0 <= self.dropout_rate < 1:
            raise ValueError("dropout_rate must be in [0, 1)")
        if not 0 <= self.mask_noise_rate < 1:
            raise ValueError("mask_noise_rate must be in [0, 1)")


@dataclass(frozen=True)
class World:
    """Plant discs plus the bits of the spec the renderer and metrics need."""

    x: np.ndarray
    y: np.ndarray
    radius: np.ndarray
    plant_height: float
    row_length: float
    row_spacing: float
    mask_noise_rate: float = 0.0

    def __len__(self):
        return len(self.x)

    @property
    def row_end(self):
        """Where the corridor ends: the earlier of the two rows' last plants."""
        ends = [self.x[side].max() for side in (self.y > 0, self.y < 0) if side.any()]
        return float(min(ends)) if ends else self.row_length

    @classmethod
    def empty(cls, row_length=8.0, row_spacing=1.5, plant_height=0.6):
        none = np.zeros(0)
        return cls(none, none, none, plant_height, row_length, row_spacing)

    def mirrored(self):
        """Reflection about the row axis (y -> -y)."""
        return replace(self, y=-self.y)


def generate_world(spec):
    """Two seeded plant rows at y = +-row_spacing/2, one plant every plant_spacing."""
    rng = np.random.default_rng(spec.seed)
    n = int(math.floor(spec.row_length / spec.plant_spacing + 1e-9)) + 1
    along = np.arange(n) * spec.plant_spacing
    xs, ys, rs = [], [], []
    for side in (1.0, -1.0):
        radius = spec.plant_radius_mean + spec.plant_radius_jitter * rng.uniform(-1.0, 1.0, n)
        keep = rng.random(n) >= spec.dropout_rate
        xs.append(along[keep])
        ys.append(np.full(int(keep.sum()), side * spec.row_spacing / 2))
        rs.append(radius[keep])
    x = np.concatenate(xs)
    if len(x) == 0:
        raise ValueError("world has no plants (dropout removed every plant)")
    return World(
        x, np.concatenate(ys), np.concatenate(rs),
        spec.plant_height, spec.row_length, spec.row_spacing, spec.mask_noise_rate,
    )


@dataclass(frozen=True)
class RobotPose:
    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0

    def mirrored(self):
        return RobotPose(self.x, -self.y, -self.theta)


def normalize_angle(theta):
    """Wrap to (-pi, pi]; exact (no-op) for angles already in range."""
    while theta > math.pi:
        theta -= 2 * math.pi
    while theta <= -math.pi:
        theta += 2 * math.pi
    return theta


@dataclass(frozen=True)
class CameraModel:
    horizontal_fov: float = 1.5
    width: int = 224
    height: int = 224
    # kept for completeness; the column renderer ignores elevation
    mount_height: float = 0.4
    max_range: float = 8.0

    def __post_init__(self):
        if not 0 < self.horizontal_fov < math.pi:
            raise ValueError("horizontal_fov must be in (0, pi)")
        if self.width < 1 or self.height < 1:
            raise ValueError("image width and height must be >= 1")
        if not self.max_range > 0:
            raise ValueError("max_range must be > 0")

    @property
    def focal_px(self):
        return (self.width / 2) / math.tan(self.horizontal_fov / 2)

    def column_angles(self):
        """Bearing of each pixel column center, positive to the left."""
        offsets = (self.width - 1) / 2 - np.arange(self.width)
        return np.arctan(offsets / self.focal_px)


def render(world, pose, cam, rng=None):
    """Oracle segmentation mask and depth frame seen from ``pose``.

    Each column's ray is intersected with the plant discs; a hit at range r
    fills ``round(f * plant_height / r)`` pixels (clamped to h) from the image
    bottom with vegetation at depth r. With ``world.mask_noise_rate > 0`` each
    mask pixel then flips with that probability, drawing from ``rng``.
    """
    h, w = cam.height, cam.width
    bearings = pose.theta + cam.column_angles()
    ranges = kernels.raycast_discs(
        np.cos(bearings), np.sin(bearings), float(pose.x), float(pose.y),
        np.ascontiguousarray(world.x, dtype=np.float64),
        np.ascontiguousarray(world.y, dtype=np.float64),
        np.ascontiguousarray(world.radius, dtype=np.float64),
        float(cam.max_range),
    )
    hit = np.isfinite(ranges)
    counts = np.zeros(w, dtype=np.int64)
    with np.errstate(divide="ignore"):
        apparent = cam.focal_px * world.plant_height / ranges[hit]
    counts[hit] = np.minimum(np.floor(apparent + 0.5), h).astype(np.int64)

    rows_from_bottom = (h - 1 - np.arange(h))[:, None]
    mask = (rows_from_bottom < counts[None, :]).astype(np.uint8)
    depth = np.where(mask == 1, ranges[None, :], NO_RETURN)

    if world.mask_noise_rate > 0:
        if rng is None:
            raise ValueError("mask noise requires an rng")
        flips = rng.random((h, w)) < world.mask_noise_rate
        mask ^= flips.astype(np.uint8)
    return mask, depth


def kinematics_step(pose, cmd, dt):
    """Explicit-Euler unicycle update."""
    if not dt > 0:
        raise ValueError("dt must be > 0")
    v, omega = cmd.linear, cmd.angular
    return RobotPose(
        pose.x + v * math.cos(pose.theta) * dt,
        pose.y + v * math.sin(pose.theta) * dt,
        normalize_angle(pose.theta + omega * dt),
    )


def collides(world, pose, collision_radius):
    if len(world) == 0:
        return False
    dist = np.hypot(world.x - pose.x, world.y - pose.y)
    return bool((dist < world.radius + collision_radius).any())


class Termination(str, enum.Enum):
    END_OF_ROW_REACHED = "EndOfRowReached"
    COLLISION = "Collision"
    STEP_LIMIT = "StepLimit"
    NO_GAP_STALL = "NoGapStall"


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.1
    max_steps: int = 600
    collision_radius: float = 0.35
    end_margin: float = 1.0
    stall_limit: int = 20
    start: RobotPose = field(default_factory=RobotPose)
    # uniform +- jitter applied to the start pose, drawn from the episode seed
    start_lateral_jitter: float = 0.0
    start_heading_jitter: float = 0.0

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be > 0")
        if self.max_steps < 0:
            raise ValueError("max_steps must be >= 0")
        if self.collision_radius < 0:
            raise ValueError("collision_radius must be >= 0")
        if self.stall_limit < 1:
            raise ValueError("stall_limit must be >= 1")
        if self.start_lateral_jitter < 0 or self.start_heading_jitter < 0:
            raise ValueError("start jitter must be >= 0")


@dataclass(frozen=True)
class SimRun:
    world: WorldSpec = field(default_factory=WorldSpec)
    camera: CameraModel = field(default_factory=CameraModel)
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    controller: ControllerConfig = field(default_factory=ControllerConfig)
    sim: SimConfig = field(default_factory=SimConfig)

    def with_seed(self, seed):
        return replace(self, world=replace(self.world, seed=int(seed)))


@dataclass(frozen=True)
class Sample:
    t: float
    pose: RobotPose
    command: VelocityCommand
    decision: SteeringDecision


@dataclass
class EpisodeResult:
    trajectory: list
    termination: Termination
    final_pose: RobotPose
    world: World

    @property
    def steps(self):
        return len(self.trajectory)

    @property
    def success(self):
        return self.termination is Termination.END_OF_ROW_REACHED

    def poses(self):
        """``(n, 3)`` array of recorded x, y, theta."""
        return np.array([[s.pose.x, s.pose.y, s.pose.theta] for s in self.trajectory]).reshape(-1, 3)


def _stream(seed, purpose):
    return np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, purpose])


def start_pose(run):
    cfg = run.sim
    pose = cfg.start
    if cfg.start_lateral_jitter or cfg.start_heading_jitter:
        u = _stream(run.world.seed, 2).uniform(-1.0, 1.0, 2)
        pose = RobotPose(
            pose.x,
            pose.y + cfg.start_lateral_jitter * float(u[0]),
            normalize_angle(pose.theta + cfg.start_heading_jitter * float(u[1])),
        )
    return pose


def run_episode(run, world=None, pose=None, on_step=None):
    """Render -> process_frame -> controller step -> kinematics until termination.

    ``world`` and ``pose`` override the ones derived from ``run`` (used for
    mirrored replays). ``on_step(k, mask, depth, hist, decision, command)`` is
    called after every control step.
    """
    if world is None:
        world = generate_world(run.world)
    if pose is None:
        pose = start_pose(run)
    cfg = run.sim
    noise = _stream(run.world.seed, 1)
    history = MaskHistory(run.pipeline.history_len)
    trajectory = []
    no_gap_streak = 0

    def done(termination):
        return EpisodeResult(trajectory, termination, pose, world)

    for k in range(cfg.max_steps):
        if collides(world, pose, cfg.collision_radius):
            return done(Termination.COLLISION)
        mask, depth = render(world, pose, run.camera, noise)
        hist = process_frame(history, mask, depth, run.pipeline)
        decision, cmd = controller.step(hist, run.controller)
        trajectory.append(Sample(k * cfg.dt, pose, cmd, decision))
        if on_step is not None:
            on_step(k, mask, depth, hist, decision, cmd)

        if decision.kind is Decision.END_OF_ROW and pose.x > world.row_end - cfg.end_margin:
            return done(Termination.END_OF_ROW_REACHED)
        if decision.kind is Decision.NO_GAP:
            no_gap_streak += 1
            if no_gap_streak >= cfg.stall_limit:
                return done(Termination.NO_GAP_STALL)
        else:
            no_gap_streak = 0
        pose = kinematics_step(pose, cmd, cfg.dt)

    if collides(world, pose, cfg.collision_radius):
        return done(Termination.COLLISION)
    return done(Termination.STEP_LIMIT)
