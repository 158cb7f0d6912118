"""Segmentation-based crop-row following.

A per-frame mask pipeline (column noise filter, temporal OR, depth cut, column
histogram), a zero-gap controller with parabolic velocity laws, and a
closed-loop synthetic field to run it in.
"""
__version__ = "0.1.0"

from .controller import (
    ControllerConfig,
    Decision,
    GapCluster,
    SteeringDecision,
    VelocityCommand,
    find_zero_clusters,
    select_gap,
    step,
    velocity_from_offset,
)
from .masks import (
    NO_RETURN,
    DimensionError,
    MaskHistory,
    PipelineConfig,
    accumulate,
    column_histogram,
    column_noise_filter,
    depth_cut,
    process_frame,
)
from .metrics import CenterlineRef, MetricsReport, aggregate, centerline_rmse, path_length
from .sim import (
    CameraModel,
    EpisodeResult,
    RobotPose,
    SimConfig,
    SimRun,
    Termination,
    World,
    WorldSpec,
    generate_world,
    kinematics_step,
    render,
    run_episode,
)
