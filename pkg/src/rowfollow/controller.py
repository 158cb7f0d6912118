"""Gap detection on the column histogram and the parabolic velocity laws.

Column indices run 0..w-1 and pixel ``j`` covers ``[j, j+1)``; the frame center
therefore sits at index ``(w - 1) / 2``. Offsets are positive when the chosen
gap lies right of center, and a positive offset commands a negative (right)
turn rate.
"""
import enum
import json
from dataclasses import dataclass, field

import numpy as np

from . import kernels


class Decision(str, enum.Enum):
    FOLLOW = "follow"
    END_OF_ROW = "end_of_row"
    NO_GAP = "no_gap"


@dataclass(frozen=True)
class GapCluster:
    start: int
    end: int

    @property
    def width(self):
        return self.end - self.start + 1

    @property
    def center(self):
        return (self.start + self.end) / 2


@dataclass(frozen=True)
class SteeringDecision:
    kind: Decision
    offset: float | None = None
    cluster: GapCluster | None = None
    # every zero run found in the histogram, kept for telemetry
    clusters: tuple = field(default=(), compare=False)

    @classmethod
    def follow(cls, offset, cluster=None, clusters=()):
        return cls(Decision.FOLLOW, float(offset), cluster, tuple(clusters))

    @classmethod
    def end_of_row(cls, cluster=None, clusters=()):
        return cls(Decision.END_OF_ROW, None, cluster, tuple(clusters))

    @classmethod
    def no_gap(cls, clusters=()):
        return cls(Decision.NO_GAP, None, None, tuple(clusters))


@dataclass(frozen=True)
class VelocityCommand:
    linear: float = 0.0
    angular: float = 0.0


STOP = VelocityCommand(0.0, 0.0)


@dataclass(frozen=True)
class ControllerConfig:
    v_x_max: float = 0.5
    omega_z_max: float = 0.5
    min_cluster_width: int = 3
    end_of_row_fraction: float = 0.80

    def __post_init__(self):
        if not self.v_x_max > 0:
            raise ValueError("v_x_max must be > 0")
        if not self.omega_z_max > 0:
            raise ValueError("omega_z_max must be > 0")
        if int(self.min_cluster_width) != self.min_cluster_width or self.min_cluster_width < 1:
            raise ValueError("min_cluster_width must be an integer >= 1")
        if not 0.0 < self.end_of_row_fraction < 1.0:
            raise ValueError("end_of_row_fraction must be in (0, 1)")


def frame_center(w):
    return (w - 1) / 2


def find_zero_clusters(hist):
    """Every maximal run of zero bins, left to right."""
    bins = np.ascontiguousarray(hist, dtype=np.int64)
    if bins.ndim != 1:
        raise ValueError("histogram must be 1-D")
    if (bins < 0).any():
        raise ValueError("histogram bins must be non-negative")
    starts, ends = kernels.zero_runs(bins)
    return [GapCluster(int(s), int(e)) for s, e in zip(starts, ends)]


def select_gap(clusters, w, cfg):
    """Drop narrow clusters, keep the widest (leftmost on ties), test for end of row."""
    best = None
    for c in clusters:
        if c.width < cfg.min_cluster_width:
            continue
        if best is None or c.width > best.width:
            best = c
    if best is None:
        return SteeringDecision.no_gap(clusters)
    if best.width > cfg.end_of_row_fraction * w:
        return SteeringDecision.end_of_row(best, clusters)
    return SteeringDecision.follow(best.center - frame_center(w), best, clusters)


def sign(x):
    return 1.0 if x >= 0 else -1.0


def velocity_from_offset(decision, w, cfg):
    if decision.kind is not Decision.FOLLOW:
        return STOP
    d = decision.offset
    ratio = d * d / ((w / 2) * (w / 2))
    v = cfg.v_x_max * (1.0 - ratio)
    # + 0.0 folds the -0.0 produced at d == 0
    omega = -cfg.omega_z_max * sign(d) * ratio + 0.0
    return VelocityCommand(v, omega)


def step(hist, cfg):
    """Histogram to ``(decision, command)``."""
    w = len(hist)
    decision = select_gap(find_zero_clusters(hist), w, cfg)
    return decision, velocity_from_offset(decision, w, cfg)


def telemetry_record(decision, command, **extra):
    """One JSON line describing a control step."""
    record = dict(extra)
    record.update(
        decision=decision.kind.value,
        d=decision.offset,
        clusters=[[c.start, c.end] for c in decision.clusters],
        v_x=command.linear,
        omega_z=command.angular,
    )
    return json.dumps(record, sort_keys=True)
