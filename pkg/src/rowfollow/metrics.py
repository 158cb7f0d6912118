"""Centerline RMSE, path length and success-rate aggregation over episodes."""
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

SUCCESS = "EndOfRowReached"


def _xy(trajectory):
    """Accept poses, samples, or an ``(n, >=2)`` array and return ``(n, 2)`` floats."""
    items = list(trajectory) if not isinstance(trajectory, np.ndarray) else trajectory
    if len(items) and hasattr(items[0], "pose"):
        items = [s.pose for s in items]
    if len(items) and hasattr(items[0], "x"):
        items = [(p.x, p.y) for p in items]
    arr = np.asarray(items, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] < 2:
        arr = arr.reshape(-1, 2) if arr.size == 0 else arr
        if arr.ndim != 2 or arr.shape[1] < 2:
            raise ValueError("trajectory must be a sequence of (x, y, ...) points")
    return arr[:, :2]


@dataclass(frozen=True)
class CenterlineRef:
    points: tuple

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
            raise ValueError("centerline needs at least two (x, y) points")
        if not (np.diff(pts[:, 0]) > 0).all():
            raise ValueError("centerline x must be strictly increasing")
        object.__setattr__(self, "points", tuple(map(tuple, pts)))

    @classmethod
    def straight(cls, row_length, y=0.0):
        return cls(((0.0, y), (float(row_length), y)))

    def as_array(self):
        return np.asarray(self.points, dtype=np.float64)


def distance_to_polyline(xy, polyline):
    """Shortest Euclidean distance from each point to a polyline."""
    xy = np.asarray(xy, dtype=np.float64)
    a = polyline[:-1][None, :, :]
    seg = (polyline[1:] - polyline[:-1])[None, :, :]
    rel = xy[:, None, :] - a
    t = np.clip((rel * seg).sum(-1) / (seg * seg).sum(-1), 0.0, 1.0)
    closest = a + t[..., None] * seg
    return np.sqrt(((xy[:, None, :] - closest) ** 2).sum(-1)).min(axis=1)


def centerline_rmse(trajectory, ref):
    xy = _xy(trajectory)
    if len(xy) == 0:
        raise ValueError("cannot compute RMSE of an empty trajectory")
    d = distance_to_polyline(xy, ref.as_array())
    return float(np.sqrt(np.mean(d * d)))


def path_length(trajectory):
    xy = _xy(trajectory)
    if len(xy) < 2:
        return 0.0
    return float(np.hypot(*np.diff(xy, axis=0).T).sum())


@dataclass(frozen=True)
class EpisodeMetrics:
    termination: str
    rmse: float
    path_length: float
    seed: int | None = None
    steps: int | None = None

    @property
    def success(self):
        return self.termination == SUCCESS


def episode_metrics(result, seed=None):
    """Metrics for an ``EpisodeResult`` against its straight row centerline."""
    ref = CenterlineRef.straight(result.world.row_length)
    xy = result.poses()[:, :2] if result.steps else np.array([[result.final_pose.x, result.final_pose.y]])
    return EpisodeMetrics(
        termination=result.termination.value,
        rmse=centerline_rmse(xy, ref),
        path_length=path_length(xy),
        seed=seed,
        steps=result.steps,
    )


@dataclass
class MetricsReport:
    episodes: list = field(default_factory=list)
    success_rate: float = 0.0
    rmse_mean: float = 0.0
    rmse_std: float = 0.0
    total_path_length: float = 0.0

    def to_dict(self):
        return {
            "episodes": [asdict(e) for e in self.episodes],
            "success_rate": self.success_rate,
            "rmse_mean": self.rmse_mean,
            "rmse_std": self.rmse_std,
            "total_path_length": self.total_path_length,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self):
        lines = [f"{'episode':>7} {'seed':>6} {'termination':>16} {'path [m]':>9} {'RMSE [m]':>9}"]
        for i, e in enumerate(self.episodes):
            seed = "-" if e.seed is None else e.seed
            lines.append(f"{i:>7} {seed:>6} {e.termination:>16} {e.path_length:>9.2f} {e.rmse:>9.3f}")
        lines.append(
            f"overall: success rate {self.success_rate:.2f}, path {self.total_path_length:.2f} m, "
            f"RMSE {self.rmse_mean:.3f} +- {self.rmse_std:.3f} m"
        )
        return "\n".join(lines)


def aggregate(episodes):
    """Success rate plus mean and sample (n-1) standard deviation of RMSE.

    ``episodes`` holds ``EpisodeMetrics`` or ``(termination, rmse, path_length)``
    tuples. The standard deviation of a single episode is reported as 0.
    """
    eps = [e if isinstance(e, EpisodeMetrics) else EpisodeMetrics(str(getattr(e[0], "value", e[0])), float(e[1]), float(e[2]))
           for e in episodes]
    if not eps:
        raise ValueError("aggregate needs at least one episode")
    rmse = np.array([e.rmse for e in eps])
    return MetricsReport(
        episodes=eps,
        success_rate=sum(e.success for e in eps) / len(eps),
        rmse_mean=float(rmse.mean()),
        rmse_std=float(rmse.std(ddof=1)) if len(eps) > 1 else 0.0,
        total_path_length=float(math.fsum(e.path_length for e in eps)),
    )
