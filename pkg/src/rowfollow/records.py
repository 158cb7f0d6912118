"""Trajectory CSV files and per-episode summary records."""
import csv
import io
import json
from dataclasses import dataclass

import numpy as np

CSV_HEADER = ("t", "x", "y", "theta", "v_x", "omega_z", "decision")
DECISIONS = ("follow", "end_of_row", "no_gap")


class TrajectoryParseError(ValueError):
    def __init__(self, message, source=None, line=None):
        self.source, self.line = source, line
        where = str(source) if source else "<csv>"
        if line is not None:
            where += f":{line}"
        super().__init__(f"{where}: {message}")


def fmt(value):
    """Six significant digits; never prints a negative zero."""
    text = f"{float(value):.6g}"
    return "0" if text == "-0" else text


def trajectory_csv(result):
    buf = io.StringIO()
    buf.write(",".join(CSV_HEADER) + "\n")
    for s in result.trajectory:
        p, c = s.pose, s.command
        row = (fmt(s.t), fmt(p.x), fmt(p.y), fmt(p.theta), fmt(c.linear), fmt(c.angular))
        buf.write(",".join(row) + "," + s.decision.kind.value + "\n")
    return buf.getvalue()


@dataclass
class Trajectory:
    """Columns of a parsed trajectory CSV."""

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    theta: np.ndarray
    v_x: np.ndarray
    omega_z: np.ndarray
    decision: list

    def __len__(self):
        return len(self.t)

    def xy(self):
        return np.column_stack([self.x, self.y])


def parse_trajectory_csv(text, source=None):
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
        raise TrajectoryParseError(f"expected header {','.join(CSV_HEADER)}", source, 1)
    cols = {name: [] for name in CSV_HEADER}
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(CSV_HEADER):
            raise TrajectoryParseError(f"expected {len(CSV_HEADER)} fields, got {len(row)}", source, line_no)
        try:
            values = [float(v) for v in row[:-1]]
        except ValueError as exc:
            raise TrajectoryParseError(f"non-numeric field ({exc})", source, line_no) from None
        if not all(np.isfinite(values)):
            raise TrajectoryParseError("non-finite value", source, line_no)
        decision = row[-1].strip()
        if decision not in DECISIONS:
            raise TrajectoryParseError(f"unknown decision {decision!r}", source, line_no)
        for name, v in zip(CSV_HEADER, values + [decision]):
            cols[name].append(v)
    arrays = {k: np.asarray(v, dtype=np.float64) for k, v in cols.items() if k != "decision"}
    return Trajectory(decision=cols["decision"], **arrays)


def read_trajectory_csv(path):
    with open(path, encoding="utf-8") as f:
        return parse_trajectory_csv(f.read(), path)


def episode_summary(index, seed, result, metrics, scenario=None):
    record = {
        "episode": index,
        "seed": seed,
        "termination": result.termination.value,
        "steps": result.steps,
        "final_pose": {"x": result.final_pose.x, "y": result.final_pose.y, "theta": result.final_pose.theta},
        "rmse": metrics.rmse,
        "path_length": metrics.path_length,
    }
    if scenario is not None:
        record["config"] = scenario.to_dict()
    return json.dumps(record, indent=2, sort_keys=True) + "\n"
