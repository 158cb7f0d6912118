"""Batch experiment driver.

    rowfollow run SCENARIO [--out-dir DIR] [--jobs N] [--telemetry]
    rowfollow replay SCENARIO --episode K [--out-dir DIR] [--dump-frames DIR] [--telemetry]
    rowfollow plot TRAJECTORY.csv --world SCENARIO [--episode K] [-o OUT.svg]

Exit codes: 0 success, 1 config error, 2 I/O error, 3 internal error.
"""
import argparse
import json
import logging
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__, kernels
from .controller import telemetry_record
from .metrics import aggregate, episode_metrics
from .pgm import write_depth_pgm, write_mask_pgm
from .plot import plot_episode
from .records import TrajectoryParseError, episode_summary, read_trajectory_csv, trajectory_csv
from .scenario import ConfigError, load_scenario
from .sim import generate_world, run_episode

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_INTERNAL = 0, 1, 2, 3

log = logging.getLogger("rowfollow")


def episode_stem(k):
    return f"episode_{k:03d}"


def run_one(scenario, k, out_dir, telemetry=False, frames_dir=None):
    """Run episode ``k`` and write its CSV, JSON summary and SVG into ``out_dir``."""
    run = scenario.episode_run(k)
    seed = scenario.episode_seed(k)
    out_dir = Path(out_dir)
    stem = episode_stem(k)

    on_step = None
    if frames_dir is not None:
        frames_dir = Path(frames_dir)
        frames_dir.mkdir(parents=True, exist_ok=True)

        def on_step(step, mask, depth, hist, decision, cmd):
            write_mask_pgm(frames_dir / f"{stem}_mask_{step:04d}.pgm", mask)
            write_depth_pgm(frames_dir / f"{stem}_depth_{step:04d}.pgm", depth)

    result = run_episode(run, on_step=on_step)
    metrics = episode_metrics(result, seed=seed)

    if telemetry:
        lines = [
            telemetry_record(s.decision, s.command, step=i, t=s.t, x=s.pose.x, y=s.pose.y, theta=s.pose.theta)
            for i, s in enumerate(result.trajectory)
        ]
        text = "".join(line + "\n" for line in lines)
        (out_dir / f"{stem}.telemetry.jsonl").write_text(text, encoding="utf-8")

    (out_dir / f"{stem}.csv").write_text(trajectory_csv(result), encoding="utf-8")
    (out_dir / f"{stem}.json").write_text(episode_summary(k, seed, result, metrics), encoding="utf-8")
    title = f"{stem} (seed {seed}): {result.termination.value}, RMSE {metrics.rmse:.3f} m"
    svg = plot_episode(result.poses()[:, :2], result.world, title=title)
    (out_dir / f"{stem}.svg").write_text(svg, encoding="utf-8")
    return metrics


def run_batch(scenario, out_dir=None, jobs=1, telemetry=False):
    """Run every episode of ``scenario`` and write the aggregate summary.

    Episode ``k`` uses seed ``base_seed + k``; output is identical for any
    ``jobs`` value.
    """
    out_dir = Path(out_dir if out_dir is not None else scenario.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ks = range(scenario.episodes)
    if jobs > 1 and scenario.episodes > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(run_one, scenario, k, out_dir, telemetry) for k in ks]
            episodes = [f.result() for f in futures]
    else:
        episodes = [run_one(scenario, k, out_dir, telemetry) for k in ks]
    report = aggregate(episodes)
    summary = report.to_dict()
    summary["scenario"] = scenario.to_dict()
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    (out_dir / "summary.txt").write_text(report.to_text() + "\n", encoding="utf-8")
    return report


def infer_episode(path):
    m = re.search(r"episode_(\d+)", Path(path).name)
    return int(m.group(1)) if m else 0


def _cmd_run(args):
    scenario = load_scenario(args.scenario)
    report = run_batch(scenario, args.out_dir, args.jobs, args.telemetry)
    print(report.to_text())
    return EXIT_OK


def _cmd_replay(args):
    scenario = load_scenario(args.scenario)
    if not 0 <= args.episode < scenario.episodes:
        raise ConfigError(f"episode {args.episode} out of range 0..{scenario.episodes - 1}", scenario.source)
    out_dir = Path(args.out_dir or scenario.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    m = run_one(scenario, args.episode, out_dir, args.telemetry, args.dump_frames)
    print(aggregate([m]).to_text())
    return EXIT_OK


def _cmd_plot(args):
    scenario = load_scenario(args.world)
    k = infer_episode(args.trajectory) if args.episode is None else args.episode
    traj = read_trajectory_csv(args.trajectory)
    world = generate_world(scenario.episode_run(k).world)
    out = Path(args.output) if args.output else Path(args.trajectory).with_suffix(".svg")
    out.write_text(plot_episode(traj.xy(), world, title=f"{Path(args.trajectory).stem} (seed {scenario.episode_seed(k)})"),
                   encoding="utf-8")
    print(out)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="rowfollow", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({kernels.BACKEND} kernels)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run every episode of a scenario")
    p.add_argument("scenario")
    p.add_argument("--out-dir")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--telemetry", action="store_true", help="write per-step JSON lines")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("replay", help="re-run a single episode")
    p.add_argument("scenario")
    p.add_argument("--episode", type=int, required=True)
    p.add_argument("--out-dir")
    p.add_argument("--dump-frames", metavar="DIR", help="write mask/depth PGM files per step")
    p.add_argument("--telemetry", action="store_true")
    p.set_defaults(func=_cmd_replay)

    p = sub.add_parser("plot", help="draw a trajectory CSV over its world as SVG")
    p.add_argument("trajectory")
    p.add_argument("--world", required=True, help="scenario file the trajectory came from")
    p.add_argument("--episode", type=int, help="episode index (default: parsed from the file name)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_plot)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if getattr(args, "jobs", 1) < 1:
        print("rowfollow: --jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except (ConfigError, TrajectoryParseError) as exc:
        print(f"rowfollow: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"rowfollow: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except Exception:
        log.exception("internal error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
