"""Exit criteria for the whole package, one test per criterion.

Run ``pytest tests/test_acceptance.py`` to get a PASS/FAIL line per criterion
in the terminal summary.
"""
import math
import time
from pathlib import Path

import numpy as np
import pytest

import oracles
from rowfollow.cli import run_batch
from rowfollow.controller import ControllerConfig, Decision, SteeringDecision, find_zero_clusters, select_gap, velocity_from_offset
from rowfollow.masks import NO_RETURN, MaskHistory, PipelineConfig, process_frame
from rowfollow.metrics import CenterlineRef, aggregate, centerline_rmse, episode_metrics
from rowfollow.scenario import load_scenario
from rowfollow.sim import Termination, generate_world, run_episode, start_pose

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"
W = 224


def _random_frame(rng):
    """Mask, depth and prior history with column densities spanning the noise threshold."""
    cap = int(rng.integers(1, 6))
    density = rng.choice([0.0, 0.01, 0.02, 0.03, 0.05, 0.2, 0.6], size=W) * rng.uniform(0.5, 1.5, W)
    prior = [(rng.random((W, W)) < density).astype(np.uint8) for _ in range(int(rng.integers(0, cap + 1)))]
    mask = (rng.random((W, W)) < density).astype(np.uint8)
    depth = rng.uniform(0.0, 8.0, (W, W))
    depth[rng.random((W, W)) < 0.05] = NO_RETURN
    cfg = PipelineConfig(
        noise_column_background_fraction=float(rng.choice([0.97, 0.9, 0.99])),
        history_len=cap,
        depth_threshold=float(rng.uniform(0.5, 7.5)),
    )
    return prior, mask, depth, cfg


def test_1_pipeline_oracle_equivalence(criterion):
    criterion(1)
    rng = np.random.default_rng(20240101)
    elapsed = 0.0
    for _ in range(1000):
        prior, mask, depth, cfg = _random_frame(rng)
        history = MaskHistory(cfg.history_len, prior)
        t0 = time.perf_counter()
        hist = process_frame(history, mask, depth, cfg)
        elapsed += time.perf_counter() - t0
        expected = oracles.pipeline(prior, cfg.history_len, mask, depth,
                                    cfg.noise_column_background_fraction, cfg.depth_threshold)
        assert hist.tolist() == expected
        assert len(history) == min(cfg.history_len, len(prior) + 1)
    assert elapsed < 30.0


def _random_histogram(rng):
    kind = rng.integers(0, 4)
    if kind == 0:
        return np.zeros(W, dtype=np.int64) if rng.random() < 0.5 else rng.integers(1, 5, W)
    if kind == 1:
        return rng.integers(0, 3, W) * (rng.random(W) < rng.uniform(0, 1))
    # alternating runs of random lengths, including very wide gaps
    bins, zero = [], bool(rng.integers(0, 2))
    while len(bins) < W:
        n = int(rng.integers(1, 200 if kind == 3 else 12))
        bins += [0 if zero else int(rng.integers(1, 224))] * n
        zero = not zero
    return np.array(bins[:W], dtype=np.int64)


def test_2_cluster_procedure_oracle(criterion):
    criterion(2)
    rng = np.random.default_rng(7)
    cfg = ControllerConfig()
    seen = set()
    for _ in range(10_000):
        bins = _random_histogram(rng)
        d = select_gap(find_zero_clusters(bins), W, cfg)
        kind, offset = oracles.gap_procedure(bins.tolist(), 3, 0.8)
        assert d.kind.value == kind
        if kind == "follow":
            assert d.offset == float(offset)
        seen.add(kind)
    assert seen == {"follow", "end_of_row", "no_gap"}
    # boundary widths of the two literal rules
    assert select_gap(find_zero_clusters(np.r_[np.zeros(179, int), np.ones(45, int)]), W, cfg).kind is Decision.FOLLOW
    assert select_gap(find_zero_clusters(np.r_[np.zeros(180, int), np.ones(44, int)]), W, cfg).kind is Decision.END_OF_ROW
    two = np.ones(W, int)
    two[10:12] = 0
    assert select_gap(find_zero_clusters(two), W, cfg).kind is Decision.NO_GAP


def test_3_velocity_law(criterion):
    criterion(3)
    cfg = ControllerConfig(v_x_max=0.5, omega_z_max=0.5)
    half = W / 2
    for d in np.linspace(-half, half, 1001):
        cmd = velocity_from_offset(SteeringDecision.follow(d), W, cfg)
        ratio = (float(d) / half) ** 2
        v = cfg.v_x_max * (1 - ratio)
        om = -cfg.omega_z_max * math.copysign(1.0, d if d != 0 else 1.0) * ratio
        assert cmd.linear == pytest.approx(v, rel=1e-12, abs=0 if v else 1e-300)
        assert cmd.angular == pytest.approx(om, rel=1e-12, abs=0 if om else 1e-300)
    c0 = velocity_from_offset(SteeringDecision.follow(0.0), W, cfg)
    assert (c0.linear, c0.angular) == (cfg.v_x_max, 0.0)
    cp = velocity_from_offset(SteeringDecision.follow(half), W, cfg)
    cm = velocity_from_offset(SteeringDecision.follow(-half), W, cfg)
    assert (cp.linear, cp.angular) == (0.0, -cfg.omega_z_max)
    assert (cm.linear, cm.angular) == (0.0, cfg.omega_z_max)


def test_4_nominal_success_and_rmse(criterion):
    criterion(4)
    from dataclasses import replace

    sc = load_scenario(SCENARIOS / "nominal.yaml")
    t0 = time.perf_counter()
    for k, row_length in enumerate((8.0, 9.0, 10.0)):
        run = sc.episode_run(k)
        run = replace(run, world=replace(run.world, row_length=row_length))
        res = run_episode(run)
        assert res.termination is Termination.END_OF_ROW_REACHED
        m = episode_metrics(res)
        assert m.rmse <= 0.15
        corridor = run.world.row_spacing / 2 - run.world.plant_radius_mean
        assert np.abs(res.poses()[:, 1]).max() < corridor
    assert time.perf_counter() - t0 < 60.0


def test_5_robustness(criterion):
    criterion(5)
    sc = load_scenario(SCENARIOS / "noisy.yaml")
    assert sc.episodes == 10
    assert sc.run.world.mask_noise_rate <= 0.02 and sc.run.world.dropout_rate <= 0.10
    t0 = time.perf_counter()
    results = [run_episode(sc.episode_run(k)) for k in range(sc.episodes)]
    rep = aggregate([episode_metrics(r) for r in results])
    assert rep.success_rate >= 0.7
    assert time.perf_counter() - t0 < 300.0


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_6_mirror_symmetry(criterion, seed):
    criterion(6)
    sc = load_scenario(SCENARIOS / "nominal.yaml")
    run = sc.episode_run(seed)
    assert run.world.mask_noise_rate == 0.0
    world = generate_world(run.world)
    pose = start_pose(run)
    a = run_episode(run, world=world, pose=pose)
    b = run_episode(run, world=world.mirrored(), pose=pose.mirrored())
    pa, pb = a.poses(), b.poses()
    assert a.termination == b.termination and pa.shape == pb.shape
    assert np.abs(pa[:, 1] + pb[:, 1]).max() < 1e-9
    assert np.abs(pa[:, 2] + pb[:, 2]).max() < 1e-9


def test_7_metrics(criterion):
    criterion(7)
    ref = CenterlineRef.straight(8.0)
    xy = np.column_stack([np.linspace(0, 8, 101), np.full(101, 0.125)])
    assert centerline_rmse(xy, ref) == 0.125
    amp = 0.1
    x = np.linspace(0, 8, 10_000, endpoint=False)
    sin_xy = np.column_stack([x, amp * np.sin(2 * math.pi * x / 0.8)])
    assert abs(centerline_rmse(sin_xy, ref) - amp / math.sqrt(2)) <= 0.01 * amp / math.sqrt(2)
    rep = aggregate([("EndOfRowReached", r, 8.0) for r in (0.077, 0.073, 0.082)])
    assert abs(rep.rmse_mean - 0.077) <= 0.001


def test_8_determinism(criterion, tmp_path):
    criterion(8)
    sc = load_scenario(SCENARIOS / "nominal.yaml")
    run_batch(sc, tmp_path / "a")
    run_batch(sc, tmp_path / "b")
    names = sorted(p.name for p in (tmp_path / "a").iterdir() if p.suffix in (".csv", ".svg"))
    assert len(names) == 2 * sc.episodes
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
