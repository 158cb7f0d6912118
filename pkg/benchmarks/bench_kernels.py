"""Compare the Cython and numpy kernel backends.

    python benchmarks/bench_kernels.py [--repeat N]

Times the two kernels on simulator-sized inputs and one full closed-loop
episode per backend, and checks that both backends agree bit for bit.
"""
import argparse
import time

import numpy as np

from rowfollow import _pykernels, kernels, sim

try:
    from rowfollow import _ckernels
except ImportError:
    _ckernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def raycast_inputs():
    world = sim.generate_world(sim.WorldSpec(row_length=10.0, seed=0))
    cam = sim.CameraModel()
    bearings = 0.02 + cam.column_angles()
    return (np.cos(bearings), np.sin(bearings), 0.3, 0.05,
            world.x.copy(), world.y.copy(), world.radius.copy(), cam.max_range)


def episode(backend):
    saved = kernels.raycast_discs, kernels.zero_runs
    kernels.raycast_discs, kernels.zero_runs = backend.raycast_discs, backend.zero_runs
    try:
        run = sim.SimRun(sim=sim.SimConfig(start_lateral_jitter=0.05, start_heading_jitter=0.05)).with_seed(1)
        return sim.run_episode(run)
    finally:
        kernels.raycast_discs, kernels.zero_runs = saved


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()

    backends = {"numpy": _pykernels}
    if _ckernels is not None:
        backends["cython"] = _ckernels
    else:
        print("compiled kernels not available; timing numpy only")

    ray_args = raycast_inputs()
    rng = np.random.default_rng(0)
    hist = np.ascontiguousarray(rng.integers(0, 3, 224) * rng.integers(0, 2, 224), dtype=np.int64)

    rows = []
    outputs = {}
    for name, mod in backends.items():
        t_ray = best_of(lambda: mod.raycast_discs(*ray_args), args.repeat * 10)
        t_runs = best_of(lambda: mod.zero_runs(hist), args.repeat * 100)
        t_ep = best_of(lambda: episode(mod), max(1, args.repeat // 10))
        outputs[name] = (mod.raycast_discs(*ray_args), mod.zero_runs(hist), episode(mod).poses())
        rows.append((name, t_ray, t_runs, t_ep))

    print(f"{'backend':>8} {'raycast [us]':>13} {'zero_runs [us]':>15} {'episode [ms]':>13}")
    for name, t_ray, t_runs, t_ep in rows:
        print(f"{name:>8} {t_ray * 1e6:>13.1f} {t_runs * 1e6:>15.2f} {t_ep * 1e3:>13.1f}")
    if len(rows) == 2:
        (_, r0, z0, e0), (_, r1, z1, e1) = rows
        print(f"{'speedup':>8} {r0 / r1:>13.1f} {z0 / z1:>15.1f} {e0 / e1:>13.2f}")
        a, b = outputs["numpy"], outputs["cython"]
        same = (np.array_equal(a[0], b[0]) and all(np.array_equal(x, y) for x, y in zip(a[1], b[1]))
                and np.array_equal(a[2], b[2]))
        print("backends agree bit for bit:", same)


if __name__ == "__main__":
    main()
