"""Time the compiled and pure-Python RK4 kernels on the shooting workload.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import time

import numpy as np

from rotcyl import GeneratingParams, SolverConfig
from rotcyl._kernels import available_backends, get_backend
from rotcyl.curves import scan_residuals, shoot_closed_curve

CASES = [
    ("single arc a=1 b=-0.5 k=2", lambda kern, cfg: kern.rk4_arc(1.0, -0.5, 0.6, 1e-3, np.pi / 2, 10 ** 6, 1e3)),
    ("shoot a=1 b=-0.5 k=2", lambda kern, cfg: shoot_closed_curve(
        GeneratingParams(1.0, -0.5, 2), (0.55, 0.65), cfg, 1024, kern)),
    ("scan 32 radii a=1 b=-2 k=4", lambda kern, cfg: scan_residuals(
        GeneratingParams(1.0, -2.0, 4), 0.3, 1.5, 32, cfg, kern)),
]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    cfg = SolverConfig()
    backends = available_backends()
    print(f"{'case':32s}" + "".join(f"{b:>12s}" for b in backends) + "     speedup")
    for label, case in CASES:
        times = {b: best_of(lambda: case(get_backend(b), cfg), args.repeat) for b in backends}
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{label:32s}" + "".join(f"{times[b]:11.4f}s" for b in backends) + f"  {speed:9.1f}x")


if __name__ == "__main__":
    main()
