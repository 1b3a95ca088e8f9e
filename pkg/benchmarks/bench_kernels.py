"""Time the numba and numpy kernel-block builders side by side.

    python benchmarks/bench_kernels.py [--repeat 5] [--sizes 512 2048 4096]

Both backends are imported directly, so SATURN_DISABLE_NUMBA has no effect
here.  Each row also reports the largest absolute difference between them.
"""
import argparse
import timeit

import numpy as np

from saturn import _blocks_numba, _blocks_numpy
from saturn.quadrature import uniform_sphere


def cases(sizes, rng):
    for n in sizes:
        a, b = rng.random(n), rng.random(n)
        yield f"min {n}x{n}", lambda m, a=a, b=b: m.interval_block(m.MIN, a, b)
        yield f"heavyside {n}x{n}", lambda m, a=a, b=b: m.interval_block(m.HEAVYSIDE, a, b)
        A, B = uniform_sphere(n, rng), uniform_sphere(n, rng)
        yield f"truncpow3 {n}x{n}", lambda m, A=A, B=B: m.sphere_block(3, A, B)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--sizes", type=int, nargs="+", default=[512, 2048, 4096])
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    # compile outside the timed region
    _blocks_numba.interval_block(0, np.zeros(2), np.zeros(2))
    _blocks_numba.sphere_block(3, uniform_sphere(2, rng), uniform_sphere(2, rng))

    print(f"{'case':<22}{'numpy ms':>11}{'numba ms':>11}{'speedup':>9}{'max diff':>11}")
    for name, run in cases(args.sizes, rng):
        t_np = min(timeit.repeat(lambda: run(_blocks_numpy), number=1, repeat=args.repeat))
        t_nb = min(timeit.repeat(lambda: run(_blocks_numba), number=1, repeat=args.repeat))
        diff = np.abs(run(_blocks_numpy) - run(_blocks_numba)).max()
        print(f"{name:<22}{1e3 * t_np:>11.1f}{1e3 * t_nb:>11.1f}{t_np / t_nb:>8.1f}x{diff:>11.1e}")


if __name__ == "__main__":
    main()
