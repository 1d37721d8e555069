"""Compare the compiled and numpy kernel backends on the hot loops.

    python3 benchmarks/bench_kernels.py [--samples 4096] [--repeat 3]

Prints one line per kernel with the best wall time of each backend, the
speed-up and the largest absolute difference between their outputs.
"""

import argparse
import time

import numpy as np

from asbarron._kernels import HIGHPASS, SOFTPLUS, get_backend
from asbarron.permutations import permutation_table


def best_time(fn, repeat):
    out, best = None, np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(samples, rng):
    n, d, K, m = 4, 2, 16, 64
    perms, signs = permutation_table(n)
    perms = perms.astype(np.int64)
    xs = rng.standard_normal((samples, n, d))
    W = rng.standard_normal((K, n, d))
    b, a = rng.standard_normal(K), rng.standard_normal(K)
    waves = rng.standard_normal((m, n, d))
    coef = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    yield "antisym_ridge_values[softplus]", lambda k: k.antisym_ridge_values(xs, W, b, a, perms, signs, SOFTPLUS, 1.0)
    yield "antisym_ridge_values[highpass]", lambda k: k.antisym_ridge_values(xs, W, b, a, perms, signs, HIGHPASS, 0.5)
    yield "softplus_net_jacobian", lambda k: k.softplus_net_jacobian(xs, W, b, a, perms, signs)[1]
    yield "planewave_sum_values", lambda k: k.planewave_sum_values(xs, waves, coef)
    y = rng.uniform(-50, 50, samples * 16)
    yield "sine_integral", lambda k: k.sine_integral(y)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=4096)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    compiled, plain = get_backend("numba"), get_backend("numpy")
    rng = np.random.default_rng(0)
    print(f"{'kernel':34s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speed-up':>9s} {'max |diff|':>11s}")
    for name, call in cases(args.samples, rng):
        call(compiled)  # compile outside the timing
        t_c, out_c = best_time(lambda: call(compiled), args.repeat)
        t_p, out_p = best_time(lambda: call(plain), args.repeat)
        diff = float(np.max(np.abs(np.asarray(out_c) - np.asarray(out_p))))
        print(f"{name:34s} {t_c:10.4f} {t_p:10.4f} {t_p / t_c:9.1f} {diff:11.2e}")


if __name__ == "__main__":
    main()
