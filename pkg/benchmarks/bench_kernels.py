"""Compare the compiled and pure-Python kernels on the workloads of the exact tier.

Run from the repository root after ``pip install -e . --no-build-isolation``::

    python3 benchmarks/bench_kernels.py --repeat 5
"""
import argparse
import math
import time

import numpy as np

from abvortex import _pykernels

try:
    from abvortex import _ckernels
except ImportError:
    _ckernels = None


def bessel_workload(impl, orders, args):
    for nu in orders:
        for x in args:
            impl.bessel_jy(nu, x)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--krc", type=float, default=100.0, help="hardness of the phase-shift table")
    parser.add_argument("--angles", type=int, default=2001)
    args = parser.parse_args()
    if _ckernels is None:
        raise SystemExit("compiled extension not built; run pip install -e . --no-build-isolation")

    krc = args.krc
    n_max = int(krc + 10 * krc ** (1 / 3) + 20)
    orders = np.abs(np.arange(-n_max, n_max + 1) - 0.3).tolist()
    rng = np.random.default_rng(0)
    coef = rng.standard_normal(2 * n_max + 1) + 1j * rng.standard_normal(2 * n_max + 1)
    phi = np.linspace(-math.pi, math.pi, args.angles)

    workloads = {
        f"bessel_jy, {len(orders)} orders at x={krc:g}": lambda impl: bessel_workload(impl, orders, [krc]),
        "bessel_jy, 40 x 25 lattice": lambda impl: bessel_workload(
            impl, np.geomspace(1e-3, 300, 40).tolist(), np.geomspace(1e-3, 1e3, 25).tolist()),
        f"fourier_sum, {coef.size} modes x {phi.size} angles": lambda impl: impl.fourier_sum(phi, -n_max, coef),
    }
    print(f"{'workload':48s} {'python [s]':>11s} {'cython [s]':>11s} {'speedup':>8s}")
    for name, work in workloads.items():
        py = best_of(lambda: work(_pykernels), args.repeat)
        cy = best_of(lambda: work(_ckernels), args.repeat)
        print(f"{name:48s} {py:11.4f} {cy:11.4f} {py / cy:8.1f}")

    # the two backends must agree bit for bit on the Bessel kernel
    worst = 0.0
    for nu in orders[::7]:
        a, b = _pykernels.bessel_jy(nu, krc), _ckernels.bessel_jy(nu, krc)
        worst = max(worst, max(abs(u - v) / max(abs(u), 1e-300) for u, v in zip(a, b) if math.isfinite(u)))
    s_py, s_cy = _pykernels.fourier_sum(phi, -n_max, coef), _ckernels.fourier_sum(phi, -n_max, coef)
    print(f"max relative backend difference: bessel {worst:.1e}, "
          f"fourier {np.max(np.abs(s_py - s_cy)) / np.max(np.abs(s_py)):.1e}")


if __name__ == "__main__":
    main()
