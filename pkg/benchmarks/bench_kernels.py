"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Workloads mirror the hot paths: sigma products at small Im(tau) (reached by
slashing with S), the Lambert series for eta(1) and the 2-d series
convolution behind exact BiSeries products.
"""
import argparse
import timeit

import numpy as np

from jacobi0 import _pykernels
from jacobi0.weierstrass import sigma_series, terms_needed

try:
    from jacobi0 import _ckernels
except ImportError:
    _ckernels = None


def workloads():
    zs = np.array([0.1, 0.2 + 0.3j, -0.15 + 0.05j])
    small_tau = -1 / (3 + 0.05j)  # Im about 5.5e-3
    n_small = terms_needed(small_tau, 0.3)
    S = sigma_series(30)
    rs = [r for _, r in S.coeffs]
    dense = np.zeros((S.N + 1, max(rs) - min(rs) + 1), dtype=np.int64)
    for (n, r), c in S.coeffs.items():
        dense[n, r - min(rs)] = int(c)
    return {
        f"log_theta  tau=i, 3 z, {terms_needed(1j, 0.3)} terms": lambda k: k.log_theta(1j, zs, terms_needed(1j, 0.3)),
        f"log_theta  Im tau=5.5e-3, 3 z, {n_small} terms": lambda k: k.log_theta(small_tau, zs, n_small),
        f"lambert    Im tau=5.5e-3, {n_small} terms": lambda k: k.lambert(small_tau, n_small),
        "conv2d     S_30 * S_30 (int64)": lambda k: k.conv2d(dense, dense, S.N + 1),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    backends = {"python": _pykernels}
    if _ckernels is not None:
        backends["cython"] = _ckernels
    else:
        print("compiled extension not built; timing the numpy fallback only")
    print(f"{'workload':<48}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for name, fn in workloads().items():
        times = {}
        for b, mod in backends.items():
            number = 3
            times[b] = min(timeit.repeat(lambda: fn(mod), number=number, repeat=args.repeat)) / number
        speed = f"{times['python'] / times['cython']:9.1f}x" if "cython" in times else ""
        print(f"{name:<48}" + "".join(f"{times[b] * 1e3:10.3f}ms" for b in backends) + speed)


if __name__ == "__main__":
    main()
