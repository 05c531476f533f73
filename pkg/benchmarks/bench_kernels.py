"""Compare the numba and numpy kernel backends on typical workloads.

Run with ``python3 benchmarks/bench_kernels.py``.  Both paths are imported
directly, so the ``WEILTRACE_BACKEND`` setting does not matter here.
"""
import time

import numpy as np

from weiltrace import _kernels as K

REPEAT = 5


def _best(fn, *args):
    fn(*args)  # compile / warm caches
    best = np.inf
    for _ in range(REPEAT):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def workloads():
    t = np.linspace(1.0, 1000.0, 20000)
    line = 0.5 + 1j * t
    axis = 1j * np.linspace(1e-3, 200.0, 20000)
    return [
        ("loggamma  (1/4 + it/2)", K.loggamma_numba, K.loggamma_numpy, (0.25 + 0.5j * t,)),
        ("digamma   (1/2 + it)", K.digamma_numba, K.digamma_numpy, (line,)),
        ("hurwitz   zeta(1/2 + it)", K.hurwitz_numba, K.hurwitz_numpy, (line, 1.0)),
        ("hurwitz   L(1/2 + it), a = 1/3", K.hurwitz_numba, K.hurwitz_numpy, (line, 1.0 / 3.0)),
        ("eta_one   s zeta(1 + s), s = it", K.eta_numba, K.eta_numpy, (axis,)),
    ]


def main():
    print(f"{'kernel':36s} {'numba [ms]':>11s} {'numpy [ms]':>11s} {'ratio':>7s} {'max rel diff':>13s}")
    for name, fast, slow, args in workloads():
        a, b = fast(*args), slow(*args)
        a = a if isinstance(a, tuple) else (a,)
        b = b if isinstance(b, tuple) else (b,)
        diff = max(float(np.max(np.abs(x - y) / np.maximum(np.abs(y), 1e-300))) for x, y in zip(a, b))
        tf, ts = _best(fast, *args), _best(slow, *args)
        print(f"{name:36s} {1e3 * tf:11.2f} {1e3 * ts:11.2f} {ts / tf:7.2f} {diff:13.2e}")


if __name__ == "__main__":
    main()
