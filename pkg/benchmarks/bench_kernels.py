"""Statevector kernels: numba against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--qubits 10 14 18 20] [--repeat 20]

Prints one row per (kernel, qubit count) with the best-of-repeat time of
each backend and the speedup. A second table times a whole
``exact_distribution`` call in fresh interpreters with and without
``REUSEQ_NO_NUMBA``.
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from reuseq.simulator import _kernels as k

H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

KERNELS = {
    "apply_1q": (k.apply_1q_np, getattr(k, "apply_1q_nb", None), lambda n: (n // 2, H)),
    "apply_cx": (k.apply_cx_np, getattr(k, "apply_cx_nb", None), lambda n: (0, n - 1)),
    "apply_swap": (k.apply_swap_np, getattr(k, "apply_swap_nb", None), lambda n: (1, n - 2)),
    "prob_one": (k.prob_one_np, getattr(k, "prob_one_nb", None), lambda n: (n - 1,)),
}

WHOLE = """
import time
from reuseq.circuit import generate_bv
from reuseq.simulator import exact_distribution, BACKEND
c = generate_bv({n})
exact_distribution(c)
t = time.perf_counter()
for _ in range(3):
    exact_distribution(c)
print(BACKEND, (time.perf_counter() - t) / 3)
"""


def best_time(fn, args, n, repeat):
    state = np.zeros(1 << n, dtype=complex)
    state[0] = 1.0
    fn(state, *args)  # warm-up, triggers compilation for numba
    return min(timeit.repeat(lambda: fn(state, *args), number=1, repeat=repeat))


def whole_circuit(n: int) -> dict[str, float]:
    out = {}
    for flag in ("0", "1"):
        env = dict(os.environ, REUSEQ_NO_NUMBA=flag)
        line = subprocess.run([sys.executable, "-c", WHOLE.format(n=n)], env=env, check=True,
                              capture_output=True, text=True).stdout.split()
        out[line[0]] = float(line[1])
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--qubits", type=int, nargs="+", default=[10, 14, 18, 20])
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    if not k.USE_NUMBA:
        sys.exit("numba is disabled or missing; unset REUSEQ_NO_NUMBA to compare")
    print(f"{'kernel':<11} {'n':>3} {'numpy s':>11} {'numba s':>11} {'speedup':>8}")
    for name, (np_fn, nb_fn, make) in KERNELS.items():
        for n in args.qubits:
            t_np = best_time(np_fn, make(n), n, args.repeat)
            t_nb = best_time(nb_fn, make(n), n, args.repeat)
            print(f"{name:<11} {n:>3} {t_np:>11.3e} {t_nb:>11.3e} {t_np / t_nb:>8.1f}")
    print()
    print(f"{'bv circuit':<11} {'n':>3} {'numpy s':>11} {'numba s':>11} {'speedup':>8}")
    for n in (8, 12, 14):
        t = whole_circuit(n)
        print(f"{'exact_dist':<11} {n:>3} {t['numpy']:>11.3e} {t['numba']:>11.3e} {t['numpy'] / t['numba']:>8.1f}")


if __name__ == "__main__":
    main()
