"""Compare the compiled RK4 kernel with the numpy fallback.

    python benchmarks/bench_rk4.py [--steps 20000] [--max-n 8]

Prints microseconds per RK4 step and the speedup for N = 3..max-n, uniform
couplings (omega = 10, a = 1), start state Phi_2.
"""
import argparse
import time

import numpy as np

from spinsep import SpinSystem, basis_vector, build
from spinsep.kernels import BACKENDS, Propagator


def time_backend(h, backend, steps, repeat=3):
    prop = Propagator(h, backend)
    v = basis_vector(2, int(h.dim).bit_length() - 1)
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        prop.run(v, 1e-4, steps, stride=100)
        best = min(best, time.perf_counter() - t0)
    return best / steps * 1e6


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=20000)
    ap.add_argument("--max-n", type=int, default=8)
    args = ap.parse_args()
    print(f"backends available: {', '.join(BACKENDS)}")
    print(f"{'N':>3} {'dim':>5} " + " ".join(f"{b + ' us/step':>16}" for b in BACKENDS)
          + ("  speedup" if len(BACKENDS) > 1 else ""))
    for n in range(3, args.max_n + 1):
        h = build(SpinSystem.uniform(n, 10.0, 1.0))
        per = [time_backend(h, b, args.steps) for b in BACKENDS]
        line = f"{n:>3} {h.dim:>5} " + " ".join(f"{t:16.2f}" for t in per)
        if len(per) > 1:
            line += f"  {per[1] / per[0]:7.1f}x"
        print(line)


if __name__ == "__main__":
    main()
