"""Throughput of the batch kernels under both backends.

Usage: python3 benchmarks/bench_kernels.py [--batch 100000] [--repeat 3]

The first numba call compiles (or loads the on-disk cache); it is run once
before timing so the table shows steady-state throughput.
"""

import argparse
import time

import numpy as np

from padic_hl import randmat as rm
from padic_hl.kernels import HAS_NUMBA, get_backend, init_states
from padic_hl.padicring import RingCfg


def _cases(cfg):
    return [
        ("haar her n=2 + SN", lambda s, k: rm.batch_sn("her", rm.batch_haar_her(2, cfg, s, k), cfg, k)),
        ("haar her n=4 + SN", lambda s, k: rm.batch_sn("her", rm.batch_haar_her(4, cfg, s, k), cfg, k)),
        ("haar alt 4x4 + SN", lambda s, k: rm.batch_sn("alt", rm.batch_haar_alt(4, cfg, s, k), cfg, k)),
        ("haar alt 8x8 + SN", lambda s, k: rm.batch_sn("alt", rm.batch_haar_alt(8, cfg, s, k), cfg, k)),
        ("GL_3 ext rejection", lambda s, k: rm.batch_haar_gl(3, cfg, s, True, k)),
        (
            "product her (1,0)x(1,0)",
            lambda s, k: rm.batch_sn(
                "her",
                rm.batch_sandwich(
                    "her",
                    rm.batch_invariant("her", (1, 0), 2, cfg, s, k),
                    rm.batch_double_coset("her", (1, 0), cfg, s, k),
                    cfg,
                    k,
                ),
                cfg,
                k,
            ),
        ),
    ]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--batch", type=int, default=100000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    cfg = RingCfg(3, 8)
    backends = ["numpy"] + (["numba"] if HAS_NUMBA else [])
    print(f"batch={args.batch}, p={cfg.p}, K={cfg.K}")
    print(f"{'kernel':28s}" + "".join(f"{b:>14s}" for b in backends))
    for name, fn in _cases(cfg):
        row = f"{name:28s}"
        for b in backends:
            kern = get_backend(b)
            fn(init_states(0, 0, 8), kern)
            best = float("inf")
            for r in range(args.repeat):
                states = init_states(r, 0, args.batch)
                t0 = time.perf_counter()
                fn(states, kern)
                best = min(best, time.perf_counter() - t0)
            row += f"{args.batch / best / 1e3:11.0f}k/s"
        print(row)
    # same draws under both backends
    if HAS_NUMBA:
        a = rm.batch_haar_her(3, cfg, init_states(1, 0, 1000), get_backend("numpy"))
        b = rm.batch_haar_her(3, cfg, init_states(1, 0, 1000), get_backend("numba"))
        print("backends draw identical matrices:", bool(np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])))


if __name__ == "__main__":
    main()
