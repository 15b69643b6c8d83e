#!/usr/bin/env python3
"""Time the compiled overlap kernels against the pure NumPy reference.

Runs the two hot calls on scheme-1 channel parameters: the vectorized
v-slice integrand (the adaptive quadrature's inner loop) and the dense
midpoint oracle.  Reports best-of wall times, the speedup, and the worst
disagreement between the backends.
"""
import argparse
import time

import numpy as np

from polcascade import _purekernels
from polcascade.cascade import enumerate_channels
from polcascade.model import scheme_preset

try:
    from polcascade import _fastkernels
except ImportError:
    _fastkernels = None


def kernel_cases():
    chans = {(c.pol, c.branch): c
             for c in enumerate_channels(scheme_preset(1))}
    a = chans[("H", "LP")]
    b = chans[("V", "LP")]
    window = 0.2

    def args(ch_a, ch_b):
        e_xx_a = ch_a.photon1 + ch_a.photon2
        e_xx_b = ch_b.photon1 + ch_b.photon2
        return (ch_a.photon1 - window / 2, ch_a.photon1 + window / 2,
                e_xx_a, ch_a.xx_total_width, e_xx_b, ch_b.xx_total_width,
                ch_a.intermediate.energy, ch_a.intermediate.linewidth,
                ch_b.intermediate.energy, ch_b.intermediate.linewidth,
                1.0)

    return (("equal poles (arctan path)", args(a, a)),
            ("distinct poles (log path)", args(a, b)))


def best_of(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=200000,
                    help="v-grid size for the integrand call")
    ap.add_argument("--midpoint-n", type=int, default=1500,
                    help="midpoint rule uses an n x n grid")
    ap.add_argument("--repeats", type=int, default=5,
                    help="keep the best of this many runs")
    opts = ap.parse_args()

    if _fastkernels is None:
        print("compiled backend not importable; nothing to compare")
        return 1

    for label, base in kernel_cases():
        k1_lo, k1_hi = base[0], base[1]
        center_v = base[6]
        vs = np.linspace(center_v - 0.1, center_v + 0.1, opts.points)

        print(f"\n{label}")
        t_py, ref = best_of(lambda: _purekernels.overlap_integrand(
            vs, *base), opts.repeats)
        t_cy, got = best_of(lambda: _fastkernels.overlap_integrand(
            vs, *base), opts.repeats)
        dev = float(np.max(np.abs(got - ref)))
        scale = float(np.max(np.abs(ref)))
        print(f"  integrand, {opts.points} points: "
              f"python {t_py * 1e3:8.2f} ms  cython {t_cy * 1e3:8.2f} ms  "
              f"speedup {t_py / t_cy:5.1f}x  rel dev {dev / scale:.1e}")

        n = opts.midpoint_n
        mid = (k1_lo, k1_hi, n, center_v - 0.1, center_v + 0.1, n) + base[2:]
        t_py, ref = best_of(lambda: _purekernels.midpoint_overlap(*mid),
                            opts.repeats)
        t_cy, got = best_of(lambda: _fastkernels.midpoint_overlap(*mid),
                            opts.repeats)
        dev = abs(got - ref) / abs(ref)
        print(f"  midpoint,  {n} x {n} grid:  "
              f"python {t_py * 1e3:8.2f} ms  cython {t_cy * 1e3:8.2f} ms  "
              f"speedup {t_py / t_cy:5.1f}x  rel dev {dev:.1e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
