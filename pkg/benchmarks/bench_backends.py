#!/usr/bin/env python3
"""Benchmark the numba-jitted kernels against the pure NumPy/Python fallback.

Run with no arguments: spawns one worker subprocess per backend
(HETBEC_NUMBA=1 / HETBEC_NUMBA=0), times each hot kernel after a warmup call
(so JIT compilation is excluded), and prints a comparison table.
"""

import argparse
import json
import os
import subprocess
import sys
import time

HERE = os.path.abspath(__file__)


def _timeit(fn, repeats=3):
    fn()  # warmup (includes JIT compilation on the numba backend)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run_worker():
    import numpy as np

    import hetbec as hb
    from hetbec.meanfield import _mf_integrate
    from hetbec.quantum import _evolve_rk4, _hamiltonian_pieces

    results = {"backend": hb.backend_name()}

    # symmetric tridiagonal eigensolver, n = 300
    rng = np.random.default_rng(1)
    dvals = rng.normal(size=300)
    evals = rng.normal(size=299)
    results["tridiag_eigh n=300"] = _timeit(
        lambda: hb.tridiag_eigh(dvals, evals))

    # adaptive mean-field trajectory, tau = 200
    a0 = hb.seeded_atom_state(0.2, 1e-8).as_array()
    samples = np.linspace(0.0, 200.0, 401)
    sch_t = np.array([0.0])
    sch_v = np.array([-1.0])
    results["meanfield trajectory tau=200"] = _timeit(
        lambda: _mf_integrate(a0, -2.0, sch_t, sch_v, samples, 1e-11, 0.1,
                              1e-3))

    # quantum RK4 evolution, N = 200, tau = 10 at fixed step
    sector = hb.build_sector(200, 0)
    p = hb.ScaledParams.for_numbers(0.0, 0.0, 200, 0)
    db, ds, off, mwts = _hamiltonian_pieces(sector, p)
    psi0 = np.zeros(sector.size, np.complex128)
    psi0[0] = 1.0
    qsamples = np.linspace(0.0, 10.0, 101)
    results["quantum rk4 N=200 tau=10"] = _timeit(
        lambda: _evolve_rk4(psi0.copy(), db, ds, off, mwts, sch_t, sch_v,
                            qsamples, 1e-3))

    # stability map, 40 x 40 cells
    lams = np.linspace(-8.0, 0.0, 40)
    dels = np.linspace(-6.0, 0.0, 40)
    results["stability map 40x40"] = _timeit(
        lambda: hb.stability_map(lams, dels, d=0.0), repeats=2)

    # elliptic sn over a 20k-point grid
    taus = np.linspace(0.0, 50.0, 20000)
    results["analytic_y 20k points"] = _timeit(
        lambda: hb.analytic_y(taus, 1.0, 0.2), repeats=2)

    print(json.dumps(results))


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--worker", action="store_true")
    args = parser.parse_args()
    if args.worker:
        run_worker()
        return

    rows = {}
    for flag in ("1", "0"):
        env = dict(os.environ, HETBEC_NUMBA=flag,
                   NUMBA_THREADING_LAYER=os.environ.get(
                       "NUMBA_THREADING_LAYER", "workqueue"))
        out = subprocess.run([sys.executable, HERE, "--worker"], env=env,
                             capture_output=True, text=True, check=True)
        data = json.loads(out.stdout.strip().splitlines()[-1])
        rows[data.pop("backend")] = data

    numba, numpy_ = rows["numba"], rows["numpy"]
    width = max(len(k) for k in numba)
    print(f"{'kernel':<{width}}  {'numba':>10}  {'numpy':>10}  {'speedup':>8}")
    for key in numba:
        a, b = numba[key], numpy_[key]
        print(f"{key:<{width}}  {a * 1e3:>8.2f}ms  {b * 1e3:>8.2f}ms  "
              f"{b / a:>7.1f}x")


if __name__ == "__main__":
    main()
