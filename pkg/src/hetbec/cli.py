"""Command-line interface: run experiments, emit CSV datasets and SVG plots.

Exit codes: 0 success, 2 invalid flags/parameters, 3 numerical failure.
CSV files are UTF-8, comma-separated, header row first, numbers at 17
significant digits; identical flags reproduce byte-identical files.
"""

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .drivers import SweepSpec, oscillation_compare, sweep
from .elliptic import ellip_k, jacobi_sn, oscillation_params
from .errors import ConvergenceError, DomainError, IntegrationError, ParameterError
from .model import ScaledParams
from .quantum import build_hamiltonian, build_sector, diagonalize
from .stationary import (find_steady_states, ground_state_scan, stability_map,
                         swallowtail_bounds)
from .svgplot import emit_svg
from .tridiag import tridiag_eigh

__all__ = ["main", "build_parser"]


def _fmt_cell(v):
    if v is None:
        return "nan"
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    return f"{float(v):.17g}"


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt_cell(v) for v in row) + "\n")
    return path


def _write_meta(args):
    if not getattr(args, "json_meta", False):
        return
    out = getattr(args, "out", None)
    if not out:
        return
    meta = {k: v for k, v in sorted(vars(args).items())
            if k != "func" and isinstance(v, (str, int, float, bool, type(None)))}
    with open(out + ".meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _quantum_numbers(d, n):
    D = int(round(d * n))
    if D / n != d:
        raise ParameterError(
            f"imbalance d={d} is not representable as D/N with N={n}")
    return n, D


def _cmd_ground_state(args):
    deltas = np.linspace(args.delta_min, args.delta_max, args.steps)
    cols = {"delta": deltas}
    if args.mode in ("semiclassical", "both"):
        mf = ground_state_scan(args.lam, args.d, deltas, mode="semiclassical")
        cols["y0_mf"] = mf.y0
        cols["gap_mf"] = mf.gap
    if args.mode in ("quantum", "both"):
        N, D = _quantum_numbers(args.d, args.n)
        q = ground_state_scan(args.lam, args.d, deltas, mode="quantum",
                              N=N, D=D)
        cols["y0_q"] = q.y0
        cols["gap_q"] = q.gap
    header = list(cols.keys())
    write_csv(args.out, header, zip(*cols.values()))
    _write_meta(args)
    if args.svg:
        series = [(name, deltas, cols[name]) for name in header[1:]]
        emit_svg(series, "delta", "y0 / gap", args.svg,
                 title="ground state vs detuning")
    print(f"wrote {args.out} ({args.steps} rows)")
    return 0


def _cmd_spectrum(args):
    N, D = _quantum_numbers(args.d, args.n)
    sector = build_sector(N, D)
    levels = min(args.levels, sector.size)
    deltas = np.linspace(args.delta_min, args.delta_max, args.steps)
    rows = []
    table = np.empty((args.steps, levels))
    for i, dl in enumerate(deltas):
        p = ScaledParams.for_numbers(args.lam, float(dl), N, D)
        spec = diagonalize(build_hamiltonian(sector, p))
        table[i] = spec.eigenvalues[:levels] * (2.0 / N)
        rows.append([dl] + list(table[i]))
    header = ["delta"] + [f"e{k}" for k in range(levels)]
    write_csv(args.out, header, rows)
    _write_meta(args)
    if args.svg:
        series = [(f"e{k}", deltas, table[:, k]) for k in range(levels)]
        emit_svg(series, "delta", "energy per pair", args.svg,
                 title=f"lowest {levels} levels, N={N}")
    print(f"wrote {args.out} ({args.steps} rows x {levels} levels)")
    return 0


def _cmd_steady_states(args):
    p = ScaledParams(lam=args.lam, delta=args.delta, d=args.d)
    states = find_steady_states(p)
    header = ["branch", "phi0", "x0", "y0", "energy", "omega2", "stable",
              "fold"]
    rows = [
        (st.branch, st.phi0, st.x0, st.y0, st.energy, st.omega2,
         None if st.stable is None else st.stable, st.fold)
        for st in states
    ]
    if args.out:
        write_csv(args.out, header, rows)
        _write_meta(args)
        print(f"wrote {args.out} ({len(rows)} states)")
    else:
        print(",".join(header))
        for row in rows:
            print(",".join(_fmt_cell(v) for v in row))
    return 0


def _cmd_swallowtail(args):
    bounds = swallowtail_bounds(args.lam, args.d,
                                window=(args.window_min, args.window_max))
    if bounds is None:
        print("no swallowtail: steady-state count never exceeds 2")
        row = [args.lam, args.d, 0, math.nan, math.nan]
    else:
        lo, hi = bounds
        print(f"three-steady-state interval: delta in [{lo:.6f}, {hi:.6f}]")
        row = [args.lam, args.d, 1, lo, hi]
    if args.out:
        write_csv(args.out, ["lambda", "d", "found", "delta_lo", "delta_hi"],
                  [row])
        _write_meta(args)
    return 0


def _cmd_stability_map(args):
    lams = np.linspace(args.lam_min, args.lam_max, args.res)
    dels = np.linspace(args.delta_min, args.delta_max, args.res)
    smap = stability_map(lams, dels, d=args.d)
    rows = ((lam, dl, bool(smap.unstable[i, j]))
            for i, lam in enumerate(lams)
            for j, dl in enumerate(dels))
    write_csv(args.out, ["lambda", "delta", "unstable"], rows)
    _write_meta(args)
    print(f"wrote {args.out} ({args.res}x{args.res} cells, "
          f"{smap.unstable_count} unstable)")
    return 0


def _cmd_sweep(args):
    n = args.n if args.mode == "quantum" else None
    if n is not None:
        n, D = _quantum_numbers(args.d, n)
    else:
        D = None
    spec = SweepSpec(lam=args.lam, d=args.d, delta_start=args.delta_start,
                     delta_end=args.delta_end, rate=args.rate, eps=args.eps,
                     N=n, D=D)
    res = sweep(spec, mode=args.mode)
    write_csv(args.out, ["tau", "delta", "y"],
              zip(res.taus, res.deltas, res.y))
    _write_meta(args)
    if args.svg:
        emit_svg([("y", res.deltas, res.y)], "delta", "molecular fraction y",
                 args.svg, title=f"sweep, lambda={args.lam}")
    print(f"y_final = {res.y_final:.6f}")
    return 0


def _cmd_evolve(args):
    N, D = _quantum_numbers(args.d, args.n)
    cmp = oscillation_compare(args.lam, args.delta, args.d, N, args.tau_max,
                              sample_dt=args.sample_dt, D=D)
    write_csv(args.out, ["tau", "y_semiclassical", "y_quantum"],
              zip(cmp.taus, cmp.y_semiclassical, cmp.y_quantum))
    _write_meta(args)
    if args.svg:
        emit_svg([("semiclassical", cmp.taus, cmp.y_semiclassical),
                  (f"quantum N={N}", cmp.taus, cmp.y_quantum)],
                 "tau", "molecular fraction y", args.svg,
                 title="population dynamics")
    print(f"wrote {args.out} ({cmp.taus.shape[0]} rows)")
    return 0


def _cmd_oscillation(args):
    if args.delta is not None:
        sol = oscillation_params(args.delta, args.d)
        print(f"y_minus = {sol.y_minus:.12g}")
        print(f"y_plus  = {sol.y_plus:.12g}")
        print(f"modulus = {sol.modulus:.12g}")
        if sol.divergent:
            print("period  = divergent (tanh^2 regime: modulus 1)")
        else:
            print(f"period  = {sol.period:.12g}")
        if args.out:
            write_csv(args.out,
                      ["delta", "y_minus", "y_plus", "modulus", "period"],
                      [(args.delta, sol.y_minus, sol.y_plus, sol.modulus,
                        sol.period)])
            _write_meta(args)
        return 0
    deltas = np.linspace(args.delta_min, args.delta_max, args.steps)
    rows = []
    for dl in deltas:
        sol = oscillation_params(float(dl), args.d)
        rows.append((dl, sol.y_minus, sol.y_plus, sol.modulus, sol.period))
    if not args.out:
        raise ParameterError("scan mode requires --out")
    write_csv(args.out, ["delta", "y_minus", "y_plus", "modulus", "period"],
              rows)
    _write_meta(args)
    if args.svg:
        emit_svg([("amplitude y_minus", deltas, [r[1] for r in rows])],
                 "delta", "oscillation amplitude", args.svg)
    print(f"wrote {args.out} ({args.steps} rows)")
    return 0


def _quad_k(k, n=80):
    nodes, wts = np.polynomial.legendre.leggauss(n)
    theta = 0.25 * np.pi * (nodes + 1.0)
    return float(np.sum(0.25 * np.pi * wts
                        / np.sqrt(1.0 - (k * np.sin(theta)) ** 2)))


def _cmd_selftest(args):
    checks = []

    def check(name, value, expected, tol):
        err = abs(value - expected)
        checks.append((name, err <= tol, err, tol))

    check("K(0) = pi/2", ellip_k(0.0), math.pi / 2.0, 1e-12)
    check("K(0.5) vs quadrature", ellip_k(0.5), _quad_k(0.5), 1e-10)
    check("sn(0.7, 0) = sin", jacobi_sn(0.7, 0.0), math.sin(0.7), 1e-12)
    check("sn(0.7, 1) = tanh", jacobi_sn(0.7, 1.0), math.tanh(0.7), 1e-12)
    u, k = 1.0, 0.7
    lo, hi = 0.0, math.pi / 2.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        nodes, wts = np.polynomial.legendre.leggauss(60)
        theta = 0.5 * mid * (nodes + 1.0)
        f = float(np.sum(0.5 * mid * wts / np.sqrt(1.0 - (k * np.sin(theta)) ** 2)))
        if f < u:
            lo = mid
        else:
            hi = mid
    check("sn(1.0, 0.7) vs inversion", jacobi_sn(u, k),
          math.sin(0.5 * (lo + hi)), 1e-10)
    vals, vecs = tridiag_eigh(np.zeros(2), np.array([0.5]))
    check("2x2 eigenvalues -1/2", vals[0], -0.5, 1e-14)
    check("2x2 eigenvalues +1/2", vals[1], 0.5, 1e-14)
    vals3, _ = tridiag_eigh(np.zeros(3), np.array([1 / math.sqrt(2), 0.5]))
    check("3x3 eigenvalue -sqrt(3)/2", vals3[0], -math.sqrt(3) / 2, 1e-14)
    check("3x3 eigenvalue 0", vals3[1], 0.0, 1e-14)
    rng = np.random.default_rng(7)
    dd = rng.normal(size=80)
    ee = rng.normal(size=79)
    vals_r, vecs_r = tridiag_eigh(dd, ee)
    h = np.diag(dd) + np.diag(ee, 1) + np.diag(ee, -1)
    resid = np.abs(h @ vecs_r - vecs_r * vals_r).max()
    checks.append(("random 80x80 residual", resid <= 1e-11, resid, 1e-11))
    ortho = np.abs(vecs_r.T @ vecs_r - np.eye(80)).max()
    checks.append(("random 80x80 orthonormality", ortho <= 1e-11, ortho, 1e-11))
    ok = True
    for name, passed, err, tol in checks:
        print(f"{'PASS' if passed else 'FAIL'}  {name}  "
              f"(err {err:.2e}, tol {tol:.0e})")
        ok = ok and passed
    if not ok:
        raise ConvergenceError("selftest failed")
    return 0


def build_parser():
    p = argparse.ArgumentParser(
        prog="hetbec",
        description="Three-mode model of two atomic condensates coupled to a "
                    "heteronuclear molecular condensate: exact quantum and "
                    "mean-field solvers.")
    p.add_argument("--version", action="version", version=f"hetbec {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp, out_required=True):
        sp.add_argument("--out", required=out_required,
                        help="output CSV path" + ("" if out_required else " (optional)"))
        sp.add_argument("--svg", default=None, help="also write an SVG plot")
        sp.add_argument("--json-meta", action="store_true",
                        help="dump resolved flags next to the output")

    gs = sub.add_parser("ground-state",
                        help="ground-state fraction and gap vs detuning")
    gs.add_argument("--lambda", dest="lam", type=float, default=0.0)
    gs.add_argument("--d", type=float, default=0.0)
    gs.add_argument("--delta-min", type=float, default=-4.0)
    gs.add_argument("--delta-max", type=float, default=4.0)
    gs.add_argument("--steps", type=int, default=400)
    gs.add_argument("--mode", choices=("semiclassical", "quantum", "both"),
                    default="semiclassical")
    gs.add_argument("--n", type=int, default=100, help="N for quantum mode")
    add_common(gs)
    gs.set_defaults(func=_cmd_ground_state)

    spc = sub.add_parser("spectrum", help="lowest quantum levels vs detuning, "
                                          "rescaled per atom pair")
    spc.add_argument("--lambda", dest="lam", type=float, default=0.0)
    spc.add_argument("--d", type=float, default=0.0)
    spc.add_argument("--n", type=int, default=20)
    spc.add_argument("--delta-min", type=float, default=-6.0)
    spc.add_argument("--delta-max", type=float, default=6.0)
    spc.add_argument("--steps", type=int, default=200)
    spc.add_argument("--levels", type=int, default=5)
    add_common(spc)
    spc.set_defaults(func=_cmd_spectrum)

    ss = sub.add_parser("steady-states",
                        help="all fixed points at one parameter set")
    ss.add_argument("--lambda", dest="lam", type=float, required=True)
    ss.add_argument("--delta", type=float, required=True)
    ss.add_argument("--d", type=float, default=0.0)
    add_common(ss, out_required=False)
    ss.set_defaults(func=_cmd_steady_states)

    sw = sub.add_parser("swallowtail",
                        help="detuning interval with >= 3 steady states")
    sw.add_argument("--lambda", dest="lam", type=float, required=True)
    sw.add_argument("--d", type=float, default=0.0)
    sw.add_argument("--window-min", type=float, default=-12.0)
    sw.add_argument("--window-max", type=float, default=0.0)
    add_common(sw, out_required=False)
    sw.set_defaults(func=_cmd_swallowtail)

    sm = sub.add_parser("stability-map",
                        help="dynamical-instability grid over (lambda, delta)")
    sm.add_argument("--lambda-min", dest="lam_min", type=float, default=-8.0)
    sm.add_argument("--lambda-max", dest="lam_max", type=float, default=0.0)
    sm.add_argument("--delta-min", type=float, default=-6.0)
    sm.add_argument("--delta-max", type=float, default=0.0)
    sm.add_argument("--res", type=int, default=200)
    sm.add_argument("--d", type=float, default=0.0)
    add_common(sm)
    sm.set_defaults(func=_cmd_stability_map)

    swp = sub.add_parser("sweep", help="linear detuning ramp from pure atoms")
    swp.add_argument("--lambda", dest="lam", type=float, required=True)
    swp.add_argument("--d", type=float, default=0.0)
    swp.add_argument("--delta-start", type=float, default=6.0)
    swp.add_argument("--delta-end", type=float, default=-6.0)
    swp.add_argument("--rate", type=float, default=-0.01,
                     help="d(delta)/dtau, negative for downward sweeps")
    swp.add_argument("--eps", type=float, default=1e-8,
                     help="molecular seed fraction (semiclassical mode)")
    swp.add_argument("--mode", choices=("semiclassical", "quantum"),
                     default="semiclassical")
    swp.add_argument("--n", type=int, default=100, help="N for quantum mode")
    add_common(swp)
    swp.set_defaults(func=_cmd_sweep)

    ev = sub.add_parser("evolve", help="quantum vs semiclassical population "
                                       "dynamics on a common grid")
    ev.add_argument("--lambda", dest="lam", type=float, default=0.0)
    ev.add_argument("--delta", type=float, default=0.0)
    ev.add_argument("--d", type=float, default=0.0)
    ev.add_argument("--n", type=int, default=100)
    ev.add_argument("--tau-max", type=float, default=25.0)
    ev.add_argument("--sample-dt", type=float, default=0.02)
    add_common(ev)
    ev.set_defaults(func=_cmd_evolve)

    osc = sub.add_parser("oscillation",
                         help="analytic oscillation amplitude and period")
    osc.add_argument("--d", type=float, required=True)
    osc.add_argument("--delta", type=float, default=None,
                     help="single-point report")
    osc.add_argument("--delta-min", type=float, default=0.0)
    osc.add_argument("--delta-max", type=float, default=4.0)
    osc.add_argument("--steps", type=int, default=200)
    add_common(osc, out_required=False)
    osc.set_defaults(func=_cmd_oscillation)

    st = sub.add_parser("selftest",
                        help="elliptic and eigensolver oracle checks")
    st.set_defaults(func=_cmd_selftest)

    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 0
    try:
        return args.func(args)
    except (ParameterError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, IntegrationError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
