"""The numba kernels and their pure-Python/NumPy fallbacks must agree.

With HETBEC_NUMBA=0 these comparisons become trivial (same function), so
they are skipped there; the environment-flag path itself is exercised by
running this file under that flag.
"""

import math

import numpy as np
import pytest

import hetbec as hb
from hetbec._backend import NUMBA_ENABLED
from hetbec.meanfield import _mf_integrate
from hetbec.quantum import _evolve_rk4, _hamiltonian_pieces
from hetbec.stationary import _map_kernel, _map_numpy, _scan_grid
from hetbec.tridiag import _tqli

needs_numba = pytest.mark.skipif(not NUMBA_ENABLED,
                                 reason="fallback backend already active")


@needs_numba
def test_stability_map_backends_agree():
    lams = np.linspace(-8.0, 0.0, 25)
    dels = np.linspace(-6.0, 0.0, 25)
    for d in (0.0, 0.2):
        xs, qs = _scan_grid(d, 2000)
        a = np.zeros((25, 25), np.bool_)
        _map_kernel(lams, dels, d, xs, qs, a)
        b = np.zeros((25, 25), np.bool_)
        _map_numpy(lams, dels, d, xs, qs, b)
        assert np.array_equal(a, b)


@needs_numba
def test_tridiag_kernel_fallback_agrees():
    rng = np.random.default_rng(31)
    d = rng.normal(size=30)
    e = rng.normal(size=30)
    e[-1] = 0.0
    d1, e1, z1 = d.copy(), e.copy(), np.eye(30)
    d2, e2, z2 = d.copy(), e.copy(), np.eye(30)
    assert _tqli(d1, e1, z1, 50) == 0
    assert _tqli.py_func(d2, e2, z2, 50) == 0
    assert np.allclose(d1, d2, rtol=0.0, atol=1e-13)
    assert np.allclose(np.abs(z1), np.abs(z2), rtol=0.0, atol=1e-10)


@needs_numba
def test_meanfield_kernel_fallback_agrees():
    a0 = hb.from_canonical(0.9, math.pi / 3.0, 0.1).as_array()
    samples = np.linspace(0.0, 5.0, 26)
    sch_t = np.array([0.0])
    sch_v = np.array([0.4])
    args = (a0, -2.0, sch_t, sch_v, samples, 1e-10, 0.1, 1e-3)
    out1, acc1, _, st1 = _mf_integrate(*args)
    out2, acc2, _, st2 = _mf_integrate.py_func(*args)
    assert st1 == st2 == -1
    assert acc1 == acc2
    assert np.allclose(out1, out2, rtol=0.0, atol=1e-13)


@needs_numba
def test_quantum_kernel_fallback_agrees():
    sector = hb.build_sector(12, 2)
    p = hb.ScaledParams.for_numbers(1.0, -0.5, 12, 2)
    db, ds, off, mwts = _hamiltonian_pieces(sector, p)
    psi0 = np.zeros(sector.size, np.complex128)
    psi0[0] = 1.0
    samples = np.linspace(0.0, 4.0, 21)
    sch_t = np.array([0.0])
    sch_v = np.array([-0.5])
    y1, n1, _ = _evolve_rk4(psi0.copy(), db, ds, off, mwts, sch_t, sch_v,
                            samples, 1e-3)
    y2, n2, _ = _evolve_rk4.py_func(psi0.copy(), db, ds, off, mwts, sch_t,
                                    sch_v, samples, 1e-3)
    assert np.allclose(y1, y2, rtol=0.0, atol=1e-13)
    assert np.allclose(n1, n2, rtol=0.0, atol=1e-13)
