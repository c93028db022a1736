import math

import numpy as np
import pytest

import hetbec as hb
from hetbec import ParameterError, ScaledParams


def test_sector_small_cases():
    s = hb.build_sector(2, 0)
    assert s.states == [(1, 1, 0), (0, 0, 1)]
    s = hb.build_sector(4, 2)
    assert s.states == [(3, 1, 0), (2, 0, 1)]
    assert hb.build_sector(20, 0).size == 11


@pytest.mark.parametrize("N,D", [(7, 3), (50, 12), (101, 1), (16, 16)])
def test_sector_conservation_laws(N, D):
    s = hb.build_sector(N, D)
    assert s.size == (N - D) // 2 + 1
    assert np.all(s.n1 + s.n2 + 2 * s.m == N)
    assert np.all(s.n1 - s.n2 == D)
    assert np.all(s.n1 >= 0) and np.all(s.n2 >= 0) and np.all(s.m >= 0)


@pytest.mark.parametrize("N,D", [(2, 1), (10, 12), (1, 1), (6, -2)])
def test_sector_rejects_bad_numbers(N, D):
    with pytest.raises(ParameterError):
        hb.build_sector(N, D)


def test_hamiltonian_n2_free():
    h = hb.build_hamiltonian(hb.build_sector(2, 0),
                             ScaledParams.for_numbers(0.0, 0.0, 2, 0))
    assert h.diag == pytest.approx([0.0, 0.0], abs=0.0)
    assert h.offdiag == pytest.approx([0.5], abs=1e-16)


def test_hamiltonian_n4_free():
    h = hb.build_hamiltonian(hb.build_sector(4, 0),
                             ScaledParams.for_numbers(0.0, 0.0, 4, 0))
    assert h.diag == pytest.approx([0.0, 0.0, 0.0], abs=0.0)
    assert h.offdiag == pytest.approx([1.0 / math.sqrt(2.0), 0.5], rel=1e-15)


def test_hamiltonian_interactions():
    h = hb.build_hamiltonian(hb.build_sector(2, 0),
                             ScaledParams.for_numbers(4.0, 1.0, 2, 0))
    assert h.diag == pytest.approx([1.0, 0.0], abs=1e-15)
    assert h.offdiag == pytest.approx([0.5], abs=1e-16)


def test_hamiltonian_mismatch_rejected():
    sector = hb.build_sector(4, 0)
    with pytest.raises(ParameterError):
        hb.build_hamiltonian(sector, ScaledParams.for_numbers(0.0, 0.0, 6, 0))
    with pytest.raises(ParameterError):
        hb.build_hamiltonian(sector, ScaledParams(lam=0.0, delta=0.0))


def test_ground_observables_n2():
    sector = hb.build_sector(2, 0)
    spec = hb.diagonalize(hb.build_hamiltonian(
        sector, ScaledParams.for_numbers(0.0, 0.0, 2, 0)))
    obs = hb.ground_observables(spec, sector)
    assert obs.gap == pytest.approx(1.0, abs=1e-12)
    assert obs.y0 == pytest.approx(0.5, abs=1e-12)
    assert obs.per_pair_energies == pytest.approx([-0.5, 0.5], abs=1e-12)


def test_large_positive_detuning_keeps_atoms():
    sector = hb.build_sector(20, 0)
    spec = hb.diagonalize(hb.build_hamiltonian(
        sector, ScaledParams.for_numbers(0.0, 50.0, 20, 0)))
    assert hb.ground_observables(spec, sector).y0 < 1e-2


def test_quantum_approaches_semiclassical():
    # finite-N ground fraction approaches the mean-field value as N grows
    for delta in (-2.0, -1.0, 0.0):
        y_mf = hb.ground_state(ScaledParams(lam=0.0, delta=delta, d=0.0)).y0
        devs = {}
        for N in (10, 100):
            sector = hb.build_sector(N, 0)
            spec = hb.diagonalize(hb.build_hamiltonian(
                sector, ScaledParams.for_numbers(0.0, delta, N, 0)))
            devs[N] = abs(hb.ground_observables(spec, sector).y0 - y_mf)
        assert devs[100] < devs[10]
        assert devs[100] <= 0.05


def test_spectrum_gap_always_positive_at_finite_n():
    sector = hb.build_sector(60, 0)
    gaps = []
    for delta in np.linspace(-3.0, 3.0, 31):
        spec = hb.diagonalize(hb.build_hamiltonian(
            sector, ScaledParams.for_numbers(0.0, float(delta), 60, 0)))
        gaps.append(spec.gap)
    assert min(gaps) > 0.0


def test_evolve_stationary_state_is_constant():
    sector = hb.build_sector(20, 0)
    p = ScaledParams.for_numbers(1.0, -0.5, 20, 0)
    spec = hb.diagonalize(hb.build_hamiltonian(sector, p))
    g = hb.QuantumState(spec.eigenvectors[:, 0].astype(np.complex128), 0.0)
    traj = hb.evolve(g, sector, p, p.delta, 15.0, sample_dt=0.05)
    assert np.abs(traj.y - traj.y[0]).max() < 1e-8
    assert traj.norm_drift <= 1e-8


def test_evolve_rabi_two_level():
    sector = hb.build_sector(2, 0)
    p = ScaledParams.for_numbers(0.0, 0.0, 2, 0)
    traj = hb.evolve(hb.pure_atom_state(sector), sector, p, 0.0, 20.0,
                     sample_dt=0.05)
    assert np.abs(traj.y - np.sin(traj.taus / 2.0) ** 2).max() < 1e-8


def test_evolve_matches_spectral_propagation():
    sector = hb.build_sector(40, 0)
    p = ScaledParams.for_numbers(0.0, -1.0, 40, 0)
    stepped = hb.evolve(hb.pure_atom_state(sector), sector, p, p.delta, 20.0,
                        sample_dt=0.05)
    exact = hb.evolve_spectral(hb.pure_atom_state(sector), sector, p,
                               stepped.taus)
    assert np.abs(stepped.y - exact.y).max() <= 1e-8
    assert stepped.norm_drift <= 1e-8


def test_evolve_rejects_bad_inputs():
    sector = hb.build_sector(4, 0)
    p = ScaledParams.for_numbers(0.0, 0.0, 4, 0)
    bad = hb.QuantumState(np.array([1.0, 1.0, 0.0], dtype=complex), 0.0)
    with pytest.raises(ParameterError):
        hb.evolve(bad, sector, p, 0.0, 1.0)
    with pytest.raises(ParameterError):
        hb.evolve(hb.pure_atom_state(sector), sector, p, 0.0, -1.0)


def test_schedule_piecewise_linear():
    sched = hb.DeltaSchedule(np.array([0.0, 2.0, 4.0]),
                             np.array([1.0, -1.0, -1.0]))
    assert sched(-1.0) == 1.0
    assert sched(1.0) == 0.0
    assert sched(3.0) == -1.0
    assert sched(9.0) == -1.0
    with pytest.raises(ParameterError):
        hb.DeltaSchedule(np.array([0.0, 0.0]), np.array([1.0, 2.0]))


def test_swept_evolution_tracks_ground_state():
    # slow ramp through resonance converts atoms to molecules (N=40)
    N = 40
    sector = hb.build_sector(N, 0)
    p = ScaledParams.for_numbers(0.0, 4.0, N, 0)
    sched = hb.DeltaSchedule.linear(4.0, -0.05, 160.0)
    traj = hb.evolve(hb.pure_atom_state(sector), sector, p, sched, 160.0,
                     sample_dt=0.5, y_tol=1e-5)
    assert traj.norm_drift <= 1e-8
    assert traj.y[-1] > 0.9
