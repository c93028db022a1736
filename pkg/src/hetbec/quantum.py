"""Exact quantum treatment at fixed particle numbers.

The conserved pair (N, D) selects a ladder of Fock states |n1, n2, m> with
m = 0 .. (N-D)/2 molecules; the reduced Hamiltonian is real symmetric
tridiagonal over that ladder (energies in units of G).  This module builds
the sector, assembles and diagonalizes the Hamiltonian, extracts ground-state
observables, and time-evolves states under static or ramped detuning.
"""

from dataclasses import dataclass, field

import numpy as np

from ._backend import jit
from .errors import ConvergenceError, IntegrationError, ParameterError
from .model import ScaledParams, _check_integers
from .tridiag import tridiag_eigh

__all__ = [
    "FockSector", "TridiagonalHamiltonian", "Spectrum", "QuantumState",
    "DeltaSchedule", "QuantumTrajectory", "build_sector", "build_hamiltonian",
    "diagonalize", "ground_observables", "GroundObservables",
    "pure_atom_state", "evolve", "evolve_spectral",
]


@dataclass(frozen=True)
class FockSector:
    """Ordered basis |n1, n2, m>, ascending molecule number m."""

    N: int
    D: int
    m: np.ndarray
    n1: np.ndarray
    n2: np.ndarray

    @property
    def size(self):
        return self.m.shape[0]

    @property
    def states(self):
        """Basis as a list of (n1, n2, m) tuples."""
        return list(zip(self.n1.tolist(), self.n2.tolist(), self.m.tolist()))


def build_sector(N, D):
    """Enumerate the conserved-(N, D) sector, ordered by ascending m."""
    _check_integers(N, D)
    m = np.arange((N - D) // 2 + 1, dtype=np.int64)
    n1 = (N - 2 * m + D) // 2
    n2 = (N - 2 * m - D) // 2
    # conservation laws must hold exactly for every basis state
    assert np.all(n1 + n2 + 2 * m == N)
    assert np.all(n1 - n2 == D)
    assert np.all(n1 >= 0) and np.all(n2 >= 0)
    return FockSector(N=N, D=D, m=m, n1=n1, n2=n2)


@dataclass(frozen=True)
class TridiagonalHamiltonian:
    """Reduced Hamiltonian over a FockSector, in units of G.

    diag[m] = (lam/4N)(N-2m)^2 - (delta/2)(N-2m);
    offdiag[m] = sqrt((m+1) n1(m) n2(m)) / sqrt(2N), taken real non-negative
    (coupling phase absorbed into the molecular mode).
    """

    diag: np.ndarray
    offdiag: np.ndarray
    N: int
    D: int

    @property
    def size(self):
        return self.diag.shape[0]

    def norm_scale(self):
        """Infinity-norm bound used to scale residual tolerances."""
        off = 2.0 * np.abs(self.offdiag).max() if self.size > 1 else 0.0
        return max(np.abs(self.diag).max() + off, 1e-300)

    def apply(self, vec):
        """Matrix-vector product (works on matrices column-wise too)."""
        out = self.diag.reshape(-1, *([1] * (vec.ndim - 1))) * vec
        if self.size > 1:
            e = self.offdiag.reshape(-1, *([1] * (vec.ndim - 1)))
            out[:-1] += e * vec[1:]
            out[1:] += e * vec[:-1]
        return out


def build_hamiltonian(sector: FockSector, p: ScaledParams) -> TridiagonalHamiltonian:
    """Assemble the tridiagonal Hamiltonian for a sector (units of G)."""
    if p.N is None:
        raise ParameterError("quantum Hamiltonian requires ScaledParams with N and D")
    if p.N != sector.N or p.D != sector.D:
        raise ParameterError(
            f"sector (N={sector.N}, D={sector.D}) does not match params "
            f"(N={p.N}, D={p.D})")
    N = sector.N
    pairs = (N - 2 * sector.m).astype(np.float64)
    diag = (p.lam / (4.0 * N)) * pairs**2 - (p.delta / 2.0) * pairs
    mf = sector.m.astype(np.float64)
    offdiag = np.sqrt((mf[:-1] + 1.0)
                      * sector.n1[:-1].astype(np.float64)
                      * sector.n2[:-1].astype(np.float64)) / np.sqrt(2.0 * N)
    return TridiagonalHamiltonian(diag=diag, offdiag=offdiag, N=N, D=sector.D)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues ascending; eigenvectors as orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def gap(self):
        if self.eigenvalues.shape[0] < 2:
            return float("nan")
        return float(self.eigenvalues[1] - self.eigenvalues[0])


def diagonalize(h: TridiagonalHamiltonian, check=True) -> Spectrum:
    """Diagonalize, verifying residuals and orthonormality.

    Residual ||Hv - ev|| <= 1e-9 * ||H|| per pair and orthonormality to
    1e-10 are enforced; violation raises ConvergenceError rather than
    returning silent garbage.
    """
    vals, vecs = tridiag_eigh(h.diag, h.offdiag)
    if check:
        scale = h.norm_scale()
        resid = h.apply(vecs.copy()) - vecs * vals[np.newaxis, :]
        worst = np.sqrt((resid**2).sum(axis=0)).max()
        if worst > 1e-9 * scale:
            raise ConvergenceError(
                f"eigen residual {worst:.3e} exceeds 1e-9 * ||H|| = {1e-9 * scale:.3e}")
        ortho = np.abs(vecs.T @ vecs - np.eye(vals.shape[0])).max()
        if ortho > 1e-10:
            raise ConvergenceError(f"eigenvector orthonormality off by {ortho:.3e}")
    return Spectrum(eigenvalues=vals, eigenvectors=vecs)


@dataclass(frozen=True)
class GroundObservables:
    y0: float
    gap: float
    per_pair_energies: np.ndarray


def ground_observables(spec: Spectrum, sector: FockSector) -> GroundObservables:
    """Ground-state molecular fraction y0 = (2/N)<m>, gap, rescaled levels.

    per_pair_energies are the eigenvalues times 2/N (energy per atom pair),
    directly comparable with the semiclassical energy surface.
    """
    if spec.eigenvalues.shape[0] != sector.size:
        raise ParameterError("spectrum size does not match sector")
    v0 = spec.eigenvectors[:, 0]
    y0 = 2.0 / sector.N * float(np.sum(sector.m * v0**2))
    return GroundObservables(
        y0=y0, gap=spec.gap,
        per_pair_energies=spec.eigenvalues * (2.0 / sector.N))


@dataclass(frozen=True)
class QuantumState:
    """State vector over the FockSector ordering at dimensionless time tau."""

    amplitudes: np.ndarray
    time: float = 0.0

    def norm(self):
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def molecular_fraction(self, sector: FockSector):
        p = np.abs(self.amplitudes) ** 2
        return 2.0 / sector.N * float(np.sum(sector.m * p))


def pure_atom_state(sector: FockSector) -> QuantumState:
    """|n1=(N+D)/2, n2=(N-D)/2, m=0>: the standard initial state for dynamics."""
    amp = np.zeros(sector.size, dtype=np.complex128)
    amp[0] = 1.0
    return QuantumState(amplitudes=amp, time=0.0)


@dataclass(frozen=True)
class DeltaSchedule:
    """Piecewise-linear detuning profile delta(tau), clamped at the ends."""

    taus: np.ndarray
    deltas: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.taus, dtype=float)
        v = np.asarray(self.deltas, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or t.shape[0] < 1:
            raise ParameterError("schedule needs matching 1-d knot arrays")
        if np.any(np.diff(t) <= 0):
            raise ParameterError("schedule times must be strictly increasing")
        object.__setattr__(self, "taus", t)
        object.__setattr__(self, "deltas", v)

    @classmethod
    def constant(cls, delta):
        return cls(taus=np.array([0.0]), deltas=np.array([float(delta)]))

    @classmethod
    def linear(cls, delta_start, rate, tau_max):
        return cls(taus=np.array([0.0, float(tau_max)]),
                   deltas=np.array([float(delta_start),
                                    float(delta_start) + rate * float(tau_max)]))

    def __call__(self, tau):
        return np.interp(tau, self.taus, self.deltas)

    @property
    def is_constant(self):
        return bool(np.all(self.deltas == self.deltas[0]))


@dataclass(frozen=True)
class QuantumTrajectory:
    taus: np.ndarray
    y: np.ndarray
    norm: np.ndarray
    final: QuantumState
    step_size: float
    norm_drift: float
    halvings: int


@jit()
def _interp_sched(ts, vs, t):
    n = ts.shape[0]
    if t <= ts[0] or n == 1:
        return vs[0]
    if t >= ts[n - 1]:
        return vs[n - 1]
    i = 0
    while ts[i + 1] < t:
        i += 1
    w = (t - ts[i]) / (ts[i + 1] - ts[i])
    return vs[i] * (1.0 - w) + vs[i + 1] * w


@jit()
def _gauged_rhs(psi, out, t, diag_base, diag_slope, off, sch_t, sch_v):
    """out <- -i (H(t) - <H>) psi.

    Subtracting the instantaneous mean energy is a pure global-phase gauge;
    it removes the fast uniform phase rotation that otherwise dominates the
    RK4 norm error during large-detuning sweeps.
    """
    delta = _interp_sched(sch_t, sch_v, t)
    n = psi.shape[0]
    num = 0.0
    den = 0.0
    for i in range(n):
        h = (diag_base[i] + delta * diag_slope[i]) * psi[i]
        if i > 0:
            h += off[i - 1] * psi[i - 1]
        if i < n - 1:
            h += off[i] * psi[i + 1]
        out[i] = h
        num += (psi[i].conjugate() * h).real
        den += psi[i].real * psi[i].real + psi[i].imag * psi[i].imag
    c = num / den
    for i in range(n):
        out[i] = -1j * (out[i] - c * psi[i])


@jit()
def _evolve_rk4(psi0, diag_base, diag_slope, off, mwts, sch_t, sch_v,
                samples, h_target):
    n = psi0.shape[0]
    nsamp = samples.shape[0]
    psi = psi0.copy()
    k1 = np.empty(n, np.complex128)
    k2 = np.empty(n, np.complex128)
    k3 = np.empty(n, np.complex128)
    k4 = np.empty(n, np.complex128)
    tmp = np.empty(n, np.complex128)
    ys = np.empty(nsamp)
    norms = np.empty(nsamp)
    p2 = psi.real**2 + psi.imag**2
    norms[0] = p2.sum()
    ys[0] = (mwts * p2).sum()
    for j in range(1, nsamp):
        t0 = samples[j - 1]
        t1 = samples[j]
        span = t1 - t0
        nsub = int(np.ceil(span / h_target))
        if nsub < 1:
            nsub = 1
        h = span / nsub
        for i in range(nsub):
            t = t0 + i * h
            _gauged_rhs(psi, k1, t, diag_base, diag_slope, off, sch_t, sch_v)
            for q in range(n):
                tmp[q] = psi[q] + (0.5 * h) * k1[q]
            _gauged_rhs(tmp, k2, t + 0.5 * h, diag_base, diag_slope, off, sch_t, sch_v)
            for q in range(n):
                tmp[q] = psi[q] + (0.5 * h) * k2[q]
            _gauged_rhs(tmp, k3, t + 0.5 * h, diag_base, diag_slope, off, sch_t, sch_v)
            for q in range(n):
                tmp[q] = psi[q] + h * k3[q]
            _gauged_rhs(tmp, k4, t + h, diag_base, diag_slope, off, sch_t, sch_v)
            for q in range(n):
                psi[q] = psi[q] + (h / 6.0) * (k1[q] + 2.0 * k2[q]
                                               + 2.0 * k3[q] + k4[q])
        nrm = 0.0
        yv = 0.0
        for q in range(n):
            pq = psi[q].real * psi[q].real + psi[q].imag * psi[q].imag
            nrm += pq
            yv += mwts[q] * pq
        norms[j] = nrm
        ys[j] = yv
    return ys, norms, psi


def _hamiltonian_pieces(sector, p):
    N = sector.N
    pairs = (N - 2 * sector.m).astype(np.float64)
    diag_base = (p.lam / (4.0 * N)) * pairs**2
    diag_slope = -0.5 * pairs
    mf = sector.m.astype(np.float64)
    off = np.sqrt((mf[:-1] + 1.0)
                  * sector.n1[:-1].astype(np.float64)
                  * sector.n2[:-1].astype(np.float64)) / np.sqrt(2.0 * N)
    mwts = 2.0 * sector.m.astype(np.float64) / N
    return diag_base, diag_slope, off, mwts


def evolve(state0: QuantumState, sector: FockSector, p: ScaledParams,
           schedule, tau_max, sample_dt=None, norm_tol=1e-8, y_tol=1e-8,
           h0=None, max_halvings=26) -> QuantumTrajectory:
    """Integrate i d|psi>/dtau = H(delta(tau)) |psi> with classic RK4.

    The step is halved (rerunning the whole trajectory) until the norm drift
    over the run is within ``norm_tol`` and, when ``y_tol`` is given, the
    sampled molecular fraction agrees with the previous halving to ``y_tol``.
    Drift is measured and reported, never papered over by renormalization.
    Returned amplitudes are defined up to a global phase.
    """
    if p.N != sector.N or p.D != sector.D:
        raise ParameterError("sector does not match params")
    if abs(state0.norm() - 1.0) > 1e-6:
        raise ParameterError(f"initial state not normalized: {state0.norm()}")
    if tau_max <= 0:
        raise ParameterError("tau_max must be positive")
    if isinstance(schedule, (int, float)):
        schedule = DeltaSchedule.constant(schedule)
    diag_base, diag_slope, off, mwts = _hamiltonian_pieces(sector, p)
    if sample_dt is None:
        nsamp = 401
    else:
        nsamp = max(2, int(round(tau_max / sample_dt)) + 1)
    samples = np.linspace(0.0, float(tau_max), nsamp)
    if h0 is None:
        # start below the RK4 stability bound for the gauged spectral spread
        spread = 0.0
        for dl in (schedule.deltas.min(), schedule.deltas.max()):
            dvals = diag_base + dl * diag_slope
            spread = max(spread, float(dvals.max() - dvals.min()))
        radius = spread + (4.0 * float(off.max()) if off.size else 0.0)
        h = min(0.02, tau_max / 8.0, 1.2 / max(radius, 1e-30))
    else:
        h = h0
    prev_y = None
    halvings = 0
    for _ in range(max_halvings + 1):
        ys, norms, psi = _evolve_rk4(
            state0.amplitudes.astype(np.complex128), diag_base, diag_slope,
            off, mwts, schedule.taus, schedule.deltas, samples, h)
        finite = np.all(np.isfinite(norms))
        drift = np.abs(norms - 1.0).max() if finite else np.inf
        if finite and drift <= norm_tol:
            if y_tol is None:
                return QuantumTrajectory(samples, ys, norms,
                                         QuantumState(psi, float(tau_max)),
                                         h, float(drift), halvings)
            if prev_y is not None and np.abs(ys - prev_y).max() <= y_tol:
                return QuantumTrajectory(samples, ys, norms,
                                         QuantumState(psi, float(tau_max)),
                                         h, float(drift), halvings)
            prev_y = ys
        else:
            prev_y = None
        h *= 0.5
        halvings += 1
        if h < 1e-10 * tau_max:
            break
    if finite:
        bad = np.nonzero(np.abs(norms - 1.0) > norm_tol)[0]
    else:
        bad = np.nonzero(~np.isfinite(norms))[0]
    idx = int(bad[0]) if bad.size else nsamp - 1
    tau_reached = float(samples[max(idx - 1, 0)])
    raise IntegrationError(
        f"RK4 step halving failed to reach norm drift {norm_tol:g} "
        f"(drift {drift:.3e} at h={h * 2:.3e})", tau_reached=tau_reached)


def evolve_spectral(state0: QuantumState, sector: FockSector, p: ScaledParams,
                    times) -> QuantumTrajectory:
    """Exact propagation at constant detuning via the eigendecomposition."""
    hmat = build_hamiltonian(sector, p)
    spec = diagonalize(hmat)
    times = np.asarray(times, dtype=float)
    c0 = spec.eigenvectors.T @ state0.amplitudes
    phases = np.exp(-1j * np.outer(spec.eigenvalues, times))
    psis = spec.eigenvectors @ (phases * c0[:, np.newaxis])
    p2 = np.abs(psis) ** 2
    mwts = 2.0 * sector.m.astype(np.float64) / sector.N
    ys = mwts @ p2
    norms = p2.sum(axis=0)
    final = QuantumState(np.ascontiguousarray(psis[:, -1]), float(times[-1]))
    return QuantumTrajectory(times, ys, norms, final, 0.0,
                             float(np.abs(norms - 1.0).max()), 0)
