"""Semiclassical dynamics of the three coupled condensate modes.

Two equivalent formulations:

* canonical pair (x, phi): x is the atomic fraction, phi the relative phase
  arg(a1) + arg(a2) - arg(am).  Compact, but singular at x = d and x = 1.
* complex amplitudes (a1, a2, am) with |a1|^2 + |a2|^2 + 2|am|^2 = 1:
  globally regular; this is what the integrator actually steps.

    i da1/dtau = (lam*x/2 - delta/2) a1 + conj(a2) am / sqrt(2)
    i da2/dtau = (lam*x/2 - delta/2) a2 + conj(a1) am / sqrt(2)
    i dam/dtau = a1 a2 / sqrt(2)

The induced (x, phi) motion reproduces the canonical equations wherever both
are defined; that equivalence is enforced by tests, not assumed.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ._backend import jit
from .errors import DomainError, IntegrationError, ParameterError
from .model import ScaledParams
from .quantum import DeltaSchedule, _interp_sched

__all__ = [
    "MeanFieldState", "CanonicalPoint", "MeanFieldTrajectory",
    "convert", "from_canonical", "seeded_atom_state",
    "rhs_canonical", "rhs_amplitudes", "classical_energy",
    "energy_from_amplitudes", "integrate",
]

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class MeanFieldState:
    """Three complex mode amplitudes, |a1|^2 + |a2|^2 + 2|am|^2 = 1."""

    a1: complex
    a2: complex
    am: complex
    tau: float = 0.0

    def norm(self):
        return abs(self.a1) ** 2 + abs(self.a2) ** 2 + 2.0 * abs(self.am) ** 2

    @property
    def x(self):
        """Atomic fraction |a1|^2 + |a2|^2."""
        return abs(self.a1) ** 2 + abs(self.a2) ** 2

    @property
    def y(self):
        """Molecular fraction 2|am|^2 (y/2 molecules per particle pair)."""
        return 2.0 * abs(self.am) ** 2

    @property
    def imbalance(self):
        return abs(self.a1) ** 2 - abs(self.a2) ** 2

    def as_array(self):
        return np.array([self.a1, self.a2, self.am], dtype=np.complex128)


@dataclass(frozen=True)
class CanonicalPoint:
    """Canonical coordinates; phi is None where the phase is undefined
    (some amplitude exactly zero)."""

    x: float
    phi: float | None


def convert(state: MeanFieldState) -> CanonicalPoint:
    """Amplitudes -> (x, phi).  phi wraps to (-pi, pi]."""
    if state.a1 == 0 or state.a2 == 0 or state.am == 0:
        return CanonicalPoint(x=state.x, phi=None)
    phi = cmath.phase(state.a1) + cmath.phase(state.a2) - cmath.phase(state.am)
    phi = math.remainder(phi, 2.0 * math.pi)
    if phi <= -math.pi:
        phi += 2.0 * math.pi
    return CanonicalPoint(x=state.x, phi=phi)


def from_canonical(x, phi, d, tau=0.0) -> MeanFieldState:
    """(x, phi, d) -> amplitudes under the gauge arg a2 = arg am = 0.

    |a1|^2 = (x+d)/2, |a2|^2 = (x-d)/2, |am|^2 = (1-x)/2; the whole relative
    phase phi is carried by a1.
    """
    if not 0.0 <= d < 1.0:
        raise ParameterError(f"d must lie in [0, 1), got {d}")
    if x < d - 1e-12 or x > 1.0 + 1e-12:
        raise DomainError(f"x={x} outside [d, 1] with d={d}")
    x = min(max(x, d), 1.0)
    a1 = math.sqrt((x + d) / 2.0) * cmath.exp(1j * phi)
    a2 = math.sqrt(max((x - d), 0.0) / 2.0)
    am = math.sqrt(max((1.0 - x), 0.0) / 2.0)
    return MeanFieldState(a1=a1, a2=complex(a2), am=complex(am), tau=tau)


def seeded_atom_state(d, eps, phi=math.pi) -> MeanFieldState:
    """Pure atoms with a small molecular seed |am|^2 = eps/2.

    Starting exactly at x = 1 sits on the singular edge of the canonical
    equations; the seed mimics the quantum fluctuation that triggers
    conversion.  Results depending on it must be reported with eps.
    (Sweeps impose the tighter bound eps <= 1e-2 via SweepSpec; the
    comparison driver uses the zero-point scale 1/(2N), which exceeds that
    for small N.)
    """
    if not 0.0 < eps <= 0.1:
        raise ParameterError(f"seed eps must lie in (0, 0.1], got {eps}")
    return from_canonical(1.0 - eps, phi, d)


def rhs_canonical(pt: CanonicalPoint, p: ScaledParams):
    """(dx/dtau, dphi/dtau) at an interior point d < x < 1."""
    x, phi = pt.x, pt.phi
    d = p.d
    if not d < x < 1.0:
        raise DomainError(f"canonical equations singular outside d < x < 1 (x={x})")
    radicand = (1.0 - x) * (x * x - d * d)
    root = math.sqrt(radicand)
    dx = -root * math.sin(phi)
    dphi = p.delta - p.lam * x \
        - (d * d + 2.0 * x - 3.0 * x * x) / (2.0 * root) * math.cos(phi)
    return dx, dphi


def classical_energy(pt, p: ScaledParams):
    """Mean-field energy per atom pair: (lam/2)x^2 - delta x + sqrt(...) cos phi.

    Defined on d <= x <= 1; at the boundaries the radical vanishes and phi is
    irrelevant (phi=None accepted there).
    """
    x = pt.x if isinstance(pt, CanonicalPoint) else float(pt)
    phi = pt.phi if isinstance(pt, CanonicalPoint) else None
    d = p.d
    if x < d - 1e-12 or x > 1.0 + 1e-12:
        raise DomainError(f"x={x} outside [d, 1] with d={d}")
    radicand = max((1.0 - x) * (x * x - d * d), 0.0)
    base = 0.5 * p.lam * x * x - p.delta * x
    if radicand == 0.0:
        return base
    if phi is None:
        raise DomainError("phi required at interior points")
    return base + math.sqrt(radicand) * math.cos(phi)


def energy_from_amplitudes(state, p: ScaledParams, delta=None):
    """Same energy, evaluated from amplitudes (regular at the boundaries)."""
    if delta is None:
        delta = p.delta
    a = state.as_array() if isinstance(state, MeanFieldState) else np.asarray(state)
    x = abs(a[0]) ** 2 + abs(a[1]) ** 2
    return (0.5 * p.lam * x * x - delta * x
            + 2.0 * math.sqrt(2.0) * (a[0] * a[1] * np.conj(a[2])).real)


def rhs_amplitudes(state: MeanFieldState, p: ScaledParams, delta=None):
    """Time derivative of the amplitude triple (globally regular)."""
    if delta is None:
        delta = p.delta
    out = np.empty(3, dtype=np.complex128)
    _amp_rhs(state.as_array(), out, p.lam, float(delta))
    return out


@jit()
def _amp_rhs(a, out, lam, delta):
    x = a[0].real**2 + a[0].imag**2 + a[1].real**2 + a[1].imag**2
    c = 0.5 * (lam * x - delta)
    out[0] = -1j * (c * a[0] + _INV_SQRT2 * a[1].conjugate() * a[2])
    out[1] = -1j * (c * a[1] + _INV_SQRT2 * a[0].conjugate() * a[2])
    out[2] = -1j * (_INV_SQRT2 * a[0] * a[1])


# Dormand-Prince 5(4) tableau (array constants so the kernel can index
# stages with runtime integers under numba)
_DP_C = np.array([0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0])
_DP_A = np.zeros((6, 6))
_DP_A[0, :1] = (0.2,)
_DP_A[1, :2] = (3.0 / 40.0, 9.0 / 40.0)
_DP_A[2, :3] = (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0)
_DP_A[3, :4] = (19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0,
                -212.0 / 729.0)
_DP_A[4, :5] = (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0,
                -5103.0 / 18656.0)
_DP_A[5, :6] = (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0,
                -2187.0 / 6784.0, 11.0 / 84.0)
_DP_B = np.array([35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0,
                  -2187.0 / 6784.0, 11.0 / 84.0, 0.0])
_DP_E = np.array([35.0 / 384.0 - 5179.0 / 57600.0,
                  0.0,
                  500.0 / 1113.0 - 7571.0 / 16695.0,
                  125.0 / 192.0 - 393.0 / 640.0,
                  -2187.0 / 6784.0 + 92097.0 / 339200.0,
                  11.0 / 84.0 - 187.0 / 2100.0,
                  -1.0 / 40.0])


@jit()
def _mf_integrate(a0, lam, sch_t, sch_v, samples, rtol, max_step, h0):
    """Adaptive Dormand-Prince 5(4) over the sample grid.

    Returns (alphas at samples, accepted steps, rejected steps, fail index).
    fail index is -1 on success, otherwise the sample index being integrated
    toward when the step size underflowed.
    """
    nsamp = samples.shape[0]
    out = np.empty((nsamp, 3), np.complex128)
    a = a0.copy()
    out[0] = a
    k = np.empty((7, 3), np.complex128)
    atry = np.empty(3, np.complex128)
    anew = np.empty(3, np.complex128)
    h = h0
    accepted = 0
    rejected = 0
    for j in range(1, nsamp):
        t = samples[j - 1]
        t_end = samples[j]
        while t < t_end:
            h_try = h if h < max_step else max_step
            clipped = False
            if t + h_try >= t_end:
                # land exactly on the sample boundary
                h_try = t_end - t
                clipped = True
            else:
                hmin = 2.22e-16 * max(abs(t), 1.0) * 4.0
                if h_try < hmin:
                    return out, accepted, rejected, j
            delta = _interp_sched(sch_t, sch_v, t)
            _amp_rhs(a, k[0], lam, delta)
            for s in range(1, 7):
                atry[:] = a
                for q in range(s):
                    aqs = _DP_A[s - 1, q]
                    if aqs != 0.0:
                        atry += (h_try * aqs) * k[q]
                delta = _interp_sched(sch_t, sch_v, t + _DP_C[s] * h_try)
                _amp_rhs(atry, k[s], lam, delta)
            anew[:] = a
            for s in range(7):
                if _DP_B[s] != 0.0:
                    anew += (h_try * _DP_B[s]) * k[s]
            errsum = 0.0
            for i in range(3):
                err_i = 0.0 + 0.0j
                for s in range(7):
                    if _DP_E[s] != 0.0:
                        err_i += _DP_E[s] * k[s, i]
                scale = rtol * (1.0 + max(abs(a[i]), abs(anew[i])))
                errsum += (abs(h_try * err_i) / scale) ** 2
            errnorm = math.sqrt(errsum / 3.0)
            if math.isnan(errnorm):
                return out, accepted, rejected, j
            if errnorm <= 1.0:
                accepted += 1
                a[:] = anew
                t = t_end if clipped else t + h_try
                fac = 5.0 if errnorm == 0.0 else min(5.0, max(
                    0.2, 0.9 * errnorm ** -0.2))
                if not clipped:
                    h = h_try * fac
            else:
                rejected += 1
                h = h_try * max(0.2, 0.9 * errnorm ** -0.2)
        out[j] = a
    return out, accepted, rejected, -1


@dataclass(frozen=True)
class MeanFieldTrajectory:
    taus: np.ndarray
    x: np.ndarray
    y: np.ndarray
    phi: np.ndarray
    energy: np.ndarray
    norm: np.ndarray
    imbalance: np.ndarray
    amplitudes: np.ndarray
    final: MeanFieldState
    rtol_used: float
    accepted: int
    rejected: int
    norm_drift: float
    imbalance_drift: float
    energy_drift: float


def _diagnostics(alphas, lam, deltas):
    p1 = np.abs(alphas[:, 0]) ** 2
    p2 = np.abs(alphas[:, 1]) ** 2
    pm = np.abs(alphas[:, 2]) ** 2
    x = p1 + p2
    y = 2.0 * pm
    norm = x + y
    imb = p1 - p2
    defined = (p1 > 0) & (p2 > 0) & (pm > 0)
    phi = np.full(x.shape, np.nan)
    idx = np.nonzero(defined)[0]
    ang = (np.angle(alphas[idx, 0]) + np.angle(alphas[idx, 1])
           - np.angle(alphas[idx, 2]))
    ang = np.remainder(ang + np.pi, 2.0 * np.pi) - np.pi
    ang[ang == -np.pi] = np.pi
    phi[idx] = ang
    energy = (0.5 * lam * x * x - deltas * x
              + 2.0 * math.sqrt(2.0)
              * (alphas[:, 0] * alphas[:, 1] * np.conj(alphas[:, 2])).real)
    return x, y, phi, energy, norm, imb


def integrate(s0: MeanFieldState, p: ScaledParams, tau_max, rtol=1e-10,
              max_step=0.1, sample_dt=None, schedule=None,
              norm_tol=1e-9, imbalance_tol=1e-9, energy_tol=1e-8,
              max_tighten=3) -> MeanFieldTrajectory:
    """Adaptive integration of the amplitude equations.

    Conservation of (norm, imbalance, energy) over the run is measured
    against (norm_tol, imbalance_tol, energy_tol); if the initial tolerance
    misses a target the run is retried with rtol tightened tenfold, up to
    ``max_tighten`` times, before failing explicitly.  The energy check is
    skipped when a time-dependent schedule drives the detuning.
    """
    if abs(s0.norm() - 1.0) > 1e-6:
        raise ParameterError(f"initial state not normalized: norm={s0.norm()}")
    if tau_max <= 0:
        raise ParameterError("tau_max must be positive")
    if schedule is None:
        schedule = DeltaSchedule.constant(p.delta)
    elif isinstance(schedule, (int, float)):
        schedule = DeltaSchedule.constant(schedule)
    if sample_dt is None:
        nsamp = 1001
    else:
        nsamp = max(2, int(round(tau_max / sample_dt)) + 1)
    samples = np.linspace(0.0, float(tau_max), nsamp)
    a0 = s0.as_array()
    check_energy = schedule.is_constant
    rt = rtol
    for attempt in range(max_tighten + 1):
        alphas, acc, rej, fail = _mf_integrate(
            a0, p.lam, schedule.taus, schedule.deltas, samples, rt,
            max_step, min(max_step, 1e-3))
        if fail >= 0:
            raise IntegrationError(
                f"step size underflow at tau={samples[fail - 1]:.6g} "
                f"(rtol={rt:g})", tau_reached=float(samples[fail - 1]))
        deltas = schedule(samples)
        x, y, phi, energy, norm, imb = _diagnostics(alphas, p.lam, deltas)
        ndrift = float(np.abs(norm - norm[0]).max())
        idrift = float(np.abs(imb - imb[0]).max())
        edrift = float(np.abs(energy - energy[0]).max()) if check_energy else 0.0
        ok = (ndrift <= norm_tol and idrift <= imbalance_tol
              and (not check_energy or edrift <= energy_tol))
        if ok:
            final = MeanFieldState(a1=complex(alphas[-1, 0]),
                                   a2=complex(alphas[-1, 1]),
                                   am=complex(alphas[-1, 2]),
                                   tau=float(samples[-1]))
            return MeanFieldTrajectory(
                taus=samples, x=x, y=y, phi=phi, energy=energy, norm=norm,
                imbalance=imb, amplitudes=alphas, final=final, rtol_used=rt,
                accepted=acc, rejected=rej, norm_drift=ndrift,
                imbalance_drift=idrift, energy_drift=edrift)
        rt /= 10.0
    raise IntegrationError(
        f"conservation targets unmet after tightening to rtol={rt * 10:g}: "
        f"norm drift {ndrift:.2e}, imbalance drift {idrift:.2e}, "
        f"energy drift {edrift:.2e}", tau_reached=float(samples[-1]))
