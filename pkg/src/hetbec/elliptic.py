"""Elliptic special functions and the analytic population-oscillation set.

K(k) is evaluated from the arithmetic-geometric mean, K = pi / (2 AGM(1, k'));
sn(u, k) by the descending-AGM phase recursion (Abramowitz & Stegun 16.4).

Starting from pure atoms at lam = 0, the molecular fraction obeys

    (dy/dtau)^2 = y [ (1-y)^2 - d^2 ] - delta^2 y^2
                = y (y_- - y)(y_+ - y),

with turning points y_-+ the roots of y^2 - (2 + delta^2) y + (1 - d^2) = 0,
so that y(tau) = y_- sn^2(sqrt(y_+) tau / 2, k) with modulus k = sqrt(y_-/y_+)
and period T = 4 K(k) / sqrt(y_+).  At delta = 0, d = 0 the modulus reaches 1,
the period diverges and y(tau) = tanh^2(tau/2).

For general lam the same energy argument gives the quartic

    (dy/dtau)^2 = y [ 1 - d^2 - (dp^2 + 2) y + (1 - dp*lam) y^2
                      - lam^2 y^3 / 4 ],      dp = delta - lam,

handled numerically (no closed-form oscillation exists there).
"""

import math
from dataclasses import dataclass

import numpy as np

from ._backend import jit
from .errors import ConvergenceError, DomainError

__all__ = [
    "ellip_k", "jacobi_sn", "jacobi_sn_cn_dn", "OscillationSolution",
    "oscillation_params", "analytic_y", "quartic_rhs", "turning_points",
    "resonant_period_asymptote", "measured_period",
]

_EPS = 2.220446049250313e-16


@jit()
def _agm(a, b):
    while abs(a - b) > _EPS * abs(a):
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return a


def ellip_k(k):
    """Complete elliptic integral of the first kind, modulus convention.

    K(k) = pi / (2 AGM(1, sqrt(1-k^2))); absolute error below 1e-12 for
    k^2 <= 1 - 1e-10.
    """
    if not 0.0 <= k < 1.0:
        raise DomainError(f"modulus must satisfy 0 <= k < 1, got {k}")
    kp = math.sqrt((1.0 - k) * (1.0 + k))
    return math.pi / (2.0 * _agm(1.0, kp))


@jit()
def _sn_cn_dn(u, k):
    if k == 0.0:
        return math.sin(u), math.cos(u), 1.0
    if k == 1.0:
        t = math.tanh(u)
        c = 1.0 / math.cosh(u)
        return t, c, c
    a = np.empty(32)
    c = np.empty(32)
    a[0] = 1.0
    b = math.sqrt((1.0 - k) * (1.0 + k))
    c[0] = k
    n = 0
    while abs(c[n]) > _EPS * a[n] and n < 31:
        an = 0.5 * (a[n] + b)
        bn = math.sqrt(a[n] * b)
        c[n + 1] = 0.5 * (a[n] - b)
        a[n + 1] = an
        b = bn
        n += 1
    phi = (2.0 ** n) * a[n] * u
    while n > 0:
        arg = c[n] / a[n] * math.sin(phi)
        if arg > 1.0:
            arg = 1.0
        elif arg < -1.0:
            arg = -1.0
        phi = 0.5 * (phi + math.asin(arg))
        n -= 1
    sn = math.sin(phi)
    cn = math.cos(phi)
    dn = math.sqrt(1.0 - (k * sn) * (k * sn))
    return sn, cn, dn


def jacobi_sn(u, k):
    """Jacobi sn(u, k); exact sin/tanh branches at k = 0 and k = 1."""
    if not 0.0 <= k <= 1.0:
        raise DomainError(f"modulus must satisfy 0 <= k <= 1, got {k}")
    return _sn_cn_dn(float(u), float(k))[0]


def jacobi_sn_cn_dn(u, k):
    """The triple (sn, cn, dn) at (u, k)."""
    if not 0.0 <= k <= 1.0:
        raise DomainError(f"modulus must satisfy 0 <= k <= 1, got {k}")
    return _sn_cn_dn(float(u), float(k))


@dataclass(frozen=True)
class OscillationSolution:
    """Turning points, modulus and period of the lam = 0 oscillation.

    y_minus is the peak molecular fraction reached from a pure-atom start;
    period is inf exactly at (delta = 0, d = 0) where the solution degenerates
    to the monotone tanh^2 branch.
    """

    y_minus: float
    y_plus: float
    modulus: float
    period: float

    @property
    def divergent(self):
        return math.isinf(self.period)


def oscillation_params(delta, d) -> OscillationSolution:
    """Turning points and period for the lam = 0 oscillation from pure atoms.

    y_-+ are the roots of y^2 - (2 + delta^2) y + (1 - d^2) = 0 (the
    vanishing bracket of the reduced quartic); y_- computed in the
    cancellation-free form 2(1-d^2)/(q + sqrt(q^2 - 4(1-d^2))).
    """
    if not 0.0 <= d < 1.0:
        raise DomainError(f"imbalance d must lie in [0, 1), got {d}")
    q = 2.0 + delta * delta
    disc = q * q - 4.0 * (1.0 - d * d)
    r = math.sqrt(max(disc, 0.0))
    y_plus = 0.5 * (q + r)
    y_minus = 2.0 * (1.0 - d * d) / (q + r)
    ksq = y_minus / y_plus
    if 1.0 - ksq < 1e-14:
        return OscillationSolution(y_minus=y_minus, y_plus=y_plus,
                                   modulus=1.0, period=math.inf)
    k = math.sqrt(ksq)
    period = 4.0 * ellip_k(k) / math.sqrt(y_plus)
    return OscillationSolution(y_minus=y_minus, y_plus=y_plus, modulus=k,
                               period=period)


def analytic_y(tau, delta, d):
    """Closed-form molecular fraction y(tau) for lam = 0, pure-atom start.

    y = y_- sn^2(sqrt(y_+) tau / 2, k); switches to the tanh branch when
    1 - k^2 < 1e-14.  Accepts scalar or array tau.
    """
    sol = oscillation_params(delta, d)
    half_rate = 0.5 * math.sqrt(sol.y_plus)
    taus = np.asarray(tau, dtype=float)
    if sol.modulus == 1.0:
        out = sol.y_minus * np.tanh(half_rate * taus) ** 2
    else:
        flat = taus.ravel()
        vals = np.empty(flat.shape[0])
        for i in range(flat.shape[0]):
            s, _, _ = _sn_cn_dn(half_rate * flat[i], sol.modulus)
            vals[i] = sol.y_minus * s * s
        out = vals.reshape(taus.shape)
    if np.ndim(tau) == 0:
        return float(out)
    return out


def quartic_rhs(y, delta, lam, d):
    """(dy/dtau)^2 along the pure-atom-energy trajectory (any lam).

    Polynomial y [ 1 - d^2 - (dp^2+2) y + (1 - dp*lam) y^2 - lam^2 y^3/4 ]
    with dp = delta - lam; assumes the pure-atom energy constant
    E = -delta + lam/2.
    """
    y = np.asarray(y, dtype=float)
    dp = delta - lam
    bracket = ((1.0 - d * d) - (dp * dp + 2.0) * y
               + (1.0 - dp * lam) * y * y - 0.25 * lam * lam * y**3)
    out = y * bracket
    if np.ndim(out) == 0:
        return float(out)
    return out


def turning_points(delta, lam, d, n_grid=4000):
    """Real roots of the quartic bracket in [0, 1-d], ascending.

    Bracketed bisection on a dense grid (no companion matrices); endpoint
    roots are included when the bracket vanishes there.
    """
    if not 0.0 <= d < 1.0:
        raise DomainError(f"imbalance d must lie in [0, 1), got {d}")
    dp = delta - lam

    def bracket(y):
        return ((1.0 - d * d) - (dp * dp + 2.0) * y
                + (1.0 - dp * lam) * y * y - 0.25 * lam * lam * y**3)

    hi = 1.0 - d
    ys = np.linspace(0.0, hi, n_grid)
    vals = bracket(ys)
    roots = []
    for endpoint in (0.0, hi):
        if abs(bracket(endpoint)) <= 1e-12:
            roots.append(endpoint)
    for i in range(n_grid - 1):
        a, b = vals[i], vals[i + 1]
        if (a < 0.0 and b > 0.0) or (a > 0.0 and b < 0.0):
            lo, up = ys[i], ys[i + 1]
            fa = a
            for _ in range(200):
                mid = 0.5 * (lo + up)
                fm = bracket(mid)
                if abs(fm) <= 1e-14 or (up - lo) <= 4.4e-16 * max(mid, 1.0):
                    break
                if (fa < 0.0) != (fm < 0.0):
                    up = mid
                else:
                    lo = mid
                    fa = fm
            roots.append(0.5 * (lo + up))
    roots.sort()
    out = []
    for r in roots:
        if not out or r - out[-1] > 1e-9:
            out.append(r)
    return np.array(out)


def resonant_period_asymptote(d):
    """Small-d approximation of the on-resonance period.

    T ~ (2 / sqrt(1+d)) * ln(16/d).  Approximate by construction; compare
    against the exact oscillation_params period rather than trusting it at
    moderate d (deviation reaches the ten-percent scale by d ~ 0.2).
    Diverges (returns inf) at d = 0.
    """
    if not 0.0 <= d < 1.0:
        raise DomainError(f"imbalance d must lie in [0, 1), got {d}")
    if d == 0.0:
        return math.inf
    return 2.0 / math.sqrt(1.0 + d) * math.log(16.0 / d)


def measured_period(delta, d, lam=0.0, tau_max=45.0, sample_dt=0.01,
                    rtol=1e-11):
    """Oscillation period measured from an actual mean-field trajectory.

    Integrates from exact pure atoms, locates successive maxima of y(tau) by
    quadratic interpolation through sampled triples, and returns the mean
    gap over at least three cycles (extending the run if needed).
    """
    from .meanfield import from_canonical, integrate
    from .model import ScaledParams

    p = ScaledParams(lam=lam, delta=delta, d=d)
    s0 = from_canonical(1.0, 0.0, d)
    span = tau_max
    for _ in range(4):
        traj = integrate(s0, p, span, rtol=rtol, sample_dt=sample_dt)
        peaks = _interpolated_maxima(traj.taus, traj.y)
        if len(peaks) >= 4:
            gaps = np.diff(peaks)
            return float(gaps.mean())
        span *= 2.0
    raise ConvergenceError(
        f"fewer than four oscillation maxima up to tau={span / 2:g}")


def _interpolated_maxima(taus, ys):
    peaks = []
    h = taus[1] - taus[0]
    for i in range(1, len(ys) - 1):
        if ys[i - 1] < ys[i] >= ys[i + 1]:
            denom = ys[i - 1] - 2.0 * ys[i] + ys[i + 1]
            off = 0.5 * (ys[i - 1] - ys[i + 1]) / denom if denom != 0.0 else 0.0
            peaks.append(taus[i] + off * h)
    return peaks
