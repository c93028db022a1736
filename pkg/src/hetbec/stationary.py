"""Fixed points of the mean-field flow and the stability phase diagram.

Interior steady states solve

    delta - lam*x - s * (d^2 + 2x - 3x^2) / (2 sqrt((1-x)(x^2-d^2))) = 0

for s = cos(phi0) in {+1, -1}; the boundary configurations x = d (species 2
depleted; pure molecule when d = 0) and x = 1 (pure atoms) are always listed
as candidates.  The squared excitation frequency of an interior state,

    omega^2 = [ (d^2+2x-3x^2)^2 / (4(1-x)(x^2-d^2)) + 3x - 1 ] cos^2(phi0)
              - lam * sqrt((1-x)(x^2-d^2)) * cos(phi0),

is the semiclassical gap when positive and flags dynamical instability when
negative.  Root finding is a dense sign-change scan plus bisection; the
stability map evaluates the same criterion per (lam, delta) cell with a
numba kernel (parallel over rows) or a vectorized NumPy path under
``HETBEC_NUMBA=0``.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._backend import NUMBA_ENABLED, jit, prange
from .errors import DomainError, ParameterError
from .meanfield import CanonicalPoint, classical_energy
from .model import ScaledParams
from .quantum import build_hamiltonian, build_sector, diagonalize, ground_observables

__all__ = [
    "SteadyState", "StabilityMap", "GroundStateScan",
    "find_steady_states", "ground_state", "excitation_frequency",
    "ground_state_scan", "stability_map", "swallowtail_bounds",
]

_SCAN_MARGIN = 1e-9
_ROOT_FTOL = 1e-12
_FOLD_SEP = 1e-6
_UNSTABLE_TOL = -1e-10
_MAX_ROOTS = 32


@jit()
def _qfun(x, d):
    """Coefficient of cos(phi) in dphi/dtau (diverges at x=d for d>0)."""
    return (d * d + 2.0 * x - 3.0 * x * x) / (
        2.0 * math.sqrt((1.0 - x) * (x * x - d * d)))


@jit()
def _branch_f(x, lam, delta, d, s):
    return delta - lam * x - s * _qfun(x, d)


@jit()
def _omega2_scalar(x0, cosphi, lam, d):
    radicand = (1.0 - x0) * (x0 * x0 - d * d)
    num = d * d + 2.0 * x0 - 3.0 * x0 * x0
    return ((num * num / (4.0 * radicand) + 3.0 * x0 - 1.0) * cosphi * cosphi
            - lam * math.sqrt(radicand) * cosphi)


@jit()
def _bisect(lo, hi, lam, delta, d, s):
    flo = _branch_f(lo, lam, delta, d, s)
    mid = 0.5 * (lo + hi)
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        fm = _branch_f(mid, lam, delta, d, s)
        if abs(fm) <= _ROOT_FTOL or (hi - lo) <= 4.4e-16 * max(abs(mid), 1.0):
            return mid
        if (flo < 0.0) != (fm < 0.0):
            hi = mid
        else:
            lo = mid
            flo = fm
    return mid


@jit()
def _roots_on_branch(lam, delta, d, s, xs, qs, roots, folds):
    """Sign-change scan + bisection on one cos(phi0) branch.

    Brackets in adjacent grid cells trigger one local rescan at 10x density
    (double roots near fold points approach each other).  Roots closer than
    _FOLD_SEP are merged and flagged as folds.  Returns the root count.
    """
    n = xs.shape[0]
    brackets = np.empty(_MAX_ROOTS, np.int64)
    nbr = 0
    prev = delta - lam * xs[0] - s * qs[0]
    for i in range(1, n):
        cur = delta - lam * xs[i] - s * qs[i]
        if ((prev < 0.0 and cur >= 0.0) or (prev > 0.0 and cur <= 0.0)):
            if nbr < _MAX_ROOTS:
                brackets[nbr] = i - 1
                nbr += 1
        prev = cur
    count = 0
    k = 0
    while k < nbr:
        i = brackets[k]
        if k + 1 < nbr and brackets[k + 1] == i + 1:
            # refinement pass: rescan the two cells at 10x density
            lo = xs[i]
            hi = xs[i + 2]
            m = 21
            step = (hi - lo) / (m - 1)
            fprev = _branch_f(lo, lam, delta, d, s)
            for j in range(1, m):
                xj = lo + j * step
                fcur = _branch_f(xj, lam, delta, d, s)
                if ((fprev < 0.0 and fcur >= 0.0)
                        or (fprev > 0.0 and fcur <= 0.0)):
                    if count < _MAX_ROOTS:
                        roots[count] = _bisect(xj - step, xj, lam, delta, d, s)
                        count += 1
                fprev = fcur
            k += 2
        else:
            if count < _MAX_ROOTS:
                roots[count] = _bisect(xs[i], xs[i + 1], lam, delta, d, s)
                count += 1
            k += 1
    # merge fold pairs (ascending scan order)
    out = 0
    j = 0
    while j < count:
        if j + 1 < count and roots[j + 1] - roots[j] < _FOLD_SEP:
            roots[out] = 0.5 * (roots[j] + roots[j + 1])
            folds[out] = 1
            j += 2
        else:
            roots[out] = roots[j]
            folds[out] = 0
            j += 1
        out += 1
    return out


@jit(parallel=True)
def _map_kernel(lams, deltas, d, xs, qs, out):
    for il in prange(lams.shape[0]):
        roots = np.empty(_MAX_ROOTS, np.float64)
        folds = np.empty(_MAX_ROOTS, np.int8)
        lam = lams[il]
        for jd in range(deltas.shape[0]):
            unstable = False
            for sidx in range(2):
                s = 1.0 if sidx == 0 else -1.0
                cnt = _roots_on_branch(lam, deltas[jd], d, s, xs, qs,
                                       roots, folds)
                for kk in range(cnt):
                    if _omega2_scalar(roots[kk], s, lam, d) < _UNSTABLE_TOL:
                        unstable = True
            out[il, jd] = unstable


def _q_numpy(x, d):
    return (d * d + 2.0 * x - 3.0 * x * x) / (
        2.0 * np.sqrt((1.0 - x) * (x * x - d * d)))


def _omega2_numpy(x0, cosphi, lam, d):
    radicand = (1.0 - x0) * (x0 * x0 - d * d)
    num = d * d + 2.0 * x0 - 3.0 * x0 * x0
    return ((num * num / (4.0 * radicand) + 3.0 * x0 - 1.0) * cosphi * cosphi
            - lam * np.sqrt(radicand) * cosphi)


def _map_numpy(lams, deltas, d, xs, qs, out):
    """Vectorized fallback with the same scan/bisect/refine semantics.

    Cells whose brackets land in adjacent grid cells (fold neighborhoods)
    are recomputed through the scalar path so both backends agree.
    """
    roots_buf = np.empty(_MAX_ROOTS, np.float64)
    folds_buf = np.empty(_MAX_ROOTS, np.int8)
    scan = getattr(_roots_on_branch, "py_func", _roots_on_branch)
    for il, lam in enumerate(lams):
        for s in (1.0, -1.0):
            g = lam * xs + s * qs
            gl = g[:-1]
            gr = g[1:]
            # strict-sign-before / weak-sign-after crossing, as in the scan
            up = (deltas[:, None] > gl[None, :]) & (deltas[:, None] <= gr[None, :])
            dn = (deltas[:, None] < gl[None, :]) & (deltas[:, None] >= gr[None, :])
            dj, ci = np.nonzero(up | dn)
            if dj.size == 0:
                continue
            adjacent = np.zeros(dj.shape[0], bool)
            same = (dj[1:] == dj[:-1]) & (ci[1:] == ci[:-1] + 1)
            adjacent[1:] |= same
            adjacent[:-1] |= same
            scalar_rows = np.unique(dj[adjacent])
            keep = ~np.isin(dj, scalar_rows)
            djv, civ = dj[keep], ci[keep]
            if djv.size:
                lo = xs[civ].copy()
                hi = xs[civ + 1].copy()
                dv = deltas[djv]
                flo = dv - lam * lo - s * _q_numpy(lo, d)
                root = np.empty(djv.shape[0])
                done = np.zeros(djv.shape[0], bool)
                for _ in range(120):
                    mid = 0.5 * (lo + hi)
                    fm = dv - lam * mid - s * _q_numpy(mid, d)
                    hit = ((np.abs(fm) <= _ROOT_FTOL)
                           | ((hi - lo) <= 4.4e-16 * np.maximum(np.abs(mid), 1.0)))
                    newly = hit & ~done
                    root[newly] = mid[newly]
                    done |= hit
                    if done.all():
                        break
                    move = ~done
                    sgn = (flo < 0.0) != (fm < 0.0)
                    hi = np.where(move & sgn, mid, hi)
                    grow = move & ~sgn
                    lo = np.where(grow, mid, lo)
                    flo = np.where(grow, fm, flo)
                root[~done] = 0.5 * (lo + hi)[~done]
                bad = _omega2_numpy(root, s, lam, d) < _UNSTABLE_TOL
                np.logical_or.at(out[il], djv[bad], True)
            for row in scalar_rows:
                cnt = scan(lam, deltas[row], d, s, xs, qs, roots_buf, folds_buf)
                for kk in range(cnt):
                    if _omega2_scalar(roots_buf[kk], s, lam, d) < _UNSTABLE_TOL:
                        out[il, row] = True


@dataclass(frozen=True)
class SteadyState:
    """One fixed point of the mean-field equations.

    omega2/stable are None where the linearization is not evaluated
    (boundary states away from the lam=0, d=0 pure-molecule closed form).
    fold marks a merged double root at a fold point.
    """

    x0: float
    y0: float
    phi0: float | None
    branch: str
    energy: float
    omega2: float | None
    stable: bool | None
    fold: bool = False


def excitation_frequency(x0, phi0, p: ScaledParams):
    """Squared small-oscillation frequency at an interior fixed point."""
    if not p.d < x0 < 1.0:
        raise DomainError(f"x0={x0} not interior to ({p.d}, 1)")
    return float(_omega2_scalar(float(x0), math.cos(phi0), p.lam, p.d))


def _scan_grid(d, n_grid):
    xs = np.linspace(d + _SCAN_MARGIN, 1.0 - _SCAN_MARGIN, n_grid)
    return xs, _q_numpy(xs, d)


def _interior_roots(p, xs, qs):
    roots_buf = np.empty(_MAX_ROOTS, np.float64)
    folds_buf = np.empty(_MAX_ROOTS, np.int8)
    found = []
    for s, phi0 in ((1.0, 0.0), (-1.0, math.pi)):
        cnt = _roots_on_branch(p.lam, p.delta, p.d, s, xs, qs,
                               roots_buf, folds_buf)
        for k in range(cnt):
            found.append((float(roots_buf[k]), phi0, s, bool(folds_buf[k])))
    return found


def find_steady_states(p: ScaledParams, n_grid=2000):
    """All steady states at the given parameters, sorted by energy.

    Interior roots come from a 2000-point sign-change scan on
    (d + 1e-9, 1 - 1e-9) for both phase branches, refined by bisection to
    |f| <= 1e-12; the two boundary configurations are always appended.  The
    pure-molecule boundary at lam = 0, d = 0 carries its closed-form
    frequency sqrt(delta^2 - 1); other boundary states are reported with
    omega2 = None (not evaluated).
    """
    xs, qs = _scan_grid(p.d, n_grid)
    states = []
    for x0, phi0, s, fold in _interior_roots(p, xs, qs):
        w2 = float(_omega2_scalar(x0, s, p.lam, p.d))
        states.append(SteadyState(
            x0=x0, y0=1.0 - x0, phi0=phi0,
            branch="phi=0" if s > 0 else "phi=pi",
            energy=classical_energy(CanonicalPoint(x0, phi0), p),
            omega2=w2, stable=bool(w2 > 0.0), fold=fold))
    if p.lam == 0.0 and p.d == 0.0:
        w2 = p.delta * p.delta - 1.0
        b_low = SteadyState(x0=0.0, y0=1.0, phi0=None, branch="boundary-x=d",
                            energy=classical_energy(0.0, p),
                            omega2=w2, stable=bool(w2 > 0.0))
    else:
        b_low = SteadyState(x0=p.d, y0=1.0 - p.d, phi0=None,
                            branch="boundary-x=d",
                            energy=classical_energy(p.d, p),
                            omega2=None, stable=None)
    states.append(b_low)
    states.append(SteadyState(x0=1.0, y0=0.0, phi0=None, branch="boundary-x=1",
                              energy=classical_energy(1.0, p),
                              omega2=None, stable=None))
    states.sort(key=lambda st: (st.energy, st.x0))
    return states


def ground_state(p: ScaledParams, n_grid=2000) -> SteadyState:
    return find_steady_states(p, n_grid)[0]


@dataclass(frozen=True)
class GroundStateScan:
    deltas: np.ndarray
    y0: np.ndarray
    gap: np.ndarray
    mode: str


def ground_state_scan(lam, d, deltas, mode="semiclassical", N=None, D=None,
                      n_grid=2000) -> GroundStateScan:
    """Ground-state molecular fraction and gap over a detuning grid.

    Semiclassical mode reports gap = sqrt(omega^2) of the lowest-energy
    steady state (NaN where not evaluated); quantum mode diagonalizes the
    (N, D) sector at each detuning.
    """
    deltas = np.asarray(deltas, dtype=float)
    y0 = np.empty(deltas.shape[0])
    gap = np.empty(deltas.shape[0])
    if mode == "semiclassical":
        for i, dl in enumerate(deltas):
            g = ground_state(ScaledParams(lam=lam, delta=float(dl), d=d),
                             n_grid)
            y0[i] = g.y0
            if g.omega2 is None or g.omega2 < 0.0:
                gap[i] = np.nan
            else:
                gap[i] = math.sqrt(g.omega2)
    elif mode == "quantum":
        if N is None:
            raise ParameterError("quantum mode requires N (and D)")
        if D is None:
            D = int(round(d * N))
        sector = build_sector(N, D)
        if D / N != d:
            raise ParameterError(f"d={d} not representable as D/N with N={N}")
        for i, dl in enumerate(deltas):
            p = ScaledParams.for_numbers(lam, float(dl), N, D)
            obs = ground_observables(diagonalize(build_hamiltonian(sector, p)),
                                     sector)
            y0[i] = obs.y0
            gap[i] = obs.gap
    else:
        raise ParameterError(f"unknown mode {mode!r}")
    return GroundStateScan(deltas=deltas, y0=y0, gap=gap, mode=mode)


@dataclass(frozen=True)
class StabilityMap:
    """Boolean instability grid: True where some interior state has
    omega^2 < -1e-10."""

    lam_values: np.ndarray
    delta_values: np.ndarray
    d: float
    unstable: np.ndarray

    @property
    def unstable_count(self):
        return int(self.unstable.sum())


def stability_map(lam_values, delta_values, d=0.0, n_grid=2000) -> StabilityMap:
    """Instability verdict on a (lam, delta) grid.

    Cells are independent; the numba backend fans rows out in parallel,
    the NumPy backend vectorizes the scan over detunings.  Both paths share
    the root-scan semantics, so the verdict matrix is backend-independent.
    """
    lams = np.asarray(lam_values, dtype=float)
    dels = np.asarray(delta_values, dtype=float)
    if lams.ndim != 1 or dels.ndim != 1 or lams.size == 0 or dels.size == 0:
        raise ParameterError("grids must be non-empty 1-d arrays")
    if np.any(np.diff(lams) <= 0) or np.any(np.diff(dels) <= 0):
        raise ParameterError("grid axes must be strictly increasing")
    if not 0.0 <= d < 1.0:
        raise ParameterError(f"d must lie in [0, 1), got {d}")
    xs, qs = _scan_grid(d, n_grid)
    out = np.zeros((lams.shape[0], dels.shape[0]), np.bool_)
    if NUMBA_ENABLED:
        _map_kernel(lams, dels, d, xs, qs, out)
    else:
        _map_numpy(lams, dels, d, xs, qs, out)
    return StabilityMap(lam_values=lams, delta_values=dels, d=d, unstable=out)


def _interior_count(lam, delta, d, xs, qs):
    p = ScaledParams(lam=lam, delta=delta, d=d)
    return len(_interior_roots(p, xs, qs))


def swallowtail_bounds(lam, d=0.0, window=(-12.0, 0.0), coarse=700,
                       width_tol=1e-4, n_grid=2000):
    """Maximal detuning interval carrying >= 3 interior steady states.

    Located by a coarse scan over ``window`` followed by bisection of each
    edge to ``width_tol``; returns (delta_lo, delta_hi) or None when the
    count never exceeds 2 inside the window (no bistable loop).

    The default window covers the association side (delta <= 0) where the
    bistable loop threatens adiabatic conversion.  The map
    (lam, delta, phi) -> (-lam, -delta, phi+pi) negates the energy surface,
    so lam > 1 carries a mirrored multiplicity interval at positive
    detuning among the highest-energy states; widen the window to see it.
    """
    xs, qs = _scan_grid(d, n_grid)
    grid = np.linspace(window[0], window[1], coarse)
    counts = np.array([_interior_count(lam, float(dl), d, xs, qs)
                       for dl in grid])
    hits = np.nonzero(counts >= 3)[0]
    if hits.size == 0:
        return None

    def edge(inside, outside):
        lo, hi = outside, inside
        while abs(hi - lo) > width_tol:
            mid = 0.5 * (lo + hi)
            if _interior_count(lam, mid, d, xs, qs) >= 3:
                hi = mid
            else:
                lo = mid
        return 0.5 * (lo + hi)

    first, last = hits[0], hits[-1]
    left = (grid[first] if first == 0
            else edge(float(grid[first]), float(grid[first - 1])))
    right = (grid[last] if last == coarse - 1
             else edge(float(grid[last]), float(grid[last + 1])))
    return float(left), float(right)
