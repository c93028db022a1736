"""Symmetric tridiagonal eigensolver (implicit-shift QL with accumulation).

Classic tqli-style algorithm: Wilkinson-shifted QL sweeps with plane
rotations, eigenvectors accumulated densely.  Row-major accumulation keeps
the rotation updates contiguous; the kernel is numba-compiled on the default
backend and runs as plain Python/NumPy under ``HETBEC_NUMBA=0``.
"""

import math

import numpy as np

from ._backend import jit
from .errors import ConvergenceError, ParameterError

__all__ = ["tridiag_eigh"]

_EPS = 2.220446049250313e-16


@jit()
def _tqli(d, e, zt, max_sweeps):
    """In-place QL iteration. Returns 0 on success, l+1 if row l stalls.

    d: (n,) diagonal, overwritten with (unsorted) eigenvalues.
    e: (n,) subdiagonal in e[:n-1], e[n-1] used as scratch.
    zt: (n, n) identity on input; row i accumulates the eigenvector of d[i].
    """
    n = d.shape[0]
    for l in range(n):
        sweeps = 0
        while True:
            # locate a negligible subdiagonal element
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= _EPS * dd:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > max_sweeps:
                return l + 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            if g >= 0.0:
                g = d[m] - d[l] + e[l] / (g + r)
            else:
                g = d[m] - d[l] + e[l] / (g - r)
            s = 1.0
            c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    # rotation annihilated prematurely; restart this row
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                for k in range(n):
                    f2 = zt[i + 1, k]
                    zt[i + 1, k] = s * zt[i, k] + c * f2
                    zt[i, k] = c * zt[i, k] - s * f2
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return 0


def tridiag_eigh(diag, offdiag, max_sweeps=50):
    """Full eigendecomposition of a real symmetric tridiagonal matrix.

    Parameters
    ----------
    diag : (n,) diagonal entries.
    offdiag : (n-1,) subdiagonal entries.
    max_sweeps : QL sweep cap per eigenvalue before declaring failure.

    Returns
    -------
    (eigenvalues, eigenvectors): eigenvalues ascending, eigenvectors as
    orthonormal columns, sign fixed so each column's largest-magnitude
    component is positive.

    Raises
    ------
    ConvergenceError if any eigenvalue fails to converge (never silent).
    """
    d = np.ascontiguousarray(diag, dtype=np.float64).copy()
    n = d.shape[0]
    if n == 0:
        raise ParameterError("empty matrix")
    off = np.asarray(offdiag, dtype=np.float64)
    if off.shape != (n - 1,):
        raise ParameterError(
            f"offdiag must have length n-1={n - 1}, got {off.shape}")
    e = np.zeros(n, dtype=np.float64)
    e[: n - 1] = off
    zt = np.eye(n, dtype=np.float64)
    status = _tqli(d, e, zt, max_sweeps)
    if status:
        raise ConvergenceError(
            f"QL iteration exceeded {max_sweeps} sweeps at row {status - 1}")
    order = np.argsort(d, kind="stable")
    vals = d[order]
    vecs = zt[order]
    # deterministic gauge: largest-magnitude component of each vector positive
    for row in vecs:
        j = np.argmax(np.abs(row))
        if row[j] < 0.0:
            np.negative(row, out=row)
    return vals, np.ascontiguousarray(vecs.T)
