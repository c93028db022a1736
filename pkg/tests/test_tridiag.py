import math

import numpy as np
import pytest
from scipy.linalg import eigh_tridiagonal

from hetbec import ParameterError, tridiag_eigh


def test_two_by_two_analytic():
    vals, vecs = tridiag_eigh(np.zeros(2), np.array([0.5]))
    assert vals == pytest.approx([-0.5, 0.5], abs=1e-14)
    assert np.abs(vecs.T @ vecs - np.eye(2)).max() < 1e-14


def test_three_by_three_analytic():
    vals, _ = tridiag_eigh(np.zeros(3), np.array([1.0 / math.sqrt(2.0), 0.5]))
    s3 = math.sqrt(3.0) / 2.0
    assert vals == pytest.approx([-s3, 0.0, s3], abs=1e-13)


def test_decoupled_diagonal():
    vals, vecs = tridiag_eigh(np.array([2.5, 2.5]), np.array([0.0]))
    assert vals == pytest.approx([2.5, 2.5], abs=0.0)
    assert np.array_equal(vecs, np.eye(2))


@pytest.mark.parametrize("n", [5, 37, 200])
def test_against_scipy_and_invariants(n):
    rng = np.random.default_rng(n)
    d = rng.normal(size=n) * 3.0
    e = rng.normal(size=n - 1)
    vals, vecs = tridiag_eigh(d, e)
    ref = eigh_tridiagonal(d, e, eigvals_only=True)
    scale = np.abs(d).max() + 2.0 * np.abs(e).max()
    assert np.abs(vals - ref).max() < 1e-12 * scale
    # residual and orthonormality
    h = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    resid = np.linalg.norm(h @ vecs - vecs * vals, axis=0).max()
    assert resid < 1e-9 * scale
    assert np.abs(vecs.T @ vecs - np.eye(n)).max() < 1e-10


def test_offdiag_sign_gauge_invariance():
    # flipping every offdiagonal sign is a similarity by diag(+-1)
    rng = np.random.default_rng(5)
    d = rng.normal(size=40)
    e = rng.normal(size=39)
    vals_plus, _ = tridiag_eigh(d, e)
    vals_minus, _ = tridiag_eigh(d, -e)
    assert np.abs(vals_plus - vals_minus).max() < 1e-12


def test_sign_convention_deterministic():
    rng = np.random.default_rng(9)
    d = rng.normal(size=25)
    e = rng.normal(size=24)
    _, v1 = tridiag_eigh(d, e)
    _, v2 = tridiag_eigh(d, e)
    assert np.array_equal(v1, v2)
    for col in v1.T:
        assert col[np.argmax(np.abs(col))] > 0


def test_bad_shapes_rejected():
    with pytest.raises(ParameterError):
        tridiag_eigh(np.zeros(4), np.zeros(4))
    with pytest.raises(ParameterError):
        tridiag_eigh(np.zeros(0), np.zeros(0))
