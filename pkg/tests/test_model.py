import math

import numpy as np
import pytest

from hetbec import ParameterError, RawParams, ScaledParams, scale_params


def chi_from(c11=0.0, c22=0.0, cmm=0.0, c12=0.0, cm1=0.0, cm2=0.0):
    chi = np.zeros((3, 3))
    chi[0, 0] = c11
    chi[1, 1] = c22
    chi[2, 2] = cmm
    chi[0, 1] = chi[1, 0] = c12
    chi[2, 0] = chi[0, 2] = cm1
    chi[2, 1] = chi[1, 2] = cm2
    return chi


def test_all_interactions_vanish():
    p = scale_params(RawParams(delta=0.0, g=1.0, chi=np.zeros((3, 3)),
                               N=100, D=0))
    assert p.lam == 0.0
    assert p.delta == 0.0
    assert p.d == 0.0
    assert p.G == pytest.approx(math.sqrt(200.0), abs=0.0)


@pytest.mark.parametrize("c", [0.013, -0.4, 2.7])
def test_single_chi11(c):
    # only chi11 nonzero at D=0: lam = N c / G and delta = +c / G
    raw = RawParams(delta=0.0, g=1.0, chi=chi_from(c11=c), N=100, D=0)
    p = scale_params(raw)
    G = math.sqrt(200.0)
    assert p.lam == pytest.approx(100.0 * c / G, rel=1e-15)
    assert p.delta == pytest.approx(c / G, rel=1e-15)


def test_lambda_root_combination():
    # choosing 2*chi12 = -(chi11+chi22+chimm-2chim1-2chim2) makes lam vanish
    rng = np.random.default_rng(3)
    for _ in range(10):
        c11, c22, cmm, cm1, cm2 = rng.normal(size=5)
        c12 = -0.5 * (c11 + c22 + cmm - 2.0 * cm1 - 2.0 * cm2)
        raw = RawParams(delta=0.3, g=2.0,
                        chi=chi_from(c11, c22, cmm, c12, cm1, cm2),
                        N=60, D=4)
        assert scale_params(raw).lam == pytest.approx(0.0, abs=1e-13)


def test_delta_formula_general():
    raw = RawParams(delta=1.5, g=0.7,
                    chi=chi_from(0.1, -0.2, 0.05, 0.3, -0.07, 0.11),
                    N=40, D=6)
    p = scale_params(raw)
    G = 0.7 * math.sqrt(80.0)
    expect = (1.5 - 5 * 0.1 + 7 * (-0.2) + 39 * 0.05
              - 34 * (-0.07) - 46 * 0.11) / G
    assert p.delta == pytest.approx(expect, rel=1e-14)
    assert p.d == 6 / 40
    assert p.N == 40 and p.D == 6


def test_coupling_rescale_property():
    # g -> kappa g scales G by kappa and divides lam, delta by kappa
    rng = np.random.default_rng(11)
    chi = chi_from(*rng.normal(size=6))
    base = scale_params(RawParams(delta=0.8, g=1.3, chi=chi, N=30, D=2))
    for kappa in (2.0, 0.25, 7.5):
        scaled = scale_params(RawParams(delta=0.8, g=1.3 * kappa, chi=chi,
                                        N=30, D=2))
        assert scaled.G == pytest.approx(kappa * base.G, rel=1e-15)
        assert scaled.lam == pytest.approx(base.lam / kappa, rel=1e-14)
        assert scaled.delta == pytest.approx(base.delta / kappa, rel=1e-14)


def test_scale_params_deterministic():
    raw = RawParams(delta=0.4, g=1.1, chi=chi_from(0.2, 0.1, -0.3, 0.0, 0.05, 0.0),
                    N=24, D=8)
    a, b = scale_params(raw), scale_params(raw)
    assert (a.lam, a.delta, a.d, a.G) == (b.lam, b.delta, b.d, b.G)


@pytest.mark.parametrize("kwargs", [
    dict(N=1, D=0),            # N too small
    dict(N=10, D=11),          # D > N
    dict(N=10, D=3),           # parity mismatch
    dict(N=10, D=0, g=0.0),    # g must be positive
    dict(N=10, D=0, g=-1.0),
])
def test_rejected_raw_inputs(kwargs):
    base = dict(delta=0.0, g=1.0, chi=np.zeros((3, 3)), N=10, D=0)
    base.update(kwargs)
    with pytest.raises(ParameterError):
        RawParams(**base)


def test_asymmetric_chi_rejected():
    chi = np.zeros((3, 3))
    chi[0, 1] = 0.5
    with pytest.raises(ParameterError):
        RawParams(delta=0.0, g=1.0, chi=chi, N=10, D=0)


def test_scaled_params_validation():
    with pytest.raises(ParameterError):
        ScaledParams(lam=0.0, delta=0.0, d=1.0)
    with pytest.raises(ParameterError):
        ScaledParams(lam=0.0, delta=0.0, d=-0.1)
    with pytest.raises(ParameterError):
        ScaledParams(lam=0.0, delta=0.0, G=0.0)
    with pytest.raises(ParameterError):
        ScaledParams(lam=0.0, delta=0.0, N=10)  # N without D
    with pytest.raises(ParameterError):
        ScaledParams(lam=0.0, delta=0.0, d=0.3, N=10, D=2)  # d != D/N
    p = ScaledParams.for_numbers(1.0, -2.0, 100, 20)
    assert p.d == 0.2
