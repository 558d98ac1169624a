import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.polynomial import hermite as H
from scipy.special import loggamma as scipy_loggamma

from localrh.errors import PoleError
from localrh.special_fn import HermiteLevel, gamma, gamma_base_real, hermite_psi, log_gamma


@pytest.mark.parametrize("s, expected", [
    (1, 0.0),
    (0.5, 0.5 * math.log(math.pi)),
    (5, math.log(24)),
])
def test_log_gamma_anchor_values(s, expected):
    assert abs(log_gamma(s) - expected) < 1e-14


# table of (s, mpmath reference) over the domain |s| <= 100, >= 0.1 from poles
_TABLE = [complex(a, b) for a in (-37.3, -9.5, -2.4, -0.6, 0.1, 0.5, 1.7, 6.0, 25.0, 70.0)
          for b in (-60.0, -3.0, 0.0, 0.4, 11.0, 45.0)]


@pytest.mark.parametrize("s", _TABLE)
def test_log_gamma_accuracy_table(s):
    ref = complex(mpmath.loggamma(mpmath.mpc(s.real, s.imag)))
    got = complex(log_gamma(s))
    # value: relative error of exp(log_gamma); branch: same as the principal loggamma
    assert abs(got.real - ref.real) <= 1e-12 * max(1.0, abs(ref))
    assert abs(got.imag - ref.imag) <= 1e-12 * max(1.0, abs(ref))


@given(st.floats(-50, 50), st.floats(-50, 50))
def test_log_gamma_matches_scipy_branch(a, b):
    s = complex(a, b)
    near = round(a)
    if near <= 0 and abs(s - near) < 0.1:
        return
    ref = complex(scipy_loggamma(s))
    assert abs(log_gamma(s) - ref) <= 1e-11 * max(1.0, abs(ref))


@given(st.floats(-40, 40), st.floats(-40, 40))
def test_gamma_recurrence(a, b):
    s = complex(a, b)
    for z in (s, s + 1):
        near = round(z.real)
        if near <= 0 and abs(z - near) < 0.1:
            return
    lhs = np.exp(log_gamma(s + 1))
    rhs = s * np.exp(log_gamma(s))
    assert abs(lhs - rhs) <= 1e-11 * abs(lhs)


def test_log_gamma_vectorised_and_poles():
    s = np.array([1.0, 2.0, 3.5 + 1j])
    out = log_gamma(s)
    assert out.shape == (3,)
    assert abs(out[1]) < 1e-15
    for bad in (0, -1, -7, -3 + 1e-13):
        with pytest.raises(PoleError):
            log_gamma(bad)
    assert abs(gamma(4) - 6) < 1e-12


@pytest.mark.parametrize("delta, s, expected", [
    (0, 1, 1.0),
    (0, 2, 1 / math.pi),
    (1, 1, 2 / math.sqrt(math.pi)),
])
def test_gamma_base_real_anchors(delta, s, expected):
    assert abs(gamma_base_real(delta, s) - expected) < 1e-14


def test_gamma_base_real_against_mpmath():
    for s in (0.3 + 4j, 0.5 - 17j, 2.2 + 0.1j):
        ref0 = mpmath.pi ** (-s / 2) * mpmath.gamma(s / 2)
        ref1 = 2 * mpmath.pi ** (-s / 2) * mpmath.gamma((s + 1) / 2)
        assert abs(gamma_base_real(0, s) - complex(ref0)) < 1e-13 * abs(complex(ref0))
        assert abs(gamma_base_real(1, s) - complex(ref1)) < 1e-13 * abs(complex(ref1))


def test_gamma_base_real_poles_and_bad_parity():
    for s in (0, -2, -4):
        with pytest.raises(PoleError):
            gamma_base_real(0, s)
    for s in (-1, -3):
        with pytest.raises(PoleError):
            gamma_base_real(1, s)
    with pytest.raises(ValueError):
        gamma_base_real(2, 1.0)


def test_base_factors_zero_free_on_strip():
    sig = np.linspace(0.01, 0.99, 25)
    t = np.linspace(-50, 50, 401)
    s = (sig[:, None] + 1j * t[None, :]).ravel()
    for delta in (0, 1):
        v = gamma_base_real(delta, s)
        assert np.all(np.isfinite(v))
        assert np.min(np.abs(v)) > 1e-40


def test_hermite_level():
    lv = HermiteLevel(5)
    assert lv.delta == 1 and HermiteLevel(4).delta == 0
    assert math.isclose(HermiteLevel(0).kappa, 2 ** 0.25)
    with pytest.raises(ValueError):
        HermiteLevel(-1)


def test_hermite_psi_examples():
    assert hermite_psi(1, 0.0) == 0.0
    assert hermite_psi(2, 1.0) == hermite_psi(2, -1.0)
    assert abs(hermite_psi(0, 0.0) - 2 ** 0.25) < 1e-15


@pytest.mark.parametrize("N", range(7))
def test_hermite_recurrence_matches_polynomial(N):
    x = np.linspace(-3, 3, 41)
    coef = np.zeros(N + 1)
    coef[N] = 1.0
    direct = HermiteLevel(N).kappa * H.hermval(math.sqrt(2 * math.pi) * x, coef) \
        * np.exp(-math.pi * x * x)
    assert np.max(np.abs(hermite_psi(N, x) - direct)) < 1e-12


@given(st.integers(0, 20), st.floats(-4, 4))
def test_hermite_parity(N, x):
    a, b = hermite_psi(N, x), hermite_psi(N, -x)
    target = (-1) ** N * a
    assert abs(b - target) <= 1e-14
    if a != 0.0:
        assert math.copysign(1, b) == math.copysign(1, target)


def test_hermite_orthonormality():
    x, w = np.polynomial.legendre.leggauss(400)
    x, w = 6 * x, 6 * w
    psi = np.array([hermite_psi(n, x) for n in range(12)])
    gram = (psi * w) @ psi.T
    assert np.max(np.abs(gram - np.eye(12))) < 1e-12


def test_hermite_large_N_no_overflow():
    v = hermite_psi(200, np.linspace(-8, 8, 101))
    assert np.all(np.isfinite(v))
