import cmath
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from localrh.errors import PoleError, RootMismatchError
from localrh.padic_core import LocallyConstantFn, padic_abs, random_zero_shell_table
from localrh.padic_spectral import (PadicEigenfunctionSpec, SelfInversivePoly,
                                    UnramifiedCharacter, bk_evolution_eigenvalue,
                                    build_companion, build_psi_pN, det_identity_check, gamma_p,
                                    hessenberg_charpoly, padic_mellin_closed,
                                    padic_mellin_shell_oracle, padic_record, psi_pN_balls,
                                    random_f_part, unimodular_roots, zeros_in_E)


def _grid(p, n=50):
    return np.linspace(0.0, 2 * math.pi / math.log(p), n, endpoint=False)


def test_spec_validation():
    with pytest.raises(ValueError):
        PadicEigenfunctionSpec(2, 1)
    with pytest.raises(ValueError):
        PadicEigenfunctionSpec(3, 1, lam=0)
    with pytest.raises(ValueError):
        PadicEigenfunctionSpec(3, -1)
    bad = LocallyConstantFn.shell(3, 1)  # shell integral 2, not 0
    with pytest.raises(ValueError):
        PadicEigenfunctionSpec(3, 1, 1, bad)
    with pytest.raises(ValueError):
        PadicEigenfunctionSpec(3, 1, 1, random_f_part(5, 1, 0))


def test_build_psi_examples():
    psi = build_psi_pN(PadicEigenfunctionSpec(3, 1, 1))
    assert psi(Fraction(1, 3)) == pytest.approx(1.0)
    assert psi(0) == pytest.approx(2.0)
    assert psi(Fraction(1, 9)) == 0
    assert psi.M == 1 and psi.m >= 1


@pytest.mark.parametrize("p, N, lam", [(3, 1, 1), (3, 2, -1), (3, 3, 1), (5, 2, 1), (7, 1, -1)])
def test_dense_and_sparse_agree(p, N, lam):
    spec = PadicEigenfunctionSpec(p, N, lam)
    dense = build_psi_pN(spec)
    sparse = psi_pN_balls(spec).to_table(dense.M, dense.m)
    assert dense.max_abs_diff(sparse) < 1e-12


def _mp_expected(p, N, lam, E):
    """p^{Ns} + lam/(1 - p^{-s}) (p^N p^{-Ns} - p^{N-1} p^{-(N-1)s}) at 40 digits."""
    mpmath.mp.dps = 40
    s = mpmath.mpf(1) / 2 + 1j * mpmath.mpf(E)
    P = mpmath.mpf(p)
    return complex(P ** (N * s) + lam / (1 - P ** (-s))
                   * (P ** N * P ** (-N * s) - P ** (N - 1) * P ** (-(N - 1) * s)))


@pytest.mark.parametrize("p, N, lam", [(3, 1, 1), (3, 4, -1), (5, 2, 1), (7, 3, -1)])
def test_closed_form_against_shell_expression(p, N, lam):
    spec = PadicEigenfunctionSpec(p, N, lam)
    E = _grid(p, 12)
    ref = np.array([_mp_expected(p, N, lam, e) for e in E])
    assert np.max(np.abs(padic_mellin_closed(spec, E) - ref)) < 1e-12 * max(1, np.max(abs(ref)))


@pytest.mark.parametrize("p", [3, 5, 7])
@pytest.mark.parametrize("N", range(1, 7))
@pytest.mark.parametrize("lam", [1, -1])
def test_oracle_equals_closed(p, N, lam):
    E = _grid(p)
    spec = PadicEigenfunctionSpec(p, N, lam)
    closed = padic_mellin_closed(spec, E)
    assert np.max(np.abs(padic_mellin_shell_oracle(spec, E) - closed)) <= 1e-12
    with_f = PadicEigenfunctionSpec(p, N, lam, random_f_part(p, N, seed=100 * p + N))
    assert np.max(np.abs(padic_mellin_shell_oracle(with_f, E) - closed)) <= 1e-12


def test_oracle_with_table_f_part():
    rng = np.random.default_rng(4)
    f = random_zero_shell_table(3, 2, 3, rng)
    spec = PadicEigenfunctionSpec(3, 2, -1, f)
    E = _grid(3, 20)
    dense = padic_mellin_shell_oracle(spec, E)
    assert np.max(np.abs(dense - padic_mellin_closed(spec, E))) < 1e-12


def test_oracle_examples():
    E = np.linspace(0, 5, 11)
    ground = padic_mellin_shell_oracle(PadicEigenfunctionSpec(3, 0), E)
    assert np.max(np.abs(ground - gamma_p(3, 1.0, 0.5 + 1j * E))) < 1e-12
    assert np.max(np.abs(padic_mellin_closed(PadicEigenfunctionSpec(3, 0), E) - ground)) < 1e-12
    assert abs(padic_mellin_shell_oracle(PadicEigenfunctionSpec(3, 1, -1), 0.0)) < 1e-12
    spec = PadicEigenfunctionSpec(3, 2, 1)
    assert abs(padic_mellin_shell_oracle(spec, 1.0) - padic_mellin_closed(spec, 1.0)) < 1e-12


def test_closed_zero_examples():
    p = 3
    for k in range(-3, 4):
        E = math.pi * k / math.log(p)
        assert abs(padic_mellin_closed(PadicEigenfunctionSpec(p, 1, -1), E)) < 1e-13
    a = p ** -0.5
    for y in (complex(a, math.sqrt(2 / 3)), complex(a, -math.sqrt(2 / 3))):
        E = cmath.log(y).imag / math.log(p)
        assert abs(padic_mellin_closed(PadicEigenfunctionSpec(p, 1, 1), E)) < 1e-13


@given(st.sampled_from([3, 5, 7, 11]), st.integers(1, 8), st.sampled_from([1, -1]))
def test_self_inversive(p, N, lam):
    poly = SelfInversivePoly(p, N, lam)
    c = poly.coefficients
    assert poly.is_self_inversive()
    assert c.size == 2 * N + 1 and c[0] == 1 and c[-1] == lam


def test_companion_examples():
    U = build_companion(3, 1, 1).matrix
    r = math.sqrt(2 / 3)
    assert np.allclose(U, [[3 ** -0.5, r], [-r, 3 ** -0.5]], atol=1e-15)
    c = build_companion(5, 4, -1)
    assert abs(c.alpha ** 2 + c.beta ** 2 - 1) < 1e-15
    U4 = build_companion(7, 2, 1).matrix
    assert U4.shape == (4, 4)
    assert np.array_equal(U4[1], [0, 0, 1, 0]) and np.array_equal(U4[2], [0, 0, 0, 1])
    with pytest.raises(ValueError):
        build_companion(3, 0, 1)


@pytest.mark.parametrize("p", [3, 5, 7, 11])
@pytest.mark.parametrize("N", range(1, 9))
@pytest.mark.parametrize("lam", [1, -1])
def test_determinant_identity_and_unitarity(p, N, lam):
    assert det_identity_check(p, N, lam) <= 1e-12
    comp = build_companion(p, N, lam)
    assert comp.unitarity_residual() <= 1e-12
    # independent expansion: numpy's characteristic polynomial from eigenvalues
    assert np.max(np.abs(np.poly(comp.matrix).real - SelfInversivePoly(p, N, lam).coefficients)) \
        < 1e-10
    # constant coefficient of det(y - U) is det(-U) = det U (even size), which must be lam
    assert abs(np.linalg.det(comp.matrix) - lam) < 1e-12


def test_det_identity_small_cases():
    assert det_identity_check(3, 1, 1) <= 1e-15
    assert det_identity_check(5, 3, -1) <= 1e-12


def test_hessenberg_charpoly_random():
    rng = np.random.default_rng(0)
    H = np.triu(rng.standard_normal((7, 7)), -1)
    assert np.allclose(hessenberg_charpoly(H), np.poly(H))
    with pytest.raises(ValueError):
        hessenberg_charpoly(rng.standard_normal((4, 4)))


def test_roots_examples():
    r = unimodular_roots(SelfInversivePoly(5, 1, -1))
    assert np.allclose(sorted(r.real), [-1, 1], atol=1e-12)
    r = unimodular_roots(SelfInversivePoly(3, 1, 1))
    assert np.allclose(sorted(r.imag), [-math.sqrt(2 / 3), math.sqrt(2 / 3)])
    assert np.allclose(r.real, 3 ** -0.5)
    r = unimodular_roots(SelfInversivePoly(7, 4, 1))
    assert r.size == 8 and np.max(np.abs(np.abs(r) - 1)) < 1e-10
    with pytest.raises(RootMismatchError):
        unimodular_roots(SelfInversivePoly(3, 2, 1), tol=0.0)


@pytest.mark.parametrize("p", [3, 5, 7, 11])
@pytest.mark.parametrize("N", range(1, 9))
def test_local_rh_padic(p, N):
    for lam in (1, -1):
        poly = SelfInversivePoly(p, N, lam)
        roots = unimodular_roots(poly)
        assert np.max(np.abs(np.abs(roots) - 1)) <= 1e-10
        # y = p^{iE} with |y| = 1 means Im E = -log|y| / log p vanishes
        assert np.max(np.abs(np.log(np.abs(roots)))) / math.log(p) < 1e-6
        E = zeros_in_E(poly)
        assert np.all((E > -1e-12) & (E < 2 * math.pi / math.log(p)))
        assert np.max(np.abs(padic_mellin_closed(PadicEigenfunctionSpec(p, N, lam), E))) < 1e-9


def test_zeros_in_E_listing():
    E = zeros_in_E(SelfInversivePoly(3, 1, -1), 10.0)
    expected = [math.pi * k / math.log(3) for k in range(-3, 4)]
    assert np.allclose(E, expected, atol=1e-12)


@pytest.mark.parametrize("p, nu, s, expected", [
    (3, 1.0, 1, 1.5), (5, 1.0, 2, 25 / 24), (3, -1.0, 1, 0.75),
])
def test_gamma_p_examples(p, nu, s, expected):
    assert gamma_p(p, UnramifiedCharacter(p, nu), s) == pytest.approx(expected)


def test_gamma_p_pole_and_character():
    with pytest.raises(PoleError):
        gamma_p(3, 1.0, 0.0)
    with pytest.raises(ValueError):
        UnramifiedCharacter(3, 0.5)
    nu = UnramifiedCharacter(5, cmath.exp(0.3j))
    assert nu(Fraction(7, 3)) == 1
    assert nu(Fraction(2, 25)) == pytest.approx(cmath.exp(-0.6j))  # v_5 = -2
    assert nu(Fraction(5)) == pytest.approx(cmath.exp(0.3j))


@given(st.integers(1, 10 ** 5), st.integers(1, 10 ** 5), st.integers(1, 10 ** 5),
       st.integers(1, 10 ** 5), st.floats(-10, 10), st.floats(0, 6.28))
def test_evolution_eigenvalue_composition(a1, a2, b1, b2, E, phase):
    nu = UnramifiedCharacter(5, cmath.exp(1j * phase))
    a, b = Fraction(a1, a2), Fraction(b1, b2)
    lhs = bk_evolution_eigenvalue(a, E, nu) * bk_evolution_eigenvalue(b, E, nu)
    rhs = bk_evolution_eigenvalue(a * b, E, nu)
    assert abs(lhs - rhs) < 1e-9
    # the eigenvalue is nu(a) |a|^{iE}
    direct = nu(a) * complex(float(padic_abs(a, 5)) ** (1j * E))
    assert abs(bk_evolution_eigenvalue(a, E, nu) - direct) < 1e-9


def test_padic_record_fields():
    rec = padic_record(3, 2, -1, f_seed=5)
    assert rec["f_seed"] == 5
    for key in ("coef_residual", "unitarity_residual", "root_modulus_deviation",
                "oracle_closed_deviation", "f_invariance_deviation"):
        assert rec[key] <= 1e-12
    assert len(rec["roots"]) == 4
