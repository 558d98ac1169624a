"""p-adic oscillator eigenfunctions, their Mellin transforms and the unitary
matrix whose characteristic polynomial carries the zeros.

With alpha = p^{-1/2} and y = p^{iE}, the Mellin transform of
psi_{p,N} = Delta_N + lambda * tilde Delta_N + f_N at s = 1/2 + iE is

    (y^{2N} - alpha y^{2N-1} - lambda alpha y + lambda) / (alpha^N y^{N-1} (y - alpha))

and the numerator is det(y - U) for the 2N x 2N unitary U built below.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import PoleError, RootMismatchError
from .padic_core import (BallSum, LocallyConstantFn, check_odd_prime, mult_haar_mellin,
                         padic_fourier, padic_valuation, random_zero_shell_balls)

SHELL_TOL = 1e-12


@dataclass(frozen=True)
class UnramifiedCharacter:
    """Multiplicative character trivial on units, fixed by nu(p)."""

    p: int
    nu_p: complex = 1.0

    def __post_init__(self):
        if abs(abs(self.nu_p) - 1.0) > 1e-12:
            raise ValueError("nu(p) must have unit modulus")

    def __call__(self, x) -> complex:
        return complex(self.nu_p) ** padic_valuation(x, self.p).k


TRIVIAL = 1.0


@dataclass(frozen=True)
class PadicEigenfunctionSpec:
    """psi_{p,N} = Delta_N + lam * tilde Delta_N + f_part; N = 0 is the ground state Omega_0."""

    p: int
    N: int
    lam: int = 1
    f_part: LocallyConstantFn | BallSum | None = None

    def __post_init__(self):
        check_odd_prime(self.p)
        if self.N < 0:
            raise ValueError("N must be nonnegative")
        if self.lam not in (1, -1):
            raise ValueError("lambda must be +1 or -1")
        if self.f_part is not None:
            f = self.f_part
            if f.p != self.p:
                raise ValueError("f_part lives over a different prime")
            scale = max(1.0, float(np.max(np.abs(list(f.shell_integrals().values()) or [0]))))
            bad = [k for k, v in f.shell_integrals().items() if abs(v) > SHELL_TOL * scale]
            if bad or abs(f.value_at_zero) > SHELL_TOL:
                raise ValueError(f"f_part has nonzero shell integrals on shells {bad}")

    @property
    def alpha(self) -> float:
        return self.p ** -0.5


def psi_pN_balls(spec: PadicEigenfunctionSpec) -> BallSum:
    """psi_{p,N} as a sum of ball indicators (any size)."""
    p, N = spec.p, spec.N
    if N == 0:
        base = BallSum.of(p, [(0, 0, 1.0)])
    else:
        # Delta_N = Omega_N - Omega_{N-1}; tilde Delta_N = p^N Omega_{-N} - p^{N-1} Omega_{1-N}
        base = BallSum.of(p, [
            (0, N, 1.0), (0, N - 1, -1.0),
            (0, -N, spec.lam * float(p) ** N), (0, 1 - N, -spec.lam * float(p) ** (N - 1)),
        ])
    if spec.f_part is None:
        return base
    f = spec.f_part
    if isinstance(f, LocallyConstantFn):
        raise TypeError("use build_psi_pN for table-valued f_part")
    return base + f


def build_psi_pN(spec: PadicEigenfunctionSpec) -> LocallyConstantFn:
    """psi_{p,N} as a coset table, with tilde Delta_N obtained by the Fourier transform.

    Support exponent N, resolution max(N, resolution of f_part); raises
    SizeError when p^{N+m} exceeds the table bound.
    """
    p, N = spec.p, spec.N
    if N == 0:
        psi = LocallyConstantFn.ball(p, 0)
    else:
        delta = LocallyConstantFn.shell(p, N)
        psi = delta + spec.lam * padic_fourier(delta)
    m = N
    f = spec.f_part
    if isinstance(f, BallSum):
        f = f.to_table()
    if f is not None:
        m = max(m, f.m)
        psi = psi.refine(max(N, f.M), m) + f
    return psi.refine(max(psi.M, N), m)


def padic_mellin_closed(spec: PadicEigenfunctionSpec, E):
    """Closed-form Mellin transform of psi_{p,N} at s = 1/2 + iE (E may be complex)."""
    E = np.asarray(E, dtype=complex)
    p, N = spec.p, spec.N
    if N == 0:
        return gamma_p(p, TRIVIAL, 0.5 + 1j * E)
    a = spec.alpha
    lam = spec.lam
    y = np.exp(1j * E * math.log(p))
    num = y ** (2 * N) - a * y ** (2 * N - 1) - lam * a * y + lam
    den = a ** N * y ** (N - 1) * (y - a)
    out = num / den
    return complex(out) if out.ndim == 0 else out


def padic_mellin_shell_oracle(spec: PadicEigenfunctionSpec, E, shell_floor: int | None = None):
    """Shell-by-shell sum of int psi_{p,N}(x) |x|^{1/2+iE} d^x x."""
    s = 0.5 + 1j * np.asarray(E, dtype=complex)
    f = spec.f_part
    if isinstance(f, LocallyConstantFn):
        psi = build_psi_pN(spec)
    else:
        psi = psi_pN_balls(spec)
    return mult_haar_mellin(psi, s, shell_floor)


def random_f_part(p: int, N: int, seed: int, max_balls_per_shell: int = 2000) -> BallSum:
    """Seeded real f with all shell integrals zero, on shells 0..N at resolution p^{-(N+1)}.

    The resolution is capped so that no shell carries more than
    ``max_balls_per_shell`` independent values.
    """
    rng = np.random.default_rng(seed)
    shells = range(0, N + 1)
    parts = [random_zero_shell_balls(p, [k], k + N + 1, rng, max_balls_per_shell)
             for k in shells]
    out = parts[0]
    for extra in parts[1:]:
        out = out + extra
    return out


@dataclass(frozen=True)
class SelfInversivePoly:
    p: int
    N: int
    lam: int

    @property
    def alpha(self) -> float:
        return self.p ** -0.5

    @property
    def coefficients(self) -> np.ndarray:
        """[1, -alpha, 0, ..., 0, -lam alpha, lam], highest degree first."""
        c = np.zeros(2 * self.N + 1)
        c[0] = 1.0
        c[1] += -self.alpha
        c[-2] += -self.lam * self.alpha
        c[-1] += self.lam
        return c

    def is_self_inversive(self) -> bool:
        c = self.coefficients
        return bool(np.array_equal(self.lam * c[::-1], c))

    def __call__(self, y):
        return np.polyval(self.coefficients, y)


@dataclass(frozen=True)
class CompanionU:
    p: int
    N: int
    lam: int
    matrix: np.ndarray

    @property
    def alpha(self) -> float:
        return self.p ** -0.5

    @property
    def beta(self) -> float:
        return math.sqrt(1.0 - 1.0 / self.p)

    def unitarity_residual(self) -> float:
        U = self.matrix
        return float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))))


def build_companion(p: int, N: int, lam: int) -> CompanionU:
    """2N x 2N matrix: first row (alpha, beta, 0..), unit shift, last row (-lam beta, lam alpha, 0..).

    beta = sqrt(1 - alpha^2), the value forced by unitarity.
    """
    check_odd_prime(p)
    if N < 1:
        raise ValueError("N must be at least 1")
    if lam not in (1, -1):
        raise ValueError("lambda must be +1 or -1")
    n = 2 * N
    a = p ** -0.5
    b = math.sqrt(1.0 - 1.0 / p)
    U = np.zeros((n, n))
    U[0, 0], U[0, 1] = a, b
    for i in range(1, n - 1):
        U[i, i + 1] = 1.0
    U[n - 1, 0] += -lam * b
    U[n - 1, 1] += lam * a
    return CompanionU(p, N, lam, U)


def hessenberg_charpoly(H: np.ndarray) -> np.ndarray:
    """Coefficients (highest first) of det(y I - H) for upper Hessenberg H.

    Recursion on leading principal blocks:
    p_k = (y - h_kk) p_{k-1} - sum_{i<k} h_ik (prod_{j=i+1..k} h_{j,j-1}) p_{i-1}.
    """
    n = H.shape[0]
    if np.any(np.abs(np.tril(H, -2)) > 0):
        raise ValueError("matrix is not upper Hessenberg")
    polys = [np.poly1d([1.0])]
    y = np.poly1d([1.0, 0.0])
    for k in range(n):
        pk = (y - H[k, k]) * polys[k]
        prod = 1.0
        for i in range(k - 1, -1, -1):
            prod *= H[i + 1, i]
            if prod == 0.0:
                break
            pk = pk - H[i, k] * prod * polys[i]
        polys.append(pk)
    c = polys[-1].coeffs
    return np.concatenate([np.zeros(n + 1 - c.size), c])


def det_identity_check(p: int, N: int, lam: int) -> float:
    """Max coefficient difference between det(y - U) and the self-inversive polynomial."""
    U = build_companion(p, N, lam).matrix
    # U^T is upper Hessenberg and has the same characteristic polynomial
    coeffs = hessenberg_charpoly(U.T)
    return float(np.max(np.abs(coeffs - SelfInversivePoly(p, N, lam).coefficients)))


def unimodular_roots(poly: SelfInversivePoly, tol: float = 1e-8) -> np.ndarray:
    """Roots as eigenvalues of U, cross-checked against numpy.roots.

    Returned sorted by argument in [0, 2 pi).
    """
    eig = np.linalg.eigvals(build_companion(poly.p, poly.N, poly.lam).matrix)
    generic = np.roots(poly.coefficients)
    cost = np.abs(eig[:, None] - generic[None, :])
    rows, cols = linear_sum_assignment(cost)
    worst = float(np.max(cost[rows, cols]))
    if worst > tol:
        raise RootMismatchError(f"eigenvalue and companion roots differ by {worst:.3g}")
    order = np.argsort(np.mod(np.angle(eig), 2 * np.pi))
    return eig[order]


def zeros_in_E(poly: SelfInversivePoly, E_max: float | None = None) -> np.ndarray:
    """Real E with p^{iE} a root, reduced to [0, 2 pi / log p) or listed on [-E_max, E_max]."""
    roots = unimodular_roots(poly)
    period = 2 * math.pi / math.log(poly.p)
    base = np.mod(np.angle(roots), 2 * math.pi) / math.log(poly.p)
    base = np.where(period - base < 1e-12, base - period, base)  # angle -0 is E = 0
    if E_max is None:
        return np.sort(base)
    out = []
    for e in base:
        k_lo = math.ceil((-E_max - e) / period)
        k_hi = math.floor((E_max - e) / period)
        out.extend(e + k * period for k in range(k_lo, k_hi + 1))
    return np.sort(np.array(out))


def gamma_p(p: int, nu, s):
    """Local gamma factor 1 / (1 - nu(p) p^{-s}) for an unramified character."""
    nu_p = nu.nu_p if isinstance(nu, UnramifiedCharacter) else complex(nu)
    s = np.asarray(s, dtype=complex)
    d = 1.0 - nu_p * np.exp(-s * math.log(p))
    if np.any(np.abs(d) < 1e-14):
        raise PoleError("local gamma factor pole")
    out = 1.0 / d
    return complex(out) if out.ndim == 0 else out


def bk_evolution_eigenvalue(a, E: float, nu: UnramifiedCharacter) -> complex:
    """Eigenvalue nu(a) |a|_p^{iE} of U_BK(a) on the state |E, nu>."""
    k = padic_valuation(a, nu.p).k
    return nu(a) * cmath.exp(1j * E * (-k) * math.log(nu.p))


def padic_record(p: int, N: int, lam: int, n_grid: int = 50, f_seed: int | None = None) -> dict:
    """Residuals for one (p, N, lambda): determinant, unitarity, root moduli, oracle."""
    poly = SelfInversivePoly(p, N, lam)
    comp = build_companion(p, N, lam)
    roots = unimodular_roots(poly)
    period = 2 * math.pi / math.log(p)
    E = np.linspace(0.0, period, n_grid, endpoint=False)
    spec = PadicEigenfunctionSpec(p, N, lam)
    closed = padic_mellin_closed(spec, E)
    oracle = padic_mellin_shell_oracle(spec, E)
    rec = {
        "p": p, "N": N, "lambda": lam,
        "coefficients": [float(c) for c in poly.coefficients],
        "roots": [{"re": float(r.real), "im": float(r.imag), "modulus": float(abs(r))}
                  for r in roots],
        "zeros_E": [float(e) for e in zeros_in_E(poly)],
        "coef_residual": det_identity_check(p, N, lam),
        "unitarity_residual": comp.unitarity_residual(),
        "root_modulus_deviation": float(np.max(np.abs(np.abs(roots) - 1.0))),
        "oracle_closed_deviation": float(np.max(np.abs(oracle - closed))),
        "closed_scale": float(np.max(np.abs(closed))),
    }
    if f_seed is not None:
        f = random_f_part(p, N, f_seed)
        with_f = padic_mellin_shell_oracle(PadicEigenfunctionSpec(p, N, lam, f), E)
        rec["f_seed"] = f_seed
        rec["f_invariance_deviation"] = float(np.max(np.abs(with_f - closed)))
    return rec

