"""Global reference objects: zeta, the completed Lambda, critical-line zeros,
the smooth zero count and modified completed zeta functions.

zeta is continued into 0 < Re s by the alternating eta series with Borwein's
binomial-weight acceleration,

    eta(s) ~ -1/d_n sum_{k<n} (-1)^k (d_k - d_n) (k+1)^{-s},
    d_k = n sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!),

with |error| <= 2 Gamma(sigma) / (|Gamma(s)| (3+sqrt 8)^n) before the
division by 1 - 2^{1-s}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import ConvergenceError, DomainError, PoleError
from .mellin_real import E_from_s, fit_normalization, gamma_real_closed
from .padic_core import check_odd_prime, primes_up_to
from .padic_spectral import PadicEigenfunctionSpec, padic_mellin_closed
from .special_fn import gamma_base_real, log_gamma
from .zero_cert import isolate_real_zeros

T_MAX = 60.0
_RATE = math.log(3.0 + math.sqrt(8.0))
_LOG2 = math.log(2.0)


@lru_cache(maxsize=64)
def _borwein_weights(n: int) -> np.ndarray:
    """(-1)^k (d_k - d_n) / d_n for k < n, from exact rational d_k (common factor n dropped)."""
    terms, acc = [], Fraction(0)
    for i in range(n + 1):
        acc += Fraction(math.factorial(n + i - 1) * 4 ** i,
                        math.factorial(n - i) * math.factorial(2 * i))
        terms.append(acc)
    dn = terms[-1]
    return np.array([float(Fraction((-1) ** k * (terms[k] - dn), dn)) for k in range(n)])


@dataclass(frozen=True)
class ZetaValue:
    value: complex
    error_bound: float
    terms: int


@dataclass(frozen=True)
class ZetaEvaluator:
    """Accelerated eta-series evaluator; n is the smallest depth meeting ``target``.

    ``acceleration_depth`` is the minimum depth used, ``term_budget`` the
    maximum before ConvergenceError.
    """

    term_budget: int = 400
    acceleration_depth: int = 16
    target: float = 1e-13

    def __post_init__(self):
        if self.term_budget <= 0 or self.acceleration_depth <= 0:
            raise ValueError("budgets must be positive")
        if self.acceleration_depth > self.term_budget:
            raise ValueError("acceleration_depth exceeds term_budget")

    def _check(self, s: complex):
        if abs(s - 1.0) < 1e-12:
            raise PoleError("zeta has a pole at s = 1")
        if not s.real > 0 or abs(s.imag) > T_MAX:
            raise DomainError(f"zeta evaluated only for Re s > 0, |Im s| <= {T_MAX:g}")

    def evaluate(self, s) -> ZetaValue:
        s = complex(s)
        self._check(s)
        denom = 1.0 - 2.0 ** (1.0 - s)
        if abs(denom) < 1e-8:
            # 1 - 2^{1-s} vanishes on Re s = 1 away from s = 1
            raise DomainError(f"eta continuation is singular at {s}")
        # log of 2 Gamma(sigma) / |Gamma(s)|
        log_prefactor = _LOG2 + float(log_gamma(s.real).real) - float(log_gamma(s).real)
        need = (log_prefactor - math.log(self.target * abs(denom))) / _RATE
        n = max(self.acceleration_depth, math.ceil(need))
        if n > self.term_budget:
            raise ConvergenceError(f"zeta at {s} needs {n} terms, budget {self.term_budget}")
        w = _borwein_weights(n)
        k = np.arange(1, n + 1)
        terms = w * np.exp(-s * np.log(k))
        eta = -complex(math.fsum(terms.real), math.fsum(terms.imag))
        trunc = math.exp(log_prefactor - n * _RATE)
        rounding = 4 * n * np.finfo(float).eps * float(np.sum(np.abs(terms)))
        return ZetaValue(eta / denom, (trunc + rounding) / abs(denom), n)

    def __call__(self, s) -> complex:
        return self.evaluate(s).value


DEFAULT_ZETA = ZetaEvaluator()


def zeta(s, evaluator: ZetaEvaluator = DEFAULT_ZETA):
    """Riemann zeta on 0 < Re s, |Im s| <= 60; arrays are evaluated pointwise."""
    if np.ndim(s) == 0:
        return evaluator(s)
    s = np.asarray(s, dtype=complex)
    return np.array([evaluator(v) for v in s.ravel()]).reshape(s.shape)


def lambda_completed(s, evaluator: ZetaEvaluator = DEFAULT_ZETA):
    """Lambda(s) = pi^{-s/2} Gamma(s/2) zeta(s)."""
    if np.ndim(s) == 0:
        s = complex(s)
        if s == 0:
            raise PoleError("Lambda has a pole at s = 0")
        return gamma_base_real(0, s) * evaluator(s)
    s = np.asarray(s, dtype=complex)
    return np.array([lambda_completed(v, evaluator) for v in s.ravel()]).reshape(s.shape)


def functional_equation_residuals(n: int = 10, seed: int = 0, t_max: float = 30.0,
                                  evaluator: ZetaEvaluator = DEFAULT_ZETA) -> list[dict]:
    """|Lambda(s) - Lambda(1-s)| at seeded random s in the critical strip."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        s = complex(rng.uniform(0.05, 0.95), rng.uniform(-t_max, t_max))
        a, b = lambda_completed(s, evaluator), lambda_completed(1 - s, evaluator)
        out.append({"s": s, "residual": abs(a - b), "scale": max(abs(a), abs(b))})
    return out


def critical_line_real(t, evaluator: ZetaEvaluator = DEFAULT_ZETA) -> float:
    """Re Lambda(1/2 + it); Lambda is real there."""
    return float(lambda_completed(0.5 + 1j * t, evaluator).real)


def critical_zero_scan(t_max: float, step: float = 0.05, xtol: float = 1e-7,
                       evaluator: ZetaEvaluator = DEFAULT_ZETA) -> list[float]:
    """Sign changes of Lambda(1/2 + it) on (0, t_max], refined by bisection."""
    if not 0 < t_max <= T_MAX:
        raise DomainError(f"t_max must lie in (0, {T_MAX:g}]")
    return isolate_real_zeros(lambda t: critical_line_real(t, evaluator),
                              (0.0, t_max), step, xtol)


def weyl_count(E: float) -> float:
    """Smooth zero count (E/2pi) log(E/2pi) - E/2pi, constant term omitted."""
    if not E > 0:
        raise DomainError("weyl_count needs E > 0")
    x = E / (2 * math.pi)
    return x * math.log(x) - x


# ---------------------------------------------------------------- Euler products

def chi_mod4(n):
    """The nontrivial character mod 4: 0, 1, 0, -1 on n = 0, 1, 2, 3 mod 4."""
    r = np.asarray(n) % 4
    return np.where(r == 1, 1.0, np.where(r == 3, -1.0, 0.0))


def euler_product(s: float, cutoff: int, chi=None) -> float:
    """prod_{p <= cutoff} (1 - chi(p) p^{-s})^{-1} at real s > 1."""
    p = primes_up_to(cutoff).astype(float)
    c = np.ones_like(p) if chi is None else chi(p.astype(np.int64))
    return math.exp(-math.fsum(np.log1p(-c * p ** (-s))))


def euler_product_partials(s: float, cutoffs, chi=None) -> np.ndarray:
    return np.array([euler_product(s, int(c), chi) for c in cutoffs])


def dirichlet_sum(s: float, n_terms: int, chi=None) -> float:
    """sum_{n <= n_terms} chi(n) n^{-s} with compensated summation."""
    n = np.arange(1, n_terms + 1, dtype=np.int64)
    c = np.ones(n_terms) if chi is None else chi(n)
    return math.fsum(c * n.astype(float) ** (-s))


# ------------------------------------------------------- modified completed zeta

@dataclass(frozen=True)
class PlaceAssignment:
    """Levels per place: N at infinity and (p, N_p, lam_p) at finitely many primes."""

    n_inf: int = 0
    finite: tuple[tuple[int, int, int], ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.n_inf < 0:
            raise ValueError("N_inf must be nonnegative")
        seen = set()
        for p, N, lam in self.finite:
            check_odd_prime(p)
            if N < 0 or lam not in (1, -1):
                raise ValueError(f"bad level ({p}, {N}, {lam})")
            if p in seen:
                raise ValueError(f"prime {p} assigned twice")
            seen.add(p)

    @property
    def is_trivial(self) -> bool:
        return self.n_inf == 0 and all(N == 0 for _, N, _ in self.finite)

    @property
    def line_phase(self) -> complex:
        """Constant phase making the modified Lambda real on the critical line.

        At a finite place the modified factor is P(y) / (alpha^N y^N) for a
        self-inversive P, which is real for lam = 1 and imaginary for lam = -1.
        """
        flips = sum(1 for _, N, lam in self.finite if N > 0 and lam == -1)
        return (-1j) ** flips


def modification_factor(assign: PlaceAssignment, s):
    """prod over modified places of Gamma_{v,N_v}(s) / Gamma_{v,0}(s) (c_N omitted)."""
    s = np.asarray(s, dtype=complex)
    out = np.ones_like(s)
    if assign.n_inf:
        out = out * gamma_real_closed(assign.n_inf, s) / gamma_base_real(0, s)
    E = E_from_s(s)
    for p, N, lam in assign.finite:
        if N == 0:
            continue
        # Gamma_{p,0}(s) = 1 / (1 - p^{-s})
        out = out * padic_mellin_closed(PadicEigenfunctionSpec(p, N, lam), E) \
            * (1.0 - np.exp(-s * math.log(p)))
    return complex(out) if out.ndim == 0 else out


def lambda_modified(assign: PlaceAssignment, s, evaluator: ZetaEvaluator = DEFAULT_ZETA):
    """Lambda(s) times the modification factor of every modified place."""
    return lambda_completed(s, evaluator) * modification_factor(assign, s)


def real_place_constant(assign: PlaceAssignment) -> complex:
    """The fitted constant c_N left out of the real-place factor."""
    return fit_normalization(assign.n_inf).c_N if assign.n_inf else 1.0


def modified_zero_scan(assign: PlaceAssignment, t_max: float, step: float = 0.05,
                       xtol: float = 1e-7, evaluator: ZetaEvaluator = DEFAULT_ZETA) -> list[float]:
    """Sign changes of the rotated modified Lambda on [-t_max, t_max]."""
    if not 0 < t_max <= T_MAX:
        raise DomainError(f"t_max must lie in (0, {T_MAX:g}]")
    phase = assign.line_phase

    def f(t):
        return float((lambda_modified(assign, 0.5 + 1j * t, evaluator) * phase).real)

    return isolate_real_zeros(f, (-t_max, t_max), step, xtol)
