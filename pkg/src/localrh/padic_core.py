"""Exact p-adic scaffolding for compactly supported locally constant functions.

Two representations are provided:

``LocallyConstantFn``
    dense coset table. Support |x|_p <= p^M, constant on x + p^m Z_p, entry
    ``a`` holding the value on the coset of a * p^{-M}, 0 <= a < p^{M+m}.
    Needed for the Fourier transform and the JSON round-trip.

``BallSum``
    finite sum of ball indicators c * 1{|x - a|_p <= p^r}. Used when a uniform
    grid would be too large (psi_{p,N} needs p^{2N} cells).

Both expose ``evaluate``, ``haar_integral`` and ``shell_integrals``, which is
all the multiplicative Mellin transform needs.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import numpy as np

from .errors import DomainError, SizeError, ZeroInputError

MAX_TABLE = 3 ** 12


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def primes_up_to(n: int) -> np.ndarray:
    """Sieve of Eratosthenes, primes <= n."""
    if n < 2:
        return np.empty(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for q in range(2, int(n ** 0.5) + 1):
        if sieve[q]:
            sieve[q * q::q] = False
    return np.flatnonzero(sieve)


def check_odd_prime(p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p == 2:
        raise ValueError("p = 2 is excluded: only odd primes are supported")


def _rational(r) -> Fraction:
    if isinstance(r, Fraction):
        return r
    if isinstance(r, (int, Rational, str)):
        return Fraction(r)
    raise TypeError(f"expected an exact rational, got {type(r).__name__}")


def _vp_int(n: int, p: int) -> int:
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


@dataclass(frozen=True)
class PadicNorm:
    """|r|_p = p^{-k}."""

    p: int
    k: int

    @property
    def value(self) -> Fraction:
        return Fraction(1, self.p ** self.k) if self.k >= 0 else Fraction(self.p ** -self.k)

    @property
    def exponent(self) -> int:
        """e with |r|_p = p^e."""
        return -self.k


def padic_valuation(r, p: int) -> PadicNorm:
    r = _rational(r)
    if r == 0:
        raise ZeroInputError("|0|_p = 0 has no finite valuation")
    return PadicNorm(p, _vp_int(abs(r.numerator), p) - _vp_int(r.denominator, p))


def padic_abs(r, p: int) -> Fraction:
    r = _rational(r)
    return Fraction(0) if r == 0 else padic_valuation(r, p).value


def _abs_exp(r: Fraction, p: int) -> float:
    """e with |r|_p = p^e, -inf for r = 0."""
    return -math.inf if r == 0 else padic_valuation(r, p).exponent


def padic_frac(x, p: int) -> Fraction:
    """p-adic fractional part {x}_p in [0, 1): the negative-power digits of x."""
    x = _rational(x)
    k = _vp_int(x.denominator, p)
    if k == 0:
        return Fraction(0)
    pk = p ** k
    unit = x.denominator // pk
    return Fraction((x.numerator * pow(unit, -1, pk)) % pk, pk)


def additive_character(x, p: int) -> complex:
    """e^{2 pi i {x}_p}."""
    f = padic_frac(x, p)
    return complex(np.exp(2j * np.pi * f.numerator / f.denominator))


def _index_valuations(p: int, size: int) -> np.ndarray:
    """v_p(a) for a = 0..size-1, with v_p(0) reported as -1."""
    a = np.arange(size)
    v = np.zeros(size, dtype=np.int64)
    rest = a.copy()
    rest[0] = 1
    while True:
        div = (rest % p == 0)
        if not div.any():
            break
        v[div] += 1
        rest[div] //= p
    v[0] = -1
    return v


@dataclass(frozen=True, eq=False)
class LocallyConstantFn:
    p: int
    M: int
    m: int
    values: np.ndarray

    def __post_init__(self):
        check_odd_prime(self.p)
        if self.M + self.m < 0:
            raise ValueError("need M + m >= 0")
        size = self.p ** (self.M + self.m)
        if size > MAX_TABLE:
            raise SizeError(f"table of {size} cosets exceeds {MAX_TABLE}")
        vals = np.asarray(self.values, dtype=complex).reshape(-1)
        if vals.size != size:
            raise ValueError(f"expected {size} values, got {vals.size}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def size(self) -> int:
        return self.values.size

    @classmethod
    def zeros(cls, p: int, M: int, m: int) -> "LocallyConstantFn":
        return cls(p, M, m, np.zeros(_table_size(p, M, m), dtype=complex))

    @classmethod
    def ball(cls, p: int, r: int) -> "LocallyConstantFn":
        """Omega_r: indicator of |x|_p <= p^r."""
        return cls(p, r, -r, np.ones(1))

    @classmethod
    def shell(cls, p: int, k: int) -> "LocallyConstantFn":
        """Delta_k: indicator of |x|_p = p^k."""
        vals = np.ones(p)
        vals[0] = 0.0
        return cls(p, k, 1 - k, vals)

    def representative(self, a: int) -> Fraction:
        return Fraction(a) / Fraction(self.p) ** self.M

    def index_of(self, x) -> int | None:
        """Table index of the coset containing x, None outside the support."""
        x = _rational(x)
        if _abs_exp(x, self.p) > self.M:
            return None
        y = x * Fraction(self.p) ** self.M  # p-adic integer
        P = self.p ** (self.M + self.m)
        if P == 1:
            return 0
        return (y.numerator * pow(y.denominator, -1, P)) % P

    def __call__(self, x) -> complex:
        i = self.index_of(x)
        return 0j if i is None else complex(self.values[i])

    evaluate = __call__

    def refine(self, M: int, m: int) -> "LocallyConstantFn":
        """Same function on the finer grid (M, m), M >= self.M, m >= self.m."""
        if M < self.M or m < self.m:
            raise ValueError("refine can only enlarge support and resolution")
        out = np.zeros(_table_size(self.p, M, m), dtype=complex)
        step = self.p ** (M - self.M)
        P_old = self.p ** (self.M + self.m)
        idx = np.arange(0, out.size, step)
        out[idx] = self.values[(idx // step) % P_old]
        return LocallyConstantFn(self.p, M, m, out)

    def _common(self, other: "LocallyConstantFn"):
        if other.p != self.p:
            raise ValueError("different primes")
        M, m = max(self.M, other.M), max(self.m, other.m)
        return self.refine(M, m), other.refine(M, m)

    def __add__(self, other):
        a, b = self._common(other)
        return LocallyConstantFn(a.p, a.M, a.m, a.values + b.values)

    def __sub__(self, other):
        a, b = self._common(other)
        return LocallyConstantFn(a.p, a.M, a.m, a.values - b.values)

    def __mul__(self, c):
        return LocallyConstantFn(self.p, self.M, self.m, self.values * complex(c))

    __rmul__ = __mul__

    def reflect(self) -> "LocallyConstantFn":
        """x -> f(-x)."""
        idx = (-np.arange(self.size)) % self.size
        return LocallyConstantFn(self.p, self.M, self.m, self.values[idx])

    def max_abs_diff(self, other: "LocallyConstantFn") -> float:
        a, b = self._common(other)
        return float(np.max(np.abs(a.values - b.values)))

    def haar_integral(self) -> complex:
        return complex(np.sum(self.values)) * float(Fraction(self.p) ** -self.m)

    def l2_norm_sq(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2)) * float(Fraction(self.p) ** -self.m)

    @property
    def support_exponent(self) -> int:
        return self.M

    @property
    def inner_exponent(self) -> int:
        """Shells k <= this lie inside the coset of 0."""
        return -self.m

    @property
    def value_at_zero(self) -> complex:
        return complex(self.values[0])

    def shell_integrals(self) -> dict[int, complex]:
        """int_{|x|=p^k} f dx for inner_exponent < k <= M (exact coset sums)."""
        v = _index_valuations(self.p, self.size)
        cell = float(Fraction(self.p) ** -self.m)
        out = {}
        for k in range(-self.m + 1, self.M + 1):
            out[k] = complex(np.sum(self.values[v == self.M - k])) * cell
        return out

    def to_json(self) -> str:
        vals = [[float(z.real), float(z.imag)] for z in self.values]
        return json.dumps({"p": self.p, "M": self.M, "m": self.m, "values": vals},
                          separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "LocallyConstantFn":
        d = json.loads(text)
        vals = np.array([complex(re, im) for re, im in d["values"]], dtype=complex)
        return cls(int(d["p"]), int(d["M"]), int(d["m"]), vals)


def _table_size(p: int, M: int, m: int) -> int:
    if M + m < 0:
        raise ValueError("need M + m >= 0")
    size = p ** (M + m)
    if size > MAX_TABLE:
        raise SizeError(f"table of {size} cosets exceeds {MAX_TABLE}")
    return size


@dataclass(frozen=True)
class Ball:
    """1{|x - center|_p <= p^r}; center canonicalised to 0 when the ball contains 0."""

    p: int
    center: Fraction
    r: int

    def __post_init__(self):
        c = _rational(self.center)
        if _abs_exp(c, self.p) <= self.r:
            c = Fraction(0)
        object.__setattr__(self, "center", c)

    @property
    def centered(self) -> bool:
        return self.center == 0

    def contains(self, x) -> bool:
        return _abs_exp(_rational(x) - self.center, self.p) <= self.r


@dataclass(frozen=True)
class BallSum:
    """Finite linear combination of ball indicators on Q_p."""

    p: int
    terms: tuple[tuple[Ball, complex], ...] = field(default_factory=tuple)

    @classmethod
    def of(cls, p: int, items) -> "BallSum":
        return cls(p, tuple((Ball(p, Fraction(c), r), complex(w)) for c, r, w in items))

    def __add__(self, other: "BallSum") -> "BallSum":
        if other.p != self.p:
            raise ValueError("different primes")
        return BallSum(self.p, self.terms + other.terms)

    def __mul__(self, c) -> "BallSum":
        return BallSum(self.p, tuple((b, w * complex(c)) for b, w in self.terms))

    __rmul__ = __mul__

    def __call__(self, x) -> complex:
        return complex(sum(w for b, w in self.terms if b.contains(x)))

    evaluate = __call__

    def haar_integral(self) -> complex:
        return complex(sum(w * float(Fraction(self.p) ** b.r) for b, w in self.terms))

    @property
    def support_exponent(self) -> int:
        exps = [b.r if b.centered else _abs_exp(b.center, self.p) for b, _ in self.terms]
        return int(max(exps, default=0))

    @property
    def inner_exponent(self) -> int:
        """Below this shell only centred balls contribute."""
        exps = [b.r for b, _ in self.terms if b.centered]
        exps += [_abs_exp(b.center, self.p) - 1 for b, _ in self.terms if not b.centered]
        return int(min(exps, default=0))

    @property
    def value_at_zero(self) -> complex:
        return complex(sum(w for b, w in self.terms if b.centered))

    def shell_integrals(self) -> dict[int, complex]:
        """int_{|x|=p^k} f dx for inner_exponent < k <= support_exponent."""
        lo, hi = self.inner_exponent, self.support_exponent
        # weights are summed per (shell, measure) before scaling, so cancellation is exact
        parts = {k: {} for k in range(lo + 1, hi + 1)}
        shell_frac = Fraction(self.p - 1, self.p)
        for b, w in self.terms:
            if b.centered:
                for k in range(lo + 1, b.r + 1):
                    parts[k].setdefault(Fraction(self.p) ** k * shell_frac, []).append(w)
            else:
                k = int(_abs_exp(b.center, self.p))
                parts[k].setdefault(Fraction(self.p) ** b.r, []).append(w)
        out = {}
        for k, groups in parts.items():
            terms = [float(meas) * complex(math.fsum(z.real for z in ws),
                                           math.fsum(z.imag for z in ws))
                     for meas, ws in groups.items()]
            out[k] = complex(math.fsum(z.real for z in terms), math.fsum(z.imag for z in terms))
        return out

    def to_table(self, M: int | None = None, m: int | None = None) -> LocallyConstantFn:
        """Dense coset table; default grid is the coarsest one that resolves every ball."""
        if M is None:
            M = self.support_exponent
        if m is None:
            m = max((-b.r for b, _ in self.terms), default=-M)
        vals = np.zeros(_table_size(self.p, M, m), dtype=complex)
        for b, w in self.terms:
            if b.r < -m:
                raise ValueError("grid resolution too coarse for ball")
            if (b.r if b.centered else _abs_exp(b.center, self.p)) > M:
                raise ValueError("ball outside table support")
            # grid points a p^{-M} with a = a0 mod p^{M-r}
            stride = self.p ** (M - b.r) if M >= b.r else 1
            y = b.center * Fraction(self.p) ** M
            a0 = (y.numerator * pow(y.denominator, -1, stride)) % stride if stride > 1 else 0
            vals[a0::stride] += w
        return LocallyConstantFn(self.p, M, m, vals)


def haar_integral(f) -> complex:
    """int_{Q_p} f dx with the unit ball normalised to measure 1."""
    return f.haar_integral()


def default_shell_floor(f, sigma: float, tail_tol: float = 1e-16) -> int:
    """Lowest shell needed so the geometric tail below it is < tail_tol."""
    p = f.p
    c0 = max(abs(f.value_at_zero), 1.0)
    # tail = |c0| p^{sigma floor} / (1 - p^{-sigma})
    bound = math.log(tail_tol * (1.0 - p ** -sigma) / c0) / (sigma * math.log(p))
    return min(f.inner_exponent, math.floor(bound))


def mult_haar_mellin(f, s, shell_floor: int | None = None, nu_p: complex = 1.0):
    """int_{Q_p^x} f(x) nu(x) |x|_p^s d^x x as a sum over shells.

    d^x x = p/(p-1) |x|^{-1} dx, and nu is unramified with nu(p) = nu_p, so the
    shell |x| = p^k contributes (p/(p-1)) p^{-k} p^{ks} nu_p^{-k} int_{shell} f.
    Shells are summed explicitly from the support down to ``shell_floor``.
    """
    s = np.asarray(s, dtype=complex)
    if np.any(s.real <= 0):
        raise DomainError("shell sum converges only for Re s > 0")
    p = f.p
    if shell_floor is None:
        shell_floor = default_shell_floor(f, float(np.min(s.real)))
    # weight of shell k is (p/(p-1)) p^{-k} int_shell f, the mean of f over the shell;
    # inside the coset of 0 that mean is f(0), used directly to avoid p^{-k} overflow
    weights = {k: float(Fraction(p, p - 1) * Fraction(p) ** -k) * v
               for k, v in f.shell_integrals().items()}
    c0 = f.value_at_zero
    for k in range(shell_floor, f.inner_exponent + 1):
        weights[k] = weights.get(k, 0j) + c0
    base = np.exp(s * math.log(p))  # p^s; p^{ks} taken as integer powers of it
    nu = complex(nu_p)
    parts = []
    for k in sorted(weights, reverse=True):
        if k < shell_floor or weights[k] == 0:
            continue
        parts.append(weights[k] * nu ** (-k) * base ** k)
    parts = np.array(parts).reshape(len(parts), *s.shape)
    total = np.empty(s.shape, dtype=complex)
    for idx in np.ndindex(s.shape):
        col = parts[(slice(None),) + idx]
        total[idx] = complex(math.fsum(col.real), math.fsum(col.imag))
    return complex(total) if total.ndim == 0 else total


def padic_fourier(f: LocallyConstantFn) -> LocallyConstantFn:
    """tilde f(x) = int e^{2 pi i {x y}_p} f(y) dy.

    With x = c p^{-m} and y = a p^{-M}, {xy}_p = (a c mod P) / P, P = p^{M+m},
    so the transform is p^{-m} sum_a f_a e^{2 pi i a c / P} on the swapped grid.
    """
    P = f.size
    out = np.fft.ifft(f.values) * P * float(Fraction(f.p) ** -f.m)
    return LocallyConstantFn(f.p, f.m, f.M, out)


def random_zero_shell_table(p: int, M: int, m: int, rng: np.random.Generator,
                            real: bool = True) -> LocallyConstantFn:
    """Random table whose integral over every shell vanishes (f(0) = 0)."""
    size = _table_size(p, M, m)
    vals = rng.standard_normal(size)
    if not real:
        vals = vals + 1j * rng.standard_normal(size)
    vals = vals.astype(complex)
    v = _index_valuations(p, size)
    vals[v < 0] = 0.0
    for val in np.unique(v[v >= 0]):
        sel = v == val
        vals[sel] -= vals[sel].mean()
    return LocallyConstantFn(p, M, m, vals)


def random_zero_shell_balls(p: int, shells, depth: int, rng: np.random.Generator,
                            max_balls_per_shell: int = 2000) -> BallSum:
    """Random real function on the given shells with every shell integral zero.

    Shell k is cut into balls of radius p^{k-d} (d = min(depth, largest depth
    keeping the count under max_balls_per_shell)); the values are centred so
    that their measure-weighted sum vanishes.
    """
    items = []
    for k in shells:
        d = max(1, depth)
        while d > 1 and (p - 1) * p ** (d - 1) > max_balls_per_shell:
            d -= 1
        units = [u for u in range(1, p ** d) if u % p]
        # values on a dyadic grid, so the zero sum below is exact in floating point
        w = np.round(rng.standard_normal(len(units)) * 2.0 ** 30) / 2.0 ** 30
        w[-1] = -math.fsum(w[:-1])
        # centre u p^{-k} has |.|_p = p^k; radius p^{k-d} separates u mod p^d
        for u, wu in zip(units, w):
            items.append((Fraction(u) / Fraction(p) ** k, k - d, float(wu)))
    return BallSum.of(p, items)
