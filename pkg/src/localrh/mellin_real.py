"""Mellin transform of oscillator eigenfunctions over the reals.

Two independent routes to Gamma_{inf,N}(s) = 2 int_0^inf psi_N(x) x^{s-1} dx:

* ``gamma_real_oracle``: adaptive Gauss-Legendre quadrature after x = e^u.
* ``gamma_real_closed``: det_K(E - H_BK) * Gamma_{inf,delta}(s), E = (s - 1/2)/i.

The two agree up to an N-dependent constant which is fitted, never assumed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bk_spectral import block_for_level, charpoly
from .errors import ConvergenceError, DomainError
from .special_fn import HermiteLevel, gamma_base_real, hermite_psi

_GL_ORDER = 20
_PSI_BOUND = 1.3  # sup |psi_N| for the L2-normalised family


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-14
    panel_limit: int = 20000
    split_point: float = 1.0

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.panel_limit < 64:
            raise ValueError("panel_limit must be at least 64")
        if not self.split_point > 0:
            raise ValueError("split_point must be positive")


DEFAULT_QUADRATURE = QuadratureSpec()


def _as_level(level) -> HermiteLevel:
    return level if isinstance(level, HermiteLevel) else HermiteLevel(int(level))


def s_from_E(E):
    return 0.5 + 1j * np.asarray(E)


def E_from_s(s):
    return -1j * (np.asarray(s, dtype=complex) - 0.5)


@lru_cache(maxsize=None)
def _gauss_legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


def _panel_nodes(a: float, b: float):
    x, w = _gauss_legendre(_GL_ORDER)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


@lru_cache(maxsize=256)
def _rule(N: int, side: int, sigma_min: float, sigma_max: float, e_bucket: int,
          spec: QuadratureSpec):
    """Nodes u_i and weights w_i * psi(side * e^{u_i}) resolving all probe s values."""

    def g(u):
        return hermite_psi(N, side * np.exp(u))

    probes = np.array([sig + 1j * e for sig in {sigma_min, sigma_max}
                       for e in (0.0, 0.5 * e_bucket, float(e_bucket))])

    u_split = math.log(spec.split_point)
    x_turn = math.sqrt((2 * N + 1) / (2 * math.pi))
    x_hi = max(x_turn + math.sqrt(50.0 / math.pi), 2.0 * spec.split_point)
    u_hi = math.log(x_hi)
    # tail below u_lo bounded by 2 * sup|psi| * e^{sigma u_lo} / sigma
    u_lo = math.log(1e-3 * spec.abs_tol * sigma_min / (2 * _PSI_BOUND)) / sigma_min
    u_lo = min(u_lo, u_split - 1.0)
    total = u_hi - u_lo

    width0 = min(0.5, math.pi / max(e_bucket, 1))
    stack = []
    for a, b in ((u_lo, u_split), (u_split, u_hi)):
        n = max(1, math.ceil((b - a) / width0))
        edges = np.linspace(a, b, n + 1)
        stack.extend(zip(edges[:-1], edges[1:]))

    def integrate(a, b):
        u, w = _panel_nodes(a, b)
        wg = w * g(u)
        return u, wg, np.exp(np.outer(probes, u)) @ wg, np.exp(np.outer(probes.real, u)) @ np.abs(wg)

    nodes, weights = [], []
    evaluated = 0
    cache = {}
    while stack:
        a, b = stack.pop()
        evaluated += 1
        if evaluated > spec.panel_limit:
            raise ConvergenceError(
                f"quadrature for N={N} exceeded {spec.panel_limit} panels")
        whole = (cache.pop((a, b), None) or integrate(a, b))[2]
        m = 0.5 * (a + b)
        left, right = integrate(a, m), integrate(m, b)
        err = np.max(np.abs(left[2] + right[2] - whole))
        roundoff = 64 * np.finfo(float).eps * np.max(left[3] + right[3])
        if err <= max(spec.abs_tol * (b - a) / total, roundoff) or b - a < 1e-9:
            nodes.extend((left[0], right[0]))
            weights.extend((left[1], right[1]))
        else:
            cache[(a, m)] = left
            cache[(m, b)] = right
            stack.extend(((a, m), (m, b)))
    return np.concatenate(nodes), np.concatenate(weights)


def _half_line(N: int, side: int, s, spec: QuadratureSpec):
    """int_0^inf psi_N(side * x) x^{s-1} dx for scalar or array s."""
    s = np.asarray(s, dtype=complex)
    if np.any(s.real <= 0):
        raise DomainError("Mellin integral converges only for Re s > 0")
    if N > 40:
        raise DomainError("quadrature oracle supports N <= 40")
    sig_min = round(float(np.min(s.real)), 12)
    sig_max = round(float(np.max(s.real)), 12)
    bucket = int(math.ceil(float(np.max(np.abs(s.imag))))) if s.size else 0
    u, wg = _rule(N, side, sig_min, sig_max, bucket, spec)
    flat = s.reshape(-1)
    out = np.empty(flat.shape, dtype=complex)
    for start in range(0, flat.size, 64):
        chunk = flat[start:start + 64]
        out[start:start + 64] = np.exp(np.outer(chunk, u)) @ wg
    out = out.reshape(s.shape)
    return complex(out) if out.ndim == 0 else out


def gamma_real_oracle(level, s, spec: QuadratureSpec = DEFAULT_QUADRATURE):
    """Gamma_{inf,N}(s) = 2 int_0^inf psi_N(x) x^{s-1} dx by quadrature (Re s > 0)."""
    level = _as_level(level)
    return 2.0 * _half_line(level.N, 1, s, spec)


def mellin_full_line(level, delta: int, s, spec: QuadratureSpec = DEFAULT_QUADRATURE):
    """<N|E,delta> = int psi_N(x) (sgn x)^delta |x|^{s-1} dx over the whole line.

    The negative half-line is integrated directly (psi evaluated at -x), so the
    parity selection rule is checked rather than assumed.
    """
    level = _as_level(level)
    pos = _half_line(level.N, 1, s, spec)
    neg = _half_line(level.N, -1, s, spec)
    return pos + (-1) ** delta * neg


def gamma_real_closed(level, s):
    """det_K(E - H_BK) * Gamma_{inf,delta}(s): the closed form without c_N."""
    level = _as_level(level)
    block = block_for_level(level.N)
    return charpoly(block, E_from_s(s)) * gamma_base_real(level.delta, s)


@dataclass
class RatioFit:
    N: int
    E: np.ndarray
    ratios: np.ndarray
    c_N: complex
    spread: float


def fit_normalization(level, E_grid=None, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> RatioFit:
    """Fit c_N = oracle / closed on a real E grid and report its relative spread."""
    level = _as_level(level)
    E = np.linspace(-5.0, 5.0, 20) if E_grid is None else np.asarray(E_grid, dtype=float)
    s = s_from_E(E)
    ratios = gamma_real_oracle(level, s, spec) / gamma_real_closed(level, s)
    c = complex(np.median(ratios.real) + 1j * np.median(ratios.imag))
    spread = float(np.max(np.abs(ratios - c)) / abs(c))
    return RatioFit(level.N, E, ratios, c, spread)
