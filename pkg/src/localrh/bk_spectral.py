"""Truncated Berry-Keating operator on the even or odd oscillator levels.

Levels n = 2k + delta, k = 0..K-1. The operator is tridiagonal in k with
purely imaginary off-diagonals b_k = -(i/2) sqrt((2k+delta)(2k+delta-1)).
Conjugating by diag(i^k) turns it into the real Jacobi matrix with zero
diagonal and off-diagonals |b_k|, whose Sturm sequence is the recursion

    phi_{k+1}(E) = E phi_k(E) - |b_k|^2 phi_{k-1}(E),  phi_{-1} = 0, phi_0 = 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


def bk_matrix_element(n: int, n_prime: int) -> complex:
    """<n|H_BK|n'> between oscillator eigenstates."""
    if n < 0 or n_prime < 0:
        raise ValueError("levels must be nonnegative")
    if n == n_prime + 2:
        return 0.5j * math.sqrt((n_prime + 1) * (n_prime + 2))
    if n == n_prime - 2:
        return -0.5j * math.sqrt(n_prime * (n_prime - 1))
    return 0j


def _offdiag_sq(delta: int, k: int) -> Fraction:
    n = 2 * k + delta
    return Fraction(n * (n - 1), 4)


@dataclass(frozen=True)
class ParityBlock:
    """Parity-restricted block of size K with exact squared off-diagonals."""

    delta: int
    K: int
    offdiag_sq: tuple[Fraction, ...]

    @property
    def offdiag(self) -> np.ndarray:
        return np.sqrt(np.array([float(b) for b in self.offdiag_sq]))

    def jacobi_matrix(self) -> np.ndarray:
        """Real symmetric tridiagonal form diag(i^k)^* H diag(i^k)."""
        b = self.offdiag
        return np.diag(b, 1) + np.diag(b, -1) if self.K > 1 else np.zeros((self.K, self.K))

    def complex_matrix(self) -> np.ndarray:
        """The block in the oscillator basis, built from bk_matrix_element."""
        levels = [2 * k + self.delta for k in range(self.K)]
        return np.array([[bk_matrix_element(n, m) for m in levels] for n in levels])


def build_parity_block(delta: int, K: int) -> ParityBlock:
    if delta not in (0, 1):
        raise ValueError("delta must be 0 or 1")
    if K < 0:
        raise ValueError("K must be nonnegative")
    return ParityBlock(delta, K, tuple(_offdiag_sq(delta, k) for k in range(1, K)))


def block_for_level(N: int) -> ParityBlock:
    """The block whose determinant multiplies the level-N Mellin transform."""
    return build_parity_block(N % 2, N // 2)


def charpoly(block: ParityBlock, E):
    """phi_K(E) = det(E - H) on the block; accepts scalar or array E."""
    E = np.asarray(E, dtype=complex)
    prev = np.zeros_like(E)
    cur = np.ones_like(E)
    for k in range(block.K):
        b2 = float(block.offdiag_sq[k - 1]) if k > 0 else 0.0
        prev, cur = cur, E * cur - b2 * prev
    if cur.ndim == 0:
        return complex(cur)
    return cur


def charpoly_coefficients(block: ParityBlock) -> np.ndarray:
    """Coefficients of phi_K, highest degree first (numpy.poly1d order)."""
    prev, cur = np.poly1d([0.0]), np.poly1d([1.0])
    x = np.poly1d([1.0, 0.0])
    for k in range(block.K):
        b2 = float(block.offdiag_sq[k - 1]) if k > 0 else 0.0
        prev, cur = cur, x * cur - b2 * prev
    return cur.coeffs


def sturm_count(block: ParityBlock, x: float) -> int:
    """Number of eigenvalues <= x (a zero pivot counts x itself)."""
    b2 = [float(b) for b in block.offdiag_sq]
    count = 0
    q = 1.0
    for k in range(block.K):
        # pivots of T - x: q_k = -phi_k(x) / phi_{k-1}(x)
        q = -x - (b2[k - 1] / q if k > 0 else 0.0)
        if q == 0.0:
            q = -1e-300
        if q < 0:
            count += 1
    return count


def gershgorin_radius(block: ParityBlock) -> float:
    b = np.concatenate([[0.0], block.offdiag, [0.0]])
    return float(np.max(b[:-1] + b[1:])) if block.K else 0.0


def block_spectrum(block: ParityBlock, tol: float = 0.0) -> np.ndarray:
    """All eigenvalues of the block, ascending, by Sturm bisection.

    Each eigenvalue is bracketed in (lo, hi] and the upper end is returned;
    tol = 0 bisects to adjacent doubles (at most 200 halvings).
    """
    if block.K == 0:
        return np.empty(0)
    r = gershgorin_radius(block) + 1.0
    eig = np.empty(block.K)
    for i in range(block.K):
        # smallest x with sturm_count(x) > i
        lo, hi = -r, r
        for _ in range(200):
            if hi - lo <= tol:
                break
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            if sturm_count(block, mid) > i:
                hi = mid
            else:
                lo = mid
        eig[i] = hi
    return eig
