"""Zero localisation: sign-change isolation on the real E axis and
argument-principle counting on rectangles in the complex E plane."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import bisect

from .bk_spectral import block_for_level, block_spectrum
from .errors import ContourError, ResolutionError
from .mellin_real import (DEFAULT_QUADRATURE, QuadratureSpec, gamma_real_closed,
                          gamma_real_oracle, s_from_E)
from .special_fn import gamma_base_real


@dataclass(frozen=True)
class Rectangle:
    """E in [e_min, e_max] x Im E in [-height, height]."""

    e_min: float
    e_max: float
    height: float = 2.0

    def __post_init__(self):
        if not self.e_min < self.e_max:
            raise ValueError("need e_min < e_max")
        if not self.height > 0:
            raise ValueError("height must be positive")

    def inflated(self, factor: float) -> "Rectangle":
        c = 0.5 * (self.e_min + self.e_max)
        h = 0.5 * (self.e_max - self.e_min) * factor
        return Rectangle(c - h, c + h, self.height * factor)

    def contains(self, z: complex) -> bool:
        return self.e_min < z.real < self.e_max and abs(z.imag) < self.height

    def corners(self) -> list[complex]:
        return [complex(self.e_min, -self.height), complex(self.e_max, -self.height),
                complex(self.e_max, self.height), complex(self.e_min, self.height)]


@dataclass
class ZeroReport:
    N: int
    real_zeros: list[float]
    eigenvalues: list[float]
    contour_count: int
    winding: int
    poles_enclosed: int
    pair_distances: list[float] = field(default_factory=list)
    phase_residual: float = 0.0

    @property
    def max_pair_distance(self) -> float:
        return max(self.pair_distances, default=0.0)

    @property
    def certified(self) -> bool:
        K = len(self.eigenvalues)
        return len(self.real_zeros) == K and self.contour_count == K


def isolate_real_zeros(f, interval, grid_step: float, xtol: float = 1e-10) -> list[float]:
    """One zero per sign change of a real function f on the interval.

    f is sampled on the grid and at cell midpoints; a cell whose three samples
    show two sign changes raises ResolutionError. Zeros are refined by
    bisection to ``xtol``.
    """
    a, b = interval
    n = max(1, math.ceil((b - a) / grid_step))
    x = np.linspace(a, b, 2 * n + 1)
    vals = np.array([float(f(t)) for t in x])
    exact = vals == 0.0
    change = (vals[:-1] * vals[1:]) < 0
    for i in range(n):
        events = int(change[2 * i]) + int(change[2 * i + 1]) + int(exact[2 * i + 1])
        if events > 1:
            raise ResolutionError(
                f"two sign changes in cell [{x[2 * i]:.6g}, {x[2 * i + 2]:.6g}]; "
                "reduce grid_step")
    zeros = [float(v) for v in x[exact]]
    for k in np.flatnonzero(change):
        zeros.append(float(bisect(f, x[k], x[k + 1], xtol=xtol)))
    return sorted(zeros)


def _boundary(rect: Rectangle, samples_per_side: int) -> np.ndarray:
    c = rect.corners() + [rect.corners()[0]]
    t = np.linspace(0.0, 1.0, samples_per_side, endpoint=False)
    pts = [c[k] + (c[k + 1] - c[k]) * t for k in range(4)]
    return np.concatenate(pts + [np.array([c[0]])])


def _eval(f, z: np.ndarray) -> np.ndarray:
    try:
        out = np.asarray(f(z), dtype=complex)
        if out.shape == z.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([complex(f(v)) for v in z])


def _winding(f, rect: Rectangle, samples_per_side: int, budget: int) -> float:
    z = _boundary(rect, samples_per_side)
    w = _eval(f, z)
    mags = np.abs(w)
    if not np.all(np.isfinite(w)):
        raise ContourError("non-finite value on contour")
    if np.min(mags) < 1e-8 * np.median(mags):
        raise ContourError("function nearly vanishes on contour")
    total = 0.0
    refinements = 0
    stack = [(z[i], z[i + 1], w[i], w[i + 1]) for i in range(len(z) - 1)]
    while stack:
        za, zb, wa, wb = stack.pop()
        d = float(np.angle(wb / wa))
        if abs(d) < math.pi / 4:
            total += d
            continue
        refinements += 1
        if refinements > budget:
            raise ContourError("argument tracking exceeded refinement budget")
        zm = 0.5 * (za + zb)
        wm = complex(_eval(f, np.array([zm]))[0])
        if wm == 0 or not np.isfinite(wm):
            raise ContourError(f"zero or pole on contour near {zm}")
        stack.append((za, zm, wa, wm))
        stack.append((zm, zb, wm, wb))
    return total / (2 * math.pi)


def argument_principle_count(f, rect: Rectangle, samples_per_side: int = 256,
                             budget: int = 100000) -> int:
    """Winding number of f around the rectangle (zeros minus poles inside).

    If |f| dips below 1e-8 of its median on the contour, the rectangle is
    inflated by 10% once before giving up with ContourError.
    """
    if samples_per_side < 256:
        raise ValueError("samples_per_side must be at least 256")
    try:
        turns = _winding(f, rect, samples_per_side, budget)
    except ContourError:
        turns = _winding(f, rect.inflated(1.1), samples_per_side, budget)
    k = round(turns)
    if abs(turns - k) > 1e-6:
        raise ContourError(f"non-integer winding {turns}")
    return int(k)


def base_gamma_poles(delta: int, rect: Rectangle) -> list[complex]:
    """Poles of Gamma_{inf,delta}(1/2 + iE) inside the rectangle, in the E plane."""
    # s = -(2j + delta) for j >= 0, i.e. E = i (1/2 + 2j + delta)
    poles = []
    j = 0
    while True:
        E = 1j * (0.5 + 2 * j + delta)
        if E.imag >= rect.height:
            break
        if rect.contains(E):
            poles.append(E)
        j += 1
    return poles


def rotated_oracle(N: int, E_max: float, spec: QuadratureSpec = DEFAULT_QUADRATURE):
    """Real function of E whose zeros are the zeros of the quadrature oracle.

    The oracle is divided by the zero-free base factor Gamma_{inf,delta} and
    rotated by one fixed phase, fitted from the samples. Returns the callable
    and the residual |Im| / max|value| left after rotation.
    """
    delta = N % 2
    grid = np.linspace(-E_max, E_max, 64)

    def g(E):
        s = s_from_E(E)
        return gamma_real_oracle(N, s, spec) / gamma_base_real(delta, s)

    samples = g(grid)
    theta = float(np.angle(samples[np.argmax(np.abs(samples))]))
    rot = np.exp(-1j * theta)
    residual = float(np.max(np.abs((samples * rot).imag)) / np.max(np.abs(samples)))

    def f(E):
        return float((g(E) * rot).real)

    return f, residual


def certify_level(N: int, height: float = 2.0, grid_step: float | None = None,
                  samples_per_side: int = 512,
                  spec: QuadratureSpec = DEFAULT_QUADRATURE) -> ZeroReport:
    """Locate the zeros of Gamma_{inf,N}(1/2 + iE) and certify that none is off the line.

    Real zeros come from the quadrature oracle; the contour count applies the
    argument principle to the closed form on [-E*, E*] x [-height, height]
    and adds back the known poles of the base gamma factor.
    """
    block = block_for_level(N)
    eig = block_spectrum(block)
    e_star = (float(np.max(np.abs(eig))) if len(eig) else 0.0) + 1.0
    if grid_step is None:
        gap = float(np.min(np.diff(eig))) if len(eig) > 1 else 1.0
        grid_step = min(0.25, 0.45 * gap)
    f, residual = rotated_oracle(N, e_star, spec)
    zeros = isolate_real_zeros(f, (-e_star, e_star), grid_step)
    rect = Rectangle(-e_star, e_star, height)

    def closed(E):
        return gamma_real_closed(N, s_from_E(E))

    winding = argument_principle_count(closed, rect, samples_per_side)
    poles = len(base_gamma_poles(N % 2, rect))
    dists = []
    if len(zeros) == len(eig):
        dists = [float(abs(z - e)) for z, e in zip(zeros, eig)]
    return ZeroReport(N, zeros, [float(e) for e in eig], winding + poles, winding, poles,
                      dists, residual)
