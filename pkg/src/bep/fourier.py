"""Uniform-grid spectral calculus on the unit circle.

FFT-based Fourier series, analytic/anti-analytic (Cauchy) projections,
the conjugation operator, and quadrature over arc-sets.  All functions
here are pure; grids, grid functions and series are immutable value
objects safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .arcs import ArcSet

REAL_TOL = 1e-12


class GridMismatchError(ValueError):
    """Two grid functions living on different grids were combined."""


@dataclass(frozen=True)
class Grid:
    """Uniform n-point grid on [0, 2pi); n a power of two, n >= 8."""

    n: int

    def __post_init__(self):
        if self.n < 8 or (self.n & (self.n - 1)) != 0:
            raise ValueError(f"grid size must be a power of two >= 8, got {self.n}")

    @property
    def theta(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n) / self.n

    @property
    def h(self) -> float:
        """Grid spacing in radians."""
        return 2.0 * np.pi / self.n

    @property
    def points(self) -> np.ndarray:
        """Grid points on the unit circle, e^{i theta_k}."""
        return np.exp(1j * self.theta)

    def frequencies(self) -> np.ndarray:
        """Integer frequencies in FFT order: 0..n/2-1, -n/2..-1."""
        return np.fft.fftfreq(self.n, d=1.0 / self.n).astype(int)


@dataclass(frozen=True)
class GridFunction:
    """Complex samples on a uniform circle grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.grid.n,):
            raise ValueError(
                f"expected {self.grid.n} samples, got shape {vals.shape}"
            )
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, grid: Grid, fn) -> "GridFunction":
        return cls(grid, np.asarray(fn(grid.theta), dtype=complex))

    @classmethod
    def constant(cls, grid: Grid, c) -> "GridFunction":
        return cls(grid, np.full(grid.n, c, dtype=complex))

    def is_real(self, tol: float = REAL_TOL) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.values), initial=0.0)))
        return float(np.max(np.abs(self.values.imag), initial=0.0)) <= tol * scale

    def real_values(self, tol: float = REAL_TOL) -> np.ndarray:
        if not self.is_real(tol):
            raise ValueError("grid function is not real to tolerance")
        return self.values.real

    def _check_same_grid(self, other: "GridFunction"):
        if self.grid.n != other.grid.n:
            raise GridMismatchError(
                f"grid sizes differ: {self.grid.n} vs {other.grid.n}"
            )


@dataclass(frozen=True)
class FourierSeries:
    """Finite Fourier series; coefficients stored in FFT order.

    Index m runs over [-n/2, n/2-1].  An analytic series (Hardy-space
    representative) has zero coefficients for all m < 0.
    """

    coeffs: np.ndarray = field()

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        n = c.shape[0]
        if c.ndim != 1 or n < 8 or (n & (n - 1)) != 0:
            raise ValueError("coefficient vector length must be a power of two >= 8")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def n(self) -> int:
        return self.coeffs.shape[0]

    def frequencies(self) -> np.ndarray:
        return np.fft.fftfreq(self.n, d=1.0 / self.n).astype(int)

    def coeff(self, m: int) -> complex:
        half = self.n // 2
        if not (-half <= m < half):
            return 0.0
        return complex(self.coeffs[m % self.n])

    def is_analytic(self, tol: float = REAL_TOL) -> bool:
        neg = self.coeffs[self.n // 2 :]
        scale = max(1.0, self.norm_l2())
        return float(np.max(np.abs(neg), initial=0.0)) <= tol * scale

    def norm_l2(self) -> float:
        """L2(T) norm by Parseval (normalized measure)."""
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))

    def truncate(self, degree: int) -> "FourierSeries":
        """Zero all coefficients with |m| > degree."""
        m = self.frequencies()
        c = np.where(np.abs(m) <= degree, self.coeffs, 0.0)
        return FourierSeries(c)


def fft_analyze(u: GridFunction) -> FourierSeries:
    """Discrete Fourier coefficients of a grid function (mean-normalized)."""
    return FourierSeries(np.fft.fft(u.values) / u.grid.n)


def fft_synthesize(s: FourierSeries, grid: Grid | None = None) -> GridFunction:
    """Evaluate a Fourier series back on its grid."""
    grid = grid if grid is not None else Grid(s.n)
    if grid.n != s.n:
        raise GridMismatchError("series length does not match grid size")
    return GridFunction(grid, np.fft.ifft(s.coeffs * s.n))


def project_plus(s: FourierSeries) -> FourierSeries:
    """Analytic (Cauchy) projection: keep coefficients with m >= 0."""
    c = s.coeffs.copy()
    c[s.n // 2 :] = 0.0
    return FourierSeries(c)


def project_minus(s: FourierSeries) -> FourierSeries:
    """Anti-analytic projection: keep coefficients with m < 0."""
    c = s.coeffs.copy()
    c[: s.n // 2] = 0.0
    return FourierSeries(c)


def conjugate_multiplier(n: int) -> np.ndarray:
    """Spectral multiplier -i*sign(m), with the Nyquist bin zeroed.

    Zeroing m = -n/2 keeps real inputs real; that bin is pure
    discretization artifact for bandlimited data.
    """
    m = np.fft.fftfreq(n, d=1.0 / n).astype(int)
    mult = -1j * np.sign(m).astype(complex)
    mult[n // 2] = 0.0
    return mult


def conjugate_function(h: GridFunction) -> GridFunction:
    """Harmonic-conjugate boundary trace of a real grid function.

    Fourier multiplier -i*sign(m); the output has zero mean and is real.
    """
    hv = h.real_values()
    c = np.fft.fft(hv) / h.grid.n
    c *= conjugate_multiplier(h.grid.n)
    out = np.fft.ifft(c * h.grid.n)
    return GridFunction(h.grid, out.real.astype(complex))


def quadrature_weights(E: ArcSet, grid: Grid) -> np.ndarray:
    """Arc-set quadrature weights: 1 strictly inside, 1/2 at snapped endpoints."""
    return E.boundary_weights(grid)


def inner_product(u: GridFunction, v: GridFunction, E: ArcSet | None = None) -> complex:
    """Quadrature of (1/2pi) * integral_E u conj(v) d(theta).

    E = None means the full circle, where the rule reduces to the exact
    Parseval sum for trigonometric polynomials of degree < n/2.
    """
    u._check_same_grid(v)
    prod = u.values * np.conj(v.values)
    if E is None:
        return complex(np.sum(prod) / u.grid.n)
    w = quadrature_weights(E, u.grid)
    return complex(np.sum(w * prod) / u.grid.n)


def norm_l2(u: GridFunction, E: ArcSet | None = None) -> float:
    """Quadrature L2 norm of u over the arc-set E (normalized measure)."""
    if E is not None and not E.arcs:
        raise ValueError("empty arc-set has no L2 norm")
    val = inner_product(u, u, E).real
    return float(np.sqrt(max(val, 0.0)))


def norm_sup(u: GridFunction, E: ArcSet | None = None) -> float:
    """Max of |u| over grid points belonging to E (endpoints included)."""
    if E is None:
        return float(np.max(np.abs(u.values)))
    mask = E.mask(u.grid)
    if not mask.any():
        raise ValueError("arc-set contains no grid points")
    return float(np.max(np.abs(u.values[mask])))


def norm_lp(u: GridFunction, p: float, E: ArcSet | None = None) -> float:
    """Quadrature Lp norm over E (normalized measure)."""
    a = np.abs(u.values) ** p
    if E is None:
        return float(np.mean(a) ** (1.0 / p))
    w = quadrature_weights(E, u.grid)
    return float((np.sum(w * a) / u.grid.n) ** (1.0 / p))
