"""Hardy-class building blocks on the unit disk.

Outer functions from a prescribed boundary modulus, the Riesz-Herglotz
transform, Blaschke products, and evaluation of analytic series inside
the disk by two independent routes (power series and discretized Cauchy
integral).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .arcs import ArcSet
from .fourier import (
    FourierSeries,
    Grid,
    GridFunction,
    conjugate_multiplier,
    fft_analyze,
)

EPS_MOD = 1e-8          # floor applied to moduli before taking logs
BOUNDARY_MARGIN = 1e-6  # refuse disk evaluation closer than this to the circle
OUTER_OVERSAMPLE = 4    # conjugate functions of log-moduli use a 4x finer grid


class EvalDomainError(ValueError):
    """Evaluation point too close to (or on the wrong side of) the circle."""


def _check_inside(z: np.ndarray, margin: float = BOUNDARY_MARGIN):
    if np.any(np.abs(z) > 1.0 - margin):
        raise EvalDomainError(
            f"evaluation points must satisfy |z| <= {1.0 - margin}"
        )


def _conjugate_samples(values: np.ndarray) -> np.ndarray:
    """Conjugate function of real samples on a uniform grid of any p2 length."""
    n = values.shape[0]
    c = np.fft.fft(values) / n
    c *= conjugate_multiplier(n)
    return np.fft.ifft(c * n).real


def trig_interpolate(values: np.ndarray, n_fine: int) -> np.ndarray:
    """Zero-padding trigonometric interpolation onto a finer uniform grid.

    Exactly reproduces the original samples at the coarse nodes.
    """
    n = values.shape[0]
    if n_fine == n:
        return values.copy()
    if n_fine % n != 0:
        raise ValueError("fine grid size must be a multiple of the coarse one")
    c = np.fft.fft(values) / n
    cf = np.zeros(n_fine, dtype=complex)
    half = n // 2
    cf[:half] = c[:half]
    # split the Nyquist bin symmetrically so real inputs stay real
    cf[half] = 0.5 * c[half]
    cf[n_fine - half] = 0.5 * c[half]
    cf[n_fine - half + 1 :] = c[half + 1 :]
    out = np.fft.ifft(cf * n_fine)
    return out.real if np.isrealobj(values) else out


def riesz_herglotz(h: GridFunction, z) -> np.ndarray:
    """Riesz-Herglotz transform (1/2pi) int (e^{it}+z)/(e^{it}-z) h(t) dt.

    h must be real; z is a scalar or array of points with |z| <= 1 - 1e-6.
    The value at z = 0 is mean(h), real.
    """
    hv = h.real_values()
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    _check_inside(z)
    return _herglotz_quadrature(hv, h.grid.theta, z)


def _herglotz_quadrature(hv: np.ndarray, theta: np.ndarray, z: np.ndarray) -> np.ndarray:
    xi = np.exp(1j * theta)
    kern = (xi[None, :] + z[:, None]) / (xi[None, :] - z[:, None])
    return kern @ hv.astype(complex) / hv.shape[0]


@dataclass(frozen=True)
class OuterFunction:
    """Outer function built from its boundary log-modulus.

    The conjugate of the log-modulus is computed on an oversampled grid
    and restricted, which confines Gibbs pollution from jump points to a
    few cells.  Boundary values are exp(log_modulus + i * conjugate); the
    value at the origin is exp(mean(log_modulus)) > 0.
    """

    grid: Grid
    log_modulus: GridFunction
    conj_log: np.ndarray
    fine_log_modulus: np.ndarray

    @property
    def boundary(self) -> GridFunction:
        vals = np.exp(self.log_modulus.real_values() + 1j * self.conj_log)
        return GridFunction(self.grid, vals)

    @property
    def analytic_log(self) -> FourierSeries:
        logw = self.log_modulus.real_values() + 1j * self.conj_log
        return fft_analyze(GridFunction(self.grid, logw))

    def __call__(self, z) -> np.ndarray:
        """Disk values via the Riesz-Herglotz transform of the log-modulus."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        _check_inside(z)
        n_fine = self.fine_log_modulus.shape[0]
        theta_fine = 2.0 * np.pi * np.arange(n_fine) / n_fine
        return np.exp(_herglotz_quadrature(self.fine_log_modulus, theta_fine, z))

    def at_origin(self) -> float:
        return float(np.exp(np.mean(self.log_modulus.real_values())))


def outer_from_log_modulus(
    grid: Grid,
    log_modulus: np.ndarray,
    fine_log_modulus: np.ndarray | None = None,
    oversample: int = OUTER_OVERSAMPLE,
) -> OuterFunction:
    """Outer function from real log-modulus samples.

    fine_log_modulus may carry sharp (non-bandlimited) values, e.g. from
    an arc indicator; when omitted, the coarse samples are interpolated
    trigonometrically.  The fine grid must contain the coarse nodes.
    """
    log_modulus = np.asarray(log_modulus, dtype=float)
    if fine_log_modulus is None:
        fine_log_modulus = trig_interpolate(log_modulus, oversample * grid.n)
    fine_log_modulus = np.asarray(fine_log_modulus, dtype=float)
    step = fine_log_modulus.shape[0] // grid.n
    if fine_log_modulus.shape[0] != step * grid.n:
        raise ValueError("fine grid must be an integer refinement of the grid")
    conj_fine = _conjugate_samples(fine_log_modulus)
    return OuterFunction(
        grid=grid,
        log_modulus=GridFunction(grid, log_modulus.astype(complex)),
        conj_log=conj_fine[::step],
        fine_log_modulus=fine_log_modulus,
    )


def outer_from_modulus(rho: GridFunction, floor: float = EPS_MOD) -> OuterFunction:
    """Outer function with prescribed boundary modulus rho > 0.

    rho is clamped below at `floor` before taking logs; a zero or negative
    modulus after flooring is an error.
    """
    vals = np.maximum(rho.real_values(tol=1e-9), floor)
    if np.any(vals <= 0.0):
        raise ValueError("modulus must be positive after flooring")
    return outer_from_log_modulus(rho.grid, np.log(vals))


def outer_from_arc_modulus(
    grid: Grid,
    E: ArcSet,
    log_on_E: np.ndarray | float,
    oversample: int = OUTER_OVERSAMPLE,
) -> OuterFunction:
    """Outer function with log-modulus supported on the arc-set E.

    Piecewise data are laid out sharply on the oversampled grid, with
    grid values on E interpolated linearly in angle inside each arc.
    The snapped endpoints take the indicator value 1/2 (Dirichlet
    convention), so the mean of the log-modulus matches the half-weight
    arc quadrature exactly.
    """
    n = grid.n
    w = E.boundary_weights(grid)
    if np.isscalar(log_on_E):
        coarse = w * float(log_on_E)
    else:
        coarse = w * np.asarray(log_on_E, dtype=float)
    n_fine = oversample * n
    fine = np.zeros(n_fine)
    theta_fine = 2.0 * np.pi * np.arange(n_fine) / n_fine
    snap = E.snapped(grid)
    for a, b in snap.arcs:
        t = theta_fine.copy()
        t[t < a - 1e-15] += 2.0 * np.pi
        in_arc = (t >= a - 1e-15) & (t <= b + 1e-15)
        if np.isscalar(log_on_E):
            fine[in_arc] = float(log_on_E)
        else:
            # coarse nodes of this arc, unwrapped to [a, b]
            idx = np.where(E.mask(grid))[0]
            tc = grid.theta[idx]
            tc = np.where(tc < a - 1e-15, tc + 2.0 * np.pi, tc)
            sel = (tc >= a - 1e-15) & (tc <= b + 1e-15)
            order = np.argsort(tc[sel])
            vals = np.asarray(log_on_E, dtype=float)[idx][sel][order]
            fine[in_arc] = np.interp(t[in_arc], tc[sel][order], vals)
    # shared nodes follow the coarse trace, endpoints at half value
    fine[::oversample] = coarse
    return outer_from_log_modulus(grid, coarse, fine)


@dataclass(frozen=True)
class BlaschkeProduct:
    """Finite Blaschke product with zeros in the open disk."""

    zeros: tuple
    unimodular_constant: complex = 1.0 + 0.0j
    order_at_origin: int = 0

    def __post_init__(self):
        zs = tuple(complex(z) for z in self.zeros)
        if any(abs(z) >= 1.0 for z in zs):
            raise ValueError("Blaschke zeros must lie strictly inside the disk")
        if any(z == 0 for z in zs):
            raise ValueError("zeros at the origin go into order_at_origin")
        if abs(abs(complex(self.unimodular_constant)) - 1.0) > 1e-12:
            raise ValueError("constant must have modulus 1")
        if self.order_at_origin < 0:
            raise ValueError("order at origin must be non-negative")
        object.__setattr__(self, "zeros", zs)


def blaschke_eval(b: BlaschkeProduct, z) -> np.ndarray:
    """Evaluate the Blaschke product; errors at a pole 1/conj(zero)."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.full(z.shape, complex(b.unimodular_constant))
    out *= z ** b.order_at_origin
    for zl in b.zeros:
        denom = 1.0 - np.conj(zl) * z
        if np.any(np.abs(denom) < 1e-14):
            raise ZeroDivisionError("evaluation at a pole of the Blaschke product")
        out *= (-np.conj(zl) / abs(zl)) * (z - zl) / denom
    return out


def eval_disk(g: FourierSeries, z) -> np.ndarray:
    """Power-series evaluation of an analytic series inside the disk."""
    if not g.is_analytic(tol=1e-10):
        raise ValueError("series has non-negligible negative-frequency content")
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    _check_inside(z)
    coeffs = g.coeffs[: g.n // 2]
    # Horner from the top degree down
    out = np.zeros(z.shape, dtype=complex)
    for c in coeffs[::-1]:
        out = out * z + c
    return out


def cauchy_eval(u: GridFunction, z, weights: np.ndarray | None = None) -> np.ndarray:
    """Discretized Cauchy integral (1/2i pi) int u(xi)/(xi - z) dxi.

    `weights` restricts the contour to an arc-set (quadrature weights);
    default is the full circle.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    _check_inside(z, margin=1e-2 * BOUNDARY_MARGIN)
    xi = u.grid.points
    w = np.ones(u.grid.n) if weights is None else weights
    integrand = w * u.values * xi
    return (integrand[None, :] / (xi[None, :] - z[:, None])).sum(axis=1) / u.grid.n
