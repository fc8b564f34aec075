"""Carleman-type recovery of a Hardy function from its trace on I.

A quenching function phi (outer, |phi| = e^s on I, 1 off I, > 1 inside
the disk) damps the unknown part of the boundary; the weighted Cauchy
integrals over I alone then converge locally uniformly to the function.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .arcs import ArcSet
from .fourier import Grid, GridFunction
from .hardy import EvalDomainError, OuterFunction, outer_from_arc_modulus


@dataclass(frozen=True)
class QuenchingFunction:
    """Outer function with log-modulus s * chi_I, s > 0."""

    outer: OuterFunction
    strength: float
    I: ArcSet

    def __call__(self, z) -> np.ndarray:
        return self.outer(z)

    @property
    def boundary(self) -> GridFunction:
        return self.outer.boundary


def quenching_function(I: ArcSet, strength: float, grid: Grid) -> QuenchingFunction:
    """Quenching function of the arc-set I at the given strength s > 0.

    |phi(0)| = exp(s * l(I) / 2pi) with l the snapped arc measure.
    """
    if strength <= 0:
        raise ValueError("quenching strength must be positive")
    outer = outer_from_arc_modulus(grid, I.snapped(grid), float(strength))
    return QuenchingFunction(outer=outer, strength=float(strength), I=I.snapped(grid))


def recover_sequence(
    f_on_i: GridFunction,
    phi: QuenchingFunction,
    z: complex,
    n_max: int,
) -> np.ndarray:
    """Weighted Cauchy recovery sequence f_1(z), ..., f_nmax(z).

    f_n(z) = (1/2 i pi) int_I (phi(xi)/phi(z))^n f(xi)/(xi - z) dxi with
    dxi = i e^{it} dt, on the snapped grid with half-weight endpoints.
    For the trace of a bounded analytic function the sequence converges
    to its value at z at the geometric rate |phi(z)|^{-n} until contour
    quadrature error takes over.
    """
    z = complex(z)
    if abs(z) > 0.99:
        raise EvalDomainError("recovery requires |z| <= 0.99")
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    grid = f_on_i.grid
    w = phi.I.boundary_weights(grid)
    sel = w > 0
    xi = grid.points[sel]
    phi_z = complex(phi(np.array([z]))[0])
    ratio = phi.boundary.values[sel] / phi_z
    base = w[sel] * f_on_i.values[sel] * xi / (xi - z) / grid.n
    out = np.empty(n_max, dtype=complex)
    acc = ratio.copy()
    for k in range(n_max):
        out[k] = np.sum(acc * base)
        acc *= ratio
    return out
