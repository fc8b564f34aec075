"""Finite unions of closed circle arcs.

An ArcSet represents the data region I; its complement J is again an
ArcSet sharing the same snapped endpoints.  Arc endpoints are snapped to
the nearest grid point once a grid is chosen, which makes grid-point
membership unambiguous: the snapped endpoints belong to the (closed)
arc-set, and quadrature gives them half weight.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi


def _normalize_angle(a: float) -> float:
    a = float(a) % TWO_PI
    return a + TWO_PI if a < 0 else a


@dataclass(frozen=True)
class ArcSet:
    """Pairwise-disjoint closed arcs (a, b) with 0 <= a < b < a + 2pi."""

    arcs: tuple

    def __init__(self, arcs):
        cleaned = []
        for a, b in arcs:
            a = _normalize_angle(a)
            length = float(b) - float(a) if float(b) > float(a) else None
            if length is None:
                # interpret b < a as wrapping past 2pi
                length = (_normalize_angle(b) - a) % TWO_PI
            if not (0.0 < length < TWO_PI + 1e-12):
                raise ValueError(f"arc ({a}, {b}) must have length in (0, 2pi)")
            cleaned.append((a, a + min(length, TWO_PI)))
        cleaned.sort()
        for (a1, b1), (a2, b2) in zip(cleaned, cleaned[1:]):
            if a2 < b1:
                raise ValueError("arcs overlap")
        if len(cleaned) > 1 and cleaned[0][0] + TWO_PI < cleaned[-1][1]:
            raise ValueError("arcs overlap across the wrap point")
        object.__setattr__(self, "arcs", tuple(cleaned))

    @classmethod
    def full_circle(cls) -> "ArcSet":
        return cls([(0.0, TWO_PI)])

    @classmethod
    def upper_half(cls) -> "ArcSet":
        return cls([(0.0, np.pi)])

    def measure(self) -> float:
        """Total arc length in radians."""
        return float(sum(b - a for a, b in self.arcs))

    def is_full_circle(self) -> bool:
        return abs(self.measure() - TWO_PI) < 1e-12

    # -- grid snapping ----------------------------------------------------

    def snapped(self, grid) -> "ArcSet":
        """Snap endpoints to the nearest grid point; merge touching arcs."""
        n = grid.n
        h = TWO_PI / n
        if self.is_full_circle():
            return ArcSet.full_circle()
        idx = []
        for a, b in self.arcs:
            ia = int(round(a / h)) % n
            ib = int(round(b / h)) % n
            if ia == ib:
                raise ValueError("arc snapped to zero length; refine the grid")
            idx.append((ia, ib))
        idx.sort()
        merged = []
        for ia, ib in idx:
            if merged and merged[-1][1] == ia:
                merged[-1] = (merged[-1][0], ib)
            else:
                merged.append((ia, ib))
        if len(merged) > 1 and merged[0][0] == merged[-1][1]:
            a0, _ = merged[0]
            merged[0] = (merged[-1][0], merged[0][1])
            merged.pop()
        arcs = []
        for ia, ib in merged:
            a = ia * h
            b = ib * h
            if b <= a:
                b += TWO_PI
            arcs.append((a, b))
        return ArcSet(arcs)

    def endpoint_indices(self, grid) -> np.ndarray:
        """Grid indices of the snapped arc endpoints (empty for the full circle)."""
        snap = self.snapped(grid)
        if snap.is_full_circle():
            return np.array([], dtype=int)
        n = grid.n
        h = TWO_PI / n
        out = []
        for a, b in snap.arcs:
            out.append(int(round(a / h)) % n)
            out.append(int(round(b / h)) % n)
        return np.unique(np.array(out, dtype=int))

    def boundary_weights(self, grid) -> np.ndarray:
        """Quadrature weights: 1 inside, 1/2 at endpoints, 0 outside.

        The complement's weights are exactly 1 minus these, so
        measure(I) + measure(J) = 2pi holds to the last bit.
        """
        snap = self.snapped(grid)
        n = grid.n
        w = np.zeros(n)
        if snap.is_full_circle():
            return np.ones(n)
        h = TWO_PI / n
        for a, b in snap.arcs:
            ia = int(round(a / h)) % n
            ib = int(round(b / h)) % n
            span = (ib - ia) % n
            inside = (np.arange(1, span) + ia) % n
            w[inside] = 1.0
            w[ia] += 0.5
            w[ib] += 0.5
        return w

    def mask(self, grid) -> np.ndarray:
        """Closed membership: snapped endpoints belong to the arc-set."""
        return self.boundary_weights(grid) > 0.25

    def strict_mask(self, grid) -> np.ndarray:
        """Open membership: snapped endpoints excluded."""
        return self.boundary_weights(grid) > 0.75

    def complement(self, grid) -> "ArcSet":
        """The complementary arc-set J = T \\ I with shared snapped endpoints."""
        snap = self.snapped(grid)
        if snap.is_full_circle():
            raise ValueError("full circle has empty complement")
        arcs = sorted(snap.arcs)
        out = []
        for (a1, b1), (a2, b2) in zip(arcs, arcs[1:]):
            out.append((b1 % TWO_PI, a2))
        last_b = arcs[-1][1] % TWO_PI
        first_a = arcs[0][0]
        out.append((last_b, first_a if first_a > last_b else first_a + TWO_PI))
        return ArcSet(out).snapped(grid)

    def snapped_measure(self, grid) -> float:
        """Arc length implied by the quadrature weights, in radians."""
        return float(np.sum(self.boundary_weights(grid))) * TWO_PI / grid.n

    def interior_mask(self, grid, cells: int = 10) -> np.ndarray:
        """Strict-membership points at least `cells` grid cells from any endpoint."""
        n = grid.n
        mask = self.strict_mask(grid)
        ends = self.endpoint_indices(grid)
        if ends.size == 0:
            return mask
        k = np.arange(n)
        dist = np.min(
            np.minimum((k[:, None] - ends[None, :]) % n, (ends[None, :] - k[:, None]) % n),
            axis=1,
        )
        return mask & (dist >= cells)

    def contains_angle(self, theta: float, grid=None) -> bool:
        arcs = self.snapped(grid).arcs if grid is not None else self.arcs
        t = _normalize_angle(theta)
        for a, b in arcs:
            if a - 1e-12 <= t <= b + 1e-12 or a - 1e-12 <= t + TWO_PI <= b + 1e-12:
                return True
        return False
