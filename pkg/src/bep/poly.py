"""Finite-dimensional polynomial solver with semi-infinite constraints.

Best degree-n polynomial approximation of data on the arc-set I in the
L2(I) sense, under |p| <= 1 at every point of the complement J.  The
semi-infinite constraint is handled by an exchange loop over a finite,
growing working set of constraint angles; each finitely-constrained
convex QP is solved through its dual (projected gradient ascent with a
Newton polish), and optimality is certified by extracting non-negative
multipliers supported on at most 2(n+1) active points.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

from .arcs import ArcSet
from .fourier import Grid, GridFunction
from .solver import BepProblem, BepSolution, solve_bep

TWO_PI = 2.0 * np.pi


@dataclass
class PolyProblem:
    """Degree-n constrained approximation problem on a circle grid."""

    I: ArcSet
    f: GridFunction
    degree: int
    constraint_points: np.ndarray | None = None

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError("degree must be non-negative")
        if self.constraint_points is None:
            self.constraint_points = seed_constraint_points(
                self.I, self.f.grid, self.degree
            )
        pts = np.asarray(self.constraint_points, dtype=float) % TWO_PI
        if pts.size < 4 * (self.degree + 1):
            raise ValueError("need at least 4(n+1) constraint points")
        self.constraint_points = np.sort(pts)


@dataclass
class PolySolution:
    coeffs: np.ndarray
    active_points: np.ndarray
    multipliers: np.ndarray
    primal: float
    stationarity_residual: float
    working_points: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    def __call__(self, theta) -> np.ndarray:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        z = np.exp(1j * theta)
        out = np.zeros(theta.shape, dtype=complex)
        for c in self.coeffs[::-1]:
            out = out * z + c
        return out


@dataclass
class Certificate:
    active_points: np.ndarray
    multipliers: np.ndarray
    stationarity_residual: float
    multiplier_sum: float
    valid: bool


# ---------------------------------------------------------------------------
# exact arc moments


def gram_matrix(I: ArcSet, n: int) -> np.ndarray:
    """G[j,k] = <e^{ik t}, e^{ij t}>_I by the closed-form arc integral."""
    d = np.arange(n + 1)[None, :] - np.arange(n + 1)[:, None]  # k - j
    g = np.zeros((n + 1, n + 1), dtype=complex)
    for a, b in I.arcs:
        with np.errstate(divide="ignore", invalid="ignore"):
            term = (np.exp(1j * d * b) - np.exp(1j * d * a)) / (2j * np.pi * d)
        term[d == 0] = (b - a) / TWO_PI
        g += term
    return 0.5 * (g + g.conj().T)


def moment_vector(I: ArcSet, f: GridFunction, n: int) -> np.ndarray:
    """m[j] = <f, e^{ij t}>_I by grid quadrature (half-weight endpoints)."""
    w = I.boundary_weights(f.grid)
    c = np.fft.fft(w * f.values) / f.grid.n
    return c[: n + 1].copy()


def seed_constraint_points(I: ArcSet, grid: Grid, degree: int) -> np.ndarray:
    """4(n+1) points spread over the arcs of J proportionally to length."""
    J = I.snapped(grid).complement(grid)
    total = J.measure()
    want = 4 * (degree + 1)
    pts = []
    arcs = sorted(J.arcs, key=lambda ab: ab[0])
    for i, (a, b) in enumerate(arcs):
        length = b - a
        k = max(2, int(round(want * length / total)))
        if i == len(arcs) - 1:
            k = max(2, want - len(pts))
        offs = (np.arange(k) + 0.5) / k
        pts.extend((a + offs * length) % TWO_PI)
    return np.sort(np.asarray(pts))


# ---------------------------------------------------------------------------
# dual solver for the finitely-constrained QP


def _constraint_rows(x: np.ndarray, n: int) -> np.ndarray:
    """Row i evaluates p at angle x_i: A[i, k] = e^{ik x_i}."""
    return np.exp(1j * np.outer(x, np.arange(n + 1)))


class _QPDual:
    """min c*Gc - 2Re(c*m) subject to |p(x_i)| <= 1, by dual ascent.

    For multipliers lam >= 0 the inner minimizer solves
    (G + A^H diag(lam) A) c = m; the dual gradient is |p(x_i)|^2 - 1.
    """

    def __init__(self, G: np.ndarray, m: np.ndarray, x: np.ndarray):
        self.G = G
        self.m = m
        self.A = _constraint_rows(x, G.shape[0] - 1)
        self.x = x

    def solve_primal(self, lam: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        B = self.G + (self.A.conj().T * lam) @ self.A
        c = np.linalg.solve(B, self.m)
        return c, self.A @ c

    def dual_value(self, lam: np.ndarray) -> float:
        c, _ = self.solve_primal(lam)
        return float(-np.real(np.vdot(self.m, c)) - np.sum(lam))

    def kkt_residual(self, lam, p) -> float:
        infeas = float(np.max(np.abs(p) - 1.0, initial=0.0))
        comp = float(np.max(lam * np.abs(np.abs(p) ** 2 - 1.0), initial=0.0))
        return max(infeas, comp)


def _solve_qp(G, m, x, tol: float = 1e-10, maxiter: int = 2000, lam0=None):
    """Return (coeffs, lam, kkt_residual) of the finitely-constrained QP.

    The dual is a smooth concave function of lam >= 0 (the primal Hessian
    stays positive definite), maximized by L-BFGS-B; a semismooth Newton
    pass on the active set then drives the KKT residual to tolerance.
    """
    from scipy.optimize import minimize

    qp = _QPDual(G, m, x)
    r = x.shape[0]
    c, p = qp.solve_primal(np.zeros(r))
    if np.max(np.abs(p), initial=0.0) <= 1.0 + tol:
        return c, np.zeros(r), qp.kkt_residual(np.zeros(r), p)
    # start strictly inside the dual cone: at lam = 0 a near-singular Gram
    # makes the dual value blow up and line searches fail
    lam = np.ones(r) if lam0 is None else np.maximum(lam0, 0.0)
    if not lam.any():
        lam = np.ones(r)

    def neg_dual(lam_v):
        c_v, p_v = qp.solve_primal(lam_v)
        val = -np.real(np.vdot(qp.m, c_v)) - np.sum(lam_v)
        grad = np.abs(p_v) ** 2 - 1.0
        return -val, -grad

    opts = {"maxiter": maxiter, "ftol": 1e-16, "gtol": 1e-12, "maxcor": 30}
    res = minimize(
        neg_dual, lam, jac=True, method="L-BFGS-B",
        bounds=[(0.0, None)] * r, options=opts,
    )
    lam = np.maximum(res.x, 0.0)
    c, p = qp.solve_primal(lam)
    if qp.kkt_residual(lam, p) > 1e-6:
        res = minimize(
            neg_dual, np.ones(r), jac=True, method="L-BFGS-B",
            bounds=[(0.0, None)] * r, options=opts,
        )
        lam2 = np.maximum(res.x, 0.0)
        c2, p2 = qp.solve_primal(lam2)
        if qp.kkt_residual(lam2, p2) < qp.kkt_residual(lam, p):
            lam, c, p = lam2, c2, p2
    best = (c, lam, qp.kkt_residual(lam, p))
    for _ in range(40):
        resid = qp.kkt_residual(lam, p)
        if resid <= tol:
            break
        grad = np.abs(p) ** 2 - 1.0
        active = (lam > 0) | (grad > 0)
        if not active.any():
            break
        lam_n = _newton_step(qp, lam, p, active)
        if lam_n is None:
            break
        c_n, p_n = qp.solve_primal(lam_n)
        res_n = qp.kkt_residual(lam_n, p_n)
        if res_n >= resid:
            break
        lam, c, p = lam_n, c_n, p_n
        if res_n < best[2]:
            best = (c, lam, res_n)
    if qp.kkt_residual(lam, p) <= best[2]:
        return c, lam, qp.kkt_residual(lam, p)
    return best


def _newton_step(qp: _QPDual, lam, p, active):
    """Semismooth Newton on |p(x_i)|^2 = 1 over the active set."""
    idx = np.where(active)[0]
    B = qp.G + (qp.A.conj().T * lam) @ qp.A
    try:
        Binv_rows = np.linalg.solve(B, (qp.A[idx].conj() * p[idx, None]).T)
    except np.linalg.LinAlgError:
        return None
    # J[i, j] = d|p_i|^2 / d lam_j = -2 Re(conj(p_i) a_i . u_j)
    inter = qp.A[idx] @ Binv_rows
    J = -2.0 * np.real(np.conj(p[idx])[:, None] * inter)
    rhs = -(np.abs(p[idx]) ** 2 - 1.0)
    try:
        delta = np.linalg.lstsq(J, rhs, rcond=None)[0]
    except np.linalg.LinAlgError:
        return None
    lam_n = lam.copy()
    lam_n[idx] = np.maximum(lam[idx] + delta, 0.0)
    if not np.all(np.isfinite(lam_n)):
        return None
    return lam_n


# ---------------------------------------------------------------------------
# exchange loop


def _eval_poly(coeffs: np.ndarray, theta: np.ndarray) -> np.ndarray:
    z = np.exp(1j * theta)
    out = np.zeros(theta.shape, dtype=complex)
    for c in coeffs[::-1]:
        out = out * z + c
    return out


def _polish_maximum(coeffs, lo, hi) -> float:
    """Locate the maximum of |p| inside the bracket [lo, hi] to high accuracy."""
    from scipy.optimize import minimize_scalar

    def neg(th):
        return -abs(_eval_poly(coeffs, np.atleast_1d(th))[0])

    res = minimize_scalar(
        neg, bounds=(lo, hi), method="bounded", options={"xatol": 1e-13}
    )
    return float(res.x)


def _j_grid(J: ArcSet, count: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Equispaced angles on J: returns (angles, arc_lo, arc_hi) per point."""
    total = J.measure()
    ang, lo, hi = [], [], []
    for a, b in sorted(J.arcs, key=lambda ab: ab[0]):
        k = max(8, int(round(count * (b - a) / total)))
        offs = (np.arange(k) + 0.5) / k
        ang.extend(a + offs * (b - a))
        lo.extend([a] * k)
        hi.extend([b] * k)
    return np.asarray(ang), np.asarray(lo), np.asarray(hi)


def solve_fbep(
    problem: PolyProblem,
    *,
    violation_tol: float = 1e-8,
    qp_tol: float = 1e-10,
    max_rounds: int = 60,
) -> PolySolution:
    """Exchange (cutting-plane) solution of the semi-infinite problem.

    New constraint points are the polished local maxima of |p| on a fine
    J grid that exceed 1 + 1e-10; the loop stops when the worst residual
    violation is at most `violation_tol`.
    """
    n = problem.degree
    grid = problem.f.grid
    I = problem.I.snapped(grid)
    J = I.complement(grid)
    G = gram_matrix(I, n)
    m = moment_vector(I, problem.f, n)
    fnorm2 = float(
        np.sum(I.boundary_weights(grid) * np.abs(problem.f.values) ** 2) / grid.n
    )

    x = np.asarray(problem.constraint_points, dtype=float).copy()
    n_seeds = x.shape[0]
    seed_flag = np.ones(n_seeds, dtype=bool)
    lam = None
    ang, lo, hi = _j_grid(J, 16 * (n + 1))
    merge_radius = TWO_PI / (16 * (n + 1))
    rounds = 0
    for rounds in range(1, max_rounds + 1):
        c, lam, kkt_res = _solve_qp(G, m, x, tol=qp_tol, lam0=lam)
        # prune inactive appended points to keep the dual non-degenerate
        p_work = np.abs(_eval_poly(c, x))
        keep = seed_flag | (lam > 1e-12) | (p_work > 1.0 - 1e-6)
        x, lam, seed_flag = x[keep], lam[keep], seed_flag[keep]
        vals = np.abs(_eval_poly(c, ang))
        # local maxima on the fine grid, polished within their grid bracket
        ge_prev = np.r_[True, vals[1:] >= vals[:-1]]
        ge_next = np.r_[vals[:-1] >= vals[1:], True]
        cand = np.where(ge_prev & ge_next & (vals > 1.0 + 1e-10))[0]
        worst = 0.0
        changed = False
        for i in cand:
            blo = ang[i - 1] if i > 0 and lo[i - 1] == lo[i] else lo[i]
            bhi = ang[i + 1] if i + 1 < ang.size and hi[i + 1] == hi[i] else hi[i]
            th = _polish_maximum(c, blo, bhi)
            v = float(np.abs(_eval_poly(c, np.atleast_1d(th)))[0])
            worst = max(worst, v - 1.0)
            if v <= 1.0 + 1e-10:
                continue
            dist = _circ_diff(x, th)
            nearest = int(np.argmin(dist))
            if dist[nearest] <= merge_radius and not seed_flag[nearest]:
                # exchange: move the stale estimate of this touch point
                if abs(x[nearest] - th) > 1e-15:
                    x[nearest] = th
                    changed = True
            else:
                x = np.append(x, th)
                lam = np.append(lam, 0.0)
                seed_flag = np.append(seed_flag, False)
                changed = True
        if worst <= violation_tol or not changed:
            break
        order = np.argsort(x)
        x, lam, seed_flag = x[order], lam[order], seed_flag[order]

    primal = float(
        np.real(np.vdot(c, G @ c)) - 2.0 * np.real(np.vdot(m, c)) + fnorm2
    )
    cert = kkt_certificate_from_parts(G, m, c, x, n, fnorm2)
    validation = _validation_sup(c, J, 8 * ang.shape[0])
    return PolySolution(
        coeffs=c,
        active_points=cert.active_points,
        multipliers=cert.multipliers,
        primal=primal,
        stationarity_residual=cert.stationarity_residual,
        working_points=x,
        diagnostics={
            "rounds": rounds,
            "qp_kkt_residual": kkt_res,
            "validation_sup": validation,
            "fnorm2": fnorm2,
            "certificate_valid": cert.valid,
            "multiplier_sum": cert.multiplier_sum,
        },
    )


def _circ_diff(a, b):
    d = (np.asarray(a) - b) % TWO_PI
    return np.minimum(d, TWO_PI - d)


def _validation_sup(coeffs, J: ArcSet, count: int) -> float:
    ang, _, _ = _j_grid(J, count)
    return float(np.max(np.abs(_eval_poly(coeffs, ang))))


# ---------------------------------------------------------------------------
# KKT certificate


def kkt_certificate_from_parts(G, m, c, x, n, fnorm2) -> Certificate:
    """Non-negative multipliers on near-active points by NNLS.

    Stationarity: for every monomial e^{ij t}, j <= n,
        (G c - m)[j] + sum_i lam_i p(x_i) e^{-i j x_i} = 0.
    """
    p_all = _eval_poly(c, x)
    near = np.abs(p_all) >= 1.0 - 1e-6
    if not near.any():
        resid = float(np.linalg.norm(G @ c - m))
        return Certificate(
            active_points=np.array([]),
            multipliers=np.array([]),
            stationarity_residual=resid,
            multiplier_sum=0.0,
            valid=resid <= 1e-6 * max(1.0, float(np.linalg.norm(m))),
        )
    xa = x[near]
    pa = p_all[near]
    A = _constraint_rows(xa, n)  # rows i: e^{ij x_i}
    cols = (pa[:, None] * np.conj(A)).T  # column i over j: p(x_i) e^{-ij x_i}
    target = (m - G @ c).astype(complex)
    sys = np.vstack([cols.real, cols.imag])
    rhs = np.concatenate([target.real, target.imag])
    mult, resid = nnls(sys, rhs)
    xa, mult = _cluster_points(xa, mult, n)
    keep = mult > 1e-12
    xa, mult = xa[keep], mult[keep]
    total = float(np.sum(mult))
    valid = (
        resid <= 1e-6 * max(1.0, float(np.linalg.norm(rhs)))
        and xa.shape[0] <= 2 * (n + 1)
        and total <= 2.0 * fnorm2 + 1e-6
    )
    return Certificate(
        active_points=xa,
        multipliers=mult,
        stationarity_residual=float(resid),
        multiplier_sum=total,
        valid=bool(valid),
    )


def kkt_certificate(sol: PolySolution, problem: PolyProblem) -> Certificate:
    grid = problem.f.grid
    I = problem.I.snapped(grid)
    n = problem.degree
    G = gram_matrix(I, n)
    m = moment_vector(I, problem.f, n)
    fnorm2 = float(
        np.sum(I.boundary_weights(grid) * np.abs(problem.f.values) ** 2) / grid.n
    )
    return kkt_certificate_from_parts(
        G, m, sol.coeffs, sol.working_points, n, fnorm2
    )


def _cluster_points(x: np.ndarray, mult: np.ndarray, n: int):
    """Merge active points within 2pi/(64 max(n,1)), summing multipliers."""
    if x.size == 0:
        return x, mult
    tol = TWO_PI / (64.0 * max(n, 1))
    order = np.argsort(x)
    x, mult = x[order], mult[order]
    out_x, out_m = [x[0]], [mult[0]]
    for xi, mi in zip(x[1:], mult[1:]):
        if xi - out_x[-1] <= tol:
            w = out_m[-1] + mi
            if w > 0:
                out_x[-1] = (out_x[-1] * out_m[-1] + xi * mi) / w
            out_m[-1] = w
        else:
            out_x.append(xi)
            out_m.append(mi)
    # wrap-around pair
    if len(out_x) > 1 and (TWO_PI - out_x[-1] + out_x[0]) <= tol:
        w = out_m[0] + out_m[-1]
        if w > 0:
            out_x[0] = ((out_x[0] + TWO_PI) * out_m[-1] + out_x[0] * out_m[0]) / w % TWO_PI
        out_m[0] = w
        out_x.pop()
        out_m.pop()
    return np.asarray(out_x), np.asarray(out_m)


# ---------------------------------------------------------------------------
# convergence toward the continuous solution


@dataclass
class ConvergenceRow:
    degree: int
    err_circle: float
    err_j: float
    primal: float


def convergence_study(
    problem: BepProblem,
    degrees,
    bep_solution: BepSolution | None = None,
) -> list[ConvergenceRow]:
    """Distance of the degree-n polynomial solutions to the continuous one.

    Only the normalized bound M = 1 is supported here; normalize first.
    """
    if bep_solution is None:
        bep_solution = solve_bep(problem)
    grid = problem.grid
    I = problem.I.snapped(grid)
    J = I.complement(grid)
    wj = J.boundary_weights(grid)
    g0 = bep_solution.g0.coeffs
    g0_vals = bep_solution.g0_boundary.values
    rows = []
    for n in sorted(degrees):
        sol = solve_fbep(PolyProblem(I, problem.f, int(n)))
        diff = g0.copy()
        diff[: n + 1] -= sol.coeffs
        err_circle = float(np.linalg.norm(diff))
        kn_vals = _eval_poly(sol.coeffs, grid.theta)
        err_j = float(
            np.sqrt(np.sum(wj * np.abs(kn_vals - g0_vals) ** 2) / grid.n)
        )
        rows.append(
            ConvergenceRow(
                degree=int(n),
                err_circle=err_circle,
                err_j=err_j,
                primal=sol.primal,
            )
        )
    return rows
