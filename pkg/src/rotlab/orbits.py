"""Periodic orbits of lifted maps, pseudo-rotation tests and theta sweeps.

A (p, q)-orbit is a zero of F(z) = h^q(z) - z - (p, 0).  Roots are found
by damped Gauss-Newton (pseudo-inverse steps, so the degenerate circles of
orbits of twist maps are handled) started from lattice cells where both
components of F change sign.  A failed search is only ever reported
together with the lattice resolution; it never certifies absence.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .cover import PostRotated, iterate
from .errors import BracketInvalid, PreconditionError, RotlabError
from .farey import fmt_rational, rationals_between
from .rotation import CONV_TOL, RECUR_TOL, point_rotation, rotation_set, sample_points, scan_orbits

RESIDUAL_TOL = 1e-10
DEFAULT_GRID = 64
NEWTON_STEPS = 50
DAMPING = 0.5
FD_STEP = 1e-7
MAX_SEEDS = 32
U_GUARD = 1e-12


@dataclass
class OrbitRecord:
    p: int
    q: int
    point: tuple
    residual: float
    found: bool
    resolution: dict = field(default_factory=dict)
    theta: float | None = None

    @property
    def rotation_number(self):
        return Fraction(self.p, self.q)

    def to_dict(self):
        d = asdict(self)
        d["rotation_number"] = fmt_rational(self.rotation_number)
        return d


def _reduce(p, q):
    if q < 1:
        raise PreconditionError("q must be >= 1")
    g = math.gcd(p, q)
    return p // g, q // g


def _iterate_family(m, x, u, q):
    for _ in range(q):
        x, u = m.forward(x, u)
    return x, u


def _residual_vec(m, p, q, x, u):
    xq, uq = _iterate_family(m, x, u, q)
    return np.stack([xq - x - p, uq - u], axis=-1)


def _gauss_newton(F, Z, lower, upper, steps=NEWTON_STEPS):
    """Batched damped Gauss-Newton on F: (S, d) -> (S, 2).

    Steps use the pseudo-inverse of a central-difference Jacobian and are
    halved (up to 20 times) until the residual norm decreases.  Iterates are
    clipped to the box [lower, upper].
    """
    Z = np.clip(Z, lower, upper)
    R = F(Z)
    norm = np.linalg.norm(R, axis=1)
    S, d = Z.shape
    for _ in range(steps):
        active = norm > 0
        if not active.any():
            break
        J = np.empty((S, 2, d))
        for k in range(d):
            e = np.zeros(d)
            e[k] = FD_STEP
            zp = np.clip(Z + e, lower, upper)
            zm = np.clip(Z - e, lower, upper)
            J[:, :, k] = (F(zp) - F(zm)) / (zp[:, k] - zm[:, k])[:, None]
        delta = -np.einsum("sij,sj->si", np.linalg.pinv(J, rcond=1e-12), R)
        lam = np.ones(S)
        accepted = np.zeros(S, dtype=bool)
        Znew, Rnew, nnew = Z.copy(), R.copy(), norm.copy()
        for _ in range(20):
            trial = np.clip(Z + lam[:, None] * delta, lower, upper)
            Rt = F(trial)
            nt = np.linalg.norm(Rt, axis=1)
            ok = (nt < norm) & ~accepted
            Znew[ok], Rnew[ok], nnew[ok] = trial[ok], Rt[ok], nt[ok]
            accepted |= ok
            if accepted.all():
                break
            lam = np.where(accepted, lam, lam * DAMPING)
        moved = accepted & (np.abs(nnew - norm) > 0)
        Z, R, norm = Znew, Rnew, nnew
        if not moved.any():
            break
    return Z, norm


def _lattice(grid, u_range):
    lo, hi = u_range
    xs = np.linspace(0.0, 1.0, grid + 1)
    us = np.linspace(lo, hi, grid + 2)[1:-1]
    return np.meshgrid(xs, us, indexing="ij")


def _sign_change_cells(values):
    """Cells of the lattice where every component's corner range contains 0.

    ``values`` has shape (nx, nu, ..., 2); extra axes between are also
    reduced over (used for the theta ends of a cell)."""
    v = values
    stack = np.stack([v[:-1, :-1], v[1:, :-1], v[:-1, 1:], v[1:, 1:]], axis=0)
    axes = (0,) + tuple(range(3, v.ndim))
    lo = stack.min(axis=axes)
    hi = stack.max(axis=axes)
    inside = np.all((lo <= 0.0) & (hi >= 0.0), axis=-1)
    score = np.linalg.norm(stack, axis=-1).min(axis=axes)
    return inside, score


def find_orbit(m, p, q, grid=DEFAULT_GRID, residual_tol=RESIDUAL_TOL, u_range=(0.0, 1.0),
               max_seeds=MAX_SEEDS):
    """Search a (p, q)-periodic point: h^q(z) = z + (p, 0).

    (p, q) is reduced first.  Lattice nodes already within ``residual_tol``
    are returned directly.
    """
    if grid < 8:
        raise PreconditionError("grid must be >= 8")
    p, q = _reduce(int(p), int(q))
    resolution = {"grid": grid, "u_range": [float(u_range[0]), float(u_range[1])]}
    X, U = _lattice(grid, u_range)
    R = _residual_vec(m, p, q, X, U)
    norms = np.linalg.norm(R, axis=-1)
    i = np.unravel_index(np.argmin(norms), norms.shape)
    if norms[i] < residual_tol:
        return _record(m, p, q, X[i], U[i], residual_tol, resolution)

    inside, score = _sign_change_cells(R)
    cells = np.argwhere(inside)
    if len(cells) == 0:
        return OrbitRecord(p, q, (float("nan"), float("nan")), float(norms[i]), False, resolution)
    best = np.argsort(score[inside], kind="stable")[:max_seeds]
    cells = cells[best]
    xs = X[:, 0]
    us = U[0, :]
    Z0 = np.column_stack([
        0.5 * (xs[cells[:, 0]] + xs[cells[:, 0] + 1]),
        0.5 * (us[cells[:, 1]] + us[cells[:, 1] + 1]),
    ])
    lo_u = max(U_GUARD, u_range[0])
    hi_u = min(1.0 - U_GUARD, u_range[1])
    lower = np.array([-1.0, lo_u])
    upper = np.array([2.0, hi_u])

    def F(Z):
        return _residual_vec(m, p, q, Z[:, 0], Z[:, 1])

    Z, norm = _gauss_newton(F, Z0, lower, upper)
    k = int(np.argmin(norm))
    return _record(m, p, q, Z[k, 0], Z[k, 1], residual_tol, resolution)


def _record(m, p, q, x, u, residual_tol, resolution, theta=None):
    # independent re-evaluation through the checked iterate()
    xq, uq = iterate(m, (float(x), float(u)), q)
    res = math.hypot(float(xq) - float(x) - p, float(uq) - float(u))
    return OrbitRecord(p, q, (float(x), float(u)), res, res < residual_tol, resolution, theta)


def find_orbit_in_cell(h, theta_lo, theta_hi, p, q, grid=DEFAULT_GRID,
                       residual_tol=RESIDUAL_TOL, max_seeds=MAX_SEEDS):
    """Search theta in [theta_lo, theta_hi] and z with (h o R_theta)^q(z) = z + (p, 0)."""
    p, q = _reduce(int(p), int(q))
    X, U = _lattice(grid, (0.0, 1.0))
    Rlo = _residual_vec(PostRotated(h, theta_lo), p, q, X, U)
    Rhi = _residual_vec(PostRotated(h, theta_hi), p, q, X, U)
    both = np.stack([Rlo, Rhi], axis=2)  # (nx, nu, 2 ends, 2 components)
    inside, score = _sign_change_cells(both)
    resolution = {"grid": grid, "theta_cell": [float(theta_lo), float(theta_hi)]}
    cells = np.argwhere(inside)
    tmid = 0.5 * (theta_lo + theta_hi)
    if len(cells) == 0:
        return OrbitRecord(p, q, (float("nan"), float("nan")), float("inf"), False, resolution, tmid)
    best = np.argsort(score[inside], kind="stable")[:max_seeds]
    cells = cells[best]
    xs, us = X[:, 0], U[0, :]
    Z0 = np.column_stack([
        0.5 * (xs[cells[:, 0]] + xs[cells[:, 0] + 1]),
        0.5 * (us[cells[:, 1]] + us[cells[:, 1] + 1]),
        np.full(len(cells), tmid),
    ])
    lower = np.array([-1.0, U_GUARD, theta_lo])
    upper = np.array([2.0, 1.0 - U_GUARD, theta_hi])

    def F(Z):
        return _residual_vec(PostRotated(h, Z[:, 2]), p, q, Z[:, 0], Z[:, 1])

    Z, norm = _gauss_newton(F, Z0, lower, upper)
    k = int(np.argmin(norm))
    theta = float(Z[k, 2])
    return _record(PostRotated(h, theta), p, q, Z[k, 0], Z[k, 1], residual_tol, resolution, theta)


def candidate_rationals(lo, hi, max_q, inflate=0.0):
    return rationals_between(lo - inflate, hi + inflate, max_q)


def pseudo_rotation_test(m, max_q, grid=DEFAULT_GRID, n_samples=200, max_iter=1000, seed=0,
                         residual_tol=RESIDUAL_TOL, estimate=None, min_inflate=1e-9):
    """Look for periodic orbits at every p/q (q <= max_q) inside the
    estimated rotation set, inflated by its standard error."""
    if max_q < 1:
        raise PreconditionError("max_q must be >= 1")
    est = estimate or rotation_set(m, n_samples, max_iter, seed)
    lo, hi = est.interval
    infl = max(est.stderr, min_inflate)
    cands = candidate_rationals(lo, hi, max_q, infl)
    found = []
    tried = []
    for r in cands:
        rec = find_orbit(m, r.numerator, r.denominator, grid, residual_tol)
        tried.append(rec)
        if rec.found:
            found.append(rec)
    return {
        "interval": [float(lo), float(hi)],
        "stderr": float(est.stderr),
        "max_q": max_q,
        "candidates": [fmt_rational(r) for r in cands],
        "orbits": [rec.to_dict() for rec in found],
        "pseudo_rotation_consistent": not found,
        "verdict": (
            f"consistent with pseudo-rotation up to q <= {max_q}" if not found
            else "not a pseudo-rotation (periodic orbit found)"
        ),
        "records": tried,
    }


def orbit_height_range(m, z, n_iter=2000):
    x, u = float(z[0]), float(z[1])
    lo = hi = u
    for _ in range(n_iter):
        x, u = m.forward(x, u)
        lo, hi = min(lo, float(u)), max(hi, float(u))
    return lo, hi


def bracketed_search(m, z_minus, z_plus, p, q, grid=DEFAULT_GRID, max_grid=1024,
                     residual_tol=RESIDUAL_TOL, max_iter=5000):
    """Find a (p, q)-orbit between two orbits whose rotation numbers bracket p/q."""
    r_minus = point_rotation(m, z_minus, max_iter).value
    r_plus = point_rotation(m, z_plus, max_iter).value
    target = p / q
    if not (r_minus < target < r_plus):
        raise BracketInvalid(
            f"need rho(z-) < {p}/{q} < rho(z+), got {r_minus:.6g} and {r_plus:.6g}",
            rho_minus=r_minus, rho_plus=r_plus,
        )
    a = orbit_height_range(m, z_minus, min(max_iter, 2000))
    b = orbit_height_range(m, z_plus, min(max_iter, 2000))
    lo, hi = min(a[0], b[0]), max(a[1], b[1])
    pad = 0.1 * (hi - lo)
    u_range = (max(0.0, lo - pad), min(1.0, hi + pad))
    g = grid
    while True:
        rec = find_orbit(m, p, q, g, residual_tol, u_range)
        if rec.found or g * 2 > max_grid:
            return rec
        g *= 2


# --- theta sweep ------------------------------------------------------------

@dataclass
class SweepRow:
    theta: float
    has_orbit: bool
    p: int | None = None
    q: int | None = None
    residual: float | None = None
    theta_witness: float | None = None
    seconds: float = 0.0
    error: str | None = None


def default_cell(thetas):
    t = np.unique(np.asarray(thetas, dtype=float))
    if len(t) < 2:
        return 0.0
    return 0.5 * float(np.median(np.diff(t)))


def _row_estimates(h, thetas, n_samples, max_iter, seed, recur_tol, conv_tol):
    """Batched rotation intervals of h o R_theta for every theta (shared samples)."""
    x0, u0 = sample_points(n_samples, seed)
    th = np.asarray(thetas, dtype=float)[:, None]
    X0 = np.broadcast_to(x0, (len(th), n_samples)).copy()
    U0 = np.broadcast_to(u0, (len(th), n_samples)).copy()
    r = scan_orbits(PostRotated(h, th), X0, U0, max_iter, recur_tol, conv_tol)
    conv, vals, birk = r["converged"], r["value"], r["birkhoff"]
    lo = np.where(conv.any(axis=1), np.where(conv, vals, np.inf).min(axis=1), birk.min(axis=1))
    hi = np.where(conv.any(axis=1), np.where(conv, vals, -np.inf).max(axis=1), birk.max(axis=1))
    se = birk.std(axis=1, ddof=1) / math.sqrt(n_samples) if n_samples > 1 else np.zeros(len(th))
    return lo, hi, se


def perturbation_sweep(h, thetas, max_q, grid=DEFAULT_GRID, n_samples=64, max_iter=400,
                       seed=0, residual_tol=RESIDUAL_TOL, cell=None, recur_tol=RECUR_TOL,
                       conv_tol=CONV_TOL, timing=False, workers=1):
    """For each theta, look for a periodic orbit of h o R_theta with q <= max_q.

    Each theta stands for the cell [theta - cell, theta + cell] (default:
    half the grid spacing).  A theta is reported locked if h o R_theta has
    an orbit, or if some theta' in its cell does; ``theta_witness`` records
    where the orbit was found.  Per-theta failures are recorded, not raised.
    """
    if max_q < 1:
        raise PreconditionError("max_q must be >= 1")
    thetas = np.asarray(thetas, dtype=float)
    if thetas.ndim != 1 or not np.all(np.isfinite(thetas)):
        raise PreconditionError("thetas must be a finite 1-d list")
    cell = default_cell(thetas) if cell is None else float(cell)
    if workers > 1 and len(thetas) > 1:
        # rows only depend on their own theta, so chunking cannot change them
        chunks = [c for c in np.array_split(thetas, min(workers, len(thetas))) if len(c)]
        with ThreadPoolExecutor(len(chunks)) as pool:
            parts = pool.map(
                lambda c: perturbation_sweep(h, c, max_q, grid, n_samples, max_iter, seed,
                                             residual_tol, cell, recur_tol, conv_tol, timing),
                chunks,
            )
            return [row for part in parts for row in part]
    lo, hi, se = _row_estimates(h, thetas, n_samples, max_iter, seed, recur_tol, conv_tol)
    rows = []
    for i, th in enumerate(thetas):
        t0 = time.perf_counter()
        row = SweepRow(float(th), False)
        try:
            # sampled extremes sit inside the true rotation set, so widen by 3 stderr
            infl = max(3 * float(se[i]), 1e-9) + cell
            cands = sorted(candidate_rationals(lo[i], hi[i], max_q, infl),
                           key=lambda r: (r.denominator, r.numerator))
            hm = PostRotated(h, float(th))
            for r in cands:
                rec = find_orbit(hm, r.numerator, r.denominator, grid, residual_tol)
                if rec.found:
                    rec.theta = float(th)
                elif cell > 0:
                    rec = find_orbit_in_cell(h, th - cell, th + cell, r.numerator, r.denominator,
                                             grid, residual_tol)
                if rec.found:
                    row.has_orbit, row.p, row.q = True, rec.p, rec.q
                    row.residual, row.theta_witness = rec.residual, rec.theta
                    break
        except RotlabError as exc:
            row.error = f"{type(exc).__name__}: {exc}"
        if timing:
            row.seconds = time.perf_counter() - t0
        rows.append(row)
    return rows


def locked_intervals(rows):
    """Maximal runs of consecutive detected thetas (rows sorted by theta)."""
    rows = sorted(rows, key=lambda r: r.theta)
    runs, start, prev = [], None, None
    for r in rows:
        if r.has_orbit:
            if start is None:
                start = r
            prev = r
        elif start is not None:
            runs.append((start.theta, prev.theta))
            start = None
    if start is not None:
        runs.append((start.theta, prev.theta))
    return runs
