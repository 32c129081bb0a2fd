"""Rotation numbers of points, rotation sets and mean rotation numbers.

The core routine ``scan_orbits`` follows many orbits at once as numpy
arrays and keeps only running statistics per orbit, so sampling the
rotation set of a map costs a few vector operations per iterate.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cover import AnnulusModel, check_domain, deck_shift, power_with_deck
from .errors import (
    InsufficientConvergence,
    LineNotFree,
    NotInU,
    PreconditionError,
    UnboundedDisplacement,
)

RECUR_TOL = 1e-2
CONV_TOL = 1e-3
DISPLACEMENT_BOUND = 1e3


def burn_in(recur_tol=RECUR_TOL, conv_tol=CONV_TOL):
    """First return time that may count: below it a recurrence gap of
    ``recur_tol`` could move the quotient by more than ``conv_tol``."""
    return max(1, math.ceil(recur_tol / conv_tol))


@dataclass
class PointRotationEstimate:
    value: float
    return_times: tuple
    recurrence_gap: float
    converged: bool
    birkhoff: float = float("nan")
    quotients: tuple = ()

    @property
    def no_return(self):
        return not self.return_times


@dataclass
class RotationEstimate:
    """Sampled rotation set [lo, hi] and the Monte Carlo mean rotation number.

    Per-sample data are kept as arrays; ``sample(i)`` rebuilds the full
    ``PointRotationEstimate`` for one initial point.
    """

    interval: tuple
    mean: float
    stderr: float
    x0: np.ndarray
    u0: np.ndarray
    values: np.ndarray
    converged: np.ndarray
    birkhoff: np.ndarray
    seed: int
    max_iter: int
    _map: object = field(default=None, repr=False)
    _opts: dict = field(default_factory=dict, repr=False)

    @property
    def n_samples(self):
        return len(self.values)

    @property
    def n_converged(self):
        return int(self.converged.sum())

    def sample(self, i):
        return point_rotation(self._map, (self.x0[i], self.u0[i]), self.max_iter, **self._opts)

    @property
    def samples(self):
        return [self.sample(i) for i in range(self.n_samples)]

    def summary(self):
        return {
            "interval": [float(self.interval[0]), float(self.interval[1])],
            "mean": float(self.mean),
            "stderr": float(self.stderr),
            "seed": self.seed,
            "n_samples": self.n_samples,
            "n_converged": self.n_converged,
            "max_iter": self.max_iter,
        }

    def rows(self):
        for i in range(self.n_samples):
            yield (i, float(self.x0[i]), float(self.u0[i]), float(self.values[i]), bool(self.converged[i]))


def scan_orbits(m, x0, u0, max_iter, recur_tol=RECUR_TOL, conv_tol=CONV_TOL,
                record=False, backward=False):
    """Iterate every orbit ``max_iter`` times and collect return statistics.

    A return at time n is a time n >= burn_in with the projected orbit
    within ``recur_tol`` of its start.  Returned dict of arrays (shape of
    ``x0``): value, converged, birkhoff, gap, n_returns; with
    ``record=True`` (scalar use) also the return times and quotients.
    """
    x0 = np.asarray(x0, dtype=float)
    u0 = np.asarray(u0, dtype=float)
    x, u = np.array(x0, copy=True), np.array(u0, copy=True)
    step = m.inverse if backward else m.forward
    sign = -1.0 if backward else 1.0
    burn = burn_in(recur_tol, conv_tol)
    tail_start = max(burn, max_iter // 2)
    shape = x0.shape
    qsum = np.zeros(shape)
    count = np.zeros(shape, dtype=np.int64)
    qmin = np.full(shape, np.inf)
    qmax = np.full(shape, -np.inf)
    tail = np.zeros(shape, dtype=np.int64)
    gap = np.full(shape, np.inf)
    times, quots = [], []
    for n in range(1, max_iter + 1):
        x, u = step(x, u)
        if n < burn:
            continue
        d = x - x0
        dist = np.hypot(d - np.round(d), u - u0)
        hit = dist < recur_tol
        if not hit.any():
            continue
        q = d / (sign * n)
        qsum += np.where(hit, q, 0.0)
        count += hit
        gap = np.where(hit, np.minimum(gap, dist), gap)
        if n >= tail_start:
            qmin = np.where(hit, np.minimum(qmin, q), qmin)
            qmax = np.where(hit, np.maximum(qmax, q), qmax)
            tail += hit
        if record:
            times.append(n)
            quots.append(float(q))
    check_domain(u)
    birk = (x - x0) / (sign * max_iter)
    returned = count > 0
    value = np.where(returned, qsum / np.maximum(count, 1), birk)
    converged = (tail > 0) & (qmax - qmin < conv_tol)
    out = {
        "value": value,
        "converged": converged,
        "birkhoff": birk,
        "gap": gap,
        "n_returns": count,
    }
    if record:
        out["times"] = tuple(times)
        out["quotients"] = tuple(quots)
    return out


def point_rotation(m, z, max_iter=10_000, recur_tol=RECUR_TOL, conv_tol=CONV_TOL, backward=False):
    """Finite-time rotation number of one point from its forward returns.

    With ``backward=True`` the backward orbit is scanned too and the point
    only counts as converged if both directions agree within ``conv_tol``.
    """
    if max_iter < 1:
        raise PreconditionError("max_iter must be >= 1")
    x0, u0 = float(z[0]), float(z[1])
    check_domain(u0, "input")
    r = scan_orbits(m, x0, u0, max_iter, recur_tol, conv_tol, record=True)
    converged = bool(r["converged"])
    if backward:
        b = scan_orbits(m, x0, u0, max_iter, recur_tol, conv_tol, backward=True)
        converged = converged and bool(b["converged"]) and abs(float(b["value"]) - float(r["value"])) < conv_tol
    return PointRotationEstimate(
        value=float(r["value"]),
        return_times=r["times"],
        recurrence_gap=float(r["gap"]),
        converged=converged,
        birkhoff=float(r["birkhoff"]),
        quotients=r["quotients"],
    )


def _chunks(n, workers):
    workers = max(1, min(workers, n))
    edges = np.linspace(0, n, workers + 1).astype(int)
    return [(edges[i], edges[i + 1]) for i in range(workers) if edges[i + 1] > edges[i]]


def sample_points(n_samples, seed):
    """Deterministic uniform initial points; independent of worker count."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    return AnnulusModel.sample(n_samples, rng)


def rotation_set(m, n_samples=1000, max_iter=1000, seed=0, recur_tol=RECUR_TOL,
                 conv_tol=CONV_TOL, backward=False, workers=1, min_converged=0.5,
                 points=None):
    """Estimate Rot(h) by [min, max] of converged samples and rho(Leb, h) by
    the mean plain Birkhoff quotient.

    Raises InsufficientConvergence when fewer than ``min_converged`` of the
    samples converged.
    """
    if n_samples < 1:
        raise PreconditionError("n_samples must be >= 1")
    if max_iter < 1:
        raise PreconditionError("max_iter must be >= 1")
    x0, u0 = points if points is not None else sample_points(n_samples, seed)

    def work(span):
        a, b = span
        r = scan_orbits(m, x0[a:b], u0[a:b], max_iter, recur_tol, conv_tol)
        if backward:
            rb = scan_orbits(m, x0[a:b], u0[a:b], max_iter, recur_tol, conv_tol, backward=True)
            r["converged"] = r["converged"] & rb["converged"] & (np.abs(rb["value"] - r["value"]) < conv_tol)
        return r

    spans = _chunks(len(x0), workers)
    if len(spans) > 1:
        with ThreadPoolExecutor(len(spans)) as pool:
            parts = list(pool.map(work, spans))
    else:
        parts = [work(s) for s in spans]
    values = np.concatenate([p["value"] for p in parts])
    conv = np.concatenate([p["converged"] for p in parts])
    birk = np.concatenate([p["birkhoff"] for p in parts])

    n_conv = int(conv.sum())
    if n_conv < min_converged * len(values):
        raise InsufficientConvergence(
            f"only {n_conv}/{len(values)} samples converged; increase max_iter",
            n_converged=n_conv, n_samples=len(values), max_iter=max_iter,
        )
    # without converged samples the Birkhoff averages are the only estimate
    cv = values[conv] if n_conv else birk
    mean = float(birk.mean())
    stderr = float(birk.std(ddof=1) / math.sqrt(len(birk))) if len(birk) > 1 else 0.0
    lo, hi = float(cv.min()), float(cv.max())
    # the mean is an average over all samples; keep the reported interval honest
    lo, hi = min(lo, mean), max(hi, mean)
    return RotationEstimate(
        interval=(lo, hi), mean=mean, stderr=stderr, x0=x0, u0=u0, values=values,
        converged=conv, birkhoff=birk, seed=seed, max_iter=max_iter, _map=m,
        _opts={"recur_tol": recur_tol, "conv_tol": conv_tol, "backward": backward},
    )


def check_invariance(m, k=1, q=2, n_samples=1000, max_iter=1000, seed=0, **kw):
    """Compare Rot(T^k h) with Rot(h) + k and Rot(h^q) with q Rot(h)."""
    if q < 1:
        raise PreconditionError("q must be >= 1")
    base = rotation_set(m, n_samples, max_iter, seed, **kw)
    shifted = rotation_set(deck_shift(m, k), n_samples, max_iter, seed, **kw)
    power = rotation_set(power_with_deck(m, q, 0), n_samples, max_iter, seed, **kw)
    blo, bhi = base.interval
    slo, shi = shifted.interval
    plo, phi = power.interval
    return {
        "k": k,
        "q": q,
        "base": base.summary(),
        "shifted": shifted.summary(),
        "power": power.summary(),
        "shift_error": max(abs(slo - (blo + k)), abs(shi - (bhi + k))),
        "power_error": max(abs(plo - q * blo), abs(phi - q * bhi)),
        "mean_shift_error": abs(shifted.mean - (base.mean + k)),
        "mean_power_error": abs(power.mean - q * base.mean),
        "power_stderr": power.stderr,
        "base_stderr": base.stderr,
    }


def displacement(m, x, u):
    """Horizontal displacement r(z) = p1(h(z)) - p1(z)."""
    x2, _ = m.forward(x, u)
    return x2 - np.asarray(x)


def check_morphism(f, g, n_samples=100_000, max_iter=100, seed=0,
                   bound=DISPLACEMENT_BOUND, abs_tol=1e-9, **kw):
    """rho(Leb, f o g) - rho(Leb, f) - rho(Leb, g) with a Monte Carlo error bar.

    All three means use the same initial points.  ``combined_stderr`` adds
    the three standard errors in quadrature; ``within_3sigma`` allows an
    extra ``abs_tol`` for rounding when the error bar collapses to zero.
    """
    from .cover import Composition

    fg = Composition((f, g))
    x, u = sample_points(min(n_samples, 10_000), seed + 7919)
    for name, h in (("f", f), ("g", g), ("f o g", fg)):
        r = np.abs(displacement(h, x, u))
        if not np.all(np.isfinite(r)) or r.max() > bound:
            raise UnboundedDisplacement(
                f"sampled |r| of {name} exceeds {bound}", bound=bound, observed=float(np.nanmax(r))
            )
    # only the Birkhoff means matter here, so per-point convergence is not required
    kw.setdefault("min_converged", 0.0)
    ef = rotation_set(f, n_samples, max_iter, seed, **kw)
    eg = rotation_set(g, n_samples, max_iter, seed, **kw)
    efg = rotation_set(fg, n_samples, max_iter, seed, **kw)
    defect = efg.mean - ef.mean - eg.mean
    combined = math.sqrt(ef.stderr**2 + eg.stderr**2 + efg.stderr**2)
    return {
        "rho_f": ef.mean,
        "rho_g": eg.mean,
        "rho_fg": efg.mean,
        "sum": ef.mean + eg.mean,
        "defect": defect,
        "stderr_f": ef.stderr,
        "stderr_g": eg.stderr,
        "stderr_fg": efg.stderr,
        "combined_stderr": combined,
        "ci95": [defect - 1.96 * combined, defect + 1.96 * combined],
        "within_3sigma": abs(defect) <= 3 * combined + abs_tol,
    }


# --- first return to the region between a free line and its images ----------

@dataclass
class ReturnMapStats:
    nu_values: list
    tau_values: list
    nu_star: float
    tau_star: float

    @property
    def ratio(self):
        return self.tau_star / self.nu_star if self.nu_star > 0 else float("nan")


def return_map_stats(m, line, z, horizon=100_000):
    """Return times nu and deck displacements tau of the first return to
    U = R(G) n L(h(G)) n L(T(G)), G the lift ``line``.

    Requires G < h(G) < T(G) or G < T(G) < h(G).  The ratio tau*/nu*
    estimates the rotation number of ``z``.
    """
    from .lines import LineRelation, map_line, order, translate

    image = map_line(m, line)
    tline = translate(line, 1)
    r1 = order(line, image)
    r2 = order(line, tline)
    r3 = order(image, tline)
    if r1.relation != LineRelation.LEFT_OF or r2.relation != LineRelation.LEFT_OF:
        raise LineNotFree("line, its image and its deck translate are not ordered G < h(G), T(G)",
                          min_gap=r1.min_gap)
    if r3.relation == LineRelation.INTERSECTING:
        raise LineNotFree("h(G) meets T(G)", min_gap=r3.min_gap)

    def upper(uu):
        return min(float(image.at(uu)), float(line.at(uu)) + 1.0)

    def level(xx, uu):
        """Integer tau with xx in T^tau(U), or None if outside every translate."""
        g = float(line.at(uu))
        tau = math.floor(xx - g)
        xs = xx - tau
        if g < xs < upper(uu):
            return tau
        return None

    x, u = float(z[0]), float(z[1])
    check_domain(u, "input")
    start = level(x, u)
    if start is None or start != 0:
        raise NotInU(f"z={z} is not in the lift U of the free region", z=list(map(float, z)))
    nus, taus = [], []
    last_n, last_tau = 0, 0
    for n in range(1, horizon + 1):
        x, u = m.forward(x, u)
        x, u = float(x), float(u)
        t = level(x, u)
        if t is not None:
            nus.append(n - last_n)
            taus.append(t - last_tau)
            last_n, last_tau = n, t
    if not nus:
        return ReturnMapStats([], [], 0.0, 0.0)
    return ReturnMapStats(nus, taus, float(np.mean(nus)), float(np.mean(taus)))
