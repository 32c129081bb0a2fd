"""Essential lines of the annulus, stored as graphs x = gamma(u).

Increasing x is "right"; a line oriented bottom-to-top has
R(G) = {x > gamma(u)}.  In this representation disjointness, left/right
order and the join of two lines are pointwise operations on a height grid.
"""
from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field

import numpy as np

from .cover import Composition, Inverse, LiftedMap, check_domain, power_with_deck
from .errors import (
    ChainOrderViolated,
    FoldDetected,
    NotDisjoint,
    NotFound,
    PreconditionError,
)
from .farey import CyclicOrder, mediant, rigid_cyclic_order

DEFAULT_GRID = 2048
END_MARGIN = 1e-3
MAX_REFINE_DEPTH = 6
GAP_TOL = 1e-9
# a cell whose image height shrinks below this fraction of its own height is refined
COMPRESSION_FLAG = 0.05
END_EXTENSION = 20


def height_grid(n=DEFAULT_GRID, end_margin=END_MARGIN):
    return np.linspace(end_margin, 1.0 - end_margin, n)


@dataclass(frozen=True, eq=False)
class EssentialLine:
    heights: np.ndarray
    xs: np.ndarray
    end_margin: float = END_MARGIN

    def __post_init__(self):
        h = np.asarray(self.heights, dtype=float)
        x = np.asarray(self.xs, dtype=float)
        if h.ndim != 1 or h.shape != x.shape or len(h) < 2:
            raise PreconditionError("a line needs matching 1-d heights and xs with at least 2 points")
        if np.any(np.diff(h) <= 0):
            raise PreconditionError("heights must be strictly increasing")
        if h[0] <= 0.0 or h[-1] >= 1.0:
            raise PreconditionError("heights must lie in (0, 1)")
        if h[0] > self.end_margin + 1e-15 or h[-1] < 1.0 - self.end_margin - 1e-15:
            raise PreconditionError("height grid must reach within end_margin of both ends")
        if not np.all(np.isfinite(x)):
            raise PreconditionError("xs must be finite")
        object.__setattr__(self, "heights", h)
        object.__setattr__(self, "xs", x)

    @classmethod
    def vertical(cls, x0=0.0, heights=None):
        h = height_grid() if heights is None else np.asarray(heights, dtype=float)
        return cls(h, np.full_like(h, float(x0)))

    @classmethod
    def from_function(cls, gamma, heights=None):
        h = height_grid() if heights is None else np.asarray(heights, dtype=float)
        return cls(h, np.asarray(gamma(h), dtype=float) * np.ones_like(h))

    def at(self, u):
        """gamma(u); constant beyond the grid ends."""
        return np.interp(u, self.heights, self.xs)

    def resample(self, heights):
        return EssentialLine(np.asarray(heights, dtype=float), self.at(heights), self.end_margin)

    def same_grid(self, other):
        return self.heights.shape == other.heights.shape and np.array_equal(self.heights, other.heights)

    def integral(self):
        """Integral of gamma over (0, 1): trapezoid on the grid plus linear
        extrapolation of the end segments to u = 0 and u = 1."""
        h, x = self.heights, self.xs
        inner = float(np.sum(0.5 * (x[1:] + x[:-1]) * np.diff(h)))
        s0 = (x[1] - x[0]) / (h[1] - h[0])
        s1 = (x[-1] - x[-2]) / (h[-1] - h[-2])
        x_at0 = x[0] - s0 * h[0]
        x_at1 = x[-1] + s1 * (1.0 - h[-1])
        return inner + 0.5 * (x_at0 + x[0]) * h[0] + 0.5 * (x[-1] + x_at1) * (1.0 - h[-1])

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["u", "x"])
        for u, x in zip(self.heights, self.xs):
            w.writerow([repr(float(u)), repr(float(x))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text, end_margin=END_MARGIN):
        rows = list(csv.reader(io.StringIO(text)))
        if rows and rows[0] and rows[0][0].strip() == "u":
            rows = rows[1:]
        data = np.array([[float(a), float(b)] for a, b in rows if a.strip()])
        return cls(data[:, 0], data[:, 1], end_margin)


def translate(line, k=1):
    """T^k applied to a line."""
    return EssentialLine(line.heights, line.xs + k, line.end_margin)


class LineRelation(str, enum.Enum):
    LEFT_OF = "left_of"
    RIGHT_OF = "right_of"
    INTERSECTING = "intersecting"


@dataclass(frozen=True)
class LineOrderReport:
    """``min_gap`` is the separation in the better direction: min(x_b - x_a)
    when a is left of b, min(x_a - x_b) when right of, and <= GAP_TOL when
    the lines meet."""

    relation: LineRelation
    min_gap: float
    signed_gap: float

    def to_dict(self):
        return {"relation": self.relation.value, "min_gap": self.min_gap}


def _merged(a, b):
    lo = max(a.heights[0], b.heights[0])
    hi = min(a.heights[-1], b.heights[-1])
    if lo >= hi:
        raise PreconditionError("lines have no common height range")
    if a.same_grid(b):
        return a.heights, a.xs, b.xs
    h = np.union1d(a.heights, b.heights)
    h = h[(h >= lo) & (h <= hi)]
    return h, a.at(h), b.at(h)


def order(a, b, tol=GAP_TOL):
    """Compare two lines on their merged grid."""
    _, xa, xb = _merged(a, b)
    d = xb - xa
    lo, hi = float(d.min()), float(d.max())
    if lo > tol:
        rel = LineRelation.LEFT_OF
    elif -hi > tol:
        rel = LineRelation.RIGHT_OF
    else:
        rel = LineRelation.INTERSECTING
    return LineOrderReport(rel, max(lo, -hi), lo)


def vee_join(a, b):
    """a v b: pointwise minimum (the left boundary of L(a) n L(b))."""
    if not a.same_grid(b):
        raise PreconditionError("vee_join needs lines on a common grid")
    return EssentialLine(a.heights, np.minimum(a.xs, b.xs), a.end_margin)


def chain_join(base, inner, q):
    """base v T(inner[0]) v ... v T^{q-1}(inner[q-2]).

    Requires T^{-q}(base) < inner[q-2] < ... < inner[0] < base.
    """
    inner = list(inner)
    if q < 1 or len(inner) != q - 1:
        raise PreconditionError(f"chain_join needs q - 1 = {q - 1} inner lines, got {len(inner)}")
    chain = [translate(base, -q)] + inner[::-1] + [base]
    for i in range(len(chain) - 1):
        rep = order(chain[i], chain[i + 1])
        if rep.relation != LineRelation.LEFT_OF:
            raise ChainOrderViolated(f"chain order fails at link {i}", link=i, min_gap=rep.signed_gap)
    out = base
    for i, line in enumerate(inner, start=1):
        out = vee_join(out, translate(line, i))
    return out


def _vertices_with_extension(line):
    """Line vertices plus a vertical continuation toward both ends."""
    h, x = line.heights, line.xs
    k = np.arange(END_EXTENSION, 0, -1)
    below = h[0] * 0.5**k
    above = 1.0 - (1.0 - h[-1]) * 0.5 ** k[::-1]
    s = np.concatenate([below, h, above])
    xv = np.concatenate([np.full(END_EXTENSION, x[0]), x, np.full(END_EXTENSION, x[-1])])
    return s, xv


def map_line(m, line, max_depth=MAX_REFINE_DEPTH):
    """Image of ``line`` under ``m``, resampled on the line's height grid.

    Cells whose image is non-monotone or strongly compressed in height are
    bisected up to ``max_depth`` times; a cell still going downward at the
    finest level raises FoldDetected.
    """
    s, xv = _vertices_with_extension(line)
    X, U = m.forward(xv, s)
    check_domain(U)
    for depth in range(max_depth + 1):
        dU = np.diff(U)
        flagged = dU <= COMPRESSION_FLAG * np.diff(s)
        if not flagged.any():
            break
        if depth == max_depth:
            bad = np.flatnonzero(dU <= 0)
            if bad.size:
                i = int(bad[0])
                raise FoldDetected(
                    f"image of the line folds near u={s[i]:.6g}", u=float(s[i]), depth=max_depth
                )
            break
        mid = 0.5 * (s[:-1][flagged] + s[1:][flagged])
        xm = np.interp(mid, s, xv)
        Xm, Um = m.forward(xm, mid)
        check_domain(Um)
        s_new = np.concatenate([s, mid])
        idx = np.argsort(s_new, kind="stable")
        s = s_new[idx]
        xv = np.concatenate([xv, xm])[idx]
        X = np.concatenate([X, Xm])[idx]
        U = np.concatenate([U, Um])[idx]
    strict = np.concatenate([[True], np.diff(U) > 0])
    return EssentialLine(line.heights, np.interp(line.heights, U[strict], X[strict]), line.end_margin)


# --- straightening and the area identity ---------------------------------

@dataclass(frozen=True, eq=False, repr=False)
class ShearMap(LiftedMap):
    """(x, u) -> (x - gamma(u), u): straightens a graph-line to x = 0."""

    heights: np.ndarray
    xs: np.ndarray

    @property
    def label(self):
        return "shear"

    def forward(self, x, u):
        u = np.asarray(u, dtype=float)
        return np.asarray(x, dtype=float) - np.interp(u, self.heights, self.xs), u

    def inverse(self, x, u):
        u = np.asarray(u, dtype=float)
        return np.asarray(x, dtype=float) + np.interp(u, self.heights, self.xs), u


def shear_straighten(line):
    return ShearMap(line.heights, line.xs)


def conjugate(h, g):
    """g o h o g^{-1}."""
    return Composition((g, h, Inverse(g)))


def area_between(m, x0=0.0, heights=None):
    """Signed area between the vertical x = x0 and its image (unit-area model)."""
    vertical = EssentialLine.vertical(x0, heights)
    image = map_line(m, vertical)
    return image.integral() - float(x0)


# --- line translation ----------------------------------------------------

@dataclass
class LineTranslationReport:
    n: int
    rho: float
    disjoint: bool
    permutation: CyclicOrder
    expected: CyclicOrder
    matched: bool
    min_gap: float
    deck_offsets: list
    pair_gaps: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "n": self.n,
            "rho": self.rho,
            "disjoint": self.disjoint,
            "permutation": str(self.permutation),
            "expected": str(self.expected),
            "matched": self.matched,
            "min_gap": self.min_gap,
            "deck_offsets": self.deck_offsets,
        }


def iterate_line(m, line, n):
    """[line, h(line), ..., h^n(line)] by repeated map_line."""
    out = [line]
    for _ in range(n):
        out.append(map_line(m, out[-1]))
    return out


def verify_line_translation(m, line, n, rho, tol=GAP_TOL):
    """Check that line, h(line), ..., h^n(line) project to pairwise disjoint
    lines whose cyclic order is that of 0, rho, ..., n rho."""
    if n < 1:
        raise PreconditionError("n must be >= 1")
    lines = iterate_line(m, line, n)
    base = lines[0].xs
    offsets = [0]
    shifted = [np.zeros_like(base)]
    min_gap = np.inf
    for i in range(1, n + 1):
        if not lines[i].same_grid(lines[0]):
            lines[i] = lines[i].resample(lines[0].heights)
        d = lines[i].xs - base
        k = -int(np.floor(d.min()))
        d = d + k
        gap = min(float(d.min()), float(1.0 - d.max()))
        if gap <= tol:
            raise NotDisjoint(f"iterate {i} meets a deck translate of the line", pair=[0, i], min_gap=gap)
        min_gap = min(min_gap, gap)
        offsets.append(k)
        shifted.append(d)
    pair_gaps = {}
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            D = shifted[j] - shifted[i]
            gap = max(float(D.min()), float(-D.max()))
            if gap <= tol:
                raise NotDisjoint(f"iterates {i} and {j} intersect", pair=[i, j], min_gap=gap)
            pair_gaps[(i, j)] = gap
            min_gap = min(min_gap, gap)
    expected = rigid_cyclic_order(rho, n)
    # pairwise disjoint graphs in the strip are totally ordered
    keys = [float(np.mean(s)) for s in shifted]
    perm = CyclicOrder.from_sequence(sorted(range(n + 1), key=lambda i: keys[i]))
    return LineTranslationReport(
        n=n, rho=float(rho), disjoint=True, permutation=perm, expected=expected,
        matched=perm == expected, min_gap=float(min_gap), deck_offsets=offsets, pair_gaps=pair_gaps,
    )


@dataclass
class LineSearchResult:
    line: EssentialLine
    objective: float
    evaluations: int
    stage: str
    verification: LineTranslationReport


def _return_gap(phi, psi, line):
    try:
        g1 = order(line, map_line(phi, line)).signed_gap
        g2 = order(line, map_line(psi, line)).signed_gap
    except FoldDetected:
        return -np.inf
    return min(g1, g2)


def search_line(m, iv, budget=400, seed=0, heights=None, knots=16, success_gap=1e-6,
                verify_heights=None):
    """Look for a graph-line G with G < phi(G) and G < psi(G), where
    phi = T^{-p} h^q and psi = T^{p'} h^{-q'} are the first return maps of
    the Farey interval ``iv``.

    Tries verticals, then straight shears, then coordinate descent on the
    values of the line at ``knots`` evenly spaced heights.  The search runs
    on a coarse grid; a success is re-checked on ``verify_heights`` with
    ``verify_line_translation`` for n = q + q' - 1.
    """
    if budget < 1:
        raise PreconditionError("budget must be >= 1")
    phi = power_with_deck(m, iv.q, iv.p)
    psi = power_with_deck(m, -iv.q2, -iv.p2)
    grid = height_grid(257) if heights is None else np.asarray(heights, dtype=float)
    fine = height_grid() if verify_heights is None else np.asarray(verify_heights, dtype=float)
    rng = np.random.default_rng(seed)
    evals = 0
    best = (-np.inf, None, "none")

    def attempt(line, stage):
        nonlocal evals, best
        evals += 1
        g = _return_gap(phi, psi, line)
        if g > best[0]:
            best = (g, line, stage)
        return g

    def finish(line, stage, g):
        line_f = line.resample(fine)
        g_f = _return_gap(phi, psi, line_f)
        if g_f <= GAP_TOL:
            return None
        report = verify_line_translation(m, line_f, iv.horizon, float(mediant(iv)))
        return LineSearchResult(line_f, g_f, evals, stage, report)

    candidates = [("vertical", EssentialLine.vertical(c, grid)) for c in (0.0, 0.25, 0.5, 0.75)]
    for s in (0.5, -0.5, 1.0, -1.0, 2.0, -2.0):
        for c in (0.0, 0.5):
            candidates.append(("shear", EssentialLine(grid, c + s * grid)))
    for stage, line in candidates:
        if evals >= budget:
            break
        g = attempt(line, stage)
        if g > success_gap:
            res = finish(line, stage, g)
            if res is not None:
                return res

    # coordinate descent on knot values
    if best[1] is not None:
        knot_u = np.linspace(grid[0], grid[-1], knots)
        kv = best[1].at(knot_u)
        cur = best[0]
        step = 0.05
        while evals < budget and step > 1e-5:
            improved = False
            for j in rng.permutation(knots):
                for sgn in (1.0, -1.0):
                    if evals >= budget:
                        break
                    trial = kv.copy()
                    trial[j] += sgn * step
                    line = EssentialLine(grid, np.interp(grid, knot_u, trial))
                    g = attempt(line, "descent")
                    if g > cur:
                        kv, cur, improved = trial, g, True
                        if g > success_gap:
                            res = finish(line, "descent", g)
                            if res is not None:
                                return res
                        break
            if not improved:
                step *= 0.5
    raise NotFound(
        f"no free line within {budget} evaluations", best_gap=float(best[0]), evaluations=evals
    )
