"""Annulus model, lifted maps and the built-in conservative map families.

Coordinates: the annulus is S^1 x (0, 1) with plain area as its
probability measure, the universal cover is R x (0, 1) and the deck
translation is T(x, u) = (x + 1, u).  A lifted map works on numpy arrays
of cover coordinates and commutes with T.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainEscape, PreconditionError
from .integrate import implicit_midpoint
from .profiles import Bump, Profile

EQUIVARIANCE_TOL = 1e-12
JACOBIAN_STEP = 1e-6
DEFAULT_HAMILTONIAN_STEP = 1e-3


class AnnulusModel:
    """Fixed conventions of the cover R x (0, 1) -> S^1 x (0, 1)."""

    total_measure = 1.0

    @staticmethod
    def deck(x, u, k=1):
        return np.asarray(x) + k, np.asarray(u)

    @staticmethod
    def project(x, u):
        return np.mod(x, 1.0), np.asarray(u)

    @staticmethod
    def p1(x, u):
        return np.asarray(x)

    @staticmethod
    def sample(n, rng):
        """Uniform points of the fundamental domain [0, 1) x (0, 1)."""
        x = rng.random(n)
        u = rng.random(n)
        # rng.random is [0, 1); the open annulus excludes u = 0
        u = np.where(u == 0.0, 0.5, u)
        return x, u

    @staticmethod
    def circle_distance(a, b):
        d = np.mod(np.asarray(a) - np.asarray(b), 1.0)
        return np.minimum(d, 1.0 - d)


def check_domain(u, what="image"):
    u = np.asarray(u)
    bad = ~((u > 0.0) & (u < 1.0))
    if np.any(bad):
        first = float(u[bad].flat[0]) if u.ndim else float(u)
        raise DomainEscape(f"{what} left the open annulus (u={first!r})", u=first)


class LiftedMap:
    """Base class: a plane map commuting with the deck translation.

    Subclasses implement ``forward`` and ``inverse`` on arrays.  Instances
    are immutable and hold only picklable state so they can be shipped to
    worker processes.
    """

    label = "map"
    claims_area_preserving = True
    claims_isotopic_identity = True

    def forward(self, x, u):
        raise NotImplementedError

    def inverse(self, x, u):
        raise NotImplementedError

    def __call__(self, x, u):
        return self.forward(x, u)

    def __repr__(self):
        return f"<{type(self).__name__} {self.label}>"

    def then(self, other):
        """``other`` after ``self``."""
        return Composition((other, self))


@dataclass(frozen=True, repr=False)
class Rigid(LiftedMap):
    rho: float

    @property
    def label(self):
        return f"rigid({self.rho:g})"

    def forward(self, x, u):
        return np.asarray(x, dtype=float) + self.rho, np.asarray(u, dtype=float)

    def inverse(self, x, u):
        return np.asarray(x, dtype=float) - self.rho, np.asarray(u, dtype=float)


@dataclass(frozen=True, repr=False)
class Twist(LiftedMap):
    """(x, u) -> (x + g(u), u)."""

    profile: Profile

    @property
    def label(self):
        return f"twist({self.profile.bernstein}, bumps={len(self.profile.bumps)})"

    def forward(self, x, u):
        u = np.asarray(u, dtype=float)
        return np.asarray(x, dtype=float) + self.profile(u), u

    def inverse(self, x, u):
        u = np.asarray(u, dtype=float)
        return np.asarray(x, dtype=float) - self.profile(u), u


@dataclass(frozen=True)
class Hamiltonian:
    """H(x, u) = D(u) + eps * b(u) * cos(2 pi k (x - phase)) with D' = drift.

    The bump factor b vanishes near both ends, so dH/dx does too and the
    flow keeps every height strictly inside (0, 1).
    """

    drift: Profile = field(default_factory=lambda: Profile.constant(0.0))
    eps: float = 0.0
    bump: Bump = field(default_factory=Bump)
    mode: int = 1
    phase: float = 0.0

    def __post_init__(self):
        lo, hi = self.bump.support
        if lo <= 0.0 or hi >= 1.0:
            raise PreconditionError("Hamiltonian bump must be supported strictly inside (0, 1)")
        if self.mode < 1:
            raise PreconditionError("mode must be a positive integer")

    def dHdu(self, x, u):
        w = 2.0 * math.pi * self.mode
        return self.drift(u) + self.eps * self.bump.deriv(u) * np.cos(w * (x - self.phase))

    def dHdx(self, x, u):
        w = 2.0 * math.pi * self.mode
        return -self.eps * w * self.bump(u) * np.sin(w * (x - self.phase))

    def field(self, x, u):
        return self.dHdu(x, u), -self.dHdx(x, u)


@dataclass(frozen=True, repr=False)
class HamiltonianMap(LiftedMap):
    """Time-``t`` map of the Hamiltonian field, implicit midpoint integrated."""

    hamiltonian: Hamiltonian
    t: float = 1.0
    step: float = DEFAULT_HAMILTONIAN_STEP

    @property
    def label(self):
        return f"hamiltonian(eps={self.hamiltonian.eps:g}, t={self.t:g})"

    def _run(self, x, u, t):
        x = np.asarray(x, dtype=float)
        # integrate from the fundamental domain so equivariance holds to rounding
        n = np.floor(x)
        xr, ur = implicit_midpoint(self.hamiltonian.field, x - n, u, t, self.step)
        return xr + n, ur

    def forward(self, x, u):
        return self._run(x, u, self.t)

    def inverse(self, x, u):
        return self._run(x, u, -self.t)


@dataclass(frozen=True, repr=False)
class Composition(LiftedMap):
    """maps[0] o maps[1] o ... ; the last map is applied first."""

    maps: tuple

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))
        if not self.maps:
            raise PreconditionError("composition of zero maps")

    @property
    def label(self):
        return " o ".join(m.label for m in self.maps)

    @property
    def claims_area_preserving(self):
        return all(m.claims_area_preserving for m in self.maps)

    def forward(self, x, u):
        for m in reversed(self.maps):
            x, u = m.forward(x, u)
        return x, u

    def inverse(self, x, u):
        for m in self.maps:
            x, u = m.inverse(x, u)
        return x, u


@dataclass(frozen=True, repr=False)
class Inverse(LiftedMap):
    base: LiftedMap

    @property
    def label(self):
        return f"({self.base.label})^-1"

    def forward(self, x, u):
        return self.base.inverse(x, u)

    def inverse(self, x, u):
        return self.base.forward(x, u)


@dataclass(frozen=True, repr=False)
class PowerWithDeck(LiftedMap):
    """z -> T^{-p}(h^q(z))."""

    base: LiftedMap
    q: int
    p: int = 0

    @property
    def label(self):
        return f"T^{-self.p} o ({self.base.label})^{self.q}"

    @property
    def claims_area_preserving(self):
        return self.base.claims_area_preserving

    def forward(self, x, u):
        x, u = _iterate_raw(self.base, x, u, self.q)
        return x - self.p, u

    def inverse(self, x, u):
        return _iterate_raw(self.base, np.asarray(x, dtype=float) + self.p, u, -self.q)


@dataclass(frozen=True, repr=False)
class PostRotated(LiftedMap):
    """h o R_theta, i.e. rotate by ``theta`` first.  ``theta`` may be an array
    broadcasting against the points, which evaluates a whole family at once."""

    base: LiftedMap
    theta: object

    @property
    def label(self):
        return f"{self.base.label} o rigid({self.theta})"

    def forward(self, x, u):
        return self.base.forward(np.asarray(x, dtype=float) + self.theta, u)

    def inverse(self, x, u):
        x, u = self.base.inverse(x, u)
        return x - self.theta, u


def _iterate_raw(m, x, u, n):
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    step = m.forward if n >= 0 else m.inverse
    for _ in range(abs(n)):
        x, u = step(x, u)
    return x, u


def evaluate(m, z):
    """Forward image of a cover point (or arrays of points) with domain checks."""
    x, u = z
    check_domain(u, "input")
    x2, u2 = m.forward(x, u)
    check_domain(u2)
    return x2, u2


def iterate(m, z, n):
    """n-fold composition; negative n iterates the inverse."""
    x, u = z
    check_domain(u, "input")
    step = m.forward if n >= 0 else m.inverse
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    for _ in range(abs(n)):
        x, u = step(x, u)
        check_domain(u)
    return x, u


def power_with_deck(m, q, p):
    """The lifted map T^{-p} o m^q."""
    if q == 0:
        raise PreconditionError("q must be non-zero")
    if q == 1 and p == 0:
        return m
    return PowerWithDeck(m, int(q), int(p))


def deck_shift(m, k):
    """T^k o m."""
    return PowerWithDeck(m, 1, -int(k))


# --- invariant checks ------------------------------------------------------

def _test_points(n, seed, spread=50.0):
    rng = np.random.default_rng(seed)
    x = (rng.random(n) - 0.5) * 2 * spread
    u = rng.uniform(1e-3, 1 - 1e-3, n)
    return x, u


def equivariance_error(m, n=1000, seed=0):
    """max |m(x + 1, u) - m(x, u) - (1, 0)| over random points."""
    x, u = _test_points(n, seed)
    a = m.forward(x + 1.0, u)
    b = m.forward(x, u)
    return float(max(np.max(np.abs(a[0] - b[0] - 1.0)), np.max(np.abs(a[1] - b[1]))))


def inverse_error(m, n=1000, seed=0):
    x, u = _test_points(n, seed)
    xf, uf = m.forward(x, u)
    xb, ub = m.inverse(xf, uf)
    return float(max(np.max(np.abs(xb - x)), np.max(np.abs(ub - u))))


def jacobian_det(m, x, u, h=JACOBIAN_STEP):
    """Central finite-difference Jacobian determinant."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    xp, up = m.forward(x + h, u)
    xm, um = m.forward(x - h, u)
    xq, uq = m.forward(x, u + h)
    xr, ur = m.forward(x, u - h)
    a = (xp - xm) / (2 * h)
    c = (up - um) / (2 * h)
    b = (xq - xr) / (2 * h)
    d = (uq - ur) / (2 * h)
    return a * d - b * c


def image_measure(m, box, n=200_000, seed=0):
    """Monte Carlo Leb(m(B)) for a box B = (x0, x1, u0, u1) of width < 1.

    A uniform point z lies in m(B) (projected) iff m^{-1}(z) lies in B mod 1.
    Returns (estimate, standard error).
    """
    x0, x1, u0, u1 = box
    rng = np.random.default_rng(seed)
    x, u = AnnulusModel.sample(n, rng)
    xb, ub = m.inverse(x, u)
    inside = (np.mod(xb - x0, 1.0) < (x1 - x0)) & (ub > u0) & (ub < u1)
    p = inside.mean()
    return float(p), float(math.sqrt(p * (1 - p) / n))


def check_lifted_map(m, n=1000, seed=0):
    """Spot-check the LiftedMap invariants; returns a report dict."""
    x, u = _test_points(n, seed)
    xf, uf = m.forward(x, u)
    report = {
        "label": m.label,
        "equivariance_error": equivariance_error(m, n, seed),
        "inverse_error": inverse_error(m, n, seed),
        "stays_in_annulus": bool(np.all((uf > 0) & (uf < 1))),
    }
    if m.claims_area_preserving:
        det = jacobian_det(m, x[:200], u[:200])
        report["max_jacobian_defect"] = float(np.max(np.abs(det - 1.0)))
    return report


# --- map families ----------------------------------------------------------

@dataclass(frozen=True)
class MapFamily:
    """Declarative map description, as written in experiment configs.

    kinds: ``rigid`` (rho), ``twist`` (profile), ``hamiltonian`` (drift,
    eps, bump, mode, phase, t, step) and ``composition`` (maps, applied
    last-to-first like function composition).
    """

    kind: str
    params: dict

    KINDS = ("rigid", "twist", "hamiltonian", "composition")

    @classmethod
    def from_dict(cls, spec):
        spec = dict(spec)
        kind = spec.pop("kind", None)
        if kind not in cls.KINDS:
            raise PreconditionError(f"unknown map kind {kind!r}; expected one of {cls.KINDS}")
        return cls(kind, spec)

    def build(self):
        p = self.params
        if self.kind == "rigid":
            return Rigid(float(p["rho"]))
        if self.kind == "twist":
            return Twist(Profile.from_dict(p["profile"]))
        if self.kind == "hamiltonian":
            ham = Hamiltonian(
                drift=Profile.from_dict(p.get("drift", 0.0)),
                eps=float(p.get("eps", 0.0)),
                bump=Bump(**p.get("bump", {})),
                mode=int(p.get("mode", 1)),
                phase=float(p.get("phase", 0.0)),
            )
            return HamiltonianMap(ham, float(p.get("t", 1.0)), float(p.get("step", DEFAULT_HAMILTONIAN_STEP)))
        maps = p.get("maps")
        if not maps:
            raise PreconditionError("composition needs a non-empty 'maps' list")
        return Composition(tuple(MapFamily.from_dict(s).build() for s in maps))


def perturbed_rotation(alpha, eps, bump=None):
    """The twist (x, u) -> (x + alpha + eps * b(u), u) with a unit bump b."""
    b = bump or Bump(1.0, 0.5, 0.4)
    return Twist(Profile((float(alpha),), (Bump(eps * b.amplitude, b.center, b.width),)))
