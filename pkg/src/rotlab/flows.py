"""Area-preserving flows on the annulus and their compactly supported cutoffs.

The cutoff family lives on S^1 x R in height coordinates y; it is carried
to the unit-height model by u = (1 + tanh y) / 2, so the core S^1 x [-s, s]
becomes [(1 - tanh s)/2, (1 + tanh s)/2] and the support S^1 x [-2s, 2s]
becomes [(1 - tanh 2s)/2, (1 + tanh 2s)/2].
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cover import Hamiltonian, LiftedMap, check_domain
from .errors import PreconditionError
from .integrate import implicit_midpoint
from .profiles import Bump, Profile, smoothstep5
from .rotation import rotation_set

DEFAULT_STEP = 1e-3


class VectorField:
    """A field (x, u) -> (dx/dt, du/dt), 1-periodic in x."""

    bounded = True
    divergence_free = True
    # horizontal fields depending on u only integrate in closed form
    horizontal = False

    def __call__(self, x, u):
        raise NotImplementedError

    def speed(self, u):
        """dx/dt for horizontal fields."""
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantField(VectorField):
    vx: float = 1.0

    horizontal = True

    def __call__(self, x, u):
        x = np.asarray(x, dtype=float)
        return np.full(np.broadcast(x, u).shape, self.vx), np.zeros(np.broadcast(x, u).shape)

    def speed(self, u):
        return np.full(np.shape(u), self.vx)


@dataclass(frozen=True)
class HamiltonianField(VectorField):
    hamiltonian: Hamiltonian

    @property
    def horizontal(self):
        return self.hamiltonian.eps == 0.0

    def __call__(self, x, u):
        return self.hamiltonian.field(x, u)

    def speed(self, u):
        return self.hamiltonian.drift(u)


@dataclass(frozen=True)
class CutoffFamily:
    """phi_s: 1 on the core, 0 outside the support, smoothstep-5 in between."""

    s: float

    def __post_init__(self):
        if self.s < 1:
            raise PreconditionError("cutoff parameter s must be >= 1")

    @property
    def core(self):
        t = math.tanh(self.s)
        return (0.5 * (1 - t), 0.5 * (1 + t))

    @property
    def support(self):
        t = math.tanh(2 * self.s)
        return (0.5 * (1 - t), 0.5 * (1 + t))

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        (c0, c1), (s0, s1) = self.core, self.support
        lower = smoothstep5((u - s0) / (c0 - s0))
        upper = smoothstep5((s1 - u) / (s1 - c1))
        return np.minimum(lower, upper)

    def integral(self, n=200_001):
        u = np.linspace(0.0, 1.0, n)
        return float(np.trapezoid(self(u), u))


@dataclass(frozen=True)
class CutoffField(VectorField):
    base: VectorField
    cutoff: CutoffFamily

    @property
    def horizontal(self):
        return self.base.horizontal

    @property
    def divergence_free(self):
        # phi_s(u) * (a(u), 0) is divergence free; other products need not be
        return self.base.divergence_free and self.base.horizontal

    def __call__(self, x, u):
        dx, du = self.base(x, u)
        c = self.cutoff(u)
        return c * dx, c * du

    def speed(self, u):
        return self.cutoff(u) * self.base.speed(u)


def cutoff_field(field, s):
    """X_s = phi_s . X."""
    return CutoffField(field, CutoffFamily(float(s)))


def flow(field, t, z, step=DEFAULT_STEP):
    """Time-t flow of ``field`` from z (arrays allowed)."""
    if step <= 0:
        raise PreconditionError("step must be positive")
    x, u = np.asarray(z[0], dtype=float), np.asarray(z[1], dtype=float)
    if field.horizontal:
        # u is constant along orbits, so x moves at a fixed speed
        return x + t * field.speed(u), u.copy()
    n = np.floor(x)
    xr, ur = implicit_midpoint(field, x - n, u, t, step)
    check_domain(ur)
    return xr + n, ur


@dataclass(frozen=True, eq=False, repr=False)
class FlowMap(LiftedMap):
    field: VectorField
    t: float
    step: float = DEFAULT_STEP

    @property
    def label(self):
        return f"flow({type(self.field).__name__}, t={self.t:g})"

    @property
    def claims_area_preserving(self):
        return self.field.divergence_free

    def forward(self, x, u):
        return flow(self.field, self.t, (x, u), self.step)

    def inverse(self, x, u):
        return flow(self.field, -self.t, (x, u), self.step)


def divergence(field, x, u, h=1e-6):
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    dxp, _ = field(x + h, u)
    dxm, _ = field(x - h, u)
    _, dup = field(x, u + h)
    _, dum = field(x, u - h)
    return (dxp - dxm) / (2 * h) + (dup - dum) / (2 * h)


def check_field(field, n=1000, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.uniform(-5, 5, n)
    u = rng.uniform(1e-3, 1 - 1e-3, n)
    a = field(x, u)
    b = field(x + 1.0, u)
    report = {
        "periodicity_error": float(max(np.max(np.abs(a[0] - b[0])), np.max(np.abs(a[1] - b[1])))),
        "max_speed": float(np.max(np.hypot(*a))),
    }
    if field.divergence_free:
        report["max_divergence"] = float(np.max(np.abs(divergence(field, x, u))))
    return report


def check_flow_linearity(field, ts, n_samples=2000, max_iter=200, seed=0, step=DEFAULT_STEP):
    """rho(Leb, flow^t) for each t, the least-squares slope through 0 and the
    worst deviation from t * slope."""
    if not field.divergence_free:
        raise PreconditionError("flow linearity needs a divergence-free field")
    ts = [float(t) for t in ts]
    means = []
    for t in ts:
        est = rotation_set(FlowMap(field, t, step), n_samples, max_iter, seed, min_converged=0.0)
        means.append(est.mean)
    tt, mm = np.array(ts), np.array(means)
    denom = float(tt @ tt)
    slope = float(tt @ mm / denom) if denom else 0.0
    dev = float(np.max(np.abs(mm - slope * tt))) if len(ts) else 0.0
    return {"ts": ts, "means": means, "slope": slope, "max_deviation": dev}


def slowdown_violations(field, n=10_000, seed=0, s_range=(1.0, 3.0), t_range=(0.0, 5.0)):
    """Count random (z, s, t) where the cutoff flow's x-displacement leaves
    [0, t * max|X|] (horizontal fields with non-negative speed)."""
    if not field.horizontal:
        raise PreconditionError("the slow-down bound is checked for horizontal fields")
    rng = np.random.default_rng(seed)
    x = rng.uniform(0, 1, n)
    u = rng.uniform(1e-6, 1 - 1e-6, n)
    s = rng.uniform(*s_range, n)
    t = rng.uniform(*t_range, n)
    vmax = float(np.max(np.abs(field.speed(np.linspace(1e-6, 1 - 1e-6, 10_001)))))
    bad = 0
    worst = 0.0
    for i in range(n):
        xs, _ = flow(cutoff_field(field, s[i]), t[i], (x[i], u[i]))
        d = float(xs - x[i])
        over = max(-d, d - t[i] * vmax)
        worst = max(worst, over)
        if over > 1e-12:
            bad += 1
    return {"samples": n, "violations": bad, "worst_excess": worst}


@dataclass(frozen=True)
class FieldSpec:
    """Config form of a field: constant(vx), hamiltonian(...), cutoff(base, s)."""

    kind: str
    params: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, spec):
        spec = dict(spec)
        kind = spec.pop("kind", None)
        if kind not in ("constant", "hamiltonian", "cutoff"):
            raise PreconditionError(f"unknown field kind {kind!r}")
        return cls(kind, spec)

    def build(self):
        p = self.params
        if self.kind == "constant":
            return ConstantField(float(p.get("vx", 1.0)))
        if self.kind == "hamiltonian":
            return HamiltonianField(Hamiltonian(
                drift=Profile.from_dict(p.get("drift", 0.0)),
                eps=float(p.get("eps", 0.0)),
                bump=Bump(**p.get("bump", {})),
                mode=int(p.get("mode", 1)),
                phase=float(p.get("phase", 0.0)),
            ))
        return cutoff_field(FieldSpec.from_dict(p["base"]).build(), float(p["s"]))
