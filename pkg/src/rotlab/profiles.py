"""Height profiles g(u) on (0, 1).

A profile is a Bernstein polynomial plus a sum of compactly supported
quintic-smoothstep bumps.  Everything is vectorised over numpy arrays and
has closed-form first derivatives, which the Hamiltonian fields need.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np


def smoothstep5(t):
    """C^2 ramp: 0 for t <= 0, 1 for t >= 1, 6t^5 - 15t^4 + 10t^3 between."""
    t = np.clip(t, 0.0, 1.0)
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0)


def smoothstep5_deriv(t):
    inside = (t > 0.0) & (t < 1.0)
    tc = np.clip(t, 0.0, 1.0)
    return np.where(inside, 30.0 * tc * tc * (tc - 1.0) ** 2, 0.0)


@dataclass(frozen=True)
class Bump:
    """Unit-height bump: 1 at ``center``, 0 outside ``[center - width, center + width]``."""

    amplitude: float = 1.0
    center: float = 0.5
    width: float = 0.4

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError("bump width must be positive")

    @property
    def support(self):
        return (self.center - self.width, self.center + self.width)

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        return self.amplitude * smoothstep5(1.0 - np.abs(u - self.center) / self.width)

    def deriv(self, u):
        u = np.asarray(u, dtype=float)
        s = 1.0 - np.abs(u - self.center) / self.width
        return -self.amplitude * np.sign(u - self.center) / self.width * smoothstep5_deriv(s)

    def integral(self):
        # the smoothstep ramp integrates to 1/2 over [0, 1]
        return self.amplitude * self.width


@dataclass(frozen=True)
class Profile:
    bernstein: tuple = (0.0,)
    bumps: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "bernstein", tuple(float(c) for c in self.bernstein))
        object.__setattr__(self, "bumps", tuple(self.bumps))
        if not self.bernstein:
            raise ValueError("a profile needs at least one Bernstein coefficient")

    @classmethod
    def constant(cls, value):
        return cls((float(value),))

    @classmethod
    def linear(cls, at0, at1):
        return cls((float(at0), float(at1)))

    @classmethod
    def from_dict(cls, spec):
        if isinstance(spec, (int, float)):
            return cls.constant(spec)
        bumps = tuple(Bump(**b) for b in spec.get("bumps", ()))
        return cls(tuple(spec.get("bernstein", (0.0,))), bumps)

    def to_dict(self):
        return {
            "bernstein": list(self.bernstein),
            "bumps": [
                {"amplitude": b.amplitude, "center": b.center, "width": b.width}
                for b in self.bumps
            ],
        }

    @property
    def degree(self):
        return len(self.bernstein) - 1

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        n = self.degree
        out = np.zeros_like(u)
        for k, c in enumerate(self.bernstein):
            if c:
                out = out + c * comb(n, k) * u**k * (1.0 - u) ** (n - k)
        for b in self.bumps:
            out = out + b(u)
        return out

    def deriv(self, u):
        u = np.asarray(u, dtype=float)
        n = self.degree
        out = np.zeros_like(u)
        # derivative of a Bernstein polynomial is n * sum (c_{k+1} - c_k) B_{k,n-1}
        for k in range(n):
            d = self.bernstein[k + 1] - self.bernstein[k]
            if d:
                out = out + n * d * comb(n - 1, k) * u**k * (1.0 - u) ** (n - 1 - k)
        for b in self.bumps:
            out = out + b.deriv(u)
        return out

    def integral(self):
        """Exact integral over [0, 1]."""
        return sum(self.bernstein) / len(self.bernstein) + sum(b.integral() for b in self.bumps)

    def bounds(self, n=4097):
        """Min and max sampled on a dense grid (Bernstein hull is too loose for bumps)."""
        v = self(np.linspace(0.0, 1.0, n))
        return float(v.min()), float(v.max())
