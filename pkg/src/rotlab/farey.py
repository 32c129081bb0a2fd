"""Exact Farey-interval and Stern-Brocot arithmetic.

Rationals are ``fractions.Fraction`` (always reduced, positive
denominator).  Integers are kept inside the signed 64-bit range so
results match fixed-width implementations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DegenerateAngle, NotEnclosable, PreconditionError

Rational = Fraction

INT64_MAX = 2**63 - 1
TIE_GUARD = 1e-12


def _checked(*values):
    for v in values:
        if abs(v) > INT64_MAX:
            raise OverflowError(f"integer {v} exceeds the 64-bit range")
    return values


def fmt_rational(r):
    """Render as 'p/q', including integers ('2/1')."""
    r = Fraction(r)
    return f"{r.numerator}/{r.denominator}"


def parse_rational(text):
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    return Fraction(str(text).strip())


def is_farey(left, right):
    """True iff q p' - p q' = 1 for left = p/q and right = p'/q'."""
    left, right = Fraction(left), Fraction(right)
    p, q = left.numerator, left.denominator
    pp, qq = right.numerator, right.denominator
    _checked(q * pp, p * qq)
    return q * pp - p * qq == 1


@dataclass(frozen=True)
class FareyInterval:
    left: Fraction
    right: Fraction

    def __post_init__(self):
        object.__setattr__(self, "left", Fraction(self.left))
        object.__setattr__(self, "right", Fraction(self.right))
        if not is_farey(self.left, self.right):
            raise PreconditionError(
                f"({fmt_rational(self.left)}, {fmt_rational(self.right)}) is not a Farey interval"
            )

    @classmethod
    def parse(cls, spec):
        if isinstance(spec, str):
            a, b = spec.replace("(", "").replace(")", "").split(",")
            return cls(parse_rational(a), parse_rational(b))
        a, b = spec
        return cls(parse_rational(a), parse_rational(b))

    @property
    def p(self):
        return self.left.numerator

    @property
    def q(self):
        return self.left.denominator

    @property
    def p2(self):
        return self.right.numerator

    @property
    def q2(self):
        return self.right.denominator

    @property
    def horizon(self):
        """q + q' - 1, the number of iterates the line translation covers."""
        return self.q + self.q2 - 1

    def contains(self, r):
        """Strict containment of a rational (or float) in the open interval."""
        return self.left < r < self.right

    def children(self):
        m = mediant(self)
        return FareyInterval(self.left, m), FareyInterval(m, self.right)

    def __str__(self):
        return f"({fmt_rational(self.left)}, {fmt_rational(self.right)})"


def mediant(iv):
    return Fraction(iv.p + iv.p2, iv.q + iv.q2)


def enclosing_farey(lo, hi, max_den):
    """Deepest Farey interval with denominators <= max_den strictly containing [lo, hi].

    Walks down the Stern-Brocot tree, always keeping the child whose open
    interval still holds [lo, hi], until the next mediant would need a
    denominator above ``max_den``.  Floats are compared exactly through
    ``Fraction``.
    """
    if lo > hi:
        raise PreconditionError("need lo <= hi")
    if max_den < 1:
        raise PreconditionError("max_den must be >= 1")
    flo, fhi = Fraction(lo), Fraction(hi)
    # the first levels of the tree below (-1/0, 1/0) are the integers
    n = math.floor(flo)
    if n + 1 <= fhi or n == flo:
        k = n if n == flo else n + 1
        raise NotEnclosable(f"[{lo}, {hi}] contains {k}/1", rational=f"{k}/1")
    a, b, c, d = n, 1, n + 1, 1  # left = a/b, right = c/d
    while True:
        m_num, m_den = a + c, b + d
        _checked(m_num, m_den)
        m = Fraction(m_num, m_den)
        if m_den > max_den:
            break
        if flo <= m <= fhi:
            raise NotEnclosable(f"[{lo}, {hi}] contains {fmt_rational(m)}", rational=fmt_rational(m))
        if m < flo:
            a, b = m_num, m_den
        else:
            c, d = m_num, m_den
    return FareyInterval(Fraction(a, b), Fraction(c, d))


def decompose(iv, m, n):
    """(k, l) with h^m o T^{-n} = phi^k o psi^{-l}, phi = T^{-p} h^q, psi = T^{p'} h^{-q'}."""
    if m < 1:
        raise PreconditionError("m must be >= 1")
    k = m * iv.p2 - n * iv.q2
    l = -m * iv.p + n * iv.q
    _checked(k, l)
    return k, l


@dataclass(frozen=True)
class CyclicOrder:
    permutation: tuple

    def __post_init__(self):
        perm = tuple(int(i) for i in self.permutation)
        object.__setattr__(self, "permutation", perm)
        if sorted(perm) != list(range(len(perm))) or (perm and perm[0] != 0):
            raise PreconditionError(f"{perm} is not a normalized cyclic order")

    @property
    def n(self):
        return len(self.permutation) - 1

    @classmethod
    def from_sequence(cls, seq):
        """Normalize any cyclic rotation of a permutation so it starts at 0."""
        seq = list(seq)
        i = seq.index(0)
        return cls(tuple(seq[i:] + seq[:i]))

    def __str__(self):
        return "(" + ", ".join(str(i) for i in self.permutation) + ")"


def rigid_cyclic_order(rho, n):
    """Left-to-right order of 0, rho, ..., n rho on the circle, starting at 0."""
    if n < 1:
        raise PreconditionError("n must be >= 1")
    for q in range(1, n + 1):
        p = round(rho * q)
        if abs(rho - p / q) < TIE_GUARD:
            raise DegenerateAngle(
                f"rho={rho!r} is within {TIE_GUARD} of {p}/{q}", p=p, q=q
            )
    fr = [math.fmod(k * rho, 1.0) % 1.0 for k in range(n + 1)]
    perm = sorted(range(n + 1), key=lambda k: fr[k])
    return CyclicOrder.from_sequence(perm)


def farey_intervals(max_sum):
    """All Farey intervals inside [0, 1] with q + q' <= max_sum (Stern-Brocot walk)."""
    out = []
    stack = [FareyInterval(Fraction(0), Fraction(1))]
    while stack:
        iv = stack.pop()
        if iv.q + iv.q2 > max_sum:
            continue
        out.append(iv)
        stack.extend(iv.children())
    out.sort(key=lambda iv: (iv.left, iv.right))
    return out


def rationals_between(lo, hi, max_q):
    """Reduced p/q in the closed real interval [lo, hi] with 1 <= q <= max_q, sorted."""
    if lo > hi:
        return []
    flo, fhi = Fraction(lo), Fraction(hi)
    out = set()
    for q in range(1, max_q + 1):
        p_lo = math.ceil(flo * q)
        p_hi = math.floor(fhi * q)
        for p in range(p_lo, p_hi + 1):
            if math.gcd(p, q) == 1:
                out.add(Fraction(p, q))
    return sorted(out)
