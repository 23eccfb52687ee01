"""Exact CM points in the upper half-plane and fundamental-domain reduction.

A CM point is tau = a + b*sqrt(-D) with a, b rational, b > 0 and D > 0
squarefree.  All Moebius arithmetic is exact; floats appear only in the
final embedding, so domain membership and boundary ties are decided exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

import mpmath

from .precision import PrecisionContext, DEFAULT_CTX
from .surd import Surd, squarefree_decompose

Matrix = Tuple[Tuple[int, int], Tuple[int, int]]

IDENTITY: Matrix = ((1, 0), (0, 1))


def _mat_mul(m1: Matrix, m2: Matrix) -> Matrix:
    (a, b), (c, d) = m1
    (e, f), (g, h) = m2
    return ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))


@dataclass(frozen=True)
class CMPoint:
    """tau = a + b*sqrt(-D) with exact rational a, b and squarefree D > 0."""

    a: Fraction
    b: Fraction
    D: int

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        s, m = squarefree_decompose(self.D)
        if m <= 0:
            raise ValueError("D must be positive")
        if s != 1:
            object.__setattr__(self, "b", self.b * s)
            object.__setattr__(self, "D", m)
        if self.b <= 0:
            raise ValueError("CM point must lie in the upper half-plane")

    # -- constructors ---------------------------------------------------

    @staticmethod
    def make(a, b, D) -> "CMPoint":
        return CMPoint(Fraction(a), Fraction(b), D)

    @staticmethod
    def from_surd(s: Surd) -> "CMPoint":
        a = Fraction(0)
        b = None
        D = None
        for r, c in s.terms.items():
            if r == 1:
                a = c
            elif r < 0:
                if D is not None:
                    raise ValueError("not a quadratic point")
                D, b = -r, c
            else:
                raise ValueError("real irrational part is not a CM point")
        if D is None:
            raise ValueError("point is real")
        return CMPoint(a, b, D)

    # -- exact data -----------------------------------------------------

    def as_surd(self) -> Surd:
        return Surd({1: self.a, -self.D: self.b})

    def norm(self) -> Fraction:
        """|tau|^2, exactly."""
        return self.a * self.a + self.b * self.b * self.D

    def discriminant(self) -> int:
        """Discriminant of the primitive integer quadratic satisfied by tau."""
        from math import gcd, lcm
        n = self.norm()
        L = lcm(n.denominator, (2 * self.a).denominator)
        c0, c1, c2 = L, int(-2 * self.a * L), int(n * L)
        g = gcd(gcd(c0, abs(c1)), abs(c2))
        c0, c1, c2 = c0 // g, c1 // g, c2 // g
        return c1 * c1 - 4 * c0 * c2

    # -- arithmetic -----------------------------------------------------

    def translate(self, n: Fraction) -> "CMPoint":
        return CMPoint(self.a + Fraction(n), self.b, self.D)

    def scale(self, r) -> "CMPoint":
        r = Fraction(r)
        if r <= 0:
            raise ValueError("scale must be positive")
        return CMPoint(self.a * r, self.b * r, self.D)

    def moebius(self, m: Matrix) -> "CMPoint":
        """(p*tau+q)/(r*tau+s) for an integer matrix with positive determinant."""
        (p, q), (r, s) = m
        det = p * s - q * r
        if det <= 0:
            raise ValueError("matrix must have positive determinant")
        a, b, D = self.a, self.b, self.D
        den = (r * a + s) ** 2 + r * r * b * b * D
        if den == 0:
            raise ZeroDivisionError("Moebius denominator vanished")
        new_a = ((p * a + q) * (r * a + s) + p * r * b * b * D) / den
        new_b = b * det / den
        return CMPoint(new_a, new_b, D)

    def fricke(self, n: int) -> "CMPoint":
        """W_n action tau -> -1/(n*tau), exact."""
        den = n * self.norm()
        return CMPoint(-self.a / den, self.b / den, self.D)

    # -- embedding ------------------------------------------------------

    def value(self, ctx: PrecisionContext = DEFAULT_CTX) -> mpmath.mpc:
        with ctx.workprec():
            re = mpmath.mpf(self.a.numerator) / self.a.denominator
            im = mpmath.mpf(self.b.numerator) / self.b.denominator * mpmath.sqrt(self.D)
            return mpmath.mpc(re, im)

    def __repr__(self):
        return f"CMPoint({self.a} + {self.b}*sqrt(-{self.D}))"


def cm_point_value(tau: CMPoint, ctx: PrecisionContext = DEFAULT_CTX) -> mpmath.mpc:
    """Complex embedding of an exact CM point."""
    return tau.value(ctx)


def nome(tau: CMPoint, ctx: PrecisionContext = DEFAULT_CTX) -> mpmath.mpc:
    """q = exp(2*pi*i*tau); always inside the unit disk."""
    with ctx.workprec():
        return mpmath.exp(2j * mpmath.pi * tau.value(ctx))


def nome_fractional(tau: CMPoint, M: int, ctx: PrecisionContext = DEFAULT_CTX) -> mpmath.mpc:
    """q^{1/M} = exp(2*pi*i*tau/M), the principal fractional nome."""
    with ctx.workprec():
        return mpmath.exp(2j * mpmath.pi * tau.value(ctx) / M)


def reduce_sl2z(tau: CMPoint) -> Tuple[CMPoint, Matrix]:
    """Reduce into the standard SL2(Z) fundamental domain, exactly.

    Convention: Re(tau) in [-1/2, 1/2) and, on the arc |tau| = 1,
    Re(tau) <= 0.  Returns (reduced point, matrix g) with g.tau_in = tau_out
    and det g = 1.
    """
    g = IDENTITY
    pt = tau
    while True:
        # translate Re into [-1/2, 1/2)
        n = (pt.a + Fraction(1, 2)).__floor__()
        if n:
            pt = pt.translate(-n)
            g = _mat_mul(((1, -n), (0, 1)), g)
        norm = pt.norm()
        if norm < 1 or (norm == 1 and pt.a > 0):
            pt = pt.moebius(((0, -1), (1, 0)))
            g = _mat_mul(((0, -1), (1, 0)), g)
            continue
        return pt, g


def reduce_fricke(tau: CMPoint, n: int) -> Tuple[CMPoint, Matrix]:
    """Reduce for the Fricke-extended group Gamma_0(n)^+ (n = 2 or 3).

    Alternates translations into |Re| <= 1/2 with W_n whenever n|tau|^2 < 1;
    Im increases strictly under each W_n so the loop terminates.  The
    returned integer matrix g has det n^k and acts by Moebius action.
    """
    if n not in (2, 3):
        raise ValueError("Fricke reduction implemented for n in {2, 3}")
    g = IDENTITY
    pt = tau
    while True:
        shift = (pt.a + Fraction(1, 2)).__floor__()
        if shift:
            pt = pt.translate(-shift)
            g = _mat_mul(((1, -shift), (0, 1)), g)
        norm_n = n * pt.norm()
        if norm_n < 1 or (norm_n == 1 and pt.a > 0):
            pt = pt.fricke(n)
            g = _mat_mul(((0, -1), (n, 0)), g)
            continue
        return pt, g
