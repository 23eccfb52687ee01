"""Exact arithmetic with quadratic surds.

Two layers:

* `Surd` -- a finite sum  sum_r  c_r * sqrt(r)  with rational coefficients,
  indexed by squarefree integer radicands r (negative r means sqrt(r) is the
  principal branch i*sqrt(|r|); r = 1 is the rational part).  Closed under
  +, -, * and complex conjugation, which is all the lattice enumeration and
  CM-point arithmetic need.  No floating error enters before `embed`.

* `QuadraticSurd` -- the single-radicand view (rational + coeff*sqrt(rad))
  used for table constants such as z = (1 - sqrt(1-t))/2.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Tuple, Union

import mpmath

from .precision import PrecisionContext, DEFAULT_CTX

RationalLike = Union[int, Fraction]


def squarefree_decompose(n: int) -> Tuple[int, int]:
    """Write n = s^2 * m with m squarefree; return (s, m).

    Works by trial division; radicands in this package stay tiny.
    """
    if n == 0:
        return 1, 0
    sign = 1 if n > 0 else -1
    n = abs(n)
    s, m = 1, 1
    d = 2
    while d * d <= n:
        e = 0
        while n % d == 0:
            n //= d
            e += 1
        s *= d ** (e // 2)
        if e % 2:
            m *= d
        d += 1 if d == 2 else 2
    m *= n
    return s, sign * m


class Surd:
    """Exact element of a multi-quadratic extension of Q."""

    __slots__ = ("terms",)

    def __init__(self, terms: Dict[int, Fraction] | None = None):
        self.terms: Dict[int, Fraction] = {}
        if terms:
            for r, c in terms.items():
                if c:
                    self.terms[r] = Fraction(c)

    # -- constructors -------------------------------------------------

    @staticmethod
    def rational(c: RationalLike) -> "Surd":
        return Surd({1: Fraction(c)})

    @staticmethod
    def sqrt(n: int, scale: RationalLike = 1) -> "Surd":
        """scale * sqrt(n) with n a (possibly negative) integer."""
        s, m = squarefree_decompose(n)
        if m == 0:
            return Surd()
        return Surd({m: Fraction(scale) * s})

    # -- ring operations ----------------------------------------------

    def _coerced(self, other) -> "Surd":
        if isinstance(other, Surd):
            return other
        if isinstance(other, (int, Fraction)):
            return Surd.rational(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerced(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for r, c in other.terms.items():
            out[r] = out.get(r, Fraction(0)) + c
        return Surd(out)

    __radd__ = __add__

    def __neg__(self):
        return Surd({r: -c for r, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerced(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerced(other)
        if other is NotImplemented:
            return NotImplemented
        out: Dict[int, Fraction] = {}
        for r1, c1 in self.terms.items():
            for r2, c2 in other.terms.items():
                # sqrt(r1)*sqrt(r2) with principal branches: each negative
                # radicand contributes a factor i.
                i_power = (r1 < 0) + (r2 < 0)
                s, m = squarefree_decompose(abs(r1) * abs(r2))
                coeff = c1 * c2 * s
                if i_power == 2:
                    coeff = -coeff
                elif i_power == 1:
                    m = -m
                out[m] = out.get(m, Fraction(0)) + coeff
        return Surd(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers not supported")
        out = Surd.rational(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "Surd":
        """Complex conjugation: flips the sign of imaginary radicand parts."""
        return Surd({r: (-c if r < 0 else c) for r, c in self.terms.items()})

    # -- predicates and views -----------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_rational(self) -> bool:
        return all(r == 1 for r in self.terms)

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.terms.get(1, Fraction(0))

    def __eq__(self, other):
        other = self._coerced(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for r, c in sorted(self.terms.items()):
            parts.append(str(c) if r == 1 else f"{c}*sqrt({r})")
        return " + ".join(parts)

    # -- embedding -----------------------------------------------------

    def embed(self, ctx: PrecisionContext = DEFAULT_CTX) -> mpmath.mpc:
        """Principal-branch numerical value at working precision."""
        with ctx.workprec():
            total = mpmath.mpc(0)
            for r, c in self.terms.items():
                root = mpmath.mpf(1) if r == 1 else mpmath.sqrt(mpmath.mpf(r))
                total += mpmath.mpf(c.numerator) / c.denominator * root
            return +total


@dataclass(frozen=True)
class QuadraticSurd:
    """rational_part + surd_coefficient * sqrt(radicand), radicand squarefree."""

    rational_part: Fraction
    surd_coefficient: Fraction
    radicand: int

    def __post_init__(self):
        s, m = squarefree_decompose(self.radicand)
        if s != 1:
            object.__setattr__(self, "surd_coefficient", self.surd_coefficient * s)
            object.__setattr__(self, "radicand", m)
        if self.surd_coefficient == 0:
            object.__setattr__(self, "radicand", 1)

    @staticmethod
    def from_rational(c: RationalLike) -> "QuadraticSurd":
        return QuadraticSurd(Fraction(c), Fraction(0), 1)

    @staticmethod
    def sqrt_of_rational(t: RationalLike) -> "QuadraticSurd":
        """Exact sqrt(t) for rational t >= 0 or pure-imaginary for t < 0."""
        t = Fraction(t)
        num = t.numerator * t.denominator
        s, m = squarefree_decompose(num)
        return QuadraticSurd(Fraction(0), Fraction(s, t.denominator), m)

    def is_rational(self) -> bool:
        return self.surd_coefficient == 0 or self.radicand == 1

    def as_surd(self) -> Surd:
        out = Surd.rational(self.rational_part)
        if self.surd_coefficient:
            out = out + Surd.sqrt(self.radicand, self.surd_coefficient)
        return out

    def embed(self, ctx: PrecisionContext = DEFAULT_CTX) -> mpmath.mpc:
        return self.as_surd().embed(ctx)


def eval_algebraic(terms: Iterable, ctx: PrecisionContext = DEFAULT_CTX) -> mpmath.mpc:
    """Evaluate a sum of rational-power monomials.

    `terms` is a list of [coeff, [[base, num, den], ...]] with coeff a
    rational (string/int/Fraction) and each power base**(num/den) taken on
    the principal branch.  This covers every closed-form constant in the
    embedded tables (square roots, cube roots, 3^{3/4}, ...).
    """
    with ctx.workprec():
        total = mpmath.mpc(0)
        for coeff, powers in terms:
            c = Fraction(coeff)
            val = mpmath.mpf(c.numerator) / c.denominator
            acc = mpmath.mpc(val)
            for base, num, den in powers:
                acc *= mpmath.power(mpmath.mpf(base), mpmath.mpf(num) / den)
            total += acc
        if abs(total.imag) == 0:
            return +total
        return +total
