"""Quadratic Dirichlet characters via the Kronecker symbol."""

from __future__ import annotations

from dataclasses import dataclass


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n), fully multiplicative extension of Jacobi."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    sign = 1
    if n < 0:
        n = -n
        if a < 0:
            sign = -sign
    e = 0
    while n % 2 == 0:
        n //= 2
        e += 1
    if e:
        if a % 2 == 0:
            return 0
        if e % 2 and a % 8 in (3, 5):
            sign = -sign
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                sign = -sign
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            sign = -sign
        a %= n
    return sign if n == 1 else 0


@dataclass(frozen=True)
class DirichletCharacter:
    """chi_ell = (ell | .); completely multiplicative with values in {-1,0,1}.

    For fundamental ell this is the primitive quadratic character of
    conductor |ell|; ell = 1 gives the trivial character.
    """

    ell: int

    def __call__(self, n: int) -> int:
        return kronecker(self.ell, n)

    @property
    def conductor(self) -> int:
        return abs(self.ell)

    @property
    def is_odd(self) -> bool:
        """True when chi(-1) = -1."""
        return self(-1) == -1
