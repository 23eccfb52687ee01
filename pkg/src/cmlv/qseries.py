"""Exact truncated Fourier/Puiseux expansions in q^{1/M}.

Coefficients are exact rationals; a series knows the denominator M of its
expansion variable x = q^{1/M}, its truncation order (valid modulo q^T) and,
when a builder can prove one, a coefficient-growth hint |c_n| <= A*(n+1)^deg
(n in q-order units) that certifies evaluation tails.  Quotients lose the
hint; their evaluation falls back to the truncation-doubling oracle.

All hauptmodul expansions are assembled from the Dedekind eta unit part
u(q) = prod (1 - q^n), computed two independent ways (pentagonal-number sum
and the logarithmic-derivative recursion) so the tests can compare them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Callable, Dict, Optional, Tuple

import mpmath
from mpmath import mpf

from .cmpoint import CMPoint, nome_fractional
from .errors import SlowConvergence, UnsupportedFunction
from .precision import PrecisionContext, DEFAULT_CTX

Hint = Optional[Tuple[Fraction, int]]   # |c_n| <= A * (n+1)^deg


@dataclass
class QSeries:
    M: int
    coeffs: Dict[int, Fraction]
    truncation_order: int               # coefficients known for exponents e/M < T
    hint: Hint = None

    def __post_init__(self):
        self.coeffs = {e: Fraction(c) for e, c in self.coeffs.items() if c}

    # -- bookkeeping ----------------------------------------------------

    def copy(self) -> "QSeries":
        return QSeries(self.M, dict(self.coeffs), self.truncation_order, self.hint)

    def realign(self, new_M: int) -> "QSeries":
        if new_M == self.M:
            return self
        if new_M % self.M:
            raise ValueError("can only refine to a multiple of M")
        k = new_M // self.M
        return QSeries(new_M, {e * k: c for e, c in self.coeffs.items()},
                       self.truncation_order, self.hint)

    def reduce_M(self) -> "QSeries":
        """Shrink M to the smallest denominator actually used."""
        g = self.M
        for e in self.coeffs:
            g = gcd(g, e)
            if g == 1:
                return self
        if g == self.M and 0 not in self.coeffs and self.coeffs:
            g = gcd(g, self.M)
        if g <= 1:
            return self
        return QSeries(self.M // g, {e // g: c for e, c in self.coeffs.items()},
                       self.truncation_order, self.hint)

    def valuation(self) -> int:
        """Lowest exponent numerator with a nonzero coefficient."""
        if not self.coeffs:
            raise ValueError("zero series has no valuation")
        return min(self.coeffs)

    def coefficient(self, exponent: Fraction) -> Fraction:
        """Coefficient of q^exponent."""
        e = Fraction(exponent) * self.M
        if e.denominator != 1:
            return Fraction(0)
        return self.coeffs.get(int(e), Fraction(0))

    def _limit(self) -> int:
        return self.M * self.truncation_order

    # -- ring operations -------------------------------------------------

    def _pair(self, other: "QSeries"):
        m = lcm(self.M, other.M)
        return self.realign(m), other.realign(m)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QSeries(1, {0: Fraction(other)}, self.truncation_order)
        a, b = self._pair(other)
        T = min(a.truncation_order, b.truncation_order)
        out = dict(a.coeffs)
        for e, c in b.coeffs.items():
            out[e] = out.get(e, Fraction(0)) + c
        lim = a.M * T
        out = {e: c for e, c in out.items() if e < lim}
        hint = None
        if a.hint and b.hint:
            hint = (a.hint[0] + b.hint[0], max(a.hint[1], b.hint[1]))
        return QSeries(a.M, out, T, hint)

    __radd__ = __add__

    def __neg__(self):
        return QSeries(self.M, {e: -c for e, c in self.coeffs.items()},
                       self.truncation_order, self.hint)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QSeries(1, {0: Fraction(other)}, self.truncation_order)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            s = Fraction(other)
            hint = (abs(s) * self.hint[0], self.hint[1]) if self.hint else None
            return QSeries(self.M, {e: c * s for e, c in self.coeffs.items()},
                           self.truncation_order, hint)
        a, b = self._pair(other)
        va = min(a.coeffs) if a.coeffs else 0
        vb = min(b.coeffs) if b.coeffs else 0
        T = min(a.truncation_order * a.M + vb, b.truncation_order * b.M + va)
        out: Dict[int, Fraction] = {}
        for e1, c1 in a.coeffs.items():
            for e2, c2 in b.coeffs.items():
                e = e1 + e2
                if e < T:
                    out[e] = out.get(e, Fraction(0)) + c1 * c2
        hint = None
        if a.hint and b.hint:
            hint = (a.hint[0] * b.hint[0], a.hint[1] + b.hint[1] + 1)
        Tq = T // a.M
        out = {e: c for e, c in out.items() if e < a.M * Tq}
        return QSeries(a.M, out, Tq, hint)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k == 0:
            return QSeries(self.M, {0: Fraction(1)}, self.truncation_order,
                           (Fraction(1), 0))
        if k < 0:
            return self.inverse() ** (-k)
        out = None
        base = self
        kk = k
        while kk:
            if kk & 1:
                out = base if out is None else out * base
            kk >>= 1
            if kk:
                base = base * base
        return out

    def shift(self, dexp_num: int) -> "QSeries":
        """Multiply by x^dexp_num (x = q^{1/M})."""
        hint = self.hint if dexp_num >= 0 else None
        return QSeries(self.M, {e + dexp_num: c for e, c in self.coeffs.items()},
                       self.truncation_order + (dexp_num // self.M), hint)

    def shift_q(self, k: int) -> "QSeries":
        """Multiply by q^k."""
        return self.shift(k * self.M)

    def scale_tau(self, ell: int) -> "QSeries":
        """Replace q by q^ell, i.e. build f(ell*tau) from f(tau)."""
        return QSeries(self.M, {e * ell: c for e, c in self.coeffs.items()},
                       self.truncation_order * ell, self.hint)

    def inverse(self) -> "QSeries":
        """Multiplicative inverse; leading monomial is factored out first."""
        if not self.coeffs:
            raise ZeroDivisionError("inverting the zero series")
        v = self.valuation()
        lead = self.coeffs[v]
        # normalized unit part a(x) with a_0 = 1
        n_terms = self._limit() - v
        a = {e - v: c / lead for e, c in self.coeffs.items()}
        b: Dict[int, Fraction] = {0: Fraction(1)}
        for e in range(1, n_terms):
            acc = Fraction(0)
            for e1, c1 in a.items():
                if 0 < e1 <= e:
                    c2 = b.get(e - e1)
                    if c2:
                        acc += c1 * c2
            if acc:
                b[e] = -acc
        out = {e - v: c / lead for e, c in b.items()}
        T = (self._limit() - 2 * v) // self.M
        lim = self.M * T
        out = {e: c for e, c in out.items() if e < lim}
        return QSeries(self.M, out, T, None)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        return self * other.inverse()

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        a, b = self._pair(other)
        T = min(a.truncation_order, b.truncation_order) * a.M
        ka = {e: c for e, c in a.coeffs.items() if e < T}
        kb = {e: c for e, c in b.coeffs.items() if e < T}
        return ka == kb

    def __repr__(self):
        items = sorted(self.coeffs.items())[:6]
        body = " + ".join(f"{c}*q^({e}/{self.M})" for e, c in items)
        return f"QSeries[{body} + ... ; order {self.truncation_order}]"


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------


def eta_unit(order: int) -> QSeries:
    """prod_{n>=1} (1 - q^n) by the pentagonal-number theorem (M = 1)."""
    coeffs = {0: Fraction(1)}
    k = 1
    while True:
        p1 = k * (3 * k - 1) // 2
        p2 = k * (3 * k + 1) // 2
        if p1 >= order and p2 >= order:
            break
        s = Fraction(-1 if k % 2 else 1)
        if p1 < order:
            coeffs[p1] = s
        if p2 < order:
            coeffs[p2] = s
        k += 1
    return QSeries(1, coeffs, order, (Fraction(2), 0))


def eta_unit_by_product(order: int) -> QSeries:
    """Same unit part by direct truncated multiplication (oracle route)."""
    out = QSeries(1, {0: Fraction(1)}, order, (Fraction(1), 0))
    for n in range(1, order):
        out = out * QSeries(1, {0: Fraction(1), n: Fraction(-1)}, order,
                            (Fraction(1), 0))
    out.hint = (Fraction(2), 0)
    return out


def eta_unit_power(r: int, order: int) -> QSeries:
    """prod (1-q^n)^r via the sigma_1 logarithmic-derivative recursion.

    k*p_k = -r * sum_{m<=k} sigma_1(m) p_{k-m}; exact and O(order^2).
    """
    sig = [Fraction(0)] * order
    for m in range(1, order):
        for j in range(m, order, m):
            sig[j] += m
    p = [Fraction(0)] * order
    p[0] = Fraction(1)
    for k in range(1, order):
        acc = Fraction(0)
        for m in range(1, k + 1):
            if p[k - m]:
                acc += sig[m] * p[k - m]
        p[k] = -Fraction(r) * acc / k
    coeffs = {e: c for e, c in enumerate(p) if c}
    A = max((abs(c) for c in p), default=Fraction(1))
    return QSeries(1, coeffs, order, (A, 2))


def eta(order: int) -> QSeries:
    """Dedekind eta = q^{1/24} * prod (1-q^n), as a Puiseux series (M = 24)."""
    u = eta_unit(order).realign(24)
    return u.shift(1)


def theta_series(kind: int, order: int) -> QSeries:
    """Jacobi theta_2/theta_3/theta_4 as series in q^{1/8} / q^{1/2}."""
    if kind == 2:
        coeffs: Dict[int, Fraction] = {}
        n = 0
        while (2 * n + 1) ** 2 < 8 * order:
            coeffs[(2 * n + 1) ** 2] = Fraction(2)
            n += 1
        return QSeries(8, coeffs, order, (Fraction(2), 0))
    if kind in (3, 4):
        coeffs = {0: Fraction(1)}
        n = 1
        while n * n < 2 * order:
            coeffs[n * n] = Fraction(2) if kind == 3 else Fraction(2 * (-1) ** n)
            n += 1
        return QSeries(2, coeffs, order, (Fraction(2), 0))
    raise UnsupportedFunction(f"theta kind {kind}")


def _sigma_series(k: int, order: int) -> QSeries:
    coeffs: Dict[int, Fraction] = {}
    for d in range(1, order):
        step = d ** k
        for n in range(d, order, d):
            coeffs[n] = coeffs.get(n, Fraction(0)) + step
    return QSeries(1, coeffs, order, (Fraction(2), k + 1))


def eisenstein_series(k: int, order: int) -> QSeries:
    """Normalized E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n for k = 2, 4, 6."""
    factor = {2: -24, 4: 240, 6: -504}
    if k not in factor:
        raise UnsupportedFunction(f"E_{k} not in catalog")
    return 1 + factor[k] * _sigma_series(k - 1, order)


def curly_g_rational(a: int, N: int, order: int) -> QSeries:
    """Coefficient part of the congruence Eisenstein sum: the q-expansion of
    sum_{n>0} n (q^{na} + q^{n(N-a)}) / (1 - q^{Nn}), exact (M = 1).

    The full function is  -pi/(2N Im tau) - 2 pi^2 * (this series).
    """
    a = a % N
    coeffs: Dict[int, Fraction] = {}
    for n in range(1, order + 1):
        for base in (n * a, n * (N - a)):
            if base == 0:
                continue
            e = base
            while e < order:
                coeffs[e] = coeffs.get(e, Fraction(0)) + n
                e += N * n
    return QSeries(1, coeffs, order, (Fraction(4), 2))


def twisted_sigma_series(ell: int, order: int) -> QSeries:
    """sum chi_ell(n) sigma_1(n) q^n with chi_ell the Kronecker symbol (ell/.)."""
    from .characters import kronecker
    coeffs: Dict[int, Fraction] = {}
    for n in range(1, order):
        ch = kronecker(ell, n)
        if ch:
            s = sum(d for d in range(1, n + 1) if n % d == 0)
            coeffs[n] = Fraction(ch * s)
    return QSeries(1, coeffs, order, (Fraction(2), 2))


def hauptmodul_series(name: str, order: int) -> QSeries:
    """Eta-quotient hauptmoduls as exact integer q-series."""
    if name == "t2":
        u24 = eta_unit_power(24, order + 2)
        return (-64) * (u24.scale_tau(2) / u24).shift_q(1)
    if name == "t3":
        u12 = eta_unit_power(12, order + 2)
        num = 108 * (u12 * u12.scale_tau(3)).shift_q(1)
        den = (u12 + 27 * u12.scale_tau(3).shift_q(1)) ** 2
        return num / den
    if name == "t4":
        u24 = eta_unit_power(24, order + 2)
        num = 256 * (u24 * u24.scale_tau(2)).shift_q(1)
        den = (u24 + 64 * u24.scale_tau(2).shift_q(1)) ** 2
        return num / den
    if name == "t5":
        u6 = eta_unit_power(6, order + 2)
        return (u6.scale_tau(5) / u6).shift_q(1)
    if name == "t25":
        u1 = eta_unit(order + 2)
        return (u1.scale_tau(25) / u1).shift_q(1)
    if name == "u6":
        u = eta_unit(order + 3)
        a = (u.scale_tau(2) * u.scale_tau(6) ** 5).shift_q(1)
        b = u ** 5 * u.scale_tau(3)
        return (6 * a + b) / (12 * a + b)
    if name == "j":
        e4 = eisenstein_series(4, order + 2)
        u24 = eta_unit_power(24, order + 2)
        return (e4 ** 3 / u24).shift_q(-1)
    if name == "t6":
        e4 = eisenstein_series(4, order + 2)
        u24 = eta_unit_power(24, order + 2)
        return 1728 * (u24 / e4 ** 3).shift_q(1)
    raise UnsupportedFunction(f"hauptmodul {name}")


def build_qseries(function_id: str, order: int, params: Optional[dict] = None) -> QSeries:
    """Catalog dispatcher for every q-expansion the identities need."""
    if order < 1:
        raise ValueError("order must be >= 1")
    params = params or {}
    if function_id == "eta":
        return eta(order)
    if function_id == "eta_unit":
        return eta_unit(order)
    if function_id in ("theta2", "theta3", "theta4"):
        return theta_series(int(function_id[-1]), order)
    if function_id in ("E2", "E4", "E6"):
        return eisenstein_series(int(function_id[1]), order)
    if function_id == "delta":
        return eta_unit_power(24, order).shift_q(1)
    if function_id == "curlyg":
        return curly_g_rational(params["a"], params["N"], order)
    if function_id == "twisted_sigma":
        return twisted_sigma_series(params["ell"], order)
    if function_id in ("t2", "t3", "t4", "t5", "t25", "t6", "u6", "j"):
        return hauptmodul_series(function_id, order)
    raise UnsupportedFunction(function_id)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def eval_qseries(series: QSeries, tau: CMPoint, ctx: PrecisionContext = DEFAULT_CTX,
                 rebuild: Optional[Callable[[int], QSeries]] = None):
    """Evaluate at tau with a certified or doubling-checked truncation error.

    With a growth hint the tail is bounded analytically; otherwise the value
    must agree with the half-order partial sum (or with a rebuilt series at
    twice the order when `rebuild` is given) to within series_tolerance.
    """
    with ctx.workprec():
        x = nome_fractional(tau, series.M, ctx)
        ax = abs(x)
        if ax >= 1:
            raise SlowConvergence("nome magnitude >= 1")
        items = sorted(series.coeffs.items())
        total = mpmath.mpc(0)
        half_total = None
        half_limit = series.M * (series.truncation_order // 2)
        for e, c in items:
            if half_total is None and e >= half_limit:
                half_total = total
            total += (mpf(c.numerator) / c.denominator) * x ** e
        if half_total is None:
            half_total = total
        tol = ctx.tol
        T = series.truncation_order
        if series.hint is not None:
            A, deg = series.hint
            Af = mpf(A.numerator) / A.denominator * series.M  # <= M exponents per q-order
            q = ax ** series.M
            # sum_{n>=T} A (n+1)^deg q^n <= A (T+1)^deg q^T / (1 - q*(1+1/T)^deg)
            growth = q * (1 + mpf(1) / T) ** deg
            tail = None
            if growth < 1:
                tail = Af * (T + 1) ** deg * q ** T / (1 - growth)
                if tail < tol:
                    return +total
            if rebuild is not None:
                if T > 10 ** 6:
                    raise SlowConvergence("required order exceeds 10^6")
                return eval_qseries(rebuild(2 * T), tau, ctx, rebuild)
            raise SlowConvergence(f"certified tail {tail} above tolerance")
        # no hint: truncation-doubling oracle
        if abs(total - half_total) < tol:
            return +total
        if rebuild is not None:
            if T > 10 ** 6:
                raise SlowConvergence("required order exceeds 10^6")
            return eval_qseries(rebuild(2 * T), tau, ctx, rebuild)
        raise SlowConvergence("doubling check failed and no rebuild available")


# ---------------------------------------------------------------------------
# golden-file snapshots
# ---------------------------------------------------------------------------


def write_qseries(path: str, series: QSeries) -> None:
    """One series per file: header `M <int> ORDER <int>`, then exponent/coeff."""
    lines = [f"M {series.M} ORDER {series.truncation_order}"]
    for e, c in sorted(series.coeffs.items()):
        lines.append(f"{e} {c}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_qseries(path: str) -> QSeries:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 4 or header[0] != "M" or header[2] != "ORDER":
            raise ValueError(f"bad golden-file header in {path}")
        M, order = int(header[1]), int(header[3])
        coeffs: Dict[int, Fraction] = {}
        for line in fh:
            if not line.strip():
                continue
            e, c = line.split()
            coeffs[int(e)] = Fraction(c)
    return QSeries(M, coeffs, order)
