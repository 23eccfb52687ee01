"""Extended-precision evaluation of eta, theta, Eisenstein and hauptmodul
functions, lattice Eisenstein sums, and the section-3 identity catalog.

Every evaluator accepts an exact `CMPoint` or a plain mpmath complex number
and returns a value with absolute error below ctx.series_tolerance; all
Fourier-side sums carry explicit geometric tail bounds.

Conventions used throughout:

* G2*(tau) = pi^2/6 - pi/(2 Im tau) - 4 pi^2 sum_{m>=1} m q^m/(1-q^m);
  the almost-holomorphic weight-2 series (Hecke limit).  It is evaluated
  through this expansion, never through the conditionally convergent
  lattice sum.
* G_{2,N}(tau) = N G2*(N tau) - G2*(tau), holomorphic on Gamma_0(N).
* curly-G*_{2,(a;N)}(tau) = -pi/(2 N Im tau)
      - 2 pi^2 sum_{n>0} n (q^{na} + q^{n(N-a)}) / (1 - q^{Nn}).
* G_k(tau) = zeta(k) + (2 pi i)^k/(k-1)! sum m^{k-1} q^m/(1-q^m), k >= 4.
* Shifted lattice sums (Hecke regularized)
      E*[a,b](tau) = reg 1/2 sum_{m,n} ((m+a) tau + n + b)^{-2}
  evaluated by summing the inner n-series in closed form,
  sum_n (w+n)^{-2} = pi^2/sin^2(pi w), and subtracting pi/(2 Im tau); this
  reproduces the Fourier expansions above and extends them to arbitrary
  rational characteristics, which is what twisted and coset lattice
  L-values need.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Sequence, Tuple, Union

import mpmath
from mpmath import mpf, mpc

from .characters import DirichletCharacter, kronecker
from .cmpoint import CMPoint
from .errors import InadmissibleSample, PoleAtCusp, SlowConvergence, UnsupportedFunction
from .precision import PrecisionContext, DEFAULT_CTX

Tau = Union[CMPoint, mpc, complex]


def _tau_value(tau: Tau, ctx: PrecisionContext) -> mpc:
    if isinstance(tau, CMPoint):
        return tau.value(ctx)
    t = mpc(tau)
    if mpmath.im(t) <= 0:
        raise InadmissibleSample("tau must lie in the upper half-plane")
    return t


def _nome(tau: Tau, ctx: PrecisionContext, M: int = 1) -> mpc:
    return mpmath.exp(2j * mpmath.pi * _tau_value(tau, ctx) / M)


def _tau_scale(tau: Tau, k: Fraction) -> Tau:
    k = Fraction(k)
    if isinstance(tau, CMPoint):
        return tau.scale(k)
    return tau * mpf(k.numerator) / k.denominator


def _tau_shift(tau: Tau, r: Fraction) -> Tau:
    r = Fraction(r)
    if isinstance(tau, CMPoint):
        return tau.translate(r)
    return tau + mpf(r.numerator) / r.denominator


def eta_value(tau: Tau, ctx: PrecisionContext = DEFAULT_CTX) -> mpc:
    """Dedekind eta via the pentagonal-number series in x = q^{1/24}.

    Coefficients are +-1 and exponents grow quadratically, so the tail after
    the last kept term is below |x|^E / (1-|x|).
    """
    with ctx.workprec():
        x = _nome(tau, ctx, 24)
        ax = abs(x)
        if ax >= 1:
            raise SlowConvergence("nome magnitude >= 1")
        # relative target: |eta| ~ |x|, so certify the tail against tol*|x|
        tol = ctx.tol * ax
        total = mpc(0)
        k = 0
        while True:
            for kk in ((k,) if k == 0 else (k, -k)):
                e = (6 * kk + 1) ** 2
                total += (-1) ** kk * x ** e
            nxt = (6 * (k + 1) - 1) ** 2   # smaller of the two next exponents
            if 2 * ax ** nxt / (1 - ax) < tol:
                return +total
            k += 1
            if k > 10 ** 6:
                raise SlowConvergence("eta did not certify")


def theta_value(kind: int, tau: Tau, ctx: PrecisionContext = DEFAULT_CTX) -> mpc:
    """Jacobi theta_2/3/4 by direct unary sums with geometric tails."""
    with ctx.workprec():
        tol = ctx.tol
        if kind == 2:
            x = _nome(tau, ctx, 8)
            ax = abs(x)
            total = mpc(0)
            n = 0
            while True:
                total += 2 * x ** ((2 * n + 1) ** 2)
                nxt = (2 * n + 3) ** 2
                if 2 * ax ** nxt / (1 - ax) < tol:
                    return +total
                n += 1
        if kind in (3, 4):
            x = _nome(tau, ctx, 2)
            ax = abs(x)
            total = mpc(1)
            n = 1
            while True:
                c = 2 if kind == 3 else 2 * (-1) ** n
                total += c * x ** (n * n)
                if 2 * ax ** ((n + 1) ** 2) / (1 - ax) < tol:
                    return +total
                n += 1
        raise UnsupportedFunction(f"theta kind {kind}")


def _lambert_sum(q: mpc, power: int, tol, scale_for_tail) -> mpc:
    """sum_{m>=1} m^power q^m / (1 - q^m) with a certified tail.

    Tail estimate: sum_{m>M} m^p |q|^m/(1-|q|) <= t_{M+1}/((1-r)(1-|q|))
    with r = |q|((M+2)/(M+1))^p once r < 1.
    """
    aq = abs(q)
    if aq >= 1:
        raise SlowConvergence("nome magnitude >= 1")
    total = mpc(0)
    m = 1
    while True:
        qm = q ** m
        total += m ** power * qm / (1 - qm)
        r = aq * ((mpf(m) + 2) / (m + 1)) ** power
        if r < 1:
            t_next = (m + 1) ** power * aq ** (m + 1)
            if scale_for_tail * t_next / ((1 - r) * (1 - aq)) < tol:
                return total
        m += 1
        if m > 10 ** 7:
            raise SlowConvergence("Lambert series did not certify")


def g2_star(tau: Tau, ctx: PrecisionContext = DEFAULT_CTX) -> mpc:
    """Almost holomorphic weight-2 Eisenstein value (Hecke limit)."""
    with ctx.workprec():
        t = _tau_value(tau, ctx)
        q = mpmath.exp(2j * mpmath.pi * t)
        pi = mpmath.pi
        s = _lambert_sum(q, 1, ctx.tol / (8 * pi ** 2), 4 * pi ** 2)
        return +(pi ** 2 / 6 - pi / (2 * mpmath.im(t)) - 4 * pi ** 2 * s)


def g_k(k: int, tau: Tau, ctx: PrecisionContext = DEFAULT_CTX) -> mpc:
    """Weight-k Eisenstein value G_k = zeta(k) + (2 pi i)^k/(k-1)! * Lambert sum."""
    if k < 4 or k % 2:
        raise UnsupportedFunction("g_k needs even k >= 4")
    with ctx.workprec():
        q = _nome(tau, ctx)
        pi = mpmath.pi
        zeta_k = {4: pi ** 4 / 90, 6: pi ** 6 / 945}.get(k)
        if zeta_k is None:
            zeta_k = mpmath.zeta(k)
        factor = (2j * pi) ** k / mpmath.factorial(k - 1)
        s = _lambert_sum(q, k - 1, ctx.tol / (2 * abs(factor)), abs(factor))
        return +(zeta_k + factor * s)


def e_k(k: int, tau: Tau, ctx: PrecisionContext = DEFAULT_CTX) -> mpc:
    """Normalized Eisenstein series E_2 (quasimodular), E_4, E_6."""
    with ctx.workprec():
        q = _nome(tau, ctx)
        factor = {2: -24, 4: 240, 6: -504}.get(k)
        if factor is None:
            raise UnsupportedFunction(f"E_{k}")
        s = _lambert_sum(q, k - 1, ctx.tol / (2 * abs(factor)), abs(factor))
        return +(1 + factor * s)


def g2n(N: int, tau: Tau, ctx: PrecisionContext = DEFAULT_CTX) -> mpc:
    """G_{2,N} = N G2*(N tau) - G2*(tau); the 1/Im corrections cancel."""
    return +(N * g2_star(_tau_scale(tau, N), ctx) - g2_star(tau, ctx))


def curly_g2(a: int, N: int, tau: Tau, ctx: PrecisionContext = DEFAULT_CTX) -> mpc:
    """Congruence Eisenstein sum via its Fourier expansion (a not = 0 mod N)."""
    if a % N == 0:
        raise UnsupportedFunction("curly_g2 needs a not divisible by N")
    a = a % N
    with ctx.workprec():
        t = _tau_value(tau, ctx)
        q = mpmath.exp(2j * mpmath.pi * t)
        aq = abs(q)
        if aq >= 1:
            raise SlowConvergence("nome magnitude >= 1")
        pi = mpmath.pi
        tol = ctx.tol / (8 * pi ** 2)
        total = mpc(0)
        n = 1
        amin = min(a, N - a)
        while True:
            qn = q ** n
            total += n * (q ** (n * a) + q ** (n * (N - a))) / (1 - qn ** N)
            r = aq ** amin * (mpf(n) + 2) / (n + 1)
            if r < 1:
                bound = 4 * (n + 1) * aq ** ((n + 1) * amin) / ((1 - r) * (1 - aq))
                if bound < tol:
                    break
            n += 1
        return +(-pi / (2 * N * mpmath.im(t)) - 2 * pi ** 2 * total)


def g2_twist(ell: int, tau: Tau, ctx: PrecisionContext = DEFAULT_CTX) -> mpc:
    """(G_2 tensor chi_ell)(tau) = -4 pi^2 sum chi_ell(n) sigma_1(n) q^n.

    The twist by a nontrivial character kills both the constant term and the
    non-holomorphic correction, leaving a plain cusp-like q-series.
    """
    with ctx.workprec():
        q = _nome(tau, ctx)
        aq = abs(q)
        pi = mpmath.pi
        tol = ctx.tol / (8 * pi ** 2)
        total = mpc(0)
        qn = mpc(1)
        n = 1
        while True:
            qn *= q
            ch = kronecker(ell, n)
            if ch:
                sig = sum(d for d in range(1, n + 1) if n % d == 0)
                total += ch * sig * qn
            r = aq * ((mpf(n) + 2) / (n + 1)) ** 2
            if r < 1:
                bound = 2 * (n + 1) ** 2 * aq ** (n + 1) / (1 - r)
                if bound < tol:
                    return +(-4 * pi ** 2 * total)
            n += 1


def dedekind_delta(tau: Tau, ctx: PrecisionContext = DEFAULT_CTX) -> mpc:
    return eta_value(tau, ctx) ** 24


def j_invariant(tau: Tau, ctx: PrecisionContext = DEFAULT_CTX) -> mpc:
    """j = E4^3 / Delta with Delta = eta^24.

    This form is free of the catastrophic cancellation that
    1728 E4^3/(E4^3 - E6^2) suffers at large Im(tau); the latter is kept as
    `j_invariant_e6` for cross-checks.  Since |j| ~ 1/|q| near the cusp, the
    working precision is raised by ~2 pi Im(tau)/log 2 bits so the result is
    accurate in the absolute sense the table comparisons need.
    """
    if isinstance(tau, CMPoint):
        tau, _ = _reduce_if_cm(tau)
    with ctx.workprec():
        y = float(mpmath.im(_tau_value(tau, ctx)))
    boost = int(2 * 3.1416 * y / 0.6931) + 64
    bctx = ctx.scaled(boost)
    with bctx.workprec():
        delta = dedekind_delta(tau, bctx)
        if delta == 0:
            raise PoleAtCusp("discriminant vanished")
        return +(e_k(4, tau, bctx) ** 3 / delta)


def j_invariant_e6(tau: Tau, ctx: PrecisionContext = DEFAULT_CTX) -> mpc:
    with ctx.workprec():
        e4 = e_k(4, tau, ctx) ** 3
        den = e4 - e_k(6, tau, ctx) ** 2
        if den == 0:
            raise PoleAtCusp("j denominator vanished")
        return +(1728 * e4 / den)


def _reduce_if_cm(tau: CMPoint) -> Tuple[CMPoint, tuple]:
    from .cmpoint import reduce_sl2z
    return reduce_sl2z(tau)


def t5_value(tau: Tau, ctx: PrecisionContext = DEFAULT_CTX) -> mpc:
    return +(eta_value(_tau_scale(tau, 5), ctx) ** 6 / eta_value(tau, ctx) ** 6)


def t25_value(tau: Tau, ctx: PrecisionContext = DEFAULT_CTX) -> mpc:
    return +(eta_value(_tau_scale(tau, 25), ctx) / eta_value(tau, ctx))


def u6_value(tau: Tau, ctx: PrecisionContext = DEFAULT_CTX) -> mpc:
    """Hauptmodul of level 6 from its defining eta-quotient combination."""
    with ctx.workprec():
        h1 = eta_value(tau, ctx)
        h2 = eta_value(_tau_scale(tau, 2), ctx)
        h3 = eta_value(_tau_scale(tau, 3), ctx)
        h6 = eta_value(_tau_scale(tau, 6), ctx)
        a = h2 * h6 ** 5
        b = h1 ** 5 * h3
        return +((6 * a + b) / (12 * a + b))


def hauptmodul(d: int, tau: Tau, ctx: PrecisionContext = DEFAULT_CTX) -> mpc:
    """t_d for the four Ramanujan bases: d in {2, 3, 4, 6} (t_6 = 1728/j)."""
    with ctx.workprec():
        if d == 2:
            r = eta_value(_tau_scale(tau, 2), ctx) / eta_value(tau, ctx)
            return +(-64 * r ** 24)
        if d == 3:
            a = eta_value(tau, ctx) ** 12
            b = eta_value(_tau_scale(tau, 3), ctx) ** 12
            return +(108 * a * b / (a + 27 * b) ** 2)
        if d == 4:
            a = eta_value(tau, ctx) ** 24
            b = eta_value(_tau_scale(tau, 2), ctx) ** 24
            return +(256 * a * b / (a + 64 * b) ** 2)
        if d == 6:
            return +(1728 / j_invariant(tau, ctx))
    raise UnsupportedFunction(f"hauptmodul d={d}")


def twist_coeffs(coeffs: Sequence[int], chi: DirichletCharacter) -> List[int]:
    """n-th output is chi(n) * a_n; input indexed from n = 1."""
    return [chi(n + 1) * c for n, c in enumerate(coeffs)]


# ---------------------------------------------------------------------------
# lattice Eisenstein sums
# ---------------------------------------------------------------------------


def shifted_g2_normalized(alpha: Fraction, beta: Fraction, tau: Tau,
                          ctx: PrecisionContext = DEFAULT_CTX) -> mpc:
    """Hecke-regularized E*[alpha, beta](tau), rational characteristics.

    reg 1/2 sum_{m,n} ((m+alpha) tau + n + beta)^{-2}, the pair
    (m, n) = (-alpha, -beta) being excluded when integral.  Computed by the
    closed inner sum pi^2/sin^2 and the shift-independent Hecke correction
    -pi/(2 Im tau); reproduces G2* at (0,0) and the congruence sums at
    (a/N, 0).
    """
    alpha, beta = Fraction(alpha), Fraction(beta)
    with ctx.workprec():
        t = _tau_value(tau, ctx)
        y = mpmath.im(t)
        pi = mpmath.pi
        af = mpf(alpha.numerator) / alpha.denominator
        bf = mpf(beta.numerator) / beta.denominator
        total = mpc(0)
        # m = -alpha term (only when alpha is an integer)
        if alpha.denominator == 1:
            if beta.denominator == 1:
                total += pi ** 2 / 3
            else:
                total += pi ** 2 / mpmath.sin(pi * bf) ** 2
        # remaining rows, grouped +-; terms decay like exp(-2 pi |m+alpha| y)
        tol = ctx.tol
        m = 0
        damp = 1 - mpmath.exp(-2 * pi * y)
        while True:
            for mm in {m, -m} if m else {0}:
                A = mm + af
                if A == 0:
                    continue  # handled by the special row above
                w = A * t + bf
                total += pi ** 2 / mpmath.sin(pi * w) ** 2
            if m + 1 - abs(af) > 0:
                gap = mpmath.exp(-2 * pi * y * (m + 1 - abs(af)))
                if 8 * pi ** 2 * gap / damp ** 3 < tol:
                    break
            m += 1
            if m > 10 ** 6:
                raise SlowConvergence("shifted lattice sum did not certify")
        return +((total / 2) - pi / (2 * y))


def lattice_g2(omega1, omega2, alpha=Fraction(0), beta=Fraction(0),
               ctx: PrecisionContext = DEFAULT_CTX) -> mpc:
    """reg 1/2 sum ((m+alpha) w1 + (n+beta) w2)^{-2} over the coset of Z w1 + Z w2.

    Basis entries may be exact surds, CM points or complex numbers; the pair
    is reordered so the ratio lies in the upper half-plane.
    """
    w1 = _as_complex(omega1, ctx)
    w2 = _as_complex(omega2, ctx)
    with ctx.workprec():
        if mpmath.im(w1 / w2) < 0:
            w1, w2 = w2, w1
            alpha, beta = beta, alpha
        tau = w1 / w2
        val = shifted_g2_normalized(Fraction(alpha), Fraction(beta), tau, ctx)
        return +(val / w2 ** 2)


def lattice_gk(k: int, omega1, omega2, alpha=Fraction(0), beta=Fraction(0),
               ctx: PrecisionContext = DEFAULT_CTX) -> mpc:
    """1/2 sum ((m+alpha) w1 + (n+beta) w2)^{-k} for even k >= 4 (absolutely
    convergent; inner sums by the Lipschitz formula)."""
    if k < 4 or k % 2:
        raise UnsupportedFunction("lattice_gk needs even k >= 4")
    w1 = _as_complex(omega1, ctx)
    w2 = _as_complex(omega2, ctx)
    alpha, beta = Fraction(alpha), Fraction(beta)
    with ctx.workprec():
        if mpmath.im(w1 / w2) < 0:
            w1, w2 = w2, w1
            alpha, beta = beta, alpha
        t = w1 / w2
        y = mpmath.im(t)
        pi = mpmath.pi
        af = mpf(alpha.numerator) / alpha.denominator
        bf = mpf(beta.numerator) / beta.denominator
        lip = (-2j * pi) ** k / mpmath.factorial(k - 1)
        tol = ctx.tol * abs(w2) ** k
        total = mpc(0)
        if alpha.denominator == 1:
            if beta.denominator == 1:
                total += 2 * {4: pi ** 4 / 90, 6: pi ** 6 / 945}.get(k, mpmath.zeta(k))
            else:
                frac = bf - mpmath.floor(bf)
                total += mpmath.zeta(k, frac) + (-1) ** k * mpmath.zeta(k, 1 - frac)
        m = 0
        while True:
            for mm in {m, -m} if m else {0}:
                A = mm + af
                if A == 0:
                    continue
                w = A * t + bf
                # sum_n (w+n)^{-k} via Lipschitz on the correct side
                if mpmath.im(w) > 0:
                    inner = lip * _lipschitz_tail(k, w, tol / 4)
                else:
                    # sum_n (w+n)^{-k} = conj(sum_n (conj(w)+n)^{-k})
                    inner = mpmath.conj(lip * _lipschitz_tail(k, mpmath.conj(w), tol / 4))
                total += inner
            decay = mpmath.exp(-2 * pi * y * (m + 1 - abs(af)))
            if m + 1 - abs(af) > 0 and 8 * abs(lip) * decay / (1 - mpmath.exp(-2 * pi * y)) < tol:
                break
            m += 1
            if m > 10 ** 6:
                raise SlowConvergence("lattice_gk did not certify")
        return +(total / (2 * w2 ** k))


def _lipschitz_tail(k: int, w, tol):
    """sum_{r>=1} r^{k-1} e^{2 pi i r w} for Im w > 0, certified tail."""
    x = mpmath.exp(2j * mpmath.pi * w)
    ax = abs(x)
    total = mpc(0)
    xr = mpc(1)
    r = 1
    while True:
        xr *= x
        total += r ** (k - 1) * xr
        ratio = ax * ((mpf(r) + 1) / r) ** (k - 1)
        if ratio < 1 and (r + 1) ** (k - 1) * ax ** (r + 1) / (1 - ratio) < tol:
            return total
        r += 1
        if r > 10 ** 7:
            raise SlowConvergence("Lipschitz sum did not certify")


def _as_complex(w, ctx: PrecisionContext) -> mpc:
    from .surd import Surd, QuadraticSurd
    if isinstance(w, CMPoint):
        return w.value(ctx)
    if isinstance(w, (Surd, QuadraticSurd)):
        return w.embed(ctx)
    return mpc(w)
