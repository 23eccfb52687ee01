"""Catalog of Eisenstein / theta / hauptmodul identities (section-3 layer).

Each identity is a callable tau -> residual; `verify_eisenstein_identity`
evaluates one over a sample set and reports the maximum deviation.  All
functional equations are checked numerically at generic points of the upper
half-plane, with every side evaluated through an independent route where one
exists (q-expansions vs. closed sums vs. hypergeometric series).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Dict, List, Sequence, Union

import mpmath
from mpmath import mpf, mpc

from . import modforms as mf
from .cmpoint import CMPoint
from .errors import InadmissibleSample, UnsupportedFunction
from .hypergeom import pfq, cm_family_datum, datum_3f2
from .precision import PrecisionContext, DEFAULT_CTX

Tau = Union[CMPoint, mpc, complex]


def _val(tau: Tau, ctx) -> mpc:
    return mf._tau_value(tau, ctx)


def _w_ell(tau: Tau, ell: int):
    """Fricke image -1/(ell*tau)."""
    if isinstance(tau, CMPoint):
        return tau.fricke(ell)
    return -1 / (ell * tau)


def _scale(tau: Tau, r) -> Tau:
    return mf._tau_scale(tau, Fraction(r))


def _family_value(d: int, z, ctx):
    return pfq(datum_3f2((Fraction(1, 2), Fraction(1, d), Fraction(d - 1, d)),
                         (1, 1), z), ctx)


def _maxdiff(vals) -> mpf:
    out = mpf(0)
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            out = max(out, abs(vals[i] - vals[j]))
    return out


# -- individual identities ---------------------------------------------------


def _prop33_theta3(tau, ctx):
    pi = mpmath.pi
    lhs = pi ** 2 / 2 * mf.theta_value(3, _scale(tau, 2), ctx) ** 4
    return abs(lhs - mf.g2n(4, tau, ctx))


def _prop33_theta4(tau, ctx):
    pi = mpmath.pi
    th = pi ** 2 / 2 * mf.theta_value(4, _scale(tau, 2), ctx) ** 4
    a = 2 * mf.g2n(4, tau, ctx) - 3 * mf.g2n(2, tau, ctx)
    b = 4 * mf.g2n(2, _scale(tau, 2), ctx) - mf.g2n(2, tau, ctx)
    return _maxdiff([th, a, b])


def _prop33_half_shift(tau, ctx):
    rhs = mf.g2n(4, tau, ctx) - 2 * mf.g2n(2, tau, ctx)
    res = mpf(0)
    for sign in (1, -1):
        shifted = mf._tau_shift(tau, Fraction(sign, 2))
        res = max(res, abs(mf.g2n(2, shifted, ctx) - rhs))
    return res


def _prop34(tau, ctx):
    g12 = mf.curly_g2(1, 2, tau, ctx)
    g13 = mf.curly_g2(1, 3, tau, ctx)
    g14 = mf.curly_g2(1, 4, tau, ctx)
    d2 = mf.g2_star(tau, ctx) - mf.g2_star(_scale(tau, 2), ctx)
    d3 = mf.g2_star(tau, ctx) - mf.g2_star(_scale(tau, 3), ctx)
    return max(_maxdiff([g12, 2 * g14, d2]), abs(g13 - d3 / 2))


def _fricke_weight2(f: Callable, tau, ell: int, ctx):
    """(f | W_ell)(tau) for weight 2: ell (ell tau)^{-2} f(-1/(ell tau))."""
    t = _val(tau, ctx)
    return ell * (ell * t) ** -2 * f(_w_ell(tau, ell), ctx)


def _prop36(tau, ctx, pairs=((2, 1), (2, 2), (3, 3), (4, 2), (2, 3))):
    res = mpf(0)
    for N, ell in pairs:
        lhs = _fricke_weight2(lambda u, c: mf.g2_star(_scale(u, N), c), tau, ell, ctx)
        val = mpf(ell) / (N * N) * mf.g2_star(_scale(tau, Fraction(ell, N)), ctx)
        res = max(res, abs(lhs - val))
        lhs2 = _fricke_weight2(lambda u, c: mf.g2n(N, u, c), tau, ell, ctx)
        val2 = -mpf(ell) / N * mf.g2n(N, _scale(tau, Fraction(ell, N)), ctx)
        res = max(res, abs(lhs2 - val2))
    return res


def _prop37(tau, ctx, ells=(1, 2, 3)):
    res = mpf(0)
    for ell in ells:
        le = mpf(ell)
        # curly (1;2)
        lhs = _fricke_weight2(lambda u, c: mf.curly_g2(1, 2, u, c), tau, ell, ctx)
        a = (-le / 4 * mf.curly_g2(1, 2, _scale(tau, Fraction(ell, 2)), ctx)
             + 3 * le / 4 * mf.g2_star(_scale(tau, ell), ctx))
        b = (-le * mf.curly_g2(1, 2, _scale(tau, Fraction(ell, 2)), ctx)
             + 3 * le / 4 * mf.g2_star(_scale(tau, Fraction(ell, 2)), ctx))
        res = max(res, _maxdiff([lhs, a, b]))
        # curly (1;3)
        lhs = _fricke_weight2(lambda u, c: mf.curly_g2(1, 3, u, c), tau, ell, ctx)
        a = (-le / 9 * mf.curly_g2(1, 3, _scale(tau, Fraction(ell, 3)), ctx)
             + 4 * le / 9 * mf.g2_star(_scale(tau, ell), ctx))
        b = (-le * mf.curly_g2(1, 3, _scale(tau, Fraction(ell, 3)), ctx)
             + 4 * le / 9 * mf.g2_star(_scale(tau, Fraction(ell, 3)), ctx))
        res = max(res, _maxdiff([lhs, a, b]))
        # curly (1;4)
        lhs = _fricke_weight2(lambda u, c: mf.curly_g2(1, 4, u, c), tau, ell, ctx)
        a = (-le / 4 * mf.curly_g2(1, 4, _scale(tau, Fraction(ell, 2)), ctx)
             + 3 * le / 8 * mf.g2_star(_scale(tau, ell), ctx))
        b = (-le * mf.curly_g2(1, 4, _scale(tau, Fraction(ell, 2)), ctx)
             + 3 * le / 8 * mf.g2_star(_scale(tau, Fraction(ell, 2)), ctx))
        res = max(res, _maxdiff([lhs, a, b]))
    return res


def _prop38_ratios(tau, ctx):
    u = mf.u6_value(tau, ctx)
    r22 = mf.g2n(2, _scale(tau, 3), ctx) / mf.g2n(2, tau, ctx)
    lhs22 = (-2 * u ** 2 - 2 * u + 1) / (6 * u ** 2 - 6 * u - 3)
    r23 = mf.g2n(3, _scale(tau, 2), ctx) / mf.g2n(3, tau, ctx)
    return max(abs(r22 - lhs22), abs(r23 - u ** 2))


def u6_modular_polynomial(x, y):
    return (16 * x ** 3 * y ** 3 - 12 * (x ** 3 * y + x * y ** 3)
            + 12 * x ** 2 * y ** 2 - 5 * (x ** 3 - y ** 3)
            - 3 * (x ** 2 * y - x * y ** 2) - 6 * (x ** 2 + y ** 2)
            + 6 * x * y + 2)


def _u6_modular_equation(tau, ctx):
    x = mf.u6_value(tau, ctx)
    y = mf.u6_value(_scale(tau, 3), ctx)
    return abs(u6_modular_polynomial(x, y))


def _u6_t3_relation(tau, ctx):
    u = mf.u6_value(tau, ctx)
    t = (mf.eta_value(_scale(tau, 3), ctx) / mf.eta_value(tau, ctx)) ** 12
    rhs = -(4 * u ** 3 - 3 * u - 1) / (27 * (4 * u ** 3 - 3 * u + 1))
    return abs(t - rhs)


def _j3_from_t(tau, ctx):
    # |j(3 tau)| ~ exp(6 pi Im tau); work at matching precision so the
    # residual is meaningful in absolute terms
    y = float(mpmath.im(_val(tau, ctx)))
    bctx = ctx.scaled(int(6 * 3.1416 * y / 0.6931) + 64)
    t = (mf.eta_value(_scale(tau, 3), bctx) / mf.eta_value(tau, bctx)) ** 12
    j3 = mf.j_invariant(_scale(tau, 3), bctx)
    rhs = (729 * t ** 4 + 756 * t ** 3 + 270 * t ** 2 + 36 * t + 1) / t ** 3
    return abs(j3 - rhs)


def _gamma03_z(tau, ctx):
    """The Gamma_0(3) hauptmodul z = 27 t/(1+27 t), t = (eta(3 tau)/eta(tau))^12."""
    t = (mf.eta_value(_scale(tau, 3), ctx) / mf.eta_value(tau, ctx)) ** 12
    return 27 * t / (1 + 27 * t)


def _covering_t3(tau, ctx):
    z = _gamma03_z(tau, ctx)
    return abs(mf.hauptmodul(3, tau, ctx) - 4 * z * (1 - z))


def _covering_j_z(tau, ctx):
    z = _gamma03_z(tau, ctx)
    lhs = 1728 / mf.j_invariant(tau, ctx)
    return abs(lhs - 64 * z * (1 - z) ** 3 / (1 + 8 * z) ** 3)


def _covering_j_t2(tau, ctx):
    t2 = mf.hauptmodul(2, tau, ctx)
    lhs = 1728 / mf.j_invariant(tau, ctx)
    return abs(lhs + 27 * t2 / (1 - 4 * t2) ** 3)


def _covering_t4_t2(tau, ctx):
    t2 = mf.hauptmodul(2, tau, ctx)
    return abs(mf.hauptmodul(4, tau, ctx) + 4 * t2 / (t2 - 1) ** 2)


def _table2_row(d: int):
    def check(tau, ctx):
        pi = mpmath.pi
        td = mf.hauptmodul(d, tau, ctx)
        if abs(td) >= 1:
            raise InadmissibleSample(f"t_{d}(tau) outside unit disk at {tau}")
        fval = _family_value(d, td, ctx)
        if d == 2:
            rhs = mf.theta_value(4, _scale(tau, 2), ctx) ** 4
        elif d == 3:
            rhs = 3 / pi ** 2 * mf.g2n(3, tau, ctx)
        elif d == 4:
            rhs = 6 / pi ** 2 * mf.g2n(2, tau, ctx)
        else:
            rhs = mpmath.sqrt(mf.e_k(4, tau, ctx))
        return abs(fval - rhs)
    return check


def _level5_y6(tau, ctx):
    x1 = mf.t5_value(tau, ctx)
    x5 = mf.t5_value(_scale(tau, 5), ctx)
    y = mf.t25_value(tau, ctx)
    return abs(y ** 6 - x1 * x5)


def _level5_x_from_y(tau, ctx):
    x = mf.t5_value(tau, ctx)
    y = mf.t25_value(tau, ctx)
    return abs(x - (25 * y ** 5 + 25 * y ** 4 + 15 * y ** 3 + 5 * y ** 2 + y))


def _level5_xj(tau, ctx):
    x = mf.t5_value(tau, ctx)
    j = mf.j_invariant(tau, ctx)
    rhs = (30517578125 * x ** 6 + 7324218750 * x ** 5 + 615234375 * x ** 4
           + 20312500 * x ** 3 + 196875 * x ** 2 + 750 * x + 1)
    return abs(x * j - rhs)


def _level5_j5_from_y(tau, ctx):
    im = float(mpmath.im(_val(tau, ctx)))
    ctx = ctx.scaled(int(10 * 3.1416 * im / 0.6931) + 64)
    y = mf.t25_value(tau, ctx)
    j5 = mf.j_invariant(_scale(tau, 5), ctx)
    num = ((5 * y ** 2 + 5 * y + 1) ** 3
           * (25 * y ** 4 + 25 * y ** 3 + 20 * y ** 2 + 5 * y + 1) ** 3
           * (25 * y ** 4 + 5 * y ** 2 + 1) ** 3)
    den = y ** 5 * (25 * y ** 4 + 25 * y ** 3 + 15 * y ** 2 + 5 * y + 1) ** 5
    return abs(j5 - num / den)


def _level5_g2chi5(tau, ctx):
    y = mf.t25_value(tau, ctx)
    lhs = mf.g2_twist(5, tau, ctx)
    den = 125 * y ** 4 + 100 * y ** 3 + 45 * y ** 2 + 10 * y + 1
    rhs = 6 * y * (5 * y ** 2 - 1) / den * mf.g2n(5, tau, ctx)
    return abs(lhs - rhs)


def _level5_g25_scale(tau, ctx):
    y = mf.t25_value(tau, ctx)
    den = 125 * y ** 4 + 100 * y ** 3 + 45 * y ** 2 + 10 * y + 1
    num = 5 * y ** 4 + 10 * y ** 3 + 9 * y ** 2 + 4 * y + 1
    lhs = mf.g2n(5, _scale(tau, 5), ctx)
    return abs(lhs - num / den * mf.g2n(5, tau, ctx))


def _level5_g25_square(tau, ctx):
    x = mf.t5_value(tau, ctx)
    lhs = mf.g2n(5, tau, ctx) ** 2
    rhs = 40 * (125 * x ** 2 + 22 * x + 1) / (5 * x ** 2 + 10 * x + 1) \
        * mf.g_k(4, _scale(tau, 5), ctx)
    return abs(lhs - rhs)


def _g2star_modularity(tau, ctx):
    t = _val(tau, ctx)
    return abs(mf.g2_star(_w_ell(tau, 1), ctx) - t ** 2 * mf.g2_star(tau, ctx))


def _gk_modularity(k):
    def check(tau, ctx):
        t = _val(tau, ctx)
        return abs(mf.g_k(k, _w_ell(tau, 1), ctx) - t ** k * mf.g_k(k, tau, ctx))
    return check


IDENTITY_CATALOG: Dict[str, Callable] = {
    "prop33_theta3": _prop33_theta3,
    "prop33_theta4": _prop33_theta4,
    "prop33_half_shift": _prop33_half_shift,
    "prop34_decompositions": _prop34,
    "prop36_fricke": _prop36,
    "prop37_curly_fricke": _prop37,
    "prop38_ratios": _prop38_ratios,
    "u6_modular_equation": _u6_modular_equation,
    "u6_t3_relation": _u6_t3_relation,
    "j3_from_t3": _j3_from_t,
    "covering_t3": _covering_t3,
    "covering_j_z": _covering_j_z,
    "covering_j_t2": _covering_j_t2,
    "covering_t4_t2": _covering_t4_t2,
    "table2_d2": _table2_row(2),
    "table2_d3": _table2_row(3),
    "table2_d4": _table2_row(4),
    "table2_d6": _table2_row(6),
    "level5_y6": _level5_y6,
    "level5_x_from_y": _level5_x_from_y,
    "level5_xj": _level5_xj,
    "level5_j5_from_y": _level5_j5_from_y,
    "level5_g2chi5": _level5_g2chi5,
    "level5_g25_scale": _level5_g25_scale,
    "level5_g25_square": _level5_g25_square,
    "g2star_modularity": _g2star_modularity,
    "g4_modularity": _gk_modularity(4),
    "g6_modularity": _gk_modularity(6),
}

# identities needing larger Im(tau) so hauptmodul arguments stay in the disk
MIN_IM = {
    "table2_d2": 0.75, "table2_d3": 0.85, "table2_d4": 0.85, "table2_d6": 1.15,
}

IDENTITY_IDS = tuple(IDENTITY_CATALOG)


def identity_samples(ident: str, count: int = 5, seed: int = 20250809) -> List[mpc]:
    """Deterministic generic sample points with Im large enough to certify."""
    import random as _random
    rng = _random.Random(f"{ident}:{seed}")
    lo = MIN_IM.get(ident, 0.55)
    out = []
    for _ in range(count):
        re = rng.uniform(-0.45, 0.45)
        im = rng.uniform(lo, lo + 0.8)
        out.append(mpc(re, im))
    return out


def verify_eisenstein_identity(ident: str, taus=None,
                               ctx: PrecisionContext = DEFAULT_CTX,
                               samples: int = 5) -> mpf:
    """Max absolute residual of the identity over the sample set."""
    if ident not in IDENTITY_CATALOG:
        raise UnsupportedFunction(f"unknown identity {ident!r}")
    fn = IDENTITY_CATALOG[ident]
    if taus is None:
        taus = identity_samples(ident, samples)
    elif isinstance(taus, (CMPoint, mpc, complex)):
        taus = [taus]
    with ctx.workprec():
        res = mpf(0)
        for tau in taus:
            t = _val(tau, ctx)
            if mpmath.im(t) < mpf("0.2"):
                raise InadmissibleSample("Im(tau) below certified threshold 0.2")
            res = max(res, fn(tau, ctx))
        return +res
