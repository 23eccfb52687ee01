"""CM eigenforms as signed, scaled lattice theta sums.

A form fixture is a list of atoms; each atom describes the sum

    scale * sum_{(m,n)} (offset + m g1 + n g2)^power * q^{N(mu)/norm_div}

over integer pairs, with the generators given as exact surds, so that every
Fourier coefficient is assembled in exact arithmetic (the imaginary parts
cancel pair-wise and the result is checked to be an integer).  Twisted forms
(label tensor chi_ell) reuse the base form's coefficients.

Fixtures live in fixtures/forms.json; they also carry the CM field
discriminant (inert-prime rule and nebentypus), the level, and the
Eisenstein-atom decomposition used by the L-value route.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Dict, List, Optional, Tuple

from .characters import kronecker
from .errors import BadReduction
from .finitefield import FiniteFieldDatum, hp, K_D, _DENOM_PRIMES
from .surd import Surd

FIXTURE_ENV = "CMLV_FIXTURE_DIR"


def fixture_dir() -> str:
    override = os.environ.get(FIXTURE_ENV)
    if override:
        return override
    return os.path.join(os.path.dirname(__file__), "fixtures")


def _load_json(name: str):
    with open(os.path.join(fixture_dir(), name)) as fh:
        return json.load(fh)


def decode_surd(spec) -> Surd:
    """[[coeff, radicand], ...] -> Surd; plain strings/ints mean rationals."""
    if isinstance(spec, (str, int)):
        return Surd.rational(Fraction(spec))
    out = Surd()
    for coeff, rad in spec:
        out = out + Surd.sqrt(int(rad), Fraction(coeff))
    return out


@dataclass(frozen=True)
class LatticeAtom:
    """mu(m, n) = (off1 + m) g1 + (off2 + n) g2, offsets rational."""
    scale: Fraction
    g1: Surd
    g2: Surd
    off1: Fraction = Fraction(0)
    off2: Fraction = Fraction(0)
    norm_div: int = 1

    @property
    def offset(self) -> Surd:
        return self.off1 * self.g1 + self.off2 * self.g2

    @staticmethod
    def from_json(obj) -> "LatticeAtom":
        return LatticeAtom(
            scale=Fraction(obj["scale"]),
            g1=decode_surd(obj["g1"]),
            g2=decode_surd(obj["g2"]),
            off1=Fraction(obj.get("off1", 0)),
            off2=Fraction(obj.get("off2", 0)),
            norm_div=int(obj.get("norm_div", 1)),
        )


@dataclass(frozen=True)
class CMFormId:
    label: str
    level: int
    weight: int
    cm_disc: int                      # negative fundamental discriminant
    atoms: Tuple[LatticeAtom, ...]
    eisenstein: tuple                 # raw decomposition spec (lvalues decodes)
    twist_of: Optional[str] = None
    twist_ell: Optional[int] = None

    @property
    def power(self) -> int:
        return self.weight - 1


@lru_cache(maxsize=1)
def form_registry() -> Dict[str, CMFormId]:
    data = _load_json("forms.json")
    out = {}
    for obj in data["forms"]:
        out[obj["label"]] = CMFormId(
            label=obj["label"],
            level=int(obj["level"]),
            weight=int(obj["weight"]),
            cm_disc=int(obj["cm_disc"]),
            atoms=tuple(LatticeAtom.from_json(a) for a in obj.get("atoms", [])),
            eisenstein=tuple(tuple(e.items()) for e in obj.get("eisenstein", [])),
            twist_of=obj.get("twist_of"),
            twist_ell=obj.get("twist_ell"),
        )
    return out


def get_form(label: str) -> CMFormId:
    reg = form_registry()
    if label not in reg:
        raise KeyError(f"no fixture for form {label!r}")
    return reg[label]


def eisenstein_spec(form: CMFormId) -> List[dict]:
    return [dict(e) for e in form.eisenstein]


# ---------------------------------------------------------------------------
# exact coefficient enumeration
# ---------------------------------------------------------------------------


def _atom_coefficients(atom: LatticeAtom, power: int, n_max: int) -> Dict[int, Surd]:
    """Exact contribution of one atom to the coefficients of q^1..q^{n_max}.

    Returns Surd-valued sums; the surd parts cancel only after all of a
    form's atoms are combined, and the caller checks integrality.
    """
    bound = Fraction(n_max * atom.norm_div)
    g1c, g2c, offc = atom.g1.conjugate(), atom.g2.conjugate(), atom.offset.conjugate()
    A = (atom.g1 * g1c).as_rational()
    C = (atom.g2 * g2c).as_rational()
    B = (atom.g1 * g2c + atom.g2 * g1c).as_rational()
    D = (atom.offset * g1c + atom.g1 * offc).as_rational()
    E = (atom.offset * g2c + atom.g2 * offc).as_rational()
    F = (atom.offset * offc).as_rational()
    disc = 4 * A * C - B * B
    if disc <= 0 or A <= 0:
        raise ValueError("atom norm form is not positive definite")
    out: Dict[int, Surd] = {}
    # float ellipse bounds with margin; membership confirmed exactly below
    bn = 4 * A * E - 2 * B * D
    cn = 4 * A * F - D * D - 4 * A * bound
    disc_n = bn * bn - 4 * disc * cn
    if disc_n < 0:
        return out
    span = float(disc_n) ** 0.5
    n_lo = int((float(-bn) - span) / float(2 * disc)) - 2
    n_hi = int((float(-bn) + span) / float(2 * disc)) + 2
    for n in range(n_lo, n_hi + 1):
        bm = B * n + D
        cm = C * n * n + E * n + F - bound
        disc_m = bm * bm - 4 * A * cm
        if disc_m < 0:
            continue
        root = float(disc_m) ** 0.5
        m_lo = int((float(-bm) - root) / float(2 * A)) - 2
        m_hi = int((float(-bm) + root) / float(2 * A)) + 2
        mu_base = atom.offset + n * atom.g2
        for m in range(m_lo, m_hi + 1):
            norm = A * m * m + B * m * n + C * n * n + D * m + E * n + F
            if norm <= 0 or norm > bound:
                continue
            expo = norm / atom.norm_div
            if expo.denominator != 1:
                continue
            e = int(expo)
            mu = mu_base + m * atom.g1
            contrib = atom.scale * (mu ** power)
            out[e] = out.get(e, Surd()) + contrib
    return out


class _CoefficientCache:
    def __init__(self):
        self.data: Dict[str, List[int]] = {}

    def series(self, label: str, n_max: int) -> List[int]:
        form = get_form(label)
        if form.twist_of is not None:
            base = self.series(form.twist_of, n_max)
            return [kronecker(form.twist_ell, n + 1) * base[n] for n in range(n_max)]
        cached = self.data.get(label)
        if cached is not None and len(cached) >= n_max:
            return cached[:n_max]
        total: Dict[int, Surd] = {}
        for atom in form.atoms:
            part = _atom_coefficients(atom, form.power, n_max)
            for e, c in part.items():
                total[e] = total.get(e, Surd()) + c
        coeffs = []
        for n in range(1, n_max + 1):
            c = total.get(n, Surd())
            if not c.is_rational():
                raise ArithmeticError(
                    f"{label}: a_{n} = {c} has surviving surd parts; fixture wrong")
            cr = c.as_rational()
            if cr.denominator != 1:
                raise ArithmeticError(
                    f"{label}: a_{n} = {cr} is not an integer; fixture wrong")
            coeffs.append(int(cr))
        self.data[label] = coeffs
        return coeffs


_CACHE = _CoefficientCache()


def lattice_an(form, n: int) -> int:
    """n-th Fourier coefficient by exact lattice/coset enumeration."""
    label = form if isinstance(form, str) else form.label
    if n < 1:
        raise ValueError("n must be >= 1")
    return _CACHE.series(label, n)[n - 1]


def coefficient_series(form, n_max: int) -> List[int]:
    label = form if isinstance(form, str) else form.label
    return _CACHE.series(label, n_max)


# ---------------------------------------------------------------------------
# trace identities
# ---------------------------------------------------------------------------


def good_prime(d: int, t: Fraction, level: int, p: int) -> bool:
    t = Fraction(t)
    if p == 2 or p in _DENOM_PRIMES[d]:
        return False
    if t.denominator % p == 0 or t.numerator % p == 0:
        return False
    if level % p == 0:
        return False
    return True


@dataclass
class TraceCheck:
    d: int
    t: Fraction
    p: int
    form_label: str
    a_p_lattice: int
    h_p: int
    kronecker_term: int
    inert: bool
    passed: bool


def verify_trace_identity(d: int, t, p: int, form) -> TraceCheck:
    """Check a_p(form) = H_p(HD3(d,t)) - (kappa|p) p, with the inert rule.

    kappa is -D (the CM field discriminant) when z = (1-sqrt(1-t))/2 is
    rational (Case 1), and the square class of 1-t when z is irrational
    (Case 2); inert primes must give a_p = 0.
    """
    t = Fraction(t)
    form = get_form(form) if isinstance(form, str) else form
    if not good_prime(d, t, form.level, p):
        raise BadReduction(f"p = {p} is not good for (d, t, N) = ({d}, {t}, {form.level})")
    one_minus_t = 1 - t
    num = one_minus_t.numerator * one_minus_t.denominator
    is_square = num >= 0 and isqrt(num) ** 2 == num
    if is_square or num % p == 0:
        # Case 1, and the degenerate split case t = 1 mod p where the
        # square-class symbol vanishes: the CM-field symbol applies.
        kappa = kronecker(form.cm_disc, p)
    else:
        kappa = kronecker(num, p)
    h = hp(FiniteFieldDatum("HD3", d, t), p)
    a_p = lattice_an(form, p)
    inert = kronecker(form.cm_disc, p) == -1
    if inert and not is_square:
        # Case 2 ties a_p to H_p only at split primes; inert primes are
        # governed by the vanishing rule alone.
        ok = (a_p == 0)
    else:
        ok = (a_p == h - kappa * p)
        if inert:
            ok = ok and a_p == 0
    return TraceCheck(d, t, p, form.label, a_p, h, kappa * p, inert, ok)


def hasse_ok(a_p: int, p: int, weight: int = 3) -> bool:
    """|a_p| <= 2 p^{(weight-1)/2} (Deligne/Hasse bound)."""
    k = weight - 1
    return a_p * a_p <= 4 * p ** k


def euler_factor_ok(form, p: int) -> bool:
    """a_{p^2} = a_p^2 - chi(p) p^{k-1} with chi the nebentypus (CM character)."""
    form = get_form(form) if isinstance(form, str) else form
    if form.level % p == 0 or p == 2:
        raise BadReduction(f"p = {p} divides the level")
    a_p = lattice_an(form, p)
    a_p2 = lattice_an(form, p * p)
    chi = kronecker(form.cm_disc, p)
    return a_p2 == a_p * a_p - chi * p ** (form.weight - 1)
