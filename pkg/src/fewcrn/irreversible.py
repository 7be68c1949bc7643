"""One irreversible reaction ``a -> b`` plus inflow and outflow of every species.

After dividing equation ``i`` by ``|b_i - a_i| l`` the steady states are
``sgn(i) x^a - c_i x_i + k_i = 0``.  Their positive solutions correspond to
the roots of

    g(y) = h(y) - kappa * y,   h(y) = prod_i (sgn(i) y + k_i)^{a_i},

on ``(0, k_minus)``, through ``x_i = (k_i + sgn(i) y) / c_i`` and
``kappa = c^a``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

from .network import FamilyKind, FamilyTag, NetworkError
from .polysys import PolynomialSystem
from .univariate import (INF, IsolatedRoot, Poly, count_roots, descartes_bound,
                         isolate_and_refine, refine_until, sign_at_root)

DEFAULT_WIDTH = Fraction(1, 10**12)


class PreconditionError(ValueError):
    pass


def _sgn(d: int) -> int:
    return (d > 0) - (d < 0)


@dataclass(frozen=True)
class RawRates:
    """Unnormalized rates of the full network (before any elimination)."""

    a: tuple[int, ...]
    b: tuple[int, ...]
    k: tuple[Fraction, ...]
    c: tuple[Fraction, ...]
    ells: tuple[Fraction, ...]

    def system(self) -> PolynomialSystem:
        """``(b_i - a_i)(l1 x^a - l2 x^b) - c_i x_i + k_i`` as a polynomial system."""
        n = len(self.a)
        polys = []
        for i in range(n):
            p: dict = {}
            d = self.b[i] - self.a[i]
            if d:
                p[self.a] = p.get(self.a, 0) + d * self.ells[0]
                if len(self.ells) > 1:
                    p[self.b] = p.get(self.b, 0) - d * self.ells[1]
            e = tuple(int(j == i) for j in range(n))
            p[e] = p.get(e, 0) - self.c[i]
            zero = (0,) * n
            p[zero] = p.get(zero, 0) + self.k[i]
            polys.append({w: v for w, v in p.items() if v != 0})
        names = tuple(f"X{i + 1}" for i in range(n))
        return PolynomialSystem(names, tuple(polys))


@dataclass(frozen=True)
class IrrevParams:
    """Normalized data ``(a, sgn, k, kappa)`` with optional back-map data.

    ``c`` is known when the parameters come from actual rates; witnesses
    only fix ``kappa``.  ``kept`` lists the original species indices that
    survive the elimination of ``sgn(i) = 0`` species.
    """

    a: tuple[int, ...]
    sgn: tuple[int, ...]
    k: tuple[Fraction, ...]
    kappa: Fraction
    c: tuple[Fraction, ...] | None = None
    b: tuple[int, ...] | None = None
    kept: tuple[int, ...] = ()
    raw: RawRates | None = None

    def __post_init__(self):
        if any(s == 0 for s in self.sgn):
            raise ValueError("sgn(i) = 0 species must be eliminated first")
        if any(v <= 0 for v in self.k) or self.kappa <= 0:
            raise ValueError("k and kappa must be positive")

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def a_plus(self) -> int:
        return sum(a for a, s in zip(self.a, self.sgn) if s > 0)

    @property
    def a_minus(self) -> int:
        return sum(a for a, s in zip(self.a, self.sgn) if s < 0)

    @property
    def k_minus(self):
        vals = [k for k, s in zip(self.k, self.sgn) if s < 0]
        return min(vals) if vals else INF

    @property
    def k_plus(self):
        vals = [k for k, s in zip(self.k, self.sgn) if s > 0]
        return min(vals) if vals else -INF

    def with_kappa(self, kappa) -> "IrrevParams":
        return replace(self, kappa=Fraction(kappa), c=None, raw=None)


def params(a: Sequence[int], b: Sequence[int], k: Sequence, kappa) -> IrrevParams:
    """Normalized parameters straight from ``a``, ``b``, ``k`` and ``kappa``."""
    sgn = tuple(_sgn(bi - ai) for ai, bi in zip(a, b))
    if 0 in sgn:
        raise PreconditionError("every species needs a_i != b_i here; use normalize() to eliminate")
    return IrrevParams(tuple(a), sgn, tuple(Fraction(v) for v in k), Fraction(kappa),
                       b=tuple(b), kept=tuple(range(len(a))))


def normalize(tag: FamilyTag, rates=None) -> IrrevParams:
    """Scale each equation by ``|b_i - a_i| l`` and drop ``a_i = b_i`` species.

    A dropped species sits at ``x_i = k_i / c_i``; its factor is absorbed
    into ``l``.
    """
    if tag.kind is not FamilyKind.IRREVERSIBLE:
        raise NetworkError(f"expected an irreversible family network, got {tag.kind.value}")
    k_raw, c_raw, (ell,) = tag.values(rates)
    raw = RawRates(tag.a, tag.b, k_raw, c_raw, (ell,))
    return normalize_raw(raw)


def normalize_raw(raw: RawRates) -> IrrevParams:
    ell = raw.ells[0]
    kept = []
    for i, (ai, bi) in enumerate(zip(raw.a, raw.b)):
        if ai == bi:
            ell *= (raw.k[i] / raw.c[i]) ** ai
        else:
            kept.append(i)
    if not kept:
        raise PreconditionError("every species has a_i = b_i: no non-flow dynamics remain")
    a = tuple(raw.a[i] for i in kept)
    b = tuple(raw.b[i] for i in kept)
    d = [abs(raw.b[i] - raw.a[i]) for i in kept]
    c = tuple(raw.c[i] / (di * ell) for i, di in zip(kept, d))
    k = tuple(raw.k[i] / (di * ell) for i, di in zip(kept, d))
    kappa = math.prod((ci ** ai for ci, ai in zip(c, a)), start=Fraction(1))
    sgn = tuple(_sgn(bi - ai) for ai, bi in zip(a, b))
    return IrrevParams(a, sgn, k, kappa, c, b, tuple(kept), raw)


# -- g and h ---------------------------------------------------------------------

def build_h(p: IrrevParams) -> Poly:
    h = Poly.const(1)
    for ai, s, ki in zip(p.a, p.sgn, p.k):
        if ai:
            h = h * Poly([ki, Fraction(s)]) ** ai
    return h


@dataclass(frozen=True)
class GData:
    g: Poly
    h: Poly
    dh: Poly
    d2h: Poly
    interval: tuple


def build_g(p: IrrevParams) -> GData:
    h = build_h(p)
    g = h - Poly([0, p.kappa])
    return GData(g, h, h.derivative(), h.derivative(2), (Fraction(0), p.k_minus))


def gamma_theta(p: IrrevParams) -> tuple[Fraction, Fraction]:
    """``gamma = sum sgn a / k`` and ``theta = gamma^2 - sum a / k^2``."""
    gamma = sum((Fraction(s * a) / k for a, s, k in zip(p.a, p.sgn, p.k)), Fraction(0))
    theta = gamma**2 - sum((Fraction(a) / k**2 for a, k in zip(p.a, p.k)), Fraction(0))
    return gamma, theta


# -- classification ---------------------------------------------------------------

class Case(enum.Enum):
    NO_NEG_ROOTS = "NoNegRoots"
    NO_POS_ROOTS = "NoPosRoots"
    MIXED = "Mixed"


def case_of(p: IrrevParams) -> Case:
    if p.a_plus == 0:
        return Case.NO_NEG_ROOTS
    if p.a_minus == 0:
        return Case.NO_POS_ROOTS
    return Case.MIXED


def max_count(p: IrrevParams) -> int:
    c = case_of(p)
    if c is Case.NO_NEG_ROOTS:
        return 1
    return (2 if c is Case.NO_POS_ROOTS else 3) if p.a_plus > 1 else 1


@dataclass(frozen=True)
class CountClassification:
    case: Case
    max_count: int
    exact_count: int
    count_with_multiplicity: int
    nondegenerate: bool
    roots: tuple[IsolatedRoot, ...]
    gamma: Fraction | None = None
    theta: Fraction | None = None
    xi: IsolatedRoot | None = None
    y_star: IsolatedRoot | None = None
    t_h_at_0: float | None = None
    t_h_sign: int | None = None
    descartes: int = 0
    interval: tuple = ()


def _unique_root(poly: Poly, lo, hi, width) -> IsolatedRoot | None:
    if poly.is_zero() or poly.degree < 1:
        return None
    roots = isolate_and_refine(poly, lo, hi, width)
    if len(roots) > 1:
        raise AssertionError("expected at most one root (interlacing of real-rooted h)")
    return roots[0] if roots else None


def classify(p: IrrevParams, width=DEFAULT_WIDTH) -> CountClassification:
    gd = build_g(p)
    lo, hi = gd.interval
    roots = tuple(isolate_and_refine(gd.g, lo, hi, width))
    count = len(roots)
    assert count == count_roots(gd.g, lo, hi)
    mult = sum(r.multiplicity for r in roots)
    case = case_of(p)
    extra: dict = {}
    if case is Case.MIXED:
        gamma, theta = gamma_theta(p)
        extra.update(gamma=gamma, theta=theta)
        xi = _unique_root(gd.dh, Fraction(0), hi, width)
        extra["xi"] = xi
        if xi is not None:
            # y* is the root of h'' where h' is still increasing towards xi
            cands = [r for r in isolate_and_refine(gd.d2h, Fraction(0), hi, width)
                     if sign_at_root(gd.dh, gd.d2h, r) > 0]
            if cands:
                ys = cands[0]
                tangent0 = gd.h - Poly.x() * gd.dh  # t_h(0) as a function of the tangency point
                extra.update(y_star=ys, t_h_sign=sign_at_root(tangent0, gd.d2h, ys),
                             t_h_at_0=float(tangent0(ys.value)))
    return CountClassification(case, max_count(p), count, mult, mult == count, roots,
                               descartes=descartes_bound(gd.g), interval=(lo, hi), **extra)


# -- steady states -------------------------------------------------------------------

@dataclass(frozen=True)
class SteadyState:
    y: IsolatedRoot
    x: tuple[Fraction, ...]
    residual: float

    def as_floats(self) -> tuple[float, ...]:
        return tuple(float(v) for v in self.x)


def back_map(p: IrrevParams, y: Fraction) -> tuple[Fraction, ...]:
    """Full state ``x`` (including eliminated species) for a root ``y``."""
    if p.c is None or p.raw is None:
        raise PreconditionError("back-mapping needs rate values (c), not only kappa")
    n_full = len(p.raw.a)
    x: list = [None] * n_full
    for j, i in enumerate(p.kept):
        x[i] = (p.k[j] + p.sgn[j] * y) / p.c[j]
    for i in range(n_full):
        if x[i] is None:
            x[i] = p.raw.k[i] / p.raw.c[i]
    return tuple(x)


def steady_states_irrev(p: IrrevParams, width=DEFAULT_WIDTH, tol: float = 1e-9,
                        roots: Sequence[IsolatedRoot] | None = None) -> list[SteadyState]:
    g = build_g(p)
    if roots is None:
        roots = isolate_and_refine(g.g, *g.interval, width)
    system = p.raw.system() if p.raw else None

    def state(r):
        x = back_map(p, r.value)
        res = max(system.relative_residuals(x)) if system else 0.0
        if res > tol:
            raise ArithmeticError(f"steady state at y = {float(r.value):.6g} has residual {res:.3g}")
        return x, res

    out = []
    for r in roots:
        r, (x, res) = refine_until(g.g, r, width, state, (ArithmeticError,))
        out.append(SteadyState(r, x, res))
    return out


# -- witnesses --------------------------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    a: tuple[int, ...]
    b: tuple[int, ...]
    k: tuple[Fraction, ...]
    kappa: Fraction
    kappa_interval: tuple  # open interval of admissible kappa (hi may be inf)
    detail: dict = field(default_factory=dict, compare=False)

    def params(self) -> IrrevParams:
        return params(self.a, self.b, self.k, self.kappa)


def _check_signs(a, b):
    if len(a) != len(b):
        raise PreconditionError("a and b must have the same length")
    if any(ai == bi for ai, bi in zip(a, b)):
        raise PreconditionError("species with a_i = b_i must be eliminated before building witnesses")


def witness_two(a: Sequence[int], b: Sequence[int], k: Sequence,
                width=DEFAULT_WIDTH) -> Witness:
    """``kappa = 2 h'(y0)`` where ``y0 > 0`` solves ``h(y0) = h'(y0) y0``."""
    _check_signs(a, b)
    p = params(a, b, k, 1)
    if p.a_minus != 0:
        raise PreconditionError("witness_two needs a_minus = 0 (every reactant species grows)")
    if p.a_plus <= 1:
        raise PreconditionError("two steady states need a_plus > 1")
    h = build_h(p)
    dh = h.derivative()
    tangent0 = h - Poly.x() * dh
    y0 = _unique_root(tangent0, Fraction(0), INF, width)
    slope_hi = max(dh(y0.lo), dh(y0.hi))  # h' is increasing on y > 0
    kappa = _nice_rational(2 * dh(y0.value), slope_hi, INF)
    w = Witness(tuple(a), tuple(b), p.k, kappa, (slope_hi, INF),
                {"y0": y0, "h_prime_y0": float(dh(y0.value))})
    gd = build_g(w.params())
    if (got := count_roots(gd.g, *gd.interval)) != 2:
        raise AssertionError(f"witness_two reclassified to {got} roots")
    return w


def witness_three(a: Sequence[int], b: Sequence[int], max_doublings: int = 200) -> Witness:
    """Equal ``k`` within each sign class; ``k_plus = 1`` and ``k_minus`` doubling from 3.

    With ``h = (y + 1)^{a+} (k_minus - y)^{a-}`` the conditions ``g(1) < 0 < g(2)``
    read ``2^{a+} (k_minus - 1)^{a-} < kappa < (3^{a+} / 2) (k_minus - 2)^{a-}``;
    kappa is the midpoint of that interval.
    """
    _check_signs(a, b)
    p0 = params(a, b, [1] * len(a), 1)
    ap, am = p0.a_plus, p0.a_minus
    if ap <= 1:
        raise PreconditionError("three steady states need a_plus > 1")
    if am == 0:
        raise PreconditionError("three steady states need a_minus > 0")
    km = Fraction(3)
    for _ in range(max_doublings):
        lower = 2**ap * (km - 1) ** am
        upper = Fraction(3**ap, 2) * (km - 2) ** am
        if lower < upper:
            break
        km *= 2
    else:
        raise AssertionError("no k_minus found")
    k = tuple(Fraction(1) if s > 0 else km for s in p0.sgn)
    kappa = (lower + upper) / 2
    w = Witness(tuple(a), tuple(b), k, kappa, (lower, upper), {"k_minus": km, "k_plus": 1})
    gd = build_g(w.params())
    if (got := count_roots(gd.g, *gd.interval)) != 3:
        raise AssertionError(f"witness_three reclassified to {got} roots")
    return w


def sufficient_three_bounds(p: IrrevParams, mu: int, nu: int) -> tuple[Fraction, Fraction]:
    """Interval for kappa that forces ``g(k_mu) < 0 < g(k_nu)``."""
    if p.sgn[mu] != 1 or p.sgn[nu] != 1:
        raise PreconditionError("mu and nu must both have sgn = +1")
    if p.a[mu] < 1 or p.a[nu] < 1:
        raise PreconditionError("a_mu and a_nu must be at least 1")
    if not p.k[mu] < p.k[nu] < p.k_minus:
        raise PreconditionError("need k_mu < k_nu < k_minus")

    def bound(j):
        kj = p.k[j]
        val = 2 ** p.a[j] * kj ** (p.a[j] - 1)
        for i in range(p.n):
            if i != j:
                val *= (p.sgn[i] * kj + p.k[i]) ** p.a[i]
        return val

    return bound(mu), bound(nu)


def sufficient_three_check(p: IrrevParams, mu: int, nu: int) -> bool:
    lower, upper = sufficient_three_bounds(p, mu, nu)
    return lower < p.kappa < upper


# -- realizing kappa with actual rates ----------------------------------------------------

def _nice_rational(target: Fraction, lo, hi) -> Fraction:
    """A short rational near ``target`` strictly inside ``(lo, hi)``."""
    for den in (1, 10, 100, 10**4, 10**8, 10**16):
        cand = Fraction(round(target * den), den)
        if lo < cand < hi:
            return cand
    return target


def realize(p: IrrevParams, kappa_interval=None, ell=Fraction(1)) -> RawRates:
    """Rates ``(k, c, l)`` for the full network whose normalized ``kappa`` lies in the interval.

    All of ``kappa`` is placed on the species with the smallest positive
    ``a_j``; if that exponent exceeds 1 an approximate root is taken and
    rounded so that ``c^a`` stays inside the open interval.
    """
    if p.b is None:
        raise PreconditionError("realize needs b")
    lo, hi = kappa_interval or (p.kappa, p.kappa)
    idx = min((j for j in range(p.n) if p.a[j] > 0), key=lambda j: p.a[j], default=None)
    if idx is None:
        c = [Fraction(1)] * p.n
    else:
        e = p.a[idx]
        c = [Fraction(1)] * p.n
        if e == 1:
            c[idx] = p.kappa
        else:
            import mpmath as mp

            with mp.workdps(60):
                root = mp.root(mp.mpf(p.kappa.numerator) / p.kappa.denominator, e)
            for den in (1, 10, 100, 10**4, 10**8, 10**16, 10**32):
                cand = Fraction(int(mp.nint(root * den)), den)
                if cand > 0 and lo < cand**e < hi:
                    c[idx] = cand
                    break
            else:
                raise ArithmeticError("could not realize kappa with a rational rate")
    d = [abs(bi - ai) for ai, bi in zip(p.a, p.b)]
    return RawRates(p.a, p.b, tuple(ki * di * ell for ki, di in zip(p.k, d)),
                    tuple(ci * di * ell for ci, di in zip(c, d)), (ell,))
