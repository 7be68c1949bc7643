"""One reversible reaction ``a <-> b`` plus inflow and outflow of every species.

Normalized steady states: ``sgn(i) (x^a - alpha x^b) - c_i x_i + k_i = 0``
with ``alpha = l2 / l1``.  Eliminating the second Gale variable leaves

    g1(y) = c^-a prod (sgn y + k)^a - alpha c^-b prod (sgn y + k)^b - y

on ``(-k_plus, k_minus)``; states come back through ``x_i = (k_i + sgn(i) y) / c_i``.

Here ``y = x^a - alpha x^b`` is the net forward flux of the reversible
reaction, so it is negative whenever the backward direction dominates.  The
cone is only ``k_i + sgn(i) y > 0``: at a root ``y + y2 = c^-a prod(..)^a > 0``
and ``y2 > 0`` hold automatically.  Roots with ``y > 0`` are reported
separately as the forward part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .irreversible import (DEFAULT_WIDTH, PreconditionError, RawRates, _sgn, realize,
                           witness_three)
from .network import FamilyKind, FamilyTag, NetworkError
from .sampling import draw_rng, log_uniform
from .univariate import (INF, IsolatedRoot, Poly, count_roots, isolate_and_refine,
                         refine_until, sign_at_root)


@dataclass(frozen=True)
class RevParams:
    a: tuple[int, ...]
    b: tuple[int, ...]
    sgn: tuple[int, ...]
    c: tuple[Fraction, ...]
    k: tuple[Fraction, ...]
    alpha: Fraction
    kept: tuple[int, ...] = ()
    raw: RawRates | None = None

    def __post_init__(self):
        if any(s == 0 for s in self.sgn):
            raise ValueError("sgn(i) = 0 species must be eliminated first")
        if any(v <= 0 for v in self.c + self.k) or self.alpha <= 0:
            raise ValueError("c, k and alpha must be positive")

    @property
    def n(self) -> int:
        return len(self.a)

    def _sum(self, v, sign) -> int:
        return sum(x for x, s in zip(v, self.sgn) if s == sign)

    a_plus = property(lambda self: self._sum(self.a, 1))
    a_minus = property(lambda self: self._sum(self.a, -1))
    b_plus = property(lambda self: self._sum(self.b, 1))
    b_minus = property(lambda self: self._sum(self.b, -1))

    @property
    def k_minus(self):
        vals = [k for k, s in zip(self.k, self.sgn) if s < 0]
        return min(vals) if vals else INF

    @property
    def k_plus(self):
        vals = [k for k, s in zip(self.k, self.sgn) if s > 0]
        return min(vals) if vals else INF

    @property
    def interval(self) -> tuple:
        return (-self.k_plus, self.k_minus)

    def c_pow(self, e: Sequence[int]) -> Fraction:
        return math.prod((ci**ei for ci, ei in zip(self.c, e)), start=Fraction(1))


def rev_params(a, b, k, c, alpha) -> RevParams:
    """Normalized parameters; the matching raw rates use ``l1 = 1``, ``l2 = alpha``."""
    a, b = tuple(a), tuple(b)
    sgn = tuple(_sgn(bi - ai) for ai, bi in zip(a, b))
    if 0 in sgn:
        raise PreconditionError("every species needs a_i != b_i here; use normalize_rev()")
    k = tuple(Fraction(v) for v in k)
    c = tuple(Fraction(v) for v in c)
    alpha = Fraction(alpha)
    d = [abs(bi - ai) for ai, bi in zip(a, b)]
    raw = RawRates(a, b, tuple(ki * di for ki, di in zip(k, d)),
                   tuple(ci * di for ci, di in zip(c, d)), (Fraction(1), alpha))
    return RevParams(a, b, sgn, c, k, alpha, tuple(range(len(a))), raw)


def normalize_rev(tag: FamilyTag, rates=None) -> RevParams:
    if tag.kind is not FamilyKind.REVERSIBLE:
        raise NetworkError(f"expected a reversible family network, got {tag.kind.value}")
    k_raw, c_raw, ells = tag.values(rates)
    return normalize_rev_raw(RawRates(tag.a, tag.b, k_raw, c_raw, ells))


def normalize_rev_raw(raw: RawRates) -> RevParams:
    l1, l2 = raw.ells
    kept = []
    for i, (ai, bi) in enumerate(zip(raw.a, raw.b)):
        if ai == bi:
            # x_i = k_i / c_i at steady state; both monomials absorb the factor
            l1 *= (raw.k[i] / raw.c[i]) ** ai
            l2 *= (raw.k[i] / raw.c[i]) ** bi
        else:
            kept.append(i)
    if not kept:
        raise PreconditionError("every species has a_i = b_i: no non-flow dynamics remain")
    a = tuple(raw.a[i] for i in kept)
    b = tuple(raw.b[i] for i in kept)
    d = [abs(raw.b[i] - raw.a[i]) for i in kept]
    c = tuple(raw.c[i] / (di * l1) for i, di in zip(kept, d))
    k = tuple(raw.k[i] / (di * l1) for i, di in zip(kept, d))
    sgn = tuple(_sgn(bi - ai) for ai, bi in zip(a, b))
    return RevParams(a, b, sgn, c, k, l2 / l1, tuple(kept), raw)


def _prod(p: RevParams, e: Sequence[int]) -> Poly:
    out = Poly.const(1)
    for ei, s, ki in zip(e, p.sgn, p.k):
        if ei:
            out = out * Poly([ki, Fraction(s)]) ** ei
    return out


def build_g_tilde(p: RevParams) -> tuple[Poly, tuple]:
    g = _prod(p, p.a) / p.c_pow(p.a) - _prod(p, p.b) * (p.alpha / p.c_pow(p.b)) - Poly.x()
    return g, p.interval


def recover_y2(p: RevParams, y1) -> Fraction:
    y1 = Fraction(y1)
    lo, hi = p.interval
    if not lo < y1 < hi:
        raise ValueError(f"y1 = {y1} lies outside ({lo}, {hi})")
    return p.alpha / p.c_pow(p.b) * _prod(p, p.b)(y1)


def symmetric_swap(p: RevParams) -> RevParams:
    """Exchange the roles of ``a`` and ``b``: ``alpha -> 1/alpha`` and ``c, k -> c/alpha, k/alpha``.

    Dividing the normalized equations by ``alpha`` keeps them in normalized
    form with negated signs, so ``c`` and ``k`` rescale too.
    """
    inv = 1 / p.alpha
    raw = None
    if p.raw is not None:
        r = p.raw
        raw = RawRates(r.b, r.a, r.k, r.c, (r.ells[1], r.ells[0]))
    return RevParams(p.b, p.a, tuple(-s for s in p.sgn), tuple(ci * inv for ci in p.c),
                     tuple(ki * inv for ki in p.k), inv, p.kept, raw)


# -- v / w analysis for equal signs ----------------------------------------------

@dataclass(frozen=True)
class VWPair:
    v: Poly
    w: Poly

    @property
    def v0(self):
        return self.v(0)

    @property
    def w0(self):
        return self.w(0)

    @property
    def dv0(self):
        return self.v.derivative()(0)


def vw_pair(p: RevParams) -> VWPair:
    ca = p.c_pow(p.a)
    v = _prod(p, p.a) - Poly([0, ca])
    w = _prod(p, p.b) * (p.alpha * ca / p.c_pow(p.b))
    return VWPair(v, w)


@dataclass(frozen=True)
class AllPlusReport:
    """``exact_count`` and ``roots`` cover ``y > 0``; ``total_count`` the whole cone."""

    max_count: int
    exact_count: int
    total_count: int
    roots: tuple[IsolatedRoot, ...]
    v0: Fraction
    w0: Fraction
    dv0: Fraction
    xi: IsolatedRoot | None = None
    sigma: Fraction | None = None
    certificate: str = "not applicable"  # "holds" | "not found" | "not applicable"
    swapped: bool = False


def classify_case_all_plus(p: RevParams, width=DEFAULT_WIDTH) -> AllPlusReport:
    swapped = False
    if all(s < 0 for s in p.sgn):
        p, swapped = symmetric_swap(p), True
    if not all(s > 0 for s in p.sgn):
        raise PreconditionError("the equal-sign analysis needs every sgn(i) equal")
    g, (lo, hi) = build_g_tilde(p)
    roots = tuple(isolate_and_refine(g, Fraction(0), hi, width))
    total = count_roots(g, lo, hi)
    vw = vw_pair(p)
    v0, w0, dv0 = vw.v0, vw.w0, vw.dv0
    xi = sigma = None
    cert = "not applicable"
    if v0 > w0 and dv0 < 0:
        dv = vw.v.derivative()
        pos = isolate_and_refine(dv, Fraction(0), INF, width)
        # v' < 0 throughout when a_plus = 1, leaving no turning point
        xi = pos[0] if pos else None
        diff = vw.v - vw.w
        cert = "not found" if xi is not None else "not applicable"
        if xi is not None and sign_at_root(diff, dv, xi) < 0:
            # one probe per sign-constant gap of v - w beyond xi
            cuts = isolate_and_refine(diff, xi.hi, INF, width)
            edges = [xi.hi] + [e for r in cuts for e in (r.lo, r.hi)] + [None]
            for left, right in zip(edges[::2], edges[1::2]):
                s = left + 1 if right is None else (left + right) / 2
                if diff.sign_at(s) > 0:
                    sigma, cert = s, "holds"
                    break
    rep = AllPlusReport(3, len(roots), total, roots, v0, w0, dv0, xi, sigma, cert, swapped)
    if cert == "holds" and rep.exact_count != 3:
        raise AssertionError("three-root certificate holds but Sturm disagrees")
    return rep


# -- bounds ----------------------------------------------------------------------------

def mixed_sign_bound(p: RevParams) -> int:
    """Count bound: 3 for equal signs, else the smaller applicable Descartes-type bound.

    With equal signs the Descartes argument covers the whole cone.  Each
    mixed-sign term only covers one side of ``y = 0`` (the second is the first
    applied to the swapped system), so the minimum is a conjectural bound on
    the total; see ``side_bounds`` for the proven pair.
    """
    if len(set(p.sgn)) == 1:
        return 3
    bounds = []
    if p.a_plus > 0:
        bounds.append(max(p.a_minus, p.b_plus + p.b_minus - p.a_plus) + 2)
    if p.b_minus > 0:
        bounds.append(max(p.b_plus, p.a_plus + p.a_minus - p.b_minus) + 2)
    if not bounds:
        raise PreconditionError("neither a_plus > 0 nor b_minus > 0")
    return min(bounds)


def side_bounds(p: RevParams) -> tuple[int | None, int | None]:
    """Proven bounds on the roots in ``(0, k_minus)`` and in ``(-k_plus, 0)``; None if none applies."""
    if len(set(p.sgn)) == 1:
        return 3, 3

    def forward(q: RevParams):
        return max(q.a_minus, q.b_plus + q.b_minus - q.a_plus) + 2 if q.a_plus > 0 else None

    return forward(p), forward(symmetric_swap(p))


def bernstein_value(a: Sequence[int], b: Sequence[int]) -> int:
    """``n! vol(conv(e_1, ..., e_n, a, b, 0))`` computed exactly from a triangulation."""
    n = len(a)
    pts = [tuple(int(i == j) for j in range(n)) for i in range(n)] + [tuple(a), tuple(b), (0,) * n]
    if n == 1:
        xs = [q[0] for q in pts]
        return max(xs) - min(xs)
    import numpy as np
    from scipy.spatial import Delaunay, QhullError

    from .linalg import int_det

    arr = np.array(pts, dtype=float)
    try:
        tri = Delaunay(arr)
    except QhullError:
        tri = Delaunay(arr, qhull_options="QJ")
    total = 0
    for simplex in tri.simplices:
        base = pts[simplex[0]]
        m = [[pts[v][j] - base[j] for j in range(n)] for v in simplex[1:]]
        total += abs(int_det(m))
    return total


def bates_bound(n: int) -> float:
    """Informational count bound ``n^2 (e^4 + 3)``."""
    return n * n * (math.e**4 + 3)


# -- classification and states --------------------------------------------------------

@dataclass(frozen=True)
class RevClassification:
    exact_count: int
    forward_count: int  # roots with y > 0
    count_with_multiplicity: int
    nondegenerate: bool
    roots: tuple[IsolatedRoot, ...]
    bound: int
    sign_case: str  # "all-plus" | "all-minus" | "mixed"
    interval: tuple
    all_plus: AllPlusReport | None = None
    bernstein: int | None = None


def classify_rev(p: RevParams, width=DEFAULT_WIDTH) -> RevClassification:
    g, (lo, hi) = build_g_tilde(p)
    roots = tuple(isolate_and_refine(g, lo, hi, width))
    mult = sum(r.multiplicity for r in roots)
    if all(s > 0 for s in p.sgn):
        case = "all-plus"
    elif all(s < 0 for s in p.sgn):
        case = "all-minus"
    else:
        case = "mixed"
    allp = classify_case_all_plus(p, width) if case != "mixed" else None
    if allp is not None and allp.total_count != len(roots):
        raise AssertionError("swap changed the root count")
    forward = count_roots(g, Fraction(0), hi)
    return RevClassification(len(roots), forward, mult, mult == len(roots), roots, mixed_sign_bound(p),
                             case, (lo, hi), allp, bernstein_value(p.a, p.b))


@dataclass(frozen=True)
class RevSteadyState:
    y1: IsolatedRoot
    y2: Fraction
    x: tuple[Fraction, ...]
    residual: float

    def as_floats(self) -> tuple[float, ...]:
        return tuple(float(v) for v in self.x)


def steady_states_rev(p: RevParams, width=DEFAULT_WIDTH, tol: float = 1e-9,
                      roots: Sequence[IsolatedRoot] | None = None) -> list[RevSteadyState]:
    g, (lo, hi) = build_g_tilde(p)
    if roots is None:
        roots = isolate_and_refine(g, lo, hi, width)
    system = p.raw.system() if p.raw else None
    n_full = len(p.raw.a) if p.raw else p.n

    def state(r):
        x: list = [None] * n_full
        for j, i in enumerate(p.kept or range(p.n)):
            x[i] = (p.k[j] + p.sgn[j] * r.value) / p.c[j]
        for i in range(n_full):
            if x[i] is None:
                x[i] = p.raw.k[i] / p.raw.c[i]
        res = max(system.relative_residuals(x)) if system else 0.0
        if res > tol:
            raise ArithmeticError(f"steady state at y1 = {float(r.value):.6g} has residual {res:.3g}")
        return tuple(x), res

    out = []
    for r in roots:
        r, (x, res) = refine_until(g, r, width, state, (ArithmeticError,))
        out.append(RevSteadyState(r, recover_y2(p, r.value), x, res))
    return out


# -- conjecture search ----------------------------------------------------------------

def symmetric_witness() -> RevParams:
    """``X1 + X2 <-> 2X1 + 2X2`` with states (1,1), (2,2), (3,3)."""
    return rev_params([1, 1], [2, 2], [Fraction(36, 25)] * 2, [Fraction(12, 5)] * 2, Fraction(1, 25))


@dataclass(frozen=True)
class RevWitness:
    a: tuple[int, ...]
    b: tuple[int, ...]
    k: tuple[Fraction, ...]
    c: tuple[Fraction, ...]
    alpha: Fraction
    count: int
    source: str  # "random" | "constructive"
    draw: int | None = None

    def params(self) -> RevParams:
        return rev_params(self.a, self.b, self.k, self.c, self.alpha)


@dataclass
class ShapeResult:
    a: tuple[int, ...]
    b: tuple[int, ...]
    bound: int
    samples: int
    max_count: int = 0
    histogram: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)  # count == 3
    exceeding_three: list = field(default_factory=list)  # would refute the conjecture
    bound_violations: list = field(default_factory=list)  # impossible if the bound holds

    @property
    def bound_attained(self) -> bool:
        return self.max_count == self.bound


def constructive_seed(a, b, max_halvings: int = 80) -> RevWitness | None:
    """Three roots from the irreversible witness by letting ``alpha`` shrink.

    For small ``alpha`` the reduced polynomial is a small perturbation of the
    irreversible ``g / c^a``, whose three simple roots persist.
    """
    a, b = tuple(a), tuple(b)
    sw = False
    sgn = [_sgn(bi - ai) for ai, bi in zip(a, b)]
    ap = sum(x for x, s in zip(a, sgn) if s > 0)
    am = sum(x for x, s in zip(a, sgn) if s < 0)
    if not (ap > 1 and am > 0):
        bm = sum(x for x, s in zip(b, sgn) if s < 0)
        bp = sum(x for x, s in zip(b, sgn) if s > 0)
        if bm > 1 and bp > 0:
            a, b, sw = b, a, True
        else:
            return None
    w = witness_three(a, b)
    raw = realize(w.params(), w.kappa_interval)
    d = [abs(bi - ai) for ai, bi in zip(a, b)]
    c = tuple(ci / di for ci, di in zip(raw.c, d))
    alpha = Fraction(1)
    for _ in range(max_halvings):
        alpha /= 2
        p = rev_params(a, b, w.k, c, alpha)
        if count_roots(build_g_tilde(p)[0], *p.interval) == 3:
            if sw:
                p = symmetric_swap(p)
                return RevWitness(p.a, p.b, p.k, p.c, p.alpha, 3, "constructive")
            return RevWitness(a, b, w.k, c, alpha, 3, "constructive")
    return None


def conjecture_search(shapes: Sequence[tuple[Sequence[int], Sequence[int]]], samples: int,
                      seed: int, constructive: bool = True, max_witnesses: int = 20) -> list[ShapeResult]:
    """Random log-uniform draws of ``(k, c, alpha)`` per shape, counting roots exactly."""
    out = []
    for si, (a, b) in enumerate(shapes):
        a, b = tuple(a), tuple(b)
        n = len(a)
        probe = rev_params(a, b, [1] * n, [1] * n, 1)
        res = ShapeResult(a, b, mixed_sign_bound(probe), samples)
        if constructive:
            wit = constructive_seed(a, b)
            if wit is not None:
                res.witnesses.append(wit)
                res.max_count = 3
                res.histogram[3] = res.histogram.get(3, 0)
        for di in range(samples):
            rng = draw_rng(seed, si, di)
            k = [log_uniform(rng) for _ in range(n)]
            c = [log_uniform(rng) for _ in range(n)]
            alpha = log_uniform(rng)
            p = rev_params(a, b, k, c, alpha)
            cnt = count_roots(build_g_tilde(p)[0], *p.interval)
            res.histogram[cnt] = res.histogram.get(cnt, 0) + 1
            res.max_count = max(res.max_count, cnt)
            wit = RevWitness(a, b, p.k, p.c, p.alpha, cnt, "random", di)
            if cnt > res.bound:
                res.bound_violations.append(wit)
            if cnt > 3:
                res.exceeding_three.append(wit)
            elif cnt == 3 and len(res.witnesses) < max_witnesses:
                res.witnesses.append(wit)
        out.append(res)
    return out
