"""Gale dual systems of fewnomial systems ``C x^W = 0``.

A square system with ``n + l + 1`` distinct monomials (the constant last)
is traded for ``l`` equations ``prod_i d_i(y)^{q_ij} = 1`` in ``l``
unknowns, restricted to the polyhedral cone where every linear form
``d_i`` is positive.  ``D`` spans ``ker C`` and ``Q`` spans ``ker W``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .linalg import (KernelError, _is_sym, _is_zero, int_det, integer_kernel_basis, matmul,
                     rank, rational_kernel_basis)
from .polysys import Exponent, PolynomialSystem
from .univariate import INF, Poly, count_roots, isolate_and_refine, refine_until


class GaleError(ValueError):
    """The system does not admit the Gale construction."""


class ConeError(ValueError):
    """A point lies outside (or on the boundary of) the positivity cone."""


@dataclass(frozen=True)
class CWDecomposition:
    C: tuple[tuple, ...]
    W: tuple[tuple[int, ...], ...]
    monomials: tuple[Exponent, ...]
    l: int
    species: tuple[str, ...] = ()
    # monomial the system was divided by when no constant term was present
    divisor: Exponent | None = None

    @property
    def n(self) -> int:
        return len(self.W)


@dataclass(frozen=True)
class GaleSystem:
    D: tuple[tuple, ...]
    Q: tuple[tuple[int, ...], ...]
    l: int

    @property
    def m(self) -> int:
        """Number of monomials ``n + l + 1``."""
        return len(self.D)

    def form(self, i: int, y: Sequence):
        row = self.D[i]
        acc = row[self.l]
        for r in range(self.l):
            acc = acc + row[r] * y[r]
        return acc

    def forms(self, y: Sequence) -> list:
        return [self.form(i, y) for i in range(self.m)]

    def in_cone(self, y: Sequence) -> bool:
        return all(v > 0 for v in self.forms(y)[:-1])

    def exponents(self, j: int) -> tuple[int, ...]:
        """Exponents of ``d_1..d_{n+l}`` in the ``j``-th equation."""
        return tuple(self.Q[i][j] for i in range(self.m - 1))

    def equation_text(self, var: str = "y") -> list[str]:
        out = []
        for j in range(self.l):
            parts = []
            for i, q in enumerate(self.exponents(j)):
                if q:
                    parts.append(f"d{i + 1}^{q}" if q != 1 else f"d{i + 1}")
            out.append(" * ".join(parts) + " = 1" if parts else "1 = 1")
        return out

    def form_text(self, i: int, var: str = "y") -> str:
        import sympy as sp

        ys = sp.symbols(" ".join(f"{var}{r + 1}" for r in range(self.l))) if self.l > 1 \
            else (sp.Symbol(var),)
        expr = _sym(self.D[i][self.l]) + sum(_sym(self.D[i][r]) * ys[r] for r in range(self.l))
        return str(sp.simplify(expr))

    def cone_interval(self) -> tuple[Fraction | float, Fraction | float]:
        """For ``l = 1``: the open interval of ``y`` where all forms are positive."""
        if self.l != 1:
            raise ValueError("cone_interval is defined for l = 1 only")
        lo, hi = -INF, INF
        for i in range(self.m - 1):
            s, t = self.D[i][0], self.D[i][1]
            if _is_sym(s) or _is_sym(t):
                raise ValueError("cone_interval needs numeric coefficients")
            if s > 0:
                lo = max(lo, -t / s)
            elif s < 0:
                hi = min(hi, -t / s)
            elif t <= 0:
                return Fraction(0), Fraction(0)
        return lo, hi


def _sym(x):
    import sympy as sp

    if isinstance(x, Fraction):
        return sp.Rational(x.numerator, x.denominator)
    return sp.sympify(x)


def decompose(system: PolynomialSystem) -> CWDecomposition:
    n = system.n
    if system.zero_rows():
        raise GaleError(f"rows {[i + 1 for i in system.zero_rows()]} vanish identically; rank(C) < n")
    monos = list(system.monomials())
    zero = tuple(0 for _ in range(n))
    divisor = None
    polys = [dict(p) for p in system.polys]
    if zero not in monos:
        divisor = monos.pop()
        monos = [tuple(a - b for a, b in zip(w, divisor)) for w in monos] + [zero]
        polys = [{tuple(a - b for a, b in zip(w, divisor)): c for w, c in p.items()} for p in polys]
    l = len(monos) - n - 1
    if l <= 0:
        raise GaleError(f"{len(monos)} monomials for {n} equations: need at least n + 2")
    C = tuple(tuple(p.get(w, 0) for w in monos) for p in polys)
    W = tuple(tuple(w[i] for w in monos) for i in range(n))
    if rank(C) < n:
        raise GaleError("coefficient matrix C is rank deficient")
    if rank(W) < n:
        raise GaleError("exponent matrix W is rank deficient")
    return CWDecomposition(C, W, tuple(monos), l, system.species, divisor)


def gale_dual(cw: CWDecomposition) -> GaleSystem:
    try:
        D = rational_kernel_basis(cw.C, pin_last_row=True)
        Q = integer_kernel_basis(cw.W, pin_last_column=True)
    except KernelError as exc:
        raise GaleError(str(exc)) from exc
    gs = GaleSystem(D, Q, cw.l)
    assert all(_is_zero(v) for row in matmul(cw.C, D) for v in row)
    assert all(v == 0 for row in matmul(cw.W, Q) for v in row)
    return gs


# -- l = 1: one univariate polynomial ----------------------------------------

def cleared_polynomial(gs: GaleSystem):
    """For ``l = 1``: ``prod_{q>0} d_i^q - prod_{q<0} d_i^{-q}`` with denominators cleared.

    Each positive-side form is scaled by the common denominator of its
    coefficients and the other side by the same total factor, so the
    introductory network yields ``64 l^2 y^2 + ... + k1 k3`` verbatim.
    Returns a :class:`Poly` for numeric data and a sympy expression in ``y``
    for symbolic data.
    """
    if gs.l != 1:
        raise ValueError("cleared_polynomial needs l = 1")
    q = gs.exponents(0)
    symbolic = any(_is_sym(v) and not getattr(v, "is_Rational", False) for r in gs.D for v in r)
    if symbolic:
        import sympy as sp

        y = sp.Symbol("y", positive=True)
        pos = sp.Integer(1)
        neg = sp.Integer(1)
        for i, e in enumerate(q):
            d = _sym(gs.D[i][0]) * y + _sym(gs.D[i][1])
            if e > 0:
                pos *= d**e
            elif e < 0:
                neg *= d**(-e)
        num, _ = sp.fraction(sp.together(pos - neg))
        expr = sp.expand(num)
        if sp.Poly(expr, y).LC().could_extract_minus_sign():
            expr = -expr
        return sp.expand(expr)
    pos, neg, scale = Poly.const(1), Poly.const(1), Fraction(1)
    for i, e in enumerate(q):
        d = Poly([Fraction(gs.D[i][1]), Fraction(gs.D[i][0])])
        if e > 0:
            den = math.lcm(*(c.denominator for c in d.coeffs))
            pos = pos * (d * den) ** e
            scale *= Fraction(den) ** e
        elif e < 0:
            neg = neg * d ** (-e)
    p = pos - neg * scale
    den = math.lcm(*(c.denominator for c in p.coeffs)) if p.coeffs else 1
    return p * den


def cone_roots(gs: GaleSystem, width: Fraction = Fraction(1, 10**12)):
    """Isolated roots of the cleared polynomial inside the cone (``l = 1``)."""
    p = cleared_polynomial(gs)
    lo, hi = gs.cone_interval()
    if lo >= hi or p.is_zero():
        return p, (lo, hi), []
    return p, (lo, hi), isolate_and_refine(p, lo, hi, width)


# -- back map -------------------------------------------------------------------

def _choose_basis(W) -> tuple[int, ...]:
    n, m = len(W), len(W[0])
    best = None
    for cols in itertools.combinations(range(m - 1), n):
        sub = tuple(tuple(W[i][j] for j in cols) for i in range(n))
        d = int_det(sub)
        if abs(d) == 1:
            return cols
        if d and best is None:
            best = cols
    if best is None:
        raise GaleError("no invertible n x n submatrix of W")
    return best


def _is_permutation(sub) -> bool:
    return all(sorted(r) == [0] * (len(r) - 1) + [1] for r in sub) and \
        all(sorted(c) == [0] * (len(c) - 1) + [1] for c in zip(*sub))


@dataclass(frozen=True)
class RecoveredState:
    x: tuple
    residual: float
    exact: bool
    basis: tuple[int, ...] = field(default=())


def recover_solution(gs: GaleSystem, cw: CWDecomposition, y: Sequence,
                     tol: float = 1e-9) -> RecoveredState:
    """Positive ``x`` with ``x^W = D [y, 1]`` via ``log x = W_B^{-T} log z_B``."""
    z = gs.forms(y)
    bad = [i + 1 for i, v in enumerate(z[:-1]) if not v > 0]
    if bad:
        raise ConeError(f"y is not inside the cone: d_{bad[0]}(y) <= 0")
    n = cw.n
    B = _choose_basis(cw.W)
    sub = tuple(tuple(cw.W[i][j] for j in B) for i in range(n))
    if _is_permutation(sub):
        x = [None] * n
        for jj, j in enumerate(B):
            i = next(i for i in range(n) if sub[i][jj] == 1)
            x[i] = z[j]
        exact = all(isinstance(v, (int, Fraction)) for v in x)
    else:
        import mpmath as mp

        with mp.workdps(40):
            A = mp.matrix([[sub[i][jj] for i in range(n)] for jj in range(n)])
            rhs = mp.matrix([mp.log(mp.mpf(Fraction(z[j]).numerator) / Fraction(z[j]).denominator)
                             if isinstance(z[j], Fraction) else mp.log(z[j]) for j in B])
            u = mp.lu_solve(A, rhs)
            x = [float(mp.exp(u[i])) for i in range(n)]
        exact = False
    worst, where = 0.0, None
    for j, w in enumerate(cw.monomials):
        val = 1
        for xi, wi in zip(x, w):
            val = val * (xi ** wi if not exact else Fraction(xi) ** wi)
        zj = z[j]
        err = abs(float(val) - float(zj)) / max(abs(float(zj)), 1e-300)
        if err > worst:
            worst, where = err, j
    if worst > tol:
        raise ConeError(f"monomial coordinate {where + 1} misses by relative {worst:.3g}")
    return RecoveredState(tuple(x), worst, exact, B)


def cone_states(gs: GaleSystem, cw: CWDecomposition, width: Fraction = Fraction(1, 10**12),
                tol: float = 1e-9):
    """Cone roots (``l = 1``) paired with their recovered states.

    A root whose state misses ``tol`` is refined further before giving up.
    """
    p, interval, roots = cone_roots(gs, width)
    pairs = [refine_until(p, r, width, lambda r: recover_solution(gs, cw, [r.value], tol),
                          (ConeError,)) for r in roots]
    return p, interval, pairs


# -- count agreement -------------------------------------------------------------

@dataclass(frozen=True)
class CorrespondenceReport:
    gale_count: int | None
    oracle_count: int | None
    method: str
    agree: bool
    note: str = ""


def gale_count(system: PolynomialSystem, family=None) -> tuple[int | None, str]:
    cw = decompose(system)
    gs = gale_dual(cw)
    if cw.l == 1:
        p = cleared_polynomial(gs)
        lo, hi = gs.cone_interval()
        if lo >= hi:
            return 0, "sturm(l=1)"
        return count_roots(p, lo, hi), "sturm(l=1)"
    if cw.l == 2 and family is not None:
        from .reversible import build_g_tilde

        g, (lo, hi) = build_g_tilde(family)
        return count_roots(g, lo, hi), "sturm(reversible reduction)"
    return None, "unsupported"


def count_correspondence_check(system: PolynomialSystem, oracle_count: int | None,
                               family=None) -> CorrespondenceReport:
    count, method = gale_count(system, family)
    agree = count is not None and oracle_count is not None and count == oracle_count
    note = "" if count is not None else f"no exact Gale count for l = {decompose(system).l}"
    return CorrespondenceReport(count, oracle_count, method, agree, note)


# -- parameter region (symbolic, l = 1) --------------------------------------------

def _positive_definite(expr) -> bool:
    """True when ``expr`` is a polynomial with only positive coefficients in positive symbols."""
    import sympy as sp

    expr = sp.expand(expr)
    if expr.is_number:
        return bool(expr > 0)
    syms = sorted(expr.free_symbols, key=str)
    try:
        poly = sp.Poly(expr, *syms)
    except sp.PolynomialError:
        return False
    return all(c > 0 for c in poly.coeffs())


def _strip(expr):
    """Drop factors that are positive for positive parameters; return (sign, core)."""
    import sympy as sp

    num, den = sp.fraction(sp.factor(sp.together(expr)))
    sign = 1
    core = sp.Integer(1)
    for part in (num, den):
        c, factors = sp.factor_list(part)
        if c < 0:
            sign = -sign
        for f, e in factors:
            if e % 2 == 0:
                continue
            if _positive_definite(f):
                continue
            if _positive_definite(-f):
                sign = -sign
                continue
            core *= f
    return sign, sp.expand(core)


def region_conditions(gs: GaleSystem) -> list:
    """Inequalities ``expr > 0`` under which every root of the cleared Gale
    polynomial lies in the cone interval, for symbolic rates and ``l = 1``.

    Derived from a Sturm chain with generic (symbolic) coefficients: the
    chain must alternate in sign at the left end of the interval and keep
    one sign at the right end.  Factors that are positive for positive
    parameters are removed; the result is valid off the discriminant locus.
    """
    import sympy as sp

    p = cleared_polynomial(gs)
    y = next(s for s in p.free_symbols if s.name == "y")
    lo, hi = _symbolic_interval(gs)
    chain = [sp.Poly(s, y) for s in sp.sturm(sp.Poly(p, y))]
    conds: list = []

    def add(expr):
        if expr == 0:
            raise GaleError("a Sturm chain entry vanishes identically at an endpoint")
        s, core = _strip(expr)
        if core == 1:
            if s < 0:
                raise GaleError("the region is empty")
            return
        cand = sp.expand(s * core)
        if not any(sp.expand(cand - c) == 0 for c in conds):
            conds.append(cand)

    s0_lo = sp.together(chain[0].as_expr().subs(y, lo))
    sigma, core0 = _strip(s0_lo)
    if core0 != 1:
        raise GaleError("the sign of the cleared polynomial at the cone endpoint is not fixed")
    for i, s in enumerate(chain):
        at_lo = sp.together(s.as_expr().subs(y, lo))
        add(sp.Integer(sigma * (-1) ** i) * at_lo)
        if hi is sp.oo:
            at_hi = s.LC()
        else:
            at_hi = sp.together(s.as_expr().subs(y, hi))
        lc0 = chain[0].LC() if hi is sp.oo else sp.together(chain[0].as_expr().subs(y, hi))
        add(sp.together(at_hi * lc0))
    return conds


def _symbolic_interval(gs: GaleSystem):
    """Cone interval when the largest lower bound is decidable for positive parameters."""
    import sympy as sp

    lows, highs = [], []
    for i in range(gs.m - 1):
        s, t = _sym(gs.D[i][0]), _sym(gs.D[i][1])
        if s == 0:
            continue
        sign, core = _strip(s)
        if core != 1:
            raise GaleError("a cone slope has undetermined sign")
        (lows if sign > 0 else highs).append(sp.simplify(-t / s))

    def extreme(bounds, want):
        for b in bounds:
            if all(o is b or _dominates(b, o, want) for o in bounds):
                return b
        raise GaleError("cone endpoints cannot be ordered symbolically")

    if not lows:
        raise GaleError("the cone interval is unbounded below")
    lo = extreme(lows, +1)
    hi = extreme(highs, -1) if highs else sp.oo
    return lo, hi


def _dominates(b, o, want) -> bool:
    import sympy as sp

    diff = sp.together(want * (b - o))
    if diff == 0:
        return True
    sign, core = _strip(diff)
    return core == 1 and sign > 0
