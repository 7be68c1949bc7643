"""Exact univariate polynomials over Q with Sturm-based real root counting.

Coefficients are stored densely in ascending degree as ``Fraction``.  All
decisions (counts, multiplicities, signs at endpoints) are exact; floating
point only appears in :meth:`Poly.eval_float` and in reported decimals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Callable, Iterable, Sequence, Union

Number = Union[int, Fraction]
Bound = Union[int, Fraction, float]  # float only for +-inf

INF = math.inf


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError("non-finite coefficient")
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    # sympy Rational and friends
    try:
        return Fraction(int(x.p), int(x.q))
    except AttributeError:
        raise TypeError(f"cannot convert {x!r} to an exact rational") from None


class Poly:
    """Dense polynomial in one variable with rational coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [_frac(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    # -- construction -------------------------------------------------
    @classmethod
    def const(cls, c) -> "Poly":
        return cls([c])

    @classmethod
    def x(cls) -> "Poly":
        return cls([0, 1])

    @classmethod
    def linear(cls, slope, intercept) -> "Poly":
        """``slope*y + intercept``."""
        return cls([intercept, slope])

    @classmethod
    def from_roots(cls, roots: Sequence[Number], mults: Sequence[int] | None = None,
                   lead: Number = 1) -> "Poly":
        mults = mults if mults is not None else [1] * len(roots)
        p = cls([lead])
        for r, m in zip(roots, mults):
            p = p * cls([-_frac(r), 1]) ** m
        return p

    # -- basic properties ---------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self) -> Fraction:
        if not self.coeffs:
            return Fraction(0)
        return self.coeffs[-1]

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Poly([other]).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Poly({[str(c) for c in self.coeffs]})"

    def __str__(self) -> str:
        return self.to_str()

    def to_str(self, var: str = "y") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if i == 0:
                body = str(a)
            else:
                mono = var if i == 1 else f"{var}**{i}"
                body = mono if a == 1 else f"{a}*{mono}"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        return Poly([other])

    def __add__(self, other) -> "Poly":
        o = self._coerce(other).coeffs
        s = self.coeffs
        n = max(len(s), len(o))
        return Poly([(s[i] if i < len(s) else 0) + (o[i] if i < len(o) else 0) for i in range(n)])

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other) -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Poly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            c = _frac(other)
            return Poly([c * a for a in self.coeffs])
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative power")
        result = Poly([1])
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __truediv__(self, c) -> "Poly":
        c = _frac(c)
        return Poly([a / c for a in self.coeffs])

    def __divmod__(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        d = other.coeffs
        dl = d[-1]
        q = [Fraction(0)] * max(0, len(r) - len(d) + 1)
        for i in range(len(r) - len(d), -1, -1):
            f = r[i + len(d) - 1] / dl
            q[i] = f
            if f:
                for j, dj in enumerate(d):
                    r[i + j] -= f * dj
        return Poly(q), Poly(r[: len(d) - 1])

    def __floordiv__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[1]

    def exact_div(self, other: "Poly") -> "Poly":
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ArithmeticError("division is not exact")
        return q

    # -- calculus and transforms --------------------------------------
    def derivative(self, k: int = 1) -> "Poly":
        p = self
        for _ in range(k):
            p = Poly([i * c for i, c in enumerate(p.coeffs)][1:])
        return p

    def shift(self, c) -> "Poly":
        """Return ``p(y + c)``."""
        c = _frac(c)
        out = Poly()
        for a in reversed(self.coeffs):
            out = out * Poly([c, 1]) + a
        return out

    def reflect(self) -> "Poly":
        """Return ``p(-y)``."""
        return Poly([c if i % 2 == 0 else -c for i, c in enumerate(self.coeffs)])

    def compose(self, q: "Poly") -> "Poly":
        out = Poly()
        for a in reversed(self.coeffs):
            out = out * q + a
        return out

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return self / self.lc

    def primitive(self) -> "Poly":
        """Positive rescaling with coprime integer coefficients (sign kept)."""
        ints = _primitive_ints(self.coeffs)
        return Poly(ints)

    # -- evaluation ---------------------------------------------------
    def __call__(self, y):
        if isinstance(y, float):
            return self.eval_float(y)
        y = _frac(y) if not isinstance(y, (int, Fraction)) else y
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * y + c
        return acc

    def eval_float(self, y: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * y + float(c)
        return acc

    def sign_at(self, y: Number) -> int:
        return _sign(_int_eval_sign(_primitive_ints(self.coeffs), _frac(y)))

    def to_sympy(self, var=None):
        import sympy as sp

        var = var if var is not None else sp.Symbol("y")
        return sp.Add(*[sp.Rational(c.numerator, c.denominator) * var**i
                        for i, c in enumerate(self.coeffs)])


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd (zero if both are zero)."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def _sign(x) -> int:
    return (x > 0) - (x < 0)


# -- integer kernels used on hot paths --------------------------------------

def _primitive_ints(coeffs: Sequence[Fraction]) -> list[int]:
    """Scale by a positive rational to coprime integers."""
    if not coeffs:
        return []
    den = reduce(lambda acc, c: acc * c.denominator // math.gcd(acc, c.denominator), coeffs, 1)
    ints = [int(c * den) for c in coeffs]
    g = reduce(math.gcd, ints, 0)
    if g > 1:
        ints = [c // g for c in ints]
    return ints


def _trim(ints: list[int]) -> list[int]:
    while ints and ints[-1] == 0:
        ints.pop()
    return ints


def _int_primitive(ints: list[int]) -> list[int]:
    g = reduce(math.gcd, ints, 0)
    if g > 1:
        return [c // g for c in ints]
    return ints


def _int_eval_sign(ints: Sequence[int], y: Fraction) -> int:
    """Sign of the polynomial at rational ``y`` via homogenized integer Horner."""
    if not ints:
        return 0
    p, q = y.numerator, y.denominator
    acc = 0
    qpow = 1
    # sum c_i p^i q^(d-i): Horner in p with q-weights
    for c in reversed(ints):
        acc = acc * p + c * qpow
        qpow *= q
    return _sign(acc)


def _int_prem_sturm(a: list[int], b: list[int]) -> list[int]:
    """Sign-correct negated remainder of a by b, made primitive.

    Returns a positive multiple of ``-rem(a, b)``.
    """
    r = list(a)
    db = len(b) - 1
    lb = b[-1]
    delta = len(a) - len(b)
    if delta < 0:
        out = [-c for c in r]
        return _int_primitive(_trim(out))
    for i in range(len(r) - len(b), -1, -1):
        top = r[i + db]
        r = [c * lb for c in r]
        if top:
            for j, bj in enumerate(b):
                r[i + j] -= top * bj
        r.pop()
    # r = lb^(delta+1) * rem(a, b)
    sgn = 1 if (lb > 0 or (delta + 1) % 2 == 0) else -1
    out = [-sgn * c for c in r]
    return _int_primitive(_trim(out))


def _int_derivative(ints: list[int]) -> list[int]:
    return _int_primitive([i * c for i, c in enumerate(ints)][1:])


def _int_sturm_chain(ints: list[int]) -> list[list[int]]:
    chain = [ints, _int_derivative(ints)]
    while len(chain[-1]) > 1:
        nxt = _int_prem_sturm(chain[-2], chain[-1])
        if not nxt:
            break
        chain.append(nxt)
    return chain


def _variations_at(chain: Sequence[Sequence[int]], y: Fraction) -> int:
    signs = [s for s in (_int_eval_sign(c, y) for c in chain) if s]
    return sum(1 for u, v in zip(signs, signs[1:]) if u != v)


# -- public root machinery --------------------------------------------------

def sturm_sequence(p: Poly, normalize: bool = False) -> list[Poly]:
    """Canonical Sturm chain ``p, p', -rem(...), ...``.

    The chain stops at the last nonzero remainder, which is a nonzero
    constant exactly when ``p`` is square-free.  With ``normalize`` every
    element is rescaled by a positive constant to coprime integers.
    """
    if p.is_zero():
        raise ValueError("Sturm sequence of the zero polynomial")
    if normalize:
        return [Poly(c) for c in _int_sturm_chain(_primitive_ints(p.coeffs))]
    chain = [p, p.derivative()]
    if chain[-1].is_zero():
        return chain[:1]
    while chain[-1].degree > 0:
        r = -(chain[-2] % chain[-1])
        if r.is_zero():
            break
        chain.append(r)
    return chain


def sign_variations(values: Iterable) -> int:
    signs = [_sign(v) for v in values]
    signs = [s for s in signs if s]
    return sum(1 for u, v in zip(signs, signs[1:]) if u != v)


def cauchy_bound(p: Poly) -> Fraction:
    """``1 + max|a_i| / |a_deg|``: every real root lies strictly inside."""
    if p.degree < 1:
        return Fraction(1)
    lead = abs(p.lc)
    return 1 + max(abs(c) for c in p.coeffs[:-1]) / lead


def _finite_bounds(p: Poly, lo: Bound, hi: Bound) -> tuple[Fraction, Fraction]:
    b = None
    if lo == -INF or hi == INF:
        b = 1 + cauchy_bound(p)
    flo = -b if lo == -INF else _frac(lo)
    fhi = b if hi == INF else _frac(hi)
    return flo, fhi


def deflate_endpoints(p: Poly, lo: Bound, hi: Bound) -> Poly:
    """Divide out exact roots sitting at finite endpoints (open interval)."""
    for e in (lo, hi):
        if isinstance(e, float):
            continue
        e = _frac(e)
        lin = Poly([-e, 1])
        while p.degree >= 1 and p(e) == 0:
            p = p.exact_div(lin)
    return p


def count_roots(p: Poly, lo: Bound = -INF, hi: Bound = INF) -> int:
    """Number of distinct real roots of ``p`` in the open interval ``(lo, hi)``."""
    if p.is_zero():
        raise ValueError("cannot count roots of the zero polynomial")
    if not lo < hi:
        return 0
    p = deflate_endpoints(p, lo, hi)
    if p.degree < 1:
        return 0
    flo, fhi = _finite_bounds(p, lo, hi)
    if not flo < fhi:
        return 0
    chain = _int_sturm_chain(_primitive_ints(p.coeffs))
    return _variations_at(chain, flo) - _variations_at(chain, fhi)


def squarefree_decomposition(p: Poly) -> list[tuple[Poly, int]]:
    """Yun's algorithm: ``p = lc * prod(f_i ** i)`` with monic square-free ``f_i``."""
    if p.degree < 1:
        return []
    out = []
    dp = p.derivative()
    a = poly_gcd(p, dp)
    b = p.exact_div(a)
    c = dp.exact_div(a)
    d = c - b.derivative()
    i = 1
    while b.degree >= 1:
        a = poly_gcd(b, d)
        b = b.exact_div(a)
        c = d.exact_div(a)
        d = c - b.derivative()
        if a.degree >= 1:
            out.append((a.monic(), i))
        i += 1
    return out


def is_squarefree(p: Poly) -> bool:
    return poly_gcd(p, p.derivative()).degree < 1


@dataclass(frozen=True)
class IsolatedRoot:
    """One distinct real root.

    ``lo < root < hi`` for isolated roots; when the root is an exactly
    located rational, ``exact`` is set and ``lo == hi == value``.
    """

    lo: Fraction
    hi: Fraction
    multiplicity: int
    value: Fraction
    exact: bool = False

    def __float__(self) -> float:
        return float(self.value)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo


def _isolate_squarefree(f: Poly, lo: Fraction, hi: Fraction, width: Fraction,
                        mult: int) -> list[IsolatedRoot]:
    ints = _primitive_ints(f.coeffs)
    chain = _int_sturm_chain(ints)
    out: list[IsolatedRoot] = []

    def var(y):
        return _variations_at(chain, y)

    stack = [(lo, hi, var(lo), var(hi))]
    while stack:
        a, b, va, vb = stack.pop()
        n = va - vb
        if n <= 0:
            continue
        if n == 1:
            out.append(_refine(ints, a, b, width, mult))
            continue
        m = (a + b) / 2
        if _int_eval_sign(ints, m) == 0:
            out.append(IsolatedRoot(m, m, mult, m, True))
            # f is square-free, so deflating m leaves the other roots simple
            rest = f.exact_div(Poly([-m, 1]))
            if rest.degree >= 1:
                out.extend(_isolate_squarefree(rest, a, b, width, mult))
            continue
        vm = var(m)
        stack.append((a, m, va, vm))
        stack.append((m, b, vm, vb))
    return out


def _refine(ints: list[int], a: Fraction, b: Fraction, width: Fraction, mult: int) -> IsolatedRoot:
    if a < 0 < b:
        # split at 0 so the stopping rule below is relative to the root
        s0 = _int_eval_sign(ints, Fraction(0))
        if s0 == 0:
            return IsolatedRoot(Fraction(0), Fraction(0), mult, Fraction(0), True)
        if s0 == _int_eval_sign(ints, a):
            a = Fraction(0)
        else:
            b = Fraction(0)
    sa = _int_eval_sign(ints, a)
    while True:
        tol = width * max(abs(a), abs(b))
        if b - a <= tol:
            break
        m = (a + b) / 2
        sm = _int_eval_sign(ints, m)
        if sm == 0:
            return IsolatedRoot(m, m, mult, m, True)
        if sm == sa:
            a = m
        else:
            b = m
    # snap to a nearby small-denominator rational if it is an exact root
    q = ((a + b) / 2).limit_denominator(10**6)
    if a <= q <= b and _int_eval_sign(ints, q) == 0:
        return IsolatedRoot(q, q, mult, q, True)
    return IsolatedRoot(a, b, mult, (a + b) / 2, False)


def isolate_and_refine(p: Poly, lo: Bound = -INF, hi: Bound = INF,
                       width: Number = Fraction(1, 10**12)) -> list[IsolatedRoot]:
    """Isolate every distinct real root in ``(lo, hi)`` and refine it.

    Intervals are shrunk by bisection until ``hi - lo <= width * max(|lo|, |hi|)``.
    Multiplicities come from the exact square-free decomposition.
    """
    width = _frac(width)
    if width <= 0:
        raise ValueError("refinement width must be positive")
    if p.is_zero():
        raise ValueError("cannot isolate roots of the zero polynomial")
    if not lo < hi:
        return []
    # endpoint roots do not belong to the open interval; the multiplicity of
    # interior roots is unaffected by deflation
    p = deflate_endpoints(p, lo, hi)
    if p.degree < 1:
        return []
    flo, fhi = _finite_bounds(p, lo, hi)
    roots: list[IsolatedRoot] = []
    for f, mult in squarefree_decomposition(p):
        roots.extend(_isolate_squarefree(f, flo, fhi, width, mult))
    roots.sort(key=lambda r: r.value)
    return roots


def descartes_bound(p: Poly, positive: bool = True) -> int:
    """Coefficient sign changes of ``p(y)`` (or of ``p(-y)``)."""
    q = p if positive else p.reflect()
    return sign_variations(q.coeffs)


def squarefree_part(p: Poly) -> Poly:
    return p.exact_div(poly_gcd(p, p.derivative())) if p.degree >= 1 else p


def sign_at_root(t: Poly, f: Poly, root: IsolatedRoot) -> int:
    """Exact sign of ``t`` at the root of ``f`` isolated by ``root``.

    The isolating interval is bisected until ``t`` keeps one sign on its
    closure; a common root is detected through ``gcd(t, f)``.
    """
    if root.exact:
        return t.sign_at(root.value)
    if t.is_zero():
        return 0
    lo, hi = root.lo, root.hi
    g = poly_gcd(t, f)
    if g.degree >= 1 and count_roots(g, lo, hi) > 0:
        return 0
    fs = squarefree_part(f)
    s_lo = fs.sign_at(lo)
    while True:
        if t.sign_at(lo) != 0 and t.sign_at(hi) != 0 and count_roots(t, lo, hi) == 0:
            return t.sign_at(lo)
        m = (lo + hi) / 2
        sm = fs.sign_at(m)
        if sm == 0:
            return t.sign_at(m)
        if sm == s_lo:
            lo = m
        else:
            hi = m


def refine_until(p: Poly, root: IsolatedRoot, width: Number, attempt: Callable,
                 errors: tuple = (ArithmeticError, ValueError), rounds: int = 7):
    """Run ``attempt(root)``, shrinking the root's bracket by ``10^4`` after each failure.

    Roots close to a pole of the back map need tighter brackets than the
    default width gives. Returns ``(root, attempt(root))`` for the first
    success and re-raises the last error once ``rounds`` retries are spent.
    """
    width = _frac(width)
    for i in range(rounds + 1):
        try:
            return root, attempt(root)
        except errors:
            if root.exact or i == rounds:
                raise
            width /= 10**4
            (root,) = isolate_and_refine(p, root.lo, root.hi, width)
