"""Sparse multivariate polynomial systems (one polynomial per species)."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

Exponent = tuple[int, ...]


def _is_sym(x) -> bool:
    return hasattr(x, "free_symbols")


@dataclass(frozen=True)
class PolynomialSystem:
    """``f_i(x) = sum_w coeff[i][w] * x^w`` for ``i = 1..n``.

    Coefficients are exact rationals or sympy expressions (symbolic rates).
    ``order`` fixes the monomial ordering; when omitted, monomials are sorted
    as: the linear monomials ``x_i`` in species order, the remaining ones in
    order of first appearance, and the constant monomial last.
    """

    species: tuple[str, ...]
    polys: tuple[Mapping[Exponent, object], ...]
    order: tuple[Exponent, ...] = field(default=(), compare=False)

    @property
    def n(self) -> int:
        return len(self.species)

    @property
    def symbolic(self) -> bool:
        return any(_is_sym(c) and not getattr(c, "is_Rational", False)
                   for p in self.polys for c in p.values())

    def monomials(self) -> tuple[Exponent, ...]:
        seen: list[Exponent] = []
        present = {w for p in self.polys for w in p}
        zero = tuple(0 for _ in range(self.n))
        for i in range(self.n):
            e = tuple(int(i == j) for j in range(self.n))
            if e in present:
                seen.append(e)
        rest = [w for w in self.order if w in present] if self.order else []
        for p in self.polys:
            for w in p:
                if w not in rest:
                    rest.append(w)
        for w in rest:
            if w not in seen and w != zero:
                seen.append(w)
        if zero in present:
            seen.append(zero)
        return tuple(seen)

    def zero_rows(self) -> list[int]:
        return [i for i, p in enumerate(self.polys) if not p]

    def evaluate(self, x: Sequence) -> list:
        out = []
        for p in self.polys:
            acc = 0
            for w, c in p.items():
                term = c
                for xi, wi in zip(x, w):
                    if wi:
                        term = term * xi**wi
                acc = acc + term
            out.append(acc)
        return out

    def relative_residuals(self, x: Sequence) -> list[float]:
        """``|f_i(x)| / sum |terms|`` computed exactly when ``x`` is rational."""
        out = []
        for p in self.polys:
            acc = 0
            scale = 0
            for w, c in p.items():
                term = c
                for xi, wi in zip(x, w):
                    if wi:
                        term = term * xi**wi
                acc = acc + term
                scale = scale + abs(term)
            out.append(float(abs(acc) / scale) if scale else 0.0)
        return out

    def derivative(self, i: int, j: int) -> dict[Exponent, object]:
        """``d f_i / d x_j`` as a sparse polynomial."""
        out: dict[Exponent, object] = {}
        for w, c in self.polys[i].items():
            if w[j] == 0:
                continue
            w2 = list(w)
            w2[j] -= 1
            out[tuple(w2)] = out.get(tuple(w2), 0) + c * w[j]
        return out

    def substitute(self, values: Mapping[str, object]) -> "PolynomialSystem":
        """Bind sympy symbols to numbers (exact)."""
        import sympy as sp

        subs = {sp.Symbol(k): sp.nsimplify(v) if not isinstance(v, Fraction)
                else sp.Rational(v.numerator, v.denominator) for k, v in values.items()}
        polys = []
        for p in self.polys:
            q = {}
            for w, c in p.items():
                if _is_sym(c):
                    c = sp.sympify(c).subs(subs)
                    if c.is_Rational:
                        c = Fraction(int(c.p), int(c.q))
                if c != 0:
                    q[w] = c
            polys.append(q)
        return PolynomialSystem(self.species, tuple(polys), self.order)

    def to_sympy(self, symbols=None):
        import sympy as sp

        xs = symbols or sp.symbols(" ".join(self.species)) if self.n > 1 else (
            symbols or (sp.Symbol(self.species[0]),))
        out = []
        for p in self.polys:
            expr = sp.Integer(0)
            for w, c in p.items():
                cc = sp.Rational(c.numerator, c.denominator) if isinstance(c, Fraction) else sp.sympify(c)
                expr += cc * sp.Mul(*[x**e for x, e in zip(xs, w)])
            out.append(sp.expand(expr))
        return out, tuple(xs)

    def to_text(self) -> str:
        eqs, _ = self.to_sympy()
        return "\n".join(f"f{i + 1} = {e}" for i, e in enumerate(eqs))
