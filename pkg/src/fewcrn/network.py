"""Reaction networks: data model, text format and mass-action equations.

Network files are line oriented::

    # comment
    X1 + X2 -> 5 X1 + 17 X2 @ l
    0 <-> X1 @ k1, k2

A rate is a symbol, a decimal (converted exactly, ``0.25 == 1/4``) or a
fraction ``p/q``.  Species are numbered in order of first appearance.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .linalg import nullspace, transpose
from .polysys import PolynomialSystem

Rate = Union[str, Fraction]


class NetworkError(ValueError):
    """Structurally invalid network (duplicate or degenerate reactions, ...)."""


class NetworkSyntaxError(NetworkError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class UnboundRateError(KeyError):
    """A symbolic rate has no numeric value at evaluation time."""

    def __str__(self) -> str:
        return f"unbound rate symbol(s): {', '.join(self.args[0])}"


@dataclass(frozen=True)
class Species:
    name: str
    index: int


@dataclass(frozen=True)
class Complex:
    """Nonnegative integer combination of species, stored sorted by name."""

    terms: tuple[tuple[str, int], ...] = ()

    @classmethod
    def of(cls, mapping: Mapping[str, int]) -> "Complex":
        for name, c in mapping.items():
            if not isinstance(c, int) or c < 0:
                raise NetworkError(f"stoichiometric coefficient of {name} must be a nonnegative integer")
        return cls(tuple(sorted((k, v) for k, v in mapping.items() if v)))

    def __getitem__(self, name: str) -> int:
        return dict(self.terms).get(name, 0)

    def species(self) -> tuple[str, ...]:
        return tuple(k for k, _ in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def restrict(self, keep: Iterable[str]) -> "Complex":
        keep = set(keep)
        return Complex(tuple((k, v) for k, v in self.terms if k in keep))

    def format(self, order: Sequence[str]) -> str:
        if not self.terms:
            return "0"
        d = dict(self.terms)
        parts = [name if d[name] == 1 else f"{d[name]} {name}" for name in order if name in d]
        return " + ".join(parts)


@dataclass(frozen=True)
class Reaction:
    reactant: Complex
    product: Complex
    rate: Rate

    def __post_init__(self):
        if self.reactant == self.product:
            raise NetworkError("reactant equals product")
        if isinstance(self.rate, Fraction) and self.rate <= 0:
            raise NetworkError("rate constants must be positive")

    @property
    def ends(self) -> tuple[Complex, Complex]:
        return self.reactant, self.product


@dataclass(frozen=True)
class ReactionNetwork:
    species: tuple[str, ...]
    reactions: tuple[Reaction, ...]

    def __post_init__(self):
        if len(set(self.species)) != len(self.species):
            raise NetworkError("species names must be unique")
        seen = set()
        used = set()
        for i, r in enumerate(self.reactions):
            if r.ends in seen:
                raise NetworkError(f"duplicate reaction #{i + 1}")
            seen.add(r.ends)
            used.update(r.reactant.species(), r.product.species())
        if used - set(self.species):
            raise NetworkError(f"unknown species: {sorted(used - set(self.species))}")

    @property
    def n(self) -> int:
        return len(self.species)

    @property
    def species_records(self) -> tuple[Species, ...]:
        return tuple(Species(s, i) for i, s in enumerate(self.species))

    def reactant_matrix(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(r.reactant[s] for r in self.reactions) for s in self.species)

    def product_matrix(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(r.product[s] for r in self.reactions) for s in self.species)

    def stoichiometric_matrix(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(r.product[s] - r.reactant[s] for r in self.reactions)
                     for s in self.species)

    def rate_symbols(self) -> tuple[str, ...]:
        out: list[str] = []
        for r in self.reactions:
            if isinstance(r.rate, str) and r.rate not in out:
                out.append(r.rate)
        return tuple(out)

    def exponent(self, c: Complex) -> tuple[int, ...]:
        return tuple(c[s] for s in self.species)


# -- parsing ---------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>[ \t]+)
  | (?P<arrow><->|->)
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?(?:/\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[+@,\-*])
""", re.VERBOSE)


def _tokenize(line: str, lineno: int) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(line):
        m = _TOKEN.match(line, pos)
        if not m:
            raise NetworkSyntaxError(f"unexpected character {line[pos]!r}", lineno, pos + 1)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos + 1))
        pos = m.end()
    return tokens


def parse_rate(text: str) -> Rate:
    """Exact value of a numeric literal, or the symbol name itself."""
    if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", text):
        return text
    if "/" in text:
        num, den = text.split("/")
        if not re.fullmatch(r"\d+", num):
            raise ValueError(f"malformed fraction {text!r}")
        if int(den) == 0:
            raise ValueError("zero denominator")
        return Fraction(int(num), int(den))
    return Fraction(text)


class _LineParser:
    def __init__(self, tokens, lineno: int, eol_col: int):
        self.toks = tokens
        self.i = 0
        self.line = lineno
        self.eol = eol_col

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else ("eol", "", self.eol)

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def error(self, msg: str, tok=None):
        tok = tok or self.peek()
        raise NetworkSyntaxError(msg, self.line, tok[2])

    def complex(self, order: list[str]) -> Complex:
        kind, text, col = self.peek()
        if kind == "number" and text == "0":
            self.take()
            if self.peek()[0] == "op" and self.peek()[1] == "+":
                self.error("the zero complex cannot be combined with other terms")
            return Complex()
        counts: dict[str, int] = {}
        while True:
            coeff = 1
            kind, text, col = self.peek()
            if kind == "op" and text == "-":
                self.error("negative stoichiometry is not allowed")
            if kind == "number":
                if not re.fullmatch(r"\d+", text):
                    self.error(f"non-integer stoichiometry {text!r}")
                coeff = int(text)
                self.take()
                if self.peek()[0] == "op" and self.peek()[1] == "*":
                    self.take()
                kind, text, col = self.peek()
            if kind != "ident":
                self.error("expected a species name")
            self.take()
            if text not in order:
                order.append(text)
            counts[text] = counts.get(text, 0) + coeff
            if self.peek()[0] == "op" and self.peek()[1] == "+":
                self.take()
                continue
            break
        return Complex.of(counts)

    def rate(self) -> Rate:
        kind, text, col = self.take()
        if kind == "op" and text == "-":
            self.error("rate constants must be positive", (kind, text, col))
        if kind not in ("ident", "number"):
            self.error("expected a rate (symbol, decimal or p/q)", (kind, text, col))
        try:
            r = parse_rate(text)
        except (ValueError, ZeroDivisionError) as exc:
            self.error(str(exc), (kind, text, col))
        if isinstance(r, Fraction) and r <= 0:
            self.error("rate constants must be positive", (kind, text, col))
        return r


def parse_network(text: str) -> ReactionNetwork:
    order: list[str] = []
    reactions: list[Reaction] = []
    where: dict[tuple[Complex, Complex], int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        p = _LineParser(_tokenize(line, lineno), lineno, len(line) + 1)
        lhs = p.complex(order)
        kind, arrow, col = p.take()
        if kind != "arrow":
            p.error("expected '->' or '<->'", (kind, arrow, col))
        rhs = p.complex(order)
        kind, text_, col = p.take()
        if (kind, text_) != ("op", "@"):
            p.error("expected '@' followed by a rate", (kind, text_, col))
        rates = [p.rate()]
        if p.peek()[:2] == ("op", ","):
            p.take()
            rates.append(p.rate())
        if p.peek()[0] != "eol":
            p.error("unexpected trailing input")
        if lhs == rhs:
            raise NetworkSyntaxError("reactant equals product", lineno, 1)
        if arrow == "<->":
            if len(rates) != 2:
                raise NetworkSyntaxError("'<->' requires two rates (forward, reverse)", lineno, col)
            pairs = [(lhs, rhs, rates[0]), (rhs, lhs, rates[1])]
        else:
            if len(rates) != 1:
                raise NetworkSyntaxError("'->' takes exactly one rate", lineno, col)
            pairs = [(lhs, rhs, rates[0])]
        for a, b, k in pairs:
            if (a, b) in where:
                raise NetworkSyntaxError(
                    f"duplicate reaction (first given on line {where[(a, b)]})", lineno, 1)
            where[(a, b)] = lineno
            reactions.append(Reaction(a, b, k))
    return ReactionNetwork(tuple(order), tuple(reactions))


def format_rate(r: Rate) -> str:
    return r if isinstance(r, str) else str(r)


def format_network(net: ReactionNetwork) -> str:
    """Canonical text; ``parse_network(format_network(net)) == net``."""
    lines = []
    for r in net.reactions:
        lines.append(f"{r.reactant.format(net.species)} -> {r.product.format(net.species)}"
                     f" @ {format_rate(r.rate)}")
    return "\n".join(lines) + ("\n" if lines else "")


# -- mass action -----------------------------------------------------------

def resolve_rates(net: ReactionNetwork, rates: Mapping[str, object] | None = None,
                  symbolic: bool = False) -> list:
    """Rate value per reaction: Fractions, or sympy expressions if ``symbolic``."""
    rates = dict(rates or {})
    if symbolic:
        import sympy as sp

        out = []
        for r in net.reactions:
            v = rates.get(r.rate, r.rate) if isinstance(r.rate, str) else r.rate
            if isinstance(v, str):
                out.append(sp.Symbol(v, positive=True))
            else:
                v = Fraction(v)
                out.append(sp.Rational(v.numerator, v.denominator))
        return out
    missing = [s for s in net.rate_symbols() if s not in rates]
    if missing:
        raise UnboundRateError(missing)
    out = []
    for r in net.reactions:
        v = Fraction(rates[r.rate]) if isinstance(r.rate, str) else r.rate
        if v <= 0:
            raise NetworkError(f"rate {r.rate} must be positive, got {v}")
        out.append(v)
    return out


def mass_action_system(net: ReactionNetwork, rates: Mapping[str, object] | None = None,
                       symbolic: bool = False) -> PolynomialSystem:
    """``f_i = sum_j (b_ij - a_ij) k_j x^{a_j}`` with exact coefficients.

    Rows that vanish identically are kept (as empty mappings) and can be
    listed with ``PolynomialSystem.zero_rows``.
    """
    values = resolve_rates(net, rates, symbolic)
    polys: list[dict] = [{} for _ in net.species]
    order: list[tuple[int, ...]] = []
    for r, k in zip(net.reactions, values):
        w = net.exponent(r.reactant)
        if w not in order:
            order.append(w)
        for i, s in enumerate(net.species):
            d = r.product[s] - r.reactant[s]
            if d:
                polys[i][w] = polys[i].get(w, 0) + d * k
    if symbolic:
        import sympy as sp

        polys = [{w: sp.expand(c) for w, c in p.items()} for p in polys]
    polys = [{w: c for w, c in p.items() if c != 0} for p in polys]
    return PolynomialSystem(net.species, tuple(polys), tuple(order))


# -- structural transformations ---------------------------------------------

def embedded_network(net: ReactionNetwork, keep: Iterable[str]) -> ReactionNetwork:
    keep = list(keep)
    unknown = set(keep) - set(net.species)
    if unknown:
        raise NetworkError(f"unknown species: {sorted(unknown)}")
    if not keep:
        raise NetworkError("the species subset to keep is empty")
    species = tuple(s for s in net.species if s in keep)
    out: list[Reaction] = []
    seen = set()
    for r in net.reactions:
        a, b = r.reactant.restrict(species), r.product.restrict(species)
        if a == b or (a, b) in seen:
            continue
        seen.add((a, b))
        out.append(Reaction(a, b, r.rate))
    used = {s for r in out for s in r.reactant.species() + r.product.species()}
    return ReactionNetwork(tuple(s for s in species if s in used) if out else species, tuple(out))


def add_reverse_reaction(net: ReactionNetwork, index: int, rate: Rate | None = None) -> ReactionNetwork:
    r = net.reactions[index]
    if any(q.ends == (r.product, r.reactant) for q in net.reactions):
        raise NetworkError(f"reaction #{index + 1} already has its reverse")
    if rate is None:
        taken = set(net.rate_symbols())
        base = f"{r.rate}_rev" if isinstance(r.rate, str) else f"k_rev{index + 1}"
        rate, i = base, 1
        while rate in taken:
            i += 1
            rate = f"{base}{i}"
    rev = Reaction(r.product, r.reactant, rate)
    return ReactionNetwork(net.species, net.reactions + (rev,))


def conservation_laws(net: ReactionNetwork) -> tuple[tuple[Fraction, ...], ...]:
    """Rows spanning the left kernel of the stoichiometric matrix."""
    n = net.n
    if not net.reactions:
        return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))
    k = nullspace(transpose(net.stoichiometric_matrix()), n)
    return transpose(k) if k and k[0] else ()


# -- family detection --------------------------------------------------------

class FamilyKind(enum.Enum):
    IRREVERSIBLE = "IrreversibleFamily"
    REVERSIBLE = "ReversibleFamily"
    GENERAL = "General"


@dataclass(frozen=True)
class FamilyTag:
    """Shape of the one-reaction families plus where each rate lives.

    ``inflow[i]``/``outflow[i]`` are the rates of ``0 -> X_i`` and
    ``X_i -> 0``; ``nonflow`` holds ``(l,)`` or ``(l1, l2)``.
    """

    kind: FamilyKind
    species: tuple[str, ...] = ()
    a: tuple[int, ...] = ()
    b: tuple[int, ...] = ()
    inflow: tuple[Rate, ...] = ()
    outflow: tuple[Rate, ...] = ()
    nonflow: tuple[Rate, ...] = ()

    @property
    def is_family(self) -> bool:
        return self.kind is not FamilyKind.GENERAL

    def values(self, rates: Mapping[str, object] | None = None):
        """``(k, c, ells)`` as Fractions, binding symbols from ``rates``."""
        rates = dict(rates or {})

        def val(r):
            if isinstance(r, str):
                if r not in rates:
                    raise UnboundRateError([r])
                v = Fraction(rates[r])
            else:
                v = r
            if v <= 0:
                raise NetworkError(f"rate {r} must be positive, got {v}")
            return v

        return (tuple(map(val, self.inflow)), tuple(map(val, self.outflow)),
                tuple(map(val, self.nonflow)))


def detect_family(net: ReactionNetwork) -> FamilyTag:
    general = FamilyTag(FamilyKind.GENERAL, net.species)
    inflow: dict[str, Rate] = {}
    outflow: dict[str, Rate] = {}
    nonflow: list[Reaction] = []
    for r in net.reactions:
        if r.reactant.is_zero() and len(r.product.terms) == 1 and r.product.terms[0][1] == 1:
            inflow[r.product.terms[0][0]] = r.rate
        elif r.product.is_zero() and len(r.reactant.terms) == 1 and r.reactant.terms[0][1] == 1:
            outflow[r.reactant.terms[0][0]] = r.rate
        else:
            nonflow.append(r)
    if set(inflow) != set(net.species) or set(outflow) != set(net.species):
        return general
    common = dict(species=net.species,
                  inflow=tuple(inflow[s] for s in net.species),
                  outflow=tuple(outflow[s] for s in net.species))
    if len(nonflow) == 1:
        r = nonflow[0]
        return FamilyTag(FamilyKind.IRREVERSIBLE, a=net.exponent(r.reactant),
                         b=net.exponent(r.product), nonflow=(r.rate,), **common)
    if len(nonflow) == 2:
        r1, r2 = nonflow
        if r1.ends == (r2.product, r2.reactant):
            return FamilyTag(FamilyKind.REVERSIBLE, a=net.exponent(r1.reactant),
                             b=net.exponent(r1.product), nonflow=(r1.rate, r2.rate), **common)
    return general


def family_network(a: Sequence[int], b: Sequence[int], reversible: bool = False,
                   names: Sequence[str] | None = None) -> ReactionNetwork:
    """Build the family network with symbolic rates ``k_i``, ``c_i``, ``l``."""
    n = len(a)
    names = list(names or [f"X{i + 1}" for i in range(n)])
    lhs = Complex.of(dict(zip(names, a)))
    rhs = Complex.of(dict(zip(names, b)))
    rs = [Reaction(lhs, rhs, "l1" if reversible else "l")]
    if reversible:
        rs.append(Reaction(rhs, lhs, "l2"))
    for i, s in enumerate(names):
        x = Complex(((s, 1),))
        rs += [Reaction(Complex(), x, f"k{i + 1}"), Reaction(x, Complex(), f"c{i + 1}")]
    # renumber species by first appearance so that parse(format(net)) == net
    order: list[str] = []
    for r in rs:
        for s, _ in r.reactant.terms + r.product.terms:
            if s not in order:
                order.append(s)
    return ReactionNetwork(tuple(order), tuple(rs))
