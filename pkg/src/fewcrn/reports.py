"""JSON-serializable report schemas.

Exact rationals travel as ``"p/q"`` strings so nothing is lost across the
CLI boundary; decimals are only added alongside for readability.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

SCHEMA_VERSION = "1"


def q(x) -> Optional[str]:
    """Exact rational as ``"p/q"``; infinities as ``"inf"``/``"-inf"``."""
    if x is None:
        return None
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}"


def unq(s: str) -> Fraction | float:
    if s in ("inf", "-inf"):
        return math.inf if s == "inf" else -math.inf
    return Fraction(s)


def dec(x, digits: int = 12) -> Optional[str]:
    """Readable decimal rendering (never parsed back)."""
    if x is None:
        return None
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{float(x):.{digits}g}"


class _Model(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class RootModel(_Model):
    lo: str
    hi: str
    value: str
    decimal: str
    multiplicity: int
    exact: bool

    @classmethod
    def of(cls, r) -> "RootModel":
        return cls(lo=q(r.lo), hi=q(r.hi), value=q(r.value), decimal=dec(r.value),
                   multiplicity=r.multiplicity, exact=r.exact)


class StabilityModel(_Model):
    label: str
    method: str
    certificates: dict[str, str] = Field(default_factory=dict)

    @classmethod
    def of(cls, v) -> "StabilityModel":
        certs = {}
        for k, val in v.certificates.items():
            if isinstance(val, (int, Fraction)):
                certs[k] = q(val)
            elif isinstance(val, list):
                certs[k] = ", ".join(dec(x) if not isinstance(x, complex) else
                                     f"{x.real:.6g}{x.imag:+.6g}j" for x in val)
            else:
                certs[k] = dec(val) if isinstance(val, float) else str(val)
        return cls(label=v.label.value, method=v.method.value, certificates=certs)


class StateModel(_Model):
    x: list[str]
    decimal: list[str]
    exact: bool
    residual: float
    stability: Optional[StabilityModel] = None


class ClassificationModel(_Model):
    case: str
    max_count: Optional[int]
    exact_count: Optional[int]
    count_with_multiplicity: Optional[int] = None
    nondegenerate: Optional[bool] = None
    method: str
    gamma: Optional[str] = None
    theta: Optional[str] = None
    t_h_at_0: Optional[str] = None
    t_h_sign: Optional[int] = None
    xi: Optional[str] = None
    y_star: Optional[str] = None
    certificates: dict[str, str] = Field(default_factory=dict)


class BoundsModel(_Model):
    max_count: Optional[int] = None
    mixed_sign_bound: Optional[int] = None
    bernstein: Optional[int] = None
    bates: Optional[str] = None


class NetworkModel(_Model):
    species: list[str]
    reactions: list[str]
    family: str
    a: list[int] = Field(default_factory=list)
    b: list[int] = Field(default_factory=list)


class ProvenanceModel(_Model):
    tool: str
    versions: dict[str, str]
    seed: Optional[int] = None
    width: str
    tol: float
    params: dict[str, str] = Field(default_factory=dict)
    timing_s: Optional[float] = None


class AnalysisReport(_Model):
    schema_version: str = SCHEMA_VERSION
    network: NetworkModel
    normalized: dict[str, list[str] | str] = Field(default_factory=dict)
    gale_polynomial: Optional[str] = None
    interval: list[str] = Field(default_factory=list)
    classification: ClassificationModel
    roots: list[RootModel] = Field(default_factory=list)
    states: list[StateModel] = Field(default_factory=list)
    bounds: BoundsModel = Field(default_factory=BoundsModel)
    notes: list[str] = Field(default_factory=list)
    provenance: ProvenanceModel

    @property
    def has_degenerate(self) -> bool:
        bad = {"Degenerate", "Inconclusive"}
        return (self.classification.nondegenerate is False
                or any(s.stability and s.stability.label in bad for s in self.states))


class WitnessModel(_Model):
    count: int
    source: str
    draw: Optional[int] = None
    params: dict[str, str]


class FindMultiReport(_Model):
    schema_version: str = SCHEMA_VERSION
    network: NetworkModel
    target: int
    strategy: str
    seed: int
    samples: int
    reachable: bool
    reason: str
    witnesses: list[WitnessModel] = Field(default_factory=list)


class ShapeModel(_Model):
    a: list[int]
    b: list[int]
    bound: int
    samples: int
    max_count: int
    bound_attained: bool
    histogram: dict[str, int]
    witnesses: list[dict[str, str | int | list[str]]] = Field(default_factory=list)
    exceeding_three: list[dict[str, str | int | list[str]]] = Field(default_factory=list)
    bound_violations: list[dict[str, str | int | list[str]]] = Field(default_factory=list)


class ConjectureReport(_Model):
    schema_version: str = SCHEMA_VERSION
    seed: int
    samples: int
    constructive: bool
    note: str = ("observed maxima are lower bounds on the true maximum; "
                 "no observed value proves the maximum")
    shapes: list[ShapeModel]


class GaleReport(_Model):
    schema_version: str = SCHEMA_VERSION
    species: list[str]
    monomials: list[list[int]]
    C: list[list[str]]
    W: list[list[int]]
    D: list[list[str]]
    Q: list[list[int]]
    forms: list[str]
    cone: list[str]
    equations: list[str]
    polynomial: Optional[str] = None
    region: list[str] = Field(default_factory=list)


class ReproRow(_Model):
    check: str
    expected: str
    observed: str
    tolerance: str
    passed: bool


class ReproReport(_Model):
    example: str
    passed: bool
    rows: list[ReproRow]


def render_analysis(r: AnalysisReport) -> str:
    """Human-readable rendering; deterministic for fixed inputs."""
    out = [f"network: {len(r.network.species)} species, {len(r.network.reactions)} reactions "
           f"({r.network.family})"]
    if r.network.a:
        out.append(f"  a = {r.network.a}  b = {r.network.b}")
    for k, v in r.normalized.items():
        out.append(f"  {k} = {v if isinstance(v, str) else '[' + ', '.join(v) + ']'}")
    c = r.classification
    out.append(f"case: {c.case}  max_count: {c.max_count}  exact_count: {c.exact_count}"
               f"  method: {c.method}")
    for name in ("gamma", "theta", "t_h_at_0", "xi", "y_star"):
        v = getattr(c, name)
        if v is not None:
            out.append(f"  {name} = {v}")
    for k, v in c.certificates.items():
        out.append(f"  {k}: {v}")
    if r.gale_polynomial:
        out.append(f"gale polynomial: {r.gale_polynomial}")
    if r.interval:
        out.append(f"interval: ({dec(unq(r.interval[0]))}, {dec(unq(r.interval[1]))})")
    for i, root in enumerate(r.roots, 1):
        tag = "exact" if root.exact else f"in [{dec(unq(root.lo))}, {dec(unq(root.hi))}]"
        out.append(f"root {i}: {root.decimal} (mult {root.multiplicity}, {tag})")
    for i, s in enumerate(r.states, 1):
        st = f"  {s.stability.label} via {s.stability.method}" if s.stability else ""
        out.append(f"state {i}: ({', '.join(s.decimal)})  residual {s.residual:.2e}{st}")
    b = r.bounds
    for name in ("max_count", "mixed_sign_bound", "bernstein", "bates"):
        v = getattr(b, name)
        if v is not None:
            out.append(f"bound {name}: {v}")
    out.extend(f"note: {n}" for n in r.notes)
    return "\n".join(out) + "\n"
