"""End-to-end workflows behind the command line: analyze, count, gale, search, plot data."""

from __future__ import annotations

import csv
import io
import platform
import time
from fractions import Fraction
from typing import Mapping, Sequence

from . import __version__
from . import irreversible as irr
from . import reversible as rev
from .gale import (cleared_polynomial, cone_states, decompose, gale_dual, region_conditions)
from .network import (FamilyKind, FamilyTag, NetworkError, ReactionNetwork, detect_family,
                      format_network, mass_action_system, parse_rate)
from .reports import (AnalysisReport, BoundsModel, ClassificationModel, ConjectureReport,
                      FindMultiReport, GaleReport, NetworkModel, ProvenanceModel, RootModel,
                      ShapeModel, StabilityModel, StateModel, WitnessModel, dec, q)
from .sampling import SamplingConfig, draw_rng, draw_vector
from .stability import classify_state, family_det_trace_applies
from .univariate import Poly

DEFAULT_WIDTH = Fraction(1, 10**12)


def parse_params(items: Sequence[str]) -> dict[str, Fraction]:
    """``NAME=VALUE`` pairs with exact values (``0.25``, ``1/4``, ``2.5e3``)."""
    out = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep or not name.strip():
            raise ValueError(f"expected NAME=VALUE, got {item!r}")
        v = parse_rate(value.strip())
        if isinstance(v, str):
            raise ValueError(f"value of {name} must be a number, got {value!r}")
        out[name.strip()] = v
    return out


def _versions() -> dict[str, str]:
    import numpy
    import sympy

    return {"fewcrn": __version__, "python": platform.python_version(),
            "sympy": sympy.__version__, "numpy": numpy.__version__}


def network_model(net: ReactionNetwork, tag: FamilyTag | None = None) -> NetworkModel:
    tag = tag or detect_family(net)
    return NetworkModel(species=list(net.species),
                        reactions=format_network(net).splitlines(),
                        family=tag.kind.value, a=list(tag.a), b=list(tag.b))


def _states(states, system, det_trace: bool, width: float, tol: float) -> list[StateModel]:
    """``states`` holds ``(x, residual, root)`` triples; ``root`` may be ``None``."""
    out = []
    for x, residual, root in states:
        exact = all(isinstance(v, (int, Fraction)) for v in x) and (root is None or root.exact)
        # an approximate state must not yield an exact-arithmetic certificate
        at = x if exact else [float(v) for v in x]
        verdict = classify_state(system, at, width, det_trace, tol)
        out.append(StateModel(x=[q(v) if isinstance(v, (int, Fraction)) else dec(v, 17) for v in x],
                              decimal=[dec(v) for v in x], exact=bool(exact),
                              residual=residual, stability=StabilityModel.of(verdict)))
    return out


def gale_polynomial(net: ReactionNetwork, params: Mapping[str, object]) -> Poly:
    """Cleared one-variable Gale polynomial with parameters substituted afterwards.

    Clearing denominators symbolically fixes the scaling independently of
    the numeric values, so the coefficients match the closed form.
    """
    import sympy as sp

    gs = gale_dual(decompose(mass_action_system(net, symbolic=True)))
    if gs.l != 1:
        raise NetworkError(f"a one-variable Gale polynomial needs l = 1, got l = {gs.l}")
    expr = cleared_polynomial(gs)
    if isinstance(expr, Poly):  # every rate in the file is a number
        return expr
    y = next(s for s in expr.free_symbols if s.name == "y")
    subs = {s: sp.Rational(Fraction(params[s.name]).numerator, Fraction(params[s.name]).denominator)
            for s in expr.free_symbols if s.name != "y"}
    coeffs = sp.Poly(sp.expand(expr.subs(subs)), y).all_coeffs()[::-1]
    return Poly([Fraction(int(c.p), int(c.q)) for c in coeffs])


def _irreversible(tag, params, system, width, tol):
    p = irr.normalize(tag, params)
    cls = irr.classify(p, width)
    states = irr.steady_states_irrev(p, width, tol, cls.roots)
    det_trace = family_det_trace_applies(tag.a, tag.b, tag.values(params)[1])
    gd = irr.build_g(p)
    normalized = {"a": [str(v) for v in p.a], "sgn": [str(v) for v in p.sgn],
                  "k": [q(v) for v in p.k], "c": [q(v) for v in p.c], "kappa": q(p.kappa)}
    c = ClassificationModel(
        case=cls.case.value, max_count=cls.max_count, exact_count=cls.exact_count,
        count_with_multiplicity=cls.count_with_multiplicity, nondegenerate=cls.nondegenerate,
        method="sturm", gamma=q(cls.gamma), theta=q(cls.theta),
        t_h_at_0=dec(cls.t_h_at_0), t_h_sign=cls.t_h_sign,
        xi=dec(cls.xi.value) if cls.xi else None,
        y_star=dec(cls.y_star.value) if cls.y_star else None,
        certificates={"descartes": str(cls.descartes)})
    notes = []
    if not det_trace:
        notes.append("det/trace route skipped (needs c1 < c2 here); stability from eigenvalues")
    return dict(normalized=normalized, classification=c, roots=cls.roots,
                states=_states([(st.x, st.residual, st.y) for st in states], system, det_trace,
                               1e-9, tol),
                bounds=BoundsModel(max_count=cls.max_count),
                interval=[q(v) for v in cls.interval], g=gd.g, notes=notes)


def _reversible(tag, params, system, width, tol):
    p = rev.normalize_rev(tag, params)
    cls = rev.classify_rev(p, width)
    states = rev.steady_states_rev(p, width, tol, cls.roots)
    g, _ = rev.build_g_tilde(p)
    normalized = {"a": [str(v) for v in p.a], "b": [str(v) for v in p.b],
                  "sgn": [str(v) for v in p.sgn], "k": [q(v) for v in p.k],
                  "c": [q(v) for v in p.c], "alpha": q(p.alpha)}
    certs = {}
    if cls.all_plus is not None:
        ap = cls.all_plus
        certs = {"v(0)": q(ap.v0), "w(0)": q(ap.w0), "v'(0)": q(ap.dv0),
                 "three_root_certificate": ap.certificate, "swapped": str(ap.swapped)}
        if ap.sigma is not None:
            certs["sigma"] = q(ap.sigma)
    certs["roots_with_y_positive"] = str(cls.forward_count)
    fwd, bwd = rev.side_bounds(p)
    if cls.sign_case == "mixed":
        proven = cls.bernstein if fwd is None or bwd is None else min(cls.bernstein, fwd + bwd + 1)
    else:
        proven = 3
    c = ClassificationModel(case=cls.sign_case, max_count=proven, exact_count=cls.exact_count,
                            count_with_multiplicity=cls.count_with_multiplicity,
                            nondegenerate=cls.nondegenerate, method="sturm", certificates=certs)
    bounds = BoundsModel(max_count=proven,
                         mixed_sign_bound=cls.bound if cls.sign_case == "mixed" else None,
                         bernstein=cls.bernstein, bates=dec(rev.bates_bound(p.n)))
    return dict(normalized=normalized, classification=c, roots=cls.roots,
                states=_states([(st.x, st.residual, st.y1) for st in states], system, True,
                               1e-9, tol), bounds=bounds,
                interval=[q(v) for v in cls.interval], g=g, notes=[])


def _general(net, params, system, width, tol):
    cw = decompose(system)
    gs = gale_dual(cw)
    if gs.l == 1:
        p, interval, pairs = cone_states(gs, cw, width, tol)
        roots = [r for r, _ in pairs]
        states = [(st.x, st.residual, r if st.exact else None) for r, st in pairs]
        c = ClassificationModel(case="general(l=1)", max_count=p.degree, exact_count=len(roots),
                                count_with_multiplicity=sum(r.multiplicity for r in roots),
                                nondegenerate=all(r.multiplicity == 1 for r in roots),
                                method="sturm")
        return dict(normalized={}, classification=c, roots=roots,
                    states=_states(states, system, True, 1e-9, tol), bounds=BoundsModel(),
                    interval=[q(v) for v in interval], g=p, notes=[])
    from .oracles import newton_count

    res = newton_count(system)
    states = [(x, max(system.relative_residuals(x)), None) for x in res.solutions]
    c = ClassificationModel(case=f"general(l={gs.l})", max_count=None, exact_count=None,
                            method="multistart-newton (probabilistic)")
    return dict(normalized={}, classification=c, roots=(), bounds=BoundsModel(), interval=[],
                states=_states(states, system, True, 1e-9, tol), g=None,
                notes=[f"no exact count for l = {gs.l}; {res.count} states found numerically"])


def run_analyze(net: ReactionNetwork, params: Mapping[str, object], width=DEFAULT_WIDTH,
                tol: float = 1e-9, seed: int | None = None, timing: bool = False) -> AnalysisReport:
    t0 = time.perf_counter()
    width = Fraction(width)
    tag = detect_family(net)
    system = mass_action_system(net, params)
    if tag.kind is FamilyKind.IRREVERSIBLE:
        parts = _irreversible(tag, params, system, width, tol)
    elif tag.kind is FamilyKind.REVERSIBLE:
        parts = _reversible(tag, params, system, width, tol)
    else:
        parts = _general(net, params, system, width, tol)
    gale_text = None
    if tag.kind is not FamilyKind.REVERSIBLE:
        try:
            gale_text = gale_polynomial(net, params).to_str("y")
        except NetworkError:
            gale_text = None
    prov = ProvenanceModel(tool="fewcrn", versions=_versions(), seed=seed, width=q(width), tol=tol,
                           params={k: q(v) for k, v in sorted(params.items())},
                           timing_s=round(time.perf_counter() - t0, 6) if timing else None)
    return AnalysisReport(network=network_model(net, tag), normalized=parts["normalized"],
                          gale_polynomial=gale_text, interval=parts["interval"],
                          classification=parts["classification"],
                          roots=[RootModel.of(r) for r in parts["roots"]], states=parts["states"],
                          bounds=parts["bounds"], notes=parts["notes"], provenance=prov)


def run_count(net: ReactionNetwork, params: Mapping[str, object]) -> tuple[int | None, str]:
    """Exact number of positive steady states (``None`` when no exact method applies)."""
    tag = detect_family(net)
    if tag.kind is FamilyKind.IRREVERSIBLE:
        p = irr.normalize(tag, params)
        gd = irr.build_g(p)
        from .univariate import count_roots

        return count_roots(gd.g, *gd.interval), "sturm(irreversible)"
    from .gale import gale_count

    family = rev.normalize_rev(tag, params) if tag.kind is FamilyKind.REVERSIBLE else None
    return gale_count(mass_action_system(net, params), family)


# -- gale -------------------------------------------------------------------------------

def gale_report(net: ReactionNetwork, params: Mapping[str, object] | None = None,
                region: bool = False) -> GaleReport:
    symbolic = not params or bool(set(net.rate_symbols()) - set(params))
    system = mass_action_system(net, None if symbolic else params, symbolic=symbolic)
    cw = decompose(system)
    gs = gale_dual(cw)

    def s(v):
        return q(v) if isinstance(v, (int, Fraction)) else str(v)

    poly = None
    if gs.l == 1:
        p = cleared_polynomial(gs)
        poly = str(p) if symbolic else p.to_str("y")
    var = "y" if gs.l == 1 else "y"
    forms = [f"d{i + 1} = {gs.form_text(i, var)}" for i in range(gs.m)]
    cone = [f"d{i + 1} > 0" for i in range(gs.m - 1)]
    conds = []
    if region:
        if not symbolic or gs.l != 1:
            raise NetworkError("--region needs symbolic rates and l = 1")
        conds = [f"{c} > 0" for c in region_conditions(gs)]
    return GaleReport(species=list(cw.species), monomials=[list(w) for w in cw.monomials],
                      C=[[s(v) for v in row] for row in cw.C], W=[list(r) for r in cw.W],
                      D=[[s(v) for v in row] for row in gs.D], Q=[list(r) for r in gs.Q],
                      forms=forms, cone=cone, equations=gs.equation_text(var),
                      polynomial=poly, region=conds)


def render_gale(g: GaleReport) -> str:
    def mat(name, rows):
        return [f"{name} ="] + ["  [" + ", ".join(str(v) for v in r) + "]" for r in rows]

    out = [f"species: {', '.join(g.species)}",
           "monomials: " + ", ".join("x^(" + ",".join(map(str, w)) + ")" for w in g.monomials)]
    out += mat("C", g.C) + mat("W", g.W) + mat("D", g.D) + mat("Q", g.Q)
    out += ["forms:"] + [f"  {f}" for f in g.forms]
    out += ["cone:"] + [f"  {c}" for c in g.cone]
    out += ["equations:"] + [f"  {e}" for e in g.equations]
    if g.polynomial:
        out.append(f"cleared polynomial: {g.polynomial}")
    if g.region:
        out += ["region (all roots inside the cone):"] + [f"  {c}" for c in g.region]
    return "\n".join(out) + "\n"


# -- find-multi -----------------------------------------------------------------------

def _rate_names(tag: FamilyTag) -> list[str]:
    return [r for r in tag.inflow + tag.outflow + tag.nonflow if isinstance(r, str)]


def _params_from_raw(tag: FamilyTag, raw: irr.RawRates) -> dict[str, Fraction]:
    out = {}
    for names, vals in ((tag.inflow, raw.k), (tag.outflow, raw.c), (tag.nonflow, raw.ells)):
        for name, v in zip(names, vals):
            if not isinstance(name, str):
                if name != v:
                    raise NetworkError("constructive witnesses need symbolic rates in the file")
                continue
            out[name] = v
    return out


def reachability(tag: FamilyTag, target: int) -> tuple[bool, str]:
    """Whether ``target`` distinct nondegenerate states can occur, with the reason."""
    if tag.kind is FamilyKind.REVERSIBLE:
        return True, "counts for this family are not characterized; searching"
    kept = [i for i, (a, b) in enumerate(zip(tag.a, tag.b)) if a != b]
    p = irr.params([tag.a[i] for i in kept], [tag.b[i] for i in kept], [1] * len(kept), 1)
    case = irr.case_of(p)
    if case is irr.Case.NO_NEG_ROOTS:
        return target == 1, "a_plus = 0: the reduced polynomial decreases, exactly one state"
    if p.a_plus <= 1:
        return target == 1, "a_plus <= 1: the reduced polynomial is convex or linear in the interval, at most one state"
    if case is irr.Case.NO_POS_ROOTS:
        ok = target in (0, 1, 2)
        return ok, "a_minus = 0: at most two states" + ("" if ok else f", so {target} is impossible")
    ok = target in (1, 3)
    why = "mixed signs: nondegenerate counts are odd and at most three"
    if target == 2:
        why += "; two distinct states need a tangency, a measure-zero event"
    return ok, why


def run_find_multi(net: ReactionNetwork, cfg: SamplingConfig, strategy: str = "random",
                   max_witnesses: int = 50) -> FindMultiReport:
    tag = detect_family(net)
    if not tag.is_family:
        raise NetworkError("find-multi works on the one-reaction families only")
    ok, why = reachability(tag, cfg.target)
    witnesses: list[WitnessModel] = []
    names = sorted(_rate_names(tag))
    if ok and strategy == "random":
        for di in range(cfg.samples):
            vals = dict(zip(names, draw_vector(draw_rng(cfg.seed, di), len(names), cfg)))
            cnt, _ = run_count(net, vals)
            if cnt == cfg.target:
                witnesses.append(WitnessModel(count=cnt, source="random", draw=di,
                                              params={k: q(v) for k, v in vals.items()}))
                if len(witnesses) >= max_witnesses:
                    break
    if ok and not witnesses and cfg.target >= 2:
        w = _constructive(tag, net, cfg.target)
        if w is not None:
            witnesses.append(w)
    return FindMultiReport(network=network_model(net, tag), target=cfg.target, strategy=strategy,
                           seed=cfg.seed, samples=cfg.samples, reachable=ok, reason=why,
                           witnesses=witnesses)


def _constructive(tag: FamilyTag, net: ReactionNetwork, target: int) -> WitnessModel | None:
    kept = [i for i, (a, b) in enumerate(zip(tag.a, tag.b)) if a != b]
    if len(kept) != len(tag.a):
        return None
    if tag.kind is FamilyKind.REVERSIBLE:
        if target != 3:
            return None
        w = rev.constructive_seed(tag.a, tag.b)
        if w is None:
            return None
        p = w.params()
        vals = _params_from_raw(tag, p.raw)
    else:
        w = irr.witness_two(tag.a, tag.b, [1] * len(tag.a)) if target == 2 else \
            irr.witness_three(tag.a, tag.b)
        vals = _params_from_raw(tag, irr.realize(w.params(), w.kappa_interval))
    cnt, _ = run_count(net, vals)
    if cnt != target:
        raise AssertionError(f"constructive witness gave {cnt} states")
    return WitnessModel(count=cnt, source="constructive", params={k: q(v) for k, v in vals.items()})


# -- conjecture ------------------------------------------------------------------------

def parse_shapes(text: str) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """One shape per line, ``a1,a2,... / b1,b2,...``; ``#`` starts a comment."""
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            left, right = line.split("/")
            a = tuple(int(v) for v in left.replace(" ", "").split(","))
            b = tuple(int(v) for v in right.replace(" ", "").split(","))
        except ValueError:
            raise ValueError(f"line {lineno}: expected 'a1,a2 / b1,b2', got {line!r}") from None
        if len(a) != len(b) or min(a + b) < 0:
            raise ValueError(f"line {lineno}: a and b need equal length and nonnegative entries")
        out.append((a, b))
    return out


def _wit(w: rev.RevWitness) -> dict:
    d = {"count": w.count, "source": w.source, "k": [q(v) for v in w.k],
         "c": [q(v) for v in w.c], "alpha": q(w.alpha)}
    if w.draw is not None:
        d["draw"] = w.draw
    return d


def run_conjecture(shapes, samples: int, seed: int, constructive: bool = True) -> ConjectureReport:
    results = rev.conjecture_search(shapes, samples, seed, constructive)
    models = [ShapeModel(a=list(r.a), b=list(r.b), bound=r.bound, samples=r.samples,
                         max_count=r.max_count, bound_attained=r.bound_attained,
                         histogram={str(k): v for k, v in sorted(r.histogram.items())},
                         witnesses=[_wit(w) for w in r.witnesses],
                         exceeding_three=[_wit(w) for w in r.exceeding_three],
                         bound_violations=[_wit(w) for w in r.bound_violations])
              for r in results]
    return ConjectureReport(seed=seed, samples=samples, constructive=constructive, shapes=models)


# -- plot data ------------------------------------------------------------------------

def plot_data(net: ReactionNetwork, params: Mapping[str, object], points: int = 200) -> str:
    """CSV of ``y, h(y), kappa*y`` over the interval (irreversible family)."""
    if points < 2:
        raise ValueError("plot-data needs at least two points")
    tag = detect_family(net)
    if tag.kind is not FamilyKind.IRREVERSIBLE:
        raise NetworkError("plot-data supports the irreversible family")
    p = irr.normalize(tag, params)
    gd = irr.build_g(p)
    lo, hi = gd.interval
    if hi == float("inf"):
        from .univariate import cauchy_bound

        hi = cauchy_bound(gd.g)
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["y", "h", "kappa_y"])
    for i in range(points):
        y = Fraction(lo) + (Fraction(hi) - Fraction(lo)) * i / (points - 1)
        wr.writerow([f"{float(y):.12g}", f"{float(gd.h(y)):.12g}", f"{float(p.kappa * y):.12g}"])
    return buf.getvalue()
