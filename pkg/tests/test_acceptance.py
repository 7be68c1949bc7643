"""Acceptance criteria 1-10.  Each test records its sub-checks through ``record``;
the terminal summary prints one PASS/FAIL line per criterion."""

import itertools
import math
import time
from fractions import Fraction

import sympy as sp
from click.testing import CliRunner

from fewcrn import irreversible as irr
from fewcrn import reversible as rev
from fewcrn.analysis import gale_polynomial, run_analyze
from fewcrn.cli import main
from fewcrn.gale import GaleError, gale_count
from fewcrn.oracles import resultant_count
from fewcrn.reports import ConjectureReport, GaleReport
from fewcrn.repro import INTRO_PARAMS, load_network
from fewcrn.sampling import draw_rng, log_uniform
from fewcrn.stability import simulate
from fewcrn.univariate import Poly, count_roots

F = Fraction
MIXED_A, MIXED_B = (3, 4, 2, 2), (4, 5, 1, 1)


def _rel(x, ref):
    return abs(x - ref) / abs(ref)


def test_criterion_1_intro_example(record):
    t0 = time.perf_counter()
    net = load_network("intro.crn")
    p = gale_polynomial(net, INTRO_PARAMS)
    r = run_analyze(net, INTRO_PARAMS)
    elapsed = time.perf_counter() - t0
    record(1, "Gale polynomial 64y^2 - 123419630y + 1209134368",
           p == Poly([1209134368, -123419630, 64]))
    record(1, "exact_count = 2", r.classification.exact_count == 2 and len(r.roots) == 2)
    got = [[float(v) for v in s.decimal] for s in r.states]
    # exact states from the quadratic formula; the small state is printed with two digits
    omega = math.sqrt(423113764748297)
    closed = [((20749149 - omega) / 82384, (20617917 - omega) / 10712),
              ((20749149 + omega) / 82384, (20617917 + omega) / 10712)]
    record(1, "states within 1e-3 relative of the exact quadratic roots",
           all(_rel(g, c) < 1e-3 for s, cs in zip(got, closed) for g, c in zip(s, cs)))
    record(1, "state (501.5, 3845) within 1e-3 relative",
           _rel(got[1][0], 501.5) < 1e-3 and _rel(got[1][1], 3845) < 1e-3)
    record(1, "state (2.2, 4.5) at the printed two digits",
           (round(got[0][0], 1), round(got[0][1], 1)) == (2.2, 4.5))
    record(1, f"runtime < 1 s ({elapsed:.2f} s)", elapsed < 1)
    assert not record.failed(1)


def test_criterion_2_region_inequalities(record):
    t0 = time.perf_counter()
    res = CliRunner().invoke(main, ["gale", "src/fewcrn/networks/intro.crn", "--region", "--json", "-"])
    elapsed = time.perf_counter() - t0
    record(2, "command succeeds", res.exit_code == 0)
    region = GaleReport.model_validate_json(res.output).region
    l, k1, k2, k3, k4 = sp.symbols("l k1 k2 k3 k4", positive=True)
    names = {"l": l, "k1": k1, "k2": k2, "k3": k3, "k4": k4}
    got = [sp.sympify(s.removesuffix(" > 0"), locals=names) for s in region]
    linear = k2 * k4 - 16 * k1 * l - 4 * k3 * l
    quadratic = (-k2 * k4 + 16 * k1 * l + 4 * k3 * l) ** 2 - 4 * 64 * l**2 * k1 * k3
    record(2, "two inequalities", len(got) == 2)

    def positive_multiple(expr, ref):
        ratio = sp.simplify(expr / ref)
        return ratio.is_number and ratio > 0

    record(2, "linear inequality up to positive scaling",
           any(positive_multiple(g, linear) for g in got))
    record(2, "quadratic-in-l inequality up to positive scaling",
           any(positive_multiple(g, quadratic) for g in got))
    record(2, f"runtime < 1 s ({elapsed:.2f} s)", elapsed < 1)
    assert not record.failed(2)


def test_criterion_3_mixed_example_branches(record):
    t0 = time.perf_counter()
    pa = irr.params(MIXED_A, MIXED_B, (4, 2, 4, 6), F("2304937.796"))
    ga, tha = irr.gamma_theta(pa)
    record(3, "branch 1: gamma = 23/12", ga == F(23, 12))
    record(3, f"branch 1: theta = 145/144 (computed {tha})", tha == F(145, 144))
    record(3, "branch 1: exact_count = 1 at the plotted kappa", irr.classify(pa).exact_count == 1)
    pb = irr.params(MIXED_A, MIXED_B, (4, 2, 6, 7), 1)
    gb, thb = irr.gamma_theta(pb)
    record(3, "branch 2: gamma = 179/84", gb == F(179, 84))
    record(3, f"branch 2: theta = 7699/7056 (computed {thb})", thb == F(7699, 7056))
    ys = irr.classify(pb).y_star
    kappa = irr.build_g(pb).h(ys.value) / ys.value
    record(3, "kappa = h(y*)/y* within 1e-3 of 1.065687498e7",
           _rel(float(kappa), 1.065687498e7) < 1e-3)
    cls = irr.classify(pb.with_kappa(kappa))
    record(3, "three roots", cls.exact_count == 3)
    record(3, "roots within 1e-3 of 0.3099, 1.7286, 2.8531",
           all(abs(float(r.value) - v) < 1e-3 for r, v in zip(cls.roots, (0.3099, 1.7286, 2.8531))))
    elapsed = time.perf_counter() - t0
    record(3, f"runtime < 2 s ({elapsed:.2f} s)", elapsed < 2)
    assert not record.failed(3)


def test_criterion_4_growth_recipe(record):
    t0 = time.perf_counter()
    w = irr.witness_two(MIXED_A, (4, 5, 3, 3), (2, 1, 8, 6))
    record(4, "y0 within 1e-3 of 0.189", abs(float(w.detail["y0"].value) - 0.189) < 1e-3)
    record(4, "h'(y0) within 1 of 284908", abs(w.detail["h_prime_y0"] - 284908) < 1)
    cls = irr.classify(irr.params(MIXED_A, (4, 5, 3, 3), (2, 1, 8, 6), 450000))
    record(4, "two roots at kappa = 450000", cls.exact_count == 2)
    record(4, "roots within 1e-3 of 0.058, 0.47",
           all(abs(float(r.value) - v) < 1e-3 for r, v in zip(cls.roots, (0.058, 0.47))))
    elapsed = time.perf_counter() - t0
    record(4, f"runtime < 1 s ({elapsed:.2f} s)", elapsed < 1)
    assert not record.failed(4)


PROPERTY_SHAPES = [
    # a_plus = 0
    ((1, 2), (0, 1)), ((2, 1), (1, 0)), ((3,), (2,)),
    # a_minus = 0
    ((2, 1), (3, 2)), ((1, 1), (5, 17)), ((1, 1), (2, 2)), ((1,), (2,)), ((3, 4, 2, 2), (4, 5, 3, 3)),
    # mixed
    ((2, 1), (3, 0)), ((3, 1), (4, 0)), ((2, 2), (3, 1)), ((2, 1, 1), (3, 0, 0)),
    ((3, 4, 2, 2), (4, 5, 1, 1)), ((1, 1), (2, 0)), ((4, 1), (5, 0)),
]
PROPERTY_DRAWS = 12000
PROPERTY_SEED = 7


def _property_violation(cls: irr.CountClassification, p: irr.IrrevParams) -> str | None:
    n = cls.exact_count
    if cls.case is irr.Case.NO_NEG_ROOTS:
        return None if n == 1 else f"a_plus = 0 gave {n}"
    if cls.case is irr.Case.NO_POS_ROOTS:
        if n not in (0, 1, 2) or (p.a_plus <= 1 and n > 1):
            return f"a_minus = 0 gave {n}"
        return None
    if n > 3 or (cls.nondegenerate and n % 2 == 0) or (p.a_plus <= 1 and n > 1):
        return f"mixed gave {n}"
    if n == 3 and not (cls.gamma > 0 and cls.theta > 0 and cls.t_h_sign <= 0):
        return "three roots without gamma > 0, theta > 0, t_h(0) <= 0"
    return None


def test_criterion_5_theorem_bounds(record):
    t0 = time.perf_counter()
    cases, threes, bad = set(), 0, []
    for d in range(PROPERTY_DRAWS):
        a, b = PROPERTY_SHAPES[d % len(PROPERTY_SHAPES)]
        rng = draw_rng(PROPERTY_SEED, d)
        n = len(a)
        raw = irr.RawRates(a, b, tuple(log_uniform(rng) for _ in range(n)),
                           tuple(log_uniform(rng) for _ in range(n)), (log_uniform(rng),))
        p = irr.normalize_raw(raw)
        cls = irr.classify(p)
        cases.add(cls.case)
        threes += cls.exact_count == 3
        why = _property_violation(cls, p)
        if why:
            bad.append((d, why))
    elapsed = time.perf_counter() - t0
    record(5, f">= 1e4 draws ({PROPERTY_DRAWS})", PROPERTY_DRAWS >= 10**4)
    record(5, "all three sign cases drawn", len(cases) == 3)
    record(5, f"three-root draws exercise the necessary conditions ({threes})", threes > 0)
    record(5, f"zero violations ({len(bad)}: {bad[:3]})", not bad)
    record(5, f"runtime < 5 min ({elapsed:.0f} s)", elapsed < 300)
    assert not record.failed(5)


def _admissible_shapes(max_side=6, max_n=4):
    for n in range(1, max_n + 1):
        for sgn in itertools.product((1, -1), repeat=n):
            # b_i = a_i - 1 >= 0 needs a_i >= 1 on the decreasing side
            ranges = [range(0, max_side + 1) if s > 0 else range(1, max_side + 1) for s in sgn]
            for a in itertools.product(*ranges):
                ap = sum(x for x, s in zip(a, sgn) if s > 0)
                am = sum(x for x, s in zip(a, sgn) if s < 0)
                if ap <= max_side and am <= max_side:
                    yield a, tuple(x + s for x, s in zip(a, sgn)), ap, am


def test_criterion_6_constructive_witnesses(record):
    t0 = time.perf_counter()
    done = {2: 0, 3: 0}
    bad = []
    for a, b, ap, am in _admissible_shapes():
        if ap <= 1:
            continue
        target = 2 if am == 0 else 3
        try:
            w = irr.witness_two(a, b, list(range(1, len(a) + 1))) if target == 2 else \
                irr.witness_three(a, b)
            gd = irr.build_g(w.params())
            got = count_roots(gd.g, *gd.interval)
        except (AssertionError, irr.PreconditionError) as e:
            got = str(e)
        done[target] += 1
        if got != target:
            bad.append((a, b, got))
    elapsed = time.perf_counter() - t0
    record(6, f"witness_two covers the a_minus = 0 shapes ({done[2]})", done[2] > 0)
    record(6, f"witness_three covers the mixed shapes ({done[3]})", done[3] > 0)
    record(6, f"every witness reclassifies to its target ({len(bad)} failures: {bad[:2]})", not bad)
    record(6, f"runtime < 1 min ({elapsed:.0f} s)", elapsed < 60)
    assert not record.failed(6)


def test_criterion_7_reversible_witness(record):
    net = load_network("symmetric.crn")
    r = run_analyze(net, {})
    record(7, "states (1,1), (2,2), (3,3) exactly",
           [s.x for s in r.states] == [["1/1", "1/1"], ["2/1", "2/1"], ["3/1", "3/1"]]
           and all(s.exact and s.residual == 0 for s in r.states))
    record(7, "stability Stable / Unstable / Stable",
           [s.stability.label for s in r.states]
           == ["AsymptoticallyStable", "Unstable", "AsymptoticallyStable"])
    quartic = Poly([F(36, 25), F(-12, 5), 1, 0, F(-1, 25)])
    record(7, "-25 p(x) = (x-1)(x-2)(x-3)(x+6)", quartic * -25 == Poly.from_roots([1, 2, 3, -6]))
    system = rev.symmetric_witness().raw.system()
    tr = simulate(system, (1.9, 1.9), t_end=200, dt=0.01, states=[(1, 1), (2, 2), (3, 3)])
    record(7, "simulation from (1.9, 1.9) settles at a stable state",
           tr.converged and tr.nearest in (0, 2))
    assert not record.failed(7)


def test_criterion_8_bound_and_bernstein(record):
    a, b = (2, 3, 3, 6), (1, 2, 4, 7)
    p = rev.rev_params(a, b, [1] * 4, [1] * 4, 1)
    record(8, "mixed_sign_bound = 7", rev.mixed_sign_bound(p) == 7)
    record(8, "Bernstein value = 40", rev.bernstein_value(a, b) == 40)
    assert not record.failed(8)


CONJECTURE_SEED = 2024
CONJECTURE_SAMPLES = 5000


def test_criterion_9_table_search(record, tmp_path):
    shapes = tmp_path / "shapes.txt"
    shapes.write_text("2,1 / 3,0\n2,1,1 / 3,0,0\n")
    t0 = time.perf_counter()
    res = CliRunner().invoke(main, ["conjecture", "--shapes", str(shapes), "--samples",
                                    str(CONJECTURE_SAMPLES), "--seed", str(CONJECTURE_SEED),
                                    "--json", "-"])
    elapsed = time.perf_counter() - t0
    record(9, "command succeeds", res.exit_code == 0)
    rep = ConjectureReport.model_validate_json(res.output)
    for s in rep.shapes:
        tag = f"{s.a}/{s.b}"
        random_wits = [w for w in s.witnesses if w["source"] == "random"]
        record(9, f"{tag}: a three-root witness within 1e5 samples", bool(s.witnesses)
               and CONJECTURE_SAMPLES <= 10**5)
        record(9, f"{tag}: random draws alone find one ({len(random_wits)})", bool(random_wits))
        record(9, f"{tag}: no draw exceeds the bound {s.bound}",
               not s.bound_violations and s.max_count <= s.bound)
        for w in s.witnesses[:3]:
            p = rev.rev_params(s.a, s.b, [F(v) for v in w["k"]], [F(v) for v in w["c"]], F(w["alpha"]))
            record(9, f"{tag}: witness reclassifies to 3", rev.classify_rev(p).exact_count == 3)
    record(9, f"runtime < 10 min ({elapsed:.0f} s)", elapsed < 600)
    assert not record.failed(9)


ORACLE_SEED = 11
ORACLE_PER_FAMILY = 260


def test_criterion_10_oracle_equivalence(record):
    t0 = time.perf_counter()
    done = {"irreversible": 0, "reversible": 0}
    mismatches = []
    i = 0
    while min(done.values()) < ORACLE_PER_FAMILY:
        rng = draw_rng(ORACLE_SEED, i)
        fam = "reversible" if i % 2 else "irreversible"
        i += 1
        if done[fam] >= ORACLE_PER_FAMILY:
            continue
        a = tuple(int(v) for v in rng.integers(0, 4, 2))
        b = tuple(int(v) for v in rng.integers(0, 4, 2))
        if a == b:
            continue
        k = tuple(log_uniform(rng) for _ in range(2))
        c = tuple(log_uniform(rng) for _ in range(2))
        ells = (F(1),) if fam == "irreversible" else (F(1), log_uniform(rng))
        raw = irr.RawRates(a, b, k, c, ells)
        system = raw.system()
        try:
            fp = rev.normalize_rev_raw(raw) if fam == "reversible" else None
            g, _ = gale_count(system, fp)
        except (GaleError, irr.PreconditionError):
            # two monomials coincide, or every species has a_i = b_i
            continue
        done[fam] += 1
        r = resultant_count(system).count
        if g != r:
            mismatches.append((fam, a, b, k, c, ells, g, r))
    elapsed = time.perf_counter() - t0
    total = sum(done.values())
    record(10, f">= 500 instances ({total}, both families)", total >= 500 and min(done.values()) > 0)
    record(10, f"resultant count = Gale-dual Sturm count ({len(mismatches)} mismatches)",
           not mismatches)
    record(10, f"runtime < 5 min ({elapsed:.0f} s)", elapsed < 300)
    assert not record.failed(10)

