"""Bundled reproductions of the worked examples, each a table of checks."""

from __future__ import annotations

import math
from fractions import Fraction
from importlib.resources import files
from typing import Callable

from . import irreversible as irr
from . import reversible as rev
from .analysis import gale_polynomial, run_analyze
from .network import parse_network
from .reports import ReproReport, ReproRow
from .stability import simulate
from .univariate import Poly

INTRO_PARAMS = {"l": Fraction(1), "k1": Fraction(33602), "k2": Fraction(15447),
                "k3": Fraction(35984), "k4": Fraction(8034)}
MIXED_A, MIXED_B = (3, 4, 2, 2), (4, 5, 1, 1)
GROWTH_B = (4, 5, 3, 3)
TABLE_SHAPES = [((2, 1), (3, 0)), ((2, 2), (4, 0)), ((2, 2), (4, 1)), ((2, 2), (5, 1)),
                ((2, 2), (6, 1)), ((2, 3), (3, 2)), ((3, 1), (4, 0)),
                ((2, 1, 1), (3, 0, 0)), ((2, 3, 1), (3, 2, 0))]


def load_network(name: str):
    return parse_network(files("fewcrn").joinpath(f"networks/{name}").read_text())


class _Table:
    def __init__(self, example: str):
        self.example = example
        self.rows: list[ReproRow] = []

    def exact(self, check, expected, observed):
        self.rows.append(ReproRow(check=check, expected=str(expected), observed=str(observed),
                                  tolerance="exact", passed=expected == observed))

    def close(self, check, expected: float, observed: float, tol: float, rel: bool = False):
        dev = abs(observed - expected) / (abs(expected) if rel else 1)
        self.rows.append(ReproRow(check=check, expected=f"{expected:.10g}", observed=f"{observed:.10g}",
                                  tolerance=f"{tol:g}{' rel' if rel else ''}", passed=dev <= tol))

    def truth(self, check, ok: bool, observed=""):
        self.rows.append(ReproRow(check=check, expected="true", observed=str(observed or ok),
                                  tolerance="exact", passed=bool(ok)))

    def report(self) -> ReproReport:
        return ReproReport(example=self.example, passed=all(r.passed for r in self.rows),
                           rows=self.rows)


def _intro() -> ReproReport:
    t = _Table("intro")
    net = load_network("intro.crn")
    p = gale_polynomial(net, INTRO_PARAMS)
    t.exact("cleared Gale polynomial", Poly([1209134368, -123419630, 64]), p)
    r = run_analyze(net, INTRO_PARAMS)
    t.exact("positive steady states", 2, r.classification.exact_count)
    omega = math.sqrt(423113764748297)
    closed = [((20749149 - omega) / 82384, (20617917 - omega) / 10712),
              ((20749149 + omega) / 82384, (20617917 + omega) / 10712)]
    printed = [(2.2, 4.5), (501.5, 3845)]
    for i, (s, ref, shown) in enumerate(zip(r.states, closed, printed), 1):
        got = [float(v) for v in s.decimal]
        for j in range(2):
            t.close(f"state {i} x{j + 1} vs closed form", ref[j], got[j], 1e-3, rel=True)
        digits = [1, 1] if i == 1 else [1, 0]
        t.truth(f"state {i} rounds to printed digits {shown}",
                all(round(g, d) == v for g, d, v in zip(got, digits, shown)),
                tuple(round(g, d) for g, d in zip(got, digits)))
    return t.report()


def _fig1() -> ReproReport:
    t = _Table("fig1")
    w = irr.witness_two((3, 4, 2, 2), GROWTH_B, (2, 1, 8, 6))
    t.close("y0 (positive root of h - y h')", 0.189, float(w.detail["y0"].value), 1e-3)
    t.close("h'(y0)", 284908, w.detail["h_prime_y0"], 1)
    p = irr.params((3, 4, 2, 2), GROWTH_B, (2, 1, 8, 6), 450000)
    cls = irr.classify(p)
    t.exact("roots at kappa = 450000", 2, cls.exact_count)
    for r, ref in zip(cls.roots, (0.058, 0.47)):
        t.close(f"root near {ref}", ref, float(r.value), 1e-3)
    return t.report()


def _ex37(branch: str) -> ReproReport:
    t = _Table(f"ex3.7{branch}")
    if branch == "a":
        k, gamma, theta = (4, 2, 4, 6), Fraction(23, 12), Fraction(145, 144)
        kappa = Fraction("2304937.796")
    else:
        k, gamma, theta = (4, 2, 6, 7), Fraction(179, 84), Fraction(7699, 7056)
        kappa = None
    p = irr.params(MIXED_A, MIXED_B, k, kappa or 1)
    g, th = irr.gamma_theta(p)
    t.exact("gamma", gamma, g)
    t.exact("theta", theta, th)
    if branch == "a":
        cls = irr.classify(p)
        t.exact("count at the plotted kappa", 1, cls.exact_count)
        t.close("xi", 2, float(cls.xi.value), 1e-3)
        t.close("y*", 0.917, float(cls.y_star.value), 1e-3)
        t.close("t_h(0)", 293252.134, cls.t_h_at_0, 1e-6, rel=True)
        t.truth("t_h(0) > 0", cls.t_h_sign > 0, cls.t_h_sign)
    else:
        ys = irr.classify(p).y_star
        gd = irr.build_g(p)
        kappa = gd.h(ys.value) / ys.value
        cls = irr.classify(p.with_kappa(kappa))
        t.close("kappa = h(y*)/y*", 1.065687498e7, float(kappa), 1e-3, rel=True)
        t.exact("count", 3, cls.exact_count)
        for r, ref in zip(cls.roots, (0.3099, 1.7286, 2.8531)):
            t.close(f"root near {ref}", ref, float(r.value), 1e-3)
        t.close("xi", 3.1075, float(cls.xi.value), 1e-3)
        t.truth("t_h(0) < 0", cls.t_h_sign < 0, cls.t_h_sign)
    return t.report()


def _prop45() -> ReproReport:
    t = _Table("prop4.5-remark")
    a, b = (2, 3, 3, 6), (1, 2, 4, 7)
    p = rev.rev_params(a, b, [1] * 4, [1] * 4, 1)
    t.exact("mixed-sign bound", 7, rev.mixed_sign_bound(p))
    t.exact("bound invariant under swap", 7, rev.mixed_sign_bound(rev.symmetric_swap(p)))
    t.exact("4! vol(conv W)", 40, rev.bernstein_value(a, b))
    return t.report()


def _table() -> ReproReport:
    t = _Table("table4.2.2")
    for a, b in TABLE_SHAPES:
        w = rev.constructive_seed(a, b)
        t.exact(f"three roots for {list(a)}/{list(b)}", 3, w.count if w else None)
    return t.report()


def _witness() -> ReproReport:
    t = _Table("reversible-witness")
    net = load_network("symmetric.crn")
    r = run_analyze(net, {})
    t.exact("states", [["1/1", "1/1"], ["2/1", "2/1"], ["3/1", "3/1"]], [s.x for s in r.states])
    t.exact("stability", ["AsymptoticallyStable", "Unstable", "AsymptoticallyStable"],
            [s.stability.label for s in r.states])
    p = rev.symmetric_witness()
    system = p.raw.system()
    dp = Poly([Fraction(-12, 5), 2, 0, Fraction(-4, 25)])  # derivative of the reduced quartic
    t.exact("reduced slopes", ["-14/25", "8/25", "-18/25"], [str(dp(x)) for x in (1, 2, 3)])
    tr = simulate(system, (1.9, 1.9), t_end=200, dt=0.01, states=[(1, 1), (2, 2), (3, 3)])
    t.truth("simulation from (1.9, 1.9) settles at a stable state",
            tr.converged and tr.nearest in (0, 2), f"nearest {tr.nearest}, distance {tr.distance:.2e}")
    return t.report()


EXAMPLES: dict[str, Callable[[], ReproReport]] = {
    "intro": _intro, "fig1": _fig1, "ex3.7a": lambda: _ex37("a"), "ex3.7b": lambda: _ex37("b"),
    "prop4.5-remark": _prop45, "table4.2.2": _table, "reversible-witness": _witness,
}


def run_repro(example_id: str) -> ReproReport:
    if example_id not in EXAMPLES:
        raise KeyError(f"unknown example {example_id!r}; valid: {', '.join(EXAMPLES)}")
    return EXAMPLES[example_id]()


def render_repro(r: ReproReport) -> str:
    out = [f"{r.example}: {'PASS' if r.passed else 'FAIL'}"]
    for row in r.rows:
        out.append(f"  [{'PASS' if row.passed else 'FAIL'}] {row.check}: expected {row.expected},"
                   f" observed {row.observed} ({row.tolerance})")
    return "\n".join(out) + "\n"
