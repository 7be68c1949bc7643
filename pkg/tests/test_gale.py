from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from fewcrn import reversible as rev
from fewcrn.analysis import gale_polynomial
from fewcrn.gale import (ConeError, GaleError, cone_roots, cone_states, count_correspondence_check, decompose,
                         gale_count, gale_dual, recover_solution)
from fewcrn.irreversible import RawRates
from fewcrn.linalg import matmul
from fewcrn.network import family_network, mass_action_system
from fewcrn.oracles import newton_count, resultant_count
from fewcrn.polysys import PolynomialSystem
from fewcrn.stability import jacobian


def _zero(m):
    return all(sp.simplify(v) == 0 if isinstance(v, sp.Basic) else v == 0 for r in m for v in r)


def test_intro_decomposition(intro_net, intro_params):
    cw = decompose(mass_action_system(intro_net, symbolic=True))
    l, k1, k2, k3, k4 = (sp.Symbol(s, positive=True) for s in ("l", "k1", "k2", "k3", "k4"))
    assert cw.monomials == ((1, 0), (0, 1), (1, 1), (0, 0))
    assert cw.C == ((-k2, 0, 4 * l, k1), (0, -k4, 16 * l, k3))
    assert cw.W == ((1, 0, 1, 0), (0, 1, 1, 0))
    assert cw.l == 1


def test_intro_gale_polynomial_matches_closed_form(intro_net, intro_params):
    p = gale_polynomial(intro_net, intro_params)
    l, k1, k2, k3, k4 = (intro_params[s] for s in ("l", "k1", "k2", "k3", "k4"))
    assert list(p.coeffs) == [k1 * k3, -k2 * k4 + 16 * k1 * l + 4 * k3 * l, 64 * l * l]


def test_too_few_monomials():
    s = PolynomialSystem(("x1", "x2"), ({(1, 0): 1, (0, 0): -1}, {(0, 1): 1, (0, 0): -1}))
    with pytest.raises(GaleError):
        decompose(s)


def test_reversible_family_has_two_gale_variables():
    net = family_network([2, 1], [3, 0], reversible=True)
    cw = decompose(mass_action_system(net, symbolic=True))
    assert cw.l == 2
    assert set(cw.monomials) == {(1, 0), (0, 1), (2, 1), (3, 0), (0, 0)}
    assert cw.monomials[-1] == (0, 0)


def test_products_vanish_and_pins(intro_net):
    cw = decompose(mass_action_system(intro_net, symbolic=True))
    gs = gale_dual(cw)
    assert _zero(matmul(cw.C, gs.D))
    assert _zero(matmul(cw.W, gs.Q))
    assert gs.D[-1] == (0, 1)
    assert [r[-1] for r in gs.Q] == [0, 0, 0, 1]


def test_intro_recovery(intro_net, intro_params):
    cw = decompose(mass_action_system(intro_net, intro_params))
    gs = gale_dual(cw)
    _, _, roots = cone_roots(gs)
    assert len(roots) == 2
    assert float(roots[0].value) == pytest.approx(9.7976, abs=1e-3)
    x = recover_solution(gs, cw, [roots[0].value]).x
    assert [float(v) for v in x] == pytest.approx([2.1778, 4.4983], rel=1e-4)


def test_recovery_outside_cone(intro_net, intro_params):
    cw = decompose(mass_action_system(intro_net, intro_params))
    gs = gale_dual(cw)
    with pytest.raises(ConeError):
        recover_solution(gs, cw, [0])


def test_correspondence_intro(intro_net, intro_params):
    s = mass_action_system(intro_net, intro_params)
    rep = count_correspondence_check(s, resultant_count(s).count)
    assert rep.agree and rep.gale_count == 2


def test_correspondence_no_states_when_inequality_fails(intro_net, intro_params):
    params = dict(intro_params, k2=1)  # k2 k4 - 16 k1 l - 4 k3 l < 0
    s = mass_action_system(intro_net, params)
    rep = count_correspondence_check(s, resultant_count(s).count)
    assert rep.agree and rep.gale_count == 0


def test_correspondence_a_plus_zero():
    raw = RawRates((2, 1), (0, 0), (Fraction(3), Fraction(5)), (Fraction(1), Fraction(2)),
                   (Fraction(7),))
    s = raw.system()
    rep = count_correspondence_check(s, resultant_count(s).count)
    assert rep.agree and rep.gale_count == 1


def test_double_root_gives_singular_jacobian():
    # (y + 1)^2 - 4y has the double root y = 1 (tangency at kappa = 4)
    # a = [2, 0] with the second species absent from the reaction -> use a = [1, 1], b = [2, 2]
    # h = (y + 1)(y + 1), kappa = c1 c2 = 4, k = (1, 1), c = (2, 2)
    raw = RawRates((1, 1), (2, 2), (Fraction(1), Fraction(1)), (Fraction(2), Fraction(2)),
                   (Fraction(1),))
    s = raw.system()
    cw = decompose(s)
    gs = gale_dual(cw)
    _, _, roots = cone_roots(gs)
    assert len(roots) == 1 and roots[0].multiplicity == 2
    x = recover_solution(gs, cw, [roots[0].value]).x
    J = jacobian(s, x).matrix
    det = J[0][0] * J[1][1] - J[0][1] * J[1][0]
    scale = max(abs(v) for r in J for v in r) ** 2
    assert abs(det) / scale < 1e-6


def test_simple_roots_give_regular_jacobian(intro_net, intro_params):
    s = mass_action_system(intro_net, intro_params)
    cw = decompose(s)
    gs = gale_dual(cw)
    for r in cone_roots(gs)[2]:
        J = jacobian(s, recover_solution(gs, cw, [r.value]).x).matrix
        det = J[0][0] * J[1][1] - J[0][1] * J[1][0]
        assert abs(det) / max(abs(v) for row in J for v in row) ** 2 > 1e-6


rate = st.fractions(min_value=Fraction(1, 40), max_value=50, max_denominator=40)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([((1, 1), (5, 17)), ((2, 1), (3, 0)), ((3, 1), (4, 0)), ((2, 2), (0, 3))]),
       st.lists(rate, min_size=5, max_size=5))
def test_cone_states_solve_the_system(shape, r):
    a, b = shape
    raw = RawRates(a, b, tuple(r[:2]), tuple(r[2:4]), (r[4],))
    s = raw.system()
    cw = decompose(s)
    gs = gale_dual(cw)
    assert _zero(matmul(cw.C, gs.D)) and _zero(matmul(cw.W, gs.Q))
    _, _, pairs = cone_states(gs, cw)
    for _, state in pairs:
        assert max(s.relative_residuals(state.x)) <= 1e-9
    assert len(pairs) == resultant_count(s).count


def test_reversible_gale_count_includes_backward_states():
    # a draw whose only state has the backward flux dominating (y < 0)
    raw = RawRates((2, 1), (1, 2), (Fraction(128807, 50000), Fraction(121893, 10000)),
                   (Fraction(815543, 100000000), Fraction(34299, 1000000)),
                   (Fraction(1), Fraction(113393, 10000)))
    s = raw.system()
    p = rev.normalize_rev_raw(raw)
    count, _ = gale_count(s, p)
    assert count == resultant_count(s).count == newton_count(s).count == 1
    assert rev.classify_rev(p).forward_count == 0
