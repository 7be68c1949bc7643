from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fewcrn import irreversible as irr
from fewcrn import reversible as rev
from fewcrn.network import detect_family
from fewcrn.repro import load_network
from fewcrn.univariate import Poly, count_roots

F = Fraction


def test_normalize_symmetric_witness():
    p = rev.normalize_rev(detect_family(load_network("symmetric.crn")))
    assert p.c == (F(12, 5),) * 2 and p.k == (F(36, 25),) * 2 and p.alpha == F(1, 25)
    w = rev.symmetric_witness()
    assert (p.a, p.b, p.sgn, p.c, p.k, p.alpha) == (w.a, w.b, w.sgn, w.c, w.k, w.alpha)


def test_eliminated_species_scales_both_ells():
    # species 1 sits at x = 6 / 2 = 3 and has a = b = 2
    raw = irr.RawRates((2, 1), (2, 3), (F(6), F(1)), (F(2), F(1)), (F(1), F(1, 2)))
    p = rev.normalize_rev_raw(raw)
    assert p.kept == (1,)
    # l1 -> 9 l1 and l2 -> 9 l2 keep alpha; species 2 is scaled by |b - a| l1 = 2 * 9
    assert p.alpha == F(1, 2)
    assert p.c == (F(1, 18),) and p.k == (F(1, 18),)


def test_witness_roots_are_rational():
    p = rev.symmetric_witness()
    g, _ = rev.build_g_tilde(p)
    assert [g(y) for y in (F(24, 25), F(84, 25), F(144, 25))] == [0, 0, 0]
    cls = rev.classify_rev(p)
    assert [r.value for r in cls.roots] == [F(24, 25), F(84, 25), F(144, 25)]
    assert all(r.exact for r in cls.roots)


def test_witness_reduced_quartic_factors():
    # on x1 = x2 = x the equations reduce to 36/25 - 12/5 x + x^2 - x^4 / 25
    p = Poly([F(36, 25), F(-12, 5), 1, 0, F(-1, 25)])
    assert p * -25 == Poly.from_roots([1, 2, 3, -6])


def test_witness_states_are_exact():
    p = rev.symmetric_witness()
    states = rev.steady_states_rev(p)
    assert [s.x for s in states] == [(1, 1), (2, 2), (3, 3)]
    assert all(s.residual == 0 for s in states)


def test_full_gale_system_at_first_state():
    p = rev.symmetric_witness()
    y1 = F(24, 25)
    y2 = rev.recover_y2(p, y1)
    x = [(k + y1) / c for k, c in zip(p.k, p.c)]
    assert x == [1, 1]
    assert y1 + y2 == x[0] * x[1]            # x^a
    assert y2 / p.alpha == (x[0] * x[1])**2  # x^b
    assert y2 > 0


def test_recover_y2_rejects_the_boundary():
    p = rev.rev_params([2, 1], [3, 0], [1, 5], [1, 1], 1)
    with pytest.raises(ValueError):
        rev.recover_y2(p, p.k_minus)
    with pytest.raises(ValueError):
        rev.recover_y2(p, -p.k_plus)


def test_single_species_expansion():
    k, c, alpha = F(3), F(2), F(1, 7)
    p = rev.rev_params([1], [2], [k], [c], alpha)
    g, interval = rev.build_g_tilde(p)
    y = Poly.x()
    assert g == (y + k) / c - (y + k) * (y + k) * (alpha / c**2) - y
    assert interval == (-k, rev.INF)


def test_alpha_to_zero_recovers_irreversible_g():
    a, b, k, c = (2, 1), (3, 0), (F(1), F(12)), (F(3), F(5))
    p = rev.rev_params(a, b, k, c, F(1, 1000))
    g, _ = rev.build_g_tilde(p)
    ip = irr.params(a, b, k, p.c_pow(a))
    backward = rev._prod(p, b) * (p.alpha / p.c_pow(b))
    assert g + backward == irr.build_g(ip).g / p.c_pow(a)


def test_large_alpha_leaves_one_state():
    q = rev.symmetric_witness()
    p = rev.rev_params(q.a, q.b, q.k, q.c, 1000)
    assert rev.classify_rev(p).exact_count == 1


def test_swap_is_an_involution():
    p = rev.rev_params([2, 1], [3, 0], [F(2), F(9)], [F(1, 3), F(4)], F(5, 7))
    assert rev.symmetric_swap(rev.symmetric_swap(p)) == p


def test_swap_turns_all_minus_into_all_plus():
    p = rev.rev_params([3, 2], [1, 0], [1, 2], [1, 1], 2)
    assert set(p.sgn) == {-1}
    assert set(rev.symmetric_swap(p).sgn) == {1}
    rep = rev.classify_case_all_plus(p)
    assert rep.swapped


@pytest.mark.parametrize("a, b, bound", [
    ((2, 1), (3, 0), 3),
    ((2, 3, 3, 6), (1, 2, 4, 7), 7),
    ((1, 1), (2, 2), 3),
])
def test_mixed_sign_bound(a, b, bound):
    p = rev.rev_params(a, b, [1] * len(a), [1] * len(a), 1)
    assert rev.mixed_sign_bound(p) == bound
    assert rev.mixed_sign_bound(rev.symmetric_swap(p)) == bound


def test_bernstein_value_example():
    assert rev.bernstein_value((2, 3, 3, 6), (1, 2, 4, 7)) == 40
    assert rev.bernstein_value((2,), (3,)) == 3


def test_side_bounds():
    p = rev.rev_params([2, 1], [3, 0], [1, 1], [1, 1], 1)
    assert rev.side_bounds(p) == (3, None)
    q = rev.rev_params([2, 3, 3, 6], [1, 2, 4, 7], [1] * 4, [1] * 4, 1)
    assert rev.side_bounds(q) == (7, 13)
    assert rev.side_bounds(rev.symmetric_witness()) == (3, 3)


def test_witness_certificate_holds():
    rep = rev.classify_case_all_plus(rev.symmetric_witness())
    assert rep.exact_count == rep.total_count == 3
    assert rep.v0 > rep.w0 and rep.dv0 < 0
    assert rep.certificate == "holds"


def test_constructive_seed_gives_three():
    w = rev.constructive_seed([2, 1], [3, 0])
    p = w.params()
    assert count_roots(rev.build_g_tilde(p)[0], *p.interval) == 3
    states = rev.steady_states_rev(p)
    assert len(states) == 3 and all(s.residual < 1e-9 for s in states)


def test_constructive_seed_swapped_shape():
    w = rev.constructive_seed([3, 0], [2, 1])
    assert w is not None and w.count == 3
    assert rev.classify_rev(w.params()).exact_count == 3


def test_conjecture_search_records_witnesses():
    (res,) = rev.conjecture_search([((2, 1), (3, 0))], 50, seed=4)
    assert res.bound == 3 and res.max_count == 3
    assert res.witnesses and not res.bound_violations
    assert sum(res.histogram.values()) == 50
    for w in res.witnesses:
        assert rev.classify_rev(w.params()).exact_count == 3


def test_conjecture_search_is_deterministic():
    one = rev.conjecture_search([((2, 2), (4, 1))], 30, seed=9, constructive=False)
    two = rev.conjecture_search([((2, 2), (4, 1))], 30, seed=9, constructive=False)
    assert one[0].histogram == two[0].histogram and one[0].witnesses == two[0].witnesses


rate = st.fractions(min_value=F(1, 50), max_value=50, max_denominator=50)
plus_shape = st.sampled_from([((1, 1), (2, 2)), ((2, 1), (3, 2)), ((1, 0), (3, 1)), ((2, 2), (3, 4))])


@settings(max_examples=150, deadline=None)
@given(plus_shape, st.lists(rate, min_size=5, max_size=5))
def test_all_plus_counts_follow_v_and_w(shape, r):
    a, b = shape
    p = rev.rev_params(a, b, r[:2], r[2:4], r[4])
    rep = rev.classify_case_all_plus(p)
    assert rep.total_count <= 3
    if rep.v0 <= rep.w0:
        assert rep.exact_count <= 2
    else:
        assert rep.exact_count >= 1


mixed_shape = st.sampled_from([((2, 1), (3, 0)), ((2, 2), (4, 1)), ((2, 3), (3, 2)), ((1, 2), (3, 0))])


@settings(max_examples=150, deadline=None)
@given(mixed_shape, st.lists(rate, min_size=5, max_size=5))
def test_side_bounds_hold_and_states_solve(shape, r):
    a, b = shape
    p = rev.rev_params(a, b, r[:2], r[2:4], r[4])
    g, (lo, hi) = rev.build_g_tilde(p)
    fwd, bwd = rev.side_bounds(p)
    if fwd is not None:
        assert count_roots(g, 0, hi) <= fwd
    if bwd is not None:
        assert count_roots(g, lo, 0) <= bwd
    cls = rev.classify_rev(p)
    assert cls.exact_count == count_roots(rev.build_g_tilde(rev.symmetric_swap(p))[0],
                                          *rev.symmetric_swap(p).interval)
    for s in rev.steady_states_rev(p):
        assert s.residual <= 1e-9 and s.y2 > 0 and min(s.x) > 0
