from fractions import Fraction

from fewcrn import reversible as rev
from fewcrn.irreversible import RawRates
from fewcrn.network import mass_action_system
from fewcrn.oracles import newton_count, resultant_count
from fewcrn.polysys import PolynomialSystem

F = Fraction


def test_intro_counts(intro_net, intro_params):
    s = mass_action_system(intro_net, intro_params)
    r = resultant_count(s)
    assert r.count == 2 and not r.probabilistic
    assert newton_count(s).count == 2


def test_symmetric_witness_counts():
    s = rev.symmetric_witness().raw.system()
    r = resultant_count(s)
    assert r.count == 3
    assert sorted(round(x[0], 9) for x in r.solutions) == [1, 2, 3]


def test_no_positive_solution():
    # x1 + 1 = 0 and x2 - 1 = 0 have no positive solution
    s = PolynomialSystem(("x1", "x2"), ({(1, 0): 1, (0, 0): 1}, {(0, 1): 1, (0, 0): -1}))
    assert resultant_count(s).count == 0


def test_solutions_are_polished():
    raw = RawRates((2, 1), (3, 0), (F(1, 40), F(11, 8)), (F(1, 40), F(1, 40)), (F(1, 40),))
    s = raw.system()
    r = resultant_count(s)
    assert r.count >= 1
    assert all(max(s.relative_residuals(list(x))) < 1e-12 for x in r.solutions)


def test_newton_is_marked_probabilistic(intro_net, intro_params):
    assert newton_count(mass_action_system(intro_net, intro_params)).probabilistic
