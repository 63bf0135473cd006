# test_ideals.py

import pytest

from qsg.errors import BudgetExceeded, InputError, PreconditionError
from qsg.field import I, Scalar
from qsg.ideals import (buchberger, codim2_oracle, ideal_member, membership_certificate,
                        normal_form, product_radical_member, radical_member, rational_points,
                        univariate_factors, witness_subset)
from qsg.mpoly import MPoly
from qsg.qform import LinForm, QForm, qform_from_monomials


def mono(n, terms):
    return qform_from_monomials(n, terms)


x, y, z, w = (MPoly.variable(4, i) for i in range(4))
Q1 = mono(4, {(0, 1): 1, (2, 3): 1})
Q2 = mono(4, {(0, 1): 1, (2, 3): -1})
Q3 = mono(4, {(0, 3): 1})
Q4 = mono(4, {(1, 2): 1})
GENS = [Q1.to_mpoly(), Q2.to_mpoly()]


def test_buchberger_keeps_a_basis():
    G = buchberger([x])
    assert G.gens == [x]
    G = buchberger([x * x, x * y])
    assert sorted(str(g) for g in G.gens) == sorted(str(g) for g in (x * x, x * y))


def test_buchberger_removes_content():
    G = buchberger([x.scale(2) + y.scale(4), (z * z).scale(Scalar(0, 3))])
    assert G.gens == [x + y.scale(2), z * z]
    assert all(g.leading()[1] == Scalar(1) for g in G.gens)


def test_normal_form_transitivity():
    G = buchberger([x - y, y - z])
    assert normal_form(x - z, G).is_zero()
    assert not normal_form(x - w, G).is_zero()


def test_ideal_member():
    G = buchberger([x])
    assert ideal_member(x * y, G)
    assert not ideal_member(y, G)
    with pytest.raises(InputError):
        buchberger([])


def test_membership_certificate_reverifies():
    f = x * GENS[0] + (y - 1) * GENS[1]
    h = membership_certificate(f, GENS)
    assert h is not None
    assert h[0] * GENS[0] + h[1] * GENS[1] == f
    assert membership_certificate(Q3.to_mpoly(), GENS) is None


def test_radical_member_quadruple():
    assert radical_member(Q3.to_mpoly() * Q4.to_mpoly(), GENS), "Q3 * Q4 vanishes on Z(Q1, Q2)"
    assert not radical_member(Q3.to_mpoly(), GENS)
    assert not radical_member(Q4.to_mpoly(), GENS)


def test_radical_member_of_square():
    sq = [x * x]
    assert radical_member(x * y, sq)
    assert not radical_member(y, sq)


def test_radical_member_budget(monkeypatch):
    monkeypatch.setenv("QSG_BUDGET_DEGREE", "3")
    with pytest.raises(BudgetExceeded):
        radical_member(Q3.to_mpoly() * Q4.to_mpoly(), GENS)


def test_product_radical_member():
    n = 3
    l1, l2, l3 = (LinForm.variable(n, i) for i in range(3))
    A, B = QForm.square(l1), QForm.square(l2)
    assert product_radical_member([Q3, Q4], Q1, Q2)
    assert product_radical_member([QForm.square(l1 + l2)], A, B)
    assert not product_radical_member([QForm.square(l3)], A, B)


def test_witness_subset():
    assert witness_subset([Q3, Q4], Q1, Q2) == [0, 1], "neither factor alone suffices"
    assert witness_subset([Q3, Q1 + Q2], Q1, Q2) == [1]
    n = 3
    l1, l2, l3 = (LinForm.variable(n, i) for i in range(3))
    squares = [QForm.square(l1 + l2), QForm.square(l3)]
    assert witness_subset(squares, QForm.square(l1), QForm.square(l2)) == [0]


def test_witness_subset_requires_radical():
    n = 3
    l1, l2, l3 = (LinForm.variable(n, i) for i in range(3))
    with pytest.raises(PreconditionError):
        witness_subset([QForm.square(l3)], QForm.square(l1), QForm.square(l2))


def test_witness_subset_larger_than_max_logs_interest(tmp_path, monkeypatch):
    log = tmp_path / "events.json"
    monkeypatch.setenv("QSG_EVENT_LOG", str(log))
    assert witness_subset([Q3, Q4], Q1, Q2, max_size=1) is None
    assert log.exists()


def test_univariate_factors():
    one, zero = Scalar(1), Scalar(0)
    roots, others = univariate_factors([one, zero, Scalar(-1)])
    assert roots == [Scalar(-1), one]
    assert others == []
    roots, others = univariate_factors([one, zero, one])
    assert set(roots) == {I, -I}, "t^2 + 1 splits over Q(i)"
    roots, others = univariate_factors([one, zero, Scalar(-2)])
    assert roots == []
    assert others == [[one, zero, Scalar(-2)]]


def test_rational_points():
    a, b = MPoly.variable(2, 0), MPoly.variable(2, 1)
    result = rational_points([a - 1, b - 2])
    assert result.consistent
    assert result.point == [Scalar(1), Scalar(2)]
    assert not rational_points([a, a - 1]).consistent
    result = rational_points([a * a + 1])
    assert result.consistent
    assert (a * a + 1).evaluate(result.point).is_zero()


def test_codim2_oracle():
    assert codim2_oracle([Q1, mono(4, {(0, 2): 1})])
    assert codim2_oracle([QForm.square(LinForm.variable(4, 0))])


if __name__ == "__main__":
    pytest.main([__file__])
