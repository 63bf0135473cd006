# test_pencil.py

import pytest

from qsg.errors import InputError
from qsg.field import ONE, Scalar
from qsg.ideals import codim2_oracle
from qsg.pencil import (classify_pair, codim2_common, common_codim2_space, low_rank_pencil,
                        rank_drop_points, rank_one_companion, span_contains)
from qsg.qform import LinForm, LinSpace, QForm, qform_from_monomials, restrict_to_zero


def var(n, i):
    return LinForm.variable(n, i)


def mono(n, terms):
    return qform_from_monomials(n, terms)


Q1 = mono(4, {(0, 1): 1, (2, 3): 1})        # xy + zw
Q2 = mono(4, {(0, 1): 1, (2, 3): -1})       # xy - zw
XW = mono(4, {(0, 3): 1})
YZ = mono(4, {(1, 2): 1})


def _vanishes(W, forms):
    return all(restrict_to_zero(q, W).is_zero() for q in forms)


def test_span_contains():
    assert span_contains(mono(4, {(0, 1): 2}), Q1, Q2) == (ONE, ONE)
    assert span_contains(XW, Q1, Q2) is None
    assert span_contains(Q1, Q1, Q2) == (ONE, Scalar(0))
    with pytest.raises(InputError):
        span_contains(XW, QForm.zero(4), QForm.zero(4))


def test_low_rank_pencil_quadruple():
    report = low_rank_pencil(Q1, Q2, 1)
    assert not report.identically_low
    assert set(report.rational_roots) == {(ONE, ONE), (ONE, -ONE)}
    assert report.exists


def test_low_rank_pencil_roots_verify():
    A = mono(3, {(0, 0): 1, (1, 2): 1})
    B = mono(3, {(1, 1): 1, (0, 2): 1})
    report = low_rank_pencil(A, B, 1)
    for alpha, beta in report.rational_roots:
        assert (A.scale(alpha) + B.scale(beta)).gram_rank <= 2, f"root ({alpha}:{beta}) is not low rank"


def test_low_rank_pencil_identical_forms():
    assert low_rank_pencil(Q1, Q1, 2).identically_low
    with pytest.raises(InputError):
        low_rank_pencil(Q1, Q2, 0)


def test_rank_drop_points_rectangular():
    a_rows = [[ONE, Scalar(0)], [Scalar(0), Scalar(0)], [Scalar(0), ONE]]
    b_rows = [[Scalar(0), Scalar(0)], [ONE, Scalar(0)], [Scalar(0), Scalar(0)]]
    report = rank_drop_points(a_rows, b_rows)
    assert report.threshold_rank == 1
    assert report.rational_roots == [(Scalar(0), ONE)], "rank drops only at alpha = 0"


def test_codim2_common_shared_factor():
    x, y, u = var(3, 0), var(3, 1), var(3, 2)
    A, B = QForm.from_product(x, u), QForm.from_product(y, u)
    W = codim2_common(A, B)
    assert isinstance(W, LinSpace) and W.dim == 2
    assert _vanishes(W, [A, B])


def test_codim2_common_rank_obstruction():
    A = mono(6, {(0, 1): 1, (2, 3): 1})
    B = mono(6, {(0, 1): 1, (2, 3): 1, (4, 5): 1})
    assert codim2_common(A, B) is None


def test_codim2_common_agrees_with_oracle():
    B = mono(4, {(0, 2): 1})
    W = codim2_common(Q1, B)
    assert W == LinSpace.span(4, [var(4, 0), var(4, 2)])
    assert codim2_oracle([Q1, B])


def test_codim2_negative_agrees_with_oracle():
    A = mono(5, {(0, 1): 1, (2, 3): 1, (4, 4): 1})
    B = QForm.square(var(5, 0) + var(5, 4))
    assert codim2_common(A, B) is None
    assert not codim2_oracle([A, B])


def test_common_codim2_space_three_forms():
    W = common_codim2_space([Q1, Q2, XW])
    assert isinstance(W, LinSpace)
    assert _vanishes(W, [Q1, Q2, XW])


def test_classify_quadruple_pair():
    cases = classify_pair(Q1, Q2, [XW, YZ])
    assert cases.case_i is None
    assert cases.case_ii is not None, "A + B = 2xy is reducible"
    assert "ii" in cases.holds()


def test_classify_squares_report_case_ii():
    x, y = var(3, 0), var(3, 1)
    cases = classify_pair(QForm.square(x), QForm.square(y), [mono(3, {(2, 2): 1})])
    assert cases.case_ii is not None
    assert not cases.is_empty()


def test_classify_span_case():
    A = mono(3, {(0, 0): 1, (1, 2): 1})
    B = mono(3, {(1, 1): 1, (0, 2): 1})
    cases = classify_pair(A, B, [mono(3, {(0, 1): 1}), A + B])
    assert cases.case_i == (1, (ONE, ONE))


def test_classify_codim2_case_depends_on_pair_only():
    x, y, u, w = (var(4, i) for i in range(4))
    A, B = QForm.from_product(x, u), QForm.from_product(y, u)
    cases = classify_pair(A, B, [QForm.from_product(x, y) + QForm.square(w)])
    assert cases.case_iii is not None
    index, W = cases.case_iii
    assert index is None, "no third member shares a 2-space with the pair"
    assert _vanishes(W, [A, B])
    index, W = classify_pair(A, B, [QForm.from_product(x, y)]).case_iii
    assert index == 0
    assert _vanishes(W, [A, B, QForm.from_product(x, y)])


def test_classify_rejects_dependent_pair():
    with pytest.raises(InputError):
        classify_pair(Q1, Q1.scale(2), [XW])


def test_rank_one_companion():
    n = 5
    P = mono(n, {(0, 1): 1, (2, 3): 1, (4, 4): 1})
    a, b = var(n, 0), var(n, 1)
    T = P + QForm.from_product(a, var(n, 2))
    result = rank_one_companion(P, a, b, [T])
    assert result.kind == "companion"
    assert result.index == 0
    assert result.alpha == ONE
    assert result.c == var(n, 2)


def test_rank_one_companion_ms_containment():
    P = mono(3, {(0, 1): 1, (2, 2): 1})
    result = rank_one_companion(P, var(3, 0), var(3, 1), [P])
    assert result.kind == "ms_containment"


if __name__ == "__main__":
    pytest.main([__file__])
