# test_qform.py

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qsg.errors import InputError
from qsg.field import ONE, ZERO, Scalar
from qsg.qform import (LinForm, LinSpace, QForm, common_factor, factor, low_rank_locus_space,
                       match_factors_mod, min_rank_modulo, minimal_rank_completion, minimal_space,
                       minimal_space_of, perp_project, projection_dimension_report, projection_map,
                       qform_from_monomials, qform_to_monomials, rank_s, reduce_mod_linspace,
                       restrict_to_zero, sample_projection)

HALF = Scalar(Fraction(1, 2))


def var(n, i):
    return LinForm.variable(n, i)


def mono(n, terms):
    return qform_from_monomials(n, terms)


# x, y, z, w in four variables
X, Y, Z, W = (var(4, i) for i in range(4))
Q1 = mono(4, {(0, 1): 1, (2, 3): 1})
Q2 = mono(4, {(0, 1): 1, (2, 3): -1})


def test_gram_convention():
    assert mono(2, {(0, 1): 1}).gram == ((ZERO, HALF), (HALF, ZERO))
    assert mono(1, {(0, 0): 1}).gram == ((ONE,),)
    assert qform_to_monomials(Q1) == {(0, 1): ONE, (2, 3): ONE}
    assert Q1 == QForm.from_product(X, Y) + QForm.from_product(Z, W)


def test_monomial_index_out_of_range():
    with pytest.raises(InputError):
        mono(2, {(0, 2): 1})


def test_rank_s_examples():
    assert rank_s(mono(2, {(0, 1): 1})) == 1
    assert rank_s(Q1) == 2
    assert rank_s(mono(3, {(0, 0): 1, (1, 2): 1})) == 2, "gram rank 3 rounds up"
    assert rank_s(QForm.zero(3)) == 0


def test_minimal_space_examples():
    assert minimal_space(Q1) == LinSpace.full(4)
    assert minimal_space(QForm.square(X)) == LinSpace.span(4, [X])
    assert minimal_space(QForm.zero(4)).dim == 0
    assert minimal_space_of([QForm.square(X), QForm.from_product(X, Y)], 4) == LinSpace.span(4, [X, Y])


def test_linspace_algebra():
    x, y, z = (var(3, i) for i in range(3))
    V, U = LinSpace.span(3, [x, y]), LinSpace.span(3, [y, z])
    assert V.intersect(U) == LinSpace.span(3, [y])
    assert (V + U) == LinSpace.full(3)
    assert LinSpace.span(3, [x]).perp() == LinSpace.span(3, [y, z])
    assert LinSpace.span(3, [x + y]).is_subspace(V)
    assert not V.contains(z)
    assert LinSpace.span(3, [x + y, x - y]) == V, "spans are canonical"


def test_factor_difference_of_squares():
    q = mono(2, {(0, 0): 1, (1, 1): 1})
    w = factor(q)
    assert w.kind == "product"
    assert w.rational, "x^2 + y^2 splits over Q(i)"
    assert w.expand() == q


def test_factor_irreducible_and_square():
    assert factor(Q1).kind == "irreducible"
    x, y = var(2, 0), var(2, 1)
    w = factor(QForm.square(x + y.scale(2)))
    assert w.kind == "square"
    assert w.linear_factors()[0] == x + y.scale(2)
    with pytest.raises(InputError):
        factor(QForm.zero(2))


def test_factor_needs_extension():
    q = mono(2, {(0, 0): 1, (1, 1): -2})
    w = factor(q)
    assert w.kind == "product"
    assert not w.rational
    assert w.disc == Scalar(2)
    assert w.expand() == q
    with pytest.raises(InputError):
        w.linear_factors()


def test_restrict_to_zero_examples():
    assert restrict_to_zero(Q1, LinSpace.span(4, [X])) == QForm.from_product(Z, W)
    assert restrict_to_zero(QForm.from_product(X, Y), LinSpace.span(4, [X])).is_zero()
    q = mono(4, {(0, 0): 1, (1, 2): 1, (2, 3): 1})
    assert restrict_to_zero(q, LinSpace.span(4, [Z])) == QForm.square(X)


def test_reduce_mod_linspace_handles_polynomials():
    x, y, z = (var(3, i) for i in range(3))
    p = QForm.from_product(x, y) + QForm.from_product(x, z)
    V = LinSpace.span(3, [z])
    assert reduce_mod_linspace(p, V) == QForm.from_product(x, y)
    cubic = p.to_mpoly() * z.to_mpoly() + x.to_mpoly() * x.to_mpoly() * y.to_mpoly()
    assert reduce_mod_linspace(cubic, V) == x.to_mpoly() * x.to_mpoly() * y.to_mpoly()


def test_projection_examples():
    x1, x2 = var(2, 0), var(2, 1)
    proj = projection_map(LinSpace.span(2, [x1]), [1])
    z = var(3, 2)
    assert proj.apply(QForm.from_product(x1, x2)) == QForm.from_product(z, var(3, 1))
    assert proj.apply(QForm.square(x1)) == QForm.square(z)
    assert proj.apply(x2) == var(3, 1)


def test_projection_keeps_rank_up_to_dim():
    V = LinSpace.span(4, [X])
    image = projection_map(V, [1]).apply(Q1)
    z = var(5, 4)
    assert image == QForm.from_product(z, var(5, 1)) + QForm.from_product(var(5, 2), var(5, 3))
    assert rank_s(image) == 2


def test_projection_rejects_isotropic_space():
    x, y = var(2, 0), var(2, 1)
    isotropic = LinSpace.span(2, [x + y.scale(Scalar(0, 1))])
    with pytest.raises(InputError):
        projection_map(isotropic, [1])


def test_sample_projection_is_seeded():
    V = LinSpace.span(4, [X, Y])
    a = sample_projection(V, np.random.default_rng(7))
    b = sample_projection(V, np.random.default_rng(7))
    assert a.alpha == b.alpha


def test_projection_dimension_report():
    V = LinSpace.span(4, [X])
    report = projection_dimension_report([QForm.from_product(X, Y)], V, [[1]])
    assert report.property == "projection-dimension"
    assert report.measured == 2
    assert report.holds
    with pytest.raises(InputError):
        projection_dimension_report([Q1], V, [[1], [2]])


def test_perp_project_examples():
    x, y = var(2, 0), var(2, 1)
    V = LinSpace.span(2, [x])
    assert perp_project(x, V).is_zero()
    assert perp_project(x + y, V) == y
    assert perp_project(x + y, LinSpace.zero(2)) == x + y


def test_common_factor():
    x, y, z, w = (var(4, i) for i in range(4))
    assert common_factor(QForm.from_product(x, y), QForm.from_product(x, z)) == x
    assert common_factor(QForm.from_product(x, y), QForm.from_product(z, w)) is None
    assert common_factor(Q1, Q2) is None
    assert common_factor(QForm.from_product(x, y), QForm.from_product(x, z), ignore=0) is None


def test_match_factors_mod():
    x, y, z = (var(3, i) for i in range(3))
    ps = [QForm.square(x), QForm.from_product(y, x + z)]
    qs = [QForm.from_product(y, x).scale(3), QForm.square(x + z)]
    V = LinSpace.span(3, [z])
    assert match_factors_mod(ps, qs, V) == [1, 0]
    assert match_factors_mod(ps, qs, LinSpace.zero(3)) is None


def test_minimal_rank_completion():
    x, y, z = (var(3, i) for i in range(3))
    q = QForm.from_product(x, y) + QForm.square(z)
    U = LinSpace.span(3, [z])
    assert min_rank_modulo(q, U) == 2
    T = minimal_rank_completion(q, U)
    assert minimal_space(T).is_subspace(U)
    assert (q - T).gram_rank == 2


def test_low_rank_locus_contains_rank_one_members():
    V = low_rank_locus_space(Q1, Q2, 1)
    assert LinSpace.span(4, [X, Y]).is_subspace(V)
    assert LinSpace.span(4, [Z, W]).is_subspace(V)
    assert V.dim <= 8


small = st.integers(min_value=-2, max_value=2)


@settings(max_examples=60, deadline=None)
@given(st.lists(small, min_size=10, max_size=10), st.lists(small, min_size=4, max_size=4))
def test_rank_under_restriction(entries, direction):
    n = 4
    rows = [[0] * n for _ in range(n)]
    it = iter(entries)
    for i in range(n):
        for j in range(i, n):
            rows[i][j] = rows[j][i] = next(it)
    q = QForm.from_gram(rows)
    if all(c == 0 for c in direction):
        V = LinSpace.zero(n)
    else:
        V = LinSpace.span(n, [LinForm.of(direction)])
    assert rank_s(restrict_to_zero(q, V)) >= rank_s(q) - V.dim


if __name__ == "__main__":
    pytest.main([__file__])
