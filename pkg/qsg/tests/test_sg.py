# test_sg.py

from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from qsg.errors import InputError, PreconditionError
from qsg.field import ONE, ZERO, Scalar
from qsg.qform import LinForm, LinSpace
from qsg.sg import (ColoredConfig, PointConfig, check_ek_bound, check_ordinary_line_theorem,
                    check_sg_bound, collinear, collinear_configuration, common_line_or_plane,
                    common_vector_or_bounded, config_dim, ek_condition, fermat_configuration,
                    grid_configuration, is_delta_sg, ordinary_lines, partial_ek_condition,
                    planar_configuration, random_colored_config)


def brute_ordinary(c):
    pts = c.points
    out = []
    for i, j in combinations(range(len(pts)), 2):
        if not any(collinear(pts[i], pts[j], pts[t], c.mode) for t in range(len(pts)) if t not in (i, j)):
            out.append((i, j))
    return out


def brute_counts(c):
    pts = c.points
    counts = []
    for i in range(len(pts)):
        partners = sum(1 for j in range(len(pts)) if j != i and any(
            collinear(pts[i], pts[j], pts[t], c.mode) for t in range(len(pts)) if t not in (i, j)))
        counts.append(partners + 1 if partners else 0)
    return counts


def triangle():
    return PointConfig(2, [(0, 0), (1, 0), (0, 1)])


def test_config_dim_examples():
    assert config_dim(collinear_configuration(3)) == 1
    e = [[1 if i == j else 0 for j in range(4)] for i in range(4)]
    assert config_dim(PointConfig(4, e, "vectors")) == 4
    assert config_dim(PointConfig(2, [(3, 5)])) == 0


def test_ordinary_lines_small():
    assert ordinary_lines(triangle()) == [(0, 1), (0, 2), (1, 2)]
    assert ordinary_lines(collinear_configuration(5)) == []


def test_grid_has_twelve_ordinary_lines():
    grid = grid_configuration(3)
    lines = ordinary_lines(grid)
    # 36 pairs minus the 24 pairs on the 8 lines of three
    assert len(lines) == 12
    assert lines == brute_ordinary(grid)


def test_ordinary_lines_rejects_repeats():
    with pytest.raises(InputError):
        ordinary_lines(PointConfig(2, [(0, 0), (0, 0), (1, 1)]))


def test_vectors_are_projective():
    c = PointConfig(2, [(2, 4), (1, 2), (1, 0)], "vectors")
    assert c.points[0] == c.points[1]
    with pytest.raises(InputError):
        PointConfig(2, [(0, 0)], "vectors")


def test_is_delta_sg():
    line = collinear_configuration(4)
    result = is_delta_sg(line, Fraction(1))
    assert result.holds
    assert result.counts == [4, 4, 4, 4]
    tri = is_delta_sg(triangle(), Fraction(1, 10))
    assert not tri.holds
    assert tri.counts == [0, 0, 0]


def test_delta_sg_counts_match_brute_force():
    pts = [(x, y) for x in range(3) for y in range(3)] + [(Fraction(1, 2), Fraction(1, 2))]
    c = PointConfig(2, pts)
    assert is_delta_sg(c, Fraction(0)).counts == brute_counts(c)


def test_check_sg_bound():
    report = check_sg_bound(collinear_configuration(4), Fraction(1))
    assert report.measured == 1 and report.bound == 13 and report.holds
    with pytest.raises(PreconditionError):
        check_sg_bound(triangle(), Fraction(1, 2))


def test_ordinary_line_theorem():
    assert check_ordinary_line_theorem(triangle()).holds
    line = check_ordinary_line_theorem(collinear_configuration(4))
    assert line.holds and not line.details["applicable"]
    fermat = fermat_configuration(4).union()
    report = check_ordinary_line_theorem(fermat)
    assert report.details["theorem"] == "kelly"
    assert report.details["dim"] == 3
    assert not report.details["applicable"]


def test_fermat_configuration_has_no_ordinary_lines():
    c = fermat_configuration(4).union()
    assert len(c.points) == 12
    assert ordinary_lines(c) == []


def test_ek_condition_examples():
    ok = ColoredConfig(2, [[(1, 0)], [(0, 1)], [(1, 1)]])
    assert ek_condition(ok).holds
    bad = ColoredConfig(3, [[(1, 0, 0)], [(0, 1, 0)], [(0, 0, 1)]])
    result = ek_condition(bad)
    assert not result.holds
    assert result.violation == ((0, 0), (1, 0))
    with pytest.raises(InputError):
        ek_condition(ColoredConfig(2, [[(1, 0)], [(0, 1)]]))


def test_check_ek_bound():
    report = check_ek_bound(ColoredConfig(2, [[(1, 0)], [(0, 1)], [(1, 1)]]))
    assert report.measured == 2 and report.bound == 4 and report.holds
    affine = ColoredConfig(2, [[(0, 0), (3, 3)], [(1, 1), (4, 4)], [(2, 2), (5, 5)]], "affine_points")
    report = check_ek_bound(affine)
    assert report.measured == 1 and report.bound == 3
    with pytest.raises(PreconditionError):
        check_ek_bound(ColoredConfig(3, [[(1, 0, 0)], [(0, 1, 0)], [(0, 0, 1)]]))


def test_generated_configurations_satisfy_ek():
    for c in (fermat_configuration(1), fermat_configuration(2), fermat_configuration(4),
              planar_configuration(3), planar_configuration(4, n=5)):
        assert ek_condition(c).holds
        assert check_ek_bound(c).holds


def test_random_colored_config_bound():
    rng = np.random.default_rng(3)
    for _ in range(10):
        c = random_colored_config(rng, n=5, dim=3)
        if any(not s for s in c.sets) or not ek_condition(c).holds:
            continue
        assert check_ek_bound(c).holds


def test_partial_ek_full_config():
    result = partial_ek_condition(planar_configuration(3), Fraction(1))
    assert result.holds
    assert all(f == 1 for row in result.fractions for f in row)
    assert result.bound.holds


def test_partial_ek_isolated_point():
    c = ColoredConfig(3, [[(1, 0, 0), (0, 0, 1)], [(0, 1, 0)], [(1, 1, 0)]])
    result = partial_ek_condition(c, Fraction(1, 2))
    assert not result.holds
    assert result.fractions[0] == [Fraction(1), Fraction(0)]


def test_partial_ek_planted_fraction():
    # (1,0,0) reaches T3 through one of the two members of T2
    c = ColoredConfig(3, [[(1, 0, 0)], [(0, 1, 0), (0, 0, 1)], [(1, 1, 0)]])
    result = partial_ek_condition(c, Fraction(1, 2))
    assert result.fractions[0] == [Fraction(1, 2)]
    assert result.fractions[1] == [Fraction(1), Fraction(0)]
    assert not result.holds
    assert result.bound is None


def test_common_line_or_plane():
    x, y, z, w = (LinForm.variable(4, i) for i in range(4))
    star = [LinSpace.span(4, [x, y]), LinSpace.span(4, [x, z]), LinSpace.span(4, [x, w])]
    result = common_line_or_plane(star)
    assert result.kind == "common_line"
    assert result.space == LinSpace.span(4, [x])
    flat = [LinSpace.span(4, [x, y]), LinSpace.span(4, [y, z]), LinSpace.span(4, [x, z])]
    result = common_line_or_plane(flat)
    assert result.kind == "plane"
    assert result.space == LinSpace.span(4, [x, y, z])
    with pytest.raises(PreconditionError):
        common_line_or_plane([LinSpace.span(4, [x, y]), LinSpace.span(4, [z, w])])


def _check_common_vector(colored, result):
    assert not result.w.is_zero()
    assert result.U.dim <= 4
    for spaces in colored:
        for V in spaces:
            assert V.contains(result.w) or V.is_subspace(result.U)


def test_common_vector_shared():
    n = 5
    e = [LinForm.variable(n, i) for i in range(n)]
    colored = [[LinSpace.span(n, [e[0], e[1]]), LinSpace.span(n, [e[0], e[2]])],
               [LinSpace.span(n, [e[0], e[3]]), LinSpace.span(n, [e[0], e[4]])]]
    result = common_vector_or_bounded(colored)
    assert LinSpace.span(n, [result.w]) == LinSpace.span(n, [e[0]])
    _check_common_vector(colored, result)


def test_common_vector_inside_three_space():
    n = 4
    x, y, z = (LinForm.variable(n, i) for i in range(3))
    colored = [[LinSpace.span(n, [x, y]), LinSpace.span(n, [y, z])],
               [LinSpace.span(n, [x, z]), LinSpace.span(n, [x + y, z])]]
    _check_common_vector(colored, common_vector_or_bounded(colored))


def test_common_vector_rejects_degenerate_inputs():
    n = 4
    x, y, z, w = (LinForm.variable(n, i) for i in range(n))
    with pytest.raises(PreconditionError):
        common_vector_or_bounded([[LinSpace.span(n, [x, y])]])
    with pytest.raises(PreconditionError):
        common_vector_or_bounded([[LinSpace.span(n, [x, y])], [LinSpace.span(n, [z, w])]])
    with pytest.raises(PreconditionError):
        common_vector_or_bounded([[LinSpace.span(n, [x, y])], [LinSpace.span(n, [x])]])


def test_random_configs_match_brute_force():
    rng = np.random.default_rng(11)
    for _ in range(8):
        pts = {(int(a), int(b)) for a, b in rng.integers(0, 4, size=(7, 2))}
        if len(pts) < 2:
            continue
        c = PointConfig(2, sorted(pts))
        assert ordinary_lines(c) == brute_ordinary(c)
        assert is_delta_sg(c, Fraction(0)).counts == brute_counts(c)


if __name__ == "__main__":
    pytest.main([__file__])
