# sg.py

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from qsg import linalg
from qsg.config import get_settings
from qsg.data_model import (BoundReport, CommonVectorResult, DeltaSGResult, EKResult, LineOrPlane,
                            PartialEKResult)
from qsg.errors import InputError, PreconditionError, QsgError
from qsg.event_logger import log_event
from qsg.field import ONE, ZERO, I, Scalar
from qsg.qform import LinForm, LinSpace
from qsg.seeding import random_int

logger = logging.getLogger(__name__)

Point = Tuple[Scalar, ...]
MODES = ("affine_points", "vectors")


def _normalize(p: Point) -> Point:
    lead = next((c for c in p if not c.is_zero()), None)
    if lead is None:
        raise InputError("the zero vector is not a projective point")
    inv = lead.inverse()
    return tuple(c * inv for c in p)


# --- Configurations ---


@dataclass
class PointConfig:
    n: int
    points: List[Point]
    mode: str = "affine_points"

    def __post_init__(self):
        if self.mode not in MODES:
            raise InputError(f"unknown mode: {self.mode}")
        pts = []
        for p in self.points:
            p = tuple(Scalar.of(c) for c in p)
            if len(p) != self.n:
                raise InputError(f"point of dimension {len(p)} in a configuration of dimension {self.n}")
            pts.append(_normalize(p) if self.mode == "vectors" else p)
        self.points = pts

    def __len__(self) -> int:
        return len(self.points)

    def is_real(self) -> bool:
        return all(c.is_real() for p in self.points for c in p)


@dataclass
class ColoredConfig:
    n: int
    sets: List[List[Point]]
    mode: str = "vectors"

    def __post_init__(self):
        self.sets = [PointConfig(self.n, s, self.mode).points for s in self.sets]

    @property
    def k(self) -> int:
        return len(self.sets)

    def union(self) -> PointConfig:
        return PointConfig(self.n, [p for s in self.sets for p in s], self.mode)


def _check_distinct(points: Sequence[Point]) -> None:
    if len(set(points)) != len(points):
        raise InputError("configuration contains repeated points")


def config_dim(c: PointConfig) -> int:
    if not c.points:
        raise InputError("config_dim needs a nonempty configuration")
    if c.mode == "vectors":
        return linalg.rank(c.points)
    base = c.points[0]
    return linalg.rank([[x - y for x, y in zip(p, base)] for p in c.points[1:]])


# --- Lines ---


def line_key(p: Point, q: Point, mode: str) -> Tuple:
    """Canonical key of the line through two distinct points."""
    if mode == "vectors":
        rows, _ = linalg.rref([p, q], len(p))
        return tuple(tuple(r) for r in rows)
    d = _normalize(tuple(y - x for x, y in zip(p, q)))
    k = next(i for i, c in enumerate(d) if not c.is_zero())
    base = tuple(x - p[k] * dx for x, dx in zip(p, d))
    return d, base


def collinear(p: Point, q: Point, r: Point, mode: str) -> bool:
    if mode == "vectors":
        return linalg.rank([p, q, r]) <= 2
    return linalg.rank([[y - x for x, y in zip(p, q)], [y - x for x, y in zip(p, r)]]) <= 1


def _lines(points: Sequence[Point], mode: str) -> Dict[Tuple, Set[int]]:
    lines: Dict[Tuple, Set[int]] = {}
    for i, j in combinations(range(len(points)), 2):
        lines.setdefault(line_key(points[i], points[j], mode), set()).update((i, j))
    return lines


def ordinary_lines(c: PointConfig) -> List[Tuple[int, int]]:
    """Pairs whose line holds no third point of the configuration."""
    if len(c.points) < 2:
        raise InputError("ordinary_lines needs at least two points")
    _check_distinct(c.points)
    out = [tuple(sorted(members)) for members in _lines(c.points, c.mode).values() if len(members) == 2]
    return sorted(out)


def is_delta_sg(c: PointConfig, delta: Fraction) -> DeltaSGResult:
    m = len(c.points)
    if m < 2:
        raise InputError("is_delta_sg needs at least two points")
    _check_distinct(c.points)
    counts = [0] * m
    for members in _lines(c.points, c.mode).values():
        if len(members) >= 3:
            for i in members:
                counts[i] += len(members) - 1
    # j ranges over all of [m]; j = i counts once v_i lies on a rich line
    counts = [cnt + 1 if cnt else 0 for cnt in counts]
    threshold = Fraction(delta) * m
    return DeltaSGResult(all(cnt >= threshold for cnt in counts), counts, threshold)


def check_sg_bound(c: PointConfig, delta: Fraction) -> BoundReport:
    delta = Fraction(delta)
    result = is_delta_sg(c, delta)
    if not result.holds:
        raise PreconditionError(f"configuration is not a {delta}-SG configuration")
    measured = config_dim(c)
    bound = 12 / delta + 1
    return BoundReport("robust-sg-dimension", measured, bound, measured <= bound,
                       {"delta": str(delta), "points": len(c.points)})


def check_ordinary_line_theorem(c: PointConfig) -> BoundReport:
    """Real points not collinear, or complex points not coplanar, have an ordinary line."""
    _check_distinct(c.points)
    affine = c.mode == "affine_points"
    dim = config_dim(c)
    if c.is_real():
        theorem, applicable = "sylvester-gallai", dim >= (2 if affine else 3)
    else:
        theorem, applicable = "kelly", dim >= (3 if affine else 4)
    found = len(ordinary_lines(c)) if len(c.points) >= 2 else 0
    return BoundReport("ordinary-line", found, 1, (not applicable) or found >= 1,
                       {"theorem": theorem, "applicable": applicable, "dim": dim})


# --- Edelstein-Kelly ---


def _distinct_points(p: Point, q: Point) -> bool:
    # vectors are normalized, so equality means proportionality
    return p != q


def ek_condition(c: ColoredConfig) -> EKResult:
    if c.k < 3:
        raise InputError("the colored condition needs at least three sets")
    for i, j in combinations(range(c.k), 2):
        for a, p in enumerate(c.sets[i]):
            for b, q in enumerate(c.sets[j]):
                if not _distinct_points(p, q):
                    continue
                if not _has_third(c, i, j, p, q):
                    return EKResult(False, ((i, a), (j, b)))
    return EKResult(True)


def _has_third(c: ColoredConfig, i: int, j: int, p: Point, q: Point) -> bool:
    for t in range(c.k):
        if t in (i, j):
            continue
        for r in c.sets[t]:
            if r != p and r != q and collinear(p, q, r, c.mode):
                return True
    return False


def check_ek_bound(c: ColoredConfig) -> BoundReport:
    result = ek_condition(c)
    if not result.holds:
        raise PreconditionError(f"colored condition fails at {result.violation}")
    measured = config_dim(c.union())
    bound = 4 if c.mode == "vectors" else 3
    return BoundReport("ek-dimension", measured, bound, measured <= bound, {"mode": c.mode, "sets": c.k})


def _spans_third(p: Point, q: Point, r: Point, mode: str) -> bool:
    if mode == "vectors":
        return linalg.rank([p, q, r]) == linalg.rank([p, q])
    return collinear(p, q, r, mode)


def partial_ek_condition(c: ColoredConfig, delta: Fraction) -> PartialEKResult:
    """Every point pairs with a delta fraction of the larger other set through the third set."""
    delta = Fraction(delta)
    if c.k != 3:
        raise InputError("the partial condition is defined for three sets")
    if any(not s for s in c.sets):
        raise InputError("all three sets must be nonempty")
    for i, j in combinations(range(3), 2):
        if set(c.sets[i]) & set(c.sets[j]):
            raise InputError(f"sets {i} and {j} are not disjoint")
    fractions: List[List[Fraction]] = []
    for i in range(3):
        j, t = [x for x in range(3) if x != i]
        larger, third = (j, t) if len(c.sets[j]) >= len(c.sets[t]) else (t, j)
        row = []
        for p in c.sets[i]:
            hits = sum(1 for q in c.sets[larger]
                       if any(_spans_third(p, q, r, c.mode) for r in c.sets[third]))
            row.append(Fraction(hits, len(c.sets[larger])))
        fractions.append(row)
    holds = all(f >= delta for row in fractions for f in row)
    if not holds:
        return PartialEKResult(False, fractions)
    measured = config_dim(c.union())
    bound = get_settings().ek_partial_constant / delta ** 3
    report = BoundReport("partial-ek-dimension", measured, bound, measured <= bound, {"delta": str(delta)})
    if not report.holds:
        log_event("theorem_interest", {"what": "partial-ek-dimension", "measured": measured,
                                       "bound": str(bound)})
    return PartialEKResult(True, fractions, report)


# --- Intersecting planes ---


def _check_planes(spaces: Sequence[LinSpace]) -> None:
    for V in spaces:
        if V.dim != 2:
            raise PreconditionError(f"space {V} has dimension {V.dim}, expected 2")


def _meets_in_line(V: LinSpace, W: LinSpace) -> bool:
    return V.intersect(W).dim == 1


def common_line_or_plane(spaces: Sequence[LinSpace]) -> LineOrPlane:
    """Pairwise-meeting 2-spaces share a line or all lie in one 3-space."""
    distinct = list(dict.fromkeys(spaces))
    if len(distinct) < 2:
        raise PreconditionError("need at least two distinct spaces")
    _check_planes(distinct)
    for V, W in combinations(distinct, 2):
        if not _meets_in_line(V, W):
            raise PreconditionError(f"{V} and {W} do not meet in a line")
    common = distinct[0]
    for V in distinct[1:]:
        common = common.intersect(V)
    if common.dim == 1:
        return LineOrPlane("common_line", common)
    total = distinct[0]
    for V in distinct[1:]:
        total = total + V
    if total.dim == 3:
        return LineOrPlane("plane", total)
    log_event("theorem_interest", {"what": "common_line_or_plane", "sum_dim": total.dim})
    raise QsgError("pairwise-meeting planes with neither a common line nor a common 3-space")


def common_vector_or_bounded(colored: Sequence[Sequence[LinSpace]]) -> CommonVectorResult:
    """w != 0 and U, dim U <= 4, with every space containing w or lying in U."""
    if len(colored) < 2:
        raise PreconditionError("need at least two colors")
    colors = [list(dict.fromkeys(c)) for c in colored]
    if any(not c for c in colors):
        raise PreconditionError("every color needs at least one space")
    for c in colors:
        _check_planes(c)
    for a, b in combinations(range(len(colors)), 2):
        for V in colors[a]:
            for W in colors[b]:
                if not _meets_in_line(V, W):
                    raise PreconditionError(f"cross pair {V}, {W} does not meet in a line")

    everything = [V for c in colors for V in c]
    candidates: List[Point] = []
    for c in colors:
        if len(c) >= 2:
            common = c[0]
            for V in c[1:]:
                common = common.intersect(V)
            if common.dim == 1:
                candidates.append(common.basis[0])
    for a, b in combinations(range(len(colors)), 2):
        for V in colors[a]:
            for W in colors[b]:
                candidates.append(V.intersect(W).basis[0])

    n = everything[0].n
    for w in candidates:
        rest = [V for V in everything if not V.contains(w)]
        U = LinSpace.zero(n)
        for V in rest:
            U = U + V
        if U.dim <= 4:
            return CommonVectorResult(LinForm(w), U)
    log_event("theorem_interest", {"what": "common_vector_or_bounded", "spaces": len(everything)})
    raise QsgError("no common vector with a bounded remainder space")


# --- Generators ---


def fermat_configuration(k: int) -> ColoredConfig:
    """Three colors of k points each; A_a, B_b, C_c are collinear iff a + b + c = 0 mod k."""
    roots = {1: ONE, 2: -ONE, 4: I}
    if k not in roots:
        raise InputError("k must be 1, 2 or 4 for roots of unity in Q(i)")
    zeta = roots[k]
    powers = [zeta ** j for j in range(k)]
    a = [(ZERO, ONE, -z) for z in powers]
    b = [(-z, ZERO, ONE) for z in powers]
    c = [(ONE, -z, ZERO) for z in powers]
    return ColoredConfig(3, [a, b, c], "vectors")


def planar_configuration(per_set: int, n: int = 3, k: int = 3) -> ColoredConfig:
    """k colors of distinct directions inside the plane span{e1, e2}."""
    if per_set < 3:
        raise InputError("per_set must be at least 3 for the colored condition to hold")
    if n < 2:
        raise InputError("planar configurations need n >= 2")
    sets = []
    t = 0
    for _ in range(k):
        s = []
        for _ in range(per_set):
            s.append(tuple([ONE, Scalar(t)] + [ZERO] * (n - 2)))
            t += 1
        sets.append(s)
    return ColoredConfig(n, sets, "vectors")


def grid_configuration(side: int, n: int = 2) -> PointConfig:
    """The affine grid {0..side-1}^2 embedded in the first two coordinates."""
    if n < 2:
        raise InputError("grid configurations need n >= 2")
    pts = [tuple([Scalar(x), Scalar(y)] + [ZERO] * (n - 2)) for x in range(side) for y in range(side)]
    return PointConfig(n, pts, "affine_points")


def collinear_configuration(m: int, n: int = 2) -> PointConfig:
    pts = [tuple([Scalar(t)] + [Scalar(2 * t)] + [ZERO] * (n - 2)) for t in range(m)]
    return PointConfig(n, pts, "affine_points")


def random_colored_config(rng: np.random.Generator, n: int = 4, dim: int = 3, per_set: int = 3,
                          k: int = 3, bound: int = 1) -> ColoredConfig:
    """Vectors with small integer coordinates inside a random dim-dimensional subspace."""
    basis = [[Scalar(random_int(rng, -bound, bound)) for _ in range(n)] for _ in range(dim)]
    sets = []
    seen: Set[Point] = set()
    for _ in range(k):
        s: List[Point] = []
        for _ in range(get_settings().resample_limit):
            if len(s) == per_set:
                break
            coeffs = [Scalar(random_int(rng, -bound, bound)) for _ in range(dim)]
            v = [ZERO] * n
            for cf, row in zip(coeffs, basis):
                v = [x + cf * y for x, y in zip(v, row)]
            if all(x.is_zero() for x in v):
                continue
            p = _normalize(tuple(v))
            if p not in seen:
                seen.add(p)
                s.append(p)
        sets.append(s)
    return ColoredConfig(n, sets, "vectors")
