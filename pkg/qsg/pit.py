# pit.py
# Sums of three products of quadratics: evaluation, expansion, randomized
# and hitting-set based zero testing.

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product as cartesian
from typing import Iterator, List, Optional, Sequence

import numpy as np

from qsg import linalg
from qsg.config import DEFAULT_HITTING_K, get_settings
from qsg.data_model import PitVerdict, SimplicityReport
from qsg.errors import BudgetExceeded, InputError, ResampleExhausted
from qsg.event_logger import log_event
from qsg.field import ONE, ZERO, Scalar
from qsg.mpoly import MPoly, product
from qsg.qform import QForm
from qsg.seeding import make_rng, random_int

logger = logging.getLogger(__name__)

GATES = 3


@dataclass(frozen=True)
class Circuit:
    n: int
    gates: tuple

    def __post_init__(self):
        gates = tuple(tuple(g) for g in self.gates)
        object.__setattr__(self, "gates", gates)
        if len(gates) != GATES:
            raise InputError(f"a circuit has {GATES} multiplication gates, got {len(gates)}")
        for i, g in enumerate(gates):
            if not g:
                raise InputError(f"gate {i} is empty")
            for q in g:
                if q.n != self.n:
                    raise InputError(f"gate {i} holds a form in {q.n} variables, circuit has {self.n}")

    @property
    def d(self) -> int:
        return 2 * max(len(g) for g in self.gates)


def evaluate(c: Circuit, point: Sequence[object]) -> Scalar:
    if len(point) != c.n:
        raise InputError(f"point has {len(point)} coordinates, circuit has {c.n} variables")
    x = [Scalar.of(p) for p in point]
    total = ZERO
    for gate in c.gates:
        value = ONE
        for q in gate:
            value = value * q.evaluate(x)
            if value.is_zero():
                break
        total = total + value
    return total


def _check_oracle_budget(c: Circuit) -> None:
    settings = get_settings()
    if c.d > settings.budget_degree:
        raise BudgetExceeded(f"circuit degree {c.d} exceeds the budget {settings.budget_degree}")
    if c.n > settings.oracle_max_vars:
        raise BudgetExceeded(f"{c.n} variables exceed the oracle cap {settings.oracle_max_vars}")


def _gate_polys(c: Circuit) -> List[MPoly]:
    return [product([q.to_mpoly() for q in g]) for g in c.gates]


def expand_oracle(c: Circuit) -> MPoly:
    _check_oracle_budget(c)
    gates = _gate_polys(c)
    return gates[0] + gates[1] + gates[2]


def _shared_factor(c: Circuit) -> Optional[int]:
    for idx, q in enumerate(c.gates[0]):
        v = q.vector()
        if all(any(_proportional(v, r.vector()) for r in g) for g in c.gates[1:]):
            return idx
    return None


def _proportional(u, v) -> bool:
    return linalg.rank([u, v]) == 1


def simplicity_minimality(c: Circuit) -> SimplicityReport:
    _check_oracle_budget(c)
    gates = _gate_polys(c)
    shared = _shared_factor(c)
    zero_subsets = []
    for size in (1, 2):
        for subset in combinations(range(GATES), size):
            total = gates[subset[0]]
            for i in subset[1:]:
                total = total + gates[i]
            if total.is_zero():
                zero_subsets.append(list(subset))
    zero = (gates[0] + gates[1] + gates[2]).is_zero()
    return SimplicityReport(simple=shared is None, minimal=not zero_subsets, zero=zero,
                            shared_factor=shared, zero_subsets=zero_subsets)


# --- Randomized testing ---


def sz_grid(c: Circuit) -> List[Scalar]:
    return [Scalar(v) for v in range(2 * c.d + 1)]


def sz_test(c: Circuit, trials: int, seed: int) -> PitVerdict:
    """Evaluate at random points of {0..2d}^n; a nonzero value is a witness."""
    rng = make_rng(seed)
    grid = sz_grid(c)
    for trial in range(trials):
        point = [grid[random_int(rng, 0, len(grid) - 1)] for _ in range(c.n)]
        value = evaluate(c, point)
        if not value.is_zero():
            return PitVerdict(False, point, value, trial, "sz")
    return PitVerdict(True, method="sz")


def sz_frequency(c: Circuit, seeds: Sequence[int]) -> Fraction:
    """Fraction of seeds whose single random point is a witness."""
    if not seeds:
        raise InputError("sz_frequency needs at least one seed")
    hits = sum(1 for s in seeds if not sz_test(c, 1, s).zero)
    return Fraction(hits, len(seeds))


# --- Hitting sets ---


@dataclass(frozen=True)
class HittingSet:
    n: int
    d: int
    k: int
    t_values: tuple
    grid: tuple
    identity: bool = False

    def matrix(self, t: Scalar) -> List[List[Scalar]]:
        """The n x k substitution x = M_t y with (M_t)_ij = t^(i*j), 1-based."""
        if self.identity:
            return [[ONE if i == j else ZERO for j in range(self.k)] for i in range(self.n)]
        return [[t ** ((i + 1) * (j + 1)) for j in range(self.k)] for i in range(self.n)]

    @property
    def block_size(self) -> int:
        return len(self.grid) ** self.k

    def __len__(self) -> int:
        return len(self.t_values) * self.block_size

    def block(self, t: Scalar) -> Iterator[List[Scalar]]:
        m = self.matrix(t)
        for y in cartesian(self.grid, repeat=self.k):
            yield [sum((mij * yj for mij, yj in zip(row, y) if not yj.is_zero()), ZERO) for row in m]

    def points(self) -> Iterator[List[Scalar]]:
        for t in self.t_values:
            yield from self.block(t)


def hitting_set_generate(n: int, d: int, k: int = DEFAULT_HITTING_K, identity: bool = False) -> HittingSet:
    if n < 1 or d < 1:
        raise InputError("n and d must be positive")
    if not 1 <= k <= n:
        raise InputError(f"k must lie in [1, n], got k={k}, n={n}")
    if identity and k != n:
        raise InputError("the identity map needs k = n")
    grid = tuple(Scalar(v) for v in range(d + 1))
    if identity:
        t_values = (ONE,)
    else:
        t_values = tuple(Scalar(t) for t in range(1, d * k * n + 2))
    hs = HittingSet(n, d, k, t_values, grid, identity)
    logger.debug("hitting set n=%d d=%d k=%d with %d points", n, d, k, len(hs))
    return hs


def _restricted(expansion: MPoly, hs: HittingSet, t: Scalar) -> MPoly:
    m = hs.matrix(t)
    images = []
    for row in m:
        terms = {}
        for j, c in enumerate(row):
            if not c.is_zero():
                exp = [0] * hs.k
                exp[j] = 1
                terms[tuple(exp)] = c
        images.append(MPoly(hs.k, terms))
    return expansion.substitute(images)


def pit_run(c: Circuit, hs: HittingSet, assisted: bool = False) -> PitVerdict:
    """First nonzero point of the stream, or zero on H.

    The default run only evaluates the circuit at points of H. With assisted=True the
    white-box expansion may answer "zero" outright and skip t-blocks on which its
    restriction vanishes; the verdict is the same.
    """
    if hs.n != c.n:
        raise InputError(f"hitting set for {hs.n} variables, circuit has {c.n}")
    expansion = None
    if assisted:
        try:
            expansion = expand_oracle(c)
        except BudgetExceeded:
            logger.info("expansion over budget, scanning without it")
        if expansion is not None and expansion.is_zero():
            return PitVerdict(True, method="expansion")

    index = 0
    first_row = len(hs.grid)
    for t in hs.t_values:
        for offset, point in enumerate(hs.block(t)):
            value = evaluate(c, point)
            if not value.is_zero():
                return PitVerdict(False, point, value, index + offset, "scan")
            if offset + 1 == first_row and expansion is not None and _restricted(expansion, hs, t).is_zero():
                logger.debug("skipping block t=%s: restriction vanishes", t)
                break
        index += hs.block_size
    return PitVerdict(True, method="scan")


# --- Generators ---


def _random_quadratic(rng: np.random.Generator, n: int, bound: int = 2) -> QForm:
    rows = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            rows[i][j] = rows[j][i] = Scalar(random_int(rng, -bound, bound))
    return QForm.from_gram(rows)


def zero_circuit(seed: int, n: int = 4) -> Circuit:
    """A^2 - B^2 - (A - B)(A + B) for random quadratics A, B."""
    rng = make_rng(seed)
    A, B = _random_quadratic(rng, n), _random_quadratic(rng, n)
    return Circuit(n, ([A, A], [-B, B], [-(A - B), A + B]))


def random_circuit(seed: int, n: int = 4, gate_len: int = 2) -> Circuit:
    """Random nonzero circuit; draws with a vanishing expansion are re-drawn."""
    rng = make_rng(seed)
    limit = get_settings().resample_limit
    for attempt in range(limit):
        gates = [[_random_quadratic(rng, n) for _ in range(gate_len)] for _ in range(GATES)]
        if any(q.is_zero() for g in gates for q in g):
            continue
        c = Circuit(n, gates)
        if not expand_oracle(c).is_zero():
            return c
        log_event("resample", {"what": "random circuit", "attempt": attempt})
    raise ResampleExhausted(f"no nonzero circuit after {limit} draws")
