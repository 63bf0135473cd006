# seeding.py
# One numpy Generator per invocation; sub-seeds come from SeedSequence.spawn
# in call order, so the same root seed always yields the same children.

from fractions import Fraction
from typing import List

import numpy as np

from qsg.field import Scalar


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed))


def spawn_seeds(seed: int, count: int) -> List[int]:
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


def random_int(rng: np.random.Generator, low: int, high: int) -> int:
    """Uniform integer in [low, high]."""
    return int(rng.integers(low, high + 1))


def random_unit_rational(rng: np.random.Generator, denominator_bound: int) -> Fraction:
    """Uniform on the grid {0, 1/D, ..., 1}."""
    return Fraction(random_int(rng, 0, denominator_bound), denominator_bound)


def random_scalar(rng: np.random.Generator, bound: int = 3, gaussian: bool = False) -> Scalar:
    re = random_int(rng, -bound, bound)
    im = random_int(rng, -bound, bound) if gaussian else 0
    return Scalar(re, im)
