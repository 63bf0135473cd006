# qform.py

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from qsg import linalg
from qsg.config import get_settings
from qsg.data_model import BoundReport
from qsg.errors import InputError, ResampleExhausted
from qsg.event_logger import log_event
from qsg.field import ONE, ZERO, ExtScalar, FieldElement, Scalar, is_square, sqrt_of
from qsg.mpoly import MPoly
from qsg.seeding import random_unit_rational

logger = logging.getLogger(__name__)

Vector = Tuple[Scalar, ...]


def _vec(x) -> Vector:
    if isinstance(x, LinForm):
        return x.coeffs
    return tuple(Scalar.of(c) for c in x)


def _leading_index(v: Sequence[object]) -> Optional[int]:
    return next((i for i, c in enumerate(v) if not (c == 0)), None)


# --- Linear forms ---


@dataclass(frozen=True)
class LinForm:
    coeffs: Vector

    @classmethod
    def of(cls, coeffs: Iterable[object]) -> "LinForm":
        return cls(tuple(Scalar.of(c) for c in coeffs))

    @classmethod
    def variable(cls, n: int, i: int) -> "LinForm":
        if not 0 <= i < n:
            raise InputError(f"variable index {i} out of range for {n} variables")
        return cls(tuple(ONE if j == i else ZERO for j in range(n)))

    @classmethod
    def zero(cls, n: int) -> "LinForm":
        return cls((ZERO,) * n)

    @property
    def n(self) -> int:
        return len(self.coeffs)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def _check(self, other: "LinForm") -> None:
        if other.n != self.n:
            raise InputError(f"variable count mismatch: {self.n} vs {other.n}")

    def __add__(self, other: "LinForm") -> "LinForm":
        self._check(other)
        return LinForm(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "LinForm") -> "LinForm":
        self._check(other)
        return LinForm(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "LinForm":
        return LinForm(tuple(-a for a in self.coeffs))

    def scale(self, c) -> "LinForm":
        c = Scalar.of(c)
        return LinForm(tuple(a * c for a in self.coeffs))

    def __mul__(self, c) -> "LinForm":
        if isinstance(c, LinForm):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def dot(self, other: "LinForm") -> Scalar:
        self._check(other)
        total = ZERO
        for a, b in zip(self.coeffs, other.coeffs):
            total = total + a * b
        return total

    def normalized(self) -> "LinForm":
        i = _leading_index(self.coeffs)
        if i is None:
            return self
        return self.scale(self.coeffs[i].inverse())

    def is_proportional(self, other: "LinForm") -> bool:
        self._check(other)
        return linalg.rank([self.coeffs, other.coeffs]) <= 1

    def evaluate(self, point: Sequence[object]) -> Scalar:
        if len(point) != self.n:
            raise InputError(f"point has {len(point)} coordinates, form has {self.n} variables")
        total = ZERO
        for a, p in zip(self.coeffs, point):
            total = total + a * Scalar.of(p)
        return total

    def to_mpoly(self) -> MPoly:
        terms = {}
        for i, c in enumerate(self.coeffs):
            if not c.is_zero():
                exp = [0] * self.n
                exp[i] = 1
                terms[tuple(exp)] = c
        return MPoly._raw(self.n, terms)

    def __str__(self) -> str:
        return str(self.to_mpoly())


# --- Linear spaces ---


@dataclass(frozen=True)
class LinSpace:
    """Space of linear forms stored as its reduced row echelon basis."""

    n: int
    basis: Tuple[Vector, ...]

    @classmethod
    def span(cls, n: int, forms: Iterable[object]) -> "LinSpace":
        rows = [_vec(f) for f in forms]
        for r in rows:
            if len(r) != n:
                raise InputError(f"form of length {len(r)} in a space of {n} variables")
        if not rows:
            return cls(n, ())
        red, _ = linalg.rref(rows, n)
        return cls(n, tuple(tuple(r) for r in red))

    @classmethod
    def zero(cls, n: int) -> "LinSpace":
        return cls(n, ())

    @classmethod
    def full(cls, n: int) -> "LinSpace":
        return cls.span(n, [LinForm.variable(n, i) for i in range(n)])

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> List[int]:
        return [_leading_index(r) for r in self.basis]

    def forms(self) -> List[LinForm]:
        return [LinForm(r) for r in self.basis]

    def reduce(self, v) -> Vector:
        """Remainder of v after eliminating the pivot coordinates."""
        out = list(_vec(v))
        for row, p in zip(self.basis, self.pivots):
            f = out[p]
            if not f.is_zero():
                out = [x - f * y if not y.is_zero() else x for x, y in zip(out, row)]
        return tuple(out)

    def contains(self, v) -> bool:
        return all(c.is_zero() for c in self.reduce(v))

    def is_subspace(self, other: "LinSpace") -> bool:
        return all(other.contains(r) for r in self.basis)

    def __add__(self, other: "LinSpace") -> "LinSpace":
        if other.n != self.n:
            raise InputError(f"variable count mismatch: {self.n} vs {other.n}")
        return LinSpace.span(self.n, list(self.basis) + list(other.basis))

    def intersect(self, other: "LinSpace") -> "LinSpace":
        if other.n != self.n:
            raise InputError(f"variable count mismatch: {self.n} vs {other.n}")
        if self.dim == 0 or other.dim == 0:
            return LinSpace.zero(self.n)
        cols = [other.reduce(r) for r in self.basis]
        kernel = linalg.nullspace(linalg.transpose(cols), self.dim)
        vectors = []
        for a in kernel:
            v = [ZERO] * self.n
            for ai, row in zip(a, self.basis):
                if not ai.is_zero():
                    v = [x + ai * y for x, y in zip(v, row)]
            vectors.append(v)
        return LinSpace.span(self.n, vectors)

    def perp(self) -> "LinSpace":
        """Orthogonal complement under the bilinear pairing of coefficient vectors."""
        if self.dim == 0:
            return LinSpace.full(self.n)
        return LinSpace.span(self.n, linalg.nullspace(self.basis, self.n))

    def is_nondegenerate(self) -> bool:
        return self.dim == 0 or linalg.rank(_pairing_gram(self)) == self.dim

    def __str__(self) -> str:
        return "span{" + ", ".join(str(f) for f in self.forms()) + "}"


def _pairing_gram(V: LinSpace) -> List[List[Scalar]]:
    return [[LinForm(a).dot(LinForm(b)) for b in V.basis] for a in V.basis]


# --- Quadratic forms ---


@dataclass(frozen=True)
class QForm:
    """Q(x) = x^T M x with M symmetric; x_i x_j (i != j) has coefficient 2 M_ij."""

    n: int
    gram: Tuple[Vector, ...]

    def __post_init__(self):
        if len(self.gram) != self.n or any(len(r) != self.n for r in self.gram):
            raise InputError(f"gram matrix is not {self.n}x{self.n}")
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if self.gram[i][j] != self.gram[j][i]:
                    raise InputError(f"gram matrix not symmetric at ({i},{j})")

    @classmethod
    def from_gram(cls, rows: Sequence[Sequence[object]]) -> "QForm":
        return cls(len(rows), tuple(tuple(Scalar.of(x) for x in r) for r in rows))

    @classmethod
    def zero(cls, n: int) -> "QForm":
        return cls(n, tuple((ZERO,) * n for _ in range(n)))

    @classmethod
    def from_product(cls, a, b) -> "QForm":
        a, b = _vec(a), _vec(b)
        if len(a) != len(b):
            raise InputError("factor length mismatch")
        half = Scalar(1) / 2
        return cls.from_gram([[(a[i] * b[j] + a[j] * b[i]) * half for j in range(len(a))]
                              for i in range(len(a))])

    @classmethod
    def square(cls, a) -> "QForm":
        return cls.from_product(a, a)

    # --- algebra ---

    def _check(self, other: "QForm") -> None:
        if other.n != self.n:
            raise InputError(f"variable count mismatch: {self.n} vs {other.n}")

    def __add__(self, other: "QForm") -> "QForm":
        self._check(other)
        return QForm(self.n, tuple(tuple(a + b for a, b in zip(r, s))
                                   for r, s in zip(self.gram, other.gram)))

    def __sub__(self, other: "QForm") -> "QForm":
        self._check(other)
        return QForm(self.n, tuple(tuple(a - b for a, b in zip(r, s))
                                   for r, s in zip(self.gram, other.gram)))

    def __neg__(self) -> "QForm":
        return QForm(self.n, tuple(tuple(-a for a in r) for r in self.gram))

    def scale(self, c) -> "QForm":
        c = Scalar.of(c)
        return QForm(self.n, tuple(tuple(a * c for a in r) for r in self.gram))

    def __mul__(self, c) -> "QForm":
        if isinstance(c, (QForm, LinForm, MPoly)):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(a.is_zero() for r in self.gram for a in r)

    @cached_property
    def gram_rank(self) -> int:
        return linalg.rank(self.gram)

    def vector(self) -> Vector:
        """Monomial coefficients x_i x_j, i <= j, in row-major order."""
        out = []
        for i in range(self.n):
            out.append(self.gram[i][i])
            for j in range(i + 1, self.n):
                out.append(self.gram[i][j] * 2)
        return tuple(out)

    def evaluate(self, point: Sequence[object]) -> Scalar:
        if len(point) != self.n:
            raise InputError(f"point has {len(point)} coordinates, form has {self.n} variables")
        x = [Scalar.of(p) for p in point]
        total = ZERO
        for i in range(self.n):
            if x[i].is_zero():
                continue
            row = ZERO
            for j in range(self.n):
                if not self.gram[i][j].is_zero() and not x[j].is_zero():
                    row = row + self.gram[i][j] * x[j]
            total = total + x[i] * row
        return total

    def to_mpoly(self) -> MPoly:
        terms = {}
        for (i, j), c in qform_to_monomials(self).items():
            exp = [0] * self.n
            exp[i] += 1
            exp[j] += 1
            terms[tuple(exp)] = c
        return MPoly._raw(self.n, terms)

    def congruence(self, s: Sequence[Sequence[object]]) -> "QForm":
        """The form y -> Q(S y) for an n x m matrix S."""
        st = linalg.transpose(s)
        return QForm.from_gram(linalg.matmul(linalg.matmul(st, self.gram), s))

    def principal(self, indices: Sequence[int]) -> "QForm":
        return QForm.from_gram([[self.gram[i][j] for j in indices] for i in indices])

    def __str__(self) -> str:
        return str(self.to_mpoly())


def qform_from_monomials(n: int, monomials: Dict[Tuple[int, int], object]) -> QForm:
    """Build a form from {(i, j): coefficient of x_i x_j}."""
    gram = [[ZERO] * n for _ in range(n)]
    for (i, j), c in monomials.items():
        if not (0 <= i < n and 0 <= j < n):
            raise InputError(f"monomial index ({i},{j}) out of range for {n} variables")
        c = Scalar.of(c)
        if i == j:
            gram[i][i] = gram[i][i] + c
        else:
            half = c / 2
            gram[i][j] = gram[i][j] + half
            gram[j][i] = gram[j][i] + half
    return QForm(n, tuple(tuple(r) for r in gram))


def qform_to_monomials(q: QForm) -> Dict[Tuple[int, int], Scalar]:
    out = {}
    for i in range(q.n):
        if not q.gram[i][i].is_zero():
            out[(i, i)] = q.gram[i][i]
        for j in range(i + 1, q.n):
            if not q.gram[i][j].is_zero():
                out[(i, j)] = q.gram[i][j] * 2
    return out


def rank_s(q: QForm) -> int:
    return (q.gram_rank + 1) // 2


def minimal_space(q: QForm) -> LinSpace:
    return LinSpace.span(q.n, q.gram)


def minimal_space_of(forms: Iterable[QForm], n: int) -> LinSpace:
    rows = []
    for q in forms:
        rows.extend(minimal_space(q).basis)
    return LinSpace.span(n, rows)


# --- Factorization ---


@dataclass(frozen=True)
class FactorWitness:
    """Q = scale * f1 * f2; factor entries may live in Q(i)(sqrt(disc))."""

    kind: str                                   # square | product | irreducible
    factors: Tuple[Tuple[FieldElement, ...], ...] = ()
    disc: Scalar = ONE                          # ONE when the factors are over Q(i)
    scale: Scalar = ONE

    @property
    def rational(self) -> bool:
        return all(isinstance(c, Scalar) for f in self.factors for c in f)

    def linear_factors(self) -> List[LinForm]:
        if not self.rational:
            raise InputError(f"factors need the extension sqrt({self.disc})")
        return [LinForm(tuple(f)) for f in self.factors]

    def expand(self) -> QForm:
        if self.kind == "irreducible":
            raise InputError("irreducible witness has no factors")
        f, g = self.factors
        n = len(f)
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                v = (f[i] * g[j] + f[j] * g[i]) * self.scale / 2
                if isinstance(v, ExtScalar):
                    raise InputError("witness does not expand to a Q(i) form")
                row.append(v)
            rows.append(row)
        return QForm.from_gram(rows)


def factor(q: QForm) -> FactorWitness:
    rho = q.gram_rank
    if rho == 0:
        raise InputError("cannot factor the zero form")
    if rho >= 3:
        return FactorWitness("irreducible")
    m = q.gram
    if rho == 1:
        p = next(i for i in range(q.n) if not m[i][i].is_zero())
        ell = tuple(c / m[p][p] for c in m[p])
        return FactorWitness("square", (ell, ell), ONE, m[p][p])

    ms = minimal_space(q)
    u, v = ms.basis
    p, r = ms.pivots
    a, b, c = m[p][p], m[p][r], m[r][r]
    if a.is_zero():
        # Q = v * (2b u + c v)
        second = tuple(x + (c / (2 * b)) * y for x, y in zip(u, v))
        return FactorWitness("product", (second, tuple(v)), ONE, 2 * b)
    delta = b * b - a * c
    root = sqrt_of(delta)
    t_plus = (root - b) / a
    t_minus = (-root - b) / a
    f1 = tuple(x - t_plus * y for x, y in zip(u, v))
    f2 = tuple(x - t_minus * y for x, y in zip(u, v))
    disc = ONE if is_square(delta) is not None else delta
    return FactorWitness("product", (f1, f2), disc, a)


# --- Restriction and reduction ---


def pivot_substitution(V: LinSpace) -> List[List[Scalar]]:
    """n x n matrix S with x = S y solving every basis form of V for its pivot."""
    n = V.n
    pivots = V.pivots
    pivot_set = set(pivots)
    s = [[ZERO] * n for _ in range(n)]
    for j in range(n):
        if j not in pivot_set:
            s[j][j] = ONE
    for row, p in zip(V.basis, pivots):
        for j in range(n):
            if j not in pivot_set and not row[j].is_zero():
                s[p][j] = -row[j]
    return s


def restrict_to_zero(q: QForm, V: LinSpace) -> QForm:
    if V.n != q.n:
        raise InputError(f"variable count mismatch: {q.n} vs {V.n}")
    if V.dim == 0:
        return q
    return q.congruence(pivot_substitution(V))


def reduce_mod_linspace(p: Union[QForm, MPoly], V: LinSpace) -> Union[QForm, MPoly]:
    if isinstance(p, QForm):
        return restrict_to_zero(p, V)
    if V.n != p.n:
        raise InputError(f"variable count mismatch: {p.n} vs {V.n}")
    if V.dim == 0:
        return p
    s = pivot_substitution(V)
    images = [LinForm(tuple(row)).to_mpoly() for row in s]
    return p.substitute(images)


# --- Projection maps ---


@dataclass(frozen=True)
class Projection:
    """Sends the basis of V to alpha_i * z and fixes the orthogonal complement.

    Images live in n + 1 variables; z is the last one.
    """

    space: LinSpace
    alpha: Tuple[Scalar, ...]
    images: Tuple[LinForm, ...]

    @property
    def n(self) -> int:
        return self.space.n

    def apply_linform(self, a: LinForm) -> LinForm:
        if a.n != self.n:
            raise InputError(f"variable count mismatch: {a.n} vs {self.n}")
        out = LinForm.zero(self.n + 1)
        for c, img in zip(a.coeffs, self.images):
            if not c.is_zero():
                out = out + img.scale(c)
        return out

    def apply_qform(self, q: QForm) -> QForm:
        if q.n != self.n:
            raise InputError(f"variable count mismatch: {q.n} vs {self.n}")
        s = linalg.transpose([img.coeffs for img in self.images])   # (n+1) x n
        return QForm.from_gram(linalg.matmul(linalg.matmul(s, q.gram), linalg.transpose(s)))

    def apply_mpoly(self, p: MPoly) -> MPoly:
        if p.n != self.n:
            raise InputError(f"variable count mismatch: {p.n} vs {self.n}")
        return p.substitute([img.to_mpoly() for img in self.images])

    def apply(self, obj):
        if isinstance(obj, LinForm):
            return self.apply_linform(obj)
        if isinstance(obj, QForm):
            return self.apply_qform(obj)
        if isinstance(obj, MPoly):
            return self.apply_mpoly(obj)
        raise InputError(f"cannot project {type(obj).__name__}")


def _projection_coordinates(V: LinSpace) -> List[List[Scalar]]:
    """Column k holds the coordinates of proj_V(e_k) in the basis of V."""
    if not V.is_nondegenerate():
        raise InputError(f"{V} meets its orthogonal complement; no projection exists")
    g_inv = linalg.inverse(_pairing_gram(V))
    return linalg.matmul(g_inv, V.basis)        # dim x n


def projection_map(V: LinSpace, alpha: Sequence[object]) -> Projection:
    alpha = tuple(Scalar.of(a) for a in alpha)
    if len(alpha) != V.dim:
        raise InputError(f"need {V.dim} alpha values, got {len(alpha)}")
    n = V.n
    if V.dim == 0:
        images = tuple(LinForm(LinForm.variable(n, k).coeffs + (ZERO,)) for k in range(n))
        return Projection(V, alpha, images)
    coords = _projection_coordinates(V)
    images = []
    for k in range(n):
        v = [ONE if j == k else ZERO for j in range(n)]
        z = ZERO
        for i, row in enumerate(V.basis):
            c = coords[i][k]
            if c.is_zero():
                continue
            v = [x - c * y for x, y in zip(v, row)]
            z = z + c * alpha[i]
        images.append(LinForm(tuple(v) + (z,)))
    return Projection(V, alpha, tuple(images))


def perp_project(a: LinForm, V: LinSpace) -> LinForm:
    if a.n != V.n:
        raise InputError(f"variable count mismatch: {a.n} vs {V.n}")
    if V.dim == 0:
        return a
    coords = _projection_coordinates(V)
    out = list(a.coeffs)
    for i, row in enumerate(V.basis):
        c = ZERO
        for k, ak in enumerate(a.coeffs):
            if not ak.is_zero():
                c = c + coords[i][k] * ak
        if not c.is_zero():
            out = [x - c * y for x, y in zip(out, row)]
    return LinForm(tuple(out))


def sample_projection(V: LinSpace, rng: np.random.Generator,
                      accept: Optional[Callable[[Projection], bool]] = None,
                      label: str = "projection") -> Projection:
    """Draw alpha uniformly from the bounded-denominator grid, re-drawing rejected maps."""
    settings = get_settings()
    for attempt in range(settings.resample_limit):
        alpha = [Scalar(random_unit_rational(rng, settings.denominator_bound)) for _ in range(V.dim)]
        proj = projection_map(V, alpha)
        if accept is None or accept(proj):
            return proj
        log_event("resample", {"what": label, "attempt": attempt,
                               "alpha": [str(a) for a in alpha]})
    raise ResampleExhausted(f"no acceptable alpha for {label} after {settings.resample_limit} draws")


def projection_dimension_report(forms: Sequence[QForm], V: LinSpace,
                                alphas: Sequence[Sequence[object]]) -> BoundReport:
    """dim MS(forms) <= (sigma + 1) * dim V when dim V independent alphas give sigma."""
    delta = V.dim
    if len(alphas) != delta:
        raise InputError(f"need {delta} alpha vectors, got {len(alphas)}")
    if delta and linalg.rank([_vec(a) for a in alphas]) != delta:
        raise InputError("alpha vectors are not linearly independent")
    sigma = 0
    for alpha in alphas:
        proj = projection_map(V, alpha)
        sigma = max(sigma, minimal_space_of([proj.apply_qform(q) for q in forms], V.n + 1).dim)
    measured = minimal_space_of(forms, V.n).dim
    bound = (sigma + 1) * delta
    return BoundReport("projection-dimension", measured, bound, measured <= bound,
                       {"sigma": sigma, "dim_V": delta})


# --- Common factors and factor matching ---


def _is_pure_power_of(ell: Sequence[object], var: Optional[int]) -> bool:
    if var is None:
        return False
    return all(c == 0 for i, c in enumerate(ell) if i != var)


def common_factor(f: QForm, g: QForm, ignore: Optional[int] = None) -> Optional[Union[LinForm, QForm]]:
    """A non-constant common factor of f and g over C, or None.

    Factors that are polynomials in variable `ignore` alone do not count.
    """
    f._check(g)
    if f.is_zero() or g.is_zero():
        raise InputError("common_factor needs nonzero forms")
    if linalg.rank([f.vector(), g.vector()]) == 1:
        if ignore is not None and minimal_space(f).dim == 1 and _is_pure_power_of(minimal_space(f).basis[0], ignore):
            return None
        return f
    if f.gram_rank > 2 or g.gram_rank > 2:
        return None
    wf, wg = factor(f), factor(g)
    # an irrational factor shared with g forces its conjugate too, hence proportionality
    if not (wf.rational and wg.rational):
        return None
    for a in wf.linear_factors():
        if _is_pure_power_of(a.coeffs, ignore):
            continue
        for b in wg.linear_factors():
            if a.is_proportional(b):
                return a.normalized()
    return None


def match_factors_mod(ps: Sequence[QForm], qs: Sequence[QForm], V: LinSpace) -> Optional[List[int]]:
    """Permutation pi with ps[k] proportional to qs[pi[k]] modulo <V>, or None."""
    if len(ps) != len(qs):
        return None
    rp = [restrict_to_zero(p, V).vector() for p in ps]
    rq = [restrict_to_zero(q, V).vector() for q in qs]
    if any(all(c.is_zero() for c in v) for v in rp + rq):
        return None
    compatible = [[j for j in range(len(qs)) if linalg.rank([rp[k], rq[j]]) == 1]
                  for k in range(len(ps))]
    used: List[bool] = [False] * len(qs)
    perm: List[int] = []

    def assign(k: int) -> bool:
        if k == len(ps):
            return True
        for j in compatible[k]:
            if not used[j]:
                used[j] = True
                perm.append(j)
                if assign(k + 1):
                    return True
                used[j] = False
                perm.pop()
        return False

    return list(perm) if assign(0) else None


# --- Low-rank loci ---


def min_rank_modulo(q: QForm, U: LinSpace) -> int:
    """min over T in C[U]_2 of the Gram rank of q - T."""
    if U.dim == 0:
        return q.gram_rank
    outside = (minimal_space(q) + U).dim - U.dim
    return 2 * outside - restrict_to_zero(q, U).gram_rank


def _complement_part(space: LinSpace, U: LinSpace) -> LinSpace:
    return LinSpace.span(space.n, [U.reduce(r) for r in space.basis])


def adapted_gram(q: QForm, U: LinSpace) -> List[List[Scalar]]:
    """Gram matrix of q in coordinates y = C x whose first dim U entries are U's basis."""
    n = q.n
    pivots = set(U.pivots)
    change = [list(r) for r in U.basis] + [[ONE if j == k else ZERO for j in range(n)]
                                            for k in range(n) if k not in pivots]
    inv = linalg.inverse(change)
    return linalg.matmul(linalg.matmul(linalg.transpose(inv), q.gram), inv)


def minimal_rank_completion(q: QForm, U: LinSpace) -> QForm:
    """T in C[U]_2 with gram_rank(q - T) == min_rank_modulo(q, U)."""
    if U.n != q.n:
        raise InputError(f"variable count mismatch: {q.n} vs {U.n}")
    if U.dim == 0:
        return QForm.zero(q.n)
    u = U.dim
    g = adapted_gram(q, U)
    cross = [row[u:] for row in g[:u]]
    rest = [row[u:] for row in g[u:]]
    _, keep = linalg.rref(rest, len(rest))
    if keep:
        # the principal block of rest on its pivot columns is invertible
        core_inv = linalg.inverse([[rest[i][j] for j in keep] for i in keep])
        b_k = [[row[j] for j in keep] for row in cross]
        fixed = linalg.matmul(linalg.matmul(b_k, core_inv), linalg.transpose(b_k))
    else:
        fixed = [[ZERO] * u for _ in range(u)]
    block = [[g[i][j] - fixed[i][j] for j in range(u)] for i in range(u)]
    basis = [list(r) for r in U.basis]
    return QForm.from_gram(linalg.matmul(linalg.matmul(linalg.transpose(basis), block), basis))


def _generic_min_rank(q: QForm, q2: QForm, U: LinSpace) -> int:
    """min_rank_modulo of a generic member of the pencil."""
    outside, inside = 0, 0
    for t in range(q.n + 2):
        comb = q + q2.scale(t)
        outside = max(outside, (minimal_space(comb) + U).dim - U.dim)
        inside = max(inside, restrict_to_zero(comb, U).gram_rank)
    return 2 * outside - inside


def low_rank_locus_space(q: QForm, q2: QForm, r: int, U: Optional[LinSpace] = None) -> LinSpace:
    """A space V, dim V <= 8r, with MS(aQ + bQ' + P) in V + U whenever rank_s <= r."""
    from qsg.pencil import low_rank_pencil, rank_drop_points

    if r < 1:
        raise InputError("r must be at least 1")
    q._check(q2)
    n = q.n
    U = U or LinSpace.zero(n)
    everything = _complement_part(minimal_space(q) + minimal_space(q2), U)

    if min_rank_modulo(q, U) <= 4 * r and min_rank_modulo(q2, U) <= 4 * r:
        return everything

    low: List[QForm] = []
    if U.dim == 0:
        report = low_rank_pencil(q, q2, r)
        if report.identically_low:
            return everything
        for alpha, beta in report.rational_roots:
            low.append(q.scale(alpha) + q2.scale(beta))
    else:
        if _generic_min_rank(q, q2, U) <= 2 * r:
            return everything
        u = U.dim
        g1, g2 = adapted_gram(q, U), adapted_gram(q2, U)
        candidates = []
        for a_rows, b_rows in ((g1[u:], g2[u:]),
                               ([row[u:] for row in g1[u:]], [row[u:] for row in g2[u:]])):
            for root in rank_drop_points(a_rows, b_rows).rational_roots:
                if root not in candidates:
                    candidates.append(root)
        for alpha, beta in candidates:
            comb = q.scale(alpha) + q2.scale(beta)
            if min_rank_modulo(comb, U) <= 2 * r:
                low.append(comb)

    logger.debug("low-rank locus: %d rational low combinations", len(low))
    rows = []
    for comb in low:
        rows.extend(_complement_part(minimal_space(comb), U).basis)
    result = LinSpace.span(n, rows)
    if result.dim > 8 * r:
        logger.warning("low-rank locus of dimension %d exceeds 8r = %d", result.dim, 8 * r)
    return result
