# ideals.py

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import sympy

from qsg.config import DEFAULT_WITNESS_MAX, get_settings
from qsg.data_model import SolveResult
from qsg.errors import BudgetExceeded, InputError, PreconditionError, QsgError
from qsg.event_logger import log_event
from qsg.field import ONE, ZERO, Scalar
from qsg.mpoly import Monomial, MPoly, mono_coprime, mono_div, mono_divides, mono_lcm, order_key, product
from qsg.qform import LinSpace, QForm, adapted_gram, minimal_space_of

logger = logging.getLogger(__name__)


@dataclass
class GroebnerBasis:
    order: str
    gens: List[MPoly]                                 # reduced, monic, ascending leading monomials
    source: List[MPoly]
    cofactors: Optional[List[List[MPoly]]] = None     # gens[k] == sum_j cofactors[k][j] * source[j]

    @property
    def n(self) -> int:
        return self.source[0].n

    def is_unit(self) -> bool:
        return len(self.gens) == 1 and self.gens[0].is_constant()


# --- Division ---


def _divide(f: MPoly, basis: Sequence[MPoly], order: str,
            track: bool = False) -> Tuple[MPoly, Optional[List[MPoly]]]:
    """Multivariate division: f = sum q_k basis[k] + remainder."""
    leads = [b.leading(order) for b in basis]
    p = f
    rem: Dict[Monomial, Scalar] = {}
    quotients: Optional[List[Dict[Monomial, Scalar]]] = [dict() for _ in basis] if track else None
    while not p.is_zero():
        m, c = p.leading(order)
        for k, (lm, lc) in enumerate(leads):
            if mono_divides(lm, m):
                shift = mono_div(m, lm)
                coef = c / lc
                p = p - basis[k].mul_term(shift, coef)
                if quotients is not None:
                    q = quotients[k]
                    q[shift] = q[shift] + coef if shift in q else coef
                break
        else:
            rem[m] = c
            p = MPoly._raw(p.n, {e: v for e, v in p.terms.items() if e != m})
    remainder = MPoly._raw(f.n, rem)
    if quotients is None:
        return remainder, None
    return remainder, [MPoly(f.n, q) for q in quotients]


def _combine(cofs: Sequence[List[MPoly]], weights: Sequence[MPoly], size: int, n: int) -> List[MPoly]:
    out = [MPoly.zero(n) for _ in range(size)]
    for w, cof in zip(weights, cofs):
        if w.is_zero():
            continue
        out = [o + w * c for o, c in zip(out, cof)]
    return out


# --- Buchberger ---


def buchberger(gens: Sequence[MPoly], order: str = "grevlex", track: bool = False) -> GroebnerBasis:
    """Reduced Groebner basis, normal selection with the Gebauer-Moeller criteria.

    Each new element is divided by its leading coefficient, which is content removal over Q(i).
    """
    if not gens:
        raise InputError("buchberger needs at least one generator")
    n = gens[0].n
    for g in gens:
        if g.n != n:
            raise InputError(f"variable count mismatch: {n} vs {g.n}")
    key = order_key(order)
    size = len(gens)

    polys: List[MPoly] = []
    cofs: List[List[MPoly]] = []
    lms: List[Monomial] = []
    basis: List[int] = []
    pairs: List[Tuple[int, int]] = []

    def update(h: int) -> None:
        nonlocal basis, pairs
        lh = lms[h]
        pending = [(g, mono_lcm(lms[g], lh)) for g in basis]
        kept: List[Tuple[int, Monomial]] = []
        while pending:
            g, lg = pending.pop(0)
            if mono_coprime(lms[g], lh) or not any(mono_divides(l2, lg) for _, l2 in pending + kept):
                kept.append((g, lg))
        new_pairs = [(g, h) for g, _ in kept if not mono_coprime(lms[g], lh)]
        survivors = []
        for i, j in pairs:
            lij = mono_lcm(lms[i], lms[j])
            if (mono_divides(lh, lij) and mono_lcm(lms[i], lh) != lij
                    and mono_lcm(lms[j], lh) != lij):
                continue
            survivors.append((i, j))
        pairs = survivors + new_pairs
        basis = [g for g in basis if not mono_divides(lh, lms[g])] + [h]

    def reduce_and_add(p: MPoly, cof: Optional[List[MPoly]]) -> None:
        r, qs = _divide(p, [polys[k] for k in basis], order, track)
        if r.is_zero():
            return
        if track:
            cof = [c - w for c, w in zip(cof, _combine([cofs[k] for k in basis], qs, size, n))]
        inv = r.leading(order)[1].inverse()
        r = r.scale(inv)
        polys.append(r)
        cofs.append([c.scale(inv) for c in cof] if track else [])
        lms.append(r.leading(order)[0])
        update(len(polys) - 1)

    for j, g in enumerate(gens):
        if g.is_zero():
            continue
        unit = [MPoly.constant(n, ONE) if k == j else MPoly.zero(n) for k in range(size)] if track else None
        reduce_and_add(g, unit)

    while pairs:
        idx = min(range(len(pairs)), key=lambda t: key(mono_lcm(lms[pairs[t][0]], lms[pairs[t][1]])))
        i, j = pairs.pop(idx)
        lij = mono_lcm(lms[i], lms[j])
        si, sj = mono_div(lij, lms[i]), mono_div(lij, lms[j])
        s = polys[i].mul_term(si, ONE) - polys[j].mul_term(sj, ONE)
        cof = None
        if track:
            cof = [a.mul_term(si, ONE) - b.mul_term(sj, ONE) for a, b in zip(cofs[i], cofs[j])]
        reduce_and_add(s, cof)

    # inter-reduce the minimal basis
    reduced: List[Tuple[MPoly, Optional[List[MPoly]]]] = []
    for k in basis:
        others = [m for m in basis if m != k]
        r, qs = _divide(polys[k], [polys[m] for m in others], order, track)
        cof = None
        if track:
            cof = [c - w for c, w in zip(cofs[k], _combine([cofs[m] for m in others], qs, size, n))]
        reduced.append((r, cof))
    reduced.sort(key=lambda rc: key(rc[0].leading(order)[0]))
    logger.debug("groebner basis (%s): %d generators in, %d out", order, size, len(reduced))
    return GroebnerBasis(order, [r for r, _ in reduced], list(gens),
                         [c for _, c in reduced] if track else None)


# --- Membership ---


def normal_form(f: MPoly, G: GroebnerBasis) -> MPoly:
    if f.n != G.n:
        raise InputError(f"variable count mismatch: {f.n} vs {G.n}")
    return _divide(f, G.gens, G.order)[0]


def ideal_member(f: MPoly, G: GroebnerBasis) -> bool:
    return normal_form(f, G).is_zero()


def membership_certificate(f: MPoly, gens: Sequence[MPoly], order: str = "grevlex") -> Optional[List[MPoly]]:
    """Cofactors h with f == sum h_j * gens[j], or None when f is not in the ideal."""
    G = buchberger(gens, order, track=True)
    r, qs = _divide(f, G.gens, order, track=True)
    if not r.is_zero():
        return None
    h = _combine(G.cofactors, qs, len(gens), f.n)
    total = MPoly.zero(f.n)
    for hj, g in zip(h, gens):
        total = total + hj * g
    if total != f:
        raise QsgError("membership certificate failed to re-verify")
    return h


def _check_budget(degree: int) -> None:
    budget = get_settings().budget_degree
    if degree > budget:
        raise BudgetExceeded(f"total degree {degree} exceeds the budget {budget}")


def radical_member(f: MPoly, gens: Sequence[MPoly], order: str = "grevlex") -> bool:
    """f in sqrt<gens>, decided as 1 in <gens, 1 - t f> with one trailing variable t."""
    if not gens:
        raise InputError("radical_member needs at least one generator")
    for g in gens:
        if g.n != f.n:
            raise InputError(f"variable count mismatch: {f.n} vs {g.n}")
    if f.is_zero():
        return True
    _check_budget(f.total_degree())
    G = buchberger(gens, order)
    if G.is_unit() or ideal_member(f, G):
        return True
    t = MPoly.variable(f.n + 1, f.n)
    extended = [g.extend(1) for g in gens] + [1 - t * f.extend(1)]
    return buchberger(extended, order).is_unit()


def product_radical_member(factors: Sequence[QForm], A: QForm, B: QForm) -> bool:
    if not factors:
        raise InputError("product_radical_member needs at least one factor")
    _check_budget(2 * len(factors))
    prod = product([q.to_mpoly() for q in factors])
    return radical_member(prod, [A.to_mpoly(), B.to_mpoly()])


def witness_subset(factors: Sequence[QForm], A: QForm, B: QForm,
                   max_size: int = DEFAULT_WITNESS_MAX) -> Optional[List[int]]:
    """Smallest K, |K| <= max_size, with prod_{k in K} factors[k] in sqrt<A, B>."""
    gens = [A.to_mpoly(), B.to_mpoly()]
    polys = [q.to_mpoly() for q in factors]
    for size in range(1, min(max_size, len(polys)) + 1):
        for subset in combinations(range(len(polys)), size):
            if radical_member(product([polys[k] for k in subset]), gens):
                return list(subset)
    if not product_radical_member(factors, A, B):
        raise PreconditionError("product of the factors is not in the radical of <A, B>")
    log_event("theorem_interest", {"what": "witness_subset", "max_size": max_size,
                                   "factors": len(factors)})
    return None


# --- Univariate factoring over Q(i) ---

_T = sympy.Symbol("t")
_QQ_I = sympy.QQ.algebraic_field(sympy.I)


def to_sympy_poly(coeffs: Sequence[Scalar]) -> sympy.Poly:
    """Univariate polynomial in t from descending coefficients."""
    expr = sympy.Integer(0)
    for k, c in enumerate(reversed(list(coeffs))):
        if not c.is_zero():
            expr += c.to_sympy() * _T ** k
    return sympy.Poly(expr, _T, domain=_QQ_I)


def from_sympy_poly(poly: sympy.Poly) -> List[Scalar]:
    return [Scalar.from_sympy(c) for c in poly.all_coeffs()]


def univariate_factors(coeffs: Sequence[Scalar]) -> Tuple[List[Scalar], List[List[Scalar]]]:
    """Rational roots and the irreducible factors of degree >= 2, over Q(i)."""
    poly = to_sympy_poly(coeffs)
    if poly.degree() <= 0:
        return [], []
    _, factors = poly.factor_list()
    roots: List[Scalar] = []
    others: List[List[Scalar]] = []
    for fac, _mult in factors:
        cs = from_sympy_poly(fac)
        if len(cs) == 2:
            roots.append(-cs[1] / cs[0])
        elif len(cs) > 2:
            others.append([c / cs[0] for c in cs])
    roots.sort(key=Scalar.sort_key)
    return roots, others


def _univariate_coeffs(p: MPoly, var: int) -> List[Scalar]:
    deg = p.total_degree()
    coeffs = [ZERO] * (deg + 1)
    for exp, c in p.terms.items():
        coeffs[deg - exp[var]] = c
    return coeffs


# --- Rational points ---

FREE_VALUES = (0, 1, -1, 2, -2)


def _solve_last(eqs: List[MPoly], idx: int, n: int, assignment: Dict[int, Scalar]) -> Optional[List[Scalar]]:
    eqs = [e for e in eqs if not e.is_zero()]
    if any(e.is_constant() for e in eqs):
        return None
    if not eqs or idx < 0:
        return [assignment.get(i, ZERO) for i in range(n)]
    G = buchberger(eqs, "lex")
    if G.is_unit():
        return None
    if not any(idx in g.variables() for g in G.gens):
        values = [ZERO]
    else:
        eliminant = [g for g in G.gens if set(g.variables()) <= {idx}]
        if eliminant:
            values, _ = univariate_factors(_univariate_coeffs(eliminant[0], idx))
        else:
            values = [Scalar(v) for v in FREE_VALUES]
    for v in values:
        found = _solve_last([g.specialize(idx, v) for g in G.gens], idx - 1, n, {**assignment, idx: v})
        if found is not None:
            return found
    return None


def rational_points(equations: Sequence[MPoly]) -> SolveResult:
    """Decide solvability over C and look for a Q(i)-rational common zero.

    Coordinates are fixed from the last variable backwards through lex
    eliminants; coordinates without an eliminant are tried at small integers.
    """
    if not equations:
        raise InputError("rational_points needs at least one equation")
    n = equations[0].n
    eqs = [e for e in equations if not e.is_zero()]
    if not eqs:
        return SolveResult(True, [ZERO] * n)
    if buchberger(eqs, "lex").is_unit():
        return SolveResult(False)
    point = _solve_last(eqs, n - 1, n, {})
    if point is not None and any(not e.evaluate(point).is_zero() for e in eqs):
        raise QsgError("rational point failed to re-verify")
    return SolveResult(True, point)


# --- Codimension-two search ---


@dataclass
class SchubertCell:
    """2-spaces span{e_p + sum a_j e_j, e_q + sum b_j e_j} inside the first k of m coordinates."""

    m: int
    p: int
    q: int
    k: Optional[int] = None

    @property
    def span(self) -> int:
        return self.m if self.k is None else self.k

    @property
    def a_indices(self) -> List[int]:
        return [j for j in range(self.p + 1, self.span) if j != self.q]

    @property
    def b_indices(self) -> List[int]:
        return list(range(self.q + 1, self.span))

    @property
    def nparams(self) -> int:
        return len(self.a_indices) + len(self.b_indices)

    def vectors(self, point: Sequence[Scalar]) -> Tuple[List[Scalar], List[Scalar]]:
        w1 = [ZERO] * self.m
        w2 = [ZERO] * self.m
        w1[self.p] = ONE
        w2[self.q] = ONE
        k = 0
        for j in self.a_indices:
            w1[j] = point[k]
            k += 1
        for j in self.b_indices:
            w2[j] = point[k]
            k += 1
        return w1, w2

    def equations(self, grams: Sequence[Sequence[Sequence[Scalar]]]) -> List[MPoly]:
        """Coefficient conditions for every form to vanish on {w1 = w2 = 0}."""
        P = self.nparams
        N = P + self.m
        a_param = {j: k for k, j in enumerate(self.a_indices)}
        b_param = {j: len(a_param) + k for k, j in enumerate(self.b_indices)}
        images = []
        for j in range(self.m):
            if j == self.p:
                img = MPoly.zero(N)
                for i, k in a_param.items():
                    img = img - MPoly.variable(N, k) * MPoly.variable(N, P + i)
            elif j == self.q:
                img = MPoly.zero(N)
                for i, k in b_param.items():
                    img = img - MPoly.variable(N, k) * MPoly.variable(N, P + i)
            else:
                img = MPoly.variable(N, P + j)
            images.append(img)
        eqs: List[MPoly] = []
        for g in grams:
            restricted = QForm.from_gram(g).to_mpoly().substitute(images)
            for coeff in restricted.coefficients_in(range(P)).values():
                eqs.append(MPoly._raw(P, {e[:P]: c for e, c in coeff.terms.items()}))
        return eqs


def schubert_cells(m: int, k: Optional[int] = None) -> Iterator[SchubertCell]:
    span = m if k is None else k
    for p in range(span):
        for q in range(p + 1, span):
            yield SchubertCell(m, p, q, k)


def coordinate_grams(forms: Sequence[QForm], S: LinSpace) -> List[List[List[Scalar]]]:
    """Gram matrices of forms with MS inside S, in the coordinates given by S's basis."""
    m = S.dim
    return [[row[:m] for row in adapted_gram(q, S)[:m]] for q in forms]


def codim2_oracle(forms: Sequence[QForm]) -> bool:
    """Brute force: is there a 2-space W over C with every form in <W>?"""
    if not forms:
        raise InputError("codim2_oracle needs at least one form")
    n = forms[0].n
    if n < 2:
        return False
    nonzero = [q for q in forms if not q.is_zero()]
    S = minimal_space_of(nonzero, n)
    if S.dim <= 2:
        return True
    grams = coordinate_grams(nonzero, S)
    for cell in schubert_cells(S.dim):
        eqs = [e for e in cell.equations(grams) if not e.is_zero()]
        if not eqs or not buchberger(eqs, "grevlex").is_unit():
            logger.debug("codim2 oracle: consistent cell (%d, %d)", cell.p, cell.q)
            return True
    return False
