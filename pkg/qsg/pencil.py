# pencil.py

from __future__ import annotations

import logging
from itertools import combinations
from typing import List, Optional, Sequence, Tuple, Union

import sympy

from qsg import linalg
from qsg.data_model import (CaseSet, CompanionResult, ExtensionCertificate, PencilReport,
                            ReducibleCombination, SolveResult)
from qsg.errors import InputError, PreconditionError
from qsg.field import ONE, ZERO, Scalar
from qsg.ideals import (codim2_oracle, from_sympy_poly, rational_points, schubert_cells,
                        univariate_factors)
from qsg.qform import (LinForm, LinSpace, QForm, adapted_gram, factor, minimal_space,
                       restrict_to_zero)

logger = logging.getLogger(__name__)

_t = sympy.Symbol("t")
_QQ_I = sympy.QQ.algebraic_field(sympy.I)

Codim2Result = Optional[Union[LinSpace, ExtensionCertificate]]


# --- Span membership ---


def span_contains(Q: QForm, A: QForm, B: QForm) -> Optional[Tuple[Scalar, Scalar]]:
    """(alpha, beta) with Q == alpha A + beta B, or None."""
    if A.is_zero() and B.is_zero():
        raise InputError("span_contains needs A or B nonzero")
    Q._check(A)
    Q._check(B)
    system = linalg.transpose([A.vector(), B.vector()])
    sol = linalg.solve(system, list(Q.vector()))
    if sol is None:
        return None
    return sol[0], sol[1]


# --- Pencil minors ---


def _pencil_rank(a_rows, b_rows, alpha, beta) -> int:
    return linalg.rank([[x * alpha + y * beta for x, y in zip(ra, rb)]
                        for ra, rb in zip(a_rows, b_rows)])


def _minor_gcd(a_rows, b_rows, size: int, symmetric: bool) -> Tuple[Optional[sympy.Poly], int]:
    """gcd in t of the size x size minors of t*A + B, and the multiplicity of (1:0).

    Returns (None, size) when every minor vanishes.
    """
    nrows, ncols = len(a_rows), len(a_rows[0])
    pencil = sympy.Matrix(nrows, ncols,
                          lambda i, j: _t * a_rows[i][j].to_sympy() + b_rows[i][j].to_sympy())
    g: Optional[sympy.Poly] = None
    at_infinity = size
    seen = 0
    for rows in combinations(range(nrows), size):
        for cols in combinations(range(ncols), size):
            if symmetric and cols < rows:
                continue
            minor = sympy.Poly(pencil.extract(list(rows), list(cols)).det(method="berkowitz"),
                               _t, domain=_QQ_I)
            seen += 1
            if minor.is_zero:
                continue
            at_infinity = min(at_infinity, size - minor.degree())
            g = minor if g is None else g.gcd(minor)
            if g.degree() == 0 and at_infinity == 0:
                logger.debug("pencil minors coprime after %d minors", seen)
                return g, 0
    return g, at_infinity


def _normalized_root(alpha: Scalar, beta: Scalar) -> Tuple[Scalar, Scalar]:
    if alpha.is_zero():
        return ZERO, ONE
    return ONE, beta / alpha


def _report(g: sympy.Poly, at_infinity: int, threshold: int) -> PencilReport:
    coeffs = from_sympy_poly(g)
    lead = coeffs[0]
    coeffs = [c / lead for c in coeffs]
    roots, others = univariate_factors(coeffs)
    rational = [_normalized_root(t0, ONE) for t0 in roots]
    if at_infinity > 0:
        rational.append((ONE, ZERO))
    rational.sort(key=lambda ab: (ab[0].sort_key(), ab[1].sort_key()))
    return PencilReport(
        threshold_rank=threshold,
        minor_gcd=[ZERO] * at_infinity + coeffs,
        rational_roots=rational,
        irrational_factor_degrees=[len(f) - 1 for f in others],
        irrational_factors=others,
    )


def low_rank_pencil(A: QForm, B: QForm, r: int) -> PencilReport:
    """Points (alpha:beta) where alpha A + beta B has Gram rank <= 2r."""
    if r < 1:
        raise InputError("r must be at least 1")
    A._check(B)
    threshold = 2 * r
    S = minimal_space(A) + minimal_space(B)
    if S.dim <= threshold:
        return PencilReport(threshold, identically_low=True)
    # grams of forms living on S are determined by their principal block on S's pivots
    pivots = S.pivots
    ka, kb = A.principal(pivots).gram, B.principal(pivots).gram
    if all(_pencil_rank(ka, kb, Scalar(t), ONE) <= threshold for t in range(threshold + 2)):
        return PencilReport(threshold, identically_low=True)
    g, at_infinity = _minor_gcd(ka, kb, threshold + 1, symmetric=True)
    return _report(g, at_infinity, threshold)


def rank_drop_points(a_rows: Sequence[Sequence[Scalar]], b_rows: Sequence[Sequence[Scalar]],
                     threshold: Optional[int] = None) -> PencilReport:
    """Points where rank(alpha A + beta B) <= threshold for rectangular A, B.

    threshold defaults to one below the generic rank.
    """
    if len(a_rows) != len(b_rows) or any(len(x) != len(y) for x, y in zip(a_rows, b_rows)):
        raise InputError("pencil matrices differ in shape")
    if not a_rows or not a_rows[0]:
        return PencilReport(0 if threshold is None else threshold, identically_low=True)
    bound = min(len(a_rows), len(a_rows[0]))
    generic = max(_pencil_rank(a_rows, b_rows, Scalar(t), ONE) for t in range(bound + 2))
    if threshold is None:
        threshold = generic - 1
    if generic <= threshold:
        return PencilReport(threshold, identically_low=True)
    if threshold < 0:
        return PencilReport(threshold, minor_gcd=[ONE])
    g, at_infinity = _minor_gcd(a_rows, b_rows, threshold + 1, symmetric=False)
    return _report(g, at_infinity, threshold)


# --- Codimension-two spaces ---


def _vanishes_on(W: LinSpace, forms: Sequence[QForm]) -> bool:
    return all(restrict_to_zero(q, W).is_zero() for q in forms)


def _complete(V: LinSpace) -> LinSpace:
    """Extend V to dimension 2 with the earliest coordinate forms."""
    for j in range(V.n):
        if V.dim >= 2:
            break
        e = LinForm.variable(V.n, j)
        if not V.contains(e):
            V = V + LinSpace.span(V.n, [e])
    return V


def _distinct_factors(q: QForm) -> List[LinForm]:
    out: List[LinForm] = []
    for f in factor(q).linear_factors():
        f = f.normalized()
        if all(not f.is_proportional(g) for g in out):
            out.append(f)
    return out


def _search_from_factors(forms: List[QForm], driver: QForm) -> Codim2Result:
    n = driver.n
    witness = factor(driver)
    if not witness.rational:
        # a rational W holding one conjugate factor holds both
        W = minimal_space(driver)
        if _vanishes_on(W, forms):
            return W
        if codim2_oracle(forms):
            return ExtensionCertificate(
                "common 2-space exists only over an extension containing a factor of a driver form",
                disc=witness.disc, factor_degree=2, data={"driver": str(driver)})
        return None

    certificate: Optional[ExtensionCertificate] = None
    for ell in _distinct_factors(driver):
        L = LinSpace.span(n, [ell])
        residuals = [r for r in (restrict_to_zero(q, L) for q in forms) if not r.is_zero()]
        if not residuals:
            return _complete(L)
        lead = min(residuals, key=lambda r: r.gram_rank)
        if lead.gram_rank > 2:
            continue
        lead_witness = factor(lead)
        if not lead_witness.rational:
            # both conjugate factors must divide every residual
            if certificate is None and all(linalg.rank([r.vector(), lead.vector()]) == 1 for r in residuals):
                certificate = ExtensionCertificate(
                    f"common 2-space contains {ell} and a factor over sqrt({lead_witness.disc})",
                    disc=lead_witness.disc, factor_degree=2, data={"linear_factor": str(ell)})
            continue
        for d in _distinct_factors(lead):
            W = L + LinSpace.span(n, [d])
            if W.dim == 2 and _vanishes_on(W, forms):
                return W
    return certificate


def _search_common_space(forms: List[QForm]) -> Codim2Result:
    """All forms have Gram rank 3 or 4, so W lies in every minimal space."""
    n = forms[0].n
    X = minimal_space(forms[0])
    for q in forms[1:]:
        X = X.intersect(minimal_space(q))
    if X.dim < 2:
        return None
    if X.dim == 2:
        return X if _vanishes_on(X, forms) else None
    grams = [adapted_gram(q, X) for q in forms]
    consistent = False
    for cell in schubert_cells(n, X.dim):
        eqs = cell.equations(grams)
        result = rational_points(eqs) if eqs else SolveResult(True, [ZERO] * cell.nparams)
        if not result.consistent:
            continue
        consistent = True
        if result.point is None:
            continue
        w1, w2 = cell.vectors(result.point)
        forms_w = []
        for w in (w1, w2):
            coeffs = [ZERO] * n
            for j, wj in enumerate(w[:X.dim]):
                if not wj.is_zero():
                    coeffs = [c + wj * x for c, x in zip(coeffs, X.basis[j])]
            forms_w.append(coeffs)
        W = LinSpace.span(n, forms_w)
        if W.dim == 2 and _vanishes_on(W, forms):
            return W
    if consistent:
        return ExtensionCertificate(
            "common 2-space exists only over an extension of Q(i)",
            factor_degree=0, data={"intersection_dim": X.dim})
    return None


def common_codim2_space(forms: Sequence[QForm]) -> Codim2Result:
    """A 2-space W of linear forms with every form in <W>.

    Returns an ExtensionCertificate when such W exists only over an extension.
    """
    if not forms:
        raise InputError("common_codim2_space needs at least one form")
    n = forms[0].n
    for q in forms:
        if q.n != n:
            raise InputError(f"variable count mismatch: {n} vs {q.n}")
    if n < 2:
        return None
    nonzero = [q for q in forms if not q.is_zero()]
    if any(q.gram_rank > 4 for q in nonzero):
        return None
    if not nonzero:
        return _complete(LinSpace.zero(n))
    low = [q for q in nonzero if q.gram_rank <= 2]
    if low:
        return _search_from_factors(nonzero, min(low, key=lambda q: q.gram_rank))
    return _search_common_space(nonzero)


def codim2_common(A: QForm, B: QForm) -> Codim2Result:
    return common_codim2_space([A, B])


# --- Classification ---


def _reducible_combination(A: QForm, B: QForm) -> Optional[ReducibleCombination]:
    # a square always counts as a reducible member of the pencil
    for alpha, beta, q in ((ONE, ZERO, A), (ZERO, ONE, B)):
        if q.gram_rank == 1:
            return ReducibleCombination(alpha, beta, factor(q))
    report = low_rank_pencil(A, B, 1)
    if report.identically_low:
        return ReducibleCombination(ONE, ZERO, factor(A))
    if report.rational_roots:
        alpha, beta = report.rational_roots[0]
        comb = A.scale(alpha) + B.scale(beta)
        return ReducibleCombination(alpha, beta, factor(comb))
    if report.irrational_factors:
        return ReducibleCombination(None, None, None, report.irrational_factors[0])
    return None


def classify_pair(A: QForm, B: QForm, third: Sequence[QForm]) -> CaseSet:
    """Every case of the structure theorem that holds for the pair (A, B)."""
    A._check(B)
    if A.is_zero() or B.is_zero() or linalg.rank([A.vector(), B.vector()]) < 2:
        raise InputError("classify_pair needs nonzero, linearly independent A and B")
    cases = CaseSet()
    for k, Q in enumerate(third):
        coeffs = span_contains(Q, A, B)
        if coeffs is not None:
            cases.case_i = (k, coeffs)
            break
    cases.case_ii = _reducible_combination(A, B)
    if A.gram_rank <= 4 and B.gram_rank <= 4:
        W = codim2_common(A, B)
        if W is not None:
            cases.case_iii = (None, W)
            # a third-set member sharing the space is kept as extra witness data
            for k, Q in enumerate(third):
                Wk = common_codim2_space([A, B, Q])
                if Wk is not None:
                    cases.case_iii = (k, Wk)
                    break
    logger.debug("classified pair: cases %s", cases.holds())
    return cases


# --- Rank-one companions ---


def _linear_cofactor(D: QForm, a: LinForm) -> Optional[LinForm]:
    """c with D == a * c, or None."""
    n = D.n
    rows, rhs = [], []
    for i in range(n):
        for j in range(i, n):
            row = [ZERO] * n
            row[j] = row[j] + a.coeffs[i]
            row[i] = row[i] + a.coeffs[j]
            rows.append(row)
            rhs.append(D.gram[i][j] * 2)
    sol = linalg.solve(rows, rhs)
    return None if sol is None else LinForm(tuple(sol))


def rank_one_companion(P: QForm, a: LinForm, b: LinForm, third: Sequence[QForm]) -> CompanionResult:
    """For irreducible P with prod(third) in sqrt<P, ab>: either a lies in MS(P) with
    rank_s(P) == 2, or some third[i] == alpha P + a c."""
    if P.gram_rank < 3:
        raise InputError("P must be irreducible")
    if a.is_zero():
        raise InputError("a must be nonzero")
    A = LinSpace.span(P.n, [a])
    residual = restrict_to_zero(P, A)
    if residual.gram_rank <= 2:
        if P.gram_rank > 4 or not minimal_space(P).contains(a):
            raise PreconditionError("P reducible modulo a but a is not in MS(P)")
        return CompanionResult("ms_containment")
    for i, T in enumerate(third):
        reduced = restrict_to_zero(T, A)
        coeffs = span_contains(reduced, residual, QForm.zero(P.n))
        if coeffs is None:
            continue
        alpha = coeffs[0]
        c = _linear_cofactor(T - P.scale(alpha), a)
        if c is not None:
            return CompanionResult("companion", i, alpha, c)
    raise PreconditionError("product of the third set is not in the radical of <P, ab>")
