# quadsg.py

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any, Dict, List, Optional, Sequence, Tuple

from qsg import linalg
from qsg.config import DEFAULT_DELTA, DEFAULT_WITNESS_MAX, get_settings
from qsg.data_model import (CaseSet, MainTheoremReport, SetPartition, TripleMeta, ValidationReport,
                            Violation)
from qsg.errors import BudgetExceeded, InputError, PreconditionError, QsgError, ResampleExhausted
from qsg.event_logger import log_event
from qsg.field import ONE, ZERO, Scalar
from qsg.ideals import radical_member, witness_subset
from qsg.pencil import classify_pair
from qsg.qform import LinForm, QForm
from qsg.seeding import make_rng, random_int
from qsg.sg import ColoredConfig, fermat_configuration, planar_configuration

logger = logging.getLogger(__name__)

FAMILIES = ("squares_ek", "pencil", "corrupted")
MUTATIONS = ("outlier_square", "duplicate_member", "reducible_member")
MAX_VARIABLES = 8
MAX_SET_SIZE = 12


@dataclass
class QuadTriple:
    sets: List[List[QForm]]
    meta: TripleMeta = field(default_factory=lambda: TripleMeta("manual"))

    def __post_init__(self):
        if len(self.sets) != 3:
            raise InputError(f"a triple has three sets, got {len(self.sets)}")
        ns = {q.n for s in self.sets for q in s}
        if len(ns) > 1:
            raise InputError(f"members use different variable counts: {sorted(ns)}")

    @property
    def n(self) -> int:
        for s in self.sets:
            if s:
                return s[0].n
        return 0

    def members(self) -> List[Tuple[int, int, QForm]]:
        return [(j, a, q) for j, s in enumerate(self.sets) for a, q in enumerate(s)]


def member_label(j: int, a: int) -> str:
    return f"T{j + 1}[{a}]"


def pair_label(i: int, a: int, j: int, b: int) -> str:
    if (j, b) < (i, a):
        i, a, j, b = j, b, i, a
    return f"{member_label(i, a)}|{member_label(j, b)}"


def _independent(p: QForm, q: QForm) -> bool:
    return linalg.rank([p.vector(), q.vector()]) == 2


def _shape_violations(members: Sequence[Tuple[str, QForm]]) -> List[Violation]:
    out = []
    for label, q in members:
        if q.is_zero():
            out.append(Violation(label, "zero form"))
        elif q.gram_rank == 2:
            out.append(Violation(label, "reducible and not a square"))
    return out


def _dependent_pairs(members: Sequence[Tuple[str, QForm]]) -> List[Violation]:
    out = []
    for (la, p), (lb, q) in combinations(members, 2):
        if not p.is_zero() and not q.is_zero() and not _independent(p, q):
            out.append(Violation(f"{la}|{lb}", "linearly dependent"))
    return out


def _check_vanishing(label: str, A: QForm, B: QForm, third: Sequence[QForm], hypothesis: str,
                     witness_max: int, report: ValidationReport) -> bool:
    try:
        if hypothesis == "single":
            gens = [A.to_mpoly(), B.to_mpoly()]
            for k, q in enumerate(third):
                if radical_member(q.to_mpoly(), gens):
                    report.witnesses[label] = [k]
                    return True
            report.violations.append(Violation(label, "no single member of the third set is in the radical"))
            return False
        subset = witness_subset(third, A, B, witness_max)
        report.witnesses[label] = subset if subset is not None else list(range(len(third)))
        return True
    except PreconditionError:
        report.violations.append(Violation(label, "product of the third set is not in the radical"))
    except BudgetExceeded as e:
        logger.warning("pair %s left unverified: %s", label, e)
        report.violations.append(Violation(label, f"unverified: {e}"))
    return False


def _classify(label: str, A: QForm, B: QForm, third: Sequence[QForm], report: ValidationReport) -> None:
    try:
        cases = classify_pair(A, B, third)
    except QsgError as e:
        logger.warning("pair %s not classified: %s", label, e)
        return
    report.pair_cases[label] = cases
    if cases.is_empty():
        log_event("theorem_interest", {"what": "empty case set", "pair": label})


def validate_triple(t: QuadTriple, witness_max: int = DEFAULT_WITNESS_MAX, hypothesis: str = "product",
                    delta: Fraction = DEFAULT_DELTA, classify: bool = True) -> ValidationReport:
    if hypothesis not in ("product", "single"):
        raise InputError(f"unknown hypothesis: {hypothesis}")
    labelled = [(member_label(j, a), q) for j, a, q in t.members()]
    report = ValidationReport(True, True, True, hypothesis=hypothesis)

    shape = _shape_violations(labelled)
    shape += [Violation(f"T{j + 1}", "empty set") for j, s in enumerate(t.sets) if not s]
    report.shape_ok = not shape
    dependent = _dependent_pairs(labelled)
    report.independence_ok = not dependent
    report.violations.extend(shape + dependent)
    skipped = {v.where for v in dependent}

    for i, j in combinations(range(3), 2):
        k = 3 - i - j
        if not t.sets[k]:
            continue
        for a, A in enumerate(t.sets[i]):
            for b, B in enumerate(t.sets[j]):
                label = pair_label(i, a, j, b)
                if label in skipped or A.is_zero() or B.is_zero():
                    continue
                ok = _check_vanishing(label, A, B, t.sets[k], hypothesis, witness_max, report)
                report.vanishing_ok = report.vanishing_ok and ok
                if classify:
                    _classify(label, A, B, t.sets[k], report)
    logger.debug("validated triple: %d violations, %d pairs classified",
                 len(report.violations), len(report.pair_cases))
    if classify and report.all_ok:
        report.partition_stats = _partition_stats(t, report.pair_cases, delta)
    return report


def validate_quad_sg_set(forms: Sequence[QForm], witness_max: int = DEFAULT_WITNESS_MAX) -> ValidationReport:
    """Single-set hypothesis: every pair's radical holds the product of the other members."""
    labelled = [(f"Q[{a}]", q) for a, q in enumerate(forms)]
    report = ValidationReport(True, True, True, hypothesis="single-set")
    shape = _shape_violations(labelled)
    dependent = _dependent_pairs(labelled)
    report.shape_ok, report.independence_ok = not shape, not dependent
    report.violations.extend(shape + dependent)
    skipped = {v.where for v in dependent}
    for a, b in combinations(range(len(forms)), 2):
        label = f"Q[{a}]|Q[{b}]"
        if label in skipped or forms[a].is_zero() or forms[b].is_zero():
            continue
        rest = [q for c, q in enumerate(forms) if c not in (a, b)]
        if not rest:
            continue
        ok = _check_vanishing(label, forms[a], forms[b], rest, "product", witness_max, report)
        report.vanishing_ok = report.vanishing_ok and ok
    return report


# --- Measurements ---


def span_dim(t: QuadTriple) -> int:
    return linalg.rank([q.vector() for _, _, q in t.members()])


def _only_i(cases: Optional[CaseSet]) -> bool:
    return cases is not None and cases.case_i is not None and cases.case_ii is None


def _has_iii(cases: Optional[CaseSet]) -> bool:
    return cases is not None and cases.case_iii is not None


def _irreducible(members: Sequence[QForm]) -> List[int]:
    return [b for b, q in enumerate(members) if q.gram_rank != 1]


def _larger_other(t: QuadTriple, j: int) -> int:
    others = [x for x in range(3) if x != j]
    # squares do not count; ties go to the lower set index
    return max(others, key=lambda x: (len(_irreducible(t.sets[x])), -x))


def _partition_stats(t: QuadTriple, pair_cases: Dict[str, CaseSet], delta: Fraction) -> List[SetPartition]:
    delta = Fraction(delta)
    irreducible = [_irreducible(s) for s in t.sets]
    out = []
    for j, members in enumerate(t.sets):
        part = SetPartition(j)
        others = [x for x in range(3) if x != j]
        larger = _larger_other(t, j)
        for a, q in enumerate(members):
            if q.gram_rank == 1:
                part.squares.append(a)
                continue
            part.members.append(a)
            frac_i, frac_iii = {}, {}
            for x in others:
                if not irreducible[x]:
                    continue
                cases = [pair_cases.get(pair_label(j, a, x, b)) for b in irreducible[x]]
                frac_i[x] = Fraction(sum(1 for c in cases if _only_i(c)), len(cases))
                frac_iii[x] = Fraction(sum(1 for c in cases if _has_iii(c)), len(cases))
            part.fractions_i[a], part.fractions_iii[a] = frac_i, frac_iii
            in_i = frac_i.get(larger, Fraction(0)) >= delta
            in_iii = any(f >= delta for f in frac_iii.values())
            if in_i:
                part.p_i.append(a)
            if in_iii:
                part.p_iii.append(a)
            if not in_i and not in_iii:
                part.remainder.append(a)
            if all(f < delta for f in frac_i.values()):
                part.bad.append(a)
        out.append(part)
    return out


def pair_case_statistics(t: QuadTriple, delta: Fraction = DEFAULT_DELTA,
                         report: Optional[ValidationReport] = None) -> List[SetPartition]:
    if report is None:
        report = validate_triple(t, delta=delta)
    if not report.all_ok:
        raise PreconditionError("pair statistics need a validated triple")
    return _partition_stats(t, report.pair_cases, delta)


def assert_main_theorem(t: QuadTriple, lambda_test: int,
                        report: Optional[ValidationReport] = None) -> MainTheoremReport:
    if report is None:
        report = validate_triple(t, classify=False)
    if not report.all_ok:
        raise PreconditionError("the triple does not satisfy the hypothesis")
    measured = span_dim(t)
    predicted = t.meta.predicted_span_dim
    result = MainTheoremReport(measured, predicted, lambda_test,
                               prediction_ok=predicted is None or measured == predicted,
                               within_lambda=measured <= lambda_test)
    if not result.prediction_ok:
        logger.error("span dimension %d differs from the predicted %d", measured, predicted)
    if not result.within_lambda:
        log_event("theorem_interest", {"what": "span dimension above lambda_test",
                                       "measured": measured, "lambda_test": lambda_test})
    return result


# --- Generators ---


def _embedding(rng, n: int, d: int) -> List[List[Scalar]]:
    """A random injective n x d integer matrix."""
    for attempt in range(get_settings().resample_limit):
        cols = [[Scalar(random_int(rng, -2, 2)) for _ in range(d)] for _ in range(n)]
        if linalg.rank(cols) == d:
            return cols
        log_event("resample", {"what": "embedding", "attempt": attempt})
    raise ResampleExhausted(f"no injective {n}x{d} embedding found")


def _base_lines(params: Dict[str, Any]) -> Tuple[ColoredConfig, str]:
    base = params.get("base", "basic")
    if base == "basic":
        x, y = (ONE, ZERO), (ZERO, ONE)
        return ColoredConfig(2, [[x], [y], [(ONE, ONE)]], "vectors"), base
    if base == "fermat":
        return fermat_configuration(int(params.get("k", 2))), base
    if base == "planar":
        return planar_configuration(int(params.get("per_set", 3)), n=2), base
    raise InputError(f"unknown line configuration: {base}")


def _squares_ek(params: Dict[str, Any], rng, seed: Optional[int]) -> QuadTriple:
    lines, base = _base_lines(params)
    d = linalg.rank([p for s in lines.sets for p in s])
    n = int(params.get("n", lines.n))
    if n < d or n > MAX_VARIABLES:
        raise InputError(f"n must lie in [{d}, {MAX_VARIABLES}] for this configuration")
    coords = lines.n
    if params.get("embed", "random") == "identity":
        emb = [[ONE if r == c else ZERO for c in range(coords)] for r in range(n)]
    else:
        # the lines may not span their ambient space; embed a basis of their span
        basis_rows, _ = linalg.rref([p for s in lines.sets for p in s])
        inner = _embedding(rng, n, d)
        emb = linalg.matmul(inner, basis_rows)
    sets = []
    for s in lines.sets:
        images = linalg.matmul(emb, linalg.transpose(s)) if s else []
        sets.append([QForm.square(LinForm(tuple(row[c] for row in images))) for c in range(len(s))])
    meta = TripleMeta("squares_ek", seed, d * (d + 1) // 2, {"base": base, "n": n})
    return QuadTriple(sets, meta)


def _random_form(rng, n: int) -> QForm:
    rows = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            rows[i][j] = rows[j][i] = Scalar(random_int(rng, -3, 3))
    return QForm.from_gram(rows)


def _pencil(params: Dict[str, Any], rng, seed: Optional[int]) -> QuadTriple:
    n = int(params.get("n", 3))
    sizes = [int(s) for s in params.get("sizes", [1, 1, 1])]
    if not 3 <= n <= MAX_VARIABLES:
        raise InputError(f"pencil family needs 3 <= n <= {MAX_VARIABLES}")
    if len(sizes) != 3 or any(not 1 <= s <= MAX_SET_SIZE for s in sizes):
        raise InputError(f"three set sizes in [1, {MAX_SET_SIZE}] required")
    limit = get_settings().resample_limit
    for attempt in range(limit):
        A, B = _random_form(rng, n), _random_form(rng, n)
        if A.gram_rank >= 3 and B.gram_rank >= 3 and _independent(A, B):
            break
        log_event("resample", {"what": "pencil generators", "attempt": attempt})
    else:
        raise ResampleExhausted("no independent irreducible pencil generators")

    seen = set()
    sets: List[List[QForm]] = [[] for _ in range(3)]
    draws = 0
    for j, size in enumerate(sizes):
        while len(sets[j]) < size:
            draws += 1
            if draws > limit * sum(sizes):
                raise ResampleExhausted("pencil members exhausted the resampling budget")
            alpha, beta = random_int(rng, -3, 3), random_int(rng, -3, 3)
            if alpha == 0 and beta == 0:
                continue
            key = (Fraction(1), Fraction(beta, alpha)) if alpha else (Fraction(0), Fraction(1))
            if key in seen:
                continue
            q = A.scale(Scalar(alpha)) + B.scale(Scalar(beta))
            if q.gram_rank <= 2:
                log_event("resample", {"what": "reducible pencil member", "alpha": alpha, "beta": beta})
                continue
            seen.add(key)
            sets[j].append(q)
    meta = TripleMeta("pencil", seed, 2, {"n": n, "sizes": sizes})
    return QuadTriple(sets, meta)


def _corrupted(params: Dict[str, Any], rng, seed: Optional[int]) -> QuadTriple:
    mutation = params.get("mutation", "outlier_square")
    if mutation not in MUTATIONS:
        raise InputError(f"unknown mutation: {mutation}")
    n = int(params.get("n", 3))
    if not 3 <= n <= MAX_VARIABLES:
        raise InputError(f"corrupted family needs 3 <= n <= {MAX_VARIABLES}")
    base = _squares_ek({"base": "basic", "n": n, "embed": "identity"}, rng, seed)
    sets = [list(s) for s in base.sets]
    x = [LinForm.variable(n, i) for i in range(3)]
    if mutation == "outlier_square":
        sets[2] = [QForm.square(x[0] + x[2])]
        expected = {"check": "vanishing", "where": ["T1[0]|T2[0]", "T1[0]|T3[0]", "T2[0]|T3[0]"]}
    elif mutation == "duplicate_member":
        sets[1].append(sets[0][0].scale(Scalar(2)))
        expected = {"check": "independence", "where": ["T1[0]|T2[1]"]}
    else:
        sets[2] = [QForm.from_product(x[0] + x[1], x[0] + x[1].scale(Scalar(2)))]
        expected = {"check": "shape", "where": ["T3[0]"]}
    expected["mutation"] = mutation
    meta = TripleMeta("corrupted", seed, None, {"mutation": mutation, "n": n}, expected)
    return QuadTriple(sets, meta)


def generate(family: str, params: Optional[Dict[str, Any]] = None, seed: int = 0) -> QuadTriple:
    """Deterministic triple of the given family; identical seed and params give identical output."""
    params = dict(params or {})
    rng = make_rng(seed)
    if family == "squares_ek":
        t = _squares_ek(params, rng, seed)
    elif family == "pencil":
        t = _pencil(params, rng, seed)
    elif family == "corrupted":
        t = _corrupted(params, rng, seed)
    else:
        raise InputError(f"unknown family: {family}; expected one of {FAMILIES}")
    logger.info("generated %s triple with set sizes %s", family, [len(s) for s in t.sets])
    return t
