# selftest.py
# Acceptance suite behind `qsg selftest`. Every criterion draws from its own
# sub-seed of the root seed, so reports are reproducible byte for byte.

import logging
from fractions import Fraction
from itertools import combinations
from typing import Any, Callable, Dict, List

import numpy as np

from qsg import linalg
from qsg.errors import InputError, QsgError
from qsg.ideals import codim2_oracle, radical_member, witness_subset
from qsg.pencil import classify_pair, codim2_common
from qsg.pit import (evaluate, expand_oracle, hitting_set_generate, pit_run, random_circuit,
                     zero_circuit)
from qsg.qform import (LinForm, LinSpace, QForm, minimal_space, qform_from_monomials, rank_s,
                       restrict_to_zero, sample_projection)
from qsg.quadsg import generate, span_dim, validate_triple
from qsg.seeding import make_rng, random_int, random_scalar, spawn_seeds
from qsg.sg import (PointConfig, check_ek_bound, check_sg_bound, collinear_configuration,
                    ek_condition, grid_configuration, is_delta_sg, ordinary_lines,
                    random_colored_config)

logger = logging.getLogger(__name__)

FULL_COUNTS = {"classifier": 200, "rank": 1000, "inequality": 1000, "codim2": 200,
               "sg": 30, "ek": 10000, "triples": 100, "pit": 100}
QUICK_COUNTS = {"classifier": 4, "rank": 20, "inequality": 20, "codim2": 2,
                "sg": 6, "ek": 20, "triples": 2, "pit": 3}


def _criterion(name: str, checked: int, failures: List[str]) -> Dict[str, Any]:
    return {"name": name, "checked": checked, "failures": failures[:20], "passed": not failures}


def _random_form(rng: np.random.Generator, n: int) -> LinForm:
    return LinForm(tuple(random_scalar(rng, 2) for _ in range(n)))


def _independent_forms(rng: np.random.Generator, n: int, count: int) -> List[LinForm]:
    while True:
        forms = [_random_form(rng, n) for _ in range(count)]
        if linalg.rank([f.coeffs for f in forms]) == count:
            return forms


def _planted(rng: np.random.Generator, n: int, r: int):
    forms = _independent_forms(rng, n, 2 * r)
    q = QForm.zero(n)
    for k in range(r):
        q = q + QForm.from_product(forms[2 * k], forms[2 * k + 1])
    return q, forms


# --- Criteria ---


def check_quadruple() -> Dict[str, Any]:
    mono = lambda terms: qform_from_monomials(4, terms)
    q1, q2 = mono({(0, 1): 1, (2, 3): 1}), mono({(0, 1): 1, (2, 3): -1})
    q3, q4 = mono({(0, 3): 1}), mono({(1, 2): 1})
    gens = [q1.to_mpoly(), q2.to_mpoly()]
    failures = []
    if not radical_member(q3.to_mpoly() * q4.to_mpoly(), gens):
        failures.append("Q3*Q4 not in the radical")
    if radical_member(q3.to_mpoly(), gens) or radical_member(q4.to_mpoly(), gens):
        failures.append("a single factor is in the radical")
    if witness_subset([q3, q4], q1, q2) != [0, 1]:
        failures.append("witness subset is not {Q3, Q4}")
    return _criterion("quadruple", 4, failures)


def check_classifier(seed: int, count: int) -> Dict[str, Any]:
    failures, checked = [], 0
    for i, s in enumerate(spawn_seeds(seed, count)):
        if i % 2 == 0:
            t = generate("pencil", {"n": 3 + i % 4, "sizes": [1 + i % 2, 1, 1 + i % 3]}, s)
        else:
            t = generate("squares_ek", {"base": "basic", "n": 2 + i % 5}, s)
        for a, b in combinations(range(3), 2):
            third = t.sets[3 - a - b]
            for A in t.sets[a]:
                for B in t.sets[b]:
                    checked += 1
                    try:
                        if classify_pair(A, B, third).is_empty():
                            failures.append(f"seed {s}: empty case set")
                    except QsgError as e:
                        failures.append(f"seed {s}: {e}")
    return _criterion("classifier-completeness", checked, failures)


def check_rank_calculus(rng, count: int) -> Dict[str, Any]:
    failures = []
    for i in range(count):
        n = random_int(rng, 2, 10)
        r = random_int(rng, 1, n // 2)
        q, forms = _planted(rng, n, r)
        if rank_s(q) != r:
            failures.append(f"case {i}: rank_s {rank_s(q)} != {r}")
        if minimal_space(q) != LinSpace.span(n, forms):
            failures.append(f"case {i}: minimal space differs from the planted span")
    return _criterion("rank-calculus", count, failures)


def check_inequalities(rng, count: int) -> Dict[str, Any]:
    failures = []
    for i in range(count):
        n = random_int(rng, 3, 7)
        q, _ = _planted(rng, n, random_int(rng, 1, n // 2))
        V = LinSpace.span(n, [_random_form(rng, n) for _ in range(random_int(rng, 0, 2))])
        if rank_s(restrict_to_zero(q, V)) < rank_s(q) - V.dim:
            failures.append(f"case {i}: rank under restriction")

        k = random_int(rng, 2, 4)
        p1, _ = _planted(rng, k, random_int(rng, 1, k // 2))
        big = QForm.from_gram([list(row) + [0, 0] for row in p1.gram] + [[0] * (k + 2)] * 2)
        y1, y2 = LinForm.variable(k + 2, k), LinForm.variable(k + 2, k + 1)
        split = big + QForm.from_product(y1, y2)
        ms = minimal_space(split)
        if rank_s(split) != rank_s(p1) + 1 or not (ms.contains(y1) and ms.contains(y2)):
            failures.append(f"case {i}: fresh product rank")

        try:
            proj = sample_projection(V, rng, label="selftest")
        except InputError:
            continue
        if rank_s(proj.apply(q)) < rank_s(q) - V.dim:
            failures.append(f"case {i}: projection rank")
    return _criterion("inequalities", 3 * count, failures)


def check_codim2(rng, count: int) -> Dict[str, Any]:
    failures = []
    for i in range(count):
        n = random_int(rng, 3, 5)
        l1, l2 = _independent_forms(rng, n, 2)
        a, b, c, d = (_random_form(rng, n) for _ in range(4))
        A = QForm.from_product(l1, a) + QForm.from_product(l2, b)
        B = QForm.from_product(l1, c) + QForm.from_product(l2, d)
        if A.is_zero() or B.is_zero() or linalg.rank([A.vector(), B.vector()]) < 2:
            continue
        found = codim2_common(A, B) is not None
        if not found or not codim2_oracle([A, B]):
            failures.append(f"positive {i}: search {found}")
    for i in range(count):
        n = 5
        A = qform_from_monomials(n, {(0, 1): 1, (2, 3): 1, (4, 4): 1})
        B = QForm.square(_random_form(rng, n))
        found = codim2_common(A, B) is not None
        if found or codim2_oracle([A, B]):
            failures.append(f"negative {i}: search {found}")
    return _criterion("codim2-cross-validation", 2 * count, failures)


def _brute_ordinary(c: PointConfig) -> List[tuple]:
    out = []
    pts = c.points
    for i, j in combinations(range(len(pts)), 2):
        if c.mode == "vectors":
            third = any(linalg.rank([pts[i], pts[j], pts[t]]) <= 2 for t in range(len(pts)) if t not in (i, j))
        else:
            d = [y - x for x, y in zip(pts[i], pts[j])]
            third = any(linalg.rank([d, [y - x for x, y in zip(pts[i], pts[t])]]) <= 1
                        for t in range(len(pts)) if t not in (i, j))
        if not third:
            out.append((i, j))
    return out


def check_sg_ek(rng, count: int, ek_count: int) -> Dict[str, Any]:
    failures, checked = [], 0
    configs = [grid_configuration(3), collinear_configuration(5)]
    for _ in range(count):
        m = random_int(rng, 3, 12)
        pts = {(random_int(rng, 0, 4), random_int(rng, 0, 4)) for _ in range(m)}
        if len(pts) >= 2:
            configs.append(PointConfig(2, sorted(pts)))
    for c in configs:
        checked += 1
        if ordinary_lines(c) != _brute_ordinary(c):
            failures.append(f"ordinary lines differ on {len(c.points)} points")
        counts = is_delta_sg(c, Fraction(0)).counts
        delta = Fraction(min(counts), len(c.points))
        if delta > 0 and not check_sg_bound(c, delta).holds:
            failures.append(f"robust bound fails at delta {delta}")
    for i in range(ek_count):
        c = random_colored_config(rng, n=5, dim=random_int(rng, 2, 4), per_set=3)
        if any(not s for s in c.sets) or not ek_condition(c).holds:
            continue
        checked += 1
        if not check_ek_bound(c).holds:
            failures.append(f"colored sample {i}: dimension above 4")
    return _criterion("sg-ek", checked, failures)


def check_triples(seed: int, count: int) -> Dict[str, Any]:
    failures, checked = [], 0
    for family, params in (("pencil", {"n": 4, "sizes": [2, 2, 2]}), ("squares_ek", {"base": "planar", "n": 4})):
        for s in spawn_seeds(seed, count):
            t = generate(family, params, s)
            checked += 1
            report = validate_triple(t, classify=False)
            if not report.all_ok:
                failures.append(f"{family} seed {s}: hypothesis fails")
            if span_dim(t) != t.meta.predicted_span_dim:
                failures.append(f"{family} seed {s}: span dim {span_dim(t)} != {t.meta.predicted_span_dim}")
    return _criterion("main-theorem", checked, failures)


def check_pit(seed: int, count: int, quick: bool) -> Dict[str, Any]:
    failures, checked = [], 0
    for i, s in enumerate(spawn_seeds(seed, count)):
        n = 3 if quick else 4 + i % 5
        c = random_circuit(s, n=n, gate_len=1 + i % (2 if quick else 4))
        hs = hitting_set_generate(c.n, c.d, min(5, c.n))
        verdict = pit_run(c, hs)
        checked += 1
        if verdict.zero or expand_oracle(c).is_zero():
            failures.append(f"random circuit {s}: no witness")
        elif evaluate(c, verdict.witness).is_zero():
            failures.append(f"random circuit {s}: witness evaluates to zero")
    for s in spawn_seeds(seed + 1, count):
        c = zero_circuit(s, n=4)
        checked += 1
        if not expand_oracle(c).is_zero() or not pit_run(c, hitting_set_generate(4, c.d, 2)).zero:
            failures.append(f"zero circuit {s}: reported nonzero")
    for n, d, k in ((2, 2, 1), (3, 2, 2), (2, 3, 2)):
        hs = hitting_set_generate(n, d, k)
        checked += 1
        if sum(1 for _ in hs.points()) != len(hs) or len(hs) != (d * k * n + 1) * (d + 1) ** k:
            failures.append(f"hitting set ({n},{d},{k}) size mismatch")
    return _criterion("pit", checked, failures)


def run_selftest(seed: int, quick: bool = False) -> Dict[str, Any]:
    counts = QUICK_COUNTS if quick else FULL_COUNTS
    seeds = spawn_seeds(seed, 8)
    criteria: List[Dict[str, Any]] = []
    steps: List[Callable[[], Dict[str, Any]]] = [
        check_quadruple,
        lambda: check_classifier(seeds[1], counts["classifier"]),
        lambda: check_rank_calculus(make_rng(seeds[2]), counts["rank"]),
        lambda: check_inequalities(make_rng(seeds[3]), counts["inequality"]),
        lambda: check_codim2(make_rng(seeds[4]), counts["codim2"]),
        lambda: check_sg_ek(make_rng(seeds[5]), counts["sg"], counts["ek"]),
        lambda: check_triples(seeds[6], counts["triples"]),
        lambda: check_pit(seeds[7], counts["pit"], quick),
    ]
    for step in steps:
        result = step()
        logger.info("criterion %s: %s (%d checked)", result["name"],
                    "pass" if result["passed"] else "FAIL", result["checked"])
        criteria.append(result)
    return {"seed": seed, "quick": quick, "criteria": criteria,
            "passed": all(c["passed"] for c in criteria)}
