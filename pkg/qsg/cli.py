# cli.py

import argparse
import json
import logging
import os
import sys
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from qsg import data_storage as ds
from qsg.config import DEFAULT_DELTA, DEFAULT_HITTING_K, DEFAULT_SEED, DEFAULT_WITNESS_MAX, get_settings
from qsg.errors import BudgetExceeded, InputError, PreconditionError, QsgError, ResampleExhausted
from qsg.ideals import radical_member, witness_subset
from qsg.mpoly import MPoly, product
from qsg.pencil import classify_pair
from qsg.pit import expand_oracle, hitting_set_generate, pit_run, simplicity_minimality
from qsg.qform import QForm, factor, minimal_space, rank_s
from qsg.quadsg import assert_main_theorem, generate, pair_case_statistics, validate_triple
from qsg.sg import (check_ek_bound, check_ordinary_line_theorem, check_sg_bound, ek_condition,
                    is_delta_sg, ordinary_lines, partial_ek_condition)

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_VIOLATED, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

Outcome = Tuple[int, Any]


class RunConfig(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    command: str
    inputs: Dict[str, str] = Field(default_factory=dict)
    seed: int = Field(default=DEFAULT_SEED, ge=0, lt=2 ** 64)
    delta: Fraction = DEFAULT_DELTA
    lambda_test: int = 20
    budget_degree: int = Field(default_factory=lambda: get_settings().budget_degree, ge=1)
    output_format: str = Field(default="json", pattern="^(json|text)$")

    @field_validator("delta")
    @classmethod
    def _delta_in_range(cls, v: Fraction) -> Fraction:
        if not 0 < v <= 1:
            raise ValueError(f"delta must lie in (0, 1], got {v}")
        return v


# -----------------------------
# Input helpers
# -----------------------------
def _qform(path: str) -> QForm:
    forms = ds.load_forms(ds.load_json(path))
    if len(forms) != 1 or not isinstance(forms[0], QForm):
        raise InputError(f"{path} must hold exactly one quadratic form")
    return forms[0]


def _qforms(path: str) -> List[QForm]:
    forms = ds.load_forms(ds.load_json(path))
    if not all(isinstance(f, QForm) for f in forms):
        raise InputError(f"{path} must hold quadratic forms")
    return forms


def _polys(path: str) -> List[MPoly]:
    return [f.to_mpoly() if isinstance(f, QForm) else f for f in ds.load_forms(ds.load_json(path))]


def _holds_all(*reports) -> bool:
    return all(r.holds for r in reports if r is not None)


# -----------------------------
# Handlers
# -----------------------------
def cmd_rank(args, cfg: RunConfig) -> Outcome:
    q = _qform(args.form)
    return EXIT_OK, {"gram_rank": q.gram_rank, "rank_s": rank_s(q)}


def cmd_ms(args, cfg: RunConfig) -> Outcome:
    V = minimal_space(_qform(args.form))
    return EXIT_OK, {"dim": V.dim, "minimal_space": V}


def cmd_factor(args, cfg: RunConfig) -> Outcome:
    q = _qform(args.form)
    if q.is_zero():
        raise InputError("cannot factor the zero form")
    return EXIT_OK, {"witness": factor(q)}


def cmd_classify(args, cfg: RunConfig) -> Outcome:
    third = _qforms(args.third) if args.third else []
    cases = classify_pair(_qform(args.a), _qform(args.b), third)
    code = EXIT_OK if not cases.is_empty() else EXIT_VIOLATED
    return code, {"holds": cases.holds(), "cases": cases}


def cmd_radical(args, cfg: RunConfig) -> Outcome:
    gens = _polys(args.gens)
    fs = _polys(args.f)
    n = gens[0].n if gens else 0
    member = radical_member(product(fs, n), gens)
    return (EXIT_OK if member else EXIT_VIOLATED), {"property": "radical-membership", "member": member}


def cmd_witness(args, cfg: RunConfig) -> Outcome:
    gens = _qforms(args.gens)
    if len(gens) != 2:
        raise InputError("--gens must hold exactly two quadratic forms")
    subset = witness_subset(_qforms(args.factors), gens[0], gens[1], args.witness_max)
    return EXIT_OK, {"subset": subset, "max_size": args.witness_max}


def cmd_sg_check(args, cfg: RunConfig) -> Outcome:
    c = ds.dict_to_point_config(ds.load_json(args.input))
    delta_sg = is_delta_sg(c, cfg.delta)
    bound = check_sg_bound(c, cfg.delta) if delta_sg.holds else None
    theorem = check_ordinary_line_theorem(c)
    report = {"dim": theorem.details["dim"], "ordinary_lines": ordinary_lines(c), "delta_sg": delta_sg,
              "sg_bound": bound, "ordinary_line": theorem}
    return (EXIT_OK if _holds_all(bound, theorem) else EXIT_VIOLATED), report


def cmd_ek_check(args, cfg: RunConfig) -> Outcome:
    data = ds.load_json(args.input)
    if args.mode:
        data = dict(data, mode=args.mode)
    c = ds.dict_to_colored_config(data)
    if args.partial:
        result = partial_ek_condition(c, cfg.delta)
        ok = result.holds and _holds_all(result.bound)
        return (EXIT_OK if ok else EXIT_VIOLATED), {"partial": result}
    cond = ek_condition(c)
    if not cond.holds:
        return EXIT_VIOLATED, {"condition": cond}
    bound = check_ek_bound(c)
    return (EXIT_OK if bound.holds else EXIT_VIOLATED), {"condition": cond, "bound": bound}


def cmd_triple_gen(args, cfg: RunConfig) -> Outcome:
    try:
        params = json.loads(args.params) if args.params else {}
    except json.JSONDecodeError as e:
        raise InputError(f"--params is not valid JSON: {e}") from e
    return EXIT_OK, generate(args.family, params, cfg.seed)


def cmd_triple_validate(args, cfg: RunConfig) -> Outcome:
    t = ds.dict_to_triple(ds.load_json(args.input))
    report = validate_triple(t, args.witness_max, args.hypothesis, cfg.delta)
    return (EXIT_OK if report.all_ok else EXIT_VIOLATED), {"all_ok": report.all_ok, "report": report}


def cmd_triple_stats(args, cfg: RunConfig) -> Outcome:
    t = ds.dict_to_triple(ds.load_json(args.input))
    report = validate_triple(t, delta=cfg.delta)
    if not report.all_ok:
        return EXIT_VIOLATED, {"all_ok": False, "violations": report.violations}
    return EXIT_OK, {"delta": cfg.delta, "partitions": pair_case_statistics(t, cfg.delta, report)}


def cmd_triple_assert(args, cfg: RunConfig) -> Outcome:
    t = ds.dict_to_triple(ds.load_json(args.input))
    report = validate_triple(t, classify=False)
    if not report.all_ok:
        return EXIT_VIOLATED, {"property": "main-theorem", "validated": False, "violations": report.violations}
    result = assert_main_theorem(t, cfg.lambda_test, report)
    return (EXIT_OK if result.prediction_ok else EXIT_VIOLATED), {"property": "main-theorem", "result": result}


def cmd_pit_run(args, cfg: RunConfig) -> Outcome:
    c = ds.dict_to_circuit(ds.load_json(args.input))
    k = min(args.k, c.n)
    hs = hitting_set_generate(c.n, c.d, c.n if args.identity else k, args.identity)
    verdict = pit_run(c, hs, assisted=args.assisted)
    return EXIT_OK, {"hitting_set_size": len(hs), "verdict": verdict}


def cmd_pit_oracle(args, cfg: RunConfig) -> Outcome:
    c = ds.dict_to_circuit(ds.load_json(args.input))
    expansion = expand_oracle(c)
    return EXIT_OK, {"zero": expansion.is_zero(), "expansion": expansion,
                     "structure": simplicity_minimality(c)}


def cmd_pit_hitting_set(args, cfg: RunConfig) -> Outcome:
    k = args.n if args.identity else args.k
    hs = hitting_set_generate(args.n, args.d, k, args.identity)
    written = None
    if args.out:
        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            written = ds.write_points(hs.points(), f)
    return EXIT_OK, {"n": hs.n, "d": hs.d, "k": hs.k, "size": len(hs),
                     "t_values": len(hs.t_values), "grid": list(hs.grid), "written": written}


def cmd_selftest(args, cfg: RunConfig) -> Outcome:
    from qsg.selftest import run_selftest

    report = run_selftest(cfg.seed, quick=args.quick)
    return (EXIT_OK if report["passed"] else EXIT_VIOLATED), report


# -----------------------------
# Parser
# -----------------------------
def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "text"], default="json", help="report format")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="root seed of every random draw")
    common.add_argument("--log-level", default="WARNING", help="logging level on stderr")
    common.add_argument("--out", default=None, help="write the report (or point stream) to this file")
    common.add_argument("--delta", type=Fraction, default=DEFAULT_DELTA, help="delta as p/q")
    common.add_argument("--lambda", dest="lambda_test", type=int, default=20, help="dimension to compare against")
    common.add_argument("--budget-degree", type=int, default=None, help="override QSG_BUDGET_DEGREE")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="qsg", description="Exact quadratic Sylvester-Gallai toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    def leaf(container, name: str, handler: Callable, help_text: str) -> argparse.ArgumentParser:
        p = container.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(handler=handler)
        return p

    for name, handler, help_text in (("rank", cmd_rank, "Gram rank and rank_s of a form"),
                                     ("ms", cmd_ms, "minimal space of a form"),
                                     ("factor", cmd_factor, "factor a quadratic form")):
        leaf(sub, name, handler, help_text).add_argument("--form", required=True)

    p = leaf(sub, "classify", cmd_classify, "cases of the structure theorem for a pair")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--third", default=None)

    p = leaf(sub, "radical", cmd_radical, "radical membership of a product")
    p.add_argument("--gens", required=True)
    p.add_argument("--f", required=True)

    p = leaf(sub, "witness", cmd_witness, "smallest witness subset")
    p.add_argument("--gens", required=True)
    p.add_argument("--factors", required=True)
    p.add_argument("--witness-max", type=int, default=DEFAULT_WITNESS_MAX)

    sg = sub.add_parser("sg", help="point configurations").add_subparsers(dest="action", required=True)
    leaf(sg, "check", cmd_sg_check, "ordinary lines and the robust bound").add_argument(
        "--in", dest="input", required=True)

    ek = sub.add_parser("ek", help="colored configurations").add_subparsers(dest="action", required=True)
    p = leaf(ek, "check", cmd_ek_check, "colored condition and its dimension bound")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--mode", choices=["vectors", "affine_points"], default=None)
    p.add_argument("--partial", action="store_true")

    triple = sub.add_parser("triple", help="quadratic triples").add_subparsers(dest="action", required=True)
    p = leaf(triple, "gen", cmd_triple_gen, "generate a triple")
    p.add_argument("--family", required=True, choices=["squares_ek", "pencil", "corrupted"])
    p.add_argument("--params", default=None, help="JSON object of family parameters")
    p = leaf(triple, "validate", cmd_triple_validate, "check the hypothesis")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--witness-max", type=int, default=DEFAULT_WITNESS_MAX)
    p.add_argument("--hypothesis", choices=["product", "single"], default="product")
    for name, handler, help_text in (("stats", cmd_triple_stats, "partition statistics"),
                                     ("assert", cmd_triple_assert, "span dimension against predictions")):
        leaf(triple, name, handler, help_text).add_argument("--in", dest="input", required=True)

    pit = sub.add_parser("pit", help="identity testing").add_subparsers(dest="action", required=True)
    p = leaf(pit, "run", cmd_pit_run, "scan the hitting set")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--k", type=int, default=DEFAULT_HITTING_K)
    p.add_argument("--identity", action="store_true")
    p.add_argument("--assisted", action="store_true", help="let the expansion answer zero and skip blocks")
    leaf(pit, "oracle", cmd_pit_oracle, "expand the circuit").add_argument("--in", dest="input", required=True)
    p = leaf(pit, "hitting-set", cmd_pit_hitting_set, "emit a hitting set")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, default=DEFAULT_HITTING_K)
    p.add_argument("--identity", action="store_true")

    leaf(sub, "selftest", cmd_selftest, "run the acceptance suite").add_argument("--quick", action="store_true")
    return parser


# -----------------------------
# Output
# -----------------------------
def _flatten(prefix: str, data: Any, lines: List[str]) -> None:
    if isinstance(data, dict):
        for key in sorted(data):
            _flatten(f"{prefix}.{key}" if prefix else str(key), data[key], lines)
    elif isinstance(data, list) and any(isinstance(x, (dict, list)) for x in data):
        for i, x in enumerate(data):
            _flatten(f"{prefix}[{i}]", x, lines)
    else:
        lines.append(f"{prefix}: {json.dumps(data)}")


def render(report: Any, fmt: str) -> str:
    data = ds.report_to_dict(report)
    if fmt == "json":
        return json.dumps(data, sort_keys=True, indent=2) + "\n"
    lines: List[str] = []
    _flatten("", data, lines)
    return "\n".join(lines) + "\n"


@contextmanager
def _budget_override(budget: Optional[int]):
    if budget is None:
        yield
        return
    previous = os.environ.get("QSG_BUDGET_DEGREE")
    os.environ["QSG_BUDGET_DEGREE"] = str(budget)
    try:
        yield
    finally:
        if previous is None:
            os.environ.pop("QSG_BUDGET_DEGREE", None)
        else:
            os.environ["QSG_BUDGET_DEGREE"] = previous


def _command_name(args) -> str:
    action = getattr(args, "action", None)
    return f"{args.command} {action}" if action else args.command


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    logging.basicConfig(stream=sys.stderr, level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    command = _command_name(args)
    try:
        inputs = {k: str(v) for k, v in vars(args).items()
                  if k in ("form", "a", "b", "third", "gens", "f", "factors", "input") and v}
        cfg = RunConfig(command=command, inputs=inputs, seed=args.seed, delta=args.delta,
                        lambda_test=args.lambda_test, output_format=args.format,
                        **({"budget_degree": args.budget_degree} if args.budget_degree is not None else {}))
    except ValidationError as e:
        print(f"[error] invalid arguments: {e}", file=sys.stderr)
        return EXIT_USAGE

    stream_out = command == "pit hitting-set"
    try:
        with _budget_override(cfg.budget_degree):
            code, report = args.handler(args, cfg)
    except (BudgetExceeded, ResampleExhausted) as e:
        code, report = EXIT_BUDGET, {"error": type(e).__name__, "message": str(e)}
    except (InputError, PreconditionError) as e:
        code, report = EXIT_USAGE, {"error": type(e).__name__, "message": str(e)}
    except QsgError as e:
        code, report = EXIT_VIOLATED, {"error": type(e).__name__, "message": str(e)}
    except Exception as e:
        logger.error("unexpected failure in %s: %s", command, e, exc_info=True)
        code, report = EXIT_USAGE, {"error": type(e).__name__, "message": str(e)}

    text = render(report, cfg.output_format)
    if args.out and not stream_out:
        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    else:
        sys.stdout.write(text)
    logger.info("%s finished with exit code %d", command, code)
    return code


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
