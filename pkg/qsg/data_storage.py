# data_storage.py

import dataclasses
import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, IO, Iterable, List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, Field, StrictInt, ValidationError

from qsg.data_model import TripleMeta
from qsg.errors import InputError
from qsg.field import ExtScalar, Scalar
from qsg.mpoly import MPoly
from qsg.pit import Circuit
from qsg.qform import LinForm, LinSpace, QForm, qform_from_monomials, qform_to_monomials
from qsg.quadsg import QuadTriple
from qsg.sg import ColoredConfig, PointConfig

logger = logging.getLogger(__name__)


# -----------------------------
# Payload models
# -----------------------------
class GaussianPayload(BaseModel):
    re: Union[StrictInt, str] = "0"
    im: Union[StrictInt, str] = "0"


ScalarPayload = Union[StrictInt, str, GaussianPayload]


class LinFormPayload(BaseModel):
    coeffs: List[ScalarPayload]


class QFormPayload(BaseModel):
    n: int = Field(ge=0)
    terms: List[Tuple[int, int, ScalarPayload]] = Field(default_factory=list)


class LinSpacePayload(BaseModel):
    n: int = Field(ge=0)
    basis: List[List[ScalarPayload]] = Field(default_factory=list)


class TermPayload(BaseModel):
    exp: List[int]
    c: ScalarPayload


class MPolyPayload(BaseModel):
    n: int = Field(ge=0)
    terms: List[TermPayload] = Field(default_factory=list)


class TriplePayload(BaseModel):
    T1: List[QFormPayload]
    T2: List[QFormPayload]
    T3: List[QFormPayload]
    meta: Optional[Dict[str, Any]] = None


class CircuitPayload(BaseModel):
    n: int = Field(ge=0)
    gates: List[List[QFormPayload]]


class PointConfigPayload(BaseModel):
    mode: str = "affine_points"
    n: Optional[int] = None
    points: List[List[ScalarPayload]]


class ColoredConfigPayload(BaseModel):
    mode: str = "vectors"
    n: Optional[int] = None
    sets: List[List[List[ScalarPayload]]]


def _parse(model, data: Any):
    try:
        return model.model_validate(data)
    except ValidationError as e:
        raise InputError(f"invalid {model.__name__}: {e}") from e


# -----------------------------
# Scalars
# -----------------------------
def scalar_to_json(s: Scalar) -> Union[str, Dict[str, str]]:
    if s.is_real():
        return str(s.re)
    return {"re": str(s.re), "im": str(s.im)}


def scalar_from_json(data: Any) -> Scalar:
    if isinstance(data, Scalar):
        return data
    if isinstance(data, GaussianPayload):
        return Scalar(data.re, data.im)
    if isinstance(data, dict):
        return scalar_from_json(_parse(GaussianPayload, data))
    if isinstance(data, (int, str)) and not isinstance(data, bool):
        return Scalar(data)
    raise InputError(f"not a scalar: {data!r}")


def _scalars(items: Iterable[Any]) -> Tuple[Scalar, ...]:
    return tuple(scalar_from_json(x) for x in items)


# -----------------------------
# Forms and spaces
# -----------------------------
def linform_to_dict(a: LinForm) -> dict:
    return {"coeffs": [scalar_to_json(c) for c in a.coeffs]}


def dict_to_linform(data: Any) -> LinForm:
    p = data if isinstance(data, LinFormPayload) else _parse(LinFormPayload, data)
    return LinForm(_scalars(p.coeffs))


def qform_to_dict(q: QForm) -> dict:
    terms = [[i, j, scalar_to_json(c)] for (i, j), c in sorted(qform_to_monomials(q).items())]
    return {"n": q.n, "terms": terms}


def dict_to_qform(data: Any) -> QForm:
    p = data if isinstance(data, QFormPayload) else _parse(QFormPayload, data)
    monomials: Dict[Tuple[int, int], Scalar] = {}
    for i, j, c in p.terms:
        if i > j:
            raise InputError(f"term ({i},{j}) must list the smaller index first")
        key = (i, j)
        monomials[key] = monomials.get(key, Scalar(0)) + scalar_from_json(c)
    return qform_from_monomials(p.n, monomials)


def linspace_to_dict(V: LinSpace) -> dict:
    return {"n": V.n, "basis": [[scalar_to_json(c) for c in row] for row in V.basis]}


def dict_to_linspace(data: Any) -> LinSpace:
    p = data if isinstance(data, LinSpacePayload) else _parse(LinSpacePayload, data)
    return LinSpace.span(p.n, [_scalars(row) for row in p.basis])


def mpoly_to_dict(f: MPoly) -> dict:
    terms = [{"exp": list(exp), "c": scalar_to_json(c)} for exp, c in f.sorted_terms("grevlex")]
    return {"n": f.n, "terms": terms}


def dict_to_mpoly(data: Any) -> MPoly:
    p = data if isinstance(data, MPolyPayload) else _parse(MPolyPayload, data)
    terms: Dict[Tuple[int, ...], Scalar] = {}
    for t in p.terms:
        exp = tuple(t.exp)
        terms[exp] = terms.get(exp, Scalar(0)) + scalar_from_json(t.c)
    return MPoly(p.n, terms)


def load_forms(data: Any) -> List[Union[QForm, MPoly]]:
    """A single form or a list; entries with "exp" terms are polynomials, the rest quadratics."""
    items = data if isinstance(data, list) else [data]
    out = []
    for item in items:
        if not isinstance(item, dict):
            raise InputError(f"expected a form object, got {type(item).__name__}")
        terms = item.get("terms") or []
        if terms and isinstance(terms[0], dict):
            out.append(dict_to_mpoly(item))
        else:
            out.append(dict_to_qform(item))
    return out


# -----------------------------
# Triples, circuits, configurations
# -----------------------------
def triple_to_dict(t: QuadTriple) -> dict:
    out = {f"T{j + 1}": [qform_to_dict(q) for q in s] for j, s in enumerate(t.sets)}
    out["meta"] = report_to_dict(t.meta)
    return out


def dict_to_triple(data: Any) -> QuadTriple:
    p = _parse(TriplePayload, data)
    sets = [[dict_to_qform(q) for q in s] for s in (p.T1, p.T2, p.T3)]
    meta = TripleMeta("manual")
    if p.meta:
        known = {f.name for f in dataclasses.fields(TripleMeta)}
        meta = TripleMeta(**{k: v for k, v in p.meta.items() if k in known})
    return QuadTriple(sets, meta)


def circuit_to_dict(c: Circuit) -> dict:
    return {"n": c.n, "gates": [[qform_to_dict(q) for q in g] for g in c.gates]}


def dict_to_circuit(data: Any) -> Circuit:
    p = _parse(CircuitPayload, data)
    return Circuit(p.n, [[dict_to_qform(q) for q in g] for g in p.gates])


def _infer_n(n: Optional[int], rows: Sequence[Sequence[Any]]) -> int:
    if n is not None:
        return n
    if not rows:
        raise InputError("cannot infer the dimension of an empty configuration")
    return len(rows[0])


def point_config_to_dict(c: PointConfig) -> dict:
    return {"mode": c.mode, "n": c.n, "points": [[scalar_to_json(x) for x in p] for p in c.points]}


def dict_to_point_config(data: Any) -> PointConfig:
    p = _parse(PointConfigPayload, data)
    return PointConfig(_infer_n(p.n, p.points), [_scalars(pt) for pt in p.points], p.mode)


def colored_config_to_dict(c: ColoredConfig) -> dict:
    return {"mode": c.mode, "n": c.n,
            "sets": [[[scalar_to_json(x) for x in p] for p in s] for s in c.sets]}


def dict_to_colored_config(data: Any) -> ColoredConfig:
    p = _parse(ColoredConfigPayload, data)
    first = next((s for s in p.sets if s), [])
    return ColoredConfig(_infer_n(p.n, first), [[_scalars(pt) for pt in s] for s in p.sets], p.mode)


# -----------------------------
# Reports
# -----------------------------
def report_to_dict(obj: Any) -> Any:
    """Recursively convert reports and domain objects into JSON-ready data."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, Scalar):
        return scalar_to_json(obj)
    if isinstance(obj, (ExtScalar, Fraction, Path)):
        return str(obj)
    if isinstance(obj, LinForm):
        return linform_to_dict(obj)
    if isinstance(obj, LinSpace):
        return linspace_to_dict(obj)
    if isinstance(obj, QForm):
        return qform_to_dict(obj)
    if isinstance(obj, MPoly):
        return mpoly_to_dict(obj)
    if isinstance(obj, QuadTriple):
        return triple_to_dict(obj)
    if isinstance(obj, Circuit):
        return circuit_to_dict(obj)
    if dataclasses.is_dataclass(obj):
        return {f.name: report_to_dict(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): report_to_dict(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [report_to_dict(x) for x in obj]
    raise InputError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(report_to_dict(obj), sort_keys=True, indent=2)


# -----------------------------
# Files
# -----------------------------
def load_json(path: Union[str, Path]) -> Any:
    path = Path(path)
    try:
        with open(path, "r") as f:
            return json.load(f)
    except FileNotFoundError as e:
        raise InputError(f"no such file: {path}") from e
    except json.JSONDecodeError as e:
        raise InputError(f"{path} is not valid JSON: {e}") from e


def save_json(path: Union[str, Path], data: Any) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        f.write(dumps(data))
        f.write("\n")
    logger.info("wrote %s", path)


def write_points(points: Iterable[Sequence[Scalar]], out: IO[str]) -> int:
    """Line-delimited JSON arrays of exact scalars; returns the number of lines."""
    count = 0
    for p in points:
        out.write(json.dumps([scalar_to_json(x) for x in p]))
        out.write("\n")
        count += 1
    return count


def read_points(lines: Iterable[str]) -> List[Tuple[Scalar, ...]]:
    out = []
    for line in lines:
        line = line.strip()
        if line:
            try:
                out.append(_scalars(json.loads(line)))
            except json.JSONDecodeError as e:
                raise InputError(f"bad point line {line!r}: {e}") from e
    return out
