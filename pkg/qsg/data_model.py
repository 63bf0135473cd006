# data_model.py

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Tuple, Union

if TYPE_CHECKING:
    from qsg.field import Scalar
    from qsg.qform import FactorWitness, LinForm, LinSpace

# --- Generic reports ---


@dataclass
class BoundReport:
    property: str                   # name of the checked statement, e.g. "projection-rank"
    measured: Union[int, Fraction]
    bound: Union[int, Fraction]
    holds: bool
    details: Dict[str, Any] = field(default_factory=dict)


# --- Pencil / structure classification ---


@dataclass
class PencilReport:
    threshold_rank: int                                           # rank <= threshold counts as low
    minor_gcd: List["Scalar"] = field(default_factory=list)       # binary form, alpha-degree descending
    rational_roots: List[Tuple["Scalar", "Scalar"]] = field(default_factory=list)
    irrational_factor_degrees: List[int] = field(default_factory=list)
    irrational_factors: List[List["Scalar"]] = field(default_factory=list)   # t-descending, t = alpha/beta
    identically_low: bool = False

    @property
    def exists(self) -> bool:
        return self.identically_low or len(self.minor_gcd) > 1


@dataclass
class ExtensionCertificate:
    description: str
    disc: Optional["Scalar"] = None      # set when a single square root suffices
    factor_degree: int = 2
    data: Dict[str, Any] = field(default_factory=dict)


@dataclass
class ReducibleCombination:
    alpha: Optional["Scalar"]                # None when the root is irrational
    beta: Optional["Scalar"]
    witness: Optional["FactorWitness"] = None
    min_poly: List["Scalar"] = field(default_factory=list)   # irreducible binary form of an irrational root


@dataclass
class CaseSet:
    case_i: Optional[Tuple[int, Tuple["Scalar", "Scalar"]]] = None
    case_ii: Optional[ReducibleCombination] = None
    case_iii: Optional[Tuple[Optional[int], Union["LinSpace", ExtensionCertificate]]] = None   # index None: pair only

    def holds(self) -> List[str]:
        out = []
        if self.case_i is not None:
            out.append("i")
        if self.case_ii is not None:
            out.append("ii")
        if self.case_iii is not None:
            out.append("iii")
        return out

    def is_empty(self) -> bool:
        return not self.holds()


@dataclass
class CompanionResult:
    kind: str                                  # "ms_containment" or "companion"
    index: Optional[int] = None
    alpha: Optional["Scalar"] = None
    c: Optional["LinForm"] = None


@dataclass
class SolveResult:
    consistent: bool                          # a common zero exists over C
    point: Optional[List["Scalar"]] = None    # a Q(i)-rational common zero, when found


# --- Configurations ---


@dataclass
class DeltaSGResult:
    holds: bool
    counts: List[int]
    threshold: Fraction


@dataclass
class EKResult:
    holds: bool
    violation: Optional[Tuple[Tuple[int, int], Tuple[int, int]]] = None   # ((set, point), (set, point))


@dataclass
class PartialEKResult:
    holds: bool
    fractions: List[List[Fraction]]
    bound: Optional[BoundReport] = None


@dataclass
class CommonVectorResult:
    w: "LinForm"
    U: "LinSpace"


@dataclass
class LineOrPlane:
    kind: str                          # "common_line" or "plane"
    space: "LinSpace"


# --- Triples ---


@dataclass
class TripleMeta:
    family: str
    seed: Optional[int] = None
    predicted_span_dim: Optional[int] = None
    params: Dict[str, Any] = field(default_factory=dict)
    expected_violation: Optional[Dict[str, Any]] = None


@dataclass
class SetPartition:
    set_index: int
    members: List[int] = field(default_factory=list)      # irreducible member indices
    squares: List[int] = field(default_factory=list)
    p_i: List[int] = field(default_factory=list)
    p_iii: List[int] = field(default_factory=list)
    remainder: List[int] = field(default_factory=list)    # in neither P^(i) nor P^(iii)
    bad: List[int] = field(default_factory=list)
    fractions_i: Dict[int, Dict[int, Fraction]] = field(default_factory=dict)     # member -> other set -> fraction
    fractions_iii: Dict[int, Dict[int, Fraction]] = field(default_factory=dict)


@dataclass
class Violation:
    where: str          # "T1[0]" or "T1[0]|T2[3]"
    reason: str


@dataclass
class ValidationReport:
    independence_ok: bool
    shape_ok: bool
    vanishing_ok: bool
    violations: List[Violation] = field(default_factory=list)
    witnesses: Dict[str, List[int]] = field(default_factory=dict)
    pair_cases: Dict[str, CaseSet] = field(default_factory=dict)
    partition_stats: List[SetPartition] = field(default_factory=list)
    hypothesis: str = "product"

    @property
    def all_ok(self) -> bool:
        return self.independence_ok and self.shape_ok and self.vanishing_ok


@dataclass
class MainTheoremReport:
    measured: int
    predicted: Optional[int]
    lambda_test: int
    prediction_ok: bool
    within_lambda: bool


# --- PIT ---


@dataclass
class SimplicityReport:
    simple: bool
    minimal: bool
    zero: bool
    shared_factor: Optional[int] = None       # index in gate 0 of a factor common to all gates
    zero_subsets: List[List[int]] = field(default_factory=list)


@dataclass
class PitVerdict:
    zero: bool
    witness: Optional[List["Scalar"]] = None
    value: Optional["Scalar"] = None
    stream_index: Optional[int] = None
    method: str = "scan"
