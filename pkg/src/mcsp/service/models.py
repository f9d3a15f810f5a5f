"""Request and response models for the HTTP service and the CLI.

Request models mirror the JSON file formats one-to-one and reject unknown
keys, so a typo in a hand-written file fails loudly instead of being
dropped.  Each carries a converter into the corresponding domain object,
whose constructor remains the real validator (table lengths, scope
arities, weight positivity).  Response models pin the report shapes that
the shipped schemas describe.
"""

from __future__ import annotations

from typing import Any, Literal, Mapping

from pydantic import BaseModel, ConfigDict, Field

from ..core import FORMAT_VERSION, ConstraintLanguage, Instance, Predicate
from ..hcolor import Digraph
from ..impls import StrictImplementation
from ..monge import SquareMatrix


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


# ---------------------------------------------------------------------------
# requests (= file formats)


class PredicateFile(_Strict):
    format: int = FORMAT_VERSION
    domain_size: int
    arity: int
    table: str

    def to_predicate(self) -> Predicate:
        return Predicate.from_json(self.model_dump())


class TableEntry(_Strict):
    # predicate entry inside language and instance files; the domain
    # size comes from the enclosing file
    arity: int
    table: str


class LanguageFile(_Strict):
    format: int = FORMAT_VERSION
    domain_size: int
    fixed_values: bool = True
    predicates: dict[str, TableEntry]

    def to_language(self) -> ConstraintLanguage:
        return ConstraintLanguage.from_json(self.model_dump())


class MatrixFile(_Strict):
    format: int = FORMAT_VERSION
    size: int | None = None
    rows: list[list[int]]

    def to_matrix(self) -> SquareMatrix:
        payload = self.model_dump()
        if payload["size"] is None:
            del payload["size"]
        return SquareMatrix.from_json(payload)


class ConstraintEntry(_Strict):
    pred: str
    scope: list[str]
    weight: int = 1


class InstanceFile(_Strict):
    format: int = FORMAT_VERSION
    domain_size: int
    predicates: dict[str, TableEntry]
    variables: list[str]
    constraints: list[ConstraintEntry]

    def to_instance(self) -> Instance:
        return Instance.from_json(self.model_dump())


class ImplConstraintEntry(_Strict):
    name: str | None = None
    pred: PredicateFile
    scope: list[str]


class ImplementationFile(_Strict):
    format: int = FORMAT_VERSION
    target: PredicateFile
    alpha: int
    primary: list[str]
    auxiliary: list[str]
    constraints: list[ImplConstraintEntry]

    def to_implementation(self) -> StrictImplementation:
        return StrictImplementation.from_json(self.model_dump())


class DigraphFile(_Strict):
    format: int = FORMAT_VERSION
    vertices: int
    edges: list[tuple[int, int]]
    # required, to keep digraph files distinguishable from graph files
    directed: Literal[True]

    def to_digraph(self) -> Digraph:
        return Digraph.from_json(self.model_dump())


class SolveRequest(_Strict):
    instance: InstanceFile
    method: Literal["brute", "approx"] = "brute"


class HcolorInstanceRequest(_Strict):
    g: DigraphFile
    h: DigraphFile
    lists: dict[int, list[int]] | None = None
    scores: dict[int, dict[int, int]] | None = None
    arc_weights: list[tuple[int, int, int]] | None = None

    def weight_map(self) -> dict[tuple[int, int], int] | None:
        if self.arc_weights is None:
            return None
        return {(u, v): w for u, v, w in self.arc_weights}


class ReproduceRequest(_Strict):
    audit: bool = False
    jobs: int = Field(default=1, ge=1)


# ---------------------------------------------------------------------------
# responses (= report formats)


class Health(BaseModel):
    status: str
    version: str


class SliceReport(BaseModel):
    source: str
    table: str
    fixed_positions: list[int]
    fixed_constants: list[int]
    stripped_lines: list[tuple[str, int]]


class WitnessReport(BaseModel):
    predicates: list[str]
    sub_domain: list[int]
    slice_provenance: list[SliceReport]


class ClassificationReport(BaseModel):
    format: int
    verdict: Literal["tractable", "apx_complete"]
    includes_fixed_values: bool
    chain: list[int] | None = None
    witness: WitnessReport | None = None


class MongeCheckReport(BaseModel):
    format: int
    anti_monge: bool
    method: str
    violation: tuple[int, int, int, int] | None = None


class MongePermuteReport(BaseModel):
    format: int
    found: bool
    permutation: list[int] | None = None
    witness_indices: list[int] | None = None
    witness_members: list[int] | None = None


class VerifyImplReport(BaseModel):
    format: int
    verified: bool
    alpha: int
    failure: Mapping | None = None


class CatalogItemReport(BaseModel):
    source: str
    verified: bool
    consequence_holds: bool
    failure: Mapping | None = None


class CatalogVerifyReport(BaseModel):
    format: int
    total: int
    passed: int
    verified: bool
    items: list[CatalogItemReport]


class SolveReport(BaseModel):
    format: int
    method: str
    assignment: dict[str, int]
    cost: int
    total_weight: int


class CaseReportBody(BaseModel):
    format: int
    case: int
    items: list[Any]
    stages: list[tuple[str, int]]
    seconds: float
    audit: Any = None
    detail: Any = None


class ReferenceDiff(BaseModel):
    matched: int
    missing: list[str]
    unexpected: list[str]
    agrees: bool


class ReproduceReport(BaseModel):
    report: CaseReportBody
    diff: ReferenceDiff
