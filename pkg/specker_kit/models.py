from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, Field, StrictFloat, StrictInt, model_validator

# Rationals travel as "p/q" strings; JSON numbers are accepted and snapped.
RationalLike = Union[StrictInt, StrictFloat, str]


# --- Input documents ---

class SixDocument(BaseModel):
    w12: RationalLike
    w23: RationalLike
    w13: RationalLike
    p1: RationalLike
    p2: RationalLike
    p3: RationalLike


class CorrelationDocument(BaseModel):
    pairs: Optional[Dict[str, List[RationalLike]]] = Field(
        None, examples=[{"12": ["1/2", 0, 0, "1/2"], "23": ["1/2", 0, 0, "1/2"], "13": ["1/2", 0, 0, "1/2"]}]
    )
    six: Optional[SixDocument] = None

    @model_validator(mode="after")
    def exactly_one_form(self):
        if (self.pairs is None) == (self.six is None):
            raise ValueError("provide exactly one of 'pairs' or 'six'")
        return self


class MeasurementSpec(BaseModel):
    name: str
    outcomes: int = Field(..., ge=1)


class ScenarioDocument(BaseModel):
    measurements: List[MeasurementSpec] = Field(..., min_length=1)
    contexts: List[List[int]] = Field(..., min_length=1, examples=[[[0, 1], [1, 2], [0, 2]]])
    # keyed by the context written as comma-separated measurement indices, e.g. "0,1"
    stats: Dict[str, List[RationalLike]]


class OnticStateDocument(BaseModel):
    weight: RationalLike
    # keyed by measurement index ("0") or name ("M1")
    responses: Dict[str, List[RationalLike]]
    joint_responses: Dict[str, List[RationalLike]] = Field(default_factory=dict)


class ModelDocument(BaseModel):
    measurements: Optional[List[MeasurementSpec]] = None
    contexts: Optional[List[List[int]]] = None
    states: List[OnticStateDocument] = Field(..., min_length=1)


class CheckRequest(BaseModel):
    correlations: CorrelationDocument
    eta0: List[RationalLike] = Field(default_factory=list)


class FineRequest(BaseModel):
    correlations: Optional[CorrelationDocument] = None
    scenario: Optional[ScenarioDocument] = None

    @model_validator(mode="after")
    def exactly_one_source(self):
        if (self.correlations is None) == (self.scenario is None):
            raise ValueError("provide exactly one of 'correlations' or 'scenario'")
        return self


# --- Report payloads ---

class ViolationModel(BaseModel):
    kind: str
    message: str
    pair: Optional[str] = None
    outcome: Optional[str] = None
    measurement: Optional[int] = None
    marginals: Optional[List[str]] = None


class ErrorResult(BaseModel):
    error: str
    location: Optional[str] = None
    violations: List[ViolationModel] = Field(default_factory=list)


class MembershipModel(BaseModel):
    member: bool
    violated: List[str]


class NCCheck(BaseModel):
    eta0: str
    violations: List[str]
    margins: Dict[str, str]


class CheckResult(BaseModel):
    pairs: Dict[str, List[str]]
    six: Dict[str, str]
    r_values: Dict[str, str]
    ks_violations: List[str]
    nc: List[NCCheck]
    polytope: MembershipModel


class VertexModel(BaseModel):
    id: int
    kind: str
    pairs: Dict[str, List[str]]
    six: Dict[str, str]
    ks_violations: List[str]


class VerticesResult(BaseModel):
    vertices: List[VertexModel]


class DecomposeResult(BaseModel):
    weights: List[str]
    support: Dict[str, str]
    extremal: bool


class CertificateModel(BaseModel):
    coefficients: List[Dict[str, str]]
    bound: str
    value: str


class FineResult(BaseModel):
    status: str
    stats: Optional[Dict[str, List[str]]] = None
    deterministic: Optional[bool] = None
    factorizable: Optional[bool] = None
    joint: Optional[Dict[str, str]] = None
    p000_interval: Optional[List[str]] = None
    certificate: Optional[CertificateModel] = None


class OntmaxResult(BaseModel):
    which: str
    etas: List[str]
    value: str
    assignments: List[str]
    closed_form: Optional[str] = None
    research_mode: bool = False


class RelabelResult(BaseModel):
    measurements: List[int]
    pairs: Dict[str, List[str]]
    six: Dict[str, str]
    r_values: Dict[str, str]


class RelabelledValue(BaseModel):
    value: Optional[float] = None
    bound: float
    violated: bool


class ScanRow(BaseModel):
    eta: float
    feasible: bool
    pair_feasible: Dict[str, bool]
    R3: Optional[float] = None
    bound: float
    violated: bool
    r3_certified: Optional[float] = None
    state: List[float]
    relabelled: Dict[str, RelabelledValue] = Field(default_factory=dict)
    error: Optional[str] = None


class QuantumScanResult(BaseModel):
    directions: List[List[float]]
    compatibility_threshold: float
    rows: List[ScanRow]
    violating_etas: List[float]


class AuditResult(BaseModel):
    generator: str
    seed: int
    samples: int
    ks_double_violations: int
    nc_double_violations: int
    nc_without_ks: int
    membership_disagreements: int
    chain_disagreements: int
    points_in_ks_polytope: int


# --- Reports ---

class Report(BaseModel):
    command: str
    inputs: Dict[str, Any] = Field(default_factory=dict)
    exit_status: int = 0


class ErrorReport(Report):
    results: ErrorResult


class CheckReport(Report):
    results: CheckResult


class VerticesReport(Report):
    results: VerticesResult


class DecomposeReport(Report):
    results: DecomposeResult


class FineReport(Report):
    results: FineResult


class OntmaxReport(Report):
    results: OntmaxResult


class RelabelReport(Report):
    results: RelabelResult


class QuantumScanReport(Report):
    results: QuantumScanResult


class AuditReport(Report):
    results: AuditResult


REPORT_MODELS = {
    "check": CheckReport,
    "vertices": VerticesReport,
    "decompose": DecomposeReport,
    "fine": FineReport,
    "ontmax": OntmaxReport,
    "relabel": RelabelReport,
    "quantum-scan": QuantumScanReport,
    "audit": AuditReport,
    "error": ErrorReport,
}
