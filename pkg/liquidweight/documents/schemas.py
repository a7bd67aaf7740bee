"""
schemas.py: Pydantic schemas for graph documents and analysis reports.
"""
from typing import Dict, List, Literal, Mapping, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from liquidweight.services.graph_core import (
    DelegationOverlay,
    DelegationProfile,
    Scope,
    ScopedDelegation,
    consolidate,
    global_profile,
)
from liquidweight.services.influence import SuspendibleProfile
from liquidweight.utils.exceptions import (
    InvalidProbability,
    MissingIssue,
    UnknownAgent,
    ValidationError,
)


class AreaRef(BaseModel):
    model_config = ConfigDict(extra="forbid")

    area: str


class IssueRef(BaseModel):
    model_config = ConfigDict(extra="forbid")

    issue: str


ScopeRef = Union[Literal["global"], AreaRef, IssueRef]


class DelegationEntry(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    source: str = Field(alias="from")
    target: str = Field(alias="to")
    scope: ScopeRef = "global"

    def to_scope(self) -> Scope:
        if isinstance(self.scope, AreaRef):
            return Scope.area(self.scope.area)
        if isinstance(self.scope, IssueRef):
            return Scope.issue(self.scope.issue)
        return Scope.global_()


class GraphDocument(BaseModel):
    """Serialized delegation overlay plus voting probabilities"""
    model_config = ConfigDict(extra="forbid")

    agents: List[str]
    delegations: List[DelegationEntry] = []
    areas: Dict[str, str] = {}           # issue id -> policy area id
    probabilities: Dict[str, float] = {}
    default_probability: Optional[float] = None

    @model_validator(mode="after")
    def _check_references(self):
        if len(set(self.agents)) != len(self.agents):
            duplicates = sorted({a for a in self.agents if self.agents.count(a) > 1})
            raise ValidationError(f"Agents listed more than once: {', '.join(duplicates)}", code="duplicate-agent")
        known = set(self.agents)
        for agent, value in self.probabilities.items():
            if agent not in known:
                raise UnknownAgent(agent)
            if not 0.0 <= value <= 1.0:
                raise InvalidProbability(
                    value, f"Probability {value!r} for {agent!r} outside [0, 1]", code="probability-out-of-range"
                )
        if self.default_probability is not None and not 0.0 <= self.default_probability <= 1.0:
            raise InvalidProbability(
                self.default_probability,
                f"default_probability {self.default_probability!r} outside [0, 1]",
                code="probability-out-of-range",
            )
        # referential integrity of the delegations themselves
        self.to_overlay()
        return self

    def to_overlay(self) -> DelegationOverlay:
        return DelegationOverlay(
            universe=frozenset(self.agents),
            delegations=tuple(
                ScopedDelegation(source=d.source, target=d.target, scope=d.to_scope()) for d in self.delegations
            ),
            area_of=dict(self.areas),
        )

    def to_profile(self, issue: Optional[str] = None) -> DelegationProfile:
        overlay = self.to_overlay()
        if issue is None:
            if not overlay.is_flat:
                raise MissingIssue()
            return global_profile(overlay)
        return consolidate(overlay, issue)

    def to_suspendible(
        self,
        issue: Optional[str] = None,
        uniform: Optional[float] = None,
        overrides: Optional[Mapping[str, float]] = None,
        fallback: float = 0.5,
    ) -> SuspendibleProfile:
        """
        Probability precedence: a uniform value replaces the document's
        probabilities; per-agent overrides always apply last.
        """
        profile = self.to_profile(issue)
        if uniform is not None:
            default, per_agent = uniform, {}
        else:
            default = fallback if self.default_probability is None else self.default_probability
            per_agent = dict(self.probabilities)
        per_agent.update(overrides or {})
        return SuspendibleProfile.with_defaults(profile, default, per_agent)


class MonteCarloCell(BaseModel):
    estimate: float
    std_error: float


class ReportRow(BaseModel):
    agent: str
    potential: float
    expected: float
    stationary_scaled: float
    monte_carlo: Optional[MonteCarloCell] = None


class ReportMetadata(BaseModel):
    n: int
    probability_model: str
    seed: Optional[int] = None
    samples: Optional[int] = None
    tolerance: float
    issue: Optional[str] = None


class ReportDocument(BaseModel):
    rows: List[ReportRow]
    metadata: ReportMetadata


class OracleComparison(BaseModel):
    target: str
    psi: float
    phi_exact: float
    abs_diff: float


class StationaryRow(BaseModel):
    agent: str
    analytic: float
    iterative: float
    scaled: float


class StationaryMetadata(BaseModel):
    n: int
    tolerance: float
    iterations: int
    max_abs_diff: float
    max_row_sum_error: float
    issue: Optional[str] = None


class StationaryReport(BaseModel):
    rows: List[StationaryRow]
    metadata: StationaryMetadata
