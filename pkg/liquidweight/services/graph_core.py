"""
graph_core.py: Delegation profiles, scoped delegation overlays, ultimate sets,
ultimate proxies, delegation distances and suspension.

A profile is a total successor map; an agent whose successor is itself is an
endpoint. Every function here is pure and every model is frozen.
"""
import logging
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Mapping, NamedTuple, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from liquidweight.utils.exceptions import (
    DuplicateDelegator,
    DuplicateScope,
    EmptyUniverse,
    MissingIssue,
    SelfDelegation,
    UnknownAgent,
    UnknownIssue,
)

logger = logging.getLogger(__name__)

AgentId = str


class ScopeKind(str, Enum):
    """Delegation scope levels, from least to most specific"""
    GLOBAL = "global"
    AREA = "area"
    ISSUE = "issue"


class Scope(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: ScopeKind
    ref: Optional[str] = None

    @model_validator(mode="after")
    def _check_ref(self):
        if (self.kind is ScopeKind.GLOBAL) != (self.ref is None):
            raise ValueError("global scope takes no reference; area and issue scopes need one")
        return self

    @classmethod
    def global_(cls) -> "Scope":
        return cls(kind=ScopeKind.GLOBAL)

    @classmethod
    def area(cls, area_id: str) -> "Scope":
        return cls(kind=ScopeKind.AREA, ref=area_id)

    @classmethod
    def issue(cls, issue_id: str) -> "Scope":
        return cls(kind=ScopeKind.ISSUE, ref=issue_id)

    def __str__(self) -> str:
        return self.kind.value if self.ref is None else f"{self.kind.value}:{self.ref}"


class ScopedDelegation(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    source: AgentId = Field(alias="from")
    target: AgentId = Field(alias="to")
    scope: Scope = Field(default_factory=Scope.global_)

    @model_validator(mode="after")
    def _no_self_delegation(self):
        if self.source == self.target:
            raise SelfDelegation(self.source)
        return self


class DelegationOverlay(BaseModel):
    """Global, policy-area and issue delegations over one agent universe"""
    model_config = ConfigDict(frozen=True)

    universe: FrozenSet[AgentId]
    delegations: Tuple[ScopedDelegation, ...] = ()
    area_of: Dict[str, str] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_integrity(self):
        if not self.universe:
            raise EmptyUniverse()
        seen = set()
        for delegation in self.delegations:
            for agent in (delegation.source, delegation.target):
                if agent not in self.universe:
                    raise UnknownAgent(agent)
            if delegation.scope.kind is ScopeKind.ISSUE and delegation.scope.ref not in self.area_of:
                raise UnknownIssue(delegation.scope.ref)
            key = (delegation.source, delegation.scope)
            if key in seen:
                raise DuplicateScope(delegation.source, str(delegation.scope))
            seen.add(key)
        return self

    @property
    def issues(self) -> List[str]:
        return sorted(self.area_of)

    @property
    def is_flat(self) -> bool:
        return all(d.scope.kind is ScopeKind.GLOBAL for d in self.delegations)


class DelegationProfile(BaseModel):
    """Total successor map; successor(i) == i marks i as an endpoint"""
    model_config = ConfigDict(frozen=True)

    successor: Dict[AgentId, AgentId]

    @model_validator(mode="before")
    @classmethod
    def _sort_agents(cls, data):
        if isinstance(data, dict) and isinstance(data.get("successor"), Mapping):
            succ = data["successor"]
            data = {**data, "successor": {agent: succ[agent] for agent in sorted(succ)}}
        return data

    @model_validator(mode="after")
    def _check_total(self):
        if not self.successor:
            raise EmptyUniverse()
        for agent, proxy in self.successor.items():
            if proxy not in self.successor:
                raise UnknownAgent(proxy)
        return self

    @property
    def agents(self) -> Tuple[AgentId, ...]:
        return tuple(self.successor)

    @property
    def n(self) -> int:
        return len(self.successor)

    def proxy(self, agent: AgentId) -> AgentId:
        try:
            return self.successor[agent]
        except KeyError:
            raise UnknownAgent(agent) from None

    def is_endpoint(self, agent: AgentId) -> bool:
        return self.proxy(agent) == agent

    def edges(self) -> List[Tuple[AgentId, AgentId]]:
        """Delegations proper (self-loops omitted)"""
        return [(a, b) for a, b in self.successor.items() if a != b]

    def require(self, agents: Iterable[AgentId]) -> FrozenSet[AgentId]:
        agents = frozenset(agents)
        for agent in agents:
            if agent not in self.successor:
                raise UnknownAgent(agent)
        return agents


class UltimateKind(str, Enum):
    ENDPOINT = "endpoint"
    CYCLE = "cycle"


class UltimateSet(BaseModel):
    """Minimal X with D(X) = X: an endpoint or a delegation cycle"""
    model_config = ConfigDict(frozen=True)

    members: FrozenSet[AgentId]
    kind: UltimateKind
    # cycle order, starting from the smallest member
    order: Tuple[AgentId, ...]

    @property
    def size(self) -> int:
        return len(self.members)


class UltimateProxy(NamedTuple):
    ultimate_set: UltimateSet
    entry: AgentId
    distance: int


class Decomposition(NamedTuple):
    """Per-agent ultimate proxy information from one linear pass"""
    profile: DelegationProfile
    proxies: Dict[AgentId, UltimateProxy]
    ultimate_sets: Tuple[UltimateSet, ...]

    def basin(self, ultimate_set: UltimateSet) -> List[AgentId]:
        """Agents whose delegation path ends in the given ultimate set"""
        return [a for a, up in self.proxies.items() if up.ultimate_set == ultimate_set]

    def is_ultimate(self, agent: AgentId) -> bool:
        return self.proxies[agent].distance == 0


def build_profile(
    universe: Iterable[AgentId],
    edges: Union[Mapping[AgentId, AgentId], Iterable[Tuple[AgentId, AgentId]]],
) -> DelegationProfile:
    """
    Build a total profile; agents without an edge become endpoints.

    `edges` is a mapping or an iterable of (from, to) pairs; pairs allow the
    duplicate-delegator check.
    """
    universe = set(universe)
    if not universe:
        raise EmptyUniverse()
    pairs = edges.items() if isinstance(edges, Mapping) else edges
    successor = {agent: agent for agent in universe}
    assigned = set()
    for source, target in pairs:
        for agent in (source, target):
            if agent not in universe:
                raise UnknownAgent(agent)
        if source in assigned:
            raise DuplicateDelegator(source)
        assigned.add(source)
        successor[source] = target
    return DelegationProfile(successor=successor)


def consolidate(overlay: DelegationOverlay, issue: str) -> DelegationProfile:
    """Most specific delegation per agent for the issue: issue, then area, then global"""
    if issue not in overlay.area_of:
        raise UnknownIssue(issue)
    area = overlay.area_of[issue]
    rank = {Scope.issue(issue): 0, Scope.area(area): 1, Scope.global_(): 2}
    chosen: Dict[AgentId, Tuple[int, AgentId]] = {}
    for delegation in overlay.delegations:
        level = rank.get(delegation.scope)
        if level is None:
            continue
        current = chosen.get(delegation.source)
        if current is None or level < current[0]:
            chosen[delegation.source] = (level, delegation.target)
    profile = build_profile(overlay.universe, {a: target for a, (_, target) in chosen.items()})
    logger.debug(f"Consolidated issue {issue} (area {area}): {len(profile.edges())} delegations")
    return profile


def consolidate_all(overlay: DelegationOverlay) -> Dict[str, DelegationProfile]:
    return {issue: consolidate(overlay, issue) for issue in overlay.issues}


def global_profile(overlay: DelegationOverlay) -> DelegationProfile:
    """Flat profile of an overlay that only has global delegations"""
    if not overlay.is_flat:
        raise MissingIssue()
    return build_profile(overlay.universe, [(d.source, d.target) for d in overlay.delegations])


def recall(overlay: DelegationOverlay, agent: AgentId, scope: Scope) -> DelegationOverlay:
    """Overlay without the agent's delegation at the given scope"""
    remaining = tuple(d for d in overlay.delegations if not (d.source == agent and d.scope == scope))
    if len(remaining) == len(overlay.delegations):
        raise UnknownAgent(agent, context=f"delegators at scope {scope}")
    return overlay.model_copy(update={"delegations": remaining})


def suspend(profile: DelegationProfile, actors: Iterable[AgentId]) -> DelegationProfile:
    """Actors act directly, so their outgoing delegations are suspended"""
    actors = profile.require(actors)
    if not actors:
        return profile
    successor = {a: (a if a in actors else proxy) for a, proxy in profile.successor.items()}
    return DelegationProfile(successor=successor)


def suspend_for_activity(
    profile: DelegationProfile,
    actors_by_activity: Mapping[str, Iterable[AgentId]],
    activity: str,
) -> DelegationProfile:
    """Suspension is per activity: only the actors of `activity` are suspended"""
    return suspend(profile, actors_by_activity.get(activity, ()))


def decompose(profile: DelegationProfile) -> Decomposition:
    """
    Functional-graph walk with visited marking. Each agent is visited once;
    a walk that closes on itself yields a new ultimate set, a walk that hits
    an already resolved agent inherits its ultimate proxy.
    """
    proxies: Dict[AgentId, UltimateProxy] = {}
    found: List[UltimateSet] = []
    succ = profile.successor

    for start in profile.agents:
        if start in proxies:
            continue
        path: List[AgentId] = []
        position: Dict[AgentId, int] = {}
        node = start
        while node not in proxies and node not in position:
            position[node] = len(path)
            path.append(node)
            node = succ[node]

        if node in position:
            loop = path[position[node]:]
            pivot = loop.index(min(loop))
            order = tuple(loop[pivot:] + loop[:pivot])
            kind = UltimateKind.ENDPOINT if len(loop) == 1 else UltimateKind.CYCLE
            ultimate = UltimateSet(members=frozenset(loop), kind=kind, order=order)
            found.append(ultimate)
            for member in loop:
                proxies[member] = UltimateProxy(ultimate, member, 0)
            path = path[:position[node]]

        for agent in reversed(path):
            nxt = proxies[succ[agent]]
            proxies[agent] = UltimateProxy(nxt.ultimate_set, nxt.entry, nxt.distance + 1)

    found.sort(key=lambda u: u.order[0])
    return Decomposition(profile, proxies, tuple(found))


def ultimate_sets(profile: DelegationProfile) -> FrozenSet[UltimateSet]:
    return frozenset(decompose(profile).ultimate_sets)


def ultimate_proxy(profile: DelegationProfile, agent: AgentId) -> UltimateProxy:
    """(ultimate set, entry agent D*(agent), steps to reach it)"""
    profile.proxy(agent)
    return decompose(profile).proxies[agent]


def delegation_path(profile: DelegationProfile, agent: AgentId) -> List[AgentId]:
    """Unique path from the agent to its entry agent, both inclusive"""
    entry = ultimate_proxy(profile, agent).entry
    path = [agent]
    while path[-1] != entry:
        path.append(profile.successor[path[-1]])
    return path


def delegation_distance(profile: DelegationProfile, source: AgentId, target: AgentId) -> Optional[int]:
    """Steps along the unique delegation path from source to the first visit of target"""
    profile.require((source, target))
    node, steps, seen = source, 0, set()
    while node != target:
        if node in seen:
            return None
        seen.add(node)
        node = profile.successor[node]
        steps += 1
    return steps


def delegators(profile: DelegationProfile) -> Dict[AgentId, List[AgentId]]:
    """Reverse adjacency: direct delegators of each agent (self-loops excluded)"""
    incoming: Dict[AgentId, List[AgentId]] = {agent: [] for agent in profile.agents}
    for source, target in profile.edges():
        incoming[target].append(source)
    return incoming
