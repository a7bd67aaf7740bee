"""
influence.py: Analytic influence measures for suspendible delegation profiles.

Potential weight, first-passage probabilities and expected weight, the chain
and star closed forms, the delegation matrix and stationary weight
distributions (structural and by power iteration).
"""
import logging
import math
from collections import deque
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from liquidweight.config import settings
from liquidweight.services.graph_core import (
    AgentId,
    Decomposition,
    DelegationProfile,
    UltimateKind,
    UltimateSet,
    decompose,
    delegators,
    suspend,
)
from liquidweight.utils.exceptions import (
    InvalidProbability,
    MissingProbability,
    NoConvergence,
    UnknownAgent,
    ValidationError,
)

logger = logging.getLogger(__name__)


def _check_probability(value: float, what: str = "probability") -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise InvalidProbability(value, f"{what} {value!r} outside [0, 1]")
    return value


class SuspendibleProfile(BaseModel):
    """A delegation profile plus each delegating agent's probability of voting directly"""
    model_config = ConfigDict(frozen=True)

    profile: DelegationProfile
    vote_prob: Dict[AgentId, float] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_probabilities(self):
        for agent, value in self.vote_prob.items():
            if agent not in self.profile.successor:
                raise UnknownAgent(agent)
            _check_probability(value, f"voting probability of {agent!r}")
        for agent in self.profile.agents:
            if not self.profile.is_endpoint(agent) and agent not in self.vote_prob:
                raise MissingProbability(agent)
        return self

    @classmethod
    def uniform(cls, profile: DelegationProfile, p: float) -> "SuspendibleProfile":
        _check_probability(p)
        return cls(profile=profile, vote_prob={a: p for a in profile.agents if not profile.is_endpoint(a)})

    @classmethod
    def with_defaults(
        cls,
        profile: DelegationProfile,
        default: float,
        overrides: Optional[Mapping[AgentId, float]] = None,
    ) -> "SuspendibleProfile":
        overrides = overrides or {}
        vote_prob = {a: overrides.get(a, default) for a in profile.agents if not profile.is_endpoint(a)}
        return cls(profile=profile, vote_prob=vote_prob)

    @property
    def agents(self) -> Tuple[AgentId, ...]:
        return self.profile.agents

    def p(self, agent: AgentId) -> float:
        """Endpoints vote with probability 1"""
        if self.profile.is_endpoint(agent):
            return 1.0
        return self.vote_prob[agent]

    def suspended(self, actors: Iterable[AgentId]) -> "SuspendibleProfile":
        profile = suspend(self.profile, actors)
        vote_prob = {a: v for a, v in self.vote_prob.items() if not profile.is_endpoint(a)}
        return SuspendibleProfile(profile=profile, vote_prob=vote_prob)


class WeightVector(BaseModel):
    model_config = ConfigDict(frozen=True)

    weights: Dict[AgentId, float]

    def __getitem__(self, agent: AgentId) -> float:
        return self.weights[agent]

    def total(self) -> float:
        return math.fsum(self.weights.values())


class DelegationMatrix(BaseModel):
    """Row-stochastic matrix P(ij) over agents in sorted order"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    agents: Tuple[AgentId, ...]
    entries: np.ndarray

    def index(self, agent: AgentId) -> int:
        return self.agents.index(agent)

    def row_sums(self) -> np.ndarray:
        return self.entries.sum(axis=1)


class StationaryResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    distribution: Dict[AgentId, float]
    scaled_weight: Dict[AgentId, float]
    iterations: int = 0


# --- Potential weight -------------------------------------------------------

def _subtree_sizes(profile: DelegationProfile) -> Tuple[Dict[AgentId, int], Decomposition]:
    decomposition = decompose(profile)
    proxies = decomposition.proxies
    size = {agent: 1 for agent in profile.agents}
    # deepest first, so every child is complete before it is added to its parent
    for agent in sorted(profile.agents, key=lambda a: -proxies[a].distance):
        if proxies[agent].distance > 0:
            size[profile.successor[agent]] += size[agent]
    return size, decomposition


def potential_weight(profile: DelegationProfile) -> WeightVector:
    """
    Ballots each agent would cast if everyone upstream abstained.

    Non-ultimate agents count their own delegation subtree. Every member of an
    ultimate set is credited with the whole basin of that set, so all members
    of a cycle share the cycle's full weight.
    """
    size, decomposition = _subtree_sizes(profile)
    basin_size: Dict = {}
    for up in decomposition.proxies.values():
        basin_size[up.ultimate_set] = basin_size.get(up.ultimate_set, 0) + 1
    weights = {}
    for agent in profile.agents:
        up = decomposition.proxies[agent]
        weights[agent] = float(basin_size[up.ultimate_set] if up.distance == 0 else size[agent])
    return WeightVector(weights=weights)


def potential_weight_per_entry(profile: DelegationProfile) -> WeightVector:
    """
    Debug variant: a cycle member only counts itself plus the agents that
    enter the cycle at it (their D* is that member).
    """
    size, decomposition = _subtree_sizes(profile)
    incoming = delegators(profile)
    weights = {}
    for agent in profile.agents:
        up = decomposition.proxies[agent]
        if up.distance == 0:
            weights[agent] = float(1 + sum(
                size[d] for d in incoming[agent] if decomposition.proxies[d].distance > 0
            ))
        else:
            weights[agent] = float(size[agent])
    return WeightVector(weights=weights)


# --- First passage and expected weight -------------------------------------

def _in_tree(profile: DelegationProfile, target: AgentId) -> List[Tuple[AgentId, AgentId]]:
    """(agent, successor) pairs of the target's in-tree, parents before children"""
    incoming = delegators(profile)
    order: List[Tuple[AgentId, AgentId]] = []
    queue = deque([target])
    while queue:
        node = queue.popleft()
        for child in incoming[node]:
            if child != target:
                order.append((child, node))
                queue.append(child)
    return order


def first_passage(sp: SuspendibleProfile, target: AgentId) -> Dict[AgentId, float]:
    """
    Probability that each other agent's weight reaches the target, given the
    target votes: the product of (1 - p) over the delegating agents on the
    path. The target's own outgoing delegation is suspended first.
    """
    sp.profile.proxy(target)
    suspended = suspend(sp.profile, {target})
    reach = {agent: 0.0 for agent in sp.agents if agent != target}
    carried = {target: 1.0}
    for agent, parent in _in_tree(suspended, target):
        carried[agent] = (1.0 - sp.vote_prob[agent]) * carried[parent]
        reach[agent] = carried[agent]
    return reach


def expected_weight(sp: SuspendibleProfile, target: AgentId) -> float:
    """Expected ballots the target casts when it votes"""
    return 1.0 + math.fsum(first_passage(sp, target).values())


def expected_weights(sp: SuspendibleProfile) -> WeightVector:
    return WeightVector(weights={agent: expected_weight(sp, agent) for agent in sp.agents})


def _check_open_probability(p: float) -> float:
    p = _check_probability(p)
    if p == 0.0:
        raise InvalidProbability(p, "probability must be positive for unbounded chains")
    return p


def expected_weight_chain(n: int, p: float) -> float:
    """Terminal voter of a single chain with n delegators: (1 - (1-p)^(n+1)) / p"""
    if n < 0:
        raise ValidationError(f"chain length must be non-negative, got {n}")
    p = _check_probability(p)
    if p == 0.0:
        return float(n + 1)
    return (1.0 - (1.0 - p) ** (n + 1)) / p


def expected_weight_chain_limit(p: float) -> float:
    return 1.0 / _check_open_probability(p)


def expected_weight_star(k: int, p: float) -> float:
    """Hub with k direct delegators: 1 + k(1 - p)"""
    if k < 0:
        raise ValidationError(f"number of delegators must be non-negative, got {k}")
    return 1.0 + k * (1.0 - _check_probability(p))


def path_contribution(length: int, p: float) -> float:
    """Contribution of one maximal chain of the given length: sum of (1-p)^k, k = 1..length"""
    if length < 1:
        raise ValidationError(f"path length must be at least 1, got {length}")
    p = _check_open_probability(p)
    q = 1.0 - p
    return q * (1.0 - q ** length) / p


def path_contribution_limit(p: float) -> float:
    p = _check_open_probability(p)
    return (1.0 - p) / p


def maximal_path_count(profile: DelegationProfile, target: AgentId) -> int:
    """Number of maximal delegation paths ending at the target (leaves of its in-tree)"""
    profile.proxy(target)
    suspended = suspend(profile, {target})
    incoming = delegators(suspended)
    return sum(1 for agent, _ in _in_tree(suspended, target) if not incoming[agent])


def path_bound(sp: SuspendibleProfile, target: AgentId) -> float:
    """Upper bound 1 + f(t)(1 - p_min)/p_min on the target's expected weight"""
    tree = _in_tree(suspend(sp.profile, {target}), target)
    if not tree:
        return 1.0
    p_min = min(sp.vote_prob[agent] for agent, _ in tree)
    if p_min == 0.0:
        return math.inf
    return 1.0 + maximal_path_count(sp.profile, target) * (1.0 - p_min) / p_min


def expected_votes_cast(sp: SuspendibleProfile, turnout: Optional[Mapping[AgentId, float]] = None) -> float:
    """
    Expected number of ballots cast across all agents.

    An agent's turnout is its voting probability; endpoints turn out with
    probability 1 unless `turnout` lowers it. Votes that only reach abstaining
    agents are lost.
    """
    turnout = dict(turnout or {})
    for agent, value in turnout.items():
        if not sp.profile.is_endpoint(agent):
            raise ValidationError(f"turnout override only applies to endpoints, got {agent!r}")
        _check_probability(value, f"turnout of {agent!r}")
    total = []
    for agent in sp.agents:
        chance = turnout.get(agent, sp.p(agent))
        if chance > 0.0:
            total.append(chance * expected_weight(sp, agent))
    return math.fsum(total)


# --- Delegation matrix and stationary weight -------------------------------

def delegation_matrix(sp: SuspendibleProfile) -> DelegationMatrix:
    agents = sp.agents
    index = {agent: i for i, agent in enumerate(agents)}
    entries = np.zeros((len(agents), len(agents)))
    for agent in agents:
        i = index[agent]
        proxy = sp.profile.successor[agent]
        if proxy == agent:
            entries[i, i] = 1.0
        else:
            p = sp.vote_prob[agent]
            entries[i, i] = p
            entries[i, index[proxy]] = 1.0 - p
    return DelegationMatrix(agents=agents, entries=entries)


def _stationary_result(agents, distribution: np.ndarray, iterations: int = 0) -> StationaryResult:
    n = len(agents)
    return StationaryResult(
        distribution={a: float(v) for a, v in zip(agents, distribution)},
        scaled_weight={a: float(v) * n for a, v in zip(agents, distribution)},
        iterations=iterations,
    )


def stationary_analytic(sp: SuspendibleProfile) -> StationaryResult:
    """
    Structural stationary distribution from the uniform start.

    Agents that keep their mass are endpoints and delegators with p = 1; each
    agent's 1/n share settles on the first of them along its delegation path.
    Shares that reach a cycle without one are pooled per cycle and split in
    proportion to 1/(1 - p_i), which balances the flow around the cycle and
    reduces to an equal split when the members share one probability.
    """
    decomposition = decompose(sp.profile)
    agents = sp.agents
    n = sp.profile.n
    index = {agent: i for i, agent in enumerate(agents)}
    successor = sp.profile.successor
    absorbing = {a for a in agents if sp.profile.is_endpoint(a) or sp.vote_prob[a] == 1.0}

    # agent -> absorbing agent, or the cycle its share circulates in
    settles: Dict[AgentId, Union[AgentId, UltimateSet]] = {}
    for start in agents:
        path: List[AgentId] = []
        on_path = set()
        node = start
        while node not in settles and node not in absorbing and node not in on_path:
            on_path.add(node)
            path.append(node)
            node = successor[node]
        if node in settles:
            outcome = settles[node]
        elif node in absorbing:
            outcome = node
        else:
            outcome = decomposition.proxies[node].ultimate_set
        for agent in path:
            settles[agent] = outcome
        settles.setdefault(node, outcome)

    mass = np.zeros(n)
    pooled: Dict[UltimateSet, int] = {}
    for agent in agents:
        outcome = settles[agent]
        if isinstance(outcome, str):
            mass[index[outcome]] += 1.0
        else:
            pooled[outcome] = pooled.get(outcome, 0) + 1
    for cycle, count in pooled.items():
        members = sorted(cycle.members)
        inverse = [1.0 / (1.0 - sp.vote_prob[m]) for m in members]
        total = math.fsum(inverse)
        for member, share in zip(members, inverse):
            mass[index[member]] += count * share / total
    return _stationary_result(agents, mass / n)


def stationary_iterative(
    sp: SuspendibleProfile,
    tolerance: Optional[float] = None,
    max_iters: Optional[int] = None,
) -> StationaryResult:
    """
    Power iteration x <- xP from the uniform vector.

    Mass in transit leaves an agent at rate 1 - p, so a step of size d can
    leave up to d / (1 - rho) still to move, rho being the largest voting
    probability below 1. Iteration stops once that remaining distance is
    under `tolerance` in max-norm. The average of the last two iterates is
    tested as well, which settles period-2 oscillation in cycles whose
    members never vote.
    """
    tolerance = settings.tolerance if tolerance is None else tolerance
    max_iters = settings.max_iters if max_iters is None else max_iters
    if tolerance <= 0:
        raise ValidationError(f"tolerance must be positive, got {tolerance}")

    matrix = delegation_matrix(sp).entries
    n = sp.profile.n
    rho = max((sp.p(a) for a in sp.agents if sp.p(a) < 1.0), default=0.0)
    # below this, steps are rounding noise
    threshold = max(tolerance * (1.0 - rho), n * np.finfo(np.float64).eps)
    current = np.full(n, 1.0 / n)
    previous_average = None
    for iteration in range(1, max_iters + 1):
        following = current @ matrix
        if np.max(np.abs(following - current)) < threshold:
            logger.debug(f"Power iteration converged after {iteration} iterations")
            return _stationary_result(sp.agents, following, iteration)
        average = (current + following) / 2.0
        if previous_average is not None and np.max(np.abs(average - previous_average)) < threshold:
            logger.debug(f"Power iteration settled on the two-step average after {iteration} iterations")
            return _stationary_result(sp.agents, average, iteration)
        current, previous_average = following, average

    raise NoConvergence(
        f"Power iteration did not converge within {max_iters} iterations; "
        "either a cycle whose members never vote makes the chain periodic "
        "or a voting probability close to 1 needs a larger --max-iters"
    )


def cycle_members(sp: SuspendibleProfile) -> List[AgentId]:
    decomposition = decompose(sp.profile)
    return sorted(
        member
        for u in decomposition.ultimate_sets if u.kind is UltimateKind.CYCLE
        for member in u.members
    )
