"""
lottery_sim.py: Probabilistic oracles for expected weight.

A suspendible profile is a lottery over delegation graphs: every delegating
agent independently votes (suspending its delegation) with probability p_i.
This module realizes single draws, tallies them, enumerates every outcome
exactly and estimates expected weight by seeded Monte Carlo.

Randomness: sample k of a run with seed s reads the Philox-4x64 counter blocks
[k*b, (k+1)*b) under key s, b = ceil(n/4). Each raw 64-bit output becomes a
double in [0, 1) via (raw >> 11) * 2**-53 and agent i (sorted order) votes iff
its double is below p_i. Samples therefore do not depend on evaluation order
or on the number of workers.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from liquidweight.config import settings
from liquidweight.services.graph_core import AgentId, DelegationProfile, delegators, suspend
from liquidweight.services.influence import SuspendibleProfile
from liquidweight.utils.exceptions import TooLarge, ValidationError

logger = logging.getLogger(__name__)

_UINT64 = 2 ** 64
_TO_UNIT = 2.0 ** -53


class RealizedGraph(BaseModel):
    """One draw from the lottery: the sampled profile and the agents who vote"""
    model_config = ConfigDict(frozen=True)

    profile: DelegationProfile
    voters: FrozenSet[AgentId]

    @model_validator(mode="after")
    def _voters_are_self_loops(self):
        for voter in self.voters:
            if not self.profile.is_endpoint(voter):
                raise ValidationError(f"voter {voter!r} still delegates in the realized graph")
        return self


class TallyResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    cast: Dict[AgentId, int]
    lost: int = 0

    @property
    def total(self) -> int:
        return sum(self.cast.values()) + self.lost


class MonteCarloResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    estimate: float
    std_error: float = Field(ge=0.0)
    samples: int = Field(ge=1)
    seed: int


# --- Single draws -----------------------------------------------------------

def draw_uniforms(seed: int, first_sample: int, count: int, n: int) -> np.ndarray:
    """(count, n) uniforms of samples first_sample .. first_sample+count-1"""
    if not 0 <= seed < _UINT64:
        raise ValidationError(f"seed must be an unsigned 64-bit integer, got {seed}")
    blocks = -(-n // 4)
    generator = np.random.Philox(key=seed, counter=first_sample * blocks)
    raw = generator.random_raw(count * blocks * 4).reshape(count, blocks * 4)[:, :n]
    return (raw >> np.uint64(11)).astype(np.float64) * _TO_UNIT


def _trial_probabilities(
    sp: SuspendibleProfile,
    forced_voters: FrozenSet[AgentId],
    turnout: Mapping[AgentId, float],
) -> Dict[AgentId, float]:
    """Agents whose voting is random, with their voting probability"""
    trials = {}
    for agent in sp.agents:
        if agent in forced_voters:
            continue
        if sp.profile.is_endpoint(agent):
            if agent in turnout:
                trials[agent] = float(turnout[agent])
        else:
            trials[agent] = sp.vote_prob[agent]
    return trials


def _realized(sp: SuspendibleProfile, voters: Iterable[AgentId], abstaining: Iterable[AgentId]) -> RealizedGraph:
    profile = suspend(sp.profile, voters) if voters else sp.profile
    return RealizedGraph(profile=profile, voters=frozenset(voters) | (
        frozenset(a for a in sp.agents if sp.profile.is_endpoint(a)) - frozenset(abstaining)
    ))


def realize(
    sp: SuspendibleProfile,
    uniforms: Sequence[float],
    forced_voters: Iterable[AgentId] = (),
    turnout: Optional[Mapping[AgentId, float]] = None,
) -> RealizedGraph:
    """Deterministic draw: agent i (sorted order) votes iff uniforms[i] < p_i"""
    forced = sp.profile.require(forced_voters)
    trials = _trial_probabilities(sp, forced, turnout or {})
    voters = set(forced)
    abstaining = set()
    for index, agent in enumerate(sp.agents):
        if agent not in trials:
            continue
        if uniforms[index] < trials[agent]:
            voters.add(agent)
        elif sp.profile.is_endpoint(agent):
            abstaining.add(agent)
    return _realized(sp, voters, abstaining)


def sample_graph(
    sp: SuspendibleProfile,
    rng_state: np.random.Generator,
    forced_voters: Iterable[AgentId] = (),
) -> RealizedGraph:
    return realize(sp, rng_state.random(sp.profile.n), forced_voters)


def tally(realized: RealizedGraph) -> TallyResult:
    """
    Every ballot travels the realized delegation path to the first voter; a
    path that closes on itself without meeting a voter loses the ballot.
    """
    succ = realized.profile.successor
    resolved: Dict[AgentId, Optional[AgentId]] = {v: v for v in realized.voters}
    for start in realized.profile.agents:
        path: List[AgentId] = []
        on_path = set()
        node = start
        while node not in resolved and node not in on_path:
            on_path.add(node)
            path.append(node)
            node = succ[node]
        outcome = resolved.get(node) if node in resolved else None
        for agent in path:
            resolved[agent] = outcome

    cast = {v: 0 for v in realized.voters}
    lost = 0
    for agent in realized.profile.agents:
        voter = resolved[agent]
        if voter is None:
            lost += 1
        else:
            cast[voter] += 1
    return TallyResult(cast=dict(sorted(cast.items())), lost=lost)


# --- Exact enumeration ------------------------------------------------------

def _guard(m: int, limit: Optional[int]) -> None:
    limit = settings.enumeration_limit if limit is None else limit
    if m > limit:
        raise TooLarge(
            f"{m} Bernoulli trials exceed the enumeration guard of {limit}; "
            "use Monte Carlo sampling (`sample`) instead"
        )


def enumerate_outcomes(
    sp: SuspendibleProfile,
    forced_voters: Iterable[AgentId] = (),
    turnout: Optional[Mapping[AgentId, float]] = None,
    limit: Optional[int] = None,
) -> Iterator[Tuple[float, RealizedGraph]]:
    """Every outcome of the Bernoulli trials with its probability"""
    forced = sp.profile.require(forced_voters)
    trials = _trial_probabilities(sp, forced, turnout or {})
    _guard(len(trials), limit)
    agents = list(trials)
    for outcome in range(2 ** len(agents)):
        probability = 1.0
        voters = set(forced)
        abstaining = set()
        for bit, agent in enumerate(agents):
            if outcome >> bit & 1:
                probability *= trials[agent]
                voters.add(agent)
            else:
                probability *= 1.0 - trials[agent]
                if sp.profile.is_endpoint(agent):
                    abstaining.add(agent)
        if probability > 0.0:
            yield probability, _realized(sp, voters, abstaining)


class _TargetTree:
    """The target's in-tree after suspending it, as column indices in agent order"""

    def __init__(self, sp: SuspendibleProfile, target: AgentId):
        sp.profile.proxy(target)
        index = {agent: i for i, agent in enumerate(sp.agents)}
        suspended = suspend(sp.profile, {target})
        incoming = delegators(suspended)
        self.target = index[target]
        self.members: List[Tuple[int, int, float]] = []
        frontier = [target]
        while frontier:
            node = frontier.pop()
            for child in incoming[node]:
                self.members.append((index[child], index[node], sp.vote_prob[child]))
                frontier.append(child)

    def weights(self, votes: np.ndarray) -> np.ndarray:
        """Ballots reaching the target for each row of a (rows, n) boolean vote matrix"""
        reach = {self.target: np.ones(votes.shape[0], dtype=bool)}
        count = np.ones(votes.shape[0])
        for child, parent, _ in self.members:
            reach[child] = reach[parent] & ~votes[:, child]
            count += reach[child]
        return count


def enumerate_expected_weight(
    sp: SuspendibleProfile,
    target: AgentId,
    limit: Optional[int] = None,
    chunk_size: int = 1 << 16,
) -> float:
    """
    Exact expected weight of the target over all 2^m outcomes of the
    delegating agents' trials (the target itself is forced to vote).

    Trials of agents outside the target's in-tree never change its weight and
    sum out to probability one, so only in-tree outcomes are generated.
    """
    tree = _TargetTree(sp, target)
    n = sp.profile.n
    _guard(sum(1 for a in sp.agents if not sp.profile.is_endpoint(a) and a != target), limit)
    columns = sorted(child for child, _, _ in tree.members)
    m = len(columns)
    p = np.array([sp.vote_prob[sp.agents[i]] for i in columns])
    shifts = np.arange(m, dtype=np.int64)
    logger.debug(f"Enumerating {2 ** m} in-tree outcomes for target {target}")

    partial = []
    for start in range(0, 2 ** m, chunk_size):
        outcomes = np.arange(start, min(start + chunk_size, 2 ** m), dtype=np.int64)
        bits = ((outcomes[:, None] >> shifts) & 1).astype(bool)
        probability = np.prod(np.where(bits, p, 1.0 - p), axis=1)
        votes = np.zeros((len(outcomes), n), dtype=bool)
        votes[:, columns] = bits
        partial.append(float(np.dot(probability, tree.weights(votes))))
    return math.fsum(partial)


def enumerate_expected_votes_cast(
    sp: SuspendibleProfile,
    turnout: Optional[Mapping[AgentId, float]] = None,
    limit: Optional[int] = None,
) -> float:
    """Expected ballots cast across all agents, by brute force over the lottery"""
    n = sp.profile.n
    return math.fsum(
        probability * (n - tally(realized).lost)
        for probability, realized in enumerate_outcomes(sp, turnout=turnout, limit=limit)
    )


# --- Monte Carlo ------------------------------------------------------------

def sample_weights(sp: SuspendibleProfile, target: AgentId, seed: int, first_sample: int, count: int) -> np.ndarray:
    """Target's weight in samples first_sample .. first_sample+count-1 (target forced to vote)"""
    tree = _TargetTree(sp, target)
    uniforms = draw_uniforms(seed, first_sample, count, sp.profile.n)
    p = np.array([sp.p(agent) for agent in sp.agents])
    return tree.weights(uniforms < p)


def monte_carlo_expected_weight(
    sp: SuspendibleProfile,
    target: AgentId,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
    chunk_size: Optional[int] = None,
) -> MonteCarloResult:
    samples = settings.samples if samples is None else samples
    seed = settings.seed if seed is None else seed
    workers = settings.workers if workers is None else workers
    chunk_size = settings.chunk_size if chunk_size is None else chunk_size
    if samples < 2:
        raise ValidationError(f"at least 2 samples are needed, got {samples}")
    sp.profile.proxy(target)

    starts = list(range(0, samples, chunk_size))

    def run(start: int) -> np.ndarray:
        return sample_weights(sp, target, seed, start, min(chunk_size, samples - start))

    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(run, starts))
    else:
        chunks = [run(start) for start in starts]
    values = np.concatenate(chunks)
    logger.info(f"Monte Carlo for {target}: {samples} samples in {len(starts)} chunks, seed {seed}")

    estimate = math.fsum(values.tolist()) / samples
    deviation = float(np.std(values, ddof=1))
    return MonteCarloResult(
        estimate=estimate,
        std_error=deviation / math.sqrt(samples),
        samples=samples,
        seed=seed,
    )
