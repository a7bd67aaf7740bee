import math

import numpy as np
import pytest
from hypothesis import given, settings

from liquidweight.services.graph_core import DelegationProfile, build_profile
from liquidweight.services.influence import (
    SuspendibleProfile,
    cycle_members,
    delegation_matrix,
    expected_votes_cast,
    expected_weight,
    expected_weight_chain,
    expected_weight_chain_limit,
    expected_weight_star,
    expected_weights,
    first_passage,
    maximal_path_count,
    path_bound,
    path_contribution,
    path_contribution_limit,
    potential_weight,
    potential_weight_per_entry,
    stationary_analytic,
    stationary_iterative,
)
from liquidweight.utils.exceptions import (
    InvalidProbability,
    MissingProbability,
    NoConvergence,
    UnknownAgent,
    ValidationError,
)
from strategies import path_count_total, profiles, random_profile, suspendible_profiles

FIGURE2_POTENTIAL = {
    "n00": 7, "n01": 9, "n02": 9, "n03": 9, "n04": 3, "n05": 2, "n06": 1,
    "n07": 1, "n08": 1, "n09": 1, "n10": 1, "n11": 1, "n12": 1, "n13": 1, "n14": 1, "n15": 1,
    "n16": 1, "n17": 2, "n18": 3, "n19": 4, "n20": 5, "n21": 6, "n22": 8, "n23": 15,
}

FIGURE2_EXPECTED = {
    "n00": 4.0, "n22": 3.0, "n23": 3.484375, "n04": 1.75, "n05": 1.5, "n06": 1.0,
    "n16": 1.0, "n17": 1.5, "n18": 1.75, "n19": 1.875, "n20": 1.9375, "n21": 1.96875,
}

FIGURE2_CYCLE_EXPECTED = {"n01": 3.375, "n02": 2.5625, "n03": 3.46875}

PROBABILITY_GRID = [0.1, 0.25, 0.5, 0.9]


def chain_profile(n):
    names = [f"c{i:03d}" for i in range(n + 1)]
    return build_profile(names, dict(zip(names, names[1:]))), names[-1]


def star_profile(k):
    leaves = [f"s{i:03d}" for i in range(k)]
    return build_profile(leaves + ["hub"], {leaf: "hub" for leaf in leaves}), "hub"


# --- Suspendible profiles ---------------------------------------------------

def test_suspendible_profile_requires_probability_for_delegators(chain_xye):
    with pytest.raises(MissingProbability):
        SuspendibleProfile(profile=chain_xye, vote_prob={"x": 0.5})


def test_suspendible_profile_rejects_out_of_range(chain_xye):
    with pytest.raises(InvalidProbability):
        SuspendibleProfile(profile=chain_xye, vote_prob={"x": 0.5, "y": 1.5})


def test_suspendible_profile_rejects_unknown_agent(chain_xye):
    with pytest.raises(UnknownAgent):
        SuspendibleProfile(profile=chain_xye, vote_prob={"x": 0.5, "y": 0.5, "zed": 0.1})


def test_endpoints_vote_with_certainty(chain_xye):
    sp = SuspendibleProfile.with_defaults(chain_xye, 0.3, {"y": 0.9})
    assert sp.p("e") == 1.0
    assert sp.p("x") == 0.3
    assert sp.p("y") == 0.9


# --- Potential weight -------------------------------------------------------

def test_potential_weight_figure2(figure2):
    weights = potential_weight(figure2.profile)
    assert weights.weights == {agent: float(value) for agent, value in FIGURE2_POTENTIAL.items()}


def test_potential_weight_per_entry_splits_the_cycle(figure2):
    weights = potential_weight_per_entry(figure2.profile)
    assert (weights["n01"], weights["n02"], weights["n03"]) == (4.0, 1.0, 4.0)
    assert weights["n23"] == 15.0


def test_potential_weight_endpoint_counts_transitive_delegators(chain_xye):
    assert potential_weight(chain_xye).weights == {"e": 3.0, "x": 1.0, "y": 2.0}


@settings(max_examples=50, deadline=None)
@given(profile=profiles(max_agents=200))
def test_potential_weight_matches_path_enumeration(profile):
    assert potential_weight(profile).total() == path_count_total(profile)


# --- First passage and expected weight -------------------------------------

def test_first_passage_chain():
    sp = SuspendibleProfile.uniform(build_profile({"x", "y", "t"}, {"x": "y", "y": "t"}), 0.5)
    assert first_passage(sp, "t") == {"x": 0.25, "y": 0.5}


def test_first_passage_two_cycle_suspends_target(two_cycle):
    assert first_passage(two_cycle, "a") == {"b": 0.5}


def test_first_passage_other_component_is_zero():
    sp = SuspendibleProfile.uniform(build_profile({"a", "b", "c"}, {"a": "b"}), 0.5)
    assert first_passage(sp, "b") == {"a": 0.5, "c": 0.0}


def test_first_passage_unknown_target(two_cycle):
    with pytest.raises(UnknownAgent):
        first_passage(two_cycle, "q")


def test_expected_weight_figure2_non_cycle_nodes(figure2):
    for agent, value in FIGURE2_EXPECTED.items():
        assert expected_weight(figure2, agent) == pytest.approx(value, abs=1e-12)
    for agent in ("n07", "n08", "n09", "n10", "n15"):
        assert expected_weight(figure2, agent) == 1.0


def test_expected_weight_figure2_cycle_nodes(figure2):
    for agent, value in FIGURE2_CYCLE_EXPECTED.items():
        assert expected_weight(figure2, agent) == pytest.approx(value, abs=1e-12)


def test_cycle_target_decoupling(figure2):
    for agent in cycle_members(figure2):
        assert expected_weight(figure2, agent) == expected_weight(figure2.suspended({agent}), agent)


@settings(max_examples=100, deadline=None)
@given(sp=suspendible_profiles(max_agents=12))
def test_expected_weight_between_one_and_potential(sp):
    potential = potential_weight(sp.profile)
    for agent, value in expected_weights(sp).weights.items():
        assert 1.0 <= value <= potential[agent] + 1e-12


def test_limit_facts_on_random_profiles():
    rng = np.random.default_rng(7)
    for _ in range(40):
        profile = random_profile(rng, max_agents=50)
        potential = potential_weight(profile)
        at_one = SuspendibleProfile.uniform(profile, 1.0)
        nearly_zero = SuspendibleProfile.uniform(profile, 1e-9)
        for agent in profile.agents:
            assert expected_weight(at_one, agent) == 1.0
            assert expected_weight(nearly_zero, agent) == pytest.approx(potential[agent], abs=1e-5)


def test_expected_weight_nonincreasing_in_p():
    rng = np.random.default_rng(11)
    grid = np.linspace(0.0, 1.0, 20)
    for _ in range(20):
        profile = random_profile(rng, max_agents=50)
        columns = [expected_weights(SuspendibleProfile.uniform(profile, float(p))) for p in grid]
        for agent in profile.agents:
            values = [column[agent] for column in columns]
            assert all(later <= earlier + 1e-12 for earlier, later in zip(values, values[1:]))


# --- Closed forms -----------------------------------------------------------

def test_expected_weight_chain_examples():
    assert expected_weight_chain(1, 0.5) == 1.5
    assert expected_weight_chain(10000, 0.5) == pytest.approx(2.0, abs=1e-12)
    assert expected_weight_chain(0, 0.37) == 1.0
    assert expected_weight_chain(4, 0.0) == 5.0


def test_expected_weight_chain_rejects_bad_input():
    with pytest.raises(InvalidProbability):
        expected_weight_chain(3, 1.2)
    with pytest.raises(ValidationError):
        expected_weight_chain(-1, 0.5)


def test_chain_limit_table():
    grid = [0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 0.8]
    assert [expected_weight_chain_limit(p) for p in grid] == [100, 50, 20, 10, 5, 2, 1.25]
    assert expected_weight_chain_limit(1.0) == 1.0
    with pytest.raises(InvalidProbability):
        expected_weight_chain_limit(0.0)


def test_expected_weight_star_examples():
    assert expected_weight_star(10000, 0.5) == 5001
    assert expected_weight_star(6, 0.5) == 4
    assert expected_weight_star(0, 0.3) == 1


@pytest.mark.parametrize("p", PROBABILITY_GRID)
def test_chain_and_star_closed_forms_match_graphs(p):
    for size in range(0, 65):
        profile, terminal = chain_profile(size)
        sp = SuspendibleProfile.uniform(profile, p)
        assert expected_weight(sp, terminal) == pytest.approx(expected_weight_chain(size, p), rel=1e-12)
        profile, hub = star_profile(size)
        sp = SuspendibleProfile.uniform(profile, p)
        assert expected_weight(sp, hub) == pytest.approx(expected_weight_star(size, p), rel=1e-12)


def test_path_contribution_examples():
    assert path_contribution(1, 0.5) == 0.5
    assert path_contribution(3, 0.5) == 0.875
    assert path_contribution_limit(0.5) == 1.0
    assert path_contribution_limit(0.25) == 3.0
    with pytest.raises(ValidationError):
        path_contribution(0, 0.5)


def test_maximal_path_count_figure2(figure2):
    assert maximal_path_count(figure2.profile, "n23") == 7
    assert maximal_path_count(figure2.profile, "n00") == 6
    assert maximal_path_count(figure2.profile, "n01") == 5
    assert maximal_path_count(figure2.profile, "n10") == 0


@settings(max_examples=100, deadline=None)
@given(sp=suspendible_profiles(max_agents=12, low=0.05))
def test_path_bound(sp):
    for agent in sp.agents:
        assert expected_weight(sp, agent) <= path_bound(sp, agent) + 1e-9


@settings(max_examples=50, deadline=None)
@given(profile=profiles(max_agents=12))
def test_path_bound_at_half_or_more(profile):
    sp = SuspendibleProfile.uniform(profile, 0.5)
    for agent in profile.agents:
        assert expected_weight(sp, agent) <= 1 + maximal_path_count(profile, agent) + 1e-9


def test_literal_maximal_path_bound_fails_on_long_chain():
    profile, terminal = chain_profile(1000)
    sp = SuspendibleProfile.uniform(profile, 0.01)
    assert maximal_path_count(profile, terminal) == 1
    assert expected_weight(sp, terminal) > 50
    assert expected_weight(sp, terminal) <= path_bound(sp, terminal)


def test_expected_votes_cast_without_cycles_counts_everyone(chain_xye):
    sp = SuspendibleProfile.uniform(chain_xye, 0.5)
    assert expected_votes_cast(sp) == pytest.approx(3.0, abs=1e-12)


def test_expected_votes_cast_turnout_only_for_endpoints(chain_xye):
    sp = SuspendibleProfile.uniform(chain_xye, 0.5)
    assert expected_votes_cast(sp, {"e": 0.0}) == pytest.approx(0.5 + 0.75, abs=1e-12)
    with pytest.raises(ValidationError):
        expected_votes_cast(sp, {"x": 0.2})


# --- Delegation matrix and stationary weight -------------------------------

def test_delegation_matrix_examples(two_cycle):
    lone = SuspendibleProfile.uniform(build_profile({"a"}, {}), 0.5)
    assert delegation_matrix(lone).entries.tolist() == [[1.0]]

    sp = SuspendibleProfile.uniform(build_profile({"a", "b"}, {"a": "b"}), 0.5)
    assert delegation_matrix(sp).entries.tolist() == [[0.5, 0.5], [0.0, 1.0]]
    assert delegation_matrix(two_cycle).entries.tolist() == [[0.5, 0.5], [0.5, 0.5]]


@settings(max_examples=100, deadline=None)
@given(sp=suspendible_profiles(max_agents=15, low=0.0, high=1.0))
def test_delegation_matrix_is_row_stochastic(sp):
    matrix = delegation_matrix(sp)
    assert np.all(np.abs(matrix.row_sums() - 1.0) <= 1e-12)
    for i, agent in enumerate(matrix.agents):
        assert np.count_nonzero(np.delete(matrix.entries[i], i)) <= 1


def test_stationary_figure3(figure3):
    analytic = stationary_analytic(figure3)
    iterative = stationary_iterative(figure3, tolerance=1e-10)
    for agent in figure3.agents:
        expected = 3.0 if agent in ("n01", "n02", "n03") else 0.0
        assert analytic.scaled_weight[agent] == pytest.approx(expected, abs=1e-12)
        assert iterative.distribution[agent] == pytest.approx(analytic.distribution[agent], abs=1e-8)
    assert math.fsum(analytic.distribution.values()) == pytest.approx(1.0)


def test_stationary_lone_endpoint():
    sp = SuspendibleProfile.uniform(build_profile({"a"}, {}), 0.5)
    assert stationary_analytic(sp).distribution == {"a": 1.0}


def test_stationary_two_components():
    left = [f"l{i}" for i in range(6)]
    right = [f"r{i}" for i in range(3)]
    edges = {agent: "l0" for agent in left[1:]}
    edges.update({agent: "r0" for agent in right[1:]})
    sp = SuspendibleProfile.uniform(build_profile(left + right, edges), 0.5)
    distribution = stationary_analytic(sp).distribution
    assert distribution["l0"] == pytest.approx(6 / 9)
    assert distribution["r0"] == pytest.approx(3 / 9)


def test_stationary_iterative_all_endpoints_converges_at_once():
    sp = SuspendibleProfile.uniform(build_profile({"a", "b", "c"}, {}), 0.5)
    result = stationary_iterative(sp)
    assert result.iterations == 1
    assert result.distribution == pytest.approx({"a": 1 / 3, "b": 1 / 3, "c": 1 / 3})


def test_stationary_iterative_absorbs_chain(chain_xye):
    result = stationary_iterative(SuspendibleProfile.uniform(chain_xye, 0.5))
    assert result.distribution["e"] == pytest.approx(1.0, abs=1e-8)


def test_stationary_iterative_averages_period_two_cycle():
    profile = build_profile({"a", "b", "c"}, {"a": "b", "b": "a", "c": "a"})
    sp = SuspendibleProfile.uniform(profile, 0.0)
    result = stationary_iterative(sp)
    assert result.distribution == pytest.approx({"a": 0.5, "b": 0.5, "c": 0.0}, abs=1e-12)
    assert result.distribution == pytest.approx(stationary_analytic(sp).distribution, abs=1e-12)
    with pytest.raises(NoConvergence):
        stationary_iterative(sp, max_iters=1)


def test_stationary_cycle_with_uneven_probabilities_balances_flow():
    profile = build_profile({"a", "b"}, {"a": "b", "b": "a"})
    sp = SuspendibleProfile(profile=profile, vote_prob={"a": 0.5, "b": 0.75})
    analytic = stationary_analytic(sp)
    assert analytic.distribution == pytest.approx({"a": 1 / 3, "b": 2 / 3}, abs=1e-12)

    distribution = np.array([analytic.distribution[a] for a in sp.agents])
    assert np.allclose(distribution @ delegation_matrix(sp).entries, distribution, atol=1e-12)

    iterative = stationary_iterative(sp, tolerance=1e-12)
    assert iterative.distribution == pytest.approx(analytic.distribution, abs=1e-10)


def test_stationary_delegators_who_always_vote_keep_their_mass():
    chain = SuspendibleProfile(
        profile=build_profile({"x", "y", "e"}, {"x": "y", "y": "e"}),
        vote_prob={"x": 0.5, "y": 1.0},
    )
    assert stationary_analytic(chain).distribution == pytest.approx({"x": 0.0, "y": 2 / 3, "e": 1 / 3})
    assert stationary_iterative(chain).distribution == pytest.approx(
        stationary_analytic(chain).distribution, abs=1e-9
    )

    cycle = SuspendibleProfile(
        profile=build_profile({"a", "b", "c", "d"}, {"a": "b", "b": "c", "c": "a", "d": "b"}),
        vote_prob={"a": 1.0, "b": 0.5, "c": 0.5, "d": 0.5},
    )
    assert stationary_analytic(cycle).distribution == pytest.approx({"a": 1.0, "b": 0.0, "c": 0.0, "d": 0.0})
    assert stationary_iterative(cycle).distribution["a"] == pytest.approx(1.0, abs=1e-9)


def test_stationary_iterative_with_voting_probability_near_one():
    sp = SuspendibleProfile.uniform(build_profile({"x", "e"}, {"x": "e"}), 0.999)
    result = stationary_iterative(sp, tolerance=1e-10, max_iters=100_000)
    analytic = stationary_analytic(sp)
    for agent in sp.agents:
        assert abs(result.distribution[agent] - analytic.distribution[agent]) <= 1e-9
    assert result.distribution["e"] == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(sp=suspendible_profiles(max_agents=10, low=0.05, high=0.95))
def test_stationary_support_and_agreement(sp):
    analytic = stationary_analytic(sp)
    iterative = stationary_iterative(sp, tolerance=1e-12)
    members = set(cycle_members(sp)) | {a for a in sp.agents if sp.profile.is_endpoint(a)}
    for agent in sp.agents:
        if agent not in members:
            assert analytic.distribution[agent] == 0.0
        assert iterative.distribution[agent] == pytest.approx(analytic.distribution[agent], abs=1e-8)


def test_profile_model_is_frozen(chain_xye):
    with pytest.raises(Exception):
        chain_xye.successor = {}
    assert isinstance(chain_xye, DelegationProfile)
