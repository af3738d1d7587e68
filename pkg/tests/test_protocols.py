"""Round-robin protocol, existence conditions, and the chores protocols."""

import random

import pytest

from dimdiff.core import Instance, ItemKind, Ranking, level_prefix_sums
from dimdiff.extensions import RelationKind
from dimdiff.fairness import Criterion, check_proportional
from dimdiff.protocols import (
    Reason,
    balanced_round_robin,
    nddpr_exists,
    nidpr_necessary,
    nidpr_three_agents_special,
    nidpr_two_agents,
)
from dimdiff.search import AllocationGoal, exists_allocation


def random_instance(rng, agents, items, kind=ItemKind.GOODS):
    return Instance(
        kind, tuple(Ranking(tuple(rng.sample(range(items), items))) for _ in range(agents))
    )


def accumulated_differences(alloc, instance, agent):
    """Running level difference of the agent's n-times bundle vs everything."""
    n = instance.agent_count
    scaled = alloc.bundle(agent).scaled(n)
    ranking = instance.rankings[agent]
    mine = level_prefix_sums(scaled, ranking, "top")
    everything = level_prefix_sums(instance.full_bundle(), ranking, "top")
    return [a - b for a, b in zip(mine, everything)]


# --- balanced round robin ---------------------------------------------------

def test_round_robin_trace_two_agents():
    # Alice 4>3>2>1 and Bob 2>3>4>1 (labels = id + 1): picks A,B,B,A.
    inst = Instance(ItemKind.GOODS, (Ranking((3, 2, 1, 0)), Ranking((1, 2, 3, 0))))
    alloc = balanced_round_robin(inst)
    assert alloc.bundles == ((0, 3), (1, 2))


def test_round_robin_single_agent():
    inst = Instance(ItemKind.GOODS, (Ranking((2, 0, 1)),))
    assert balanced_round_robin(inst).bundles == ((0, 1, 2),)


def test_round_robin_three_agent_trace():
    inst = Instance(
        ItemKind.GOODS,
        (Ranking((5, 4, 2, 3, 1, 0)), Ranking((4, 3, 2, 5, 1, 0)), Ranking((3, 5, 2, 4, 1, 0))),
    )
    alloc = balanced_round_robin(inst)
    assert all(len(b) == 2 for b in alloc.bundles)
    assert check_proportional(alloc, inst, RelationKind.NDD).result


def test_round_robin_requires_even_split():
    inst = Instance(ItemKind.GOODS, (Ranking((0, 1, 2)), Ranking((2, 1, 0))))
    with pytest.raises(ValueError):
        balanced_round_robin(inst)


def test_round_robin_accumulated_difference_invariant():
    # When the protocol's preconditions hold, the running level difference
    # stays non-negative throughout, reaching n(n-1)/2 after odd rounds and
    # n*(i-1) after even rounds.
    rng = random.Random(10)
    produced = 0
    while produced < 60:
        agents = rng.randint(2, 4)
        share = rng.randint(1, 3)
        items = agents * share
        inst = random_instance(rng, agents, items)
        if len({r.best for r in inst.rankings}) < agents:
            continue
        produced += 1
        alloc = balanced_round_robin(inst)
        for agent in range(agents):
            diffs = accumulated_differences(alloc, inst, agent)
            assert all(d >= 0 for d in diffs)
            for round_no in range(1, share + 1):
                at_round_end = diffs[round_no * agents - 1]
                if round_no % 2:
                    assert at_round_end >= agents * (agents - 1) // 2
                else:
                    assert at_round_end >= agents * agent


# --- NDDPR existence --------------------------------------------------------

def test_nddpr_exists_opposite_preferences():
    inst = Instance(ItemKind.GOODS, (Ranking((3, 2, 1, 0)), Ranking((1, 2, 3, 0))))
    report = nddpr_exists(inst)
    assert report.exists is True and report.reason is Reason.CONDITIONS_MET
    assert check_proportional(report.allocation, inst, RelationKind.NDD).result


def test_nddpr_exists_odd_items():
    inst = Instance(
        ItemKind.GOODS,
        (Ranking((0, 1, 2, 3, 4)), Ranking((4, 3, 2, 1, 0))),
    )
    report = nddpr_exists(inst)
    assert report.exists is False and report.reason is Reason.NOT_MULTIPLE_OF_N


def test_nddpr_exists_shared_best():
    inst = Instance(ItemKind.GOODS, (Ranking((0, 1, 2, 3)), Ranking((0, 2, 1, 3))))
    report = nddpr_exists(inst)
    assert report.exists is False and report.reason is Reason.SHARED_BEST_ITEM


def test_nddpr_exists_requires_goods():
    with pytest.raises(ValueError):
        nddpr_exists(Instance(ItemKind.CHORES, (Ranking((0, 1)), Ranking((1, 0)))))


def test_nddpr_condition_matches_brute_force():
    rng = random.Random(11)
    for _ in range(120):
        agents = rng.randint(2, 3)
        items = rng.randint(1, 6)
        inst = random_instance(rng, agents, items)
        witness = exists_allocation(
            inst, AllocationGoal(Criterion.PROPORTIONALITY, RelationKind.NDD)
        )
        assert (witness is not None) == bool(nddpr_exists(inst).exists)


# --- chores: necessary condition --------------------------------------------

def chores_instance(*orders):
    return Instance(ItemKind.CHORES, tuple(Ranking(o) for o in orders))


def test_nidpr_necessary_eight_chore_example():
    # a..d then w,x,y,z as ids 0..7; every agent's two worst include y.
    a, b, c, d, w, x, y, z = range(8)
    inst = chores_instance(
        (a, b, c, d, w, x, y, z),
        (b, c, d, a, w, x, z, y),
        (c, d, a, b, w, z, y, x),
        (d, a, b, c, x, z, y, w),
    )
    report = nidpr_necessary(inst)
    assert report.exists is False
    assert report.reason is Reason.SHARED_WORST_WINDOW_INFEASIBLE
    assert (
        exists_allocation(inst, AllocationGoal(Criterion.PROPORTIONALITY, RelationKind.NID))
        is None
    )


def test_nidpr_necessary_three_chore_example():
    inst = chores_instance((0, 1, 2), (0, 2, 1), (0, 2, 1))
    report = nidpr_necessary(inst)
    assert report.exists is None and report.reason is Reason.CONDITIONS_MET


def test_nidpr_necessary_uneven():
    inst = chores_instance((0, 1, 2, 3, 4), (4, 3, 2, 1, 0))
    report = nidpr_necessary(inst)
    assert report.exists is False and report.reason is Reason.NOT_MULTIPLE_OF_N
    with pytest.raises(ValueError):
        nidpr_necessary(Instance(ItemKind.GOODS, (Ranking((0, 1)), Ranking((1, 0)))))


def test_nidpr_necessary_is_conservative():
    # Whenever brute force finds an allocation, the condition never said no.
    rng = random.Random(12)
    for _ in range(120):
        agents = rng.randint(2, 3)
        items = agents * rng.randint(1, 2)
        inst = random_instance(rng, agents, items, ItemKind.CHORES)
        witness = exists_allocation(
            inst, AllocationGoal(Criterion.PROPORTIONALITY, RelationKind.NID)
        )
        if witness is not None:
            assert nidpr_necessary(inst).exists is not False


# --- chores: two agents ------------------------------------------------------

def test_nidpr_two_agents_fixture():
    inst = chores_instance((0, 1, 2, 3), (0, 1, 3, 2))
    report = nidpr_two_agents(inst)
    assert report.exists is True
    assert check_proportional(report.allocation, inst, RelationKind.NID).result


def test_nidpr_two_agents_negative_cases():
    identical = chores_instance((0, 1, 2, 3), (0, 1, 2, 3))
    report = nidpr_two_agents(identical)
    assert report.exists is False and report.reason is Reason.SHARED_WORST_WINDOW_INFEASIBLE
    odd = chores_instance((0, 1, 2), (2, 0, 1))
    assert nidpr_two_agents(odd).reason is Reason.NOT_MULTIPLE_OF_N
    with pytest.raises(ValueError):
        nidpr_two_agents(chores_instance((0, 1), (0, 1), (1, 0)))


def test_nidpr_two_agents_round_robin_gap():
    # Balanced round-robin alone can hand an agent its own worst chore even
    # with distinct worst chores: here the first agent grabs item 3 (the
    # other's worst) immediately and is left with its own worst item 0 in the
    # backward pass.  The decision must still return a verified allocation.
    inst = chores_instance((3, 2, 1, 0), (2, 1, 0, 3))
    rr = balanced_round_robin(inst)
    assert not check_proportional(rr, inst, RelationKind.NID).result
    report = nidpr_two_agents(inst)
    assert report.exists is True
    assert check_proportional(report.allocation, inst, RelationKind.NID).result


def test_nidpr_two_agents_matches_brute_force():
    rng = random.Random(13)
    for _ in range(150):
        items = 2 * rng.randint(1, 3)
        inst = random_instance(rng, 2, items, ItemKind.CHORES)
        report = nidpr_two_agents(inst)
        witness = exists_allocation(
            inst, AllocationGoal(Criterion.PROPORTIONALITY, RelationKind.NID)
        )
        assert bool(report.exists) == (witness is not None)
        if report.exists:
            assert check_proportional(report.allocation, inst, RelationKind.NID).result


# --- chores: three agents, near-identical rankings ---------------------------

def test_three_agents_three_chore_example():
    inst = chores_instance((0, 1, 2), (0, 2, 1), (0, 2, 1))
    report = nidpr_three_agents_special(inst)
    assert report.exists is True
    assert report.allocation.bundles == ((1,), (0,), (2,))
    assert check_proportional(report.allocation, inst, RelationKind.NID).result


def test_three_agents_shared_worst_chore():
    inst = chores_instance((0, 1, 2), (1, 0, 2), (0, 1, 2))
    report = nidpr_three_agents_special(inst)
    assert report.exists is False
    assert report.reason is Reason.SHARED_WORST_WINDOW_INFEASIBLE


def test_three_agents_two_rounds():
    # Six chores: common best half (5,4,3), shared worst window {0,1,2}
    # with different worst chores.
    inst = chores_instance(
        (5, 4, 3, 2, 1, 0),
        (5, 4, 3, 0, 2, 1),
        (5, 4, 3, 1, 0, 2),
    )
    report = nidpr_three_agents_special(inst)
    assert report.exists is True
    assert check_proportional(report.allocation, inst, RelationKind.NID).result


def test_three_agents_out_of_theory():
    # Different worst-three sets: the theorem does not apply.
    inst = chores_instance((0, 1, 2, 3, 4, 5), (5, 4, 3, 2, 1, 0), (0, 1, 2, 3, 4, 5))
    report = nidpr_three_agents_special(inst)
    assert report.exists is None and report.reason is Reason.OUT_OF_THEORY
    # Same worst three but differently ranked remainder.
    inst2 = chores_instance(
        (5, 4, 3, 2, 1, 0),
        (4, 5, 3, 0, 2, 1),
        (5, 4, 3, 1, 0, 2),
    )
    assert nidpr_three_agents_special(inst2).reason is Reason.OUT_OF_THEORY


def test_three_agents_randomized_soundness():
    # Random instances inside the special case: every positive answer is a
    # genuinely proportional allocation, and positives match brute force.
    rng = random.Random(14)
    produced = 0
    while produced < 60:
        share = rng.randint(1, 3)
        items = 3 * share
        common_rest = list(range(3, items))
        rng.shuffle(common_rest)
        rankings = []
        for _ in range(3):
            worst = [0, 1, 2]
            rng.shuffle(worst)
            rankings.append(Ranking(tuple(common_rest + worst)))
        inst = Instance(ItemKind.CHORES, tuple(rankings))
        report = nidpr_three_agents_special(inst)
        assert report.reason is not Reason.OUT_OF_THEORY
        produced += 1
        if report.exists:
            assert check_proportional(report.allocation, inst, RelationKind.NID).result
        elif items <= 6:
            assert (
                exists_allocation(
                    inst, AllocationGoal(Criterion.PROPORTIONALITY, RelationKind.NID)
                )
                is None
            )
