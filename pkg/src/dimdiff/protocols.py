"""Constructive allocation protocols and existence conditions.

Goods: a linear-time decision for necessarily-DD-proportional allocations,
with the balanced round-robin protocol as the constructive half.  Chores: a
necessary feasibility condition (avoid every agent's worst-chore window),
an exact two-agent protocol, and a three-agent protocol for the special case
of near-identical rankings.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import networkx as nx

from .core import Allocation, Instance, ItemKind
from .extensions import RelationKind
from .fairness import check_proportional


class Reason(Enum):
    NOT_MULTIPLE_OF_N = "not_multiple_of_n"
    SHARED_BEST_ITEM = "shared_best_item"
    SHARED_WORST_WINDOW_INFEASIBLE = "shared_worst_window_infeasible"
    CONDITIONS_MET = "conditions_met"
    OUT_OF_THEORY = "out_of_theory"


@dataclass(frozen=True)
class ExistenceReport:
    """Outcome of an existence condition.

    ``exists`` is three-valued: True / False when the condition is decisive,
    None when it is only necessary and leaves existence open.  When True, the
    allocation is present and passes the corresponding fairness check.
    """

    exists: Optional[bool]
    reason: Reason
    allocation: Optional[Allocation] = None


def balanced_round_robin(instance: Instance) -> Allocation:
    """Picking protocol with agent order 1..n, then n..1, per round.

    Each agent takes its best remaining item in turn; with strict rankings no
    pick can tie.  Requires the item count to be a multiple of the agent
    count so everybody ends up with the same share.
    """
    n, m = instance.agent_count, instance.item_count
    if m % n:
        raise ValueError(f"{m} items cannot be split evenly among {n} agents")
    taken = [False] * m
    bundles: list[list[int]] = [[] for _ in range(n)]
    forward = list(range(n))
    picks = itertools.cycle(forward + forward[::-1])
    for _ in range(m):
        agent = next(picks)
        for item in instance.rankings[agent].order:
            if not taken[item]:
                taken[item] = True
                bundles[agent].append(item)
                break
    return Allocation.from_lists(bundles)


def nddpr_exists(instance: Instance) -> ExistenceReport:
    """Decide existence of a necessarily-DD-proportional goods allocation.

    Exists iff the items split evenly and all best items are distinct; in
    that case balanced round-robin constructs a witness in O(M) picks.
    """
    if instance.kind is not ItemKind.GOODS:
        raise ValueError("nddpr_exists applies to goods instances")
    n, m = instance.agent_count, instance.item_count
    if m % n:
        return ExistenceReport(False, Reason.NOT_MULTIPLE_OF_N)
    best_items = {r.best for r in instance.rankings}
    if len(best_items) < n:
        return ExistenceReport(False, Reason.SHARED_BEST_ITEM)
    return ExistenceReport(True, Reason.CONDITIONS_MET, balanced_round_robin(instance))


# ---------------------------------------------------------------------------
# Chores
# ---------------------------------------------------------------------------

def _worst_window_size(agent_count: int) -> int:
    return (agent_count - 1 + 1) // 2  # ceil((n-1)/2)


def _avoidance_feasible(instance: Instance) -> bool:
    """Can each agent receive m chores avoiding its worst-chore window?

    Bipartite feasibility: chores have unit supply, each agent has capacity
    m and accepts only chores outside its window.  Decided exactly by max
    flow.
    """
    n, m = instance.agent_count, instance.item_count
    share = m // n
    window = _worst_window_size(n)
    windows = [instance.rankings[i].worst_items(window) for i in range(n)]
    graph = nx.DiGraph()
    source, sink = "s", "t"
    for chore in range(m):
        graph.add_edge(source, ("chore", chore), capacity=1)
    for agent in range(n):
        graph.add_edge(("agent", agent), sink, capacity=share)
        for chore in range(m):
            if chore not in windows[agent]:
                graph.add_edge(("chore", chore), ("agent", agent), capacity=1)
    value = nx.maximum_flow_value(graph, source, sink)
    return value == m


def nidpr_necessary(instance: Instance) -> ExistenceReport:
    """Necessary condition for a necessarily-ID-proportional chore allocation.

    Never answers True: when the item count splits evenly and the avoidance
    assignment is feasible, existence is still open, so the report says
    unknown.  A False is definitive.
    """
    if instance.kind is not ItemKind.CHORES:
        raise ValueError("nidpr_necessary applies to chores instances")
    n, m = instance.agent_count, instance.item_count
    if m % n:
        return ExistenceReport(False, Reason.NOT_MULTIPLE_OF_N)
    if not _avoidance_feasible(instance):
        return ExistenceReport(False, Reason.SHARED_WORST_WINDOW_INFEASIBLE)
    return ExistenceReport(None, Reason.CONDITIONS_MET)


def nidpr_two_agents(instance: Instance) -> ExistenceReport:
    """Exact two-agent decision: even split plus distinct worst chores.

    Both conditions together are sufficient, and each is necessary.  The
    witness normally comes from balanced round-robin, but round-robin is not
    actually guaranteed here: an agent's worst chore can be consumed early as
    the other agent's favourite, after which the final backward pass may hand
    someone its own worst chore (e.g. rankings 3>2>1>0 and 2>1>0>3).  The
    output is therefore verified, with an exact equal-split search as the
    fallback witness.
    """
    if instance.kind is not ItemKind.CHORES:
        raise ValueError("nidpr_two_agents applies to chores instances")
    if instance.agent_count != 2:
        raise ValueError("nidpr_two_agents requires exactly two agents")
    m = instance.item_count
    if m % 2:
        return ExistenceReport(False, Reason.NOT_MULTIPLE_OF_N)
    if instance.rankings[0].worst == instance.rankings[1].worst:
        return ExistenceReport(False, Reason.SHARED_WORST_WINDOW_INFEASIBLE)
    allocation = balanced_round_robin(instance)
    if not check_proportional(allocation, instance, RelationKind.NID).result:
        from .fairness import Criterion
        from .search import AllocationGoal, exists_allocation

        allocation = exists_allocation(
            instance, AllocationGoal(Criterion.PROPORTIONALITY, RelationKind.NID)
        )
        if allocation is None:  # the exactness of the conditions guarantees one
            raise AssertionError("no balanced split is proportional despite the conditions")
    return ExistenceReport(True, Reason.CONDITIONS_MET, allocation)


def nidpr_three_agents_special(instance: Instance) -> ExistenceReport:
    """Three-agent protocol for the near-identical-rankings special case.

    Applicable when all agents share the same three worst chores and rank
    the remaining chores identically; outside that case the report says
    out-of-theory.  Within it, existence is decided exactly: the items must
    split evenly and the worst chore must not be shared by everyone.

    The protocol first assigns the three worst chores so every agent gets a
    chore it ranks second-worst or better and someone gets its third-worst
    (found among the six possible assignments), then hands out the remaining
    chores from worst to best, steering each round's worst chore to an agent
    whose accumulated level advantage can absorb it.
    """
    if instance.kind is not ItemKind.CHORES:
        raise ValueError("nidpr_three_agents_special applies to chores instances")
    if instance.agent_count != 3:
        raise ValueError("nidpr_three_agents_special requires exactly three agents")
    rankings = instance.rankings
    m = instance.item_count

    worst_sets = [r.worst_items(min(3, m)) for r in rankings]
    if not (worst_sets[0] == worst_sets[1] == worst_sets[2]) or m < 3:
        return ExistenceReport(None, Reason.OUT_OF_THEORY)
    rest = rankings[0].order[:-3]
    if any(r.order[:-3] != rest for r in rankings):
        return ExistenceReport(None, Reason.OUT_OF_THEORY)

    if m % 3:
        return ExistenceReport(False, Reason.NOT_MULTIPLE_OF_N)
    if rankings[0].worst == rankings[1].worst == rankings[2].worst:
        return ExistenceReport(False, Reason.SHARED_WORST_WINDOW_INFEASIBLE)

    # Opening: one of the six assignments of the three worst chores gives
    # every agent level >= 2 and some agent level 3.
    worst_chores = sorted(worst_sets[0])
    opening: Optional[tuple[int, ...]] = None
    for candidate in itertools.permutations(worst_chores):
        levels = [rankings[i].level(candidate[i]) for i in range(3)]
        if all(lev >= 2 for lev in levels) and max(levels) >= 3:
            opening = candidate
            break
    if opening is None:  # cannot happen when the worst chore is not shared
        raise AssertionError("no admissible opening assignment found")

    bundles: list[list[int]] = [[opening[i]] for i in range(3)]
    # Accumulated level advantage over the full set after the opening:
    # 0 for a second-worst chore, 3 for a third-worst one.
    advantage = [3 * (rankings[i].level(opening[i]) - 2) for i in range(3)]

    # Remaining chores, worst first; their levels agree across agents.
    pending = list(reversed(rest))
    while pending:
        worst, middle, best = pending[:3]
        pending = pending[3:]
        receiver_worst = next(i for i in range(3) if advantage[i] >= 3)
        others = [i for i in range(3) if i != receiver_worst]
        others.sort(key=lambda i: advantage[i])
        receiver_best, receiver_middle = others[0], others[1]
        bundles[receiver_worst].append(worst)
        bundles[receiver_middle].append(middle)
        bundles[receiver_best].append(best)
        advantage[receiver_worst] -= 3
        advantage[receiver_best] += 3

    allocation = Allocation.from_lists(bundles)
    verdict = check_proportional(allocation, instance, RelationKind.NID)
    if not verdict.result:  # guards the protocol's guarantee
        raise AssertionError("three-agent protocol produced a non-NIDPR allocation")
    return ExistenceReport(True, Reason.CONDITIONS_MET, allocation)
