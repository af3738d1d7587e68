"""Exact-3-cover machinery: instance type, reduction to envy-freeness, solver.

The reduction maps an exact-3-cover question on 3q elements and n triples to
a 6n-item, 3n-agent goods instance on which a necessarily-DD-envy-free
allocation exists iff the cover exists.  A tiny exhaustive cover solver and a
structure-aware envy-freeness search validate the two sides against each
other at desk scale.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from .core import Allocation, Instance, ItemKind, Ranking
from .exceptions import BudgetExceededError

_SOLVER_STATE_LIMIT = 10_000_000


@dataclass(frozen=True)
class X3CInstance:
    """Exact-3-cover input: a base set of size 3q and n candidate triples."""

    base_size: int
    triplets: tuple[tuple[int, int, int], ...]

    def __post_init__(self) -> None:
        triplets = tuple(tuple(int(e) for e in t) for t in self.triplets)
        object.__setattr__(self, "triplets", triplets)
        if self.base_size <= 0 or self.base_size % 3:
            raise ValueError("base size must be a positive multiple of 3")
        if self.cover_size > len(triplets):
            raise ValueError("need at least base_size/3 triplets")
        for triple in triplets:
            if len(triple) != 3 or len(set(triple)) != 3:
                raise ValueError(f"triple {triple!r} must hold 3 distinct elements")
            if any(not 0 <= e < self.base_size for e in triple):
                raise ValueError(f"triple {triple!r} leaves the base set")

    @property
    def cover_size(self) -> int:
        return self.base_size // 3

    @property
    def triplet_count(self) -> int:
        return len(self.triplets)


def x3c_to_json(x3c: X3CInstance) -> dict:
    return {"base_size": x3c.base_size, "triplets": [list(t) for t in x3c.triplets]}


def x3c_from_json(payload: dict) -> X3CInstance:
    return X3CInstance(
        base_size=int(payload["base_size"]),
        triplets=tuple(tuple(t) for t in payload["triplets"]),
    )


def solve_x3c(x3c: X3CInstance) -> Optional[tuple[int, ...]]:
    """Indices of q pairwise-disjoint triples covering the base, or None.

    Exhaustive over all selections, first hit in lexicographic index order.
    """
    n, q = x3c.triplet_count, x3c.cover_size
    if _binomial(n, q) > _SOLVER_STATE_LIMIT:
        raise BudgetExceededError(f"C({n},{q}) selections exceed the solver limit")
    base = frozenset(range(x3c.base_size))
    for selection in itertools.combinations(range(n), q):
        covered: set[int] = set()
        ok = True
        for index in selection:
            triple = set(x3c.triplets[index])
            if covered & triple:
                ok = False
                break
            covered |= triple
        if ok and covered == base:
            return selection
    return None


def _binomial(n: int, k: int) -> int:
    result = 1
    for i in range(1, k + 1):
        result = result * (n - k + i) // i
    return result


# ---------------------------------------------------------------------------
# The reduction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReducedInstance:
    """The goods instance produced from an exact-3-cover question.

    6n items: one main item per base element, three dummies per triple, and
    three auxiliary items per triple beyond the cover size.  Three agents per
    triple.  Bookkeeping tuples give the item and agent identifiers per
    triple so searches can exploit the structure.
    """

    instance: Instance
    main_items: tuple[int, ...]                  # main item id per base element
    dummy_triples: tuple[tuple[int, int, int], ...]
    aux_triples: tuple[tuple[int, int, int], ...]
    agent_triples: tuple[tuple[int, int, int], ...]


def reduce_x3c(x3c: X3CInstance) -> ReducedInstance:
    """Build the envy-freeness instance equivalent to the cover question.

    Each agent's ranking follows the block template: its own dummies, then
    its triple's main items, then every auxiliary block, then the remaining
    dummies and mains.  Within its own blocks the three co-agents use the
    three cyclic shifts; segments the construction leaves free are fixed to
    ascending item order for reproducibility.
    """
    q, n = x3c.cover_size, x3c.triplet_count
    main_items = tuple(range(3 * q))
    dummy_triples = tuple(
        (3 * q + 3 * i, 3 * q + 3 * i + 1, 3 * q + 3 * i + 2) for i in range(n)
    )
    aux_base = 3 * q + 3 * n
    aux_triples = tuple(
        (aux_base + 3 * j, aux_base + 3 * j + 1, aux_base + 3 * j + 2)
        for j in range(n - q)
    )
    agent_triples = tuple((3 * i, 3 * i + 1, 3 * i + 2) for i in range(n))

    rankings = []
    for i in range(n):
        own_main = tuple(main_items[e] for e in x3c.triplets[i])
        other_dummies = sorted(
            d for t in dummy_triples for d in t if t != dummy_triples[i]
        )
        other_mains = sorted(set(main_items) - set(own_main))
        for shift in range(3):
            order: list[int] = []
            order += _cycled(dummy_triples[i], shift)
            order += _cycled(own_main, shift)
            for aux in aux_triples:
                order += _cycled(aux, shift)
            order += other_dummies
            order += other_mains
            rankings.append(Ranking(tuple(order)))

    instance = Instance(kind=ItemKind.GOODS, rankings=tuple(rankings))
    return ReducedInstance(instance, main_items, dummy_triples, aux_triples, agent_triples)


def _cycled(triple: tuple[int, int, int], shift: int) -> list[int]:
    return [triple[(shift + k) % 3] for k in range(3)]


# ---------------------------------------------------------------------------
# Structure-aware envy-freeness search on reduced instances
# ---------------------------------------------------------------------------

def nddef_search_reduced(reduced: ReducedInstance) -> Optional[Allocation]:
    """Exhaustive NDD-envy-freeness decision on a reduced instance.

    In any qualifying allocation every agent holds exactly two items, one of
    them its top dummy (its best item overall, which the pairwise relation
    forces it to own).  That pins 3n of the 6n items, leaving a bijection
    between agents and the remaining items; backtracking over the bijection
    with pairwise envy pruning decides existence exactly.

    With all bundles of size two and every agent owning its own best item,
    the pairwise relation reduces to level-sum dominance under the observer's
    ranking, checked in both directions as the bijection grows.
    """
    instance = reduced.instance
    agents = instance.agent_count
    rankings = instance.rankings
    top_dummy = [rankings[a].best for a in range(agents)]
    pinned = set(top_dummy)
    free_items = sorted(set(range(instance.item_count)) - pinned)
    if len(free_items) != agents:
        raise ValueError("instance does not have the reduced 2-items-per-agent shape")

    second: list[Optional[int]] = [None] * agents
    used = [False] * len(free_items)

    def compatible(a: int, b: int) -> bool:
        ra, rb = rankings[a], rankings[b]
        own_a = ra.level(top_dummy[a]) + ra.level(second[a])
        own_b = rb.level(top_dummy[b]) + rb.level(second[b])
        a_sees_b = ra.level(top_dummy[b]) + ra.level(second[b])
        b_sees_a = rb.level(top_dummy[a]) + rb.level(second[a])
        return own_a >= a_sees_b and own_b >= b_sees_a

    def assign(agent: int) -> bool:
        if agent == agents:
            return True
        for idx, item in enumerate(free_items):
            if used[idx]:
                continue
            used[idx] = True
            second[agent] = item
            if all(compatible(agent, other) for other in range(agent)):
                if assign(agent + 1):
                    return True
            used[idx] = False
            second[agent] = None
        return False

    if not assign(0):
        return None
    return Allocation.from_lists(
        [(top_dummy[a], second[a]) for a in range(agents)]
    )
