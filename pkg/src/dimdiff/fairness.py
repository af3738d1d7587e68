"""Fairness and efficiency verdicts for concrete allocations.

Each check returns a :class:`FairnessVerdict`; whenever the answer is
negative the verdict carries an independently checkable certificate: the
violating agent with a refuting utility, the envious pair, a Pareto-dominating
allocation, or a one-for-two swap.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Union

from .core import (
    Allocation,
    Instance,
    ItemKind,
    UtilityFunction,
    lexicographic_utility,
)
from .exceptions import (
    BudgetExceededError,
    ExtensionKindMismatchError,
    UnsupportedExtensionError,
)
from .extensions import (
    CHORES_RELATIONS,
    GOODS_RELATIONS,
    RelationKind,
    holds,
    refuting_utility,
)

DEFAULT_PARETO_BUDGET = 10_000_000


class Criterion(Enum):
    PROPORTIONALITY = "pr"
    ENVY_FREENESS = "ef"
    PARETO_EFFICIENCY = "pe"


Profile = Sequence[UtilityFunction]
Extension = Union[RelationKind, Profile]


@dataclass(frozen=True)
class ProportionalityViolation:
    """Agent whose n-times-copied bundle fails against the full item set."""

    agent: int
    refuting_utility: Optional[UtilityFunction] = None


@dataclass(frozen=True)
class EnvyWitness:
    envious: int
    envied: int


@dataclass(frozen=True)
class ParetoImprovement:
    """An allocation weakly better for everyone and strictly better for one."""

    allocation: Allocation


@dataclass(frozen=True)
class OneForTwoSwap:
    """Trading ``single_item`` for ``pair`` improves both agents at once.

    ``single_agent`` holds the single item but some consistent utility makes
    any two items beat one; ``pair_agent`` holds the pair but ranks the single
    item above both of its elements.
    """

    single_agent: int
    single_item: int
    pair_agent: int
    pair: tuple[int, int]


Certificate = Union[ProportionalityViolation, EnvyWitness, ParetoImprovement, OneForTwoSwap]


@dataclass(frozen=True)
class FairnessVerdict:
    criterion: Criterion
    extension: Optional[RelationKind]  # None means a concrete utility profile
    result: bool
    certificate: Optional[Certificate] = None


# ---------------------------------------------------------------------------
# Shared validation
# ---------------------------------------------------------------------------

def _require_partition(alloc: Allocation, instance: Instance) -> None:
    if alloc.agent_count != instance.agent_count:
        raise ValueError(
            f"allocation has {alloc.agent_count} bundles for {instance.agent_count} agents"
        )
    if not alloc.is_partition_of(instance.item_count):
        raise ValueError("allocation does not partition the instance's items")


def _require_kind_match(extension: RelationKind, instance: Instance) -> None:
    if instance.kind is ItemKind.GOODS and extension not in GOODS_RELATIONS:
        raise ExtensionKindMismatchError(
            f"{extension.value} is a chores extension; instance holds goods"
        )
    if instance.kind is ItemKind.CHORES and extension not in CHORES_RELATIONS:
        raise ExtensionKindMismatchError(
            f"{extension.value} is a goods extension; instance holds chores"
        )


def _require_profile(profile: Profile, instance: Instance) -> None:
    if len(profile) != instance.agent_count:
        raise ValueError("profile must supply one utility function per agent")


# ---------------------------------------------------------------------------
# Proportionality
# ---------------------------------------------------------------------------

def check_proportional(
    alloc: Allocation, instance: Instance, extension: Extension
) -> FairnessVerdict:
    """Is the allocation proportional under the extension (or concrete profile)?

    Extension semantics: agent i's bundle copied n times must relate to the
    full item set under the chosen relation and i's own ranking.  On failure
    the verdict names the first violating agent, with an explicit refuting
    utility for the NEC / NDD / NID extensions.
    """
    _require_partition(alloc, instance)
    n = instance.agent_count
    if not isinstance(extension, RelationKind):
        profile = tuple(extension)
        _require_profile(profile, instance)
        everything = instance.full_bundle()
        for agent, utility in enumerate(profile):
            if n * utility.of(alloc.bundle(agent)) < utility.of(everything):
                return FairnessVerdict(
                    Criterion.PROPORTIONALITY, None, False,
                    ProportionalityViolation(agent),
                )
        return FairnessVerdict(Criterion.PROPORTIONALITY, None, True)

    _require_kind_match(extension, instance)
    everything = instance.full_bundle()
    for agent in range(n):
        scaled = alloc.bundle(agent).scaled(n)
        if not holds(extension, scaled, everything, instance.rankings[agent]):
            witness = None
            if extension in (RelationKind.NEC, RelationKind.NDD, RelationKind.NID):
                witness = refuting_utility(
                    extension, scaled, everything, instance.rankings[agent]
                )
            return FairnessVerdict(
                Criterion.PROPORTIONALITY, extension, False,
                ProportionalityViolation(agent, witness),
            )
    return FairnessVerdict(Criterion.PROPORTIONALITY, extension, True)


# ---------------------------------------------------------------------------
# Envy-freeness
# ---------------------------------------------------------------------------

_EF_EXTENSIONS = frozenset({RelationKind.NEC, RelationKind.NDD})


def check_envy_free(
    alloc: Allocation, instance: Instance, extension: Extension
) -> FairnessVerdict:
    """Is the allocation envy-free under NEC / NDD or a concrete profile?

    Only the "necessary" goods extensions admit a pairwise test.  The
    possible-style extensions (PDD and friends) need a single profile working
    for all pairs simultaneously, which no pairwise relation captures; they
    are rejected explicitly (see search.pddef_witness_search for a sampled
    witness finder).
    """
    _require_partition(alloc, instance)
    n = instance.agent_count
    if not isinstance(extension, RelationKind):
        profile = tuple(extension)
        _require_profile(profile, instance)
        own = [profile[i].of(alloc.bundle(i)) for i in range(n)]
        for i in range(n):
            for j in range(n):
                if i != j and own[i] < profile[i].of(alloc.bundle(j)):
                    return FairnessVerdict(
                        Criterion.ENVY_FREENESS, None, False, EnvyWitness(i, j)
                    )
        return FairnessVerdict(Criterion.ENVY_FREENESS, None, True)

    if extension not in _EF_EXTENSIONS:
        raise UnsupportedExtensionError(
            f"envy-freeness is only decidable pairwise for nec/ndd, not {extension.value}"
        )
    _require_kind_match(extension, instance)
    bundles = [alloc.bundle(i) for i in range(n)]
    for i in range(n):
        for j in range(n):
            if i != j and not holds(extension, bundles[i], bundles[j], instance.rankings[i]):
                return FairnessVerdict(
                    Criterion.ENVY_FREENESS, extension, False, EnvyWitness(i, j)
                )
    return FairnessVerdict(Criterion.ENVY_FREENESS, extension, True)


# ---------------------------------------------------------------------------
# Pareto efficiency
# ---------------------------------------------------------------------------

def check_pareto(
    alloc: Allocation,
    instance: Instance,
    extension: Extension,
    budget: int = DEFAULT_PARETO_BUDGET,
) -> FairnessVerdict:
    """Pareto-efficiency verdicts.

    * NEC / NDD: necessary-efficiency.  Equivalent tests; decided as
      possible-efficiency plus the absence of a Pareto-improving
      one-for-two swap.
    * POS / PDD: possible-efficiency.  Equivalent tests; decided by a
      brute-force dominance search under the lexicographic profile
      u_i(x) = 2^level_i(x), whose verdict settles the whole class.
    * A concrete profile: direct dominance search under those utilities.

    The dominance search enumerates all n^M allocations; beyond ``budget``
    states it raises :class:`BudgetExceededError` rather than guessing.
    """
    _require_partition(alloc, instance)
    if not isinstance(extension, RelationKind):
        profile = tuple(extension)
        _require_profile(profile, instance)
        dominator = _find_dominating_allocation(alloc, instance, profile, budget)
        if dominator is not None:
            return FairnessVerdict(
                Criterion.PARETO_EFFICIENCY, None, False, ParetoImprovement(dominator)
            )
        return FairnessVerdict(Criterion.PARETO_EFFICIENCY, None, True)

    if instance.kind is not ItemKind.GOODS:
        raise ExtensionKindMismatchError("pareto extensions are defined for goods instances")
    if extension in (RelationKind.POS, RelationKind.PDD):
        verdict = _check_possible_pareto(alloc, instance, budget)
        return FairnessVerdict(
            Criterion.PARETO_EFFICIENCY, extension, verdict.result, verdict.certificate
        )
    if extension in (RelationKind.NEC, RelationKind.NDD):
        possible = _check_possible_pareto(alloc, instance, budget)
        if not possible.result:
            return FairnessVerdict(
                Criterion.PARETO_EFFICIENCY, extension, False, possible.certificate
            )
        swap = find_one_for_two_swap(alloc, instance)
        if swap is not None:
            return FairnessVerdict(Criterion.PARETO_EFFICIENCY, extension, False, swap)
        return FairnessVerdict(Criterion.PARETO_EFFICIENCY, extension, True)
    raise UnsupportedExtensionError(
        f"pareto efficiency is not defined for extension {extension.value}"
    )


def _check_possible_pareto(
    alloc: Allocation, instance: Instance, budget: int
) -> FairnessVerdict:
    lex_profile = tuple(lexicographic_utility(r) for r in instance.rankings)
    dominator = _find_dominating_allocation(alloc, instance, lex_profile, budget)
    if dominator is not None:
        return FairnessVerdict(
            Criterion.PARETO_EFFICIENCY, RelationKind.POS, False,
            ParetoImprovement(dominator),
        )
    return FairnessVerdict(Criterion.PARETO_EFFICIENCY, RelationKind.POS, True)


def find_one_for_two_swap(alloc: Allocation, instance: Instance) -> Optional[OneForTwoSwap]:
    """First pair of agents admitting a Pareto-improving one-for-two swap.

    Agents a and b improve together when a holds a single item that b ranks
    strictly above two of b's own items: a count-dominant utility makes a
    prefer the pair, a lexicographic one makes b prefer the single item.
    """
    n = alloc.agent_count
    for a in range(n):
        for b in range(n):
            if a == b or len(alloc.bundles[b]) < 2:
                continue
            ranking_b = instance.rankings[b]
            items_b = sorted(alloc.bundles[b], key=ranking_b.level)
            for item in alloc.bundles[a]:
                level = ranking_b.level(item)
                # Two worst items of b by b's own ranking suffice: if any pair
                # works, that one works.
                worst_pair = (items_b[0], items_b[1])
                if level > ranking_b.level(worst_pair[0]) and level > ranking_b.level(
                    worst_pair[1]
                ):
                    return OneForTwoSwap(a, item, b, worst_pair)
    return None


def apply_one_for_two_swap(alloc: Allocation, swap: OneForTwoSwap) -> Allocation:
    """The allocation after trading the single item for the pair."""
    bundles = [list(b) for b in alloc.bundles]
    bundles[swap.single_agent].remove(swap.single_item)
    for item in swap.pair:
        bundles[swap.pair_agent].remove(item)
        bundles[swap.single_agent].append(item)
    bundles[swap.pair_agent].append(swap.single_item)
    return Allocation.from_lists(bundles)


def _find_dominating_allocation(
    alloc: Allocation,
    instance: Instance,
    profile: Profile,
    budget: int,
) -> Optional[Allocation]:
    """Smallest (in assignment order) allocation Pareto-dominating ``alloc``.

    Depth-first over items in identifier order, agents in index order, so the
    result is deterministic.  Prunes branches where some agent can no longer
    reach its current utility even with every remaining item it values.
    """
    n = instance.agent_count
    m = instance.item_count
    if n**m > budget:
        raise BudgetExceededError(
            f"pareto dominance search needs {n**m} states, budget is {budget}"
        )
    targets = [profile[i].of(alloc.bundle(i)) for i in range(n)]
    values = [[profile[i].value(item) for item in range(m)] for i in range(n)]
    # best_remaining[i][d]: the most agent i can still gain from items d..M-1.
    best_remaining = [[0] * (m + 1) for _ in range(n)]
    for i in range(n):
        for d in range(m - 1, -1, -1):
            gain = values[i][d] if values[i][d] > 0 else 0
            best_remaining[i][d] = best_remaining[i][d + 1] + gain

    current = [0] * n
    assignment = [0] * m

    def dfs(depth: int) -> Optional[Allocation]:
        if depth == m:
            # Strict improvement for someone rules out alloc itself.
            if all(current[i] >= targets[i] for i in range(n)) and any(
                current[i] > targets[i] for i in range(n)
            ):
                bundles: list[list[int]] = [[] for _ in range(n)]
                for item, agent in enumerate(assignment):
                    bundles[agent].append(item)
                return Allocation.from_lists(bundles)
            return None
        for agent in range(n):
            current[agent] += values[agent][depth]
            assignment[depth] = agent
            if all(
                current[i] + best_remaining[i][depth + 1] >= targets[i] for i in range(n)
            ):
                found = dfs(depth + 1)
                if found is not None:
                    current[agent] -= values[agent][depth]
                    return found
            current[agent] -= values[agent][depth]
        return None

    return dfs(0)
