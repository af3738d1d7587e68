"""Domain types for ordinal fair division: rankings, bundles, allocations, utilities.

Items are dense integer identifiers ``0..M-1``.  A ranking induces integer
levels (Borda scores): the best item has level ``M``, the worst has level 1.
Levels are always derived from a ranking, never stored on items, so the same
bundle can be re-leveled under any agent's ranking.

All types are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Union

Value = Union[int, Fraction, float]

#: Absolute tolerance used when classifying float-valued utilities.
#: Exact (int / Fraction) utilities are classified with exact comparisons.
FLOAT_TOLERANCE = 1e-12


class ItemKind(Enum):
    GOODS = "goods"
    CHORES = "chores"


@dataclass(frozen=True)
class Ranking:
    """A strict total order over items ``0..M-1``, best item first."""

    order: tuple[int, ...]
    _levels: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        order = tuple(self.order)
        object.__setattr__(self, "order", order)
        m = len(order)
        if m == 0:
            raise ValueError("ranking must contain at least one item")
        if sorted(order) != list(range(m)):
            raise ValueError(f"ranking {order!r} is not a permutation of 0..{m - 1}")
        levels = [0] * m
        for position, item in enumerate(order):
            levels[item] = m - position
        object.__setattr__(self, "_levels", tuple(levels))

    @property
    def item_count(self) -> int:
        return len(self.order)

    @property
    def best(self) -> int:
        return self.order[0]

    @property
    def worst(self) -> int:
        return self.order[-1]

    def level(self, item: int) -> int:
        """Level of ``item``: ``M`` for the best item down to 1 for the worst."""
        if not 0 <= item < len(self.order):
            raise KeyError(f"unknown item {item!r}")
        return self._levels[item]

    def worst_items(self, count: int) -> frozenset[int]:
        """The ``count`` least-preferred items."""
        if count == 0:
            return frozenset()
        return frozenset(self.order[-count:])

    def reversed(self) -> Ranking:
        """The inverse order: the worst item becomes the best."""
        return Ranking(tuple(reversed(self.order)))


@dataclass(frozen=True)
class MultiBundle:
    """A multiset of items; the unit compared by every bundle relation.

    ``counts`` holds (item, multiplicity) pairs, item-sorted, multiplicities
    strictly positive.  The empty bundle is allowed.
    """

    counts: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        counts = tuple(sorted((int(i), int(c)) for i, c in self.counts))
        object.__setattr__(self, "counts", counts)
        seen: set[int] = set()
        for item, count in counts:
            if item < 0:
                raise ValueError(f"negative item identifier {item}")
            if count < 1:
                raise ValueError(f"multiplicity of item {item} must be >= 1, got {count}")
            if item in seen:
                raise ValueError(f"duplicate entry for item {item}")
            seen.add(item)

    @classmethod
    def from_items(cls, items: Iterable[int]) -> MultiBundle:
        counts: dict[int, int] = {}
        for item in items:
            counts[item] = counts.get(item, 0) + 1
        return cls(tuple(counts.items()))

    @classmethod
    def from_counts(cls, counts: Mapping[int, int]) -> MultiBundle:
        return cls(tuple(counts.items()))

    @property
    def size(self) -> int:
        return sum(c for _, c in self.counts)

    @property
    def distinct_items(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.counts)

    def multiplicity(self, item: int) -> int:
        for i, c in self.counts:
            if i == item:
                return c
        return 0

    def scaled(self, factor: int) -> MultiBundle:
        """The multi-bundle holding ``factor`` copies of every item here."""
        if factor < 1:
            raise ValueError("scaling factor must be >= 1")
        return MultiBundle(tuple((i, c * factor) for i, c in self.counts))

    def expand(self) -> Iterator[int]:
        """Every item, repeated by its multiplicity."""
        for item, count in self.counts:
            for _ in range(count):
                yield item

    def levels(self, ranking: Ranking, *, worst_first: bool = False) -> list[int]:
        """Item levels with multiplicity, best-first (or worst-first)."""
        out = [ranking.level(item) for item in self.expand()]
        out.sort(reverse=not worst_first)
        return out

    def __contains__(self, item: int) -> bool:
        return self.multiplicity(item) > 0

    def __len__(self) -> int:
        return self.size


@dataclass(frozen=True)
class Allocation:
    """A partition of the item set into per-agent bundles (possibly empty)."""

    bundles: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        bundles = tuple(tuple(sorted(b)) for b in self.bundles)
        object.__setattr__(self, "bundles", bundles)
        seen: set[int] = set()
        for bundle in bundles:
            for item in bundle:
                if item in seen:
                    raise ValueError(f"item {item} assigned to more than one agent")
                seen.add(item)

    @classmethod
    def from_lists(cls, bundles: Iterable[Iterable[int]]) -> Allocation:
        return cls(tuple(tuple(b) for b in bundles))

    @property
    def agent_count(self) -> int:
        return len(self.bundles)

    def bundle(self, agent: int) -> MultiBundle:
        return MultiBundle.from_items(self.bundles[agent])

    def all_items(self) -> frozenset[int]:
        return frozenset(item for bundle in self.bundles for item in bundle)

    def is_partition_of(self, item_count: int) -> bool:
        return self.all_items() == frozenset(range(item_count)) and sum(
            len(b) for b in self.bundles
        ) == item_count


@dataclass(frozen=True)
class Instance:
    """A fair-division instance: item kind plus one strict ranking per agent."""

    kind: ItemKind
    rankings: tuple[Ranking, ...]

    def __post_init__(self) -> None:
        rankings = tuple(self.rankings)
        object.__setattr__(self, "rankings", rankings)
        if not rankings:
            raise ValueError("an instance needs at least one agent")
        m = rankings[0].item_count
        if any(r.item_count != m for r in rankings):
            raise ValueError("all rankings must order the same item set")

    @property
    def agent_count(self) -> int:
        return len(self.rankings)

    @property
    def item_count(self) -> int:
        return self.rankings[0].item_count

    def full_bundle(self) -> MultiBundle:
        """One copy of every item."""
        return MultiBundle.from_items(range(self.item_count))


@dataclass(frozen=True)
class UtilityFunction:
    """An additive item-utility function, dense over items ``0..M-1``.

    Exact values (int / Fraction) are used on oracle paths, 64-bit floats on
    simulation paths; the classification helpers honour both.
    """

    values: tuple[Value, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(self.values))

    def value(self, item: int) -> Value:
        if not 0 <= item < len(self.values):
            raise KeyError(f"no utility value for item {item!r}")
        return self.values[item]

    def of(self, bundle: MultiBundle) -> Value:
        """Utility of a multi-bundle: the multiplicity-weighted sum."""
        return sum(count * self.value(item) for item, count in bundle.counts)

    @property
    def sign(self) -> int:
        """+1 if all values are positive, -1 if all negative, 0 otherwise."""
        if all(v > 0 for v in self.values):
            return 1
        if all(v < 0 for v in self.values):
            return -1
        return 0

    def is_consistent_with(self, ranking: Ranking) -> bool:
        """Strict consistency: better-ranked items have strictly larger values."""
        order = ranking.order
        return all(
            self.values[order[j]] > self.values[order[j + 1]]
            for j in range(len(order) - 1)
        )

    @classmethod
    def from_level_function(cls, ranking: Ranking, fn: Callable[[int], Value]) -> UtilityFunction:
        """Build a utility from a function of the item's level."""
        return cls(tuple(fn(ranking.level(item)) for item in range(ranking.item_count)))


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def level_prefix_sums(bundle: MultiBundle, ranking: Ranking, direction: str = "top") -> list[int]:
    """Cumulative levels of the k best ("top") or k worst ("bottom") items.

    ``result[k-1]`` is the total level of the k best (resp. worst) items of
    the bundle, counted with multiplicity.  Copies of the same item share a
    level, so ties between copies do not affect the sums.
    """
    if direction not in ("top", "bottom"):
        raise ValueError(f"direction must be 'top' or 'bottom', got {direction!r}")
    levels = bundle.levels(ranking, worst_first=(direction == "bottom"))
    sums: list[int] = []
    running = 0
    for level in levels:
        running += level
        sums.append(running)
    return sums


def utility_of(bundle: MultiBundle, utility: UtilityFunction) -> Value:
    """Additive utility of a multi-bundle."""
    return utility.of(bundle)


def _is_float_valued(utility: UtilityFunction) -> bool:
    return any(isinstance(v, float) for v in utility.values)


def classify_dd(utility: UtilityFunction, ranking: Ranking) -> bool:
    """True iff the utility is consistent and has diminishing differences.

    Diminishing differences: for consecutive levels the gap at the top is at
    least the gap immediately below it.
    """
    if not utility.is_consistent_with(ranking):
        return False
    tol = FLOAT_TOLERANCE if _is_float_valued(utility) else 0
    order = ranking.order
    for j in range(len(order) - 2):
        top_gap = utility.value(order[j]) - utility.value(order[j + 1])
        bottom_gap = utility.value(order[j + 1]) - utility.value(order[j + 2])
        if top_gap < bottom_gap - tol:
            return False
    return True


def classify_id(utility: UtilityFunction, ranking: Ranking) -> bool:
    """True iff the utility is consistent and has increasing differences.

    The chore-side mirror of :func:`classify_dd`: gaps grow toward the bottom.
    """
    if not utility.is_consistent_with(ranking):
        return False
    tol = FLOAT_TOLERANCE if _is_float_valued(utility) else 0
    order = ranking.order
    for j in range(len(order) - 2):
        top_gap = utility.value(order[j]) - utility.value(order[j + 1])
        bottom_gap = utility.value(order[j + 1]) - utility.value(order[j + 2])
        if top_gap > bottom_gap + tol:
            return False
    return True


def classify_binary(utility: UtilityFunction, ranking: Ranking) -> bool:
    """True iff the utility is 1 on the k best items and 0 below, for some k."""
    m = ranking.item_count
    if len(utility.values) != m:
        return False
    for k in range(1, m + 1):
        if all(
            utility.value(item) == (1 if ranking.level(item) >= k else 0)
            for item in range(m)
        ):
            return True
    return False


# ---------------------------------------------------------------------------
# Common utility families
# ---------------------------------------------------------------------------

def borda_utility(ranking: Ranking) -> UtilityFunction:
    """u(item) = level(item); the canonical diminishing-differences utility."""
    return UtilityFunction.from_level_function(ranking, lambda lev: lev)


def lexicographic_utility(ranking: Ranking) -> UtilityFunction:
    """u(item) = 2^level(item); orders bundles lexicographically by best items."""
    return UtilityFunction.from_level_function(ranking, lambda lev: 1 << lev)


def negative_borda_utility(ranking: Ranking) -> UtilityFunction:
    """u(item) = level(item) - M - 1; chore utilities -1 (easiest) .. -M."""
    m = ranking.item_count
    return UtilityFunction.from_level_function(ranking, lambda lev: lev - m - 1)


def negative_lexicographic_utility(ranking: Ranking) -> UtilityFunction:
    """u(item) = -2^(M - level(item)); ranks bundles by avoiding the worst chores."""
    m = ranking.item_count
    return UtilityFunction.from_level_function(ranking, lambda lev: -(1 << (m - lev)))


def binary_threshold_utility(ranking: Ranking, threshold: int) -> UtilityFunction:
    """u(item) = 1 if level(item) >= threshold else 0."""
    if not 1 <= threshold <= ranking.item_count:
        raise ValueError(f"threshold must be in 1..{ranking.item_count}")
    return UtilityFunction.from_level_function(
        ranking, lambda lev: 1 if lev >= threshold else 0
    )
