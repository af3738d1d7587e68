"""Set-extension relations over multi-bundles, plus independent oracles.

Eight relations lift a single agent's item ranking to a partial order over
multi-bundles:

* ``NEC`` / ``POS`` - dominance for all / at least one additive utility
  consistent with the ranking;
* ``NDD`` / ``PDD`` - the same, restricted to diminishing-differences
  utilities (goods);
* ``NID`` / ``PID`` - the same, restricted to increasing-differences
  utilities (chores);
* ``NBIN`` / ``PBIN`` - the same, restricted to the M binary threshold
  utilities.

Every checker is exact and runs in O(M) time after sorting bundle levels.
Two independent validation routes are provided: a cone-generator oracle for
NDD, and a randomized utility refuter for the "necessary" relations.
"""

from __future__ import annotations

import random
from enum import Enum
from fractions import Fraction
from typing import Optional

from .core import MultiBundle, Ranking, UtilityFunction, binary_threshold_utility


class RelationKind(Enum):
    NEC = "nec"
    POS = "pos"
    NDD = "ndd"
    PDD = "pdd"
    NID = "nid"
    PID = "pid"
    NBIN = "nbin"
    PBIN = "pbin"


#: Relations whose utility classes consist of positive (goods) valuations.
GOODS_RELATIONS = frozenset(
    {RelationKind.NEC, RelationKind.POS, RelationKind.NDD, RelationKind.PDD,
     RelationKind.NBIN, RelationKind.PBIN}
)
#: Relations whose utility classes consist of negative (chores) valuations.
CHORES_RELATIONS = frozenset({RelationKind.NID, RelationKind.PID})


def holds(kind: RelationKind, x: MultiBundle, y: MultiBundle, ranking: Ranking) -> bool:
    """Exact truth value of ``x (weakly better than) y`` under the relation."""
    checker = _CHECKERS[kind]
    return checker(x, y, ranking)


# ---------------------------------------------------------------------------
# Individual relations
# ---------------------------------------------------------------------------

def _ndd(x: MultiBundle, y: MultiBundle, ranking: Ranking) -> bool:
    # x is at least as large, and every top-k prefix level of x weakly
    # dominates y's.  Checked by accumulating the running level difference.
    lx = x.levels(ranking)
    ly = y.levels(ranking)
    if len(lx) < len(ly):
        return False
    total_diff = 0
    for level_x, level_y in zip(lx, ly):
        total_diff += level_x - level_y
        if total_diff < 0:
            return False
    return True


def _pdd(x: MultiBundle, y: MultiBundle, ranking: Ranking) -> bool:
    # Holds when x is strictly larger, or some top-k prefix of x strictly
    # beats y's, or x's total level weakly dominates.  The total-level
    # condition is weak on purpose: at the boundary every diminishing-
    # differences utility can tie.
    lx = x.levels(ranking)
    ly = y.levels(ranking)
    if len(lx) > len(ly):
        return True
    total_diff = 0
    for level_x, level_y in zip(lx, ly):
        total_diff += level_x - level_y
        if total_diff > 0:
            return True
    return sum(lx) >= sum(ly)


def _nec(x: MultiBundle, y: MultiBundle, ranking: Ranking) -> bool:
    # Responsive dominance: x is at least as large, and for every k the k-th
    # best item of x is ranked weakly above the k-th best item of y.
    lx = x.levels(ranking)
    ly = y.levels(ranking)
    if len(lx) < len(ly):
        return False
    return all(level_x >= level_y for level_x, level_y in zip(lx, ly))


def _strictly_count_dominates(y: MultiBundle, x: MultiBundle, ranking: Ranking) -> bool:
    """True iff y beats x by a strict margin at every count threshold.

    Exactly then does every utility consistent with the ranking (and every
    limit of such utilities) value y strictly above x.  Pairwise form: y has
    strictly more items, y's best item has the top level, and y's (k+1)-th
    best item is ranked weakly above x's k-th best for every k.
    """
    lx = x.levels(ranking)
    ly = y.levels(ranking)
    if len(ly) < len(lx) + 1:
        return False
    if ly[0] != ranking.item_count:
        return False
    return all(ly[k + 1] >= lx[k] for k in range(len(lx)))


def _pos(x: MultiBundle, y: MultiBundle, ranking: Ranking) -> bool:
    # Dual of the necessary relation: x is possibly as good as y unless y
    # strictly dominates x for the whole consistent-utility class.
    return not _strictly_count_dominates(y, x, ranking)


def _nid(x: MultiBundle, y: MultiBundle, ranking: Ranking) -> bool:
    # Increasing differences mirror diminishing differences under the
    # inverse ranking, with the bundle roles swapped.
    return _ndd(y, x, ranking.reversed())


def _pid(x: MultiBundle, y: MultiBundle, ranking: Ranking) -> bool:
    return _pdd(y, x, ranking.reversed())


def threshold_counts(bundle: MultiBundle, ranking: Ranking) -> list[int]:
    """``result[k-1]`` = number of items (with multiplicity) of level >= k."""
    m = ranking.item_count
    histogram = [0] * (m + 2)
    for item, count in bundle.counts:
        histogram[ranking.level(item)] += count
    suffix = [0] * (m + 1)
    running = 0
    for level in range(m, 0, -1):
        running += histogram[level]
        suffix[level] = running
    return suffix[1:]


def _nbin(x: MultiBundle, y: MultiBundle, ranking: Ranking) -> bool:
    cx = threshold_counts(x, ranking)
    cy = threshold_counts(y, ranking)
    return all(a >= b for a, b in zip(cx, cy))


def _pbin(x: MultiBundle, y: MultiBundle, ranking: Ranking) -> bool:
    cx = threshold_counts(x, ranking)
    cy = threshold_counts(y, ranking)
    return any(a >= b for a, b in zip(cx, cy))


_CHECKERS = {
    RelationKind.NEC: _nec,
    RelationKind.POS: _pos,
    RelationKind.NDD: _ndd,
    RelationKind.PDD: _pdd,
    RelationKind.NID: _nid,
    RelationKind.PID: _pid,
    RelationKind.NBIN: _nbin,
    RelationKind.PBIN: _pbin,
}


# ---------------------------------------------------------------------------
# Independent NDD oracle
# ---------------------------------------------------------------------------

def ndd_generator_oracle(x: MultiBundle, y: MultiBundle, ranking: Ranking) -> bool:
    """NDD decided through the generators of the diminishing-differences cone.

    Every diminishing-differences utility is a positive combination of the
    constant function and the hinge functions ``max(0, level - k)``, so the
    relation holds iff x dominates y on every generator: on bundle size and
    on every hinge sum for k = 1..M-1.
    """
    if x.size < y.size:
        return False
    m = ranking.item_count
    lx = x.levels(ranking)
    ly = y.levels(ranking)
    for k in range(1, m):
        hinge_x = sum(level - k for level in lx if level > k)
        hinge_y = sum(level - k for level in ly if level > k)
        if hinge_x < hinge_y:
            return False
    return True


# ---------------------------------------------------------------------------
# Explicit refuting utilities (deterministic constructions)
# ---------------------------------------------------------------------------

def refuting_utility(
    kind: RelationKind, x: MultiBundle, y: MultiBundle, ranking: Ranking
) -> Optional[UtilityFunction]:
    """A utility in the relation's class with u(x) < u(y), if the relation fails.

    Returns None when the relation holds.  The construction is deterministic
    and exact, so a returned utility is a checkable certificate.
    """
    if kind is RelationKind.NDD:
        return _ndd_refuting_utility(x, y, ranking)
    if kind is RelationKind.NEC:
        return _nec_refuting_utility(x, y, ranking)
    if kind is RelationKind.NID:
        return _nid_refuting_utility(x, y, ranking)
    raise ValueError(f"no refuting-utility construction for {kind}")


def two_scale_utility(ranking: Ranking, cutoff: int, unit: int) -> UtilityFunction:
    """Items of level >= cutoff are worth multiples of ``unit``, the rest keep
    their plain levels.  Has diminishing differences whenever unit >= cutoff."""
    base = cutoff - 1
    return UtilityFunction.from_level_function(
        ranking, lambda lev: (lev - base) * unit if lev >= cutoff else lev
    )


def _hinge_refuting_utility(
    x: MultiBundle, y: MultiBundle, ranking: Ranking
) -> Optional[UtilityFunction]:
    # A failing cone generator max(0, level - t), boosted enough to decide the
    # comparison on its own, always yields a refuting DD utility.
    m = ranking.item_count
    lx = x.levels(ranking)
    ly = y.levels(ranking)
    unit = m * (len(lx) + len(ly) + 1)
    for t in range(1, m):
        hinge_x = sum(level - t for level in lx if level > t)
        hinge_y = sum(level - t for level in ly if level > t)
        if hinge_x < hinge_y:
            return UtilityFunction.from_level_function(
                ranking, lambda lev, t=t: max(0, lev - t) * unit + lev
            )
    return None


def _ndd_refuting_utility(
    x: MultiBundle, y: MultiBundle, ranking: Ranking
) -> Optional[UtilityFunction]:
    m = ranking.item_count
    lx = x.levels(ranking)
    ly = y.levels(ranking)

    if len(lx) < len(ly):
        # Cardinality-dominant utility: a constant so large that having more
        # items always wins; differences between adjacent levels are all 1.
        offset = m * len(ly)
        return UtilityFunction.from_level_function(ranking, lambda lev: offset + lev)

    total_diff = 0
    for k, (level_x, level_y) in enumerate(zip(lx, ly), start=1):
        total_diff += level_x - level_y
        if total_diff < 0:
            # Two-scale utility keyed to the smallest failing prefix.  With
            # extra copies of x's k-th best item the two-scale value can fail
            # to refute, so verify and fall back to a failing cone generator.
            candidate = two_scale_utility(ranking, lx[k - 1], m * len(lx))
            if candidate.of(x) < candidate.of(y):
                return candidate
            return _hinge_refuting_utility(x, y, ranking)
    return None


def _nec_refuting_utility(
    x: MultiBundle, y: MultiBundle, ranking: Ranking
) -> Optional[UtilityFunction]:
    m = ranking.item_count
    lx = x.levels(ranking)
    ly = y.levels(ranking)

    if len(lx) < len(ly):
        offset = m * len(ly)
        return UtilityFunction.from_level_function(ranking, lambda lev: offset + lev)

    for level_x, level_y in zip(lx, ly):
        if level_x < level_y:
            # Near-threshold utility: items of level >= cutoff are worth about
            # one, the rest nearly nothing.  The epsilon slope keeps it
            # strictly consistent while the unit gap decides the comparison.
            cutoff = level_y
            epsilon = Fraction(1, 2 * m * (len(lx) + len(ly) + 1))

            def near_threshold(lev: int, cutoff: int = cutoff, epsilon: Fraction = epsilon) -> Fraction:
                return (1 if lev >= cutoff else 0) + epsilon * lev

            return UtilityFunction.from_level_function(ranking, near_threshold)
    return None


def _nid_refuting_utility(
    x: MultiBundle, y: MultiBundle, ranking: Ranking
) -> Optional[UtilityFunction]:
    # An increasing-differences utility refuting x >= y is the negation of a
    # diminishing-differences utility refuting y >= x under the inverse order.
    reversed_ranking = ranking.reversed()
    witness = _ndd_refuting_utility(y, x, reversed_ranking)
    if witness is None:
        return None
    return UtilityFunction(tuple(-v for v in witness.values))


# ---------------------------------------------------------------------------
# Random utility samplers and the sampled refuter
# ---------------------------------------------------------------------------

def sample_dd_utility(ranking: Ranking, rng: random.Random) -> UtilityFunction:
    """A random diminishing-differences utility, full support on the cone interior.

    M-1 increments are drawn i.i.d. uniform on (0, 1] and sorted ascending, so
    the gap grows with the level; the prefix sums start from a uniform base.
    """
    m = ranking.item_count
    increments = sorted(1.0 - rng.random() for _ in range(m - 1))
    by_level = [1.0 - rng.random()]
    for inc in increments:
        by_level.append(by_level[-1] + inc)
    return UtilityFunction.from_level_function(ranking, lambda lev: by_level[lev - 1])


def sample_id_utility(ranking: Ranking, rng: random.Random) -> UtilityFunction:
    """A random increasing-differences chore utility (all values negative)."""
    mirrored = sample_dd_utility(ranking.reversed(), rng)
    return UtilityFunction(tuple(-v for v in mirrored.values))


def sample_consistent_utility(ranking: Ranking, rng: random.Random) -> UtilityFunction:
    """A random positive utility consistent with the ranking."""
    m = ranking.item_count
    draws = sorted(1.0 - rng.random() for _ in range(m))
    return UtilityFunction.from_level_function(ranking, lambda lev: draws[lev - 1])


_SAMPLERS = {
    RelationKind.NDD: sample_dd_utility,
    RelationKind.NID: sample_id_utility,
    RelationKind.NEC: sample_consistent_utility,
}


def sampled_utility_refuter(
    kind: RelationKind,
    x: MultiBundle,
    y: MultiBundle,
    ranking: Ranking,
    samples: int,
    seed: int,
) -> Optional[UtilityFunction]:
    """Search the relation's utility class for a witness with u(x) < u(y).

    A returned utility genuinely violates the relation (sound refuter);
    returning None proves nothing, except for NBIN where the M threshold
    utilities are enumerated exactly.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if kind is RelationKind.NBIN:
        for k in range(1, ranking.item_count + 1):
            utility = binary_threshold_utility(ranking, k)
            if utility.of(x) < utility.of(y):
                return utility
        return None
    try:
        sampler = _SAMPLERS[kind]
    except KeyError:
        raise ValueError(f"no utility sampler for {kind}") from None
    rng = random.Random(seed)
    for _ in range(samples):
        utility = sampler(ranking, rng)
        if utility.of(x) < utility.of(y):
            return utility
    return None
