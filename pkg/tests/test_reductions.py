"""Exact-3-cover solver, the envy-freeness reduction, structured search."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from dimdiff.core import ItemKind
from dimdiff.extensions import RelationKind
from dimdiff.fairness import Criterion, check_envy_free
from dimdiff.reductions import (
    X3CInstance,
    nddef_search_reduced,
    reduce_x3c,
    solve_x3c,
    x3c_from_json,
    x3c_to_json,
)
from dimdiff.search import AllocationGoal, exists_allocation


def x3c_instances(max_cover=3):
    @st.composite
    def build(draw):
        q = draw(st.integers(1, max_cover))
        n = draw(st.integers(q, max_cover))
        elements = st.sets(st.integers(0, 3 * q - 1), min_size=3, max_size=3)
        triples = tuple(
            tuple(draw(elements.flatmap(lambda s: st.permutations(sorted(s)))))
            for _ in range(n)
        )
        return X3CInstance(3 * q, triples)

    return build()


def independent_cover_search(x3c):
    """Recursive cover check, independent of the combinations-based solver."""
    base = frozenset(range(x3c.base_size))

    def extend(covered, start):
        if covered == base:
            return True
        for index in range(start, x3c.triplet_count):
            triple = frozenset(x3c.triplets[index])
            if covered & triple:
                continue
            if extend(covered | triple, index + 1):
                return True
        return False

    return extend(frozenset(), 0)


# --- instance type ------------------------------------------------------------

def test_x3c_validation():
    with pytest.raises(ValueError):
        X3CInstance(4, ((0, 1, 2),))
    with pytest.raises(ValueError):
        X3CInstance(3, ())
    with pytest.raises(ValueError):
        X3CInstance(3, ((0, 0, 1),))
    with pytest.raises(ValueError):
        X3CInstance(3, ((0, 1, 5),))


def test_x3c_json_round_trip():
    inst = X3CInstance(6, ((0, 1, 2), (3, 4, 5)))
    assert x3c_from_json(x3c_to_json(inst)) == inst


def test_solver_fixtures():
    partition = X3CInstance(6, ((0, 1, 2), (3, 4, 5)))
    assert solve_x3c(partition) == (0, 1)
    shared = X3CInstance(6, ((0, 1, 2), (0, 3, 4)))
    assert solve_x3c(shared) is None


@settings(max_examples=80, deadline=None)
@given(x3c_instances())
def test_solver_matches_independent_search(x3c):
    assert (solve_x3c(x3c) is not None) == independent_cover_search(x3c)


def test_solver_verifies_disjoint_cover():
    inst = X3CInstance(9, ((0, 1, 2), (2, 3, 4), (3, 4, 5), (6, 7, 8)))
    cover = solve_x3c(inst)
    assert cover is not None
    chosen = [set(inst.triplets[i]) for i in cover]
    assert len(set().union(*chosen)) == 9


# --- reduction structure -------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(x3c_instances())
def test_reduced_instance_structure(x3c):
    reduced = reduce_x3c(x3c)
    inst = reduced.instance
    n, q = x3c.triplet_count, x3c.cover_size
    assert inst.kind is ItemKind.GOODS
    assert inst.item_count == 6 * n
    assert inst.agent_count == 3 * n
    # Dummy triples are pairwise disjoint and each agent tops its own dummy.
    dummy_items = [d for triple in reduced.dummy_triples for d in triple]
    assert len(set(dummy_items)) == 3 * n
    for i in range(n):
        for slot in range(3):
            agent = reduced.agent_triples[i][slot]
            ranking = inst.rankings[agent]
            assert ranking.best == reduced.dummy_triples[i][slot]
            # Own dummies, then the triple's mains, fill the top six places.
            top_six = set(ranking.order[:6])
            expected = set(reduced.dummy_triples[i]) | {
                reduced.main_items[e] for e in x3c.triplets[i]
            }
            assert top_six == expected


def test_reduction_fixture_rows():
    trivial = X3CInstance(3, ((0, 1, 2),))
    reduced = reduce_x3c(trivial)
    assert reduced.instance.item_count == 6 and reduced.instance.agent_count == 3
    witness = nddef_search_reduced(reduced)
    assert witness is not None
    assert check_envy_free(witness, reduced.instance, RelationKind.NDD).result

    spare = X3CInstance(3, ((0, 1, 2), (0, 1, 2)))
    assert solve_x3c(spare) is not None
    assert nddef_search_reduced(reduce_x3c(spare)) is not None

    overlap = X3CInstance(6, ((0, 1, 2), (0, 3, 4)))
    assert solve_x3c(overlap) is None
    assert nddef_search_reduced(reduce_x3c(overlap)) is None


def test_structured_search_agrees_with_generic_on_trivial_instance():
    reduced = reduce_x3c(X3CInstance(3, ((0, 1, 2),)))
    structured = nddef_search_reduced(reduced)
    generic = exists_allocation(
        reduced.instance, AllocationGoal(Criterion.ENVY_FREENESS, RelationKind.NDD)
    )
    assert structured is not None and generic is not None
    assert check_envy_free(generic, reduced.instance, RelationKind.NDD).result


def test_rotation_tie_counterexample_is_real():
    # Documented limit of the construction: agents of a triple can hold that
    # triple's main items rotated off their designated favorites, producing
    # exact score ties that the weak DD relation tolerates.  This coverless
    # instance therefore has an envy-free allocation, so cover-existence and
    # envy-freeness-existence genuinely diverge here (see the acceptance
    # suite, criterion 6, which exercises the claimed equivalence).
    inst = X3CInstance(6, ((0, 1, 2), (0, 3, 4), (2, 3, 5)))
    assert solve_x3c(inst) is None
    reduced = reduce_x3c(inst)
    witness = nddef_search_reduced(reduced)
    assert witness is not None
    assert check_envy_free(witness, reduced.instance, RelationKind.NDD).result


def test_structured_search_requires_reduced_shape():
    from dimdiff.core import Instance, Ranking
    from dimdiff.reductions import ReducedInstance

    lopsided = ReducedInstance(
        Instance(ItemKind.GOODS, (Ranking((0, 1, 2)), Ranking((1, 0, 2)))),
        (), (), (), (),
    )
    with pytest.raises(ValueError):
        nddef_search_reduced(lopsided)


def test_cover_always_yields_envy_free_allocation():
    rng = random.Random(30)
    produced = 0
    while produced < 25:
        q = rng.randint(1, 2)
        n = rng.randint(q, 3)
        triples = tuple(
            tuple(rng.sample(range(3 * q), 3)) for _ in range(n)
        )
        x3c = X3CInstance(3 * q, triples)
        if solve_x3c(x3c) is None:
            continue
        produced += 1
        reduced = reduce_x3c(x3c)
        witness = nddef_search_reduced(reduced)
        assert witness is not None
        assert check_envy_free(witness, reduced.instance, RelationKind.NDD).result
