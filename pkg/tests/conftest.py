"""Shared helpers: most worked examples label items by their level."""

from __future__ import annotations

import pytest

from dimdiff.core import MultiBundle, Ranking


def level_ranking(item_count: int) -> Ranking:
    """Ranking in which item i has level i+1 (so label = level)."""
    return Ranking(tuple(range(item_count - 1, -1, -1)))


def by_levels(*levels: int) -> MultiBundle:
    """Bundle of the items whose levels (under level_ranking) are given."""
    return MultiBundle.from_items(lev - 1 for lev in levels)


def mb(*items: int) -> MultiBundle:
    return MultiBundle.from_items(items)


@pytest.fixture
def eight_items() -> Ranking:
    return level_ranking(8)
