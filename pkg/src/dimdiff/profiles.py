"""Named-profile JSON I/O, bundle syntax, and a PrefLib import shim.

The on-disk profile format is JSON::

    {"kind": "goods" | "chores",
     "items": ["name", ...],
     "agents": [{"name": "...", "ranking": ["best", ..., "worst"]}, ...]}

Internally items are dense integers in the order of the ``items`` list; the
:class:`NamedProfile` wrapper keeps the name maps for the CLI.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from .core import Allocation, Instance, ItemKind, MultiBundle, Ranking


@dataclass(frozen=True)
class NamedProfile:
    instance: Instance
    item_names: tuple[str, ...]
    agent_names: tuple[str, ...]

    def item_id(self, name: str) -> int:
        try:
            return self.item_names.index(name)
        except ValueError:
            raise KeyError(f"unknown item {name!r}") from None

    def agent_id(self, name: str) -> int:
        try:
            return self.agent_names.index(name)
        except ValueError:
            raise KeyError(f"unknown agent {name!r}") from None


def profile_from_json(payload: dict) -> NamedProfile:
    kind = ItemKind(payload["kind"])
    item_names = tuple(str(name) for name in payload["items"])
    if len(set(item_names)) != len(item_names):
        raise ValueError("item names must be unique")
    index = {name: i for i, name in enumerate(item_names)}
    agent_names = []
    rankings = []
    for entry in payload["agents"]:
        agent_names.append(str(entry["name"]))
        order = [index[str(name)] for name in entry["ranking"]]
        if sorted(order) != list(range(len(item_names))):
            raise ValueError(
                f"ranking of agent {entry['name']!r} is not a permutation of the items"
            )
        rankings.append(Ranking(tuple(order)))
    if len(set(agent_names)) != len(agent_names):
        raise ValueError("agent names must be unique")
    instance = Instance(kind=kind, rankings=tuple(rankings))
    return NamedProfile(instance, item_names, tuple(agent_names))


def profile_to_json(profile: NamedProfile) -> dict:
    return {
        "kind": profile.instance.kind.value,
        "items": list(profile.item_names),
        "agents": [
            {
                "name": profile.agent_names[a],
                "ranking": [profile.item_names[i] for i in ranking.order],
            }
            for a, ranking in enumerate(profile.instance.rankings)
        ],
    }


def load_profile(path: str) -> NamedProfile:
    with open(path, encoding="utf-8") as handle:
        return profile_from_json(json.load(handle))


def save_profile(profile: NamedProfile, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(profile_to_json(profile), handle, indent=2)
        handle.write("\n")


def default_profile(instance: Instance) -> NamedProfile:
    """Positional names for instances built in code."""
    return NamedProfile(
        instance,
        tuple(f"item{i}" for i in range(instance.item_count)),
        tuple(f"agent{a}" for a in range(instance.agent_count)),
    )


# ---------------------------------------------------------------------------
# Bundle / allocation syntax
# ---------------------------------------------------------------------------

def parse_bundle(text: str, profile: NamedProfile) -> MultiBundle:
    """Parse ``a,b*2,c`` into a multi-bundle; ``*k`` repeats an item."""
    counts: dict[int, int] = {}
    for raw in text.split(","):
        token = raw.strip()
        if not token:
            continue
        name, _, repeat = token.partition("*")
        multiplicity = 1
        if repeat:
            multiplicity = int(repeat)
            if multiplicity < 1:
                raise ValueError(f"multiplicity in {token!r} must be >= 1")
        item = profile.item_id(name.strip())
        counts[item] = counts.get(item, 0) + multiplicity
    return MultiBundle.from_counts(counts)


def allocation_from_json(payload: dict, profile: NamedProfile) -> Allocation:
    """Decode ``{"agent": ["item", ...], ...}``; agents may be omitted (empty)."""
    unknown = set(payload) - set(profile.agent_names)
    if unknown:
        raise ValueError(f"unknown agents in allocation: {sorted(unknown)}")
    bundles = []
    for name in profile.agent_names:
        items = payload.get(name, [])
        bundles.append(tuple(profile.item_id(str(item)) for item in items))
    alloc = Allocation(tuple(bundles))
    if not alloc.is_partition_of(profile.instance.item_count):
        raise ValueError("allocation does not assign every item exactly once")
    return alloc


def allocation_to_json(alloc: Allocation, profile: NamedProfile) -> dict:
    return {
        profile.agent_names[a]: [profile.item_names[i] for i in alloc.bundles[a]]
        for a in range(alloc.agent_count)
    }


# ---------------------------------------------------------------------------
# PrefLib strict-order import (convenience reader only)
# ---------------------------------------------------------------------------

def load_preflib_soc(path: str, kind: ItemKind = ItemKind.GOODS) -> NamedProfile:
    """Read a PrefLib .soc file (complete strict orders) as a profile.

    Metadata lines start with ``#``; each data line is
    ``count: alt,alt,...`` with 1-based alternative numbers, expanded to
    ``count`` agents sharing the ranking.
    """
    names: dict[int, str] = {}
    alternative_count = 0
    orders: list[tuple[int, list[int]]] = []
    with open(path, encoding="utf-8") as handle:
        for raw in handle:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                key, _, value = body.partition(":")
                key = key.strip().upper()
                if key == "NUMBER ALTERNATIVES":
                    alternative_count = int(value.strip())
                elif key.startswith("ALTERNATIVE NAME"):
                    number = int(key.rsplit(None, 1)[1])
                    names[number] = value.strip()
                continue
            count_text, _, ranking_text = line.partition(":")
            count = int(count_text.strip())
            order = [int(tok.strip()) for tok in ranking_text.split(",")]
            orders.append((count, order))
    if not orders:
        raise ValueError(f"{path} contains no preference lines")
    if not alternative_count:
        alternative_count = max(max(order) for _, order in orders)
    item_names = tuple(
        names.get(number, f"alt{number}") for number in range(1, alternative_count + 1)
    )
    rankings = []
    agent_names = []
    voter = 0
    for count, order in orders:
        ranking = Ranking(tuple(number - 1 for number in order))
        for _ in range(count):
            voter += 1
            agent_names.append(f"voter{voter}")
            rankings.append(ranking)
    instance = Instance(kind=kind, rankings=tuple(rankings))
    return NamedProfile(instance, item_names, tuple(agent_names))
