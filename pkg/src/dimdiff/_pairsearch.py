"""Vectorized search kernels for two-agent proportionality predicates.

The generic search in :mod:`dimdiff.search` enumerates allocations one by
one; for two agents the per-trial work in the simulation would be far too
slow in pure Python, so these kernels evaluate whole blocks of candidate
splits with numpy.  They must return exactly the witness the generic
enumeration would return: splits are encoded as item-indexed bitmasks (bit
set = item goes to agent 1, item 0 in the most significant position), so
ascending mask order equals the generic lexicographic assignment order.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Optional

import numpy as np

_CHUNK = 8192


@lru_cache(maxsize=32)
def _equal_split_tables(item_count: int, size: int) -> tuple[np.ndarray, np.ndarray]:
    """All masks with ``size`` bits set, ascending, plus their bit matrix."""
    masks = []
    mask = (1 << size) - 1
    limit = 1 << item_count
    while mask < limit:
        masks.append(mask)
        # Gosper's hack: next integer with the same popcount.
        low = mask & -mask
        ripple = mask + low
        mask = ripple | (((mask ^ ripple) >> 2) // low)
        if low == 0:  # pragma: no cover - size == 0 handled by caller
            break
    arr = np.array(masks, dtype=np.int64)
    return arr, _bits_of(arr, item_count)


def _bits_of(masks: np.ndarray, item_count: int) -> np.ndarray:
    shifts = np.arange(item_count - 1, -1, -1, dtype=np.int64)
    return ((masks[:, None] >> shifts[None, :]) & 1).astype(np.uint8)


def _full_prefix_levels(item_count: int) -> np.ndarray:
    """prefix[k] = total level of the k best items of the full item set."""
    k = np.arange(2 * item_count + 1, dtype=np.int64)
    capped = np.minimum(k, item_count)
    return capped * item_count - capped * (capped - 1) // 2


def _rank_statistics(
    bits: np.ndarray, perm: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-split membership, cumulative counts and cumulative levels by rank."""
    item_count = bits.shape[1]
    ranked = bits[:, perm]
    counts = np.cumsum(ranked, axis=1, dtype=np.int64)
    levels = (item_count - np.arange(item_count, dtype=np.int64))[None, :]
    cumulative_levels = np.cumsum(ranked * levels, axis=1, dtype=np.int64)
    return ranked.astype(bool), counts, cumulative_levels


@lru_cache(maxsize=8)
def _equal_rank_statistics(
    item_count: int, perm: tuple[int, ...], invert: bool
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # The relation checks for both equal-split relations share these arrays;
    # the cache keeps them alive across the per-trial relation calls.
    _, bits = _equal_split_tables(item_count, item_count // 2)
    side = 1 - bits if invert else bits
    return _rank_statistics(side, np.array(perm, dtype=np.int64))


def _ok_nec(stats: tuple[np.ndarray, np.ndarray, np.ndarray], item_count: int) -> np.ndarray:
    # Doubled bundle count-dominates the full set at every threshold:
    # among the agent's j best items the split holds at least ceil(j/2).
    _, counts, _ = stats
    j = np.arange(1, item_count + 1, dtype=np.int64)[None, :]
    return (2 * counts >= j).all(axis=1)


def _ok_pos(stats: tuple[np.ndarray, np.ndarray, np.ndarray], item_count: int) -> np.ndarray:
    # Dual: some threshold where the doubled bundle is not strictly beaten.
    _, counts, _ = stats
    j = np.arange(1, item_count + 1, dtype=np.int64)[None, :]
    return (2 * counts >= j).any(axis=1)


def _ok_ndd(stats: tuple[np.ndarray, np.ndarray, np.ndarray], item_count: int) -> np.ndarray:
    # Equal splits only: every prefix of the doubled bundle weakly dominates
    # the full set's prefix.  At a selected rank with running count c the
    # doubled prefixes of length 2c and 2c-1 are tested; together these cover
    # every prefix length.
    ranked, counts, cum_levels = stats
    levels = (item_count - np.arange(item_count, dtype=np.int64))[None, :]
    full = _full_prefix_levels(item_count)
    even_ok = 2 * cum_levels >= full[2 * counts]
    odd_ok = 2 * cum_levels - levels >= full[np.maximum(2 * counts - 1, 0)]
    return np.where(ranked, even_ok & odd_ok, True).all(axis=1)


def _ok_pdd(stats: tuple[np.ndarray, np.ndarray, np.ndarray], item_count: int) -> np.ndarray:
    # Any split size: strictly larger than the full set, or a strictly
    # winning prefix, or a weakly dominating total level.
    ranked, counts, cum_levels = stats
    levels = (item_count - np.arange(item_count, dtype=np.int64))[None, :]
    full = _full_prefix_levels(item_count)
    sizes = counts[:, -1]
    larger = 2 * sizes > item_count
    total_ok = 2 * cum_levels[:, -1] >= item_count * (item_count + 1) // 2
    even_win = 2 * cum_levels - full[2 * counts] >= 1
    odd_win = 2 * cum_levels - levels - full[np.maximum(2 * counts - 1, 0)] >= 1
    prefix_win = (ranked & (even_win | odd_win)).any(axis=1)
    return larger | prefix_win | total_ok


_EQUAL_SPLIT_OK = {"nec": _ok_nec, "ndd": _ok_ndd}
_ANY_SPLIT_OK = {"pos": _ok_pos, "pdd": _ok_pdd}


def first_equal_split(
    item_count: int,
    perm_first: tuple[int, ...],
    perm_second: tuple[int, ...],
    relation: str,
) -> tuple[Optional[int], int]:
    """First balanced split satisfying the relation for both agents.

    Returns (mask, states scanned); the mask encodes agent 1's bundle.
    """
    evaluate = _EQUAL_SPLIT_OK[relation]
    masks, _ = _equal_split_tables(item_count, item_count // 2)
    ok = evaluate(_equal_rank_statistics(item_count, perm_first, True), item_count)
    ok = ok & evaluate(_equal_rank_statistics(item_count, perm_second, False), item_count)
    hits = np.flatnonzero(ok)
    if hits.size == 0:
        return None, len(masks)
    return int(masks[hits[0]]), int(hits[0]) + 1


def first_any_split(
    item_count: int,
    perm_first: tuple[int, ...],
    perm_second: tuple[int, ...],
    relation: str,
    max_states: Optional[int] = None,
) -> tuple[Optional[int], int]:
    """First split of any size satisfying the relation for both agents.

    Scans the 2^M split space in ascending mask order, chunk by chunk, so a
    witness early in the order never costs a full sweep.  Raises nothing on
    exhaustion; the caller owns budget errors via the returned state count.
    """
    evaluate = _ANY_SPLIT_OK[relation]
    p0 = np.array(perm_first, dtype=np.int64)
    p1 = np.array(perm_second, dtype=np.int64)
    total = 1 << item_count
    scanned = 0
    for start in range(0, total, _CHUNK):
        stop = min(start + _CHUNK, total)
        if max_states is not None and stop > max_states:
            stop = max_states
        if stop <= start:
            break
        masks = np.arange(start, stop, dtype=np.int64)
        bits = _bits_of(masks, item_count)
        ok = evaluate(_rank_statistics(1 - bits, p0), item_count)
        ok = ok & evaluate(_rank_statistics(bits, p1), item_count)
        hits = np.flatnonzero(ok)
        if hits.size:
            scanned += int(hits[0]) + 1
            return int(masks[hits[0]]), scanned
        scanned += stop - start
        if max_states is not None and scanned >= max_states:
            break
    return None, scanned


def mask_to_bundles(mask: int, item_count: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Decode a split mask into (agent 0 items, agent 1 items)."""
    first = tuple(j for j in range(item_count) if not (mask >> (item_count - 1 - j)) & 1)
    second = tuple(j for j in range(item_count) if (mask >> (item_count - 1 - j)) & 1)
    return first, second
