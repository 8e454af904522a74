"""Shortest-path costs between m-cycles under adjacent-entry swaps.

Two cycles are adjacent when their anchored words differ by swapping two
cyclically consecutive entries, which is the same as conjugating by the
transposition of those two values.  The cost attached to an ordered pair
(sigma, tau) is the graph distance from sigma to tau^{-1}; relabelings act as
graph automorphisms and carry the base row to every other row, so only
distances from the base cycle are ever computed.

The production BFS runs on the quotient by the base cycle's stabilizer:
distances from the base are constant on stabilizer orbits, so expanding only
canonical representatives shrinks the vertex set by a factor of about 2m.
A plain sweep over all words is kept as a cross-check oracle.
"""

from __future__ import annotations

import numpy as np

from .cycles import (
    Cycle,
    CycleIndex,
    canonical_keys,
    normalize_words,
    pack_keys,
    unpack_keys,
)
from .errors import CrossingsError

UNREACHED = np.uint16(0xFFFF)


def self_cost(m: int) -> int:
    """Distance from any cycle to its own inverse.

    Closed form floor((m-1)^2 / 4); the BFS tables are checked against it.
    """
    return (m - 1) ** 2 // 4


def neighbor_words(words: np.ndarray) -> np.ndarray:
    """The m adjacent-entry swaps of each row, wrap included, re-anchored.

    Input (..., m), output (..., m, m) with the new axis enumerating the
    swapped position pair (j, j+1 mod m).  Neighbors are not deduplicated;
    distinct swaps can produce the same cycle.
    """
    words = np.asarray(words, dtype=np.uint8)
    m = words.shape[-1]
    out = np.repeat(words[..., None, :], m, axis=-2)
    for j in range(m):
        k = (j + 1) % m
        out[..., j, j] = words[..., k]
        out[..., j, k] = words[..., j]
    return normalize_words(out)


def distances_from_base(index: CycleIndex) -> np.ndarray:
    """Graph distance from the base cycle to every cycle, by quotient BFS.

    Returns a uint16 array indexed by cycle id.
    """
    m = index.m
    ckeys = canonical_keys(index.seqs)
    rep_keys, class_of = np.unique(ckeys, return_inverse=True)
    rep_seqs = unpack_keys(rep_keys, m)
    dist = np.full(rep_keys.size, UNREACHED, dtype=np.uint16)

    base_key = pack_keys(np.arange(1, m + 1, dtype=np.uint8))
    frontier = np.searchsorted(rep_keys, base_key)[None]
    dist[frontier] = 0
    d = 0
    while frontier.size:
        nbr = neighbor_words(rep_seqs[frontier]).reshape(-1, m)
        ids = np.searchsorted(rep_keys, np.unique(canonical_keys(nbr)))
        ids = ids[dist[ids] == UNREACHED]
        d += 1
        dist[ids] = d
        frontier = ids
    if (dist == UNREACHED).any():
        raise CrossingsError(f"swap graph on {m}-cycles is not connected")
    return dist[class_of]


def distances_from_base_unpruned(index: CycleIndex) -> np.ndarray:
    """Same distances by BFS over all words, no quotienting.  Oracle only."""
    m = index.m
    dist = np.full(len(index), UNREACHED, dtype=np.uint16)
    frontier = np.array([index.id_of(Cycle.base(m))])
    dist[frontier] = 0
    d = 0
    while frontier.size:
        nbr = neighbor_words(index.seqs[frontier]).reshape(-1, m)
        ids = index.id_of_keys(np.unique(pack_keys(nbr)))
        ids = ids[dist[ids] == UNREACHED]
        d += 1
        dist[ids] = d
        frontier = ids
    if (dist == UNREACHED).any():
        raise CrossingsError(f"swap graph on {m}-cycles is not connected")
    return dist
