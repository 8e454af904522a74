"""Single-cycle permutations of {1..m} and the signed relabeling group.

A length-m cycle is stored as the word of its orbit starting at 1, so the
cycle sending 1 -> 4 -> 2 -> 3 -> 1 is the word (1, 4, 2, 3).  Distinct words
anchored at 1 are distinct cycles and there are (m-1)! of them.

The group acting on cycles is S_m x {+1,-1}: a relabeling pi together with an
optional inversion, (pi, eps) . sigma = pi sigma^eps pi^-1.  The stabilizer of
the base cycle (1 2 ... m) has order 2m; it is generated by the base cycle
itself acting as a value shift, and by the value reflection about 1 combined
with inversion.  Canonical forms under that stabilizer are what every other
module keys orbits on, so both a readable scalar implementation and a
vectorized bulk implementation live here.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import factorial

import numpy as np

from .errors import ArgumentError

# Words are packed 4 bits per entry into one u64, so relabeled values must
# stay below 16.
MAX_M = 16

_PACK_SHIFTS = np.array([4 * (MAX_M - 1 - j) for j in range(MAX_M)], dtype=np.uint64)


def _check_m(m: int) -> None:
    if not 3 <= m <= MAX_M:
        raise ArgumentError(f"cycle length must be in [3, {MAX_M}], got {m}")


@dataclass(frozen=True)
class Cycle:
    """An m-cycle, stored as its orbit word anchored at 1."""

    seq: tuple[int, ...]

    def __post_init__(self):
        m = len(self.seq)
        _check_m(m)
        if self.seq[0] != 1 or sorted(self.seq) != list(range(1, m + 1)):
            raise ArgumentError(f"not a 1-anchored permutation word: {self.seq}")

    @property
    def m(self) -> int:
        return len(self.seq)

    @classmethod
    def from_word(cls, word) -> "Cycle":
        """Build a cycle from any rotation of its orbit word."""
        word = tuple(word)
        if 1 not in word:
            raise ArgumentError(f"cycle word must contain 1: {word}")
        k = word.index(1)
        return cls(word[k:] + word[:k])

    @classmethod
    def base(cls, m: int) -> "Cycle":
        _check_m(m)
        return cls(tuple(range(1, m + 1)))

    def invert(self) -> "Cycle":
        # (1, a, b, ..., z) traversed backwards is (1, z, ..., b, a).
        return Cycle((1,) + self.seq[:0:-1])

    def image(self) -> tuple[int, ...]:
        """One-line notation: entry v-1 is where the cycle sends v."""
        img = [0] * self.m
        for i, v in enumerate(self.seq):
            img[v - 1] = self.seq[(i + 1) % self.m]
        return tuple(img)

    def __str__(self) -> str:
        return "(" + " ".join(map(str, self.seq)) + ")"


@dataclass(frozen=True)
class GroupElement:
    """An element (pi, eps) of S_m x {+1,-1}; perm holds the images of 1..m."""

    perm: tuple[int, ...]
    eps: int

    def __post_init__(self):
        if self.eps not in (1, -1):
            raise ArgumentError(f"eps must be +1 or -1, got {self.eps}")
        if sorted(self.perm) != list(range(1, len(self.perm) + 1)):
            raise ArgumentError(f"not a permutation of 1..{len(self.perm)}: {self.perm}")

    @property
    def m(self) -> int:
        return len(self.perm)

    @classmethod
    def identity(cls, m: int) -> "GroupElement":
        return cls(tuple(range(1, m + 1)), 1)

    def __call__(self, v: int) -> int:
        return self.perm[v - 1]

    def compose(self, other: "GroupElement") -> "GroupElement":
        """Product in the direct product group: self applied after other."""
        if self.m != other.m:
            raise ArgumentError("cannot compose elements of different degree")
        return GroupElement(
            tuple(self.perm[other.perm[v - 1] - 1] for v in range(1, self.m + 1)),
            self.eps * other.eps,
        )

    def inverse(self) -> "GroupElement":
        inv = [0] * self.m
        for v in range(1, self.m + 1):
            inv[self.perm[v - 1] - 1] = v
        return GroupElement(tuple(inv), self.eps)


def act(g: GroupElement, c: Cycle) -> Cycle:
    """Apply (pi, eps) . sigma = pi sigma^eps pi^-1, re-anchored at 1.

    Conjugation by pi relabels the orbit word entrywise, so the whole action
    is: optionally reverse the traversal, relabel, rotate 1 back to front.
    """
    if g.m != c.m:
        raise ArgumentError(f"degree mismatch: group element on {g.m}, cycle on {c.m}")
    word = c.seq if g.eps == 1 else c.invert().seq
    return Cycle.from_word(g.perm[v - 1] for v in word)


def stabilizer_generators(m: int) -> tuple[GroupElement, GroupElement]:
    """The two generators of the order-2m stabilizer of the base cycle.

    The first is the base cycle itself as a relabeling (with no inversion):
    conjugating (1 2 ... m) by itself fixes it.  The second pairs inversion
    with the reflection fixing 1 (v -> m + 2 - v), which undoes the traversal
    reversal.  Any valid reflection works; this one is the obvious choice.
    """
    _check_m(m)
    shift = GroupElement(tuple((v % m) + 1 for v in range(1, m + 1)), 1)
    reflect = GroupElement((1,) + tuple(m + 2 - v for v in range(2, m + 1)), -1)
    return shift, reflect


def stabilizer_elements(m: int) -> list[GroupElement]:
    """All 2m elements of the base-cycle stabilizer, generators expanded."""
    shift, reflect = stabilizer_generators(m)
    out = []
    g = GroupElement.identity(m)
    for _ in range(m):
        out.append(g)
        out.append(g.compose(reflect))
        g = g.compose(shift)
    return out


def canonical_form(c: Cycle) -> Cycle:
    """Lexicographically smallest word in the stabilizer orbit of c.

    Scalar reference implementation: the orbit has at most 2m members, the
    images of c under stabilizer_elements.  The bulk routines below must agree
    with this on every cycle (tested), and with a full group sweep at small m.
    """
    return min((act(h, c) for h in stabilizer_elements(c.m)), key=lambda x: x.seq)


# ---------------------------------------------------------------------------
# Bulk (numpy) layer.  Words live in (N, m) uint8 arrays, one word per row,
# and compare through 4-bit packed u64 keys whose integer order is the
# lexicographic order of the words.
# ---------------------------------------------------------------------------


def all_cycle_seqs(m: int) -> np.ndarray:
    """All (m-1)! anchored words, lexicographically sorted, as (N, m) uint8."""
    _check_m(m)
    n = factorial(m - 1)
    out = np.empty((n, m), dtype=np.uint8)
    out[:, 0] = 1
    for i, rest in enumerate(itertools.permutations(range(2, m + 1))):
        out[i, 1:] = rest
    return out


def pack_keys(seqs: np.ndarray) -> np.ndarray:
    """Pack words into u64 keys; integer order == lex order of the words."""
    m = seqs.shape[-1]
    vals = seqs.astype(np.uint64) - 1
    return (vals << _PACK_SHIFTS[:m]).sum(axis=-1, dtype=np.uint64)


def unpack_keys(keys: np.ndarray, m: int) -> np.ndarray:
    keys = np.asarray(keys, dtype=np.uint64)
    out = np.empty(keys.shape + (m,), dtype=np.uint8)
    for j in range(m):
        out[..., j] = ((keys >> _PACK_SHIFTS[j]) & np.uint64(0xF)).astype(np.uint8) + 1
    return out


def normalize_words(words: np.ndarray) -> np.ndarray:
    """Rotate each row of an (N, m) word array so the 1 entry leads."""
    m = words.shape[-1]
    pos1 = np.argmax(words == 1, axis=-1)
    idx = (pos1[..., None] + np.arange(m)) % m
    return np.take_along_axis(words, idx, axis=-1)


def invert_seqs(seqs: np.ndarray) -> np.ndarray:
    """Words of the inverse cycles; stays anchored since entry 0 is fixed."""
    return np.concatenate([seqs[..., :1], seqs[..., :0:-1]], axis=-1)


def shift_canonical_keys(seqs: np.ndarray) -> np.ndarray:
    """Packed min over the m value shifts of each row; no inversion.

    This is canonicalization under the relabeling-only part of the base
    cycle's stabilizer (the cyclic half of the group).
    """
    seqs = np.asarray(seqs, dtype=np.uint8)
    m = seqs.shape[-1]
    shifted = seqs.astype(np.int16) - 1
    best = None
    for k in range(m):
        keys = pack_keys(normalize_words(((shifted + k) % m + 1).astype(np.uint8)))
        best = keys if best is None else np.minimum(best, keys)
    return best


def canonical_keys(seqs: np.ndarray) -> np.ndarray:
    """Packed canonical form of each row under the base-cycle stabilizer.

    The 2m orbit members of a word are the m value shifts of the word itself
    and the m value shifts of its reflected inverse (reflection about 1 is
    value negation mod m, which is what makes the inversion land back in the
    stabilizer).  Runs one vectorized pass per transform and keeps the min.
    """
    seqs = np.asarray(seqs, dtype=np.uint8)
    m = seqs.shape[-1]
    # reflection about 1 is value negation mod m; widen first, uint8 wraps
    second = (((1 - invert_seqs(seqs).astype(np.int16)) % m) + 1).astype(np.uint8)
    return np.minimum(shift_canonical_keys(seqs), shift_canonical_keys(second))


def canonical_seqs(seqs: np.ndarray) -> np.ndarray:
    return unpack_keys(canonical_keys(seqs), seqs.shape[-1])


def cycle_count(m: int) -> int:
    return factorial(m - 1)


class CycleIndex:
    """Lex-ordered table of all (m-1)! anchored words with word -> id lookup.

    Cycle ids used across the package are row positions in this table, which
    coincide with lexicographic rank because the packed keys are increasing.
    """

    def __init__(self, m: int):
        _check_m(m)
        self.m = m
        self.seqs = all_cycle_seqs(m)
        self.keys = pack_keys(self.seqs)
        self._inverse_ids: np.ndarray | None = None

    def __len__(self) -> int:
        return self.seqs.shape[0]

    def id_of_keys(self, keys: np.ndarray) -> np.ndarray:
        return np.searchsorted(self.keys, keys)

    def id_of_words(self, words: np.ndarray) -> np.ndarray:
        """Ids for rows that may be arbitrary rotations of anchored words."""
        return self.id_of_keys(pack_keys(normalize_words(np.asarray(words, dtype=np.uint8))))

    def id_of(self, c: Cycle) -> int:
        return int(self.id_of_words(np.array([c.seq], dtype=np.uint8))[0])

    def inverse_ids(self) -> np.ndarray:
        """Permutation of ids sending each cycle to its inverse (an involution)."""
        if self._inverse_ids is None:
            self._inverse_ids = self.id_of_keys(pack_keys(invert_seqs(self.seqs)))
        return self._inverse_ids
