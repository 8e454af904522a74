"""Constraint coefficients of the reduced relaxations.

Every invariant matrix is a combination of the pair-class indicators, so
each reduced constraint is carried by one small integer block per class.
Three routes compute those blocks:

- direct quadruple enumeration over the expansions of both tableau vectors
  (the oracle; independent of everything below but unusable past tiny m),
- expansion of the pairing polynomial by differential operators, whose
  degree-m monomials are permutation patterns in bijection with relabeling
  orbits of pairs of full orders (the production route; cost is governed by
  the final monomial count, about 6 (m-2)! for the single-block shape),
- streaming over ordered cycle pairs grouped by first component (exact,
  quadratic in (m-1)!, kept as a selectable cross-check).

Blocks built from inversion-symmetrized rows w +- (w o eta) reduce to the
raw tableau forms: eta flips one pair component, which descends to an
involution on classes, and the symmetrized block equals twice the raw form
plus-or-minus its flip.  The routes are compared exactly in the tests.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import factorial

import numpy as np

from .cycles import CycleIndex, invert_seqs
from .errors import ArgumentError, ResourceError
from .orbits import PairOrbits, SymmetricClasses, build_pair_orbits
from .repsets import Block, hook_block_columns, hook_block_matrix
from .swapgraph import distances_from_base
from .tableaux import (
    base_filling,
    compose_word,
    perm_sign,
    row_equivalent_fillings,
    signed_column_fillings,
)

Filling = tuple[tuple[int, ...], ...]


@dataclass
class PairTables:
    """Cycle table plus pair-orbit and class tables for one m."""

    index: CycleIndex
    orbits: PairOrbits
    classes: SymmetricClasses
    _flip: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def build(cls, m: int) -> "PairTables":
        index = CycleIndex(m)
        orbits = build_pair_orbits(index, distances_from_base(index))
        return cls(index=index, orbits=orbits, classes=orbits.symmetric_classes())

    @property
    def m(self) -> int:
        return self.index.m

    def class_ids_of_words(self, words: np.ndarray) -> np.ndarray:
        """Class ids of the pairs (base, tau) for each word tau."""
        return self.classes.class_of_orbit[self.orbits.orbit_ids_of_tau_seqs(words)]

    def flip_classes(self) -> np.ndarray:
        """Class image of inverting one pair component (an involution)."""
        if self._flip is None:
            reps = self.orbits.rep_seqs[self.classes.rep_orbits]
            self._flip = self.class_ids_of_words(invert_seqs(reps))
        return self._flip


def monomial_to_orbit(pattern, tables: PairTables) -> int:
    """Class of the pair encoded by a permutation-pattern monomial.

    The pattern maps row index a to column index pattern[a-1]; the paired
    cycle reads value a at word position pattern[a-1], the first component
    being the base cycle.
    """
    m = tables.m
    pattern = tuple(int(v) for v in pattern)
    if sorted(pattern) != list(range(1, m + 1)):
        raise ArgumentError(f"not a permutation pattern: {pattern}")
    word = np.empty(m, dtype=np.uint8)
    for a, b in enumerate(pattern, start=1):
        word[b - 1] = a
    return int(tables.class_ids_of_words(word[None])[0])


# -- oracle: quadruple enumeration ------------------------------------------


def _expansion_words(t: Filling, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Signs and cycle words of every term of one tableau vector."""
    lam = tuple(len(r) for r in t)
    signs, words = [], []
    for sgn, ct in signed_column_fillings(base_filling(lam)):
        for tp in row_equivalent_fillings(t):
            signs.append(sgn)
            words.append(compose_word(ct, tp))
    return np.array(signs, dtype=np.int64), np.array(words, dtype=np.uint8)


def direct_expansion(t1: Filling, t2: Filling, tables: PairTables) -> dict[int, int]:
    """Signed pair-class counts over all term pairs of two tableau vectors.

    The oracle for both production routes.  Term count is the product of
    the two expansion sizes, so this is gated to small m.
    """
    m = tables.m
    if m > 7:
        raise ResourceError(f"direct expansion is quadratic in (m-1)!, refusing m={m}")
    signs1, words1 = _expansion_words(t1, m)
    signs2, words2 = _expansion_words(t2, m)
    acc = np.zeros(tables.classes.count, dtype=np.int64)
    shifted = words2 - 1
    for sgn, word in zip(signs1, words1):
        moved = tables.orbits.relabel_to_base(word)[shifted]
        np.add.at(acc, tables.class_ids_of_words(moved), sgn * signs2)
    return {int(c): int(v) for c, v in enumerate(acc) if v}


# -- production: differential-operator expansion ----------------------------
#
# Monomials are byte strings of sorted (row, col, exponent) triples; all
# indices and exponents fit a byte for the supported m.


def _encode(trips: dict[tuple[int, int], int]) -> bytes:
    return b"".join(bytes((r, c, e)) for (r, c), e in sorted(trips.items()))


def _decode(key: bytes) -> dict[tuple[int, int], int]:
    return {(key[p], key[p + 1]): key[p + 2] for p in range(0, len(key), 3)}


def _poly_mul(a: dict[bytes, int], b: dict[bytes, int]) -> dict[bytes, int]:
    out: dict[bytes, int] = {}
    for ka, ca in a.items():
        ta = _decode(ka)
        for kb, cb in b.items():
            t = dict(ta)
            for rc, e in _decode(kb).items():
                t[rc] = t.get(rc, 0) + e
            key = _encode(t)
            v = out.get(key, 0) + ca * cb
            if v:
                out[key] = v
            else:
                del out[key]
    return out


def _det_poly(k: int) -> dict[bytes, int]:
    base = tuple(range(1, k + 1))
    return {
        _encode({(i, p): 1 for i, p in zip(base, perm)}): perm_sign(base, perm)
        for perm in itertools.permutations(base)
    }


def _shape_poly(lam: tuple[int, ...]) -> dict[bytes, int]:
    """The shape polynomial: product of leading-minor determinant powers."""
    poly: dict[bytes, int] = {b"": 1}
    for k in range(1, len(lam) + 1):
        power = lam[k - 1] - (lam[k] if k < len(lam) else 0)
        if power == 0:
            continue
        det = _det_poly(k)
        for _ in range(power):
            poly = _poly_mul(poly, det)
        const = factorial(k) ** power
        poly = {key: v * const for key, v in poly.items()}
    return poly


def _derive(poly: dict[bytes, int], src: int, dst: int, on_rows: bool) -> dict[bytes, int]:
    """One operator pass: move one unit of row (or column) src to dst."""
    out: dict[bytes, int] = {}
    for key, coeff in poly.items():
        base = _decode(key)
        for (r, c), e in base.items():
            if (r if on_rows else c) != src:
                continue
            trips = dict(base)
            if e == 1:
                del trips[(r, c)]
            else:
                trips[(r, c)] = e - 1
            target = (dst, c) if on_rows else (r, dst)
            trips[target] = trips.get(target, 0) + 1
            nk = _encode(trips)
            v = out.get(nk, 0) + coeff * e
            if v:
                out[nk] = v
            else:
                del out[nk]
    return out


def _check_tableau_pair(t1: Filling, t2: Filling, m: int) -> tuple[int, ...]:
    lam = tuple(len(r) for r in t1)
    if tuple(len(r) for r in t2) != lam or sum(lam) != m:
        raise ArgumentError("tableaux must share one shape partitioning m")
    if any(lam[i] < lam[i + 1] for i in range(len(lam) - 1)):
        raise ArgumentError(f"row lengths must not increase: {lam}")
    for t in (t1, t2):
        # the operator schedule moves value s out of rows below s, so no
        # value may start deeper than its own index
        if any(v < i for i, row in enumerate(t, start=1) for v in row):
            raise ArgumentError("each value must sit in a row no deeper than itself")
    for t in (t1, t2):
        if sorted(v for row in t for v in row) != list(range(1, m + 1)):
            raise ArgumentError("tableau content must be 1..m")
    return lam


def _cascade(poly: dict[bytes, int], t: Filling, m: int, on_rows: bool) -> dict[bytes, int]:
    """Apply every operator a tableau calls for, source index descending.

    Operators with distinct source indices only interact through values the
    earlier one produced, so blocks compose right to left; within a block,
    and between row and column movers, everything commutes.
    """
    row_of = {v: i + 1 for i, row in enumerate(t) for v in row}
    for j in range(m - 1, 0, -1):
        for s in range(j + 1, m + 1):
            if row_of[s] == j:
                poly = _derive(poly, j, s, on_rows=on_rows)
    return poly


def poly_method(t1: Filling, t2: Filling, tables: PairTables) -> dict[int, int]:
    """Signed pair-class counts via the operator expansion."""
    lam = _check_tableau_pair(t1, t2, tables.m)
    poly = _cascade(_shape_poly(lam), t1, tables.m, on_rows=True)
    return _collect_patterns(_cascade(poly, t2, tables.m, on_rows=False), tables)


def _stream_patterns(rows_done: dict[bytes, int], t2: Filling, m: int,
                     tables: PairTables) -> dict[int, int]:
    """Column-cascade and collect one row monomial at a time.

    Derivations are linear, so per-monomial sums are exact, and the full
    pattern dictionary (which approaches m! entries) never exists at once.
    """
    acc = np.zeros(tables.classes.count, dtype=np.int64)
    for key, coeff in rows_done.items():
        done = _cascade({key: coeff}, t2, m, on_rows=False)
        for cid, v in _collect_patterns(done, tables).items():
            acc[cid] += v
    return {int(c): int(v) for c, v in enumerate(acc) if v}


def _collect_patterns(poly: dict[bytes, int], tables: PairTables) -> dict[int, int]:
    """Map final monomials, all permutation patterns, to signed class counts."""
    m = tables.m
    full = (1 << (m + 1)) - 2
    words = np.empty((len(poly), m), dtype=np.uint8)
    coeffs = np.empty(len(poly), dtype=np.int64)
    for k, (key, coeff) in enumerate(poly.items()):
        rows = cols = 0
        assert len(key) == 3 * m
        for p in range(0, len(key), 3):
            r, c, e = key[p], key[p + 1], key[p + 2]
            assert e == 1
            rows |= 1 << r
            cols |= 1 << c
            words[k, c - 1] = r
        assert rows == full and cols == full
        coeffs[k] = coeff
    acc = np.zeros(tables.classes.count, dtype=np.int64)
    step = 1 << 18
    for lo in range(0, len(poly), step):
        ids = tables.class_ids_of_words(words[lo : lo + step])
        np.add.at(acc, ids, coeffs[lo : lo + step])
    return {int(c): int(v) for c, v in enumerate(acc) if v}


# -- cross-check: streaming over ordered pairs ------------------------------


def pair_stream_forms(
    tables: PairTables, mats: list[np.ndarray], chunk: int = 64
) -> list[np.ndarray]:
    """Exact class blocks U K U^T for each row matrix, by scanning all pairs.

    Work grows with the square of the cycle count, so this is the slow
    route; it exists to certify the polynomial route on moderate m.
    """
    index, classes = tables.index, tables.classes
    seqs = index.seqs
    n, m = seqs.shape
    c = classes.count
    for u in mats:
        assert abs(u).max() ** 2 * n < 2**53
    out = [np.zeros((c, u.shape[0], u.shape[0])) for u in mats]
    shifted = seqs - 1
    arange = np.arange(1, m + 1, dtype=np.uint8)
    for lo in range(0, n, chunk):
        block = seqs[lo : lo + chunk]
        b = block.shape[0]
        maps = np.empty((b, m), dtype=np.uint8)
        np.put_along_axis(maps, block.astype(np.intp) - 1, arange, axis=1)
        moved = maps[:, shifted]
        ids = tables.class_ids_of_words(moved.reshape(-1, m)).reshape(b, n)
        offs = ids + c * np.arange(b, dtype=np.int64)[:, None]
        flat = offs.ravel()
        weights = np.empty((b, n))
        for u, acc in zip(mats, out):
            left = u[:, lo : lo + b].astype(np.float64)
            for j in range(u.shape[0]):
                weights[:] = u[j]
                s = np.bincount(flat, weights=weights.ravel(), minlength=b * c)
                acc[:, :, j] += (left @ s.reshape(b, c)).T
    result = []
    for acc in out:
        ints = np.rint(acc).astype(np.int64)
        assert (ints == acc).all()
        result.append(ints)
    return result


# -- assembly ----------------------------------------------------------------


def _tri_positions(d: int):
    return [(i, j) for i in range(d) for j in range(i, d)]


def hook_constraint_table(tables: PairTables, route: str = "poly") -> np.ndarray:
    """Upper-triangle class blocks of the single-block relaxation, (C, t).

    Rows follow the class order; columns run over the upper triangle of the
    block, row-major.  The block rows are the raw column-tableau vectors, so
    entries are the pairing forms themselves.
    """
    m = tables.m
    cols = hook_block_columns(m)
    d = len(cols)
    tri = np.zeros((tables.classes.count, d * (d + 1) // 2), dtype=np.int64)
    if route == "poly":
        lam = (m - 2, 1, 1)
        pos = 0
        for i in range(d):
            rows_done = _cascade(_shape_poly(lam), cols[i], m, on_rows=True)
            for j in range(i, d):
                for cid, v in _stream_patterns(rows_done, cols[j], m, tables).items():
                    tri[cid, pos] = v
                pos += 1
    elif route == "pairs":
        a = pair_stream_forms(tables, [hook_block_matrix(tables.index.seqs)])[0]
        for pos, (i, j) in enumerate(_tri_positions(d)):
            tri[:, pos] = a[:, i, j]
    else:
        raise ArgumentError(f"unknown coefficient route {route!r}")
    return tri


def block_constraint_tables(
    tables: PairTables, blocks: list[Block], route: str = "poly"
) -> list[np.ndarray]:
    """Class blocks (C, d, d) for every symmetrized block of the full
    relaxation."""
    if route == "pairs":
        return pair_stream_forms(tables, [b.u for b in blocks])
    if route != "poly":
        raise ArgumentError(f"unknown coefficient route {route!r}")
    flip = tables.flip_classes()
    m, c = tables.m, tables.classes.count
    forms: dict[tuple[Filling, Filling], np.ndarray] = {}
    held: tuple[Filling, dict[bytes, int]] | None = None

    def form(ta: Filling, tb: Filling) -> np.ndarray:
        # symmetric at class level, so ta always takes the left cascade and
        # one held cascade suffices when calls group by ta
        nonlocal held
        got = forms.get((ta, tb)) if ta <= tb else forms.get((tb, ta))
        if got is None:
            if held is None or held[0] != ta:
                lam = tuple(len(r) for r in ta)
                held = (ta, _cascade(_shape_poly(lam), ta, m, on_rows=True))
            got = np.zeros(c, dtype=np.int64)
            for cid, v in _collect_patterns(_cascade(held[1], tb, m, on_rows=False), tables).items():
                got[cid] = v
            forms[(ta, tb) if ta <= tb else (tb, ta)] = got
        return got

    out = []
    for b in blocks:
        a = np.zeros((c, b.dim, b.dim), dtype=np.int64)
        for i in range(b.dim):
            for j in range(i, b.dim):
                raw = form(b.tableaux[i], b.tableaux[j])
                vals = 2 * (raw + b.sign * raw[flip])
                a[:, i, j] = vals
                a[:, j, i] = vals
        out.append(a)
    return out
