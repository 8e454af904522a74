from collections import Counter
from functools import lru_cache
from math import factorial

import numpy as np
import pytest

from crossings.cycles import CycleIndex, invert_seqs, normalize_words, pack_keys
from crossings.errors import ArgumentError
from crossings.orbits import orbit_census
from crossings.swapgraph import distances_from_base
from crossings.repsets import (
    Block,
    _greedy_independent,
    bareiss_det,
    block_dims,
    build_blocks,
    hook_block_columns,
    hook_block_dim,
    hook_block_matrix,
    hook_block_values,
    tableau_vector_matrix,
)
from crossings.tableaux import (
    block_multiplicity,
    partitions,
    repset_vector,
    standard_tableaux,
)

DIMS = {
    4: [1, 1, 1],
    5: [2, 1, 1, 1, 1],
    6: [2, 2, 2] + [1] * 8,
    7: [3] * 6 + [2] * 4 + [1] * 8,
    8: [7] * 2 + [5] * 2 + [4] * 9 + [3] * 7 + [2] * 4 + [1] * 9,
}


@lru_cache(maxsize=None)
def _character(lam: tuple, rho: tuple) -> int:
    """Murnaghan-Nakayama over first-column hook lengths (beta sets)."""
    if not rho:
        return 1
    n = len(lam)
    beta = tuple(lam[i] + (n - 1 - i) for i in range(n))
    members = set(beta)
    k = rho[0]
    total = 0
    for b in beta:
        nb = b - k
        if nb < 0 or nb in members:
            continue
        crossed = sum(1 for x in beta if nb < x < b)
        newbeta = sorted(members - {b} | {nb}, reverse=True)
        newlam = tuple(p for i, x in enumerate(newbeta) if (p := x - (n - 1 - i)) > 0)
        total += (-1) ** crossed * _character(newlam, rho[1:])
    return total


def _class_rep(rho: tuple, m: int) -> np.ndarray:
    """Image array of a permutation with cycle type rho, 0-indexed values."""
    images = np.arange(m)
    pos = 0
    for part in rho:
        cells = np.arange(pos, pos + part)
        images[cells] = np.roll(cells, -1)
        pos += part
    return images


def _class_size(rho: tuple, m: int) -> int:
    z = 1
    for k, cnt in Counter(rho).items():
        z *= k**cnt * factorial(cnt)
    return factorial(m) // z


def _multiplicities_by_characters(m: int) -> dict[tuple, tuple[int, int]]:
    """(even, odd) block sizes per shape from character sums over the group
    combining relabelings with the optional inversion.  Independent of all
    tableau machinery."""
    idx = CycleIndex(m)
    plus = {}
    minus = {}
    inv_words = invert_seqs(idx.seqs)
    for rho in partitions(m):
        pi = _class_rep(rho, m)
        conj = pack_keys(normalize_words(np.asarray(pi[idx.seqs - 1] + 1, dtype=np.uint8)))
        conj_inv = pack_keys(
            normalize_words(np.asarray(pi[inv_words - 1] + 1, dtype=np.uint8))
        )
        plus[rho] = int((conj == idx.keys).sum())
        minus[rho] = int((conj_inv == idx.keys).sum())
    out = {}
    for lam in partitions(m):
        tot_plus = sum(
            _class_size(rho, m) * _character(lam, rho) * (plus[rho] + minus[rho])
            for rho in partitions(m)
        )
        tot_minus = sum(
            _class_size(rho, m) * _character(lam, rho) * (plus[rho] - minus[rho])
            for rho in partitions(m)
        )
        denom = 2 * factorial(m)
        assert tot_plus % denom == 0 and tot_minus % denom == 0
        out[lam] = (tot_plus // denom, tot_minus // denom)
    return out


@pytest.mark.parametrize("m", [4, 5, 6, 7, 8])
def test_block_dimension_multisets(m):
    dims = block_dims(build_blocks(CycleIndex(m)))
    assert dims == sorted(DIMS[m], reverse=True)


@pytest.mark.parametrize("m", [4, 5, 6, 7])
def test_dimension_sums_count_orbits(m):
    idx = CycleIndex(m)
    _, pair_orbits, classes = orbit_census(idx, distances_from_base(idx))
    dims = block_dims(build_blocks(idx))
    assert sum(d * d for d in dims) == pair_orbits
    assert sum(d * (d + 1) // 2 for d in dims) == classes


@pytest.mark.parametrize("m", [4, 5, 6, 7])
def test_blocks_match_character_multiplicities(m):
    truth = _multiplicities_by_characters(m)
    built = {(b.lam, b.sign): b.dim for b in build_blocks(CycleIndex(m))}
    for lam, (even, odd) in truth.items():
        assert built.get((lam, 1), 0) == even, lam
        assert built.get((lam, -1), 0) == odd, lam
    assert sum(truth[lam][0] + truth[lam][1] for lam in truth) == sum(
        block_multiplicity(lam) for lam in partitions(m)
    )


@pytest.mark.parametrize("m", [5, 6])
def test_vectorized_matches_direct_expansion(m):
    idx = CycleIndex(m)
    for lam in [(m - 2, 1, 1), (m - 1, 1), (2,) * (m // 2) + (1,) * (m % 2)]:
        ts = standard_tableaux(lam)[:6]
        mat = tableau_vector_matrix(lam, ts, idx)
        for row, t in zip(mat, ts):
            assert (row == repset_vector(lam, t, idx)).all()


@pytest.mark.parametrize("m", [5, 6, 7])
def test_block_rows_have_declared_symmetry(m):
    idx = CycleIndex(m)
    inv = idx.inverse_ids()
    for b in build_blocks(idx):
        assert (b.u[:, inv] == b.sign * b.u).all()


@pytest.mark.parametrize("m", [5, 6])
def test_blocks_are_mutually_orthogonal(m):
    blocks = build_blocks(CycleIndex(m))
    for i, a in enumerate(blocks):
        for b in blocks[i + 1 :]:
            assert not (a.u @ b.u.T).any()


@pytest.mark.parametrize("m", [5, 6])
def test_rank_selection_is_order_independent(m):
    idx = CycleIndex(m)
    for lam in partitions(m):
        a = block_multiplicity(lam)
        if a == 0:
            continue
        vecs = tableau_vector_matrix(lam, standard_tableaux(lam), idx)
        assert len(_greedy_independent(vecs)) == a
        assert len(_greedy_independent(np.ascontiguousarray(vecs[::-1]))) == a


def test_greedy_independent_basics():
    rows = np.array([[1, 1, 0], [2, 2, 0], [0, 0, 0], [1, 0, 1]], dtype=np.int64)
    assert _greedy_independent(rows) == [0, 3]
    assert _greedy_independent(rows, stop_at=1) == [0]
    assert bareiss_det([[2, 1], [1, 2]]) == 3
    assert bareiss_det([[1, 2], [2, 4]]) == 0


@pytest.mark.parametrize("m", [5, 6, 7])
def test_hook_shape_vectors_collapse_by_offset(m):
    # vectors of shape (m-2,1,1) depend only on the residue of the gap
    # between the second and third row entries
    idx = CycleIndex(m)
    by_offset = {}
    for t in standard_tableaux((m - 2, 1, 1)):
        a, b = t[1][0], t[2][0]
        by_offset.setdefault((b - a) % m, []).append(repset_vector((m - 2, 1, 1), t, idx))
    assert len(by_offset) == m - 2
    for vecs in by_offset.values():
        for v in vecs[1:]:
            assert (v == vecs[0]).all()


def test_hook_block_columns_guard():
    with pytest.raises(ArgumentError):
        hook_block_columns(3)


def test_hook_block_m4_single_column():
    (t,) = hook_block_columns(4)
    assert t == ((1, 4), (2,), (3,))


@pytest.mark.parametrize("m", [5, 6, 7])
def test_hook_evaluator_equals_direct_expansion(m):
    idx = CycleIndex(m)
    cols = hook_block_columns(m)
    assert len(cols) == hook_block_dim(m)
    for i, t in zip(range(3, (m + 1) // 2 + 2), cols):
        direct = repset_vector((m - 2, 1, 1), t, idx)
        assert (hook_block_values(idx.seqs, i) == direct).all()


@pytest.mark.parametrize("m", [5, 6, 7, 8, 9])
def test_hook_evaluator_is_inversion_odd(m):
    idx = CycleIndex(m)
    inv = idx.inverse_ids()
    mat = hook_block_matrix(idx.seqs)
    assert mat.shape == (hook_block_dim(m), len(idx))
    assert (mat[:, inv] == -mat).all()


@pytest.mark.parametrize("m", [5, 6, 7])
def test_hook_block_spans_built_odd_block(m):
    idx = CycleIndex(m)
    blocks = [b for b in build_blocks(idx) if b.lam == (m - 2, 1, 1)]
    assert [b.sign for b in blocks] == [-1]
    d = hook_block_dim(m)
    assert blocks[0].dim == d
    mat = hook_block_matrix(idx.seqs)
    assert len(_greedy_independent(mat)) == d
    stacked = np.vstack([mat, blocks[0].u])
    assert len(_greedy_independent(stacked)) == d
