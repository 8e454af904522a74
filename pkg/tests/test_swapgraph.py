import numpy as np
import pytest

from crossings.cycles import Cycle, CycleIndex, all_cycle_seqs, canonical_keys, pack_keys
from crossings.swapgraph import (
    distances_from_base,
    distances_from_base_unpruned,
    neighbor_words,
    self_cost,
)


def test_neighbor_words_are_valid_and_adjacent():
    seqs = all_cycle_seqs(6)
    nbr = neighbor_words(seqs[:40])
    assert nbr.shape == (40, 6, 6)
    assert (nbr[:, :, 0] == 1).all()
    assert (np.sort(nbr, axis=-1) == np.arange(1, 7)).all()


def test_neighbor_relation_symmetric():
    m = 5
    idx = CycleIndex(m)
    adj = set()
    for i in range(len(idx)):
        for nb in neighbor_words(idx.seqs[i]):
            j = int(idx.id_of_words(nb[None])[0])
            adj.add((i, j))
    assert all((j, i) in adj for i, j in adj)
    # swaps never fix a cycle
    assert all(i != j for i, j in adj)


def test_small_distances_by_hand():
    idx = CycleIndex(4)
    dist = distances_from_base(idx)
    # base at 0; the four words one swap away; the inverse two swaps away
    at = lambda seq: dist[idx.id_of(Cycle(seq))]
    assert at((1, 2, 3, 4)) == 0
    for seq in [(1, 3, 2, 4), (1, 2, 4, 3), (1, 3, 4, 2), (1, 4, 2, 3)]:
        assert at(seq) == 1
    assert at((1, 4, 3, 2)) == 2


@pytest.mark.parametrize("m", [4, 5, 6, 7])
def test_pruned_matches_unpruned(m):
    idx = CycleIndex(m)
    assert (distances_from_base(idx) == distances_from_base_unpruned(idx)).all()


@pytest.mark.parametrize("m", [4, 5, 6, 7, 8])
def test_self_cost_matches_bfs(m):
    idx = CycleIndex(m)
    dist = distances_from_base(idx)
    assert dist[idx.id_of(Cycle.base(m).invert())] == self_cost(m)
    assert self_cost(m) == (m - 1) ** 2 // 4


def test_distance_constant_on_stabilizer_classes():
    idx = CycleIndex(6)
    dist = distances_from_base_unpruned(idx)
    ck = canonical_keys(idx.seqs)
    for key in np.unique(ck):
        vals = dist[ck == key]
        assert (vals == vals[0]).all()


def test_distance_zero_only_at_base():
    idx = CycleIndex(6)
    dist = distances_from_base(idx)
    assert (dist == 0).sum() == 1
    assert dist[idx.id_of(Cycle.base(6))] == 0
