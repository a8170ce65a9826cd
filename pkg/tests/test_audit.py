from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noisyxor.audit import (
    disjoint_even_covers,
    even_cover_search,
    exhaustive_budget,
    expansion_audit,
    sample_random_graph,
)
from noisyxor.bitlin import BitMatrix, BitVector
from noisyxor.coset import GuvParams, guv_to_coset
from noisyxor.instances import sample_planted
from noisyxor.rng import SplitMix64


def brute_min_cover(a: BitMatrix, w_max: int):
    rows = [r.to_int() for r in a]
    for w in range(1, w_max + 1):
        for S in combinations(range(len(rows)), w):
            acc = 0
            for i in S:
                acc ^= rows[i]
            if acc == 0:
                return w
    return None


def brute_min_neighbourhood(a: BitMatrix, s: int) -> int:
    rows = [r.to_int() for r in a]
    best = None
    for S in combinations(range(len(rows)), s):
        acc = 0
        for i in S:
            acc |= rows[i]
        n = bin(acc).count("1")
        best = n if best is None else min(best, n)
    return best


@pytest.fixture(scope="module")
def g6():
    return guv_to_coset(GuvParams.canonical(2, 2, 1, 1))


@pytest.fixture(scope="module")
def g12():
    return guv_to_coset(GuvParams.canonical(4, 2, 1, 1))


# expansion

def test_complete_bipartite_ratios():
    a = sample_random_graph(6, 3, 3, 0)
    assert (a.to_dense() == 1).all()
    rep = expansion_audit(a, 2)
    assert [r.worst_ratio for r in rep.records] == [1, Fraction(1, 2)]
    assert all(r.mode == "exhaustive" for r in rep.records)


def test_coset_singletons_have_ratio_one(g12):
    rep = expansion_audit(g12, 1)
    assert rep.records[0].worst_ratio == 1


def test_guv_q2_exhaustive_is_stable(g6):
    a = expansion_audit(g6, 2, seed=1)
    b = expansion_audit(g6, 2, seed=2)
    assert [r.worst_ratio for r in a.records] == [1, Fraction(3, 4)]
    assert a.to_json() == b.to_json()
    assert [r.trials for r in a.records] == [64, 2016]


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 9), st.integers(2, 8), st.integers(0, 2**32))
def test_exhaustive_matches_brute_force(M, N, seed):
    k = min(3, N)
    a = sample_random_graph(M, N, k, seed)
    rep = expansion_audit(a, 3)
    for r in rep.records:
        assert r.mode == "exhaustive"
        assert r.worst_ratio == Fraction(brute_min_neighbourhood(a, r.size), k * r.size)
        wit = r.witness_rows
        assert len(set(wit)) == r.size
        acc = np.bitwise_or.reduce(a.to_dense()[wit], axis=0)
        assert Fraction(int(acc.sum()), k * r.size) == r.worst_ratio


def test_budget_switches_to_sampling(g6, monkeypatch):
    monkeypatch.setenv("NOISYXOR_EXHAUSTIVE_BUDGET", "100")
    assert exhaustive_budget() == 100
    rep = expansion_audit(g6, 2, samples=300, seed=3)
    assert [r.mode for r in rep.records] == ["exhaustive", "sampled"]
    assert rep.records[1].worst_ratio >= Fraction(3, 4)
    assert not rep.certifies(2, 0.5)
    again = expansion_audit(g6, 2, samples=300, seed=3)
    assert again.to_json() == rep.to_json()


def test_certifies():
    a = sample_random_graph(12, 40, 6, 3)
    rep = expansion_audit(a, 4)
    assert rep.certifies(4, 0.6)
    assert not rep.certifies(5, 0.6)  # size 5 was never audited


# even covers

def test_duplicated_rows_cover():
    d = np.random.default_rng(0).integers(0, 2, (6, 10), dtype=np.uint8)
    d[4] = d[2]
    res = even_cover_search(BitMatrix.from_dense(d), 2)
    assert res.found.indices().tolist() == [2, 4]


def test_triangle_cover():
    tri = BitMatrix.from_dense([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    res = even_cover_search(tri, 3)
    assert res.found.weight() == 3
    assert even_cover_search(tri, 2).found is None


def test_zero_row_is_a_cover():
    res = even_cover_search(BitMatrix.from_dense([[1, 0], [0, 0]]), 2)
    assert res.found.indices().tolist() == [1]


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 16), st.integers(2, 10), st.integers(1, 3), st.integers(0, 2**32))
def test_search_is_complete_up_to_four(M, N, k, seed):
    a = sample_random_graph(M, N, min(k, N), seed)
    best = brute_min_cover(a, 4)
    res = even_cover_search(a, 4)
    assert res.complete_up_to == 4
    if best is None:
        assert res.found is None
    else:
        z = res.found
        assert z is not None and z.any() and z.weight() <= 4
        assert not a.vecmat(z).any()


@settings(max_examples=40, deadline=None)
@given(st.integers(5, 14), st.integers(0, 2**32))
def test_certified_expander_has_no_small_cover(M, seed):
    a = sample_random_graph(M, 40, 6, seed)
    rep = expansion_audit(a, 4)
    if rep.certifies(4, 0.51):
        assert even_cover_search(a, 4).found is None


def test_q2_graph_cover_consistent_with_audit(g6):
    res = even_cover_search(g6, 4)
    rep = expansion_audit(g6, 4)
    assert res.found is not None and res.found.weight() == 4
    assert not rep.certifies(4, 0.51)


def test_cover_sees_only_noise(g6):
    z = even_cover_search(g6, 4).found
    for i in range(20):
        inst = sample_planted(g6, 0.2, SplitMix64(9).spawn(i))
        assert z.dot(inst.y) == z.dot(inst.e)


# disjoint covers

def test_disjoint_covers_pigeonhole():
    a = sample_random_graph(2 * 9, 8, 3, 4)
    covers = disjoint_even_covers(a, 10)
    assert len(covers) == 2
    for z in covers:
        assert z.any() and z.weight() <= 9 and not a.vecmat(z).any()
    assert not (covers[0] & covers[1]).any()


def test_disjoint_covers_guv12(g12):
    covers = disjoint_even_covers(g12, 100)
    assert len(covers) == 4096 // 257 == 15
    seen = BitVector.zeros(4096)
    for z in covers:
        assert not g12.adjacency.vecmat(z).any()
        assert not (seen & z).any()
        seen = seen | z


def test_disjoint_covers_need_tall_matrix():
    with pytest.raises(ValueError):
        disjoint_even_covers(BitMatrix.identity(4), 1)


# random baseline

def test_random_graph_properties():
    a = sample_random_graph(50, 20, 4, 11)
    assert (a.row_weights() == 4).all()
    assert a == sample_random_graph(50, 20, 4, 11)
    assert a.to_json() == sample_random_graph(50, 20, 4, 11).to_json()
    assert (sample_random_graph(5, 4, 4, 1).to_dense() == 1).all()
    with pytest.raises(ValueError):
        sample_random_graph(5, 3, 4, 1)
