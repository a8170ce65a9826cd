import random
from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noisyxor.bitlin import BitVector, gf2_matmul, rank
from noisyxor.rm import (
    RmCode,
    encode,
    erasure_correctable,
    erasure_correctable_by_generator,
    erasure_decode,
    generator_matrix,
    is_codeword,
    monomials,
    monomials_to_message,
    parity_check_matrix,
    rate,
    syndrome,
)
from oracles import rank_ints, rm_codewords_basis, span_ints

codes = st.integers(1, 7).flatmap(lambda m: st.tuples(st.just(m), st.integers(0, m)))


def random_message(code, seed):
    return BitVector.from_bits(np.random.default_rng(seed).integers(0, 2, code.dim))


# orders and generator

def test_monomial_and_point_order():
    assert monomials(3, 2) == (0b000, 0b001, 0b010, 0b100, 0b011, 0b101, 0b110)
    g = generator_matrix(RmCode(3, 1)).to_dense()
    # row of x_1 is 1 exactly on odd points (x_1 is the least significant bit)
    assert g[1].tolist() == [0, 1, 0, 1, 0, 1, 0, 1]
    assert g[3].tolist() == [0, 0, 0, 0, 1, 1, 1, 1]


@pytest.mark.parametrize("m,r", [(3, 1), (4, 2), (5, 3)])
def test_generator_matches_oracle(m, r):
    rows = generator_matrix(RmCode(m, r)).to_dense()
    expect = rm_codewords_basis(m, r)
    assert [sum(int(b) << x for x, b in enumerate(row)) for row in rows] == expect


def test_rm31_has_four_rows():
    assert generator_matrix(RmCode(3, 1)).rows == 4


@pytest.mark.parametrize("m", [1, 3, 5])
def test_rm_mm_is_full_space(m):
    assert rank(generator_matrix(RmCode(m, m))) == 2**m


def test_rm42_minimum_distance_exhaustive():
    words = span_ints(rm_codewords_basis(4, 2))
    assert len(words) == 2**11
    assert min(bin(w).count("1") for w in words if w) == 4 == RmCode(4, 2).distance


@pytest.mark.parametrize("m,r", [(3, 1), (4, 1), (4, 2), (4, 3)])
def test_min_weight_exhaustive(m, r):
    words = span_ints(rm_codewords_basis(m, r))
    assert min(bin(w).count("1") for w in words if w) == 2 ** (m - r)


@settings(max_examples=30)
@given(st.integers(5, 12), st.data())
def test_min_weight_sampled(m, data):
    r = data.draw(st.integers(0, min(m, 4)))
    code = RmCode(m, r)
    msg = random_message(code, data.draw(st.integers(0, 2**32)))
    w = encode(code, msg).weight()
    assert w == 0 or w >= code.distance


# rate

def test_rate_examples():
    assert rate(3, 1) == Fraction(1, 2)
    assert rate(7, 7) == 1
    assert sum(comb(10, i) for i in range(7)) == 848
    assert rate(10, 6) == Fraction(848, 1024)


@given(codes)
def test_rate_is_dim_over_length(mr):
    m, r = mr
    code = RmCode(m, r)
    assert rate(m, r) == Fraction(code.dim, code.length)
    assert rate(m, r).denominator & (rate(m, r).denominator - 1) == 0


# parity check

def test_rm31_self_dual():
    code = RmCode(3, 1)
    h = parity_check_matrix(code)
    assert h == generator_matrix(code)
    assert not gf2_matmul(generator_matrix(code).to_dense(), h.to_dense().T).any()


@pytest.mark.parametrize("m", [2, 4, 6])
def test_parity_of_rm_m_minus_one(m):
    h = parity_check_matrix(RmCode(m, m - 1))
    assert h.rows == 1 and h.row(0).weight() == 2**m


def test_parity_of_full_code_is_empty():
    assert parity_check_matrix(RmCode(4, 4)).rows == 0


def test_rank_sum_rm52():
    code = RmCode(5, 2)
    g = generator_matrix(code).to_dense()
    h = parity_check_matrix(code).to_dense()
    from oracles import rows_as_ints

    assert rank_ints(rows_as_ints(g)) + rank_ints(rows_as_ints(h)) == 32


@given(codes)
def test_duality(mr):
    m, r = mr
    code = RmCode(m, r)
    h = parity_check_matrix(code)
    assert code.dim + h.rows == code.length
    if h.rows:
        assert not gf2_matmul(generator_matrix(code).to_dense(), h.to_dense().T).any()


# encode

def test_encode_trivial():
    code = RmCode(4, 2)
    assert not encode(code, BitVector.zeros(code.dim)).any()
    assert encode(code, BitVector.from_indices(code.dim, [0])) == BitVector.ones(16)
    with pytest.raises(ValueError):
        encode(code, BitVector.zeros(code.dim + 1))


@given(st.integers(0, 2**32))
def test_encoded_words_pass_parity(seed):
    code = RmCode(4, 2)
    c = encode(code, random_message(code, seed))
    assert is_codeword(code, c)
    assert not syndrome(code, c).any()


def test_monomials_to_message():
    # x1*x2 + 1 on RM(2, 2)
    msg = monomials_to_message(2, 2, [0b11, 0])
    assert encode(RmCode(2, 2), msg).to_bits().tolist() == [1, 1, 1, 0]
    with pytest.raises(ValueError):
        monomials_to_message(3, 1, [0b11])


# erasures

def test_erasure_decode_no_erasures():
    code = RmCode(4, 2)
    c = encode(code, random_message(code, 1))
    res = erasure_decode(code, c, [])
    assert res.status == "decoded" and res.codeword == c


def test_erase_everything_is_ambiguous():
    code = RmCode(3, 1)
    assert erasure_decode(code, BitVector.zeros(8), range(8)).status == "ambiguous"
    assert not erasure_correctable(code, range(8))


def test_erasure_decode_inconsistent():
    code = RmCode(3, 0)
    y = BitVector.from_bits([1, 0, 1, 1, 1, 1, 1, 1])
    assert erasure_decode(code, y, [7]).status == "inconsistent"


@pytest.mark.parametrize("size,failures", [(4, 0), (8, 1), (10, 32)])
def test_rm41_random_erasures(size, failures):
    """Decode failures equal an independent rank-deficiency count, frozen per size."""
    code = RmCode(4, 1)
    basis = rm_codewords_basis(4, 1)
    seen = 0
    for s in range(200):
        erased = random.Random(s).sample(range(16), size)
        c = encode(code, random_message(code, s))
        corrupted = c ^ BitVector.from_indices(16, erased[: len(erased) // 2])
        res = erasure_decode(code, corrupted, erased)
        keep = [x for x in range(16) if x not in erased]
        deficient = rank_ints([sum(((w >> x) & 1) << i for i, x in enumerate(keep)) for w in basis]) < 5
        assert (res.status != "decoded") == deficient
        if res.status == "decoded":
            assert res.codeword == c
        seen += deficient
    assert seen == failures


def test_correctable_empty_and_min_weight_support():
    code = RmCode(4, 2)
    assert erasure_correctable(code, [])
    # support of x1*x2 is a minimum-weight codeword
    c = encode(code, monomials_to_message(4, 2, [0b0011]))
    assert c.weight() == 4
    assert not erasure_correctable(code, c.indices())


def test_rm31_small_patterns_exhaustive():
    code = RmCode(3, 1)
    words = [w for w in span_ints(rm_codewords_basis(3, 1)) if w]
    for size in range(9):
        for pat in combinations(range(8), size):
            mask = sum(1 << p for p in pat)
            covered = any(w & ~mask == 0 for w in words)
            assert erasure_correctable(code, pat) == (not covered)
            if size <= 3:
                assert erasure_correctable(code, pat)


@settings(max_examples=60)
@given(st.integers(3, 7), st.data())
def test_correctable_routes_agree(m, data):
    r = data.draw(st.integers(0, m))
    code = RmCode(m, r)
    p = data.draw(st.floats(0, 1))
    seed = data.draw(st.integers(0, 2**32))
    erased = np.flatnonzero(np.random.default_rng(seed).random(code.length) < p)
    ok = erasure_correctable(code, erased)
    assert ok == erasure_correctable_by_generator(code, erased)
    c = encode(code, random_message(code, seed))
    res = erasure_decode(code, c ^ BitVector.from_indices(code.length, erased[::2]), erased)
    assert (res.status == "decoded") == ok
    if ok:
        assert res.codeword == c


def test_code_json_and_validation():
    assert RmCode(5, 2).to_json() == {"m": 5, "r": 2}
    with pytest.raises(ValueError):
        RmCode(3, 4)
