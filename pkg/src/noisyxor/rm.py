"""Reed-Muller codes RM(m, r).

Monomials are subsets S of {0..m-1} with |S| <= r, ordered by size and then
lexicographically; monomial S is stored as the bitmask sum(1 << i for i in S).
Points are the integers 0..2^m-1, coordinate i of the point being bit i.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Iterable, NamedTuple, Optional

import numpy as np

from .bitlin import BitMatrix, BitVector, rank, solve_particular


@dataclass(frozen=True)
class RmCode:
    m: int
    r: int

    def __post_init__(self):
        if not 0 <= self.r <= self.m:
            raise ValueError(f"need 0 <= r <= m, got m={self.m}, r={self.r}")

    @property
    def length(self) -> int:
        return 1 << self.m

    @property
    def dim(self) -> int:
        return sum(comb(self.m, i) for i in range(self.r + 1))

    @property
    def distance(self) -> int:
        return 1 << (self.m - self.r)

    @property
    def monomials(self) -> tuple[int, ...]:
        return monomials(self.m, self.r)

    def to_json(self) -> dict:
        return {"m": self.m, "r": self.r}


@lru_cache(maxsize=None)
def monomials(m: int, r: int) -> tuple[int, ...]:
    out = []
    for s in range(r + 1):
        for S in combinations(range(m), s):
            out.append(sum(1 << i for i in S))
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_index(m: int, r: int) -> dict[int, int]:
    return {mask: j for j, mask in enumerate(monomials(m, r))}


@lru_cache(maxsize=32)
def _eval_dense(m: int, r: int) -> np.ndarray:
    pts = np.arange(1 << m, dtype=np.int64)
    masks = np.asarray(monomials(m, r), dtype=np.int64)
    dense = ((pts[None, :] & masks[:, None]) == masks[:, None]).astype(np.uint8)
    dense.flags.writeable = False
    return dense


def eval_dense(m: int, r: int) -> np.ndarray:
    """Evaluation table, one 0/1 row per monomial (read-only, cached)."""
    return _eval_dense(m, r)


@lru_cache(maxsize=32)
def _generator(m: int, r: int) -> BitMatrix:
    return BitMatrix.from_dense(_eval_dense(m, r))


def generator_matrix(code: RmCode) -> BitMatrix:
    return _generator(code.m, code.r)


def parity_check_matrix(code: RmCode) -> BitMatrix:
    """Generator of the dual RM(m, m-r-1); zero rows when r = m."""
    if code.r == code.m:
        return BitMatrix(0, code.length)
    return _generator(code.m, code.m - code.r - 1)


def rate(m: int, r: int) -> Fraction:
    if not 0 <= r <= m:
        raise ValueError(f"need 0 <= r <= m, got m={m}, r={r}")
    return Fraction(sum(comb(m, i) for i in range(r + 1)), 1 << m)


def encode(code: RmCode, message: BitVector) -> BitVector:
    if len(message) != code.dim:
        raise ValueError(f"message length {len(message)} != dim {code.dim}")
    return generator_matrix(code).vecmat(message)


def syndrome(code: RmCode, word: BitVector) -> BitVector:
    return parity_check_matrix(code).matvec(word)


def is_codeword(code: RmCode, word: BitVector) -> bool:
    return not syndrome(code, word).any()


def _as_mask(n: int, erased) -> np.ndarray:
    if isinstance(erased, BitVector):
        if len(erased) != n:
            raise ValueError("erasure indicator has the wrong length")
        return erased.to_bits().astype(bool)
    mask = np.zeros(n, dtype=bool)
    idx = np.fromiter(erased, dtype=np.int64) if not isinstance(erased, np.ndarray) else erased
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise IndexError("erased point out of range")
    mask[idx] = True
    return mask


class ErasureDecodeResult(NamedTuple):
    status: str  # "decoded" | "ambiguous" | "inconsistent"
    codeword: Optional[BitVector]
    message: Optional[BitVector]


def erasure_decode(code: RmCode, y: BitVector, erased) -> ErasureDecodeResult:
    """Recover the codeword agreeing with y off the erased points.

    Solves messageᵀ·G = y on the kept columns by plain elimination. Inconsistency
    takes precedence over ambiguity when both hold.
    """
    if len(y) != code.length:
        raise ValueError(f"word length {len(y)} != {code.length}")
    keep = ~_as_mask(code.length, erased)
    g = _eval_dense(code.m, code.r)
    system = BitMatrix.from_dense(g[:, keep].T)
    rhs = BitVector.from_bits(y.to_bits()[keep])
    msg, rk = solve_particular(system, rhs)
    if msg is None:
        return ErasureDecodeResult("inconsistent", None, None)
    if rk < code.dim:
        return ErasureDecodeResult("ambiguous", None, None)
    return ErasureDecodeResult("decoded", encode(code, msg), msg)


def erasure_correctable(code: RmCode, erased) -> bool:
    """True iff no nonzero codeword is supported inside the erased set.

    Checked as linear independence of the erased columns of the parity-check
    matrix, which is equivalent to the kept generator columns having rank dim.
    """
    mask = _as_mask(code.length, erased)
    size = int(mask.sum())
    if size == 0:
        return True
    if code.r == code.m:
        return False
    h = _eval_dense(code.m, code.m - code.r - 1)
    if size > h.shape[0]:
        return False
    return rank(BitMatrix.from_dense(h[:, mask].T)) == size


def erasure_correctable_by_generator(code: RmCode, erased) -> bool:
    keep = ~_as_mask(code.length, erased)
    g = _eval_dense(code.m, code.r)
    return rank(BitMatrix.from_dense(g[:, keep])) == code.dim


def monomials_to_message(m: int, r: int, masks: Iterable[int]) -> BitVector:
    """Message vector of a multilinear polynomial given as a set of monomial masks."""
    index = monomial_index(m, r)
    bits = np.zeros(len(index), dtype=np.uint8)
    for mask in masks:
        if mask not in index:
            raise ValueError(f"monomial {mask:#x} has degree above {r}")
        bits[index[mask]] ^= 1
    return BitVector.from_bits(bits)
