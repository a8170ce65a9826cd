"""Decoding RM(m, d) from random errors by reduction to erasures.

With l = (m-d)/2, the locator space S holds every u of degree <= l for which
u⊙y lies in RM(m, (m+d)/2). Any such u that vanishes on the error support
qualifies, so the common zeros of S cover the errors; those points are then
treated as erasures of RM(m, d).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

import numpy as np

from .bitlin import BitMatrix, BitVector, gf2_matmul, kernel_matrix
from .rm import RmCode, encode, erasure_decode, eval_dense, is_codeword


def _check_parity(m: int, d: int) -> None:
    if (m + d) % 2:
        raise ValueError(f"m + d must be even (m={m}, d={d})")
    if not 0 <= d <= m:
        raise ValueError(f"need 0 <= d <= m (m={m}, d={d})")


def locator_space(m: int, d: int, y: BitVector) -> BitMatrix:
    """Basis of S as rows over the monomials of RM(m, l)."""
    _check_parity(m, d)
    if len(y) != 1 << m:
        raise ValueError(f"word length {len(y)} != {1 << m}")
    ell = (m - d) // 2
    low = eval_dense(m, ell)
    if ell == 0:
        # the dual of RM(m, m) is trivial, so every constant qualifies
        return BitMatrix.from_dense(np.ones((1, 1), dtype=np.uint8))
    # parity check of RM(m, (m+d)/2) is RM(m, l-1): the leading rows of `low`
    n_check = RmCode(m, ell - 1).dim
    masked = low[:n_check] * y.to_bits()[None, :]
    syndromes = gf2_matmul(masked, low.T)  # row i: check i, column j: monomial u_j
    return kernel_matrix(BitMatrix.from_dense(syndromes))


def common_zeros(m: int, ell: int, basis: BitMatrix) -> BitVector:
    """Points where every polynomial of the basis evaluates to zero."""
    if basis.rows == 0:
        return BitVector.ones(1 << m)
    values = gf2_matmul(basis.to_dense(), eval_dense(m, ell))
    return BitVector.from_bits((~values.any(axis=0)).astype(np.uint8))


def locate_errors(m: int, d: int, y: BitVector) -> BitVector:
    """Indicator of the located error set (all points when S = {0})."""
    basis = locator_space(m, d, y)
    return common_zeros(m, (m - d) // 2, basis)


@dataclass
class DecodeOutcome:
    status: str  # decoded | located_but_ambiguous | no_locate | inconsistent
    located: BitVector
    codeword: Optional[BitVector] = None
    message: Optional[BitVector] = None
    residual: Optional[int] = None

    @property
    def ok(self) -> bool:
        return self.status == "decoded"

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "located_size": self.located.weight(),
            "residual_weight": self.residual,
        }


def decode_bsc(m: int, d: int, y: BitVector) -> DecodeOutcome:
    _check_parity(m, d)
    located = locate_errors(m, d, y)
    if located.weight() == len(y):
        return DecodeOutcome("no_locate", located)
    code = RmCode(m, d)
    res = erasure_decode(code, y, located)
    if res.status == "ambiguous":
        return DecodeOutcome("located_but_ambiguous", located)
    if res.status == "inconsistent":
        return DecodeOutcome("inconsistent", located)
    assert is_codeword(code, res.codeword)
    return DecodeOutcome("decoded", located, res.codeword, res.message,
                         (y ^ res.codeword).weight())


class NearestResult(NamedTuple):
    codeword: BitVector
    distance: int
    unique: bool


def nearest_codeword_bruteforce(g: BitMatrix, y: BitVector, max_dim: int = 20) -> NearestResult:
    """Exact nearest codeword by enumerating all 2^dim messages."""
    if g.rows > max_dim:
        raise ValueError(f"dimension {g.rows} exceeds the enumeration cap {max_dim}")
    if len(y) != g.cols:
        raise ValueError("length mismatch")
    rows = g.words
    low_bits = min(g.rows, 16)
    # table of all combinations of the first low_bits rows
    table = np.zeros((1, rows.shape[1]), dtype=np.uint64)
    for r in range(low_bits):
        table = np.concatenate([table, table ^ rows[r]])
    best = None
    best_code = None
    count = 0
    for hi in range(1 << (g.rows - low_bits)):
        base = np.zeros(rows.shape[1], dtype=np.uint64)
        for r in range(g.rows - low_bits):
            if hi >> r & 1:
                base ^= rows[low_bits + r]
        words = table ^ base
        dist = np.bitwise_count(words ^ y.words).sum(axis=1)
        lo = int(dist.min())
        hits = int((dist == lo).sum())
        if best is None or lo < best:
            best, count = lo, hits
            best_code = words[int(np.argmin(dist))]
        elif lo == best:
            count += hits
    return NearestResult(BitVector(g.cols, best_code), best, count == 1)


class UniqueBound(NamedTuple):
    threshold: Fraction
    approx: Optional[float]


def unique_decode_bound(m: int, d: int, k: Optional[int] = None, N: Optional[int] = None) -> UniqueBound:
    """delta/2 = 2^-d / 2, plus k/N for display when both are given."""
    approx = k / N if k is not None and N else None
    return UniqueBound(Fraction(1, 2 ** (d + 1)), approx)


@dataclass
class LocationStats:
    """How the located set compares with the true error support over a batch."""

    trials: int
    exact: int = 0
    superset: int = 0
    missed: int = 0
    decoded: int = 0

    def to_json(self) -> dict:
        return {"trials": self.trials, "exact": self.exact, "strict_superset": self.superset,
                "missed_errors": self.missed, "decoded": self.decoded}


def location_stats(m: int, d: int, eta: float, trials: int, rng) -> LocationStats:
    """Measure Ê against supp(e) on random codewords of RM(m, d) plus Bernoulli(eta) noise.

    Pattern j uses the stream ``rng.spawn(j)``.
    """
    _check_parity(m, d)
    code = RmCode(m, d)
    stats = LocationStats(trials)
    for j in range(trials):
        r = rng.spawn(j)
        c = encode(code, r.random_bits(code.dim))
        e = r.bernoulli_bits(code.length, eta)
        out = decode_bsc(m, d, c ^ e)
        loc = out.located
        if loc == e:
            stats.exact += 1
        elif (e & ~loc).any():
            stats.missed += 1
        else:
            stats.superset += 1
        stats.decoded += out.ok and out.codeword == c
    return stats
