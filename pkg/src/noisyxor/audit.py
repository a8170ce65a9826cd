"""Empirical graph audits: vertex expansion, small even covers, disjoint covers."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Optional, Union

import numpy as np

from .bitlin import BitMatrix, BitVector, _pack, gf2_matmul, left_kernel_basis
from .coset import CosetGraph
from .rng import SplitMix64

DEFAULT_BUDGET = 10**7
SAMPLE_BATCH = 1024
EVEN_COVER_COMPLETE = 4

Graph = Union[CosetGraph, BitMatrix]


def exhaustive_budget() -> int:
    env = os.environ.get("NOISYXOR_EXHAUSTIVE_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


def _adjacency(g: Graph) -> BitMatrix:
    return g.adjacency if isinstance(g, CosetGraph) else g


def left_degree(a: BitMatrix) -> int:
    w = a.row_weights()
    if w.size and (w != w[0]).any():
        raise ValueError("graph is not left-regular")
    return int(w[0]) if w.size else 0


@dataclass
class SizeRecord:
    size: int
    mode: str  # "exhaustive" | "sampled"
    worst_ratio: Fraction
    witness_rows: list
    trials: int

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "mode": self.mode,
            "trials": self.trials,
            "worst_ratio": float(self.worst_ratio),
            "worst_ratio_exact": str(self.worst_ratio),
            "witness_rows": list(self.witness_rows),
        }


@dataclass
class ExpansionReport:
    k: int
    records: list = field(default_factory=list)

    def min_ratio(self, upto: Optional[int] = None) -> Fraction:
        recs = [r for r in self.records if upto is None or r.size <= upto]
        return min(r.worst_ratio for r in recs)

    def certifies(self, T: int, alpha) -> bool:
        """True iff sizes 1..T were all enumerated exhaustively with ratio >= alpha."""
        sizes = {r.size: r for r in self.records}
        alpha = Fraction(str(alpha)) if isinstance(alpha, float) else Fraction(alpha)
        for s in range(1, T + 1):
            r = sizes.get(s)
            if r is None or r.mode != "exhaustive" or r.worst_ratio < alpha:
                return False
        return True

    def to_json(self) -> dict:
        return {"k": self.k, "records": [r.to_json() for r in self.records]}


def _exhaustive(w: np.ndarray, s: int) -> tuple[int, tuple]:
    """Smallest |N(S)| over all s-subsets, with the first subset attaining it."""
    M = w.shape[0]
    best = None
    witness: tuple = ()
    for prefix in combinations(range(M - 1), s - 1):
        start = prefix[-1] + 1 if prefix else 0
        if start >= M:
            continue
        acc = np.bitwise_or.reduce(w[list(prefix)], axis=0) if prefix else np.zeros(
            w.shape[1], dtype=w.dtype
        )
        sizes = np.bitwise_count(w[start:] | acc).sum(axis=1)
        j = int(np.argmin(sizes))
        val = int(sizes[j])
        if best is None or val < best:
            best = val
            witness = prefix + (start + j,)
    return best, witness


def _sampled(w: np.ndarray, s: int, samples: int, seed: int) -> tuple[int, tuple]:
    M = w.shape[0]
    best = None
    witness: tuple = ()
    base = SplitMix64(seed)
    for batch in range((samples + SAMPLE_BATCH - 1) // SAMPLE_BATCH):
        rng = base.spawn(s, batch)
        n = min(SAMPLE_BATCH, samples - batch * SAMPLE_BATCH)
        sets = np.array([sorted(rng.sample_positions(M, s)) for _ in range(n)], dtype=np.int64)
        acc = np.bitwise_or.reduce(w[sets], axis=1)
        sizes = np.bitwise_count(acc).sum(axis=1)
        j = int(np.argmin(sizes))
        if best is None or int(sizes[j]) < best:
            best = int(sizes[j])
            witness = tuple(int(x) for x in sets[j])
    return best, witness


def expansion_audit(
    g: Graph, s_max: int, samples: int = 1000, seed: int = 0, budget: Optional[int] = None
) -> ExpansionReport:
    """Worst |N(S)| / (k|S|) for every set size up to s_max.

    Sizes with C(M, s) within the budget are enumerated completely; larger
    sizes are estimated from uniformly sampled subsets and are not certificates.
    """
    if s_max < 1:
        raise ValueError("s_max must be >= 1")
    a = _adjacency(g)
    k = left_degree(a)
    budget = exhaustive_budget() if budget is None else budget
    w = a.words
    report = ExpansionReport(k)
    for s in range(1, min(s_max, a.rows) + 1):
        if comb(a.rows, s) <= budget:
            val, wit = _exhaustive(w, s)
            rec = SizeRecord(s, "exhaustive", Fraction(val, k * s), list(wit), comb(a.rows, s))
        else:
            val, wit = _sampled(w, s, samples, seed)
            rec = SizeRecord(s, "sampled", Fraction(val, k * s), list(wit), samples)
        report.records.append(rec)
    return report


# even covers

@dataclass
class EvenCoverResult:
    found: Optional[BitVector]
    mode: str
    complete_up_to: int

    def to_json(self) -> dict:
        return {
            "found": None if self.found is None else self.found.indices().tolist(),
            "weight": None if self.found is None else self.found.weight(),
            "mode": self.mode,
            "complete_up_to": self.complete_up_to,
        }


def _row_keys(a: BitMatrix) -> np.ndarray:
    """A GF(2)-linear 64-bit fingerprint per row, so key(r1 ^ r2) = key(r1) ^ key(r2)."""
    proj = SplitMix64(0x5EED).block(a.cols)
    bits = ((proj[:, None] >> np.arange(64, dtype=np.uint64)) & np.uint64(1)).astype(np.uint8)
    keys = gf2_matmul(a.to_dense(), bits)
    return _pack(keys, 64)[:, 0]


def _cover(M: int, rows) -> BitVector:
    return BitVector.from_indices(M, sorted(int(r) for r in rows))


def _pairs(M: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(M, 1)


def even_cover_search(a: Graph, w_max: int) -> EvenCoverResult:
    """Find a nonzero z with zᵀA = 0 and weight <= w_max.

    Complete for weights up to 4: fingerprints of single rows and of row pairs
    are hash-joined, and every candidate is verified on the full rows.
    """
    if w_max < 2:
        raise ValueError("w_max must be >= 2")
    a = _adjacency(a)
    M = a.rows
    w = a.words
    limit = min(w_max, EVEN_COVER_COMPLETE)
    mode = "hash-join" if w_max <= EVEN_COVER_COMPLETE else "hash-join (weights <= 4 only)"

    def done(rows):
        z = _cover(M, rows)
        assert not a.vecmat(z).any()
        return EvenCoverResult(z, mode, limit)

    zero = np.flatnonzero(~w.any(axis=1))
    if zero.size:
        return done([zero[0]])
    keys = _row_keys(a)
    # weight 2
    order = np.argsort(keys, kind="stable")
    sk = keys[order]
    for j in np.flatnonzero(sk[1:] == sk[:-1]):
        r1, r2 = int(order[j]), int(order[j + 1])
        if np.array_equal(w[r1], w[r2]):
            return done([r1, r2])
    if limit < 3 or M < 3:
        return EvenCoverResult(None, mode, limit)
    # weight 3 and 4 via pair fingerprints, one row of the triangle at a time
    single = {}
    for r, kk in enumerate(keys.tolist()):
        single.setdefault(kk, []).append(r)
    pair_keys = []
    pair_idx = []
    for i in range(M - 1):
        pk = keys[i] ^ keys[i + 1:]
        if limit >= 3:
            hits = np.flatnonzero(np.isin(pk, sk))
            for h in hits:
                j = i + 1 + int(h)
                for r in single.get(int(pk[h]), []):
                    if r not in (i, j) and np.array_equal(w[i] ^ w[j], w[r]):
                        return done([i, j, r])
        pair_keys.append(pk)
        pair_idx.append(np.full(pk.shape, i, dtype=np.int64))
    if limit < 4:
        return EvenCoverResult(None, mode, limit)
    pk = np.concatenate(pair_keys)
    pi = np.concatenate(pair_idx)
    pj = np.concatenate([np.arange(i + 1, M) for i in range(M - 1)])
    order = np.argsort(pk, kind="stable")
    sk = pk[order]
    starts = np.flatnonzero(np.r_[True, sk[1:] != sk[:-1]])
    ends = np.r_[starts[1:], sk.size]
    for s0, e0 in zip(starts, ends):
        if e0 - s0 < 2:
            continue
        grp = order[s0:e0]
        for x in range(len(grp)):
            for y in range(x + 1, len(grp)):
                p, q = grp[x], grp[y]
                rows = {int(pi[p]), int(pj[p]), int(pi[q]), int(pj[q])}
                if len(rows) == 4:
                    z = _cover(M, rows)
                    if not a.vecmat(z).any():
                        return done(rows)
    return EvenCoverResult(None, mode, limit)


def disjoint_even_covers(a: Graph, want: int) -> list[BitVector]:
    """Split rows into consecutive blocks of N+1 and take one dependency per block."""
    a = _adjacency(a)
    M, N = a.shape
    if M <= N:
        raise ValueError("need more rows than columns")
    out = []
    for b in range(min(want, M // (N + 1))):
        rows = np.arange(b * (N + 1), (b + 1) * (N + 1))
        basis = left_kernel_basis(a.select_rows(rows))
        local = basis[0]
        out.append(_cover(M, rows[local.indices()]))
    return out


def sample_random_graph(M: int, N: int, k: int, seed: int) -> BitMatrix:
    """Each left vertex picks k distinct right neighbours uniformly at random."""
    if k > N:
        raise ValueError(f"k = {k} exceeds N = {N}")
    rng = SplitMix64(seed)
    dense = np.zeros((M, N), dtype=np.uint8)
    for v in range(M):
        dense[v, rng.sample_positions(N, k)] = 1
    return BitMatrix.from_dense(dense)
