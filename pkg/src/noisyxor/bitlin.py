"""Dense GF(2) vectors and matrices, bit-packed into little-endian 64-bit words.

Coordinate ``j`` of a vector lives in word ``j // 64`` at bit ``j % 64``.
Trailing bits past the logical length are always zero, so equality and
hashing can work on the raw words.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

import numpy as np

WORD = 64
_U64 = np.uint64


def nwords(n: int) -> int:
    return (n + WORD - 1) // WORD


def _pack(dense: np.ndarray, n: int) -> np.ndarray:
    """Pack a (..., n) array of 0/1 into (..., nwords(n)) uint64 words."""
    dense = np.asarray(dense, dtype=np.uint8)
    lead = dense.shape[:-1]
    nw = nwords(n)
    packed = np.packbits(dense, axis=-1, bitorder="little")
    pad = nw * 8 - packed.shape[-1]
    if pad:
        packed = np.concatenate(
            [packed, np.zeros(lead + (pad,), dtype=np.uint8)], axis=-1
        )
    return np.ascontiguousarray(packed).view("<u8").reshape(lead + (nw,)).astype(_U64)


def _unpack(words: np.ndarray, n: int) -> np.ndarray:
    words = np.ascontiguousarray(words, dtype="<u8")
    as_bytes = words.view(np.uint8).reshape(words.shape[:-1] + (words.shape[-1] * 8,))
    return np.unpackbits(as_bytes, axis=-1, count=n, bitorder="little")


def _tail_mask(n: int) -> np.uint64:
    r = n % WORD
    return _U64((1 << r) - 1) if r else _U64(0xFFFFFFFFFFFFFFFF)


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


class BitVector:
    """Immutable vector over GF(2)."""

    __slots__ = ("_n", "_w")

    def __init__(self, n: int, words: Optional[np.ndarray] = None):
        if n < 0:
            raise ValueError("length must be non-negative")
        nw = nwords(n)
        if words is None:
            w = np.zeros(nw, dtype=_U64)
        else:
            w = np.array(words, dtype=_U64).reshape(-1)
            if w.shape[0] != nw:
                raise ValueError(f"expected {nw} words for length {n}, got {w.shape[0]}")
            if nw:
                w[-1] &= _tail_mask(n)
        self._n = n
        self._w = _freeze(w)

    # construction
    @classmethod
    def zeros(cls, n: int) -> "BitVector":
        return cls(n)

    @classmethod
    def ones(cls, n: int) -> "BitVector":
        return cls(n, np.full(nwords(n), 0xFFFFFFFFFFFFFFFF, dtype=_U64))

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitVector":
        arr = np.fromiter((b & 1 for b in bits), dtype=np.uint8) if not isinstance(
            bits, np.ndarray
        ) else (np.asarray(bits) & 1).astype(np.uint8)
        return cls(arr.shape[0], _pack(arr, arr.shape[0]))

    @classmethod
    def from_indices(cls, n: int, indices: Iterable[int]) -> "BitVector":
        dense = np.zeros(n, dtype=np.uint8)
        idx = np.fromiter(indices, dtype=np.int64) if not isinstance(
            indices, np.ndarray
        ) else indices.astype(np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= n):
            raise IndexError("index out of range")
        dense[idx] = 1
        return cls(n, _pack(dense, n))

    @classmethod
    def from_int(cls, value: int, n: int) -> "BitVector":
        if value < 0 or value >> n:
            raise ValueError("value does not fit in length")
        nw = nwords(n)
        raw = value.to_bytes(nw * 8, "little")
        return cls(n, np.frombuffer(raw, dtype="<u8").astype(_U64))

    @classmethod
    def from_hex(cls, text: str, n: int) -> "BitVector":
        return cls.from_int(int(text, 16) if text else 0, n)

    # access
    def __len__(self) -> int:
        return self._n

    @property
    def words(self) -> np.ndarray:
        return self._w

    def __getitem__(self, j: int) -> int:
        if j < 0:
            j += self._n
        if not 0 <= j < self._n:
            raise IndexError(j)
        return int((self._w[j >> 6] >> _U64(j & 63)) & _U64(1))

    def to_bits(self) -> np.ndarray:
        return _unpack(self._w, self._n)

    def to_int(self) -> int:
        return int.from_bytes(self._w.astype("<u8").tobytes(), "little")

    def to_hex(self) -> str:
        digits = max(1, (self._n + 3) // 4)
        return format(self.to_int(), "x").zfill(digits)

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.to_bits())

    def weight(self) -> int:
        return int(np.bitwise_count(self._w).sum())

    def any(self) -> bool:
        return bool(self._w.any())

    # arithmetic
    def _check(self, other: "BitVector") -> None:
        if not isinstance(other, BitVector):
            raise TypeError("expected BitVector")
        if other._n != self._n:
            raise ValueError(f"length mismatch: {self._n} vs {other._n}")

    def __xor__(self, other: "BitVector") -> "BitVector":
        self._check(other)
        return BitVector(self._n, self._w ^ other._w)

    __add__ = __xor__
    __sub__ = __xor__

    def __and__(self, other: "BitVector") -> "BitVector":
        self._check(other)
        return BitVector(self._n, self._w & other._w)

    def __or__(self, other: "BitVector") -> "BitVector":
        self._check(other)
        return BitVector(self._n, self._w | other._w)

    def __invert__(self) -> "BitVector":
        return BitVector(self._n, ~self._w)

    def dot(self, other: "BitVector") -> int:
        self._check(other)
        return int(np.bitwise_count(self._w & other._w).sum() & 1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return self._n == other._n and np.array_equal(self._w, other._w)

    def __hash__(self) -> int:
        return hash((self._n, self._w.tobytes()))

    def __repr__(self) -> str:
        return f"BitVector({self._n}, 0x{self.to_hex()})"


class BitMatrix:
    """Immutable row-major GF(2) matrix; each row is packed like a BitVector."""

    __slots__ = ("_r", "_c", "_w")

    def __init__(self, rows: int, cols: int, words: Optional[np.ndarray] = None):
        nw = nwords(cols)
        if words is None:
            w = np.zeros((rows, nw), dtype=_U64)
        else:
            w = np.array(words, dtype=_U64).reshape(rows, nw)
            if nw:
                w[:, -1] &= _tail_mask(cols)
        self._r = rows
        self._c = cols
        self._w = _freeze(w)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @classmethod
    def from_dense(cls, dense) -> "BitMatrix":
        a = np.asarray(dense)
        if a.ndim != 2:
            raise ValueError("expected a 2-d array")
        a = (a & 1).astype(np.uint8) if a.dtype != bool else a.astype(np.uint8)
        r, c = a.shape
        return cls(r, c, _pack(a, c) if r else np.zeros((0, nwords(c)), dtype=_U64))

    @classmethod
    def from_rows(cls, rows: Sequence[BitVector], cols: Optional[int] = None) -> "BitMatrix":
        if not rows:
            if cols is None:
                raise ValueError("cols required for an empty row list")
            return cls(0, cols)
        c = len(rows[0])
        if cols is not None and cols != c:
            raise ValueError("column count mismatch")
        if any(len(v) != c for v in rows):
            raise ValueError("rows have different lengths")
        return cls(len(rows), c, np.stack([v.words for v in rows]))

    @property
    def rows(self) -> int:
        return self._r

    @property
    def cols(self) -> int:
        return self._c

    @property
    def shape(self) -> tuple[int, int]:
        return (self._r, self._c)

    @property
    def words(self) -> np.ndarray:
        return self._w

    def row(self, i: int) -> BitVector:
        return BitVector(self._c, self._w[i])

    def __iter__(self):
        for i in range(self._r):
            yield self.row(i)

    def __getitem__(self, ij):
        i, j = ij
        return int((self._w[i, j >> 6] >> _U64(j & 63)) & _U64(1))

    def to_dense(self) -> np.ndarray:
        if self._r == 0:
            return np.zeros((0, self._c), dtype=np.uint8)
        return _unpack(self._w, self._c)

    @property
    def T(self) -> "BitMatrix":
        return BitMatrix.from_dense(self.to_dense().T) if self._r else BitMatrix(self._c, 0)

    def column(self, j: int) -> BitVector:
        bits = (self._w[:, j >> 6] >> _U64(j & 63)) & _U64(1)
        return BitVector.from_bits(bits.astype(np.uint8))

    def select_columns(self, cols: Sequence[int]) -> "BitMatrix":
        cols = np.asarray(cols, dtype=np.int64)
        return BitMatrix.from_dense(self.to_dense()[:, cols]) if self._r else BitMatrix(0, len(cols))

    def select_rows(self, rows: Sequence[int]) -> "BitMatrix":
        rows = np.asarray(rows, dtype=np.int64)
        return BitMatrix(len(rows), self._c, self._w[rows])

    def row_weights(self) -> np.ndarray:
        return np.bitwise_count(self._w).sum(axis=1).astype(np.int64)

    def matvec(self, x: BitVector) -> BitVector:
        """A·x."""
        if len(x) != self._c:
            raise ValueError(f"dimension mismatch: {self._c} columns vs vector {len(x)}")
        par = np.bitwise_count(self._w & x.words).sum(axis=1) & 1
        return BitVector.from_bits(par.astype(np.uint8))

    def vecmat(self, z: BitVector) -> BitVector:
        """zᵀ·A, i.e. the XOR of the rows selected by z."""
        if len(z) != self._r:
            raise ValueError(f"dimension mismatch: {self._r} rows vs vector {len(z)}")
        sel = z.to_bits().astype(bool)
        acc = np.bitwise_xor.reduce(self._w[sel], axis=0) if sel.any() else np.zeros(
            nwords(self._c), dtype=_U64
        )
        return BitVector(self._c, acc)

    def __matmul__(self, other):
        if isinstance(other, BitVector):
            return self.matvec(other)
        if self._c != other._r:
            raise ValueError("dimension mismatch")
        return BitMatrix.from_dense(gf2_matmul(self.to_dense(), other.to_dense()))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self._w, other._w)

    def __hash__(self) -> int:
        return hash((self._r, self._c, self._w.tobytes()))

    def __repr__(self) -> str:
        return f"BitMatrix({self._r}x{self._c})"

    # serialization
    def to_json(self) -> dict:
        return {"rows": self._r, "cols": self._c, "data": [v.to_hex() for v in self]}

    @classmethod
    def from_json(cls, obj: dict) -> "BitMatrix":
        r, c = int(obj["rows"]), int(obj["cols"])
        data = obj["data"]
        if len(data) != r:
            raise ValueError(f"expected {r} hex rows, got {len(data)}")
        return cls.from_rows([BitVector.from_hex(h, c) for h in data], cols=c)


def gf2_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Dense 0/1 product mod 2; goes through float32 BLAS, exact while the inner dimension < 2**24."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape[1] >= 1 << 24:
        return (a.astype(np.int64) @ b.astype(np.int64) & 1).astype(np.uint8)
    prod = a.astype(np.float32) @ b.astype(np.float32)
    return (prod.astype(np.int64) & 1).astype(np.uint8)


# elimination

def _rref_words(w: np.ndarray, ncols: int, limit: Optional[int] = None) -> list[int]:
    """Reduce ``w`` (rows x words, modified in place) to reduced row-echelon form.

    Pivots are the first nonzero entry scanning columns left to right and rows
    top to bottom. Only the first ``limit`` columns are eligible as pivots.
    """
    rows = w.shape[0]
    pivots: list[int] = []
    r = 0
    stop = ncols if limit is None else limit
    for c in range(stop):
        if r == rows:
            break
        wi = c >> 6
        bit = _U64(1 << (c & 63))
        col = w[:, wi] & bit
        below = np.flatnonzero(col[r:])
        if below.size == 0:
            continue
        p = r + int(below[0])
        if p != r:
            w[[r, p]] = w[[p, r]]
            col[[r, p]] = col[[p, r]]
        hit = col != 0
        hit[r] = False
        if hit.any():
            w[hit] ^= w[r]
        pivots.append(c)
        r += 1
    return pivots


def rref(m: BitMatrix) -> tuple[BitMatrix, list[int]]:
    w = m.words.copy()
    piv = _rref_words(w, m.cols)
    return BitMatrix(len(piv), m.cols, w[: len(piv)]), piv


def rank(m: BitMatrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    # elimination cost scales with the column scan; scan the shorter side
    if m.cols > m.rows * 4 and m.rows < 4096:
        m = m.T
    w = m.words.copy()
    return len(_rref_words(w, m.cols))


def _kernel_from_rref(r_words: np.ndarray, pivots: list[int], ncols: int) -> BitMatrix:
    piv = np.asarray(pivots, dtype=np.int64)
    free = np.setdiff1d(np.arange(ncols), piv)
    k = np.zeros((free.size, ncols), dtype=np.uint8)
    if free.size:
        k[np.arange(free.size), free] = 1
        if piv.size:
            dense = _unpack(r_words[: piv.size], ncols)
            k[:, piv] = dense[:, free].T
    return BitMatrix.from_dense(k) if free.size else BitMatrix(0, ncols)


def kernel_matrix(a: BitMatrix) -> BitMatrix:
    """Basis of {v : A·v = 0} as matrix rows.

    One row per non-pivot column f, in increasing f. Row f is 1 at f, 0 at
    every other non-pivot column, and its highest set coordinate is f, so the
    basis is the unique reduced echelon basis read from the high end.
    """
    w = a.words.copy()
    piv = _rref_words(w, a.cols)
    return _kernel_from_rref(w, piv, a.cols)


def kernel_basis(a: BitMatrix) -> list[BitVector]:
    return list(kernel_matrix(a))


def left_kernel_basis(a: BitMatrix) -> list[BitVector]:
    """Basis of {z : zᵀA = 0}; same canonical form as :func:`kernel_matrix`."""
    return kernel_basis(a.T)


def solve(a: BitMatrix, b: BitVector) -> Optional[tuple[BitVector, list[BitVector]]]:
    """Solve A·x = b.

    Returns ``(x, kernel)`` with free variables set to zero in ``x``, or None
    when the system is inconsistent.
    """
    if len(b) != a.rows:
        raise ValueError(f"dimension mismatch: {a.rows} rows vs rhs {len(b)}")
    aug = _augment(a, b)
    piv = _rref_words(aug, a.cols + 1, limit=a.cols)
    if _inconsistent(aug, len(piv), a.cols):
        return None
    x = _particular(aug, piv, a.cols)
    kern = _kernel_from_rref(_strip_last(aug, a.cols), piv, a.cols)
    return x, list(kern)


def solve_particular(a: BitMatrix, b: BitVector) -> tuple[Optional[BitVector], int]:
    """Like :func:`solve` but skips the kernel; returns ``(x or None, rank(A))``."""
    if len(b) != a.rows:
        raise ValueError(f"dimension mismatch: {a.rows} rows vs rhs {len(b)}")
    aug = _augment(a, b)
    piv = _rref_words(aug, a.cols + 1, limit=a.cols)
    if _inconsistent(aug, len(piv), a.cols):
        return None, len(piv)
    return _particular(aug, piv, a.cols), len(piv)


def in_column_span(a: BitMatrix, v: BitVector) -> bool:
    if len(v) != a.rows:
        raise ValueError(f"dimension mismatch: {a.rows} rows vs vector {len(v)}")
    x, _ = solve_particular(a, v)
    return x is not None


def _augment(a: BitMatrix, b: BitVector) -> np.ndarray:
    n = a.cols
    nw = nwords(n + 1)
    aug = np.zeros((a.rows, nw), dtype=_U64)
    aug[:, : a.words.shape[1]] = a.words
    bits = b.to_bits().astype(_U64)
    aug[:, n >> 6] |= bits << _U64(n & 63)
    return aug


def _inconsistent(aug: np.ndarray, rk: int, n: int) -> bool:
    col = (aug[rk:, n >> 6] >> _U64(n & 63)) & _U64(1)
    return bool(col.any())


def _particular(aug: np.ndarray, piv: list[int], n: int) -> BitVector:
    x = np.zeros(n, dtype=np.uint8)
    if piv:
        rhs = (aug[: len(piv), n >> 6] >> _U64(n & 63)) & _U64(1)
        x[np.asarray(piv)] = rhs.astype(np.uint8)
    return BitVector.from_bits(x)


def _strip_last(aug: np.ndarray, n: int) -> np.ndarray:
    out = aug[:, : nwords(n)].copy()
    if out.shape[1]:
        out[:, -1] &= _tail_mask(n)
    return out
