"""Arithmetic in GF(2^q) and in polynomial rings over it.

Field elements are q-bit integer masks in the polynomial basis 1, x, ..., x^(q-1)
of the chosen modulus. Polynomials over the field are coefficient tuples,
index i holding the coefficient of X^i.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from .bitlin import BitMatrix

Poly = tuple  # tuple[int, ...]


@dataclass(frozen=True)
class FieldCtx:
    q: int
    modulus: int

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("q must be >= 1")
        if self.modulus.bit_length() != self.q + 1:
            raise ValueError(f"modulus must have degree {self.q}")
        if self.q > 1 and not is_irreducible(GF2, [(self.modulus >> i) & 1 for i in range(self.q + 1)]):
            raise ValueError(f"modulus {self.modulus:#x} is reducible")

    @property
    def order(self) -> int:
        return 1 << self.q

    @classmethod
    def canonical(cls, q: int) -> "FieldCtx":
        """GF(2^q) under the lexicographically least irreducible modulus."""
        return _canonical_field(q)

    def to_json(self) -> dict:
        return {"q": self.q, "modulus_hex": format(self.modulus, "x")}

    @classmethod
    def from_json(cls, obj: dict) -> "FieldCtx":
        return cls(int(obj["q"]), int(obj["modulus_hex"], 16))


GF2 = FieldCtx(1, 0b10)


def field_add(ctx: FieldCtx, a: int, b: int) -> int:
    return a ^ b


def field_mul(ctx: FieldCtx, a: int, b: int) -> int:
    q, mod = ctx.q, ctx.modulus
    acc = 0
    while b:
        if b & 1:
            acc ^= a
        b >>= 1
        a <<= 1
        if a >> q:
            a ^= mod
    return acc


def field_pow(ctx: FieldCtx, a: int, e: int) -> int:
    result = 1
    while e:
        if e & 1:
            result = field_mul(ctx, result, a)
        a = field_mul(ctx, a, a)
        e >>= 1
    return result


def field_inv(ctx: FieldCtx, a: int) -> int:
    if a == 0:
        raise ZeroDivisionError("zero has no inverse")
    return field_pow(ctx, a, ctx.order - 2) if ctx.order > 2 else 1


# polynomials over GF(2^q)

def _trim(f: Sequence[int]) -> list[int]:
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return f


def degree(f: Sequence[int]) -> int:
    """Degree, with -1 for the zero polynomial."""
    return len(_trim(f)) - 1


def poly_add(f: Sequence[int], g: Sequence[int]) -> Poly:
    n = max(len(f), len(g))
    return tuple(
        (f[i] if i < len(f) else 0) ^ (g[i] if i < len(g) else 0) for i in range(n)
    )


def poly_mul(ctx: FieldCtx, f: Sequence[int], g: Sequence[int]) -> Poly:
    f, g = _trim(f), _trim(g)
    if not f or not g:
        return ()
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                if b:
                    out[i + j] ^= field_mul(ctx, a, b)
    return tuple(out)


def poly_divmod(ctx: FieldCtx, f: Sequence[int], g: Sequence[int]) -> tuple[Poly, Poly]:
    g = _trim(g)
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    r = _trim(f)
    dg = len(g) - 1
    lead_inv = field_inv(ctx, g[-1])
    quo = [0] * max(len(r) - dg, 0)
    while len(r) - 1 >= dg:
        c = field_mul(ctx, r[-1], lead_inv)
        shift = len(r) - 1 - dg
        quo[shift] = c
        for j, b in enumerate(g):
            if b:
                r[shift + j] ^= field_mul(ctx, c, b)
        r = _trim(r)
    return tuple(quo), tuple(r)


def poly_mod(ctx: FieldCtx, f: Sequence[int], g: Sequence[int]) -> Poly:
    return poly_divmod(ctx, f, g)[1]


def poly_gcd(ctx: FieldCtx, f: Sequence[int], g: Sequence[int]) -> Poly:
    """Monic gcd (the zero polynomial if both inputs vanish)."""
    a, b = _trim(f), _trim(g)
    while b:
        a, b = b, list(poly_mod(ctx, a, b))
    if not a:
        return ()
    inv = field_inv(ctx, a[-1])
    return tuple(field_mul(ctx, c, inv) for c in a)


def poly_square(ctx: FieldCtx, f: Sequence[int]) -> Poly:
    # characteristic 2: (sum c_i X^i)^2 = sum c_i^2 X^(2i)
    out = [0] * max(2 * len(f) - 1, 0)
    for i, c in enumerate(f):
        if c:
            out[2 * i] = field_mul(ctx, c, c)
    return tuple(out)


def poly_deriv(f: Sequence[int]) -> Poly:
    # odd-index coefficients survive in characteristic 2
    return tuple(f[i] if i % 2 == 1 else 0 for i in range(1, len(f)))


def poly_eval(ctx: FieldCtx, f: Sequence[int], y: int) -> int:
    acc = 0
    for c in reversed(f):
        acc = field_mul(ctx, acc, y) ^ c
    return acc


# the FqPoly / IrreducibleE surface

@dataclass(frozen=True)
class FqPoly:
    ctx: FieldCtx
    coeffs: Poly

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        top = self.ctx.order
        if any(not 0 <= c < top for c in self.coeffs):
            raise ValueError("coefficient outside the field")

    @property
    def degree(self) -> int:
        return degree(self.coeffs)

    def padded(self, n: int) -> "FqPoly":
        c = _trim(self.coeffs)
        if len(c) > n:
            raise ValueError(f"degree {len(c) - 1} does not fit in {n} coefficients")
        return FqPoly(self.ctx, tuple(c) + (0,) * (n - len(c)))

    def __add__(self, other: "FqPoly") -> "FqPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return FqPoly(self.ctx, poly_add(self.coeffs, other.coeffs)).padded(n)

    def __mul__(self, other: "FqPoly") -> "FqPoly":
        return FqPoly(self.ctx, poly_mul(self.ctx, self.coeffs, other.coeffs))

    def to_json(self) -> list[str]:
        return [format(c, "x") for c in self.coeffs]


class IrreducibleE(FqPoly):
    """A monic irreducible polynomial over the field (validated on construction)."""

    def __post_init__(self):
        super().__post_init__()
        c = _trim(self.coeffs)
        object.__setattr__(self, "coeffs", tuple(c))
        if len(c) < 2 or c[-1] != 1:
            raise ValueError("E must be monic of degree >= 1")
        if not is_irreducible(self.ctx, c):
            raise ValueError("E is reducible")


def _frobenius_x_power(ctx: FieldCtx, e: Sequence[int], times: int) -> list[Poly]:
    """[X^(Q^1) mod E, ..., X^(Q^times) mod E]."""
    out = []
    cur: Poly = poly_mod(ctx, (0, 1), e)
    for _ in range(times):
        for _ in range(ctx.q):
            cur = poly_mod(ctx, poly_square(ctx, cur), e)
        out.append(cur)
    return out


def is_irreducible(ctx: FieldCtx, e: Sequence[int]) -> bool:
    """gcd(E, X^(Q^i) - X) = 1 for all i <= deg/2, and E squarefree."""
    e = _trim(e)
    n = len(e) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    if len(poly_gcd(ctx, e, poly_deriv(e))) != 1:
        return False
    for xp in _frobenius_x_power(ctx, e, n // 2):
        if len(poly_gcd(ctx, e, poly_add(xp, (0, 1)))) != 1:
            return False
    return True


def find_irreducible(ctx: Optional[FieldCtx], deg: int) -> FqPoly:
    """Lexicographically least monic irreducible of the given degree.

    Candidates are compared coefficient by coefficient from X^(deg-1) down to
    X^0, i.e. in increasing order of sum c_i Q^i.
    """
    if deg < 1:
        raise ValueError("degree must be >= 1")
    ctx = GF2 if ctx is None else ctx
    Q = ctx.order
    for n in range(Q**deg):
        coeffs = []
        for _ in range(deg):
            n, c = divmod(n, Q)
            coeffs.append(c)
        cand = tuple(coeffs) + (1,)
        if deg > 1 and cand[0] == 0:
            continue
        if is_irreducible(ctx, cand):
            return IrreducibleE(ctx, cand)
    raise AssertionError("unreachable: irreducibles exist in every degree")


@lru_cache(maxsize=None)
def _canonical_field(q: int) -> FieldCtx:
    if q == 1:
        return GF2
    e = find_irreducible(GF2, q)
    return FieldCtx(q, sum(c << i for i, c in enumerate(e.coeffs)))


def mod_reduce(f: FqPoly, e: FqPoly) -> FqPoly:
    """f mod E, padded to deg(E) coefficients."""
    if e.degree < 1:
        raise ValueError("deg(E) must be >= 1")
    return FqPoly(f.ctx, poly_mod(f.ctx, f.coeffs, e.coeffs)).padded(e.degree)


def frobenius_iter(f: FqPoly, t: int, i: int, e: FqPoly) -> FqPoly:
    """f^(2^(t*i)) mod E, by t*i squarings each followed by a reduction.

    i = 0 returns f untouched.
    """
    cur = f.coeffs
    for _ in range(t * i):
        cur = poly_mod(f.ctx, poly_square(f.ctx, cur), e.coeffs)
    if t * i == 0:
        return f
    return FqPoly(f.ctx, cur).padded(max(e.degree, 1))


def evaluate(f: FqPoly, y: int) -> int:
    return poly_eval(f.ctx, f.coeffs, y)


# GF(2) coordinates

def vec(f: FqPoly, length: Optional[int] = None) -> int:
    """Concatenate coefficient masks, X^0 first, as an integer bitmask."""
    coeffs = f.coeffs if length is None else f.padded(length).coeffs
    q = f.ctx.q
    out = 0
    for i, c in enumerate(coeffs):
        out |= c << (i * q)
    return out


def unvec(ctx: FieldCtx, bits: int, length: int) -> FqPoly:
    mask = ctx.order - 1
    return FqPoly(ctx, tuple((bits >> (i * ctx.q)) & mask for i in range(length)))


def linear_map_matrix(fn: Callable[[int], int], in_dim: int, out_dim: int) -> BitMatrix:
    """Matrix of a GF(2)-linear map on bitmask coordinates; column j = fn(e_j)."""
    dense = np.zeros((out_dim, in_dim), dtype=np.uint8)
    for j in range(in_dim):
        img = fn(1 << j)
        if img >> out_dim:
            raise ValueError(f"image of e_{j} exceeds {out_dim} bits")
        for i in range(out_dim):
            dense[i, j] = (img >> i) & 1
    return BitMatrix.from_dense(dense)
