"""Coset graphs, their GUV (Parvaresh-Vardy) instantiation, and the family planner."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional

import numpy as np

from .bitlin import BitMatrix, BitVector, _pack, rref
from .field import (
    FieldCtx,
    FqPoly,
    IrreducibleE,
    evaluate,
    find_irreducible,
    frobenius_iter,
    linear_map_matrix,
    unvec,
    vec,
)
from .rm import monomials_to_message


@dataclass(frozen=True, eq=False)
class CosetGraph:
    """Left vertex v in F_2^m meets right vertex (i, u) iff maps[i]·v = u."""

    m: int
    k: int
    d: int
    maps: tuple

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))
        if len(self.maps) != self.k:
            raise ValueError(f"expected {self.k} maps, got {len(self.maps)}")
        for a in self.maps:
            if a.shape != (self.d, self.m):
                raise ValueError(f"map has shape {a.shape}, expected {(self.d, self.m)}")

    @property
    def M(self) -> int:
        return 1 << self.m

    @property
    def N(self) -> int:
        return self.k << self.d

    def __eq__(self, other):
        if not isinstance(other, CosetGraph):
            return NotImplemented
        return (self.m, self.k, self.d, self.maps) == (other.m, other.k, other.d, other.maps)

    def __hash__(self):
        return hash((self.m, self.k, self.d, self.maps))

    def __getstate__(self):
        return {"m": self.m, "k": self.k, "d": self.d, "maps": self.maps}

    def __setstate__(self, state):
        for key, val in state.items():
            object.__setattr__(self, key, val)

    @cached_property
    def images(self) -> np.ndarray:
        """images[i, v] = integer value of maps[i]·v, for every point v."""
        out = np.zeros((self.k, self.M), dtype=np.int64)
        for i, a in enumerate(self.maps):
            dense = a.to_dense()
            cols = [sum(int(dense[r, j]) << r for r in range(self.d)) for j in range(self.m)]
            img = np.zeros(1, dtype=np.int64)
            for j in range(self.m):
                img = np.concatenate([img, img ^ cols[j]])
            out[i] = img
        return out

    @cached_property
    def adjacency(self) -> BitMatrix:
        return adjacency_matrix(self)

    def neighbors(self, v: int) -> list[int]:
        return [(i << self.d) + int(self.images[i, v]) for i in range(self.k)]

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "k": self.k,
            "d": self.d,
            "maps": [[r.to_hex() for r in a] for a in self.maps],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CosetGraph":
        m, k, d = int(obj["m"]), int(obj["k"]), int(obj["d"])
        maps = [
            BitMatrix.from_rows([BitVector.from_hex(h, m) for h in rows], cols=m)
            for rows in obj["maps"]
        ]
        return cls(m, k, d, tuple(maps))


def adjacency_matrix(g: CosetGraph) -> BitMatrix:
    """M x N adjacency; column (i, u) sits at index i·2^d + u."""
    if "adjacency" in g.__dict__:
        return g.__dict__["adjacency"]
    dense = np.zeros((g.M, g.N), dtype=np.uint8)
    rows = np.arange(g.M)
    for i in range(g.k):
        dense[rows, (i << g.d) + g.images[i]] = 1
    return BitMatrix(g.M, g.N, _pack(dense, g.N))


def column_as_rm_codeword(g: CosetGraph, i: int, u: int) -> tuple[BitVector, BitVector]:
    """Column (i, u) and a message in RM(m, d) whose encoding equals it.

    The message is the indicator polynomial prod_j (l_j(X) + u_j + 1) over an
    independent set of constraints describing {v : A_i·v = u}.
    """
    if not (0 <= i < g.k and 0 <= u < (1 << g.d)):
        raise IndexError("right vertex out of range")
    col = BitVector.from_bits((g.images[i] == u).astype(np.uint8))
    a = g.maps[i]
    rhs = [(u >> r) & 1 for r in range(g.d)]
    aug = BitMatrix.from_dense(
        np.concatenate([a.to_dense(), np.asarray(rhs, dtype=np.uint8)[:, None]], axis=1)
    )
    red, piv = rref(aug)
    if g.m in piv:
        # u is outside the image: the column is empty
        return col, monomials_to_message(g.m, g.d, [])
    poly = {0}
    for row in red:
        bits = row.to_int()
        const = (bits >> g.m) & 1
        factor = {1 << j for j in range(g.m) if (bits >> j) & 1}
        if const ^ 1:
            factor ^= {0}
        nxt: set[int] = set()
        for p in poly:
            for f in factor:
                nxt ^= {p | f}
        poly = nxt
    return col, monomials_to_message(g.m, g.d, poly)


# GUV graphs

@dataclass(frozen=True)
class GuvParams:
    q: int
    pv_deg: int
    pv_len: int
    t: int
    E: IrreducibleE
    ctx: FieldCtx = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.ctx is None:
            object.__setattr__(self, "ctx", self.E.ctx)
        if self.q < 1 or self.t < 1:
            raise ValueError("q and t must be >= 1")
        if self.ctx.q != self.q:
            raise ValueError("E lives over a different field")
        if self.E.degree != self.pv_deg + 1:
            raise ValueError(f"deg(E) must be pvDeg+1 = {self.pv_deg + 1}")
        if self.pv_len < 1:
            raise ValueError("pvLen must be >= 1")

    @classmethod
    def canonical(cls, q: int, pv_deg: int, pv_len: int, t: int) -> "GuvParams":
        ctx = FieldCtx.canonical(q)
        return cls(q, pv_deg, pv_len, t, find_irreducible(ctx, pv_deg + 1))

    @property
    def Q(self) -> int:
        return 1 << self.q

    @property
    def h(self) -> int:
        return 1 << self.t

    @property
    def m(self) -> int:
        return (self.pv_deg + 1) * self.q

    @property
    def k(self) -> int:
        return self.Q

    @property
    def d(self) -> int:
        return self.pv_len * self.q

    def predicted_expansion(self) -> tuple[int, Fraction]:
        """(T, alpha) = (h^pvLen, 1 - pvDeg·pvLen·h/Q) from the GUV analysis."""
        return self.h**self.pv_len, 1 - Fraction(self.pv_deg * self.pv_len * self.h, self.Q)

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "pvDeg": self.pv_deg,
            "pvLen": self.pv_len,
            "t": self.t,
            "modulus_hex": format(self.ctx.modulus, "x"),
            "E_coeffs": self.E.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GuvParams":
        q = int(obj["q"])
        ctx = (
            FieldCtx(q, int(obj["modulus_hex"], 16)) if "modulus_hex" in obj else FieldCtx.canonical(q)
        )
        pv_deg, pv_len, t = int(obj["pvDeg"]), int(obj["pvLen"]), int(obj["t"])
        if "E_coeffs" in obj:
            e = IrreducibleE(ctx, tuple(int(c, 16) for c in obj["E_coeffs"]))
        else:
            e = find_irreducible(ctx, pv_deg + 1)
        return cls(q, pv_deg, pv_len, t, e, ctx)


def pv_neighbor(params: GuvParams, f: FqPoly, y: int) -> tuple[int, ...]:
    """(y, f_0(y), ..., f_{pvLen-1}(y)) with f_i = f^(h^i) mod E."""
    if f.degree > params.pv_deg:
        raise ValueError(f"deg(f) = {f.degree} exceeds pvDeg = {params.pv_deg}")
    out = [y]
    for i in range(params.pv_len):
        out.append(evaluate(frobenius_iter(f, params.t, i, params.E), y))
    return tuple(out)


def _z_bits(params: GuvParams, z: tuple[int, ...]) -> int:
    return sum(c << (i * params.q) for i, c in enumerate(z))


def guv_map(params: GuvParams, y: int) -> BitMatrix:
    """Matrix of f -> (f_0(y), ..., f_{pvLen-1}(y)) on vec coordinates."""
    n = params.pv_deg + 1

    def apply(bits: int) -> int:
        f = unvec(params.ctx, bits, n)
        return _z_bits(params, pv_neighbor(params, f, y)[1:])

    return linear_map_matrix(apply, params.m, params.d)


def guv_to_coset(params: GuvParams) -> CosetGraph:
    maps = tuple(guv_map(params, y) for y in range(params.Q))
    return CosetGraph(params.m, params.k, params.d, maps)


def guv_edge(params: GuvParams, v: int, y: int) -> int:
    """Column index of the y-neighbour of left vertex v, computed directly."""
    f = unvec(params.ctx, v, params.pv_deg + 1)
    z = pv_neighbor(params, f, y)[1:]
    return (y << params.d) + _z_bits(params, z)


# family planner

@dataclass
class FamilyPlan:
    alpha: float
    regime: str
    D: int
    C: float
    gamma: Optional[float]
    beta: Optional[float]
    q: int
    Q: int
    m: int
    log_variables: int
    t: Optional[int]
    h: Optional[int]
    pv_deg: int
    pv_len: int
    d: int
    feasible: bool
    issues: list
    T: Optional[int] = None
    alpha_pred: Optional[Fraction] = None
    vacuous: Optional[bool] = None
    params: Optional[GuvParams] = None

    def to_json(self) -> dict:
        out = {
            "alpha": self.alpha,
            "regime": self.regime,
            "D": self.D,
            "C": self.C,
            "gamma": self.gamma,
            "beta": self.beta,
            "q": self.q,
            "Q": self.Q,
            "m": self.m,
            "logVariables": self.log_variables,
            "t": self.t,
            "h": self.h,
            "pvDeg": self.pv_deg,
            "pvLen": self.pv_len,
            "d": self.d,
            "d_over_m": self.d / self.m,
            "d_over_sqrt_m": self.d / math.sqrt(self.m),
            "feasible": self.feasible,
            "issues": list(self.issues),
        }
        if self.T is not None:
            out["predicted_T"] = self.T
            out["predicted_alpha"] = str(self.alpha_pred)
            out["predicted_alpha_float"] = float(self.alpha_pred)
            out["bound_vacuous"] = self.vacuous
        if self.params is not None:
            out["guv"] = self.params.to_json()
        return out


def _ceil(x: float) -> int:
    # keep float noise from bumping an integral value
    return math.ceil(x - 1e-12)


def _floor(x: float) -> int:
    return math.floor(x + 1e-12)


def plan_family(
    alpha: float,
    regime: str,
    D: int,
    C: float = 2.1,
    gamma: Optional[float] = None,
    beta: Optional[float] = None,
    find_e: bool = True,
) -> FamilyPlan:
    """Evaluate the explicit family's parameter formulas at index D.

    regime "gamma-linear": logVariables = floor(gamma·D).
    regime "beta-sqrt":    logVariables = floor(beta·sqrt(D / lg D)).
    Infeasibility is reported in ``issues``, never clamped away.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if C <= 2:
        raise ValueError("C must exceed 2")
    if D < 2:
        raise ValueError("D must be >= 2")
    lg_d = math.log2(D)
    if regime == "gamma-linear":
        if gamma is None or not 0 < gamma < 1:
            raise ValueError("gamma-linear regime needs gamma in (0, 1)")
        n = _floor(gamma * D)
    elif regime == "beta-sqrt":
        if beta is None or beta <= 0:
            raise ValueError("beta-sqrt regime needs beta > 0")
        n = _floor(beta * math.sqrt(D / lg_d))
    else:
        raise ValueError(f"unknown regime {regime!r}")
    q = _ceil(C / alpha * lg_d)
    issues = []
    t = h = None
    if n < 1:
        issues.append(f"logVariables = {n} < 1")
    else:
        t = _ceil((n + 1) * (1 - alpha) / n * q)
        h = 1 << t
        if t >= q:
            issues.append(f"t = {t} >= q = {q}: h >= Q")
        if t < 1:
            issues.append(f"t = {t} < 1")
    plan = FamilyPlan(
        alpha=alpha, regime=regime, D=D, C=C, gamma=gamma, beta=beta,
        q=q, Q=1 << q, m=q * D, log_variables=n, t=t, h=h,
        pv_deg=D - 1, pv_len=n + 1, d=(n + 1) * q,
        feasible=not issues, issues=issues,
    )
    if h is not None:
        plan.T = h ** plan.pv_len
        plan.alpha_pred = 1 - Fraction(plan.pv_deg * plan.pv_len * h, plan.Q)
        plan.vacuous = plan.alpha_pred <= 0
    if plan.feasible and find_e:
        ctx = FieldCtx.canonical(q)
        plan.params = GuvParams(q, D - 1, n + 1, t, find_irreducible(ctx, D), ctx)
    return plan
