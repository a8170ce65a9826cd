"""Samplers for the null, planted and exact-weight input distributions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .bitlin import BitMatrix, BitVector
from .coset import CosetGraph
from .rng import SplitMix64


@dataclass(frozen=True)
class Instance:
    y: BitVector
    kind: str  # "null" | "planted" | "alek"
    seed: int
    x: Optional[BitVector] = None
    e: Optional[BitVector] = None
    params: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        truth: dict = {"kind": self.kind}
        if self.x is not None:
            truth["x_hex"] = self.x.to_hex()
            truth["e_hex"] = self.e.to_hex()
            truth["e_weight"] = self.e.weight()
        return {
            "y_hex": self.y.to_hex(),
            "M": len(self.y),
            "truth": truth,
            "seed": self.seed,
            "params": dict(self.params),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Instance":
        M = int(obj["M"])
        truth = obj["truth"]
        x = e = None
        if "x_hex" in truth:
            e = BitVector.from_hex(truth["e_hex"], M)
            N = int(obj["params"]["N"])
            x = BitVector.from_hex(truth["x_hex"], N)
        return cls(BitVector.from_hex(obj["y_hex"], M), truth["kind"], int(obj["seed"]), x, e,
                   dict(obj.get("params", {})))


def _adj(g) -> BitMatrix:
    return g.adjacency if isinstance(g, CosetGraph) else g


def sample_null(M: int, rng: SplitMix64) -> Instance:
    return Instance(rng.random_bits(M), "null", rng.seed, params={"M": M})


def sample_planted(g, eta: float, rng: SplitMix64) -> Instance:
    """y = A_H·x + e with x uniform and e i.i.d. Bernoulli(eta)."""
    if not 0.0 <= eta <= 0.5:
        raise ValueError("eta must lie in [0, 1/2]")
    a = _adj(g)
    x = rng.random_bits(a.cols)
    e = rng.bernoulli_bits(a.rows, eta)
    return Instance(a.matvec(x) ^ e, "planted", rng.seed, x, e,
                    {"M": a.rows, "N": a.cols, "eta": eta})


def sample_alekhnovich(g, t: int, rng: SplitMix64) -> Instance:
    """y = A_H·x + e with e uniform among vectors of weight exactly t."""
    a = _adj(g)
    if not 0 <= t <= a.rows:
        raise ValueError(f"t = {t} outside [0, {a.rows}]")
    x = rng.random_bits(a.cols)
    e = BitVector.from_indices(a.rows, rng.sample_positions(a.rows, t))
    return Instance(a.matvec(x) ^ e, "alek", rng.seed, x, e,
                    {"M": a.rows, "N": a.cols, "t": t})
