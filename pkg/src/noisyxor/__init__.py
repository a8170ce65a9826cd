"""Noisy k-XOR on coset graphs, solved by Reed-Muller decoding from random errors."""

__version__ = "0.1.0"

from .bitlin import BitMatrix, BitVector, kernel_basis, rank, rref, solve
from .coset import CosetGraph, GuvParams, guv_to_coset, plan_family
from .decode import decode_bsc
from .distinguish import alekhnovich_test, distinguish_D, even_cover_test
from .field import FieldCtx, FqPoly, IrreducibleE
from .rm import RmCode
from .rng import SplitMix64

__all__ = [
    "BitMatrix", "BitVector", "CosetGraph", "FieldCtx", "FqPoly", "GuvParams", "IrreducibleE",
    "RmCode", "SplitMix64", "alekhnovich_test", "decode_bsc", "distinguish_D", "even_cover_test",
    "guv_to_coset", "kernel_basis", "plan_family", "rank", "rref", "solve",
]
