"""Distinguishers for noisy k-XOR: decode-and-check, even-cover parity, exact-weight."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .bitlin import BitVector, solve_particular
from .coset import CosetGraph
from .decode import decode_bsc
from .params import epsilon_md
from .rng import SplitMix64


@dataclass
class Decision:
    verdict: int  # 1 planted, 0 null
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"verdict": self.verdict}
        out.update(self.diagnostics)
        return out


def residual_threshold(eta: float, M: int, delta_slack: float) -> int:
    """ceil((1 + delta)·eta·M)."""
    return math.ceil((1 + delta_slack) * eta * M - 1e-9)


def distinguish_D(g: CosetGraph, y: BitVector, eta: float, delta_slack: float = 0.1) -> Decision:
    """Decode y in RM(m, d), then accept iff the residual is small and the
    decoded word lies in the column span of the adjacency matrix."""
    if not 0 <= eta <= 0.5:
        raise ValueError("eta must lie in [0, 1/2]")
    if (g.m + g.d) % 2:
        raise ValueError(f"m + d must be even (m={g.m}, d={g.d})")
    t = residual_threshold(eta, g.M, delta_slack)
    out = decode_bsc(g.m, g.d, y)
    diag = {
        "decode_status": out.status,
        "located_size": out.located.weight(),
        "residual": out.residual,
        "threshold": t,
        "in_span": None,
    }
    if not out.ok or out.residual > t:
        return Decision(0, diag)
    x_hat, _ = solve_particular(g.adjacency, out.codeword)
    diag["in_span"] = x_hat is not None
    if x_hat is None:
        return Decision(0, diag)
    diag["codeword_hex"] = out.codeword.to_hex()
    diag["x_hat_hex"] = x_hat.to_hex()
    return Decision(1, diag)


def cover_bias(eta: float, weight: int) -> float:
    """Pr[<z, e> = 0] - 1/2 for a cover of the given weight."""
    return 0.5 * (1 - 2 * eta) ** weight


def even_cover_test(covers: Sequence[BitVector], y: BitVector, eta: float) -> Decision:
    """Fraction of covers with even parity against the midpoint threshold."""
    if not covers:
        raise ValueError("need at least one cover")
    S = len(covers)
    zeros = sum(1 - z.dot(y) for z in covers)
    stat = zeros / S
    bias = sum(cover_bias(eta, z.weight()) for z in covers) / S
    threshold = 0.5 + bias / 2
    # half the mean gap against the null standard deviation sqrt(1/(4S))
    z_score = (bias / 2) / math.sqrt(0.25 / S)
    return Decision(
        int(stat > threshold),
        {
            "statistic": stat,
            "threshold": threshold,
            "covers": S,
            "mean_bias": bias,
            "separation_sigmas": z_score,
            "sufficient_power": z_score >= 3.0,
        },
    )


def default_eta_extra(m: int, d: int, eta: float) -> float:
    """Extra flip rate putting the combined rate halfway from eta to 0.75·epsilon_{m,d}."""
    target = 0.75 * float(epsilon_md(m, d))
    if eta >= target:
        return 0.0
    return 0.5 * (target - eta) / (1 - 2 * eta)


def alekhnovich_test(
    g: CosetGraph,
    y: BitVector,
    eta: float,
    eta_extra: Optional[float] = None,
    rng: Optional[SplitMix64] = None,
    t: Optional[int] = None,
) -> Decision:
    """Decide whether y carries exactly t = floor(eta·M) or t+1 errors.

    y is re-noised at rate eta_extra, decoded, and the distance from y to the
    recovered codeword is compared with t and t+1. verdict 1 means weight t,
    0 means weight t+1, -1 is an abstention.
    """
    if (g.m + g.d) % 2:
        raise ValueError(f"m + d must be even (m={g.m}, d={g.d})")
    if t is None:
        t = math.floor(eta * g.M + 1e-9)
    if eta_extra is None:
        eta_extra = default_eta_extra(g.m, g.d, eta)
    if eta_extra > 0 and rng is None:
        raise ValueError("a generator is required when eta_extra > 0")
    y2 = y ^ rng.bernoulli_bits(g.M, eta_extra) if eta_extra > 0 else y
    out = decode_bsc(g.m, g.d, y2)
    diag = {"t": t, "eta_extra": eta_extra, "decode_status": out.status, "distance": None}
    if not out.ok:
        return Decision(-1, diag)
    x_hat, _ = solve_particular(g.adjacency, out.codeword)
    if x_hat is None:
        diag["decode_status"] = "not_in_span"
        return Decision(-1, diag)
    dist = (y ^ out.codeword).weight()
    diag["distance"] = dist
    diag["x_hat_hex"] = x_hat.to_hex()
    diag["codeword_hex"] = out.codeword.to_hex()
    if dist == t:
        return Decision(1, diag)
    if dist == t + 1:
        return Decision(0, diag)
    return Decision(-1, diag)


def combined_rate(eta: float, eta_extra: float) -> float:
    """Flip rate of an eta-noisy bit after an independent eta_extra re-flip."""
    return eta + eta_extra - 2 * eta * eta_extra


def reflip_tv_proxy(M: int, t: int, eta_extra: float, samples: int, rng: SplitMix64) -> dict:
    """Total variation between the weight law of e + e' and Binomial(M, t/M ⊕ eta_extra).

    e has weight exactly t and e' is i.i.d. Bernoulli(eta_extra). Both laws are
    permutation invariant, so their distance equals the distance between the
    weight laws. The empirical histogram adds sampling noise of order
    sqrt(support / samples).
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    p = combined_rate(t / M, eta_extra)
    counts: dict = {}
    for j in range(samples):
        r = rng.spawn(j)
        e = BitVector.from_indices(M, r.sample_positions(M, t))
        w = (e ^ r.bernoulli_bits(M, eta_extra)).weight()
        counts[w] = counts.get(w, 0) + 1

    def log_pmf(w: int) -> float:
        if p in (0.0, 1.0):
            return 0.0 if w == round(p * M) else -math.inf
        return (math.lgamma(M + 1) - math.lgamma(w + 1) - math.lgamma(M - w + 1)
                + w * math.log(p) + (M - w) * math.log1p(-p))

    tv = 0.0
    mass = 0.0
    for w in range(M + 1):
        ref = math.exp(log_pmf(w))
        mass += ref
        tv += abs(counts.get(w, 0) / samples - ref)
    return {"M": M, "t": t, "eta_extra": eta_extra, "combined_rate": p,
            "samples": samples, "tv_weight_empirical": tv / 2, "pmf_mass": mass}
