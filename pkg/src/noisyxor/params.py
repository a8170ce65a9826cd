"""Entropy, Hamming volumes, capacity budgets and the regime checks built on them.

Threshold decisions compare exact rationals; floats appear only for entropy
terms and for display.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Optional, Sequence, TextIO, Union

from .rm import RmCode, erasure_correctable, rate
from .rng import SplitMix64

BERRY_ESSEEN_K = 0.4748
# third absolute moment of a centred, variance-one +-1 coin
RADEMACHER_THIRD_MOMENT = 1.0


def as_fraction(x) -> Fraction:
    """Exact rational of a user-facing number; floats go through their decimal repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def h2(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def volume(n: int, t: int) -> int:
    """Number of points in a Hamming ball of radius t in dimension n."""
    if not 0 <= t <= n:
        raise ValueError("need 0 <= t <= n")
    return sum(comb(n, i) for i in range(t + 1))


def log2_int(x: int) -> float:
    """log2 of a possibly huge positive integer, without float overflow."""
    shift = max(x.bit_length() - 60, 0)
    return math.log2(x >> shift) + shift


def log2_volume(n: int, t: int) -> float:
    return log2_int(volume(n, t))


def epsilon_md(m: int, d: int) -> Fraction:
    """1 - rate(RM(m, (m+d)/2))."""
    if (m + d) % 2:
        raise ValueError(f"m + d must be even (m={m}, d={d})")
    return 1 - rate(m, (m + d) // 2)


def normal_cdf(a: float) -> float:
    if a == math.inf:
        return 1.0
    if a == -math.inf:
        return 0.0
    return 0.5 * (1.0 + math.erf(a / math.sqrt(2.0)))


def berry_esseen_bound(n: int, a: float, third_moment: float = RADEMACHER_THIRD_MOMENT,
                       K: float = BERRY_ESSEEN_K) -> float:
    """Upper bound Phi(a) + K·rho/sqrt(n) on Pr[S_n < a]."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return normal_cdf(a) + K * third_moment / math.sqrt(n)


@dataclass
class Check:
    name: str
    passed: bool
    lhs: float
    rhs: float

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "lhs": self.lhs,
                "rhs": self.rhs, "margin": self.margin}


def check_constant_rate_conditions(c: float, eta: float = 1 / 3) -> list[Check]:
    """Phi(c/2) < 0.6 and c^2 < -ln(eta)/2 for the sqrt(m) regime constant c."""
    if c <= 0:
        raise ValueError("c must be positive")
    phi = normal_cdf(c / 2)
    bound = -math.log(eta) / 2
    return [
        Check("normal_cdf(c/2) < 0.6", phi < 0.6, phi, 0.6),
        Check("c^2 < -ln(eta)/2", c * c < bound, c * c, bound),
    ]


def sqrt_regime_rate_bound(m: int, c: float, K: float = BERRY_ESSEEN_K) -> dict:
    """Rate of RM(m, floor((m + c·sqrt m)/2)) next to its normal-approximation bound.

    Standardizing Bin(m, 1/2) by its mean m/2 and deviation sqrt(m)/2 puts the
    cut r at S <= c, so the bound is Phi(c) + K/sqrt(m). The c/2 point used by
    the constant-rate check is reported alongside for comparison.
    """
    d = c * math.sqrt(m)
    r = math.floor((m + d) / 2)
    exact = rate(m, r)
    return {
        "m": m,
        "d": d,
        "r": r,
        "rate_exact": str(exact),
        "rate": float(exact),
        "normal_cdf_at_c": normal_cdf(c),
        "normal_cdf_at_half_c": normal_cdf(c / 2),
        "berry_esseen_upper": berry_esseen_bound(m, c, RADEMACHER_THIRD_MOMENT, K),
    }


def theorem51_feasible(m: int, d: int, eta: float, margin: float = 0.0,
                       log2_slack: float = 0.0) -> list[Check]:
    """eta < epsilon_{m,d} - margin (exact) and log2(eta·2^m) <= m·H2((1-p)/2) + slack."""
    eps = epsilon_md(m, d)
    eta_q = as_fraction(eta)
    rhs = eps - as_fraction(margin)
    p = d / m
    lhs2 = math.log2(eta) + m if eta > 0 else -math.inf
    rhs2 = m * h2((1 - p) / 2) + log2_slack
    return [
        Check("eta < epsilon_md - margin", eta_q < rhs, float(eta_q), float(rhs)),
        Check("log2(eta*M) <= m*H2((1-p)/2)", lhs2 <= rhs2, lhs2, rhs2),
    ]


def null_soundness(M: int, N: int, eta: float, delta_slack: float,
                   rank: Optional[int] = None) -> dict:
    """Union-bound exponent N + M·H2(t/M) - M for the decode-and-check test.

    |C_H| <= 2^N and Vol(M, t) <= 2^(M·H2(t/M)) for t <= M/2; a very negative
    exponent means a uniform y is accepted with negligible probability.
    """
    t = math.ceil((1 + delta_slack) * eta * M - 1e-9)
    vol = volume(M, t)
    lg_vol = log2_int(vol)
    entropy_bound = M * h2(t / M)
    exponent = N + entropy_bound - M
    out = {
        "M": M,
        "N": N,
        "t": t,
        "lg_code_size_bound": N,
        "volume_exact": str(vol),
        "lg_volume": lg_vol,
        "lg_volume_entropy_bound": entropy_bound,
        "lg_volume_within_entropy_bound": lg_vol <= entropy_bound,
        "exponent": exponent,
    }
    if rank is not None:
        out["lg_code_size_exact"] = rank
        out["lg_code_size_within_bound"] = rank <= N
    return out


def regime_report(m: int, d: int, eta: float, margin: float = 0.0) -> dict:
    eps = epsilon_md(m, d)
    checks = theorem51_feasible(m, d, eta, margin)
    return {
        "m": m,
        "d": d,
        "p": d / m,
        "epsilon_md": str(eps),
        "epsilon_md_float": float(eps),
        "unique_radius": str(Fraction(1, 2 ** (d + 1))),
        "eta": eta,
        "H2_half_gap": h2((1 - d / m) / 2),
        "checks": [c.to_json() for c in checks],
        "feasible": all(c.passed for c in checks),
    }


# the polynomial-regime beta chooser

def lam(beta: float) -> float:
    """1 - H2((1-beta)/2), written with log1p so small beta keeps precision."""
    if beta == 0:
        return 0.0
    return ((1 + beta) * math.log1p(beta) + (1 - beta) * math.log1p(-beta)) / (2 * math.log(2))


def beta_condition(beta: float, xi: float, zeta: float, c: float) -> bool:
    return lam(beta) < min(xi, c * beta / (4 * zeta))


def choose_beta(xi: float, zeta: float, c: float, lo: float = 1e-6, iters: int = 200) -> dict:
    """Largest beta in (0, 1) with lam(beta) < min(xi, c·beta/(4·zeta)), by bisection.

    Both constraints hold on an initial interval (lam is increasing and
    lam(beta)/beta is increasing), so bisection on the predicate is sound.
    """
    if xi <= 0 or zeta < 1 or c <= 0:
        raise ValueError("need xi > 0, zeta >= 1, c > 0")
    if not beta_condition(lo, xi, zeta, c):
        best = lo
        ok = False
    else:
        a, b = lo, 1.0 - 1e-12
        if beta_condition(b, xi, zeta, c):
            a = b
        for _ in range(iters):
            mid = (a + b) / 2
            if beta_condition(mid, xi, zeta, c):
                a = mid
            else:
                b = mid
        best, ok = a, True
    return {
        "beta": best,
        "satisfied": ok,
        "lambda": lam(best),
        "lambda_taylor": best * best / (2 * math.log(2)),
        "bound": min(xi, c * best / (4 * zeta)),
        "gamma0": c * best / 2,
    }


# erasure capacity probe

@dataclass
class ProbePoint:
    eta: float
    successes: int
    trials: int

    @property
    def rate(self) -> float:
        return self.successes / self.trials

    def to_json(self) -> dict:
        return {"eta": self.eta, "successes": self.successes, "trials": self.trials,
                "success_rate": self.rate,
                "success_rate_exact": str(Fraction(self.successes, self.trials))}


def capacity_probe(m: int, r: int, etas: Sequence[float], trials: int,
                   rng: Union[SplitMix64, int]) -> dict:
    """Fraction of Bernoulli(eta) erasure patterns that RM(m, r) can fill in.

    Pattern j of grid point i comes from the stream (i, j) of `rng`, so the
    curve does not depend on evaluation order.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    code = RmCode(m, r)
    base = rng if isinstance(rng, SplitMix64) else SplitMix64(rng)
    points = []
    for gi, eta in enumerate(etas):
        wins = 0
        for trial in range(trials):
            pattern = base.spawn(gi, trial).bernoulli_bits(code.length, eta)
            wins += erasure_correctable(code, pattern)
        points.append(ProbePoint(eta, wins, trials))
    eps = 1 - rate(m, r)
    return {
        "code": code.to_json(),
        "epsilon": str(eps),
        "epsilon_float": float(eps),
        "points": points,
    }


def probe_to_json(probe: dict) -> dict:
    out = dict(probe)
    out["points"] = [p.to_json() for p in probe["points"]]
    return out


def write_probe_csv(points: Sequence[ProbePoint], fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["eta", "successes", "trials", "rate"])
    for p in points:
        w.writerow([repr(p.eta), p.successes, p.trials, repr(p.rate)])


def curve_monotone(points: Sequence[ProbePoint], sigmas: float = 3.0) -> bool:
    """Non-increasing in eta up to `sigmas` binomial standard errors."""
    for a, b in zip(points, points[1:]):
        sd = math.sqrt(max(a.rate * (1 - a.rate) / a.trials + b.rate * (1 - b.rate) / b.trials,
                           1.0 / (a.trials + b.trials) ** 2))
        if b.rate - a.rate > sigmas * sd:
            return False
    return True
