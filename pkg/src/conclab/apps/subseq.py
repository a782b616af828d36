"""Longest increasing subsequence of iid uniforms and longest common
subsequence of two random words."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..bounds import BoundValue
from ..verify import mc_sample, tail_from_samples
from . import AppReport


def lis_length(seq) -> int:
    return kernels.lis_length(seq)


def lis_length_dp(seq) -> int:
    """Quadratic table, nondecreasing subsequences."""
    x = list(seq)
    if not x:
        return 0
    L = [1] * len(x)
    for i in range(len(x)):
        for j in range(i):
            if x[j] <= x[i] and L[j] + 1 > L[i]:
                L[i] = L[j] + 1
    return max(L)


def lcs_length(a, b) -> int:
    return kernels.lcs_length(a, b)


def lcs_length_dp(a, b) -> int:
    a, b = list(a), list(b)
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            cur.append(prev[j] + 1 if x == y else max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


@dataclass(frozen=True)
class LisSampler:
    N: int
    name: str = "lis"

    def __call__(self, rng) -> float:
        return float(kernels.lis_length(rng.random(self.N)))


@dataclass(frozen=True)
class LcsSampler:
    N: int
    alphabet: int = 2
    name: str = "lcs"

    def __call__(self, rng) -> float:
        a = rng.integers(0, self.alphabet, self.N)
        b = rng.integers(0, self.alphabet, self.N)
        return float(kernels.lcs_length(a, b))


def _curve(eq: str, const: float, M: float, upper: bool):
    def curve(u: float) -> BoundValue:
        denom = const * (M + u) if upper else const * M
        val = 2 * math.exp(-u * u / denom) if denom > 0 else math.inf
        return BoundValue(eq, {"M": M, "u": u}, val)

    return curve


def _experiment(app, sampler, eqs, const, samples, seed, u_grid, workers, params):
    values = mc_sample(sampler, samples, seed, workers)
    rep = AppReport(app, params, seed)
    up = tail_from_samples(values, u_grid, seed, sampler.name, side="upper")
    lo = tail_from_samples(values, u_grid, seed, sampler.name, side="lower")
    M = up.median
    rep.add_tail(eqs[0], up, _curve(eqs[0], const, M, True))
    rep.add_tail(eqs[1], lo, _curve(eqs[1], const, M, False))
    rep.aux = {"median": M, "median_ci": list(up.median_ci), "mean": up.mean, "sd": float(np.std(values))}
    return rep


def lis_experiment(N: int = 1000, samples: int = 100_000, seed: int = 0,
                   u_grid=(10, 15, 20, 25, 30, 40, 50), workers: int | None = None) -> AppReport:
    """Upper tail against 2 exp(-u^2 / 4(M+u)), lower against 2 exp(-u^2 / 4M)."""
    return _experiment("lis", LisSampler(N), ("7.1.3", "7.1.4"), 4.0, samples, seed, u_grid, workers,
                       {"N": N, "samples": samples, "u_grid": list(u_grid)})


def lcs_experiment(N: int = 500, alphabet: int = 2, samples: int = 10_000, seed: int = 0,
                   u_grid=(50, 100, 150, 200), workers: int | None = None) -> AppReport:
    """The same shapes with constant 32."""
    return _experiment("lcs", LcsSampler(N, alphabet), ("7.2.1", "7.2.2"), 32.0, samples, seed, u_grid,
                       workers, {"N": N, "alphabet": alphabet, "samples": samples, "u_grid": list(u_grid)})
