"""Sherrington-Kirkpatrick partition function by exact enumeration."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..bounds import BoundValue
from ..verify import mc_sample, tail_from_samples
from . import AppReport

N_CAP = 24

# name: (sampler, E exp(h) = E exp(-h))
DISORDERS = {
    "normal": (lambda rng, size: rng.standard_normal(size), math.exp(0.5)),
    "rademacher": (lambda rng, size: rng.choice(np.array([-1.0, 1.0]), size), math.cosh(1.0)),
    "uniform": (lambda rng, size: rng.uniform(-math.sqrt(3), math.sqrt(3), size),
                math.sinh(math.sqrt(3)) / math.sqrt(3)),
}


@dataclass(frozen=True)
class SpinGlassConfig:
    N: int
    beta: float
    disorder: str = "normal"

    def __post_init__(self):
        if not 2 <= self.N <= N_CAP:
            raise ValueError(f"N must lie in [2, {N_CAP}]")
        if not 0 <= self.beta <= 1:
            raise ValueError("beta must lie in [0, 1]")
        if self.disorder not in DISORDERS:
            raise ValueError(f"unknown disorder {self.disorder!r}; builtins are {sorted(DISORDERS)}")
        assert DISORDERS[self.disorder][1] <= 2

    def draw(self, rng) -> np.ndarray:
        """Upper triangle h_ij, i < j, as a symmetric matrix with zero diagonal."""
        iu = np.triu_indices(self.N, 1)
        h = np.zeros((self.N, self.N))
        h[iu] = DISORDERS[self.disorder][0](rng, iu[0].size)
        return h + h.T


def _spins(k: int) -> np.ndarray:
    """All sign vectors of length k, rows in binary order."""
    idx = np.arange(1 << k)[:, None]
    return 1.0 - 2.0 * ((idx >> np.arange(k)[None, :]) & 1)


@lru_cache(maxsize=8)
def _halves(N: int):
    a = N // 2
    SA = np.hstack([np.ones((1 << (a - 1), 1)), _spins(a - 1)])
    SB = _spins(N - a)
    # pair products eps_i eps_j, i < j, within each half
    iA, iB = np.triu_indices(a, 1), np.triu_indices(N - a, 1)
    PA = SA[:, iA[0]] * SA[:, iA[1]]
    PB = SB[:, iB[0]] * SB[:, iB[1]]
    return a, SA, SB, iA, iB, PA, PB


def spin_glass_logZ(config: SpinGlassConfig, h) -> float:
    """log of 2^-N sum_eps exp(beta/sqrt(N) sum_{i<j} h_ij eps_i eps_j).

    eps_1 is pinned to +1 (the energy is even) and the rest split in two
    halves, so the 2^(N-1) energies come from two small tables and one
    matrix product.
    """
    N = config.N
    h = np.asarray(h, dtype=float)
    if h.shape != (N, N):
        raise ValueError(f"couplings must be {N}x{N}")
    a, SA, SB, iA, iB, PA, PB = _halves(N)
    c = config.beta / math.sqrt(N)
    eA = PA @ (c * h[:a, :a][iA])
    eB = PB @ (c * h[a:, a:][iB])
    E = SA @ (c * h[:a, a:]) @ SB.T
    E += eA[:, None]
    E += eB[None, :]
    m = E.max()
    E -= m
    np.exp(E, out=E)
    return float(m + math.log(math.fsum(E.sum(axis=1)))) - (N - 1) * math.log(2)


@dataclass(frozen=True)
class SpinGlassSampler:
    config: SpinGlassConfig
    name: str = "logZ"

    def __call__(self, rng):
        lz = spin_glass_logZ(self.config, self.config.draw(rng))
        return [lz, math.exp(lz)]


def t_limit(N: int) -> float:
    return 4 * math.sqrt(N) * (N - 1)


def logz_curve(N: int):
    def curve(t: float) -> BoundValue:
        return BoundValue("12.5", {"N": N, "t": t}, 2 * math.exp(-t * t / (32 * (N - 1))))

    return curve


def spin_glass_experiment(config: SpinGlassConfig, samples: int = 10_000, seed: int = 0,
                          t_grid=(1, 2, 5, 10, 20, 25, 30, 40), workers: int | None = None) -> AppReport:
    """Tails of |log Z - M| and the first two moments of Z."""
    N, beta = config.N, config.beta
    lim = t_limit(N)
    grid = [t for t in t_grid if 0 < t <= lim]
    data = mc_sample(SpinGlassSampler(config), samples, seed, workers)
    lz, Z = data[:, 0], data[:, 1]
    est = tail_from_samples(lz, grid, seed, "logZ", side="abs")
    rep = AppReport("spinglass", {"N": N, "beta": beta, "disorder": config.disorder, "samples": samples,
                                  "t_grid": grid, "t_limit": lim}, seed)
    rep.add_tail("12.5", est, logz_curve(N))
    m1, m2 = float(Z.mean()), float((Z * Z).mean())
    ratio = m1 / math.exp(beta * beta * N / 4)
    second = m2 / (m1 * m1)
    rep.aux = {"median": est.median, "mean_logZ": est.mean, "sd_logZ": float(lz.std()),
               "mean_Z": m1, "mean_ratio": ratio, "K_mean": max(ratio, 1 / ratio),
               "second_ratio": second, "K_second": second * (1 - beta * beta) if beta < 1 else math.inf,
               "dropped_t": [t for t in t_grid if not 0 < t <= lim]}
    if config.disorder == "normal":
        rep.aux["mean_Z_exact"] = math.exp(beta * beta * (N - 1) / 4)
    return rep
