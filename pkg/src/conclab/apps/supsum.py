"""Suprema of linear forms sup_F sum alpha_i X_i, with independent bounded
coordinates or with a randomly permuted coefficient vector."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..bounds import BoundValue
from ..verify import clopper_pearson, mc_sample, tail_from_samples
from . import AppReport


@dataclass(frozen=True, eq=False)
class FamilySpec:
    alphas: np.ndarray
    ranges: np.ndarray = None
    sigma: float = field(init=False)
    tau: float = field(init=False)

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.alphas, dtype=float))
        if A.size == 0 or A.shape[0] == 0:
            raise ValueError("the family must be nonempty")
        r = np.zeros(A.shape[1]) if self.ranges is None else np.asarray(self.ranges, dtype=float)
        if r.shape != (A.shape[1],):
            raise ValueError("ranges must have one entry per coordinate")
        object.__setattr__(self, "alphas", A)
        object.__setattr__(self, "ranges", r)
        object.__setattr__(self, "sigma", float(np.sqrt((A * A).sum(axis=1)).max()))
        object.__setattr__(self, "tau", float(np.abs(A).max()))

    @property
    def N(self) -> int:
        return self.alphas.shape[1]

    def to_dict(self) -> dict:
        return {"size": self.alphas.shape[0], "N": self.N, "sigma": self.sigma, "tau": self.tau}


def singleton_family(N: int) -> FamilySpec:
    return FamilySpec(np.full((1, N), 1 / math.sqrt(N)))


def coordinate_family(N: int) -> FamilySpec:
    """Rows +-e_j, so that Z is the sup norm."""
    I = np.eye(N)
    return FamilySpec(np.vstack([I, -I]))


def block_family(N: int, block: int, scale: float | None = None) -> FamilySpec:
    """Rows +-1_B * scale over consecutive blocks; scale defaults to 1/sqrt(block).

    This is the sup norm of sum_i c_i v_i with v_i = scale * e_{block(i)}.
    """
    if N % block:
        raise ValueError("block size must divide N")
    scale = 1 / math.sqrt(block) if scale is None else scale
    B = np.zeros((N // block, N))
    for k in range(N // block):
        B[k, k * block:(k + 1) * block] = scale
    return FamilySpec(np.vstack([B, -B]))


def supsum_statistic(family: FamilySpec, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape != (family.N,):
        raise ValueError(f"expected a vector of length {family.N}, got shape {x.shape}")
    return float((family.alphas @ x).max())


COORD_LAWS = {
    "uniform01": lambda rng, n: rng.random(n),
    "bernoulli": lambda rng, n: (rng.random(n) < 0.5).astype(float),
    "beta22": lambda rng, n: rng.beta(2.0, 2.0, n),
}


@dataclass(frozen=True, eq=False)
class SupsumSampler:
    family: FamilySpec
    law: str = "uniform01"
    name: str = "Z"

    def __call__(self, rng) -> float:
        x = self.family.ranges + COORD_LAWS[self.law](rng, self.family.N)
        if ((x < self.family.ranges) | (x > self.family.ranges + 1)).any():
            raise ValueError("coordinate outside [r_i, r_i + 1]")
        return supsum_statistic(self.family, x)


@dataclass(frozen=True, eq=False)
class PermutationSampler:
    family: FamilySpec
    a: np.ndarray
    name: str = "Z_perm"

    def __call__(self, rng) -> float:
        return supsum_statistic(self.family, self.a[rng.permutation(self.a.size)])


@dataclass(frozen=True, eq=False)
class TopKSampler:
    """Z together with tau times the sum of the k largest coordinates, for each k."""
    family: FamilySpec
    ks: tuple
    law: str = "uniform01"

    def __call__(self, rng):
        x = self.family.ranges + COORD_LAWS[self.law](rng, self.family.N)
        if (x <= 0).any():
            raise ValueError("coordinates must be positive")
        top = np.cumsum(np.sort(x)[::-1])
        return [supsum_statistic(self.family, x)] + [self.family.tau * top[k - 1] for k in self.ks]


def _gauss_curve(eq: str, coef: float, denom: float):
    def curve(u: float) -> BoundValue:
        return BoundValue(eq, {"u": u, "denom": denom}, coef * math.exp(-u * u / denom))

    return curve


def supsum_experiment(family: FamilySpec, law: str = "uniform01", samples: int = 100_000, seed: int = 0,
                      u_grid=(0.5, 1, 2, 3, 4, 5), workers: int | None = None) -> AppReport:
    """|Z - M| against 4 exp(-u^2 / 4 sigma^2)."""
    if law not in COORD_LAWS:
        raise ValueError(f"unknown coordinate law {law!r}")
    values = mc_sample(SupsumSampler(family, law), samples, seed, workers)
    est = tail_from_samples(values, u_grid, seed, "Z", side="abs")
    rep = AppReport("supsum", {"family": family.to_dict(), "law": law, "samples": samples,
                               "u_grid": list(u_grid)}, seed)
    rep.add_tail("8.1.1", est, _gauss_curve("8.1.1", 4.0, 4 * family.sigma ** 2))
    rep.aux = {"median": est.median, "mean": est.mean, "sd": float(np.std(values))}
    return rep


def permutation_experiment(family: FamilySpec, a, samples: int = 10_000, seed: int = 0,
                           u_grid=(0.5, 1, 2, 3, 4), workers: int | None = None) -> AppReport:
    """Z = sup_F sum alpha_i a_rho(i), rho uniform; both permutation curves."""
    a = np.asarray(a, dtype=float)
    if a.shape != (family.N,):
        raise ValueError("coefficient vector has the wrong length")
    if np.abs(a).max() > 1:
        raise ValueError("coefficients must satisfy |a_i| <= 1")
    values = mc_sample(PermutationSampler(family, a), samples, seed, workers)
    est = tail_from_samples(values, u_grid, seed, "Z_perm", side="abs")
    rep = AppReport("supsum-perm", {"family": family.to_dict(), "sum_a2": float(a @ a), "samples": samples,
                                    "u_grid": list(u_grid)}, seed)
    rep.add_tail("13.17", est, _gauss_curve("13.17", 4.0, 16 * family.sigma ** 2))
    if family.tau <= 1:
        # |v_i| <= 1 in the sup norm
        rep.add_tail("13.18", est, _gauss_curve("13.18", 4.0, 16 * float(a @ a)))
    rep.aux = {"median": est.median, "mean": est.mean, "sd": float(np.std(values))}
    return rep


def topk_experiment(family: FamilySpec, q: int = 2, ks=(2, 4), law: str = "uniform01", samples: int = 100_000,
                    seed: int = 0, t_grid=(0.0, 0.1, 0.2, 0.3, 0.5, 1.0), quantile: float = 0.6,
                    workers: int | None = None) -> AppReport:
    """P(Z >= qa + t) against 1/(q^(k+1) P(Z <= a)^q) + P(tau * top-k sum >= t).

    a is the empirical ``quantile`` of Z.  Both sides are taken at their
    conservative confidence limits: the left by its CP upper limit, the
    right from the CP lower limit of P(Z <= a) and the CP upper limit of
    the order-statistic term.
    """
    if (family.alphas < 0).any():
        raise ValueError("the family must have nonnegative coefficients")
    ks = tuple(int(k) for k in ks)
    data = mc_sample(TopKSampler(family, ks, law), samples, seed, workers)
    Z = data[:, 0]
    n = Z.size
    a = float(np.quantile(Z, quantile, method="lower"))
    below = int((Z <= a).sum())
    p_lo = clopper_pearson(below, n)[0]
    rep = AppReport("supsum-topk", {"family": family.to_dict(), "q": q, "ks": list(ks), "law": law,
                                    "samples": samples, "t_grid": list(t_grid), "quantile": quantile}, seed)
    lhs = tail_from_samples(Z, [q * a + t for t in t_grid], seed, "Z", side="raw")
    for j, k in enumerate(ks):
        term2 = tail_from_samples(data[:, j + 1], t_grid, seed, f"tau*top{k}", side="raw")
        first = 1.0 / (q ** (k + 1) * p_lo ** q)
        rhs = [BoundValue("13.4", {"k": k, "t": t, "a": a}, first + up, extra={"term1": first, "term2": up})
               for t, up in zip(t_grid, term2.cp_upper)]
        rep.add_tail(f"13.4[k={k}]", lhs, rhs)
        rep.tails[-1]["term2"] = term2.to_dict()
    rep.aux = {"a": a, "P(Z<=a)": below / n, "P(Z<=a) cp_lower": p_lo, "median": lhs.median}
    return rep
