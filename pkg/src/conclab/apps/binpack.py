"""Bin packing: exact branch and bound, first fit decreasing, and the tail
experiment for the number of unit bins."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..bounds import BoundValue
from ..verify import mc_sample, tail_from_samples
from . import AppReport

EXACT_CAP = 32
_EPS = 1e-12


def _check_sizes(sizes) -> np.ndarray:
    s = np.asarray(sizes, dtype=float)
    if s.ndim != 1:
        raise ValueError("sizes must be a flat list")
    if ((s <= 0) | (s > 1)).any():
        raise ValueError("item sizes must lie in (0, 1]")
    return s


def ffd(sizes) -> int:
    return kernels.ffd_bins(_check_sizes(sizes))


def _lower_bound(items: np.ndarray) -> int:
    """max of ceil(sum) and the count of items above 1/2."""
    return max(math.ceil(items.sum() - 1e-9), int((items > 0.5 + _EPS).sum()))


def exact_bins(sizes) -> int:
    """Optimal bin count by depth-first branch and bound.

    Items are placed largest first into each distinct open residual
    capacity or a new bin; nodes whose open bins plus a lower bound on the
    remaining items reach the incumbent are cut.
    """
    s = np.sort(_check_sizes(sizes))[::-1]
    n = s.size
    if n > EXACT_CAP:
        raise ValueError(f"exact mode supports at most {EXACT_CAP} items, got {n}")
    if n == 0:
        return 0
    best = kernels.ffd_bins(s)
    lb = _lower_bound(s)
    if best == lb:
        return best
    tail_sum = np.concatenate([np.cumsum(s[::-1])[::-1], [0.0]])
    room: list[float] = []

    def dfs(i: int):
        nonlocal best
        if i == n:
            best = min(best, len(room))
            return
        free = sum(room)
        extra = math.ceil(max(tail_sum[i] - free, 0.0) - 1e-9)
        if len(room) + extra >= best:
            return
        seen = set()
        for b in range(len(room)):
            r = room[b]
            if s[i] <= r + _EPS and round(r, 12) not in seen:
                seen.add(round(r, 12))
                room[b] = r - s[i]
                dfs(i + 1)
                room[b] = r
                if best == lb:
                    return
        if len(room) + 1 < best:
            room.append(1.0 - s[i])
            dfs(i + 1)
            room.pop()

    dfs(0)
    return best


def exact_bins_dp(sizes) -> int:
    """Subset dynamic program, O(2^n n); the oracle for small n."""
    s = _check_sizes(sizes)
    n = s.size
    full = (1 << n) - 1
    best = [(n + 1, 0.0)] * (1 << n)
    best[0] = (0, 0.0)  # no open bin yet
    for mask in range(1 << n):
        bins, left = best[mask]
        if bins > n:
            continue
        for i in range(n):
            if mask >> i & 1:
                continue
            if s[i] <= left + _EPS:
                cand = (bins, left - s[i])
            else:
                cand = (bins + 1, 1.0 - s[i])
            nm = mask | (1 << i)
            if cand[0] < best[nm][0] or (cand[0] == best[nm][0] and cand[1] > best[nm][1]):
                best[nm] = cand
    return best[full][0]


def binpack_size(sizes, mode: str = "exact") -> int:
    """Number of unit bins; every value is checked against 2 sum + 1."""
    s = _check_sizes(sizes)
    if mode == "exact":
        b = exact_bins(s)
    elif mode == "ffd":
        b = ffd(s)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    assert b <= 2 * s.sum() + 1 + 1e-9, "packing exceeds 2 sum + 1"
    return b


# -- experiment ---------------------------------------------------------------------

ITEM_LAWS = {
    # name: (sampler, E X^2)
    "uniform01": (lambda rng, n: 1.0 - rng.random(n), 1 / 3),
    "ones": (lambda rng, n: np.ones(n), 1.0),
    "uniform-half": (lambda rng, n: 0.5 * (1.0 - rng.random(n)), 1 / 12),
}


@dataclass(frozen=True)
class BinpackSampler:
    N: int
    law: str = "uniform01"
    mode: str = "ffd"
    name: str = "bins"

    def __call__(self, rng) -> float:
        x = ITEM_LAWS[self.law][0](rng, self.N)
        return float(binpack_size(x, self.mode))


def thm65_curve(N: int, ex2: float):
    lim = 4 * math.sqrt(2) * N * ex2

    def curve(u: float) -> BoundValue:
        val = 8 * math.exp(-u * u / (16 * N * ex2))
        note = "" if u <= lim else f"outside stated range u <= {lim:.6g}"
        return BoundValue("6.5", {"N": N, "EX2": ex2, "u": u}, val, note)

    return curve


DEFAULT_GRID = (5, 10, 20, 50, 75, 100)


def binpack_experiment(N: int, law: str = "uniform01", samples: int = 10_000, seed: int = 0,
                       u_grid=None, mode: str | None = None,
                       workers: int | None = None) -> AppReport:
    """Tails of |B_N - M| >= 1 + u against 8 exp(-u^2 / (16 N E X^2)).

    The default grid keeps the points of (5, 10, 20, 50, 75, 100) inside the
    curve's range u <= 4 sqrt(2) N E X^2.
    """
    if law not in ITEM_LAWS:
        raise ValueError(f"unknown item law {law!r}; builtins are {sorted(ITEM_LAWS)}")
    mode = mode or ("exact" if N <= 12 else "ffd")
    if mode == "exact" and N > EXACT_CAP:
        raise ValueError(f"exact mode supports N <= {EXACT_CAP}")
    ex2 = ITEM_LAWS[law][1]
    if u_grid is None:
        u_grid = [u for u in DEFAULT_GRID if u <= 4 * math.sqrt(2) * N * ex2] or [DEFAULT_GRID[0]]
    values = mc_sample(BinpackSampler(N, law, mode), samples, seed, workers)
    grid = [1 + u for u in u_grid]
    est = tail_from_samples(values, grid, seed, "bins", side="abs")
    rep = AppReport("binpack", {"N": N, "law": law, "mode": mode, "samples": samples, "u_grid": list(u_grid)}, seed)
    rep.add_tail("6.5", est, thm65_curve(N, ex2), offset=1.0)
    rep.aux = {"EX2": ex2, "mean": est.mean, "median": est.median}
    if mode == "ffd":
        rep.caveats.append("statistic is the first-fit-decreasing bin count, not the optimum; "
                           "heuristic evidence only")
    return rep
