"""Distances from a point to an event.

Hamming-type distances are plain scans of the event.  The convex-hull
distance is a min-norm-point problem over the 0/1 mismatch patterns of x
against A; it is solved exactly with Wolfe's algorithm, and the xi-objective
variant with Frank-Wolfe using away steps.

Both hull objectives are nondecreasing in every coordinate on [0, 1]^N, so
only the minimal patterns (under coordinatewise order) matter.  Solves are
memoized on the set of minimal patterns, which is small for small N.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
import scipy.linalg
from scipy.optimize import brentq

from . import bounds

GAP_TOL = 1e-9
PIVOT_TOL = 1e-12
XI_MAX_ITER = 100_000
TUPLE_BUDGET = 10**6


class SolverError(RuntimeError):
    """Iteration budget exhausted; carries the best point found and its gap."""

    def __init__(self, msg, best=None, gap=None):
        super().__init__(msg)
        self.best = best
        self.gap = gap


@dataclass(frozen=True)
class WeightProfile:
    a: tuple[float, ...]

    def __post_init__(self):
        if any(v < 0 for v in self.a) or not any(v > 0 for v in self.a):
            raise ValueError("profile entries must be >= 0 with at least one > 0")

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.a, dtype=float)


@dataclass(frozen=True, eq=False)
class PenaltyKernel:
    """A penalty h on a shared alphabet together with the alphabet weights."""

    h: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        h = np.array(self.h, dtype=float)
        w = np.array(self.weights, dtype=float)
        if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] != w.size:
            raise ValueError(f"kernel shape {h.shape} does not match alphabet of size {w.size}")
        if (h < 0).any():
            raise ValueError("penalties must be nonnegative")
        if np.any(np.diag(h) != 0):
            raise ValueError("h(w, w) must vanish")
        h.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "weights", w)

    @cached_property
    def norm2(self) -> float:
        return math.sqrt(float(self.weights @ (self.h**2) @ self.weights))

    @cached_property
    def normInf(self) -> float:
        return float(self.h.max())

    @classmethod
    def discrete(cls, weights, c: float = 1.0):
        """h(i, j) = c for i != j."""
        k = len(weights)
        return cls(c * (1 - np.eye(k)), np.asarray(weights))


@dataclass
class MinNormResult:
    s: np.ndarray
    value: float
    gap: float
    support: list = field(default_factory=list)
    iterations: int = 0
    objective: str = "squared-euclidean"

    @property
    def distance(self) -> float:
        """sqrt of the squared-norm value (only meaningful for that objective)."""
        return math.sqrt(max(self.value, 0.0))

    def check(self, atoms: np.ndarray | None = None, tol: float = 1e-9):
        w = np.array([c for _, c in self.support])
        if (w < -tol).any() or abs(w.sum() - 1) > tol:
            raise AssertionError("support weights are not a convex combination")
        if atoms is not None:
            s = w @ np.asarray(atoms, dtype=float)
            if np.abs(s - self.s).max() > tol:
                raise AssertionError("support does not reproduce s")


# -- patterns -------------------------------------------------------------------

def _members(A) -> np.ndarray:
    if isinstance(A, np.ndarray):
        return A
    return A.member_array()


def _check_x(space, x) -> np.ndarray:
    if space is not None:
        space.check_point(x)
    return np.asarray(x, dtype=np.int64)


def pattern_masks(Y: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Bitmask of mismatching coordinates, one per row of Y."""
    N = Y.shape[1]
    if N > 62:
        raise ValueError("pattern masks support at most 62 coordinates")
    return (Y != x).astype(np.int64) @ (np.int64(1) << np.arange(N, dtype=np.int64))


def minimal_masks(masks: np.ndarray) -> tuple[list[int], list[int]]:
    """Minimal elements of a family of bitmasks and the first row hitting each.

    Output keeps the order of first appearance, so tie-breaking follows the
    enumeration order of the event.
    """
    uniq, first = np.unique(masks, return_index=True)
    order = np.argsort(first, kind="stable")
    uniq, first = uniq[order].tolist(), first[order].tolist()
    by_weight = sorted(range(len(uniq)), key=lambda j: (uniq[j].bit_count(), first[j]))
    kept: list[int] = []
    for j in by_weight:
        m = uniq[j]
        if not any(uniq[k] & m == uniq[k] for k in kept):
            kept.append(j)
    kept.sort(key=lambda j: first[j])
    return [uniq[j] for j in kept], [first[j] for j in kept]


def masks_to_atoms(masks: Sequence[int], N: int) -> np.ndarray:
    m = np.asarray(masks, dtype=np.int64)[:, None]
    return ((m >> np.arange(N, dtype=np.int64)) & 1).astype(float)


# -- Hamming family -----------------------------------------------------------------

def hamming_distance(space, A, x, profile: WeightProfile | Sequence[float] | None = None) -> float:
    """min over y in A of the summed weights of coordinates where x and y differ."""
    Y = _members(A)
    if len(Y) == 0:
        raise ValueError("empty event")
    x = _check_x(space, x)
    diff = Y != x
    if profile is None:
        return float(diff.sum(axis=1).min())
    a = profile.array if isinstance(profile, WeightProfile) else np.asarray(profile, dtype=float)
    return float((diff @ a).min())


def one_sided_distance(space, A, x) -> int:
    """min over y in A of #{i : x_i = 1, y_i = 0}."""
    if space is not None and not space.is_binary:
        raise ValueError("one-sided distance needs two-point factors")
    Y = _members(A)
    if len(Y) == 0:
        raise ValueError("empty event")
    x = _check_x(space, x)
    return int(((x == 1) & (Y == 0)).sum(axis=1).min())


def penalty_distance(space, A, x, kernel: PenaltyKernel) -> float:
    """min over y in A of sum_i h(x_i, y_i)."""
    if space is not None and any(s != kernel.h.shape[0] for s in space.sizes):
        raise ValueError("kernel alphabet does not match the factors")
    Y = _members(A)
    if len(Y) == 0:
        raise ValueError("empty event")
    x = _check_x(space, x)
    return float(kernel.h[x[None, :], Y].sum(axis=1).min())


def q_point_distance(space, A_list, x) -> int:
    """Fewest coordinates of x not matched by some y^j, y^j in A_j.

    Exact: each A_j is reduced to its maximal coverage masks (a tuple using a
    dominated point is never better), then all remaining tuples are scanned.
    """
    q = len(A_list)
    if q < 2:
        raise ValueError("q must be at least 2")
    x = _check_x(space, x)
    N = x.size
    full = (1 << N) - 1
    reduced = []
    for A in A_list:
        Y = _members(A)
        if len(Y) == 0:
            raise ValueError("empty component event")
        mins, _ = minimal_masks(pattern_masks(Y, x))
        reduced.append(sorted({full ^ m for m in mins}))
    if math.prod(len(r) for r in reduced) > TUPLE_BUDGET:
        raise ValueError(f"tuple budget exceeded ({math.prod(len(r) for r in reduced)} > {TUPLE_BUDGET})")
    best = N
    cov = [0]
    for r in reduced:
        cov = list({c | m for c in cov for m in r})
        if full in cov:
            return 0
    for c in cov:
        best = min(best, N - c.bit_count())
    return best


def q_point_distance_bruteforce(A_list, x) -> int:
    """Scan of every tuple; the oracle for :func:`q_point_distance`."""
    import itertools

    x = np.asarray(x)
    best = x.size
    for tup in itertools.product(*(_members(A) for A in A_list)):
        covered = np.zeros(x.size, dtype=bool)
        for y in tup:
            covered |= y == x
        best = min(best, int((~covered).sum()))
    return best


# -- min-norm point -------------------------------------------------------------

def _affine_minimizer(B: np.ndarray) -> np.ndarray:
    """Weights lambda (summing to 1) of the min-norm point of aff(rows of B)."""
    k = B.shape[0]
    if k == 1:
        return np.ones(1)
    b0 = B[0]
    D = (B[1:] - b0).T
    Q, R, piv = scipy.linalg.qr(D, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    r = int((diag > PIVOT_TOL * max(diag[0], 1.0)).sum()) if diag.size else 0
    mu = np.zeros(k - 1)
    if r:
        z = scipy.linalg.solve_triangular(R[:r, :r], -(Q[:, :r].T @ b0))
        mu[piv[:r]] = z
    lam = np.empty(k)
    lam[0] = 1 - mu.sum()
    lam[1:] = mu
    return lam


def _wolfe(P: np.ndarray, tol: float, max_iter: int):
    """Wolfe's min-norm-point algorithm over the rows of P."""
    norms = np.einsum("ij,ij->i", P, P)
    S = [int(np.argmin(norms))]
    w = np.ones(1)
    x = P[S[0]].copy()
    it = 0
    gap = np.inf
    while it < max_iter:
        it += 1
        scores = P @ x
        j = int(np.argmin(scores))
        xx = float(x @ x)
        gap = max(xx - float(scores[j]), 0.0)
        if gap <= tol or j in S:
            break
        S.append(j)
        w = np.append(w, 0.0)
        while True:
            lam = _affine_minimizer(P[S])
            if (lam > 1e-14).all():
                w = lam
                break
            neg = lam <= 1e-14
            ratios = w[neg] / np.maximum(w[neg] - lam[neg], 1e-300)
            theta = min(1.0, float(ratios.min()))
            w = (1 - theta) * w + theta * lam
            keep = w > 1e-14
            if keep.all():
                keep[np.flatnonzero(neg)[np.argmin(ratios)]] = False
            S = [s for s, kf in zip(S, keep) if kf]
            w = w[keep]
            w /= w.sum()
        x = w @ P[S]
    else:
        raise SolverError(f"Wolfe did not converge in {max_iter} iterations", best=x, gap=gap)
    scores = P @ x
    gap = max(float(x @ x) - float(scores.min()), 0.0)
    return x, S, w, gap, it


def _xi_line_search(alpha, s, d, gmax):
    def dphi(g):
        return float(d @ bounds.xi_prime_vec(alpha, s + g * d))

    if dphi(0.0) >= 0:
        return 0.0
    if dphi(gmax) <= 0:
        return gmax
    return brentq(dphi, 0.0, gmax, xtol=1e-15)


def _frank_wolfe_xi(P: np.ndarray, alpha: float, tol: float, max_iter: int):
    """Frank-Wolfe with away steps for min sum_i xi(alpha, s_i) over conv(rows of P)."""
    j0 = int(np.argmin(bounds.xi_vec(alpha, P).sum(axis=1)))
    weights = {j0: 1.0}
    s = P[j0].copy()
    gap = np.inf
    for it in range(1, max_iter + 1):
        g = bounds.xi_prime_vec(alpha, s)
        scores = P @ g
        v = int(np.argmin(scores))
        gs = float(g @ s)
        gap = max(gs - float(scores[v]), 0.0)
        if gap <= tol:
            break
        active = list(weights)
        a = active[int(np.argmax([scores[k] for k in active]))]
        if gap >= float(scores[a]) - gs:
            d, gmax, step = P[v] - s, 1.0, "fw"
        else:
            wa = weights[a]
            d, gmax, step = s - P[a], wa / (1 - wa), "away"
        gamma = _xi_line_search(alpha, s, d, gmax)
        if step == "fw":
            for k in weights:
                weights[k] *= 1 - gamma
            weights[v] = weights.get(v, 0.0) + gamma
        else:
            for k in weights:
                weights[k] *= 1 + gamma
            weights[a] -= gamma
        weights = {k: c for k, c in weights.items() if c > 1e-15}
        tot = sum(weights.values())
        weights = {k: c / tot for k, c in weights.items()}
        s = np.clip(sum(c * P[k] for k, c in weights.items()), 0.0, 1.0)
    else:
        raise SolverError(f"Frank-Wolfe did not reach gap {tol} in {max_iter} iterations", best=s, gap=gap)
    S = sorted(weights)
    return s, S, np.array([weights[k] for k in S]), gap, it


def min_norm_point(atoms, objective: str = "squared-euclidean", alpha: float = 1.0,
                   tol: float = GAP_TOL, max_iter: int | None = None) -> MinNormResult:
    """Minimize the objective over the convex hull of the given atoms (rows).

    The support lists ``(row index, weight)`` pairs.
    """
    P = np.atleast_2d(np.asarray(atoms, dtype=float))
    if P.shape[0] == 0:
        raise ValueError("no atoms")
    if objective == "squared-euclidean":
        s, S, w, gap, it = _wolfe(P, tol, max_iter or 10 * (P.shape[0] + P.shape[1]) + 100)
        value = float(s @ s)
    elif objective == "xi":
        if alpha < 1:
            raise ValueError("alpha must be at least 1")
        s, S, w, gap, it = _frank_wolfe_xi(P, alpha, tol, max_iter or XI_MAX_ITER)
        value = float(bounds.xi_vec(alpha, s).sum())
    else:
        raise ValueError(f"unknown objective {objective!r}")
    support = [(int(j), float(c)) for j, c in zip(S, w)]
    return MinNormResult(s=s, value=value, gap=gap, support=support, iterations=it, objective=objective)


_memo: dict = {}
_MEMO_LIMIT = 200_000


def _solve_patterns(masks: tuple[int, ...], N: int, objective: str, alpha: float) -> MinNormResult:
    key = (masks, N, objective, alpha if objective == "xi" else None)
    hit = _memo.get(key)
    if hit is not None:
        return hit
    P = masks_to_atoms(masks, N)
    res = min_norm_point(P, objective, alpha)
    # the certificate: the optimum is a supporting direction for every pattern
    if objective == "squared-euclidean":
        lhs = float((P @ res.s).min())
        if lhs < res.value - res.gap - 1e-9:
            raise SolverError("dual certificate failed", best=res.s, gap=res.gap)
    if len(_memo) > _MEMO_LIMIT:
        _memo.clear()
    _memo[key] = res
    return res


def _hull_distance(space, A, x, objective, alpha) -> MinNormResult:
    Y = _members(A)
    if len(Y) == 0:
        raise ValueError("empty event")
    x = _check_x(space, x)
    masks = pattern_masks(Y, x)
    mins, rows = minimal_masks(masks)
    base = _solve_patterns(tuple(mins), x.size, objective, alpha)
    support = [(tuple(int(v) for v in Y[rows[j]]), c) for j, c in base.support]
    return MinNormResult(s=base.s.copy(), value=base.value, gap=base.gap, support=support,
                         iterations=base.iterations, objective=objective)


def convex_distance(space, A, x) -> MinNormResult:
    """Min-norm point of the hull of mismatch patterns; f_c is ``result.distance``."""
    return _hull_distance(space, A, x, "squared-euclidean", 1.0)


def convex_value_from_masks(masks: Sequence[int], N: int) -> float:
    """Squared convex distance from raw pattern masks (used by the sweeps)."""
    mins, _ = minimal_masks(np.asarray(masks, dtype=np.int64))
    return _solve_patterns(tuple(mins), N, "squared-euclidean", 1.0).value


def xi_value_from_masks(masks: Sequence[int], N: int, alpha: float) -> float:
    mins, _ = minimal_masks(np.asarray(masks, dtype=np.int64))
    return _solve_patterns(tuple(mins), N, "xi", float(alpha)).value


def xi_distance(space, A, x, alpha: float) -> float:
    """min over the pattern hull of sum_i xi(alpha, s_i)."""
    if alpha < 1:
        raise ValueError("alpha must be at least 1")
    return _hull_distance(space, A, x, "xi", float(alpha)).value


def perm_convex_distance(A: Sequence[Sequence[int]], sigma: Sequence[int]) -> MinNormResult:
    """Squared hull distance on S_N; ``value`` is f(A, sigma) itself."""
    T = np.asarray([tuple(t) for t in A], dtype=np.int64)
    sig = np.asarray(sigma, dtype=np.int64)
    if T.ndim != 2 or T.shape[1] != sig.size:
        raise ValueError("permutations must all have the same length as sigma")
    N = sig.size
    ref = np.arange(1, N + 1)
    for t in (*T, sig):
        if not np.array_equal(np.sort(t), ref):
            raise ValueError(f"{tuple(t)} is not a permutation of 1..{N}")
    return _hull_distance(None, T, sig, "squared-euclidean", 1.0)


def projection_oracle(points: np.ndarray) -> float:
    """Squared distance from the origin to conv(points) for at most 3 points.

    Closed-form enumeration over vertices, edges and the triangle interior.
    """
    P = np.asarray(points, dtype=float)
    k = len(P)
    cands = [float(p @ p) for p in P]
    for i in range(k):
        for j in range(i + 1, k):
            d = P[j] - P[i]
            dd = d @ d
            if dd > 0:
                t = -(P[i] @ d) / dd
                if 0 < t < 1:
                    q = P[i] + t * d
                    cands.append(float(q @ q))
    if k == 3:
        G = np.array([[(P[1] - P[0]) @ (P[1] - P[0]), (P[1] - P[0]) @ (P[2] - P[0])],
                      [(P[1] - P[0]) @ (P[2] - P[0]), (P[2] - P[0]) @ (P[2] - P[0])]])
        rhs = -np.array([P[0] @ (P[1] - P[0]), P[0] @ (P[2] - P[0])])
        if abs(np.linalg.det(G)) > 1e-12 * max(1.0, np.abs(G).max() ** 2):
            u, v = np.linalg.solve(G, rhs)
            if u > 0 and v > 0 and u + v < 1:
                q = P[0] + u * (P[1] - P[0]) + v * (P[2] - P[0])
                cands.append(float(q @ q))
    return min(cands)
