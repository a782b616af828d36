"""Pure-Python versions of the compiled kernels in ``_kernels.pyx``.

Same signatures and results; used when the extension is not built or when
CONCLAB_PURE=1.
"""
from __future__ import annotations

import heapq
from bisect import bisect_right

import numpy as np

_SPLIT_MIN = 4


def _subset_minima(E: np.ndarray, idx: np.ndarray):
    """Running minima and masses for every subset of the points in ``idx``.

    Subset s (a bitmask over idx) is row s; the empty subset has +inf minima.
    """
    K, n, _ = E.shape
    k = idx.size
    V = np.full((1 << k, K, n), np.inf)
    for b, j in enumerate(idx):
        lo, hi = 1 << b, 1 << (b + 1)
        V[lo:hi] = np.minimum(V[:lo], E[:, :, j][None])
    return V


def _subset_sums(w: np.ndarray, idx: np.ndarray) -> np.ndarray:
    out = np.zeros(1 << idx.size)
    for b, j in enumerate(idx):
        lo = 1 << b
        out[lo:2 * lo] = out[:lo] + w[j]
    return out


def subset_sweep(E, m, mr, which, alpha, C, rel_tol):
    """Meet-in-the-middle over the low and high halves of the point set."""
    E = np.ascontiguousarray(E, dtype=float)
    K, n, _ = E.shape
    m, mr = np.asarray(m, float), np.asarray(mr, float)
    which, alpha, C = np.asarray(which), np.asarray(alpha, float), np.asarray(C, float)
    nk = C.size
    n_lo = n // 2 if n >= _SPLIT_MIN else n
    lo_idx, hi_idx = np.arange(n_lo), np.arange(n_lo, n)
    V_lo = _subset_minima(E, lo_idx)
    V_hi = _subset_minima(E, hi_idx)
    pr_lo, pr_hi = _subset_sums(mr, lo_idx), _subset_sums(mr, hi_idx)
    viol = np.zeros(nk, dtype=np.int64)
    worst = np.full(nk, np.inf)
    worst_mask = np.zeros(nk, dtype=np.int64)
    count = 0
    with np.errstate(divide="ignore"):
        for h in range(V_hi.shape[0]):
            M = np.minimum(V_lo, V_hi[h][None])
            with np.errstate(invalid="ignore"):
                lhs = np.einsum("skx,x->sk", np.where(np.isinf(M), 0.0, M), m)
            pr = pr_lo + pr_hi[h]
            start = 1 if h == 0 else 0
            lhs, pr = lhs[start:], pr[start:]
            count += lhs.shape[0]
            for k in range(nk):
                rhs = C[k] * pr ** (-alpha[k])
                norm = np.maximum(rhs, 1.0)
                rel = (rhs - lhs[:, which[k]]) / norm
                viol[k] += int((rel < -rel_tol).sum())
                i = int(np.argmin(rel))
                if rel[i] < worst[k]:
                    worst[k] = rel[i]
                    worst_mask[k] = ((i + start) | (h << n_lo))
    return count, viol, worst, worst_mask


def lis_length(seq) -> int:
    tails: list[float] = []
    for v in seq:
        i = bisect_right(tails, v)
        if i == len(tails):
            tails.append(v)
        else:
            tails[i] = v
    return len(tails)


def lcs_length(a, b) -> int:
    """Bit-parallel LCS over Python integers; agrees with the DP table."""
    n = len(a)
    if n == 0 or len(b) == 0:
        return 0
    full = (1 << n) - 1
    match: dict = {}
    for i, c in enumerate(a):
        match[c] = match.get(c, 0) | (1 << i)
    V = full
    for c in b:
        U = V & match.get(c, 0)
        V = ((V + U) | (V - U)) & full
    return n - V.bit_count()


def ffd_bins(sizes_sorted) -> int:
    room: list[float] = []
    for s in sizes_sorted:
        for b, r in enumerate(room):
            if s <= r + 1e-12:
                room[b] = r - s
                break
        else:
            room.append(1.0 - s)
    return len(room)


def grid_passage_time(wh, wv, si, sj, ti, tj) -> float:
    H, W = wv.shape[0], wh.shape[1]
    dist = {(si, sj): 0.0}
    done = set()
    heap = [(0.0, si, sj)]
    while heap:
        d, i, j = heapq.heappop(heap)
        if (i, j) in done:
            continue
        done.add((i, j))
        if (i, j) == (ti, tj):
            return d
        nbrs = []
        if i > 0:
            nbrs.append((i - 1, j, wh[i - 1, j]))
        if i + 1 < H:
            nbrs.append((i + 1, j, wh[i, j]))
        if j > 0:
            nbrs.append((i, j - 1, wv[i, j - 1]))
        if j + 1 < W:
            nbrs.append((i, j + 1, wv[i, j]))
        for a, b, w in nbrs:
            nd = d + float(w)
            if (a, b) not in done and nd < dist.get((a, b), np.inf):
                dist[(a, b)] = nd
                heapq.heappush(heap, (nd, a, b))
    return float("inf")
