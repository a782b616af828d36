# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops.  Each function mirrors one in conclab._fallback."""
import numpy as np
cimport numpy as cnp
from libc.math cimport pow, INFINITY
from libc.stdlib cimport malloc, free

cnp.import_array()


def subset_sweep(const double[:, :, ::1] E, const double[::1] m, const double[::1] mr,
                 const long[::1] which, const double[::1] alpha, const double[::1] C, double rel_tol):
    """Check sum_x m_x min_{y in A} E[e, x, y] <= C_k Pr(A)^-alpha_k over all nonempty A.

    Subsets are visited depth-first; the running minima are updated one added
    point at a time.  Returns (events, violations, min normalized slack,
    mask attaining it) with one entry per check k.
    """
    cdef Py_ssize_t K = E.shape[0], n = E.shape[1], nk = C.shape[0]
    cdef Py_ssize_t d, j, x, e, k
    if n > 62:
        raise ValueError("at most 62 points")
    cdef double *cur = <double *> malloc((n + 1) * K * n * sizeof(double))
    cdef double *lhs = <double *> malloc(K * sizeof(double))
    cdef long long *stack_j = <long long *> malloc((n + 1) * sizeof(long long))
    cdef double *pr = <double *> malloc((n + 1) * sizeof(double))
    cdef long long *mask = <long long *> malloc((n + 1) * sizeof(long long))
    viol_a = np.zeros(nk, dtype=np.int64)
    worst_a = np.full(nk, np.inf)
    mask_a = np.zeros(nk, dtype=np.int64)
    cdef long long[::1] viol = viol_a
    cdef double[::1] worst = worst_a
    cdef long long[::1] worst_mask = mask_a
    cdef long long count = 0
    cdef double v, s0, s1, s2, s3, rhs, slack, norm
    cdef double *prev
    cdef double *row
    cdef const double *col
    cdef const double *mp = &m[0]
    # column-major copy so that E[e, :, j] is contiguous
    ET_a = np.ascontiguousarray(np.swapaxes(np.asarray(E), 1, 2))
    cdef double[:, :, ::1] ET = ET_a
    try:
        for e in range(K):
            for x in range(n):
                cur[e * n + x] = INFINITY
        pr[0] = 0.0
        mask[0] = 0
        d = 0
        stack_j[0] = 0
        with nogil:
            while d >= 0:
                # stack_j[d] is the next point to try adding at depth d
                j = stack_j[d]
                if j >= n:
                    d -= 1
                    continue
                stack_j[d] = j + 1
                prev = cur + d * K * n
                row = cur + (d + 1) * K * n
                for e in range(K):
                    col = &ET[e, j, 0]
                    for x in range(n):
                        v = prev[e * n + x]
                        row[e * n + x] = v if v < col[x] else col[x]
                    # four partial sums break the add dependency chain
                    s0 = 0.0; s1 = 0.0; s2 = 0.0; s3 = 0.0
                    x = 0
                    while x + 4 <= n:
                        s0 += mp[x] * row[e * n + x]
                        s1 += mp[x + 1] * row[e * n + x + 1]
                        s2 += mp[x + 2] * row[e * n + x + 2]
                        s3 += mp[x + 3] * row[e * n + x + 3]
                        x += 4
                    while x < n:
                        s0 += mp[x] * row[e * n + x]
                        x += 1
                    lhs[e] = (s0 + s1) + (s2 + s3)
                pr[d + 1] = pr[d] + mr[j]
                mask[d + 1] = mask[d] | (1LL << j)
                count += 1
                for k in range(nk):
                    if alpha[k] == 1.0:
                        rhs = C[k] / pr[d + 1]
                    elif alpha[k] == 2.0:
                        rhs = C[k] / (pr[d + 1] * pr[d + 1])
                    else:
                        rhs = C[k] * pow(pr[d + 1], -alpha[k])
                    slack = rhs - lhs[which[k]]
                    norm = rhs if rhs > 1.0 else 1.0
                    if slack < -rel_tol * norm:
                        viol[k] += 1
                    if slack / norm < worst[k]:
                        worst[k] = slack / norm
                        worst_mask[k] = mask[d + 1]
                d += 1
                stack_j[d] = j + 1
    finally:
        free(cur)
        free(lhs)
        free(stack_j)
        free(pr)
        free(mask)
    return count, viol_a, worst_a, mask_a


def lis_length(const double[::1] seq):
    """Longest nondecreasing subsequence by patience sorting (upper bisection)."""
    cdef Py_ssize_t n = seq.shape[0], i, lo, hi, mid, size = 0
    cdef double v
    cdef double *tails = <double *> malloc((n + 1) * sizeof(double))
    try:
        with nogil:
            for i in range(n):
                v = seq[i]
                lo = 0
                hi = size
                while lo < hi:
                    mid = (lo + hi) >> 1
                    if tails[mid] <= v:
                        lo = mid + 1
                    else:
                        hi = mid
                tails[lo] = v
                if lo == size:
                    size += 1
    finally:
        free(tails)
    return size


def lcs_length(const long[::1] a, const long[::1] b, Py_ssize_t k):
    """Bit-parallel LCS on 64-bit words; symbols are dense codes in [0, k).

    Row update V <- (V + U) | (V - U) with U = V & match(c); U is a subset
    of V so the subtraction is V & ~U and only the sum carries.
    """
    cdef Py_ssize_t n = a.shape[0], m = b.shape[0], nw, i, j, w
    cdef cnp.uint64_t *M
    cdef cnp.uint64_t *V
    cdef cnp.uint64_t u, v, s, carry, top
    cdef long count = 0
    if n == 0 or m == 0:
        return 0
    nw = (n + 63) // 64
    top = (<cnp.uint64_t> 1 << (n % 64)) - 1 if n % 64 else ~(<cnp.uint64_t> 0)
    M = <cnp.uint64_t *> malloc(k * nw * sizeof(cnp.uint64_t))
    V = <cnp.uint64_t *> malloc(nw * sizeof(cnp.uint64_t))
    try:
        with nogil:
            for i in range(k * nw):
                M[i] = 0
            for i in range(n):
                M[a[i] * nw + i // 64] |= (<cnp.uint64_t> 1) << (i % 64)
            for w in range(nw):
                V[w] = ~(<cnp.uint64_t> 0)
            V[nw - 1] = top
            for j in range(m):
                carry = 0
                for w in range(nw):
                    v = V[w]
                    u = v & M[b[j] * nw + w]
                    s = v + u
                    # carry out of v + u + carry
                    if carry:
                        s += 1
                        carry = 1 if s <= v else 0
                    else:
                        carry = 1 if s < v else 0
                    V[w] = s | (v & ~u)
                V[nw - 1] &= top
            for w in range(nw):
                v = V[w]
                while v:
                    v &= v - 1
                    count += 1
    finally:
        free(M)
        free(V)
    return n - count


def ffd_bins(const double[::1] sizes_sorted):
    """First fit on items already sorted in decreasing order."""
    cdef Py_ssize_t n = sizes_sorted.shape[0], i, b, nb = 0
    cdef double *room = <double *> malloc((n + 1) * sizeof(double))
    cdef double eps = 1e-12
    try:
        with nogil:
            for i in range(n):
                for b in range(nb):
                    if sizes_sorted[i] <= room[b] + eps:
                        room[b] -= sizes_sorted[i]
                        break
                else:
                    room[nb] = 1.0 - sizes_sorted[i]
                    nb += 1
    finally:
        free(room)
    return nb


cdef inline void _sift_up(double *key, long *node, long i) noexcept nogil:
    cdef long p
    cdef double tk
    cdef long tn
    while i > 0:
        p = (i - 1) >> 1
        if key[p] <= key[i]:
            break
        tk = key[p]; key[p] = key[i]; key[i] = tk
        tn = node[p]; node[p] = node[i]; node[i] = tn
        i = p


cdef inline void _sift_down(double *key, long *node, long size) noexcept nogil:
    cdef long i = 0, c
    cdef double tk
    cdef long tn
    while True:
        c = 2 * i + 1
        if c >= size:
            break
        if c + 1 < size and key[c + 1] < key[c]:
            c += 1
        if key[i] <= key[c]:
            break
        tk = key[c]; key[c] = key[i]; key[i] = tk
        tn = node[c]; node[c] = node[i]; node[i] = tn
        i = c


def grid_passage_time(const double[:, ::1] wh, const double[:, ::1] wv, long si, long sj, long ti, long tj):
    """Dijkstra on a rectangular grid with a binary heap (lazy deletion).

    Node (i, j) for 0 <= i < H, 0 <= j < W.  ``wh[i, j]`` weights the edge
    (i, j)-(i+1, j), ``wv[i, j]`` the edge (i, j)-(i, j+1).
    """
    cdef long H = wv.shape[0], W = wh.shape[1]
    cdef long n = H * W, cap = 4 * H * W + 1, size = 0
    cdef long u, i, j, v, target = ti * W + tj
    cdef double du, nd, w
    cdef double *dist = <double *> malloc(n * sizeof(double))
    cdef char *done = <char *> malloc(n)
    cdef double *key = <double *> malloc(cap * sizeof(double))
    cdef long *node = <long *> malloc(cap * sizeof(long))
    cdef long nbr[4]
    cdef double nw[4]
    cdef int q, deg
    try:
        with nogil:
            for u in range(n):
                dist[u] = INFINITY
                done[u] = 0
            dist[si * W + sj] = 0.0
            key[0] = 0.0
            node[0] = si * W + sj
            size = 1
            while size > 0:
                du = key[0]
                u = node[0]
                size -= 1
                key[0] = key[size]
                node[0] = node[size]
                _sift_down(key, node, size)
                if done[u]:
                    continue
                done[u] = 1
                if u == target:
                    break
                i = u // W
                j = u % W
                deg = 0
                if i > 0:
                    nbr[deg] = u - W; nw[deg] = wh[i - 1, j]; deg += 1
                if i + 1 < H:
                    nbr[deg] = u + W; nw[deg] = wh[i, j]; deg += 1
                if j > 0:
                    nbr[deg] = u - 1; nw[deg] = wv[i, j - 1]; deg += 1
                if j + 1 < W:
                    nbr[deg] = u + 1; nw[deg] = wv[i, j]; deg += 1
                for q in range(deg):
                    v = nbr[q]
                    nd = du + nw[q]
                    if not done[v] and nd < dist[v]:
                        dist[v] = nd
                        key[size] = nd
                        node[size] = v
                        size += 1
                        _sift_up(key, node, size - 1)
            du = dist[target]
    finally:
        free(dist)
        free(done)
        free(key)
        free(node)
    return du
