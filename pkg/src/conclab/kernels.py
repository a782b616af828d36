"""Backend selection for the hot loops.

The compiled extension is used when importable; setting CONCLAB_PURE=1
forces the pure-Python fallback.
"""
from __future__ import annotations

import os

import numpy as np

from . import _fallback

if os.environ.get("CONCLAB_PURE", "") not in ("", "0"):
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _fallback
        BACKEND = "python"


def backend(name: str | None = None):
    """The module implementing the kernels; ``name`` picks one explicitly."""
    if name is None:
        return _impl
    if name == "python":
        return _fallback
    if name == "compiled":
        from . import _kernels

        return _kernels
    raise ValueError(f"unknown backend {name!r}")


def subset_sweep(E, m, mr, which, alpha, C, rel_tol=1e-9, impl=None):
    impl = impl or _impl
    return impl.subset_sweep(
        np.ascontiguousarray(E, dtype=np.float64),
        np.ascontiguousarray(m, dtype=np.float64),
        np.ascontiguousarray(mr, dtype=np.float64),
        np.ascontiguousarray(which, dtype=np.int64),
        np.ascontiguousarray(alpha, dtype=np.float64),
        np.ascontiguousarray(C, dtype=np.float64),
        float(rel_tol),
    )


def lis_length(seq, impl=None) -> int:
    impl = impl or _impl
    if impl is _fallback:
        return impl.lis_length(np.asarray(seq, dtype=np.float64).tolist())
    return impl.lis_length(np.ascontiguousarray(seq, dtype=np.float64))


def lcs_length(a, b, impl=None) -> int:
    impl = impl or _impl
    a = np.ascontiguousarray(_codes(a), dtype=np.int64)
    b = np.ascontiguousarray(_codes(b), dtype=np.int64)
    if impl is _fallback:
        return impl.lcs_length(a.tolist(), b.tolist())
    syms, codes = np.unique(np.concatenate([a, b]), return_inverse=True)
    codes = codes.astype(np.int64)
    return impl.lcs_length(codes[:a.size], codes[a.size:], syms.size)


def _codes(s):
    if isinstance(s, str):
        return [ord(c) for c in s]
    return s


def ffd_bins(sizes, impl=None) -> int:
    impl = impl or _impl
    s = np.sort(np.asarray(sizes, dtype=np.float64))[::-1]
    if impl is _fallback:
        return impl.ffd_bins(s.tolist())
    return impl.ffd_bins(np.ascontiguousarray(s))


def grid_passage_time(wh, wv, src, dst, impl=None) -> float:
    impl = impl or _impl
    return float(impl.grid_passage_time(
        np.ascontiguousarray(wh, dtype=np.float64), np.ascontiguousarray(wv, dtype=np.float64),
        int(src[0]), int(src[1]), int(dst[0]), int(dst[1]),
    ))
