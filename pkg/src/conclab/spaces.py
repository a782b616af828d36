"""Finite product probability spaces, events and reproducible sampling.

Points of a product space are enumerated in mixed-radix order with the last
coordinate varying fastest, so the point ``(x_1, ..., x_N)`` has index
``sum_i x_i * prod_{j>i} size_j``.  Events on enumerable spaces are stored as
bitsets over that order.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

ENUMERATION_CAP = 2**24
_RENORM_TOL = 1e-9


class TooLargeError(ValueError):
    """Raised when a space is too large to enumerate under the active cap."""


@dataclass(frozen=True)
class FiniteSpace:
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.weights) == 0:
            raise ValueError("a factor needs at least one symbol")
        if any(not w > 0 for w in self.weights):
            raise ValueError(f"weights must be positive, got {self.weights}")
        if abs(math.fsum(self.weights) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")

    @property
    def size(self) -> int:
        return len(self.weights)


@dataclass(frozen=True)
class ProductSpace:
    factors: tuple[FiniteSpace, ...]
    cap: int = field(default=ENUMERATION_CAP, compare=False)

    def __post_init__(self):
        if len(self.factors) == 0:
            raise ValueError("a product space needs at least one factor")

    @property
    def N(self) -> int:
        return len(self.factors)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(f.size for f in self.factors)

    @property
    def n_points(self) -> int:
        return math.prod(self.sizes)

    @property
    def is_binary(self) -> bool:
        return all(s == 2 for s in self.sizes)

    @property
    def enumerable(self) -> bool:
        return self.n_points <= self.cap

    def check_enumerable(self):
        if not self.enumerable:
            raise TooLargeError(
                f"space has {self.n_points} points, too large to enumerate (cap {self.cap})"
            )

    @cached_property
    def _radix(self) -> np.ndarray:
        r = np.ones(self.N, dtype=np.int64)
        for i in range(self.N - 2, -1, -1):
            r[i] = r[i + 1] * self.sizes[i + 1]
        return r

    def index_of(self, x: Sequence[int]) -> int:
        self.check_point(x)
        return int(np.dot(np.asarray(x, dtype=np.int64), self._radix))

    def point_of(self, index: int) -> tuple[int, ...]:
        out = []
        for r, s in zip(self._radix, self.sizes):
            out.append(int(index // r) % s)
        return tuple(out)

    def check_point(self, x: Sequence[int]):
        if len(x) != self.N:
            raise ValueError(f"point has {len(x)} coordinates, space has {self.N}")
        for i, (xi, s) in enumerate(zip(x, self.sizes)):
            if not 0 <= xi < s:
                raise ValueError(f"coordinate {i} = {xi} out of range for alphabet of size {s}")

    @cached_property
    def _masses(self) -> np.ndarray:
        self.check_enumerable()
        m = np.ones(1)
        for f in self.factors:
            m = np.multiply.outer(m, np.asarray(f.weights)).ravel()
        return m

    def masses(self) -> np.ndarray:
        """Product masses of all points in enumeration order (read-only)."""
        m = self._masses
        m.flags.writeable = False
        return m

    @cached_property
    def _points(self) -> np.ndarray:
        self.check_enumerable()
        grids = np.indices(self.sizes).reshape(self.N, -1).T
        return np.ascontiguousarray(grids, dtype=np.int64)

    def points(self) -> np.ndarray:
        """All points as an ``(n_points, N)`` integer array in enumeration order."""
        p = self._points
        p.flags.writeable = False
        return p

    def point_mass(self, x: Sequence[int]) -> float:
        return math.prod(f.weights[xi] for f, xi in zip(self.factors, x))

    def describe(self) -> dict:
        return {"kind": "product", "factors": [list(f.weights) for f in self.factors]}


class SymmetricGroup:
    """The symmetric group S_N with its uniform probability.

    Permutations are tuples of images of ``1..N``, enumerated in
    lexicographic order.
    """

    def __init__(self, N: int):
        if N < 1:
            raise ValueError("N must be at least 1")
        if math.factorial(N) > ENUMERATION_CAP:
            raise TooLargeError(f"S_{N} has {math.factorial(N)} elements, too large to enumerate")
        self.N = N
        self._perms = np.array(list(itertools.permutations(range(1, N + 1))), dtype=np.int64)
        self._lookup = {tuple(p): i for i, p in enumerate(self._perms.tolist())}
        self._mass = np.full(len(self._perms), 1.0 / len(self._perms))
        self._mass.flags.writeable = False
        self._perms.flags.writeable = False

    enumerable = True

    @property
    def n_points(self) -> int:
        return len(self._perms)

    def points(self) -> np.ndarray:
        return self._perms

    def masses(self) -> np.ndarray:
        return self._mass

    def check_enumerable(self):
        pass

    def check_point(self, x: Sequence[int]):
        if tuple(x) not in self._lookup:
            raise ValueError(f"{tuple(x)} is not a permutation of 1..{self.N}")

    def index_of(self, x: Sequence[int]) -> int:
        self.check_point(x)
        return self._lookup[tuple(x)]

    def point_of(self, index: int) -> tuple[int, ...]:
        return tuple(int(v) for v in self._perms[index])

    def describe(self) -> dict:
        return {"kind": "symmetric-group", "N": self.N}


class Event:
    """A nonempty subset of a finite space with its cached measure.

    On enumerable spaces the members are kept as a bitset (a Python int over
    the enumeration order); otherwise as a sorted tuple of points.
    """

    __slots__ = ("space", "mask", "_points", "measure")

    def __init__(self, space, *, mask: int | None = None, points: Iterable[Sequence[int]] | None = None):
        if (mask is None) == (points is None):
            raise ValueError("give exactly one of mask or points")
        self.space = space
        if points is not None:
            pts = sorted({tuple(int(v) for v in p) for p in points})
            for p in pts:
                space.check_point(p)
            if space.enumerable:
                mask = 0
                for p in pts:
                    mask |= 1 << space.index_of(p)
                self.mask, self._points = mask, None
            else:
                self.mask, self._points = None, tuple(pts)
        else:
            space.check_enumerable()
            if mask <= 0 or mask >> space.n_points:
                raise ValueError("mask must be a nonempty subset of the enumeration range")
            self.mask, self._points = int(mask), None
        if self.mask == 0 or (self._points is not None and not self._points):
            raise ValueError("events must be nonempty")
        self.measure = _measure(space, self)
        if not 0 < self.measure <= 1 + 1e-12:
            raise ValueError(f"event measure {self.measure} outside (0, 1]")

    def indices(self) -> np.ndarray:
        """Enumeration indices of the members, increasing."""
        if self.mask is None:
            raise TooLargeError("event on a non-enumerable space has no index form")
        return mask_to_indices(self.mask)

    def members(self) -> list[tuple[int, ...]]:
        if self._points is not None:
            return list(self._points)
        return [self.space.point_of(int(i)) for i in self.indices()]

    def member_array(self) -> np.ndarray:
        if self._points is not None:
            return np.array(self._points, dtype=np.int64)
        return self.space.points()[self.indices()]

    def __contains__(self, x) -> bool:
        if self._points is not None:
            return tuple(x) in self._points
        return bool(self.mask >> self.space.index_of(x) & 1)

    def __len__(self) -> int:
        if self._points is not None:
            return len(self._points)
        return self.mask.bit_count()

    def __eq__(self, other):
        return isinstance(other, Event) and self.space == other.space and self.mask == other.mask and self._points == other._points

    def __hash__(self):
        return hash((self.mask, self._points))

    def __repr__(self):
        return f"Event(size={len(self)}, measure={self.measure:.6g})"


def mask_to_indices(mask: int) -> np.ndarray:
    nbytes = (mask.bit_length() + 7) // 8
    bits = np.unpackbits(np.frombuffer(mask.to_bytes(nbytes, "little"), dtype=np.uint8), bitorder="little")
    return np.flatnonzero(bits)


def indices_to_mask(indices: Iterable[int]) -> int:
    idx = np.asarray(list(indices) if not isinstance(indices, np.ndarray) else indices, dtype=np.int64)
    if idx.size == 0:
        return 0
    bits = np.zeros(int(idx.max()) + 1, dtype=np.uint8)
    bits[idx] = 1
    return int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little")


def _measure(space, A: Event) -> float:
    if A._points is not None:
        return math.fsum(space.point_mass(p) for p in A._points)
    return math.fsum(space.masses()[A.indices()])


def make_space(weight_vectors: Sequence[Sequence[float]], cap: int = ENUMERATION_CAP) -> ProductSpace:
    """Build a product space from one probability vector per coordinate.

    Vectors summing to 1 within 1e-9 are renormalized; larger deviations,
    empty vectors and non-positive entries are errors.
    """
    if len(weight_vectors) == 0:
        raise ValueError("empty factor list")
    factors = []
    for i, w in enumerate(weight_vectors):
        w = [float(v) for v in w]
        if not w:
            raise ValueError(f"factor {i} is empty")
        if any(not v > 0 for v in w):
            raise ValueError(f"factor {i} has a non-positive weight: {w}")
        total = math.fsum(w)
        if abs(total - 1.0) > _RENORM_TOL:
            raise ValueError(f"factor {i} weights sum to {total!r}, not 1")
        factors.append(FiniteSpace(tuple(v / total for v in w)))
    return ProductSpace(tuple(factors), cap=cap)


def measure_of(space, A: Event) -> float:
    """P(A): the sum of product weights over the members of A."""
    if A.space != space:
        raise ValueError("event belongs to a different space")
    return A.measure


def enumerate_points(space, cap: int | None = None) -> Iterator[tuple[tuple[int, ...], float]]:
    """Yield ``(point, mass)`` for every point in enumeration order."""
    n = space.n_points
    limit = space.cap if cap is None and hasattr(space, "cap") else (cap or ENUMERATION_CAP)
    if n > limit:
        raise TooLargeError(f"space has {n} points, too large to enumerate (cap {limit})")
    if isinstance(space, ProductSpace):
        weights = [f.weights for f in space.factors]
        for x in itertools.product(*(range(s) for s in space.sizes)):
            yield x, math.prod(w[xi] for w, xi in zip(weights, x))
    else:
        for p, m in zip(space.points(), space.masses()):
            yield tuple(int(v) for v in p), float(m)


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Counter-based stream for (master seed, trial index).

    The Philox key is the pair itself, so a trial's draws do not depend on
    how trials are distributed across workers.
    """
    if seed < 0 or index < 0:
        raise ValueError("seed and index must be nonnegative")
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_point(space: ProductSpace, rng: np.random.Generator) -> tuple[int, ...]:
    return tuple(int(v) for v in sample_points(space, rng, 1)[0])


def sample_points(space: ProductSpace, rng: np.random.Generator, n: int) -> np.ndarray:
    """``n`` independent points, coordinates drawn from the factor weights."""
    u = rng.random((n, space.N))
    out = np.empty((n, space.N), dtype=np.int64)
    for i, f in enumerate(space.factors):
        cdf = np.cumsum(f.weights)
        cdf[-1] = np.inf
        out[:, i] = np.searchsorted(cdf, u[:, i], side="right")
    return out


# -- file formats -------------------------------------------------------------

_PREDICATES = ("sum-le-k", "sum-ge-k", "singleton")


def space_from_json(obj) -> ProductSpace:
    if isinstance(obj, str):
        obj = json.loads(obj)
    if "factors" not in obj:
        raise ValueError('space description needs a "factors" list')
    return make_space(obj["factors"])


def parse_space(text: str):
    """Parse a space shorthand or JSON file path.

    Shorthands: ``uniformK^N``, ``bernoulliP^N`` (weight P on symbol 1),
    ``S_N`` (symmetric group).
    """
    import re

    m = re.fullmatch(r"uniform(\d+)\^(\d+)", text)
    if m:
        k, n = int(m.group(1)), int(m.group(2))
        return make_space([[1.0 / k] * k] * n)
    m = re.fullmatch(r"bernoulli([0-9.]+)\^(\d+)", text)
    if m:
        p, n = float(m.group(1)), int(m.group(2))
        return make_space([[1 - p, p]] * n)
    m = re.fullmatch(r"S_?(\d+)", text)
    if m:
        return SymmetricGroup(int(m.group(1)))
    if text.lstrip().startswith("{"):
        return space_from_json(text)
    with open(text) as fh:
        return space_from_json(json.load(fh))


def event_from_json(space, obj) -> Event:
    """``{"points": [[...], ...]}`` or ``{"predicate": name, ...}``."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if "points" in obj:
        return Event(space, points=obj["points"])
    name = obj.get("predicate")
    if name not in _PREDICATES:
        raise ValueError(f"unknown predicate {name!r}; builtins are {_PREDICATES}")
    if name == "singleton":
        return Event(space, points=[obj["point"]])
    k = obj["k"]
    sums = space.points().sum(axis=1)
    keep = sums <= k if name == "sum-le-k" else sums >= k
    if not keep.any():
        raise ValueError(f"predicate {name} with k={k} selects no point")
    return Event(space, mask=indices_to_mask(np.flatnonzero(keep)))
