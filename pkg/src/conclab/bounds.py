"""Closed-form evaluators for the exponential-moment and tail bounds.

Every evaluator returns a :class:`BoundValue` carrying the equation id (the
stable contract used by the CLI and the reports), the parameters it was
called with and a note when the parameters fall outside the range where the
inequality is asserted.  Out-of-range calls never raise; sweeps need total
functions.

Universal constants that are not pinned down numerically are explicit
parameters: ``K`` of the two-point tail (default 0, leading term only) and
``q0`` of the large-q tail (default 64, a guess).
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

DEFAULT_Q0 = 64


@dataclass(frozen=True)
class BoundQuery:
    N: int | None = None
    pA: float | None = None
    t: float | None = None
    k: float | None = None
    u: float | None = None
    alpha: float | None = None
    q: int | None = None
    p: float | None = None
    p1: float | None = None
    profile: tuple[float, ...] | None = None
    K: float | None = None
    q0: int | None = None

    def __post_init__(self):
        if self.pA is not None and not 0 < self.pA <= 1:
            raise ValueError(f"pA must be in (0, 1], got {self.pA}")
        if self.t is not None and self.t < 0:
            raise ValueError("t must be nonnegative")
        if self.alpha is not None and self.alpha < 1:
            raise ValueError("alpha must be at least 1")
        if self.q is not None and self.q < 2:
            raise ValueError("q must be at least 2")

    def snapshot(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self).items() if v is not None}


@dataclass(frozen=True)
class BoundValue:
    equation: str
    params: dict
    value: float
    note: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def vacuous(self) -> bool:
        return self.value >= 1.0

    def to_dict(self) -> dict:
        d = {"equation": self.equation, "params": self.params, "value": self.value, "note": self.note}
        if self.extra:
            d["extra"] = self.extra
        return d


def _q(**kw) -> dict:
    return BoundQuery(**kw).snapshot()


def _notes(*parts: str) -> str:
    return "; ".join(p for p in parts if p)


def _tail_note(value: float) -> str:
    return "vacuous" if value >= 1.0 else ""


def _log_inv(pA: float) -> float:
    return -math.log(pA)


# -- one point control ----------------------------------------------------------

def a_of_t(t: float) -> float:
    """Per-coordinate factor 1/2 + (e^t + e^-t)/4 of the Hamming moment bound."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    return 0.5 + math.cosh(t) / 2


def hamming_moment(N: int, pA: float, t: float, profile: Sequence[float] | None = None) -> BoundValue:
    """Bound on E exp(t f(A, .)): a(t)^N / P(A), or the weighted form."""
    if profile is None:
        val = a_of_t(t) ** N / pA
        return BoundValue("2.1.2", _q(N=N, pA=pA, t=t), val)
    s2 = math.fsum(a * a for a in profile)
    val = math.exp(t * t * s2 / 4) / pA
    return BoundValue("2.1.8", _q(pA=pA, t=t, profile=tuple(profile)), val)


def hamming_tail(pA: float, k: float | None = None, N: int | None = None,
                 profile: Sequence[float] | None = None, u: float | None = None) -> BoundValue:
    """P(f(A, .) >= k) <= exp(-k^2/N)/P(A); weighted: exp(-u^2/sum a_i^2)/P(A)."""
    if profile is None:
        if k is None or N is None:
            raise ValueError("unit-weight tail needs N and k")
        if k < 0:
            raise ValueError("k must be nonnegative")
        val = math.exp(-k * k / N) / pA
        return BoundValue("2.1.3", _q(N=N, pA=pA, k=k), val, _tail_note(val))
    if u is None:
        raise ValueError("weighted tail needs u")
    s2 = math.fsum(a * a for a in profile)
    val = math.exp(-u * u / s2) / pA
    return BoundValue("2.1.9", _q(pA=pA, u=u, profile=tuple(profile)), val, _tail_note(val))


def sharpened_moment(N: int, pA: float, t: float, alpha: float) -> BoundValue:
    val = pA ** (-alpha) * math.exp(N * t * t / 8 * (1 + 1 / alpha))
    return BoundValue("2.2.6", _q(N=N, pA=pA, t=t, alpha=alpha), val)


def sharpened_tail(N: int, pA: float, k: float) -> BoundValue:
    """exp(-(2/N)(k - sqrt(N/2 log 1/P(A)))^2), with the optimizing alpha."""
    thr = math.sqrt(N / 2 * _log_inv(pA))
    val = math.exp(-2 / N * (k - thr) ** 2)
    note = "" if k >= thr else f"out of stated range: requires k >= {thr:.6g}"
    extra = {}
    if pA < 1:
        extra["alpha_opt"] = -1 + math.sqrt(2 * k * k / (N * _log_inv(pA)))
    if k < thr:
        val = 1.0 if val > 1 else val
    return BoundValue("2.2.7", _q(N=N, pA=pA, k=k), val, _notes(note, _tail_note(val)), extra)


# -- two point space ---------------------------------------------------------------

def two_point_b(alpha: float, t: float, p: float) -> float:
    """Per-coordinate factor of the two-point moment bound; symmetric in p <-> 1-p."""
    if not 0 < p < 1:
        raise ValueError("p must be in (0, 1)")
    if alpha < 1 or t < 0:
        raise ValueError("need alpha >= 1 and t >= 0")
    if p < 0.5:
        p = 1 - p
    return ((1 - p) * math.exp(t) + p) * (p + (1 - p) * math.exp(-t / alpha)) ** alpha


def two_point_moment(N: int, pA: float, t: float, alpha: float, p: float) -> BoundValue:
    val = two_point_b(alpha, t, p) ** N / pA**alpha
    return BoundValue("2.3.1", _q(N=N, pA=pA, t=t, alpha=alpha, p=p), val)


def two_point_tail(N: int, pA: float, k: float, p: float, K: float = 0.0) -> BoundValue:
    """Two-point tail with the cubic correction constant K left to the caller."""
    v = p * (1 - p)
    lo, hi = math.sqrt(4 * v * N * _log_inv(pA)), v * N
    expo = -(k - math.sqrt(2 * v * N * _log_inv(pA))) ** 2 / (2 * v * N) + K * k**3 / (v**3 * N**2)
    val = math.exp(expo)
    notes = []
    if K == 0:
        notes.append("leading term only (K=0)")
    if not lo <= k <= hi:
        notes.append(f"out of stated range [{lo:.6g}, {hi:.6g}]")
    return BoundValue("2.3.5", _q(N=N, pA=pA, k=k, p=p, K=K), val, _notes(*notes, _tail_note(val)))


def one_sided_moment_base(p: float, p1: float) -> float:
    """Base p1(1-p)/(p(1-p1)) of the dimension-free one-sided moment bound."""
    if not 0 < p < p1 < 1:
        raise ValueError(f"need 0 < p < p1 < 1, got p={p}, p1={p1}")
    return p1 * (1 - p) / (p * (1 - p1))


def one_sided_factor(alpha: float, t: float, p: float, p1: float) -> float:
    return max(1.0, (1 - p + p * math.exp(t)) * (p1 * math.exp(-t / alpha) + 1 - p1) ** alpha)


def one_sided_moment(N: int, p1A: float, t: float, alpha: float, p: float, p1: float) -> BoundValue:
    """a(alpha, t)^N / P_1(A)^alpha; note P_1 is the product measure with bias p1."""
    if not p < p1:
        raise ValueError("need p < p1")
    val = one_sided_factor(alpha, t, p, p1) ** N / p1A**alpha
    return BoundValue("2.3.6", _q(N=N, pA=p1A, t=t, alpha=alpha, p=p, p1=p1), val)


# -- penalties -----------------------------------------------------------------------

class IntegrabilityError(ValueError):
    pass


def _pair_mean(kernel, fn) -> float:
    w = np.asarray(kernel.weights)
    return float(w @ fn(np.asarray(kernel.h, dtype=float)) @ w)


def penalty_moment(kernel, N: int, pA: float, t: float) -> BoundValue:
    """Exact finite-alphabet right-hand side (1/P(A)) (1/2 E[e^{tv} + e^{-tv}])^N."""
    h = np.asarray(kernel.h, dtype=float)
    v = np.maximum(h, h.T)
    w = np.asarray(kernel.weights)
    inner = 0.5 * float(w @ (np.exp(t * v) + np.exp(-t * v)) @ w)
    return BoundValue("2.4.4", _q(N=N, pA=pA, t=t), inner**N / pA)


def penalty_moment_simple(kernel, N: int, pA: float, t: float) -> BoundValue:
    c = _pair_mean(kernel, lambda h: np.exp(h) + np.exp(-h) - 2)
    val = math.exp(N * t * t * c) / pA
    return BoundValue("2.4.11", _q(N=N, pA=pA, t=t), val, "" if t <= 1 else "out of stated range: requires t <= 1")


def penalty_integral(kernel) -> float:
    """The double integral of e^h under mu x mu."""
    return _pair_mean(kernel, np.exp)


def penalty_tail(kernel, N: int, pA: float, u: float) -> BoundValue:
    """(1/P(A)) e^{-u^2/4N}; requires the double integral of e^h to be at most 2."""
    integral = penalty_integral(kernel)
    if integral > 2 + 1e-12:
        raise IntegrabilityError(f"double integral of exp(h) is {integral!r} > 2")
    val = math.exp(-u * u / (4 * N)) / pA
    note = "" if u <= 2 * N else "out of stated range: requires u <= 2N"
    return BoundValue("2.4.13", _q(N=N, pA=pA, u=u), val, _notes(note, _tail_note(val)), {"integral": integral})


def penalty_bernstein(kernel, N: int, pA: float, u: float) -> BoundValue:
    n2, ninf = kernel.norm2, kernel.normInf
    if not math.isfinite(ninf):
        raise IntegrabilityError("kernel sup norm must be finite")
    if n2 == 0:
        val = 0.0 if u > 0 else 1 / pA
    else:
        val = math.exp(-min(u * u / (8 * N * n2 * n2), u / (2 * ninf))) / pA
    return BoundValue("2.4.14", _q(N=N, pA=pA, u=u), val, _tail_note(val))


def penalty_bounds(kernel, N: int, pA: float, t: float | None = None, u: float | None = None) -> list[BoundValue]:
    """Every penalty bound applicable to the given parameters."""
    out = []
    if t is not None:
        out.append(penalty_moment(kernel, N, pA, t))
        out.append(penalty_moment_simple(kernel, N, pA, t))
    if u is not None:
        out.append(penalty_tail(kernel, N, pA, u))
        out.append(penalty_bernstein(kernel, N, pA, u))
    return out


# -- control by q points -----------------------------------------------------------

def solve_a_q_alpha(q: float, alpha: float) -> float:
    """The root x > 1 of x + q alpha x^(-1/alpha) = 1 + q alpha, by bisection."""
    if q < 2 or alpha < 1:
        raise ValueError("need q >= 2 and alpha >= 1")
    qa = q * alpha

    def g(x):
        return x + qa * x ** (-1 / alpha) - 1 - qa

    lo, hi = 1 + 1e-9, 1 + qa
    if not (g(lo) < 0 < g(hi)):
        raise ArithmeticError(f"no sign change on [{lo}, {hi}] for q={q}, alpha={alpha}")
    while hi - lo > 1e-12 * hi:
        mid = 0.5 * (lo + hi)
        if g(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def q_point_moment(pAs: Sequence[float], alpha: float = 1.0) -> BoundValue:
    """Right-hand side 1/prod P(A_i)^alpha; base q (alpha=1) or a(q, alpha)."""
    val = math.prod(pAs) ** (-alpha)
    eq = "3.1.2" if alpha == 1 else "3.2.1"
    return BoundValue(eq, {"pA": list(pAs), "q": len(pAs), "alpha": alpha}, val)


def _alpha_grid() -> np.ndarray:
    return 2.0 ** (np.arange(81) / 8)


def q_point_tail(q: int, k: float, pA: float, variant: str = "basic", q0: int = DEFAULT_Q0) -> BoundValue:
    """Tail of the q-point distance: basic, sharpened (alpha optimized) or large-q."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if variant == "basic":
        val = q ** (-k) * pA ** (-q)
        return BoundValue("3.1.3", _q(q=q, k=k, pA=pA), val, _tail_note(val))
    if variant == "sharpened":
        log_obj = lambda a: -k * math.log(solve_a_q_alpha(q, a)) - q * a * math.log(pA)
        grid = _alpha_grid()
        vals = [log_obj(a) for a in grid]
        j = int(np.argmin(vals))
        best_a, best = grid[j], vals[j]
        lo, hi = grid[max(j - 1, 0)], grid[min(j + 1, len(grid) - 1)]
        if hi > lo:
            from scipy.optimize import minimize_scalar

            res = minimize_scalar(log_obj, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
            if res.fun < best:
                best_a, best = float(res.x), float(res.fun)
        val = math.exp(best)
        return BoundValue("3.2.3", _q(q=q, k=k, pA=pA), val, _tail_note(val), {"alpha_opt": best_a})
    if variant == "large-q":
        lq = q * math.log(q)
        val = (math.e / ((math.e - 1) * lq)) ** k * pA ** (-lq)
        note = f"valid for q >= q0 (q0={q0}, unspecified universal constant)"
        if q < q0:
            note += "; q below q0"
        return BoundValue("3.2.4", _q(q=q, k=k, pA=pA, q0=q0), val, _notes(note, _tail_note(val)))
    raise ValueError(f"unknown variant {variant!r}")


# -- convex hull -----------------------------------------------------------------------

_SERIES_GUARD = 1e-15


def _xlogx(v: float) -> float:
    return 0.0 if v < _SERIES_GUARD else v * math.log(v)


def xi(alpha: float, u: float) -> float:
    """alpha(1-u)log(1-u) - (alpha+1-alpha u) log((1+alpha-alpha u)/(1+alpha))."""
    if not 0 <= u <= 1:
        raise ValueError(f"u must be in [0, 1], got {u}")
    c = 1 + alpha - alpha * u
    return alpha * _xlogx(1 - u) - c * math.log(c / (1 + alpha))


def xi_prime(alpha: float, u: float) -> float:
    """d xi/du; diverges at u = 1, so u is clamped to 1 - 1e-12."""
    u = min(u, 1 - 1e-12)
    return alpha * math.log((1 + alpha - alpha * u) / ((1 + alpha) * (1 - u)))


def xi_vec(alpha: float, u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    one_minus = 1 - u
    with np.errstate(divide="ignore", invalid="ignore"):
        xl = np.where(one_minus < _SERIES_GUARD, 0.0, one_minus * np.log(np.maximum(one_minus, _SERIES_GUARD)))
    c = 1 + alpha - alpha * u
    return alpha * xl - c * np.log(c / (1 + alpha))


def xi_prime_vec(alpha: float, u: np.ndarray) -> np.ndarray:
    u = np.minimum(np.asarray(u, dtype=float), 1 - 1e-12)
    return alpha * np.log((1 + alpha - alpha * u) / ((1 + alpha) * (1 - u)))


def xi_second_vec(alpha: float, u: np.ndarray) -> np.ndarray:
    u = np.minimum(np.asarray(u, dtype=float), 1 - 1e-12)
    return alpha / ((1 + alpha - alpha * u) * (1 - u))


def convex_moment(pA: float, variant: str = "basic", alpha: float = 1.0) -> BoundValue:
    """Right-hand sides of the convex-hull moment bounds (all equal P(A)^-alpha)."""
    eq = {"basic": "4.1.2", "xi": "4.2.5", "two-point-uniform": "4.3.7", "perm": "5.2"}[variant]
    a = 1.0 if variant in ("basic", "perm") else alpha
    return BoundValue(eq, _q(pA=pA, alpha=a), pA ** (-a))


def convex_tail(pA: float, t: float, variant: str = "basic", alpha: float | None = None) -> BoundValue:
    """Upper bounds on P(f_c(A, .) >= t) = 1 - P(A^c_t)."""
    L = _log_inv(pA)
    if variant == "basic":
        val = math.exp(-t * t / 4) / pA
        return BoundValue("4.1.3", _q(pA=pA, t=t), val, _tail_note(val))
    if variant == "alpha":
        a = alpha if alpha is not None else 1.0
        val = pA ** (-a) * math.exp(-a * t * t / (2 * (a + 1)))
        return BoundValue("4.2.6", _q(pA=pA, t=t, alpha=a), val, _tail_note(val))
    if variant == "optimized":
        thr = math.sqrt(2 * L)
        val = math.exp(-0.5 * (t - thr) ** 2)
        note = "" if t >= thr else f"out of stated range: requires t >= {thr:.6g}"
        return BoundValue("4.2.7", _q(pA=pA, t=t), val, _notes(note, _tail_note(val)))
    if variant == "two-point-uniform":
        a = alpha if alpha is not None else 1.0
        val = pA ** (-a) * math.exp(-a * t * t / (a + 1))
        return BoundValue("4.3.7", _q(pA=pA, t=t, alpha=a), val, _notes("uniform {0,1} factors only", _tail_note(val)))
    if variant == "two-point-optimized":
        thr = math.sqrt(L)
        val = math.exp(-((t - thr) ** 2))
        note = "" if t >= thr else f"out of stated range: requires t >= {thr:.6g}"
        return BoundValue("4.3.8", _q(pA=pA, t=t), val, _notes("uniform {0,1} factors only", note, _tail_note(val)))
    raise ValueError(f"unknown variant {variant!r}")
