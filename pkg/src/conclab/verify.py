"""Exact and Monte Carlo checks of the moment and tail inequalities.

Exact checks enumerate the space: for an event A the left-hand side
``sum_x P{x} phi(f(A, x))`` is summed with ``math.fsum`` and compared to the
closed-form right-hand side.  Monte Carlo checks draw one counter-based RNG
stream per trial, so results do not depend on how trials are split across
workers.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from . import bounds, distances, kernels
from .spaces import Event, ProductSpace, SymmetricGroup, indices_to_mask, trial_rng

SLACK_TOL = 1e-9
ALL_EVENTS_CAP = 2**20
KERNEL_EVENTS_CAP = 2**30
CONFIDENCE = 0.99
CHUNK = 500


# -- functionals ------------------------------------------------------------------

@dataclass(frozen=True)
class Functional:
    """A distance id and its parameters, e.g. ``Functional("penalty", kernel=k)``."""

    name: str
    profile: tuple | None = None
    kernel: object = None

    MIN_TYPE = ("hamming", "one-sided", "penalty")

    @property
    def min_type(self) -> bool:
        return self.name in self.MIN_TYPE


def pair_matrix(space, fn: Functional) -> np.ndarray:
    """D[x, y] for a functional of the form min over y in A of d(x, y)."""
    X = space.points()
    if fn.name == "hamming":
        diff = (X[:, None, :] != X[None, :, :]).astype(float)
        a = np.ones(space.N) if fn.profile is None else np.asarray(fn.profile, dtype=float)
        return diff @ a
    if fn.name == "one-sided":
        if not space.is_binary:
            raise ValueError("one-sided distance needs two-point factors")
        return ((X[:, None, :] == 1) & (X[None, :, :] == 0)).sum(axis=2).astype(float)
    if fn.name == "penalty":
        h = fn.kernel.h
        return h[X[:, None, :], X[None, :, :]].sum(axis=2)
    raise ValueError(f"{fn.name} is not a min-type functional")


def _pattern_matrix(space) -> np.ndarray:
    X = space.points()
    N = X.shape[1]
    return (X[:, None, :] != X[None, :, :]).astype(np.int64) @ (np.int64(1) << np.arange(N, dtype=np.int64))


class _Tables:
    """Per-space caches shared by every event of a sweep."""

    def __init__(self, space, fn: Functional):
        self.space = space
        self.fn = fn
        self.masses = np.asarray(space.masses())
        self._D = None
        self._PM = None

    @property
    def D(self):
        if self._D is None:
            self._D = pair_matrix(self.space, self.fn)
        return self._D

    @property
    def PM(self):
        if self._PM is None:
            self._PM = _pattern_matrix(self.space)
        return self._PM

    def values(self, idx: np.ndarray, alpha: float = 1.0) -> np.ndarray:
        """f(A, x) for every x, A given by its member indices."""
        fn = self.fn
        if fn.min_type:
            return self.D[:, idx].min(axis=1)
        N = self.space.N
        out = np.empty(self.masses.size)
        for x in range(out.size):
            masks = self.PM[x, idx]
            if fn.name in ("convex", "perm"):
                out[x] = distances.convex_value_from_masks(masks, N)
            elif fn.name == "xi":
                out[x] = distances.xi_value_from_masks(masks, N, alpha)
            else:
                raise ValueError(f"unknown functional {fn.name!r}")
        return out


def _moment(masses: np.ndarray, integrand: np.ndarray) -> float:
    return math.fsum((masses * integrand).tolist())


def exact_exp_moment(space, A, functional: Functional | str, t: float | None = None,
                     alpha: float = 1.0, base: float | None = None) -> float:
    """sum_x P{x} phi(f(A, x)), enumerating the space.

    phi is exp(t f) for the Hamming-type distances (or base^f when ``base`` is
    given), exp(t f_c^2) for "convex" (t defaults to 1/4), exp(f_alpha) for
    "xi", exp(t f) for "perm" (t defaults to 1/16) and base^f for "q-point"
    (base defaults to q; A is then a list of events).
    """
    fn = Functional(functional) if isinstance(functional, str) else functional
    space.check_enumerable()
    masses = np.asarray(space.masses())
    if fn.name == "q-point":
        f = q_point_values(space, A)
        b = len(A) if base is None else base
        return _moment(masses, np.power(float(b), f))
    tables = _Tables(space, fn)
    try:
        f = tables.values(A.indices(), alpha)
    except distances.SolverError as exc:
        raise distances.SolverError(f"solver failed on event {A!r}: {exc}", exc.best, exc.gap) from exc
    if base is not None:
        return _moment(masses, np.power(float(base), f))
    if fn.name == "xi":
        return _moment(masses, np.exp(f))
    if t is None:
        t = {"convex": 0.25, "perm": 1 / 16}.get(fn.name)
        if t is None:
            raise ValueError(f"{fn.name} needs t")
    return _moment(masses, np.exp(t * f))


def q_point_values(space, A_list) -> np.ndarray:
    X = space.points()
    members = [A.member_array() for A in A_list]
    return np.array([distances.q_point_distance(None, members, x) for x in X], dtype=float)


# -- equations ---------------------------------------------------------------------

def _binary_bias(space) -> float:
    if not isinstance(space, ProductSpace) or not space.is_binary:
        raise ValueError("this inequality needs two-point factors")
    ps = {round(f.weights[1], 15) for f in space.factors}
    if len(ps) != 1:
        raise ValueError("this inequality needs identical two-point factors")
    return ps.pop()


def _shared_weights(space) -> np.ndarray:
    w = {f.weights for f in space.factors}
    if len(w) != 1:
        raise ValueError("penalty kernels need identical factors")
    return np.asarray(w.pop())


@dataclass(frozen=True)
class Check:
    """One row family of a sweep: phi(f) = coef^f or exp(coef f), rhs = C / Pr(A)^alpha."""

    label: dict
    C: float
    alpha: float = 1.0
    kind: str = "exp"          # "exp": exp(coef f); "base": coef^f; "tail": 1[f >= coef]
    coef: float = 1.0
    rhs_masses: str = "P"      # "P" or "P1"


def equation_checks(eq: str, space, grid: Sequence[float], params: dict) -> tuple[Functional, list[Check]]:
    """The functional and the family of checks asserted by an equation id."""
    N = space.N
    alphas = [float(a) for a in params.get("alphas", [1.0, 2.0])]
    if eq in ("2.1.2", "2.1.3"):
        profile = params.get("profile")
        fn = Functional("hamming", profile=tuple(profile) if profile else None)
        if eq == "2.1.3":
            if profile:
                s2 = math.fsum(a * a for a in profile)
                return fn, [Check({"u": u}, math.exp(-u * u / s2), kind="tail", coef=u) for u in grid]
            return fn, [Check({"k": k}, math.exp(-k * k / N), kind="tail", coef=k) for k in grid]
        if profile:
            s2 = math.fsum(a * a for a in profile)
            return fn, [Check({"t": t}, math.exp(t * t * s2 / 4), coef=t) for t in grid]
        return fn, [Check({"t": t}, bounds.a_of_t(t) ** N, coef=t) for t in grid]
    if eq == "2.2.6":
        fn = Functional("hamming")
        return fn, [Check({"t": t, "alpha": a}, math.exp(N * t * t / 8 * (1 + 1 / a)), alpha=a, coef=t)
                    for t in grid for a in alphas]
    if eq == "2.3.1":
        p = _binary_bias(space)
        fn = Functional("hamming")
        return fn, [Check({"t": t, "alpha": a, "p": p}, bounds.two_point_b(a, t, p) ** N, alpha=a, coef=t)
                    for t in grid for a in alphas]
    if eq in ("2.3.6", "2.3.7"):
        p = _binary_bias(space)
        p1 = float(params["p1"])
        fn = Functional("one-sided")
        if eq == "2.3.7":
            base = bounds.one_sided_moment_base(p, p1)
            return fn, [Check({"p": p, "p1": p1, "base": base}, 1.0, kind="base", coef=base, rhs_masses="P1")]
        return fn, [Check({"t": t, "alpha": a, "p": p, "p1": p1}, bounds.one_sided_factor(a, t, p, p1) ** N,
                          alpha=a, coef=t, rhs_masses="P1") for t in grid for a in alphas]
    if eq in ("2.4.4", "2.4.11", "2.4.13"):
        kernel = params.get("kernel")
        if kernel is None:
            kernel = distances.PenaltyKernel.discrete(_shared_weights(space), float(params.get("c", 1.0)))
        fn = Functional("penalty", kernel=kernel)
        if eq == "2.4.4":
            return fn, [Check({"t": t}, bounds.penalty_moment(kernel, N, 1.0, t).value, coef=t) for t in grid]
        if eq == "2.4.11":
            return fn, [Check({"t": t}, bounds.penalty_moment_simple(kernel, N, 1.0, t).value, coef=t)
                        for t in grid if t <= 1]
        integral = bounds.penalty_integral(kernel)
        if integral > 2 + 1e-12:
            raise bounds.IntegrabilityError(f"double integral of exp(h) is {integral!r} > 2")
        return fn, [Check({"u": u}, math.exp(-u * u / (4 * N)), kind="tail", coef=u) for u in grid if u <= 2 * N]
    if eq in ("3.1.2", "3.2.1"):
        q = int(params.get("q", 2))
        fn = Functional("q-point")
        if eq == "3.1.2":
            return fn, [Check({"q": q}, 1.0, kind="base", coef=float(q))]
        return fn, [Check({"q": q, "alpha": a, "base": bounds.solve_a_q_alpha(q, a)}, 1.0, alpha=a, kind="base",
                          coef=bounds.solve_a_q_alpha(q, a)) for a in alphas]
    if eq == "4.1.2":
        return Functional("convex"), [Check({"coef": 0.25}, 1.0, coef=0.25)]
    if eq == "4.2.5":
        return Functional("xi"), [Check({"alpha": a}, 1.0, alpha=a, coef=1.0) for a in alphas]
    if eq == "4.3.7":
        if _binary_bias(space) != 0.5:
            raise ValueError("4.3.7 needs uniform two-point factors")
        return Functional("convex"), [Check({"alpha": a, "coef": a / (a + 1)}, 1.0, alpha=a, coef=a / (a + 1))
                                      for a in alphas]
    if eq == "5.2":
        if not isinstance(space, SymmetricGroup):
            raise ValueError("5.2 lives on the symmetric group")
        return Functional("perm"), [Check({"coef": 1 / 16}, 1.0, coef=1 / 16)]
    raise ValueError(f"no exact check for equation {eq!r}")


EXACT_EQUATIONS = ("2.1.2", "2.1.3", "2.2.6", "2.3.1", "2.3.6", "2.3.7", "2.4.4", "2.4.11", "2.4.13",
                   "3.1.2", "3.2.1", "4.1.2", "4.2.5", "4.3.7", "5.2")


def _integrand(check: Check, f: np.ndarray) -> np.ndarray:
    if check.kind == "exp":
        return np.exp(check.coef * f)
    if check.kind == "base":
        return np.power(check.coef, f)
    return (f >= check.coef - 1e-12).astype(float)


# -- reports -----------------------------------------------------------------------

def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, separators=(",", ":"))


def rows_to_csv(rows: list[dict]) -> str:
    cols = []
    for r in rows:
        for k in r:
            if k not in cols:
                cols.append(k)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (dumps(v) if isinstance(v, (dict, list)) else _clean(v)) for k, v in r.items()})
    return buf.getvalue()


@dataclass
class ExactCheckReport:
    equation: str
    space: dict
    rows: list
    counterexamples: list
    seed: int = 0
    events: str = ""
    aggregated: bool = False

    @property
    def verdict(self) -> str:
        return "pass" if not self.counterexamples else "fail"

    def to_dict(self) -> dict:
        return {"equation": self.equation, "space": self.space, "events": self.events, "seed": self.seed,
                "aggregated": self.aggregated, "rows": self.rows, "counterexamples": self.counterexamples,
                "verdict": self.verdict}

    def to_json(self) -> str:
        return dumps(self.to_dict())

    def to_csv(self) -> str:
        return rows_to_csv(self.rows)


# -- event sources ----------------------------------------------------------------

_INCLUSION = (0.125, 0.25, 0.5)


def random_event_mask(space, rng: np.random.Generator) -> int:
    """Each point kept independently with probability drawn from {1/8, 1/4, 1/2}."""
    n = space.n_points
    while True:
        p = _INCLUSION[int(rng.integers(3))]
        keep = rng.random(n) < p
        if keep.any():
            return indices_to_mask(np.flatnonzero(keep))


def sample_events(space, n: int, seed: int, q: int = 1) -> list:
    """``n`` reproducible random events (or q-tuples of events)."""
    out = []
    for i in range(n):
        rng = trial_rng(seed, i)
        masks = [random_event_mask(space, rng) for _ in range(q)]
        evs = [Event(space, mask=m) for m in masks]
        out.append(evs[0] if q == 1 else tuple(evs))
    return out


def parse_event_source(src):
    """"all", "random(n, seed)" or an explicit list."""
    if not isinstance(src, str):
        return ("list", list(src))
    s = src.replace(" ", "")
    if s == "all":
        return ("all", None)
    if s.startswith("random(") and s.endswith(")"):
        parts = s[7:-1].split(",")
        if len(parts) != 2:
            raise ValueError(f"bad event source {src!r}; use random(n,seed)")
        return ("random", (int(parts[0]), int(parts[1])))
    raise ValueError(f"bad event source {src!r}")


def _p1_masses(space, p1: float) -> np.ndarray:
    m = np.ones(1)
    for _ in range(space.N):
        m = np.multiply.outer(m, np.array([1 - p1, p1])).ravel()
    return m


def _combined_checks(eq: str, space, grid, params) -> tuple[Functional, list[Check]]:
    """Checks for one id or several joined by '+' that share a functional."""
    parts = eq.split("+")
    fn, checks = None, []
    for part in parts:
        f, cs = equation_checks(part, space, grid, params)
        if fn is not None and (f.name != fn.name or f.profile != fn.profile or f.kernel is not fn.kernel):
            raise ValueError(f"equations {eq!r} do not share a functional")
        if fn is None:
            fn = f
            params = {**params, "kernel": f.kernel} if f.kernel is not None else params
        if len(parts) > 1:
            cs = [Check({"equation": part, **c.label}, c.C, c.alpha, c.kind, c.coef, c.rhs_masses) for c in cs]
        checks += cs
    return fn, checks


def sweep_exact(space, eq: str, grid: Sequence[float] = (), events="all", params: dict | None = None,
                seed: int = 0, workers: int | None = None) -> ExactCheckReport:
    """Evaluate both sides of an inequality for every event and grid value.

    ``eq`` may join several ids with '+' when they share a functional.
    """
    params = dict(params or {})
    space.check_enumerable()
    fn, checks = _combined_checks(eq, space, list(grid), params)
    masses = np.asarray(space.masses())
    rmass = {"P": masses}
    if any(c.rhs_masses == "P1" for c in checks):
        rmass["P1"] = _p1_masses(space, float(params["p1"]))
    q = int(params.get("q", 2)) if fn.name == "q-point" else 1
    kind, arg = parse_event_source(events)
    n_events = 2**space.n_points - 1
    label = events if isinstance(events, str) else f"list({len(arg)})"
    if kind == "all":
        if q > 1:
            if n_events**q > ALL_EVENTS_CAP:
                raise ValueError(f"{n_events}^{q} event tuples exceed the cap {ALL_EVENTS_CAP}")
        elif n_events > ALL_EVENTS_CAP:
            if not fn.min_type or n_events > KERNEL_EVENTS_CAP:
                raise ValueError(f"{n_events} events exceed the cap {ALL_EVENTS_CAP}; use random(n, seed)")
            return _sweep_all_kernel(space, eq, fn, checks, masses, rmass, label, seed)
    if kind == "all":
        singles = [Event(space, mask=m) for m in range(1, n_events + 1)]
        if q == 1:
            evs = singles
        else:
            import itertools

            evs = list(itertools.product(*[singles] * q))
    elif kind == "random":
        evs = sample_events(space, arg[0], arg[1], q)
    else:
        evs = arg

    workers = default_workers() if workers is None else workers
    step = max(1, -(-len(evs) // (4 * workers))) if workers > 1 else max(1, len(evs))
    chunks = [evs[i:i + step] for i in range(0, len(evs), step)]
    job = (space, fn, checks, q, rmass)
    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_sweep_rows, [job] * len(chunks), chunks))
    else:
        parts = [_sweep_rows(job, c) for c in chunks]
    rows = [r for p in parts for r in p]
    bad = [r for r in rows if r["slack"] < -SLACK_TOL * max(1.0, r["rhs"])]
    return ExactCheckReport(eq, space.describe(), rows, bad, seed=seed, events=label)


def _sweep_rows(job, evs) -> list[dict]:
    space, fn, checks, q, rmass = job
    masses = rmass["P"]
    tables = _Tables(space, fn) if fn.name != "q-point" else None
    rows = []
    for A in evs:
        if q > 1:
            A = tuple(A)
            f_all = q_point_values(space, A)
            pAs = [a.measure for a in A]
            ev_label = [hex(a.mask) for a in A]
        else:
            ev_label = hex(A.mask)
        cache = {}
        for c in checks:
            if q == 1:
                a_key = c.alpha if fn.name == "xi" else 1.0
                if a_key not in cache:
                    cache[a_key] = tables.values(A.indices(), a_key)
                f = cache[a_key]
                pr = A.measure if c.rhs_masses == "P" else math.fsum(rmass["P1"][A.indices()].tolist())
            else:
                f = f_all
                pr = math.prod(pAs)
            rhs = c.C * pr ** (-c.alpha)
            phi = np.exp(f) if fn.name == "xi" else _integrand(c, f)
            lhs = _moment(masses, phi)
            row = {"event": ev_label, "pA": A.measure if q == 1 else pAs, **c.label,
                   "lhs": lhs, "rhs": rhs, "slack": rhs - lhs}
            if c.rhs_masses == "P1":
                row["p1A"] = pr
            rows.append(row)
    return rows


def _sweep_all_kernel(space, eq, fn, checks, masses, rmass, label, seed) -> ExactCheckReport:
    """All nonempty events of a min-type functional through the subset kernel.

    Rows are aggregated per check: event count, violations and the smallest
    normalized slack with the event attaining it.
    """
    D = pair_matrix(space, fn)
    mats, which = [], []
    for c in checks:
        if c.kind == "exp":
            M = np.exp(c.coef * D)
        elif c.kind == "base":
            M = np.power(c.coef, D)
        else:
            M = (D >= c.coef - 1e-12).astype(float)
        for i, other in enumerate(mats):
            if np.array_equal(other, M):
                which.append(i)
                break
        else:
            which.append(len(mats))
            mats.append(M)
    rm = {c.rhs_masses for c in checks}
    if len(rm) != 1:
        raise ValueError("mixed rhs masses in one sweep")
    mr = rmass[rm.pop()]
    count, viol, worst, wmask = kernels.subset_sweep(
        np.stack(mats), masses, mr, which, [c.alpha for c in checks], [c.C for c in checks], SLACK_TOL)
    rows, bad = [], []
    for k, c in enumerate(checks):
        row = {**c.label, "events": int(count), "violations": int(viol[k]),
               "min_rel_slack": float(worst[k]), "worst_event": hex(int(wmask[k])), "C": c.C, "alpha": c.alpha}
        rows.append(row)
        if viol[k]:
            bad.append(row)
    return ExactCheckReport(eq, space.describe(), rows, bad, seed=seed, events=label, aggregated=True)


# -- Monte Carlo ------------------------------------------------------------------

def clopper_pearson(k: int, n: int, confidence: float = CONFIDENCE) -> tuple[float, float]:
    """Exact two-sided binomial interval."""
    a = 1 - confidence
    lo = 0.0 if k == 0 else float(stats.beta.ppf(a / 2, k, n - k + 1))
    hi = 1.0 if k == n else float(stats.beta.ppf(1 - a / 2, k + 1, n - k))
    return lo, hi


def lower_median(values: np.ndarray) -> float:
    v = np.sort(np.asarray(values, dtype=float))
    return float(v[(v.size + 1) // 2 - 1])


def median_ci(values: np.ndarray, confidence: float = CONFIDENCE) -> tuple[float, float]:
    """Distribution-free interval [X_(l), X_(u)] from binomial order statistics."""
    v = np.sort(np.asarray(values, dtype=float))
    n = v.size
    a = 1 - confidence
    l = int(stats.binom.ppf(a / 2, n, 0.5))
    u = int(stats.binom.ppf(1 - a / 2, n, 0.5)) + 1
    l, u = max(l, 1), min(u, n)
    return float(v[l - 1]), float(v[u - 1])


def _run_chunk(sampler, seed: int, start: int, stop: int) -> np.ndarray:
    return np.array([sampler(trial_rng(seed, i)) for i in range(start, stop)], dtype=float)


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("CONCLAB_WORKERS", "1")))
    except ValueError:
        return 1


def mc_sample(sampler: Callable, n: int, seed: int, workers: int | None = None) -> np.ndarray:
    """Draw ``sampler(rng_i)`` for trials i < n; rows in trial order.

    ``sampler`` must be picklable when workers > 1.
    """
    workers = default_workers() if workers is None else workers
    bounds_ = [(s, min(s + CHUNK, n)) for s in range(0, n, CHUNK)]
    if workers <= 1 or len(bounds_) == 1:
        parts = [_run_chunk(sampler, seed, a, b) for a, b in bounds_]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            futs = [ex.submit(_run_chunk, sampler, seed, a, b) for a, b in bounds_]
            parts = [f.result() for f in futs]
    return np.concatenate(parts) if parts else np.empty(0)


@dataclass
class TailEstimate:
    statistic: str
    u_grid: list
    counts: list
    n: int
    estimates: list
    cp_upper: list
    median: float
    median_ci: tuple
    seed: int
    side: str = "upper"
    mean: float = float("nan")
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"statistic": self.statistic, "side": self.side, "u_grid": self.u_grid, "counts": self.counts,
                "n": self.n, "estimates": self.estimates, "cp_upper": self.cp_upper, "median": self.median,
                "median_ci": list(self.median_ci), "mean": self.mean, "seed": self.seed, "extra": self.extra}


def tail_from_samples(values: np.ndarray, u_grid: Sequence[float], seed: int, statistic: str = "",
                      side: str = "upper", center: float | None = None) -> TailEstimate:
    """Exceedance frequencies of the samples around their lower median.

    side: "raw" counts X >= u; "upper" X - M >= u; "lower" M - X >= u;
    "abs" |X - M| >= u.
    """
    values = np.asarray(values, dtype=float)
    n = values.size
    if n == 0:
        raise ValueError("no samples")
    M = lower_median(values) if center is None else float(center)
    dev = {"raw": values, "upper": values - M, "lower": M - values, "abs": np.abs(values - M)}[side]
    counts, est, up = [], [], []
    for u in u_grid:
        k = int((dev >= u).sum())
        counts.append(k)
        est.append(k / n)
        up.append(clopper_pearson(k, n)[1])
    return TailEstimate(statistic, [float(u) for u in u_grid], counts, n, est, up, M, median_ci(values), seed,
                        side, float(np.mean(values)))


def mc_tail(sampler: Callable, u_grid: Sequence[float], n: int, seed: int, workers: int | None = None,
            side: str = "upper", statistic: str = "") -> TailEstimate:
    if n < 1000:
        raise ValueError("Monte Carlo tails need at least 1000 samples")
    values = mc_sample(sampler, n, seed, workers)
    return tail_from_samples(values, u_grid, seed, statistic or getattr(sampler, "name", "statistic"), side)


def compare_tail_to_bound(estimate: TailEstimate, curve) -> tuple[list[dict], str]:
    """Rows pass when CP-upper <= bound + 1e-12; bounds >= 1 are vacuous passes.

    ``curve`` maps u to a BoundValue or a float, or is a list aligned with
    the grid.
    """
    if isinstance(curve, (list, tuple)):
        if len(curve) != len(estimate.u_grid):
            raise ValueError("bound grid does not match the estimate grid")
        vals = list(curve)
    else:
        vals = [curve(u) for u in estimate.u_grid]
    floor = clopper_pearson(0, estimate.n)[1]
    rows, ok = [], True
    for u, k, e, up, b in zip(estimate.u_grid, estimate.counts, estimate.estimates, estimate.cp_upper, vals):
        note = ""
        if isinstance(b, bounds.BoundValue):
            note, b = b.note, b.value
        vac = b >= 1.0
        passed = vac or up <= b + 1e-12
        ok &= passed
        # below the zero-count interval no sample of this size can pass
        rows.append({"u": u, "count": k, "estimate": e, "cp_upper": up, "bound": b, "vacuous": vac,
                     "resolvable": vac or b + 1e-12 >= floor, "pass": passed, "note": note})
    return rows, "pass" if ok else "fail"
