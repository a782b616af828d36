"""The acceptance suite: fifteen numbered checks, each returning a
:class:`CriterionResult` with the JSON of every report it produced."""
from __future__ import annotations

import contextlib
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import bounds, distances
from .apps import binpack, fpp, spinglass, subseq, supsum
from .spaces import Event, parse_space, trial_rng
from .verify import clopper_pearson, sweep_exact

TITLES = {
    1: "exact sweep, Hamming",
    2: "exact sweep, two-point",
    3: "exact sweep, dimension-free one-sided",
    4: "exact sweep, penalty",
    5: "exact sweep, q-point",
    6: "exact sweep, convex hull and xi",
    7: "exact sweep, symmetric group",
    8: "solver oracles",
    9: "bound identities",
    10: "MC dominance, LIS and LCS",
    11: "MC dominance, sup of linear forms",
    12: "MC dominance, bin packing",
    13: "MC dominance, spin glass",
    14: "first passage percolation report",
    15: "determinism across worker counts",
}

PENALTY_C = 0.9


@dataclass
class CriterionResult:
    number: int
    passed: bool
    summary: str
    seconds: float = 0.0
    reports: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] criterion {self.number:2d} {TITLES[self.number]}: {self.summary} ({self.seconds:.1f}s)"


def _sweeps(specs, workers):
    reps = [sweep_exact(parse_space(sp), eq, grid, ev, params, seed=seed, workers=workers)
            for sp, eq, grid, ev, params, seed in specs]
    bad = sum(len(r.counterexamples) for r in reps)
    n = sum(len(r.rows) for r in reps)
    return reps, bad, n


def _sweep_result(k, specs, workers, limit=None):
    t0 = time.perf_counter()
    reps, bad, n = _sweeps(specs, workers)
    dt = time.perf_counter() - t0
    ok = bad == 0 and all(r.verdict == "pass" for r in reps)
    summary = f"{n} rows, {bad} counterexamples"
    if limit is not None:
        ok &= dt < limit
        summary += f", limit {limit:g}s"
    return CriterionResult(k, ok, summary, dt, [r.to_json() for r in reps])


def c1(workers, quick):
    specs = [("uniform2^3", "2.1.2", [0.25, 0.5, 1, 2], "all", {}, 0),
             ("uniform2^3", "2.1.3", [0.5, 1, 2, 3], "all", {}, 0),
             ("bernoulli0.3^4", "2.1.2", [0.25, 0.5, 1, 2], f"random({200 if quick else 2000},1)", {}, 1),
             ("bernoulli0.3^4", "2.1.3", [0.5, 1, 2, 3], f"random({200 if quick else 2000},1)", {}, 1)]
    t0 = time.perf_counter()
    head = sweep_exact(parse_space("uniform2^3"), "2.1.2", [0.25, 0.5, 1, 2], "all", workers=workers)
    first = time.perf_counter() - t0
    res = _sweep_result(1, specs, workers)
    ok = res.passed and len(head.rows) == 1020 and first < 5
    res.passed = ok
    res.summary += f"; first sweep {len(head.rows)} rows in {first:.2f}s (limit 5s)"
    return res


def c2(workers, quick):
    n = 200 if quick else 2000
    specs = [(sp, "2.3.1", [0.25, 0.5, 1], f"random({n},2)", {"alphas": [1, 2]}, 2)
             for sp in ("bernoulli0.3^4", "uniform2^4")]
    return _sweep_result(2, specs, workers, limit=30)


def c3(workers, quick):
    n = 200 if quick else 2000
    prm = {"p1": 0.5}
    specs = [("bernoulli0.3^3", "2.3.7", [], "all", prm, 3),
             ("bernoulli0.3^4", "2.3.7", [], f"random({n},3)", prm, 3),
             ("bernoulli0.3^5", "2.3.7", [], f"random({n},3)", prm, 3)]
    res = _sweep_result(3, specs, workers)
    res.details["base"] = bounds.one_sided_moment_base(0.3, 0.5)
    return res


def c4(workers, quick):
    w = np.full(3, 1 / 3)
    kern = distances.PenaltyKernel.discrete(w, PENALTY_C)
    integral = bounds.penalty_integral(kern)
    space = "uniform3^2" if quick else "uniform3^3"
    specs = [(space, "2.4.4+2.4.11", [0.5, 1], "all", {"c": PENALTY_C}, 4),
             (space, "2.4.13", [1.8, 3.6], "all", {"c": PENALTY_C}, 4)]
    res = _sweep_result(4, specs, workers)
    res.passed &= integral <= 2
    res.summary += f"; double integral of exp(h) = {integral:.6f}"
    res.details["integral"] = integral
    return res


def c5(workers, quick):
    n2, n3 = (1000, 300) if quick else (10_000, 2000)
    specs = [("uniform2^3", "3.1.2", [], f"random({n2},5)", {"q": 2}, 5),
             ("uniform2^3", "3.2.1", [], f"random({n2},5)", {"q": 2, "alphas": [1, 2]}, 5),
             ("uniform3^2", "3.1.2", [], f"random({n3},6)", {"q": 3}, 6),
             ("uniform3^2", "3.2.1", [], f"random({n3},6)", {"q": 3, "alphas": [1, 2]}, 6)]
    return _sweep_result(5, specs, workers)


def c6(workers, quick):
    n = 200 if quick else 2000
    ev = f"random({n},7)"
    specs = [("uniform2^4", "4.1.2", [], ev, {}, 7),
             ("uniform2^4", "4.2.5", [], ev, {"alphas": [1, 2]}, 7),
             ("uniform2^4", "4.3.7", [], ev, {"alphas": [1, 2]}, 7)]
    return _sweep_result(6, specs, workers, limit=180)


def c7(workers, quick):
    specs = [("S_4", "5.2", [], f"random({100 if quick else 1000},8)", {}, 8)]
    return _sweep_result(7, specs, workers)


def c8(workers, quick):
    t0 = time.perf_counter()
    n = 100 if quick else 1000
    worst = 0.0
    for i in range(n):
        rng = trial_rng(8, i)
        N = int(rng.integers(1, 7))
        space = parse_space(f"uniform2^{N}")
        k = int(rng.integers(1, min(3, 2 ** N) + 1))
        idx = rng.choice(2 ** N, size=k, replace=False)
        Y = space.points()[idx]
        x = space.points()[int(rng.integers(2 ** N))]
        got = distances.convex_distance(space, Event(space, points=[tuple(y) for y in Y]), x).value
        want = distances.projection_oracle((Y != x).astype(float))
        worst = max(worst, abs(got - want))
    mismatches = 0
    for i in range(n):
        rng = trial_rng(9, i)
        K, N, q = int(rng.integers(2, 4)), int(rng.integers(1, 5)), int(rng.integers(2, 4))
        space = parse_space(f"uniform{K}^{N}")
        pts = space.points()
        evs = []
        for _ in range(q):
            size = int(rng.integers(1, min(4, len(pts)) + 1))
            evs.append(Event(space, points=[tuple(p) for p in pts[rng.choice(len(pts), size, replace=False)]]))
        x = pts[int(rng.integers(len(pts)))]
        mismatches += distances.q_point_distance(space, evs, x) != distances.q_point_distance_bruteforce(evs, x)
    ok = worst <= 1e-6 and mismatches == 0
    return CriterionResult(8, ok, f"convex max error {worst:.2e} over {n}; q-point mismatches {mismatches}/{n}",
                           time.perf_counter() - t0, details={"worst": worst, "mismatches": mismatches})


def c9(workers, quick):
    t0 = time.perf_counter()
    e_a = max(abs(bounds.solve_a_q_alpha(q, 1.0) - q) for q in range(2, 11))
    u = np.arange(0, 1001) / 1000
    e_xi, low = 0.0, math.inf
    for a in (1.0, 2.0, 5.0):
        e_xi = max(e_xi, abs(bounds.xi(a, 1.0) - math.log1p(a)))
        low = min(low, float((bounds.xi_vec(a, u) - a * u * u / (2 * (a + 1))).min()))
    ts = np.linspace(0, 3, 301)
    e_b = max(abs(bounds.two_point_b(1.0, t, 0.5) - bounds.a_of_t(t)) for t in ts)
    gap = min(math.exp(t * t / 4) - bounds.a_of_t(t) for t in np.linspace(0, 10, 1001))
    ok = e_a <= 1e-10 and e_xi <= 1e-12 and low >= -1e-12 and e_b <= 1e-12 and gap >= 0
    return CriterionResult(9, ok, f"a(q,1) err {e_a:.1e}; xi(a,1) err {e_xi:.1e}; xi lower slack {low:.1e}; "
                                  f"b vs a err {e_b:.1e}; min e^(t^2/4)-a(t) {gap:.1e}",
                           time.perf_counter() - t0)


def _unresolvable(rep) -> list:
    return [(r["equation"], r["u"], r["bound"]) for r in rep.rows if not r["resolvable"]]


def c10(workers, quick):
    t0 = time.perf_counter()
    # the quick grid stops where 10^4 samples can still resolve the curve
    lis = subseq.lis_experiment(N=1000, samples=10_000 if quick else 100_000, seed=10,
                                u_grid=(10, 20, 30, 40) if quick else (10, 20, 30, 40, 50), workers=workers)
    lcs = subseq.lcs_experiment(N=500, samples=1000 if quick else 10_000, seed=11, workers=workers)
    dt = time.perf_counter() - t0
    reps = [lis, lcs]
    ok = all(r.verdict == "pass" for r in reps) and dt < 120
    unres = _unresolvable(lis) + _unresolvable(lcs)
    failing = [(r["equation"], r["u"]) for rep in reps for r in rep.rows if not r["pass"]]
    real = [f for f in failing if f not in [(e, u) for e, u, _ in unres]]
    n = lis.tails[0]["estimate"]["n"]
    floor = clopper_pearson(0, n)[1]
    summary = (f"LIS {lis.verdict} (median {lis.aux['median']:g}), LCS {lcs.verdict} (median {lcs.aux['median']:g}); "
               f"failing rows {failing}")
    if unres:
        summary += (f"; bounds below the zero-count CP limit {floor:.3g} at n={n}: "
                    + ", ".join(f"{e} u={u:g} bound {b:.3g}" for e, u, b in unres))
    return CriterionResult(10, ok, summary, dt, [r.to_json() for r in reps],
                           details={"failing": failing, "unresolvable": unres, "non_resolution_failures": real})


def c11(workers, quick):
    t0 = time.perf_counter()
    n = 10_000 if quick else 100_000
    a = np.r_[np.ones(50), np.zeros(50)]
    reps = [supsum.supsum_experiment(supsum.singleton_family(100), samples=n, seed=12, workers=workers),
            supsum.permutation_experiment(supsum.block_family(100, 2, 1.0), a, samples=n // 10, seed=13,
                                          workers=workers),
            supsum.permutation_experiment(supsum.block_family(100, 10), a, samples=n // 10, seed=14,
                                          workers=workers),
            supsum.topk_experiment(supsum.singleton_family(100), q=2, ks=(2, 3, 4), samples=n, seed=15,
                                   workers=workers)]
    ok = all(r.verdict == "pass" for r in reps)
    summary = ", ".join(f"{r.app}:{'/'.join(r.to_dict()['equation'])} {r.verdict}" for r in reps)
    return CriterionResult(11, ok, summary, time.perf_counter() - t0, [r.to_json() for r in reps])


def c12(workers, quick):
    t0 = time.perf_counter()
    big = binpack.binpack_experiment(200, samples=1000 if quick else 10_000, seed=16, workers=workers,
                                     u_grid=(5, 10, 20, 50, 75) if quick else (5, 10, 20, 50, 75, 100))
    small = binpack.binpack_experiment(12, samples=1000, seed=17, mode="exact", u_grid=(1, 2, 4, 8, 12, 16, 20),
                                       workers=workers)
    ok = big.verdict == "pass" and small.verdict == "pass" and bool(big.caveats)
    summary = (f"N=200 ffd {big.verdict} (caveat recorded: {bool(big.caveats)}), "
               f"N=12 exact {small.verdict}")
    return CriterionResult(12, ok, summary, time.perf_counter() - t0, [big.to_json(), small.to_json()])


def c13(workers, quick):
    t0 = time.perf_counter()
    cfg = spinglass.SpinGlassConfig(20, 0.5, "normal")
    rep = spinglass.spin_glass_experiment(cfg, samples=1000 if quick else 10_000, seed=18, workers=workers)
    K = rep.aux["K_mean"]
    ok = rep.verdict == "pass" and math.isfinite(K) and K <= 20
    summary = (f"12.5 {rep.verdict}; mean ratio {rep.aux['mean_ratio']:.4f} (K {K:.3f}); "
               f"second moment ratio {rep.aux['second_ratio']:.4f} (K {rep.aux['K_second']:.3f})")
    return CriterionResult(13, ok, summary, time.perf_counter() - t0, [rep.to_json()])


def c14(workers, quick):
    t0 = time.perf_counter()
    rep = fpp.fpp_experiment(20, samples=1000 if quick else 10_000, seed=19, workers=workers)
    est = rep.tails[0]["estimate"]["estimates"]
    mono = all(b <= a for a, b in zip(est, est[1:]))
    quad = rep.aux["log_tail_quadratic"]
    ok = mono and "r2" in quad
    summary = (f"K fitted {rep.aux['K_fit']:.4g} (point {rep.aux['K_point']:.4g}, moment K0 {rep.aux['K0']:.4g}); "
               f"log-tail nonincreasing {mono}; quadratic R^2 {quad.get('r2', float('nan')):.4f}")
    return CriterionResult(14, ok, summary, time.perf_counter() - t0, [rep.to_json()])


CRITERIA = {1: c1, 2: c2, 3: c3, 4: c4, 5: c5, 6: c6, 7: c7, 8: c8, 9: c9, 10: c10, 11: c11, 12: c12,
            13: c13, 14: c14}


def determinism(base: dict, workers: int = 8, quick: bool = False) -> CriterionResult:
    """Rerun each criterion under ``workers`` and compare report JSON byte for byte."""
    t0 = time.perf_counter()
    diffs = []
    for k, res in sorted(base.items()):
        again = CRITERIA[k](workers, quick)
        if again.reports != res.reports:
            diffs.append(k)
    ok = not diffs
    return CriterionResult(15, ok, f"{len(base)} criteria rerun with {workers} workers; differing: {diffs or 'none'}",
                           time.perf_counter() - t0, details={"differing": diffs})


@contextlib.contextmanager
def injected_fault():
    """Halve a(t) so the Hamming moment table is wrong; a negative control."""
    orig = bounds.a_of_t
    bounds.a_of_t = lambda t: 0.5 * orig(t)
    try:
        yield
    finally:
        bounds.a_of_t = orig


def run(numbers=None, workers: int = 1, quick: bool = False, det_workers: int = 8, echo=None) -> list:
    numbers = sorted(numbers or range(1, 16))
    results = {}
    for k in numbers:
        if k == 15:
            continue
        results[k] = CRITERIA[k](workers, quick)
        if echo:
            echo(results[k].line)
    out = [results[k] for k in sorted(results)]
    if 15 in numbers:
        base = results if results else {k: CRITERIA[k](workers, quick) for k in CRITERIA}
        r = determinism(base, det_workers, quick)
        if echo:
            echo(r.line)
        out.append(r)
    return out
