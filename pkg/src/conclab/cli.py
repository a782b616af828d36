"""Command line front end.

Exit codes: 0 success or pass, 1 a counterexample or failed comparison,
2 a usage error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import bounds, distances, verify
from .spaces import Event, event_from_json, parse_space, sample_point

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- helpers -------------------------------------------------------------------------

def _floats(text: str | None):
    if text is None:
        return None
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).replace(" ", "").split(",") if v]


def _need(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError(f"--{missing[0].replace('_', '-')} is required here")


def _kernel(args, K: int = 2):
    if args.kernel:
        obj = json.loads(args.kernel)
        if "c" in obj:
            return distances.PenaltyKernel.discrete(obj.get("weights", [1 / K] * K), float(obj["c"]))
        return distances.PenaltyKernel(obj["h"], obj["weights"])
    c = 1.0 if args.c is None else args.c
    return distances.PenaltyKernel.discrete([1 / K] * K, c)


def _emit(args, text: str, name: str):
    if not args.out:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    path = args.out
    if os.path.isdir(path):
        ext = "csv" if args.format == "csv" else "json"
        path = os.path.join(path, f"{name}_seed{args.seed}.{ext}")
    with open(path, "w") as fh:
        fh.write(text if text.endswith("\n") else text + "\n")


def _report_text(args, rep) -> str:
    return rep.to_csv() if args.format == "csv" else rep.to_json()


# -- bound ---------------------------------------------------------------------------

def _bound(args) -> bounds.BoundValue:
    eq = args.eq
    g = lambda n: getattr(args, n)
    alpha = g("alpha")[0] if g("alpha") else None
    profile = _floats(args.profile)
    if eq in ("2.1.2", "2.1.8"):
        _need(args, "pA", "t")
        if eq == "2.1.2":
            _need(args, "N")
        elif not profile:
            raise UsageError("--profile is required for 2.1.8")
        return bounds.hamming_moment(g("N"), g("pA"), g("t"), profile if eq == "2.1.8" else None)
    if eq in ("2.1.3", "2.1.9"):
        _need(args, "pA")
        if eq == "2.1.3":
            _need(args, "N", "k")
            return bounds.hamming_tail(g("pA"), g("k"), g("N"))
        _need(args, "u")
        if not profile:
            raise UsageError("--profile is required for 2.1.9")
        return bounds.hamming_tail(g("pA"), profile=profile, u=g("u"))
    if eq == "2.2.6":
        _need(args, "N", "pA", "t")
        return bounds.sharpened_moment(g("N"), g("pA"), g("t"), alpha or 1.0)
    if eq == "2.2.7":
        _need(args, "N", "pA", "k")
        return bounds.sharpened_tail(g("N"), g("pA"), g("k"))
    if eq == "2.3.1":
        _need(args, "N", "pA", "t", "p")
        return bounds.two_point_moment(g("N"), g("pA"), g("t"), alpha or 1.0, g("p"))
    if eq == "2.3.5":
        _need(args, "N", "pA", "k", "p")
        return bounds.two_point_tail(g("N"), g("pA"), g("k"), g("p"), g("K") or 0.0)
    if eq == "2.3.6":
        _need(args, "N", "pA", "t", "p", "p1")
        return bounds.one_sided_moment(g("N"), g("pA"), g("t"), alpha or 1.0, g("p"), g("p1"))
    if eq in ("2.4.4", "2.4.11"):
        _need(args, "N", "pA", "t")
        fn = bounds.penalty_moment if eq == "2.4.4" else bounds.penalty_moment_simple
        return fn(_kernel(args, args.symbols), g("N"), g("pA"), g("t"))
    if eq in ("2.4.13", "2.4.14"):
        _need(args, "N", "pA", "u")
        fn = bounds.penalty_tail if eq == "2.4.13" else bounds.penalty_bernstein
        return fn(_kernel(args, args.symbols), g("N"), g("pA"), g("u"))
    if eq in ("3.1.2", "3.2.1"):
        _need(args, "pA", "q")
        return bounds.q_point_moment([g("pA")] * g("q"), 1.0 if eq == "3.1.2" else (alpha or 1.0))
    if eq in ("3.1.3", "3.2.3", "3.2.4"):
        _need(args, "pA", "q", "k")
        variant = {"3.1.3": "basic", "3.2.3": "sharpened", "3.2.4": "large-q"}[eq]
        return bounds.q_point_tail(g("q"), g("k"), g("pA"), variant, g("q0") or bounds.DEFAULT_Q0)
    if eq in ("4.1.2", "4.2.5", "5.2"):
        _need(args, "pA")
        return bounds.convex_moment(g("pA"), {"4.1.2": "basic", "4.2.5": "xi", "5.2": "perm"}[eq], alpha or 1.0)
    if eq in ("4.1.3", "4.2.6", "4.2.7", "4.3.7", "4.3.8"):
        _need(args, "pA", "t")
        variant = {"4.1.3": "basic", "4.2.6": "alpha", "4.2.7": "optimized", "4.3.7": "two-point-uniform",
                   "4.3.8": "two-point-optimized"}[eq]
        return bounds.convex_tail(g("pA"), g("t"), variant, alpha)
    raise UsageError(f"--eq {eq}: no closed-form evaluator for this id")


def cmd_bound(args) -> int:
    bv = _bound(args)
    _emit(args, verify.dumps(bv.to_dict()), bv.equation)
    return EXIT_OK


# -- distance ------------------------------------------------------------------------

def _event(space, text):
    if text is None:
        raise UsageError("--event is required")
    return event_from_json(space, text)


def cmd_distance(args) -> int:
    _need(args, "space", "x")
    space = parse_space(args.space)
    x = tuple(int(v) for v in str(args.x).split(","))
    kind = args.kind
    out = {"kind": kind, "space": space.describe(), "x": list(x)}
    if kind == "q-point":
        if not args.events_json:
            raise UsageError("--events-json (a JSON list of events) is required for q-point")
        evs = [event_from_json(space, e) for e in json.loads(args.events_json)]
        out["value"] = distances.q_point_distance(space, evs, x)
    elif kind == "perm":
        if not args.event:
            raise UsageError("--event is required")
        A = json.loads(args.event)["points"]
        r = distances.perm_convex_distance(A, x)
        out.update(value=r.value, s=r.s.tolist(), gap=r.gap)
    else:
        A = _event(space, args.event)
        if kind == "hamming":
            out["value"] = distances.hamming_distance(space, A, x, _floats(args.profile))
        elif kind == "one-sided":
            out["value"] = distances.one_sided_distance(space, A, x)
        elif kind == "penalty":
            out["value"] = distances.penalty_distance(space, A, x, _kernel(args, max(space.sizes)))
        elif kind == "convex":
            r = distances.convex_distance(space, A, x)
            out.update(value=r.distance, squared=r.value, s=r.s.tolist(), gap=r.gap,
                       support=[[list(y), w] for y, w in r.support])
        elif kind == "xi":
            out["value"] = distances.xi_distance(space, A, x, args.alpha[0] if args.alpha else 1.0)
        else:
            raise UsageError(f"--kind {kind}: unknown distance")
    _emit(args, verify.dumps(out), f"distance-{kind}")
    return EXIT_OK


# -- verify-exact --------------------------------------------------------------------

def cmd_verify_exact(args) -> int:
    _need(args, "eq", "space")
    space = parse_space(args.space)
    params = {}
    if args.alpha:
        params["alphas"] = args.alpha
    for key in ("q", "p1", "c"):
        if getattr(args, key) is not None:
            params[key] = getattr(args, key)
    if args.profile:
        params["profile"] = _floats(args.profile)
    if args.kernel:
        params["kernel"] = _kernel(args, max(space.sizes))
    grid = _floats(args.t_grid) or _floats(args.u_grid) or []
    rep = verify.sweep_exact(space, args.eq, grid, args.events, params, seed=args.seed, workers=args.workers)
    _emit(args, _report_text(args, rep), args.eq)
    return EXIT_OK if rep.verdict == "pass" else EXIT_FAIL


# -- mc --------------------------------------------------------------------------------

@dataclass(frozen=True)
class UniformStat:
    name: str = "uniform"

    def __call__(self, rng):
        return float(rng.random())


@dataclass(frozen=True)
class ConstantStat:
    c: float
    name: str = "constant"

    def __call__(self, rng):
        return self.c


@dataclass(frozen=True, eq=False)
class DistanceStat:
    """Distance from a random point of ``space`` to a fixed event."""
    space: object
    mask: int
    kind: str = "hamming"
    name: str = "distance"

    def __call__(self, rng):
        x = sample_point(self.space, rng)
        A = Event(self.space, mask=self.mask)
        if self.kind == "hamming":
            return float(distances.hamming_distance(self.space, A, x))
        return distances.convex_distance(self.space, A, x).distance


def _statistic(args):
    """Sampler and an optional tail curve for ``mc --statistic``."""
    from .apps import binpack, fpp, spinglass, subseq

    s = args.statistic
    if s == "uniform":
        return UniformStat(), None
    if s == "constant":
        return ConstantStat(args.c if args.c is not None else 0.0), None
    if s in ("hamming", "convex"):
        _need(args, "space")
        space = parse_space(args.space)
        A = _event(space, args.event)
        pA = A.measure
        if s == "hamming":
            curve = lambda u: bounds.hamming_tail(pA, u, space.N)
        else:
            curve = lambda u: bounds.convex_tail(pA, u)
        return DistanceStat(space, A.mask, s, f"{s}-distance"), curve
    if s == "lis":
        return subseq.LisSampler(args.N or 100), None
    if s == "lcs":
        return subseq.LcsSampler(args.N or 100), None
    if s == "bins":
        return binpack.BinpackSampler(args.N or 100), None
    if s == "passage":
        return fpp.FppSampler(args.N or 10), None
    if s == "logZ":
        return _LogZ(spinglass.SpinGlassConfig(args.N or 10, args.beta)), None
    raise UsageError(f"--statistic {s}: unknown statistic")


@dataclass(frozen=True)
class _LogZ:
    config: object
    name: str = "logZ"

    def __call__(self, rng):
        from .apps import spinglass

        return spinglass.spin_glass_logZ(self.config, self.config.draw(rng))


def cmd_mc(args) -> int:
    sampler, curve = _statistic(args)
    grid = _floats(args.u_grid)
    if not grid:
        raise UsageError("--u-grid is required")
    n = args.samples or 10_000
    est = verify.mc_tail(sampler, grid, n, args.seed, args.workers, side=args.side, statistic=sampler.name)
    out = {"equation": "mc", "statistic": sampler.name, "seed": args.seed, "estimate": est.to_dict(),
           "rows": [], "verdict": "report"}
    code = EXIT_OK
    if curve is not None:
        if args.side != "raw":
            raise UsageError("distance statistics are compared with their tails at --side raw")
        rows, verdict = verify.compare_tail_to_bound(est, curve)
        out.update(rows=rows, verdict=verdict, equation=curve(grid[0]).equation)
        code = EXIT_OK if verdict == "pass" else EXIT_FAIL
    if args.format == "csv":
        rows = out["rows"] or [{"u": u, "count": k, "estimate": e, "cp_upper": c}
                               for u, k, e, c in zip(est.u_grid, est.counts, est.estimates, est.cp_upper)]
        text = verify.rows_to_csv(rows)
    else:
        text = verify.dumps(out)
    _emit(args, text, f"mc-{sampler.name}")
    return code


# -- app ---------------------------------------------------------------------------------

def cmd_app(args) -> int:
    from .apps import binpack, fpp, spinglass, subseq, supsum

    a, seed, w = args.app, args.seed, args.workers
    kw = {}
    if args.samples:
        kw["samples"] = args.samples
    ug = _floats(args.u_grid)
    if a == "lis":
        rep = subseq.lis_experiment(N=args.N or 1000, seed=seed, workers=w, **kw, **({"u_grid": ug} if ug else {}))
    elif a == "lcs":
        rep = subseq.lcs_experiment(N=args.N or 500, alphabet=args.alphabet, seed=seed, workers=w, **kw,
                                    **({"u_grid": ug} if ug else {}))
    elif a == "binpack":
        rep = binpack.binpack_experiment(args.N or 200, law=args.law or "uniform01", seed=seed, mode=args.mode,
                                         workers=w, **kw, **({"u_grid": ug} if ug else {}))
    elif a == "supsum":
        fam = supsum.singleton_family(args.N or 100)
        rep = supsum.supsum_experiment(fam, law=args.law or "uniform01", seed=seed, workers=w, **kw,
                                       **({"u_grid": ug} if ug else {}))
    elif a == "supsum-perm":
        N = args.N or 100
        fam = supsum.block_family(N, args.block)
        coef = np.r_[np.ones(N // 2), np.zeros(N - N // 2)]
        rep = supsum.permutation_experiment(fam, coef, seed=seed, workers=w, **kw, **({"u_grid": ug} if ug else {}))
    elif a == "supsum-topk":
        fam = supsum.singleton_family(args.N or 100)
        ks = [int(v) for v in _floats(args.k_list)] if args.k_list else [2, 4]
        tg = _floats(args.t_grid)
        rep = supsum.topk_experiment(fam, q=args.q or 2, ks=ks, seed=seed, workers=w, **kw,
                                     **({"t_grid": tg} if tg else {}))
    elif a == "fpp":
        rep = fpp.fpp_experiment(args.N or 20, law=args.law or "bounded-exp", seed=seed, workers=w,
                                 r_scale=args.r_scale, c_prime=args.c_prime, **kw, **({"u_grid": ug} if ug else {}))
    elif a == "spinglass":
        cfg = spinglass.SpinGlassConfig(args.N or 20, args.beta, args.disorder)
        tg = _floats(args.t_grid) or ug
        rep = spinglass.spin_glass_experiment(cfg, seed=seed, workers=w, **kw, **({"t_grid": tg} if tg else {}))
    else:
        raise UsageError(f"unknown app {a!r}")
    _emit(args, _report_text(args, rep), a)
    return EXIT_FAIL if rep.verdict == "fail" else EXIT_OK


# -- selftest ------------------------------------------------------------------------------

def cmd_selftest(args) -> int:
    from . import acceptance

    numbers = [int(v) for v in _floats(args.criteria)] if args.criteria else None
    ctx = acceptance.injected_fault() if args.inject_fault else _null()
    with ctx:
        results = acceptance.run(numbers, workers=args.workers or 1, quick=args.quick, echo=print)
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    return EXIT_OK if passed == len(results) else EXIT_FAIL


class _null:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False


# -- parser ----------------------------------------------------------------------------

def _common(p):
    p.add_argument("--config", help="JSON file whose keys supply flag defaults")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def _params(p):
    for name in ("N", "q", "symbols"):
        p.add_argument(f"--{name}", type=int, default=2 if name == "symbols" else None)
    for name in ("pA", "t", "k", "u", "p", "p1", "c", "K", "beta"):
        p.add_argument(f"--{name}", type=float, default=0.5 if name == "beta" else None)
    p.add_argument("--q0", type=int)
    p.add_argument("--alpha", type=_floats, help="one value, or a comma list for sweeps")
    p.add_argument("--profile", help="comma separated weights a_i")
    p.add_argument("--kernel", help='JSON: {"c": c} or {"h": [[...]], "weights": [...]}')


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="conclab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="evaluate a closed-form bound")
    p.add_argument("--eq", required=True)
    _params(p)
    _common(p)

    p = sub.add_parser("distance", help="distance from a point to an event")
    p.add_argument("--kind", default="hamming",
                   choices=("hamming", "one-sided", "penalty", "q-point", "convex", "xi", "perm"))
    p.add_argument("--space")
    p.add_argument("--event", help='JSON event: {"points": [...]} or a predicate')
    p.add_argument("--events-json", help="JSON list of events (q-point)")
    p.add_argument("--x", help="comma separated point")
    _params(p)
    _common(p)

    p = sub.add_parser("verify-exact", help="exact sweep of an inequality")
    p.add_argument("--eq", required=True)
    p.add_argument("--space", required=True)
    p.add_argument("--events", default="all")
    p.add_argument("--t-grid")
    p.add_argument("--u-grid")
    _params(p)
    _common(p)

    p = sub.add_parser("mc", help="Monte Carlo tail of a named statistic")
    p.add_argument("--statistic", required=True)
    p.add_argument("--space")
    p.add_argument("--event")
    p.add_argument("--u-grid")
    p.add_argument("--samples", type=int)
    p.add_argument("--side", choices=("raw", "upper", "lower", "abs"), default="raw")
    _params(p)
    _common(p)

    p = sub.add_parser("app", help="run an application experiment")
    p.add_argument("app", choices=("lis", "lcs", "binpack", "supsum", "supsum-perm", "supsum-topk", "fpp",
                                   "spinglass"))
    p.add_argument("--samples", type=int)
    p.add_argument("--u-grid")
    p.add_argument("--t-grid")
    p.add_argument("--k-list", help="comma list of k for supsum-topk")
    p.add_argument("--law")
    p.add_argument("--mode", choices=("exact", "ffd"))
    p.add_argument("--alphabet", type=int, default=2)
    p.add_argument("--block", type=int, default=10)
    p.add_argument("--disorder", default="normal")
    p.add_argument("--r-scale", type=float, default=4.0)
    p.add_argument("--c-prime", type=float, default=1.0)
    _params(p)
    _common(p)

    p = sub.add_parser("selftest", help="run the acceptance suite")
    p.add_argument("--quick", action="store_true")
    p.add_argument("--criteria", help="comma list of criterion numbers")
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    _common(p)
    return ap


def _apply_config(parser, argv):
    """Reparse with defaults from --config; unknown keys are rejected."""
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    with open(args.config) as fh:
        cfg = json.load(fh)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest for a in sub._actions}
    bad = sorted(k for k in cfg if k.replace("-", "_") not in known or k == "config")
    if bad:
        raise UsageError(f"--config: unknown key {bad[0]!r}")
    sub.set_defaults(**{k.replace("-", "_"): v for k, v in cfg.items()})
    return parser.parse_args(argv)


COMMANDS = {"bound": cmd_bound, "distance": cmd_distance, "verify-exact": cmd_verify_exact, "mc": cmd_mc,
            "app": cmd_app, "selftest": cmd_selftest}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        return COMMANDS[args.command](args)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    except (UsageError, ValueError, KeyError, OSError, json.JSONDecodeError) as e:
        print(f"conclab: error: {e}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
