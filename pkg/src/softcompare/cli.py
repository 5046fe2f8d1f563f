"""Command-line interface: ``softcompare {compare,cluster,reproduce-iris,axioms,bench}``.

Distances are computed as distances throughout; wherever a similarity is
printed it is ``1 - distance``, applied to both ends of an interval with
the ends swapped, so ``(lo, hi)`` as a distance reads ``(1 - hi, 1 - lo)``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import clusterers as cl
from .distributional import (
    DEFAULT_BUDGET,
    TNORMS,
    distributional_evidential,
    distributional_fuzzy,
    distributional_possibilistic,
    distributional_rough,
    expectation_summary,
    fuzzy_rand_expectation_fast,
    possibilistic_rc_distribution,
    rough_interval,
)
from .errors import BudgetExceeded, SoftCompareError, ValidationError
from .io import EvaluationReport, load_dataset, read_clustering, sha256, write_clustering
from .metrics import MASS_METRICS, RAND, check_axioms, get_base, rand_evidential
from .model import EMPTY_SET_POLICIES, Frame, HardClustering, RoughClustering, SCKind, SoftClustering, classify
from .sampling import DEFAULT_DELTA, DEFAULT_EPSILON, DEFAULT_INNER_SAMPLES, SamplePlan, approximate, make_rng

SIMILARITY_NOTE = ("similarity = 1 - distance; for an interval (lo, hi) of distances the "
                   "similarity interval is (1 - hi, 1 - lo)")

_ROUGHISH = {SCKind.HARD, SCKind.ROUGH}
_FUZZYISH = {SCKind.HARD, SCKind.FUZZY}
_POSSISH = {SCKind.HARD, SCKind.FUZZY, SCKind.POSSIBILISTIC}


def _sim(lo, hi):
    return [1.0 - hi, 1.0 - lo]


def _rc_work(m: SoftClustering) -> int:
    return math.prod(sum(bin(a).count("1") for a, _ in f.focal) for f in m.masses)


# --- compare ---------------------------------------------------------------------------

def compare_exact(a: SoftClustering, b: SoftClustering, measure: str, tnorm: str = "min",
                  budget: int | None = DEFAULT_BUDGET, d_m: str = "jousselme") -> tuple:
    """Exact comparison dispatched on the kinds of both inputs; returns ``(result, counts)``."""
    base = get_base(measure)
    ka, kb = classify(a), classify(b)
    if ka is SCKind.HARD and kb is SCKind.HARD:
        v = base(a.to_hard(), b.to_hard())
        return {"kind": "value", "distance": v, "similarity": 1.0 - v}, {"hard_pairs": 1}
    if ka in _ROUGHISH and kb in _ROUGHISH:
        r1, r2 = a.to_rough(), b.to_rough()
        count = r1.compatible_count() * r2.compatible_count()
        vs = distributional_rough(r1, r2, base, budget)
        res = {"kind": "interval", "interval": [vs.lower, vs.upper], "similarity": _sim(vs.lower, vs.upper),
               "value_set": list(vs.values) if len(vs.values) <= 1000 else None}
        return res, {"compatible_pairs": count}
    if ka in _FUZZYISH and kb in _FUZZYISH:
        count = math.prod(len(f) for f in a.masses) * math.prod(len(f) for f in b.masses)
        res = {"kind": "expectation"}
        try:
            dist = distributional_fuzzy(a, b, base, budget)
        except BudgetExceeded:
            if base is not RAND:
                raise
            e = fuzzy_rand_expectation_fast(a, b)
            res.update(expectation=e, similarity=1.0 - e, method="closed form", distribution=None)
            return res, {"hard_pairs": count, "enumerated": 0}
        e = dist.expectation
        res.update(expectation=e, similarity=1.0 - e, method="enumeration",
                   distribution=[[v, w] for v, w in dist.weights])
        return res, {"hard_pairs": count}
    if ka in _POSSISH and kb in _POSSISH:
        poss = distributional_possibilistic(a, b, base, tnorm, budget)
        src = [possibilistic_rc_distribution(m) if k is SCKind.POSSIBILISTIC and tnorm == "min" else m
               for m, k in ((a, ka), (b, kb))]
        vsm = distributional_evidential(src[0], src[1], base, budget)
        es = expectation_summary(vsm)
        res = {"kind": "possibility", "tnorm": tnorm, "possibility": [[v, w] for v, w in poss.weights],
               "expectations": [es.lower, es.upper], "similarity": list(es.as_similarity())}
        return res, {"possibility_support": len(poss.weights), "focal_value_sets": len(vsm.masses)}
    count = _rc_work(a) * _rc_work(b)
    vsm = distributional_evidential(a, b, base, budget)
    es = expectation_summary(vsm)
    res = {"kind": "expectations", "expectations": [es.lower, es.upper], "similarity": list(es.as_similarity()),
           "value_set_masses": [[list(vs.values), w] for vs, w in vsm.masses] if len(vsm.masses) <= 200 else None}
    if measure == "rand":
        res["evidential_rand"] = {"d_m": d_m, "similarity": rand_evidential(a, b, d_m)}
    return res, {"compatible_work": count, "focal_value_sets": len(vsm.masses)}


def compare_sampled(a: SoftClustering, b: SoftClustering, measure: str, plan: SamplePlan,
                    tnorm: str = "min", budget: int | None = DEFAULT_BUDGET) -> tuple:
    base = get_base(measure)
    src = [possibilistic_rc_distribution(m) if classify(m) is SCKind.POSSIBILISTIC and tnorm == "min" else m
           for m in (a, b)]
    r = approximate(src[0], src[1], base, plan, budget)
    res = {"kind": "sampled", "estimator": r.mode, "interval": [r.lower, r.upper],
           "similarity": list(r.as_similarity()), "warnings": list(r.warnings)}
    counts = {"samples": r.samples_used, "hoeffding_epsilon": r.epsilon, "delta": plan.delta}
    if r.epsilon is None:
        counts["note"] = "extreme-value estimates of interval ends carry no Hoeffding half-width"
    return res, counts


def _second_input(args, n):
    if args.file2:
        return read_clustering(args.file2, args.empty_set), args.file2
    if args.dataset:
        ds = load_dataset(args.dataset, label_col=args.label_col)
        if ds.labels is None:
            raise ValidationError("--dataset needs --label-col to provide reference labels")
        return SoftClustering.from_hard(ds.labels), args.dataset
    raise ValidationError("compare needs a second clustering file or --dataset with --label-col")


def cmd_compare(args) -> EvaluationReport:
    t0 = time.perf_counter()
    a = read_clustering(args.file1, args.empty_set)
    b, path2 = _second_input(args, a.n)
    params = {"tnorm": args.tnorm, "d_m": args.d_m, "empty_set": args.empty_set, "budget": args.budget}
    if args.mode == "exact":
        result, counts = compare_exact(a, b, args.measure, args.tnorm, args.budget, args.d_m)
        seed = None
    else:
        plan = SamplePlan(samples=args.samples, epsilon=args.epsilon, delta=args.delta, seed=args.seed,
                          workers=args.threads, inner_samples=args.inner_samples)
        params.update(samples=plan.samples, epsilon=args.epsilon, delta=args.delta, inner_samples=args.inner_samples)
        result, counts = compare_sampled(a, b, args.measure, plan, args.tnorm, args.budget)
        seed = args.seed
    inputs = [{"path": p, "sha256": sha256(p)} for p in (args.file1, path2)]
    return EvaluationReport(args.measure, get_base(args.measure).name, args.mode, result, params, seed,
                            inputs, counts, time.perf_counter() - t0)


# --- cluster ---------------------------------------------------------------------------

FITTERS = {"km": cl.kmeans, "rkm": cl.rough_kmeans, "fcm": cl.fuzzy_cmeans,
           "pcm": cl.possibilistic_cmeans, "ecm": cl.evidential_cmeans}


def cmd_cluster(args) -> EvaluationReport:
    t0 = time.perf_counter()
    ds = load_dataset(args.dataset, label_col=args.label_col)
    cfg = cl.FitConfig(k=args.k, seed=args.seed, n_init=args.n_init, max_iter=args.max_iter, tol=args.tol,
                       m=args.m, epsilon=args.rkm_epsilon, w_lower=args.w_lower, w_upper=args.w_upper,
                       alpha=args.alpha, beta=args.beta, delta=args.ecm_delta)
    fit = FITTERS[args.algorithm]
    kw = {"empty_set": args.empty_set} if args.algorithm == "ecm" else {}
    c, info = fit(ds, cfg, return_info=True, **kw)
    if args.prune > 0 and isinstance(c, SoftClustering):
        c = cl.prune_masses(c, args.prune)
    sc = c if isinstance(c, SoftClustering) else SoftClustering.from_rough(c) \
        if isinstance(c, RoughClustering) else SoftClustering.from_hard(c)
    if args.out:
        write_clustering(sc, args.out)
    params = {k: getattr(cfg, k) for k in ("k", "n_init", "max_iter", "tol", "m", "epsilon", "w_lower",
                                            "w_upper", "alpha", "beta", "delta")}
    result = {"kind": classify(sc).value, "n": sc.n, "objective": info.objective, "iterations": info.n_iter,
              "best_seed": info.seed, "output": args.out}
    return EvaluationReport("fit", args.algorithm, "exact", result, params, args.seed,
                            [{"path": args.dataset, "sha256": sha256(args.dataset)}], {}, time.perf_counter() - t0)


# --- reproduce-iris --------------------------------------------------------------------

def cmd_reproduce_iris(args):
    from .reproduce import IrisConfig, render, run_iris, to_dict
    cfg = IrisConfig(seed=args.seed, n_init=args.n_init, samples=args.samples, inner_samples=args.inner_samples,
                     budget=args.budget,
                     workers=args.threads, w_lower=args.w_lower, w_upper=args.w_upper, prune=args.prune,
                     algorithms=tuple(a.upper() for a in args.algorithms))
    t0 = time.perf_counter()
    table = run_iris(cfg)
    doc = {"config": {k: getattr(cfg, k) for k in cfg.__dataclass_fields__}, "table": to_dict(table),
           "seconds": round(time.perf_counter() - t0, 3), "note": SIMILARITY_NOTE}
    return doc, render(table)


# --- axioms ----------------------------------------------------------------------------

def _random_rcs(n, k, count, rng, hard_fraction=0.3):
    frame = Frame.of_size(k)
    out = []
    for _ in range(count):
        if rng.random() < hard_fraction:
            out.append(RoughClustering(frame, tuple(1 << int(v) for v in rng.integers(0, k, n))))
        else:
            out.append(RoughClustering(frame, tuple(int(v) for v in rng.integers(1, 1 << k, n))))
    return out


def _rc_equal(x, y):
    from .distributional import compatible_partitions
    return compatible_partitions(x, None) == compatible_partitions(y, None)


def triangle_counterexample(base=RAND):
    """Three rough clusterings whose lower-bound distances break the triangle inequality."""
    frame = Frame.of_size(2)
    r1 = RoughClustering(frame, (1, 1, 2))
    r2 = RoughClustering(frame, (1, 3, 2))
    r3 = RoughClustering(frame, (1, 2, 2))
    return [r1, r2, r3]


def cmd_axioms(args):
    from .metrics import all_hard_clusterings
    rng = make_rng(args.seed, 7)
    measure = args.measure
    k = args.k or 2
    base = get_base(args.base)
    if measure in ("rand", "partition"):
        d = get_base(measure)
        if args.exhaustive:
            points = all_hard_clusterings(args.n, args.k)
        else:
            frame = Frame.of_size(k)
            points = [HardClustering(frame, tuple(int(v) for v in rng.integers(0, k, args.n)))
                      for _ in range(args.count)]
        report = check_axioms(points, d)
    else:
        if args.construction:
            points = triangle_counterexample()
        else:
            points = _random_rcs(args.n, k, args.count, rng)
            if args.versus_hard:
                points += [RoughClustering.from_hard(h) for h in all_hard_clusterings(args.n, k)][:args.count]
        if measure == "upper":
            def d(x, y):
                return rough_interval(x, y, base, args.budget).upper
        elif measure == "lower":
            def d(x, y):
                return rough_interval(x, y, base, args.budget).lower
        else:
            from .distributional import compatible_hcs
            from .metrics import hausdorff

            def d(x, y):
                return hausdorff(list(compatible_hcs(x, args.budget)), list(compatible_hcs(y, args.budget)), base)
        report = check_axioms(points, d, _rc_equal)
    doc = {"measure": measure, "base": base.name, "points": report.n_points, "verdict": report.verdict(),
           "axioms": report.flags(), "max_value": report.max_value,
           "counterexamples": {a: [[repr(points[i]) for i in c] for c in cs]
                               for a, cs in report.counterexamples.items()}}
    lines = [f"{measure} over {report.n_points} clusterings: {report.verdict()}"]
    lines += [f"  {a:<10} {'holds' if ok else 'FAILS'}" for a, ok in report.flags().items()]
    for a, cs in doc["counterexamples"].items():
        lines.append(f"  {a} counterexample: " + " ; ".join(cs[0]))
    return doc, "\n".join(lines)


# --- bench -----------------------------------------------------------------------------

def cmd_bench(args):
    rng = make_rng(args.seed, 11)
    rows = []
    for n in args.n:
        mu1 = rng.dirichlet(np.ones(args.k), n)
        mu2 = rng.dirichlet(np.ones(args.k), n)
        t0 = time.perf_counter()
        e = fuzzy_rand_expectation_fast(mu1, mu2)
        rows.append({"task": "fuzzy_rand_expectation_fast", "n": n, "value": e,
                     "seconds": time.perf_counter() - t0})
        f1 = SoftClustering.from_memberships(mu1)
        f2 = SoftClustering.from_memberships(mu2)
        for s in args.samples:
            plan = SamplePlan(samples=s, seed=args.seed, workers=args.threads)
            t0 = time.perf_counter()
            r = approximate(f1, f2, RAND, plan)
            rows.append({"task": "sampled fuzzy Rand", "n": n, "samples": s, "value": r.estimate,
                         "seconds": time.perf_counter() - t0})
    lines = [f"{r['task']:<28} n={r['n']:<6} s={r.get('samples', '-')!s:<7} value={r['value']:.4f}  "
             f"{r['seconds']:.3f}s" for r in rows]
    return {"rows": rows}, "\n".join(lines)


# --- parser ----------------------------------------------------------------------------

def _global(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--threads", type=int, default=1, help="worker threads for sampling (results do not depend on it)")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                   help=f"maximum enumeration count for exact computations (default {DEFAULT_BUDGET})")
    p.add_argument("--output", choices=("json", "table"), default="table")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="softcompare", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compare", help="compare two clusterings",
                       description="Compare two clustering files (or one file and dataset labels). " + SIMILARITY_NOTE)
    _global(p)
    p.add_argument("file1")
    p.add_argument("file2", nargs="?")
    p.add_argument("--dataset", help="CSV whose label column is the second clustering")
    p.add_argument("--label-col")
    p.add_argument("--measure", choices=("rand", "partition"), default="rand")
    p.add_argument("--mode", choices=("exact", "sample"), default="exact")
    p.add_argument("--samples", type=int, default=0, help="sample count (default: from --epsilon and --delta)")
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--delta", type=float, default=DEFAULT_DELTA)
    p.add_argument("--inner-samples", type=int, default=DEFAULT_INNER_SAMPLES,
                   help="compatible pairs per focal pair when the evidential estimator falls back to nesting")
    p.add_argument("--tnorm", choices=TNORMS, default="min")
    p.add_argument("--d-m", choices=MASS_METRICS, default="jousselme",
                   help="mass distance for the pairwise evidential Rand index reported alongside")
    p.add_argument("--empty-set", choices=EMPTY_SET_POLICIES, default="redistribute-omega")

    p = sub.add_parser("cluster", help="run a clusterer on a CSV dataset")
    _global(p)
    p.add_argument("dataset")
    p.add_argument("--algorithm", choices=sorted(FITTERS), default="km")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--label-col")
    p.add_argument("--out", "-o", help="write the clustering file here")
    p.add_argument("--n-init", type=int, default=1)
    p.add_argument("--max-iter", type=int, default=300)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--m", type=float, default=2.0, help="FCM/PCM fuzzifier")
    p.add_argument("--rkm-epsilon", type=float, default=1.1)
    p.add_argument("--w-lower", type=float, default=0.7)
    p.add_argument("--w-upper", type=float, default=0.3)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--ecm-delta", type=float, default=10.0)
    p.add_argument("--empty-set", choices=EMPTY_SET_POLICIES, default="redistribute-omega")
    p.add_argument("--prune", type=float, default=0.0, help="drop focal sets below this mass")

    from .reproduce import ALGORITHMS, IRIS_RKM_WEIGHTS
    p = sub.add_parser("reproduce-iris", help="Table of D-RI, S-RI, D-PD, S-PD on Iris for five clusterers",
                       description="Runs KM, RKM (epsilon 1.1), FCM and PCM (m 5) and ECM (alpha 5, beta 5, "
                                   "delta 10) on the bundled Iris data. Each fitter tries seeds seed .. "
                                   "seed+n_init-1 and keeps the lowest objective. RI rows are similarities. "
                                   + SIMILARITY_NOTE)
    _global(p)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--inner-samples", type=int, default=DEFAULT_INNER_SAMPLES)
    p.add_argument("--n-init", type=int, default=10, help="seed sweep size per fitter (default 10)")
    p.add_argument("--w-lower", type=float, default=IRIS_RKM_WEIGHTS[0])
    p.add_argument("--w-upper", type=float, default=IRIS_RKM_WEIGHTS[1])
    p.add_argument("--prune", type=float, default=0.0, help="drop soft focal sets below this mass before scoring")
    p.add_argument("--algorithms", nargs="+", default=list(ALGORITHMS), type=str.upper, choices=ALGORITHMS)

    p = sub.add_parser("axioms", help="check metric axioms on generated clusterings")
    _global(p)
    p.add_argument("--measure", choices=("rand", "partition", "upper", "lower", "hausdorff"), default="rand",
                   help="a base distance on hard clusterings, or an interval bound / Hausdorff on rough ones")
    p.add_argument("--base", choices=("rand", "partition"), default="rand")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--k", type=int, default=None,
                   help="clusters in the frame (default: unrestricted with --exhaustive, else 2)")
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--exhaustive", action="store_true", help="all partitions of n objects (base distances only)")
    p.add_argument("--versus-hard", action="store_true", help="add hard clusterings to the rough family")
    p.add_argument("--construction", action="store_true",
                   help="use three fixed rough clusterings whose lower bounds break the triangle inequality")

    p = sub.add_parser("bench", help="time the closed-form and sampled fuzzy Rand expectation")
    _global(p)
    p.add_argument("--n", type=int, nargs="+", default=[250, 500, 1000])
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--samples", type=int, nargs="+", default=[1000, 2000])
    return parser


def _emit(args, doc, text):
    if args.output == "json":
        print(json.dumps(doc, indent=2, default=str))
    else:
        print(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.budget is not None and args.budget <= 0:
        args.budget = None
    try:
        if args.command == "compare":
            rep = cmd_compare(args)
            _emit(args, rep.to_dict(), rep.to_table())
        elif args.command == "cluster":
            rep = cmd_cluster(args)
            _emit(args, rep.to_dict(), rep.to_table())
        elif args.command == "reproduce-iris":
            _emit(args, *cmd_reproduce_iris(args))
        elif args.command == "axioms":
            _emit(args, *cmd_axioms(args))
        else:
            _emit(args, *cmd_bench(args))
    except (SoftCompareError, OSError) as e:
        err = e.to_dict() if isinstance(e, SoftCompareError) else {"error": "IOError", "message": str(e)}
        if args.output == "json":
            print(json.dumps(err, indent=2, default=str))
        else:
            print(f"error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
