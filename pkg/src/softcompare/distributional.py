"""Distributional comparison of soft clusterings.

A soft clustering induces a distribution over rough clusterings (the
product of the per-object mass functions), and every rough clustering is
the set of hard clusterings compatible with it. Comparing two soft
clusterings with a base distance ``d`` on hard clusterings then yields:

* a set of values for two rough clusterings,
* a probability distribution over values for two fuzzy clusterings,
* a possibility distribution over values for two possibilistic clusterings,
* a mass function over value sets in the general (evidential) case.

All exact routines enumerate and therefore refuse inputs whose
enumeration count exceeds ``budget``.
"""

from __future__ import annotations

import bisect
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import BudgetExceeded, MismatchedObjectCount, NotFuzzy, UnknownTNorm, ValidationError
from .metrics import RAND, get_base
from .model import (
    TOL,
    Frame,
    HardClustering,
    RoughClustering,
    SoftClustering,
    as_soft,
    is_fuzzy,
    is_possibilistic,
    mask_members,
    popcount,
)

DEFAULT_BUDGET = 10**6
TNORMS = ("min", "product")


def _suggest_samples():
    from .sampling import DEFAULT_DELTA, DEFAULT_EPSILON, required_samples
    return required_samples(DEFAULT_EPSILON, DEFAULT_DELTA)


def _guard(what: str, count: int, budget: int | None):
    if budget is not None and count > budget:
        raise BudgetExceeded(what, count, budget, _suggest_samples())


# --- result types ----------------------------------------------------------------

class _Grouper:
    """Maps floats to representatives so that values within ``tol`` coincide."""

    def __init__(self, tol: float = TOL):
        self.tol = tol
        self.reps: list[float] = []

    def __call__(self, v: float) -> float:
        reps = self.reps
        i = bisect.bisect_left(reps, v)
        if i < len(reps) and reps[i] - v <= self.tol:
            return reps[i]
        if i > 0 and v - reps[i - 1] <= self.tol:
            return reps[i - 1]
        reps.insert(i, v)
        return v


def _dedupe(values, tol: float = TOL) -> tuple:
    out: list[float] = []
    for v in sorted(float(v) for v in values):
        if out and v - out[-1] <= tol:
            continue
        out.append(v)
    return tuple(out)


@dataclass(frozen=True)
class ValueSet:
    """Sorted, deduplicated set of distance values."""

    values: tuple

    def __post_init__(self):
        vals = _dedupe(self.values)
        if not vals:
            raise ValidationError("a value set cannot be empty")
        object.__setattr__(self, "values", vals)

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def __contains__(self, v):
        return any(abs(v - u) <= TOL for u in self.values)

    @property
    def lower(self) -> float:
        return self.values[0]

    @property
    def upper(self) -> float:
        return self.values[-1]

    def isclose(self, other: ValueSet, tol: float = TOL) -> bool:
        return len(self) == len(other) and all(abs(a - b) <= tol for a, b in zip(self, other))


@dataclass(frozen=True)
class ValueDistribution:
    """Weights over distance values; ``kind`` is ``probability`` or ``possibility``."""

    weights: tuple
    kind: str = "probability"

    def __post_init__(self):
        items = tuple(sorted((float(v), float(w)) for v, w in self.weights))
        object.__setattr__(self, "weights", items)
        if self.kind not in ("probability", "possibility"):
            raise ValidationError(f"unknown distribution kind {self.kind!r}")
        if self.kind == "probability" and abs(math.fsum(w for _, w in items) - 1.0) > TOL:
            raise ValidationError("probability weights must sum to 1")

    def as_dict(self) -> dict:
        return dict(self.weights)

    @property
    def support(self) -> ValueSet:
        return ValueSet(tuple(v for v, _ in self.weights))

    @property
    def expectation(self) -> float:
        if self.kind != "probability":
            raise ValidationError("expectation is defined for probability distributions only")
        return math.fsum(v * w for v, w in self.weights)

    def get(self, v: float, default: float = 0.0) -> float:
        for u, w in self.weights:
            if abs(u - v) <= TOL:
                return w
        return default

    def isclose(self, other: ValueDistribution, tol: float = TOL) -> bool:
        if self.kind != other.kind or len(self.weights) != len(other.weights):
            return False
        return all(abs(a - c) <= tol and abs(b - d) <= tol
                   for (a, b), (c, d) in zip(self.weights, other.weights))


@dataclass(frozen=True)
class ValueSetMass:
    """Mass function over value sets."""

    masses: tuple

    def __post_init__(self):
        items = tuple(sorted(((vs if isinstance(vs, ValueSet) else ValueSet(tuple(vs)), float(m))
                              for vs, m in self.masses), key=lambda t: t[0].values))
        object.__setattr__(self, "masses", items)
        if any(m <= 0 for _, m in items):
            raise ValidationError("value-set masses must be positive")
        if abs(math.fsum(m for _, m in items) - 1.0) > TOL:
            raise ValidationError("value-set masses must sum to 1")

    def __iter__(self):
        return iter(self.masses)

    def __len__(self):
        return len(self.masses)

    def as_dict(self) -> dict:
        return {vs.values: m for vs, m in self.masses}

    def mass_of(self, values: Sequence[float]) -> float:
        target = ValueSet(tuple(values))
        return math.fsum(m for vs, m in self.masses if vs.isclose(target))

    def isclose(self, other: ValueSetMass, tol: float = TOL) -> bool:
        if len(self) != len(other):
            return False
        return all(a.isclose(b, tol) and abs(ma - mb) <= tol
                   for (a, ma), (b, mb) in zip(self.masses, other.masses))


@dataclass(frozen=True)
class IntervalSummary:
    lower: float
    upper: float

    def __post_init__(self):
        if self.lower > self.upper + TOL:
            raise ValidationError(f"interval lower bound {self.lower} exceeds upper {self.upper}")

    def as_similarity(self) -> tuple:
        return (1.0 - self.upper, 1.0 - self.lower)


@dataclass(frozen=True)
class ExpectationSummary:
    lower: float
    upper: float

    def __post_init__(self):
        if self.lower > self.upper + TOL:
            raise ValidationError(f"lower expectation {self.lower} exceeds upper {self.upper}")

    def as_similarity(self) -> tuple:
        return (1.0 - self.upper, 1.0 - self.lower)


def interval_summary(vs: ValueSet) -> IntervalSummary:
    return IntervalSummary(vs.lower, vs.upper)


def expectation_summary(e: ValueSetMass) -> ExpectationSummary:
    lo = math.fsum(m * vs.lower for vs, m in e)
    hi = math.fsum(m * vs.upper for vs, m in e)
    return ExpectationSummary(lo, min(max(hi, lo), 1.0))


# --- distribution over rough clusterings ---------------------------------------------

@dataclass(frozen=True)
class RCDistribution:
    """Focal rough clusterings with their masses."""

    frame: Frame
    focal: tuple

    def __post_init__(self):
        focal = tuple((r, float(m)) for r, m in self.focal)
        object.__setattr__(self, "focal", focal)
        if not focal:
            raise ValidationError("empty RC distribution")
        if any(m <= 0 for _, m in focal):
            raise ValidationError("focal rough clusterings need positive mass")
        if len({r for r, _ in focal}) != len(focal):
            raise ValidationError("duplicate focal rough clusterings")
        if abs(math.fsum(m for _, m in focal) - 1.0) > TOL:
            raise ValidationError("RC masses must sum to 1")
        ns = {r.n for r, _ in focal}
        if len(ns) != 1:
            raise ValidationError("focal rough clusterings over different object counts")

    @property
    def n(self) -> int:
        return self.focal[0][0].n

    def __len__(self):
        return len(self.focal)

    def __iter__(self):
        return iter(self.focal)

    def mass(self, r: RoughClustering) -> float:
        for rr, m in self.focal:
            if rr == r:
                return m
        return 0.0

    def compatible_total(self) -> int:
        """Sum over focal RCs of the number of compatible hard clusterings."""
        return sum(r.compatible_count() for r, _ in self.focal)


def _rc_count(m: SoftClustering) -> int:
    return math.prod(len(f) for f in m.masses)


def _compatible_total(m: SoftClustering) -> int:
    return math.prod(sum(popcount(a) for a, _ in f) for f in m.masses)


def distribution_over_rcs(m: SoftClustering, budget: int | None = DEFAULT_BUDGET) -> RCDistribution:
    """Product distribution over rough clusterings, one focal set per object.

    The mass of a rough clustering ``R`` is the product over objects of
    ``m_x(R(x))``.
    """
    m = as_soft(m)
    _guard("focal rough clusterings", _rc_count(m), budget)
    fixed = [f.focal[0][0] if f.is_logical else None for f in m.masses]
    uncertain = [x for x, f in enumerate(m.masses) if not f.is_logical]
    uncertain.sort(key=lambda x: len(m.masses[x]))
    out = []
    regions = list(fixed)

    def rec(i, mass):
        if i == len(uncertain):
            out.append((RoughClustering(m.frame, tuple(regions)), mass))
            return
        x = uncertain[i]
        for a, v in m.masses[x]:
            regions[x] = a
            rec(i + 1, mass * v)

    rec(0, 1.0)
    # products of masses may drift from 1 by rounding; keep them as computed
    focal = tuple(out)
    total = math.fsum(v for _, v in focal)
    if abs(total - 1.0) > TOL:
        focal = tuple((r, v / total) for r, v in focal)
    return RCDistribution(m.frame, focal)


def _as_rc_distribution(m, budget) -> RCDistribution:
    if isinstance(m, RCDistribution):
        return m
    if isinstance(m, RoughClustering):
        return RCDistribution(m.frame, ((m, 1.0),))
    if isinstance(m, HardClustering):
        return RCDistribution(m.frame, ((RoughClustering.from_hard(m), 1.0),))
    return distribution_over_rcs(m, budget)


# --- compatible hard clusterings -----------------------------------------------------

def gray_changes(radices: Sequence[int]) -> Iterator[tuple]:
    """Loopless reflected mixed-radix Gray code.

    Starting from the all-zero word, yields ``(coordinate, new_digit)`` for
    every subsequent word; consecutive words differ in exactly one
    coordinate. Coordinates with radix 1 never change.
    """
    if any(r < 1 for r in radices):
        raise ValidationError(f"radices must be positive, got {list(radices)}")
    live = [i for i, r in enumerate(radices) if r > 1]
    if len(live) < len(radices):
        for j, v in gray_changes([radices[i] for i in live]):
            yield live[j], v
        return
    n = len(radices)
    a = [0] * n
    f = list(range(n + 1))
    o = [1] * n
    while True:
        j = f[0]
        f[0] = 0
        if j == n:
            return
        a[j] += o[j]
        if a[j] == 0 or a[j] == radices[j] - 1:
            o[j] = -o[j]
            f[j] = f[j + 1]
            f[j + 1] = j + 1
        yield j, a[j]


def _coordinates(r: RoughClustering):
    """Ambiguous objects (smallest regions first) with their admissible clusters."""
    members = [mask_members(reg) for reg in r.regions]
    start = [mm[0] for mm in members]
    coords = sorted((x for x, mm in enumerate(members) if len(mm) > 1), key=lambda x: len(members[x]))
    return start, coords, members


def compatible_hcs(r: RoughClustering, budget: int | None = DEFAULT_BUDGET) -> Iterator[HardClustering]:
    """Every hard clustering ``C`` with ``C(x)`` in ``R(x)`` for all objects, once each."""
    _guard("compatible hard clusterings", r.compatible_count(), budget)
    labels, coords, members = _coordinates(r)
    frame = r.frame
    yield HardClustering(frame, tuple(labels))
    for j, digit in gray_changes([len(members[x]) for x in coords]):
        x = coords[j]
        labels[x] = members[x][digit]
        yield HardClustering(frame, tuple(labels))


def _check_same_n(a, b):
    if a.n != b.n:
        raise MismatchedObjectCount(f"{a.n} vs {b.n} objects")
    if a.n < 2:
        raise ValidationError("distributional measures need at least two objects")


def _scan_rough(r1: RoughClustering, r2: RoughClustering, base):
    """Yield the base distance for every compatible pair (incremental evaluation)."""
    l1, c1, m1 = _coordinates(r1)
    l2, c2, m2 = _coordinates(r2)
    ev = base.evaluator(l1, l2, r1.frame.k, r2.frame.k)
    yield ev.value()
    radices = [len(m1[x]) for x in c1] + [len(m2[x]) for x in c2]
    split = len(c1)
    for j, digit in gray_changes(radices):
        if j < split:
            x = c1[j]
            ev.move1(x, m1[x][digit])
        else:
            x = c2[j - split]
            ev.move2(x, m2[x][digit])
        yield ev.value()


def _pair_count(r1: RoughClustering, r2: RoughClustering) -> int:
    return r1.compatible_count() * r2.compatible_count()


def distributional_rough(r1: RoughClustering, r2: RoughClustering, base=RAND,
                         budget: int | None = DEFAULT_BUDGET) -> ValueSet:
    """Set of base distances between all compatible pairs of hard clusterings."""
    r1, r2 = _as_rough(r1), _as_rough(r2)
    _check_same_n(r1, r2)
    base = get_base(base)
    _guard("compatible pairs", _pair_count(r1, r2), budget)
    return ValueSet(tuple(set(_scan_rough(r1, r2, base))))


def rough_interval(r1: RoughClustering, r2: RoughClustering, base=RAND,
                   budget: int | None = DEFAULT_BUDGET) -> IntervalSummary:
    """Minimum and maximum base distance over compatible pairs, without building the set."""
    r1, r2 = _as_rough(r1), _as_rough(r2)
    _check_same_n(r1, r2)
    base = get_base(base)
    _guard("compatible pairs", _pair_count(r1, r2), budget)
    lo = math.inf
    hi = -math.inf
    for v in _scan_rough(r1, r2, base):
        if v < lo:
            lo = v
        if v > hi:
            hi = v
    return IntervalSummary(lo, hi)


def _as_rough(r) -> RoughClustering:
    if isinstance(r, RoughClustering):
        return r
    if isinstance(r, HardClustering):
        return RoughClustering.from_hard(r)
    if isinstance(r, SoftClustering):
        return r.to_rough()
    raise TypeError(f"expected a rough clustering, got {type(r).__name__}")


# --- weighted hard-clustering supports (fuzzy / possibilistic) -------------------------

def _support_table(mu: np.ndarray, combine: str, budget: int | None, what: str):
    """All hard clusterings with positive weight under per-object weights ``mu``.

    Returns a label matrix (one clustering per row) and the joint weights,
    combined by product or minimum.
    """
    n, k = mu.shape
    options = [np.flatnonzero(mu[x] > 0) for x in range(n)]
    count = math.prod(len(o) for o in options)
    _guard(what, count, budget)
    labels = np.array([[o[0] for o in options]], dtype=np.intp)
    weights = np.ones(1)
    for x in sorted(range(n), key=lambda x: len(options[x])):
        opt = options[x]
        w = mu[x, opt]
        if len(opt) == 1:
            weights = weights * w[0] if combine == "product" else np.minimum(weights, w[0])
            continue
        labels = np.repeat(labels, len(opt), axis=0)
        labels[:, x] = np.tile(opt, len(labels) // len(opt))
        weights = np.repeat(weights, len(opt))
        ww = np.tile(w, len(weights) // len(opt))
        weights = weights * ww if combine == "product" else np.minimum(weights, ww)
    return labels, weights


def _pairwise_chunks(base, l1, l2, k1, k2, chunk=4096):
    for lo in range(0, len(l1), chunk):
        yield lo, base.pairwise(l1[lo:lo + chunk], l2, k1, k2)


def distributional_fuzzy(f1: SoftClustering, f2: SoftClustering, base=RAND,
                         budget: int | None = DEFAULT_BUDGET) -> ValueDistribution:
    """Distribution of the base distance when each side draws a hard clustering from its memberships."""
    f1, f2 = as_soft(f1), as_soft(f2)
    _check_same_n(f1, f2)
    for side, f in (("first", f1), ("second", f2)):
        if not is_fuzzy(f):
            raise NotFuzzy(f"{side} argument is not a fuzzy clustering")
    base = get_base(base)
    _guard("hard clustering pairs", _fuzzy_count(f1) * _fuzzy_count(f2), budget)
    l1, p1 = _support_table(f1.memberships(), "product", None, "")
    l2, p2 = _support_table(f2.memberships(), "product", None, "")
    group = _Grouper()
    acc: dict[float, list] = defaultdict(list)
    for lo, dm in _pairwise_chunks(base, l1, l2, f1.frame.k, f2.frame.k):
        w = np.outer(p1[lo:lo + len(dm)], p2)
        for v, wt in _accumulate(dm, w):
            acc[group(v)].append(wt)
    weights = {v: math.fsum(ws) for v, ws in acc.items()}
    total = math.fsum(weights.values())
    return ValueDistribution(tuple((v, w / total) for v, w in weights.items()), "probability")


def _fuzzy_count(f: SoftClustering) -> int:
    return math.prod(len(m) for m in f.masses)


def _accumulate(dm: np.ndarray, w: np.ndarray):
    """Sum weights per distinct value of a distance matrix."""
    flat = dm.ravel()
    vals, inv = np.unique(flat, return_inverse=True)
    sums = np.bincount(inv, weights=w.ravel(), minlength=len(vals))
    return zip(vals.tolist(), sums.tolist())


def distributional_possibilistic(p1: SoftClustering, p2: SoftClustering, base=RAND, tnorm: str = "min",
                                 budget: int | None = DEFAULT_BUDGET) -> ValueDistribution:
    """Possibility of each distance value.

    The possibility of a hard clustering is the t-norm of its per-object
    membership degrees; a value ``v`` receives the dual s-conorm of
    ``Poss1(C1) t Poss2(C2)`` over all pairs with ``d(C1, C2) = v``.
    """
    if tnorm not in TNORMS:
        raise UnknownTNorm(f"unknown t-norm {tnorm!r}; expected one of {TNORMS}")
    p1, p2 = as_soft(p1), as_soft(p2)
    _check_same_n(p1, p2)
    for side, p in (("first", p1), ("second", p2)):
        if not (is_possibilistic(p) or is_fuzzy(p)):
            raise ValidationError(f"{side} argument is neither possibilistic nor fuzzy")
    base = get_base(base)
    mu1, mu2 = p1.memberships(), p2.memberships()
    count = math.prod(int((row > 0).sum()) for row in mu1) * math.prod(int((row > 0).sum()) for row in mu2)
    _guard("hard clustering pairs", count, budget)
    combine = "product" if tnorm == "product" else "min"
    l1, w1 = _support_table(mu1, combine, None, "")
    l2, w2 = _support_table(mu2, combine, None, "")
    group = _Grouper()
    best: dict[float, float] = {}
    for lo, dm in _pairwise_chunks(base, l1, l2, p1.frame.k, p2.frame.k):
        a = w1[lo:lo + len(dm)]
        w = np.outer(a, w2) if tnorm == "product" else np.minimum.outer(a, w2)
        flat = dm.ravel()
        vals, inv = np.unique(flat, return_inverse=True)
        ww = w.ravel()
        for idx, v in enumerate(vals.tolist()):
            sel = ww[inv == idx]
            g = group(v)
            if tnorm == "min":
                agg = float(sel.max())
                best[g] = max(best.get(g, 0.0), agg)
            else:
                # probabilistic sum over the pairs: 1 - prod(1 - w)
                agg = 1.0 - float(np.prod(1.0 - sel))
                prev = best.get(g, 0.0)
                best[g] = prev + agg - prev * agg
    return ValueDistribution(tuple((v, w) for v, w in best.items() if w > 0), "possibility")


# --- evidential -------------------------------------------------------------------------

def _work(m) -> int:
    if isinstance(m, RCDistribution):
        return m.compatible_total()
    return _compatible_total(as_soft(m))


def distributional_evidential(m1, m2, base=RAND, budget: int | None = DEFAULT_BUDGET) -> ValueSetMass:
    """Mass function over value sets: each focal pair of rough clusterings contributes its value set.

    Either argument may be a soft, rough or hard clustering, or an
    :class:`RCDistribution` (e.g. from :func:`possibilistic_rc_distribution`).
    """
    base = get_base(base)
    _guard("compatible pairs over focal rough clusterings", _work(m1) * _work(m2), budget)
    d1 = _as_rc_distribution(m1, None)
    d2 = _as_rc_distribution(m2, None)
    _check_same_n(d1, d2)
    group = _Grouper()
    acc: dict[tuple, list] = defaultdict(list)
    for r1, w1 in d1:
        for r2, w2 in d2:
            key = tuple(sorted({group(v) for v in _scan_rough(r1, r2, base)}))
            acc[key].append(w1 * w2)
    return ValueSetMass(tuple((ValueSet(k), math.fsum(ws)) for k, ws in acc.items()))


def evidential_expectations(m1, m2, base=RAND, budget: int | None = DEFAULT_BUDGET) -> ExpectationSummary:
    """Lower and upper expectations of the distance, from per-focal-pair intervals."""
    base = get_base(base)
    _guard("compatible pairs over focal rough clusterings", _work(m1) * _work(m2), budget)
    d1 = _as_rc_distribution(m1, None)
    d2 = _as_rc_distribution(m2, None)
    _check_same_n(d1, d2)
    lows, highs = [], []
    for r1, w1 in d1:
        for r2, w2 in d2:
            iv = rough_interval(r1, r2, base, None)
            lows.append(w1 * w2 * iv.lower)
            highs.append(w1 * w2 * iv.upper)
    return ExpectationSummary(math.fsum(lows), math.fsum(highs))


def possibilistic_rc_distribution(p: SoftClustering, renormalize: bool = True) -> RCDistribution:
    """Consonant mass over hard clusterings equivalent to the joint possibility (minimum t-norm).

    The level cuts ``{C : Poss(C) >= a}`` of the joint possibility are the
    rough clusterings ``R_a(x) = {w : mu_x(w) >= a}``; level ``a_i`` gets
    mass ``a_i - a_(i+1)``. Per-object memberships are scaled to a maximum
    of 1 first when ``renormalize`` is set.
    """
    p = as_soft(p)
    mu = p.memberships()
    top = mu.max(axis=1, keepdims=True)
    if np.any(np.abs(top - 1.0) > TOL):
        if not renormalize:
            from .errors import SubnormalPossibility
            raise SubnormalPossibility("some object has maximum possibility below 1")
        mu = mu / top
    levels = _dedupe(mu[mu > 0].ravel())[::-1]
    merged = []
    for a in levels:
        if merged and merged[-1] - a <= TOL:
            continue
        merged.append(a)
    merged[0] = 1.0
    focal = []
    for i, a in enumerate(merged):
        nxt = merged[i + 1] if i + 1 < len(merged) else 0.0
        regions = tuple(int(sum(1 << j for j in np.flatnonzero(row >= a - TOL))) for row in mu)
        focal.append((RoughClustering(p.frame, regions), a - nxt))
    # distinct levels can produce identical cuts only when no object changes; merge them
    merged_focal: dict[RoughClustering, float] = {}
    for r, w in focal:
        merged_focal[r] = merged_focal.get(r, 0.0) + w
    return RCDistribution(p.frame, tuple(merged_focal.items()))


# --- closed form and compatibility ---------------------------------------------------

def fuzzy_rand_expectation_fast(f1, f2) -> float:
    """Expected ``1 - Rand`` between hard clusterings drawn from two fuzzy clusterings.

    For each pair of objects the probability of landing in the same cluster
    is ``s = sum_w mu_x(w) mu_y(w)`` on each side independently, so the pair
    agrees with probability ``s1 s2 + (1 - s1)(1 - s2)``. Runs in O(n^2 k).
    """
    mus = []
    for side, f in (("first", f1), ("second", f2)):
        if isinstance(f, np.ndarray):
            mu = np.asarray(f, dtype=float)
            if mu.ndim != 2 or np.any(mu < -TOL) or np.any(np.abs(mu.sum(axis=1) - 1) > 1e-6):
                raise NotFuzzy(f"{side} membership matrix is not fuzzy")
        else:
            f = as_soft(f)
            if not is_fuzzy(f):
                raise NotFuzzy(f"{side} argument is not a fuzzy clustering")
            mu = f.memberships()
        mus.append(mu)
    mu1, mu2 = mus
    n = mu1.shape[0]
    if mu2.shape[0] != n:
        raise MismatchedObjectCount(f"{n} vs {mu2.shape[0]} objects")
    if n < 2:
        raise ValidationError("need at least two objects")
    s1 = mu1 @ mu1.T
    s2 = mu2 @ mu2.T
    agree = s1 * s2 + (1.0 - s1) * (1.0 - s2)
    # diagonal entries are excluded: subtract them from the full sum
    total = agree.sum() - np.trace(agree)
    return float(1.0 - total / (n * (n - 1)))


def compatible_partitions(r: RoughClustering, budget: int | None = DEFAULT_BUDGET) -> set:
    """Distinct partitions (canonical label tuples) among the compatible hard clusterings."""
    return {c.canonical() for c in compatible_hcs(r, budget)}


def total_compatibility(m1, m2, budget: int | None = DEFAULT_BUDGET) -> bool:
    """True iff one partition is the only one compatible with every focal RC of both clusterings."""
    d1 = _as_rc_distribution(m1, budget)
    d2 = _as_rc_distribution(m2, budget)
    if d1.n != d2.n:
        raise MismatchedObjectCount(f"{d1.n} vs {d2.n} objects")
    seen: set | None = None
    for d in (d1, d2):
        _guard("compatible hard clusterings", d.compatible_total(), budget)
        for r, _ in d:
            parts = compatible_partitions(r, None)
            if len(parts) != 1:
                return False
            if seen is None:
                seen = parts
            elif parts != seen:
                return False
    return True


def per_object_consonant(p: SoftClustering, renormalize: bool = True) -> SoftClustering:
    """Possibilistic clustering rebuilt from its contour with per-object consonant masses."""
    from .model import possibility_to_consonant
    mu = as_soft(p).memberships()
    return SoftClustering(p.frame, tuple(possibility_to_consonant(row, renormalize=renormalize) for row in mu))


__all__ = [
    "DEFAULT_BUDGET", "TNORMS", "ValueSet", "ValueDistribution", "ValueSetMass", "IntervalSummary",
    "ExpectationSummary", "RCDistribution", "distribution_over_rcs", "compatible_hcs",
    "gray_changes", "distributional_rough", "rough_interval", "distributional_fuzzy",
    "distributional_possibilistic", "distributional_evidential", "evidential_expectations",
    "possibilistic_rc_distribution", "interval_summary", "expectation_summary",
    "fuzzy_rand_expectation_fast", "total_compatibility", "compatible_partitions", "per_object_consonant",
]
