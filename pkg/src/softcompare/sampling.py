"""Monte-Carlo approximations of distributional summaries.

Random numbers come from numpy's counter-based Philox generator. Samples
are produced in fixed-size blocks and block ``b`` always uses the stream
keyed by ``(seed, b)``, so results do not depend on how many worker
threads process the blocks.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .distributional import (
    RCDistribution,
    rough_interval,
)
from .errors import BaseNotNormalized, MismatchedObjectCount, NotFuzzy, OutOfRange, ValidationError
from .metrics import RAND, get_base
from .model import (
    HardClustering,
    RoughClustering,
    SoftClustering,
    as_soft,
    is_fuzzy,
    mask_members,
    popcount,
)

DEFAULT_EPSILON = 0.02
DEFAULT_DELTA = 0.05
DEFAULT_INNER_SAMPLES = 32
BLOCK = 1024
MODES = ("rough-interval", "fuzzy-expectation", "evidential-exact-inner", "evidential-nested")
NESTED_WARNING = ("nested sampling estimates each inner interval from a finite sample, which "
                  "narrows it; expect the lower estimate to be biased up and the upper one down")


def required_samples(epsilon: float, delta: float) -> int:
    """Smallest ``s`` with ``2 exp(-2 s epsilon^2) <= delta``."""
    if not (0 < epsilon < 1) or not (0 < delta < 1):
        raise OutOfRange(f"epsilon and delta must lie in (0, 1), got {epsilon}, {delta}")
    return max(1, math.ceil(math.log(2.0 / delta) / (2.0 * epsilon * epsilon)))


def hoeffding_epsilon(samples: int, delta: float) -> float:
    """Half-width ``eps`` solving ``2 exp(-2 s eps^2) = delta``."""
    if samples < 1 or not (0 < delta < 1):
        raise OutOfRange(f"need samples >= 1 and delta in (0, 1), got {samples}, {delta}")
    return math.sqrt(math.log(2.0 / delta) / (2.0 * samples))


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Independent Philox stream for ``(seed, stream)``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed) & (2**64 - 1), int(stream)])))


@dataclass(frozen=True)
class SamplePlan:
    samples: int = 0
    epsilon: float = DEFAULT_EPSILON
    delta: float = DEFAULT_DELTA
    mode: str = "fuzzy-expectation"
    inner_samples: int = DEFAULT_INNER_SAMPLES
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError(f"unknown sampling mode {self.mode!r}; expected one of {MODES}")
        if not (0 < self.epsilon < 1) or not (0 < self.delta < 1):
            raise OutOfRange("epsilon and delta must lie in (0, 1)")
        if self.samples == 0:
            object.__setattr__(self, "samples", required_samples(self.epsilon, self.delta))
        if self.samples < 1:
            raise OutOfRange(f"sample count must be positive, got {self.samples}")
        if self.inner_samples < 1:
            raise OutOfRange("inner sample count must be positive")
        if not 0 <= self.seed < 2**64:
            raise OutOfRange("seed must be a 64-bit unsigned integer")

    def with_mode(self, mode: str) -> SamplePlan:
        return SamplePlan(self.samples, self.epsilon, self.delta, mode, self.inner_samples, self.seed, self.workers)


@dataclass(frozen=True)
class ApproxResult:
    lower: float
    upper: float
    epsilon: float | None
    samples_used: int
    elapsed: float
    mode: str
    warnings: tuple = ()
    ecdf: tuple = field(default=(), repr=False)

    @property
    def estimate(self) -> float:
        return 0.5 * (self.lower + self.upper)

    def as_similarity(self) -> tuple:
        return (1.0 - self.upper, 1.0 - self.lower)

    def payload(self) -> dict:
        """Everything except the wall-clock time."""
        return {"lower": self.lower, "upper": self.upper, "epsilon": self.epsilon,
                "samples_used": self.samples_used, "mode": self.mode, "warnings": list(self.warnings)}


# --- region sources ---------------------------------------------------------------

class _RegionSource:
    """Draws per-object regions (bitmasks) from the distribution over rough clusterings."""

    def __init__(self, m):
        if isinstance(m, RCDistribution):
            self.frame = m.frame
            self.n = m.n
            self.table = np.array([r.regions for r, _ in m.focal], dtype=np.int64)
            self.probs = np.array([w for _, w in m.focal])
            self.probs /= self.probs.sum()
            self.per_object = None
        else:
            m = as_soft(m)
            self.frame = m.frame
            self.n = m.n
            self.per_object = []
            self.fixed = np.empty(m.n, dtype=np.int64)
            for x, f in enumerate(m.masses):
                masks = np.array([a for a, _ in f], dtype=np.int64)
                if len(masks) == 1:
                    self.fixed[x] = masks[0]
                else:
                    p = np.array([v for _, v in f])
                    self.per_object.append((x, masks, np.cumsum(p / p.sum())))
        self.k = self.frame.k

    def draw(self, rng: np.random.Generator, s: int) -> np.ndarray:
        if self.per_object is None:
            idx = rng.choice(len(self.probs), size=s, p=self.probs)
            return self.table[idx]
        out = np.repeat(self.fixed[None, :], s, axis=0)
        for x, masks, cum in self.per_object:
            u = rng.random(s)
            out[:, x] = masks[np.minimum(np.searchsorted(cum, u, side="right"), len(masks) - 1)]
        return out


class _UniformWithin:
    """Uniform choice of a cluster inside each region bitmask."""

    def __init__(self, k: int):
        self.k = k
        self.cache: dict[int, np.ndarray] = {}

    def _members(self, mask):
        mm = self.cache.get(mask)
        if mm is None:
            mm = self.cache[mask] = np.array(mask_members(int(mask)), dtype=np.int64)
        return mm

    def __call__(self, regions: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        regions = np.asarray(regions, dtype=np.int64)
        uniq, inv = np.unique(regions, return_inverse=True)
        inv = inv.reshape(regions.shape)
        sizes = np.array([popcount(int(u)) for u in uniq])
        width = int(sizes.max())
        lookup = np.zeros((len(uniq), width), dtype=np.int64)
        for i, u in enumerate(uniq):
            mm = self._members(int(u))
            lookup[i, :len(mm)] = mm
        pick = np.floor(rng.random(regions.shape) * sizes[inv]).astype(np.int64)
        return lookup[inv, pick]


def draw_hard(m, rng: np.random.Generator, size: int | None = None):
    """Hard clustering(s) drawn from a soft clustering.

    Each object first draws a focal set from its mass function and then a
    cluster uniformly inside it: uniform over ``C(R)`` for rough inputs and
    categorical for fuzzy ones. ``size`` returns a label matrix instead.
    """
    src = _RegionSource(m)
    s = 1 if size is None else size
    labels = _UniformWithin(src.k)(src.draw(rng, s), rng)
    if size is None:
        return HardClustering(src.frame, tuple(labels[0]))
    return labels


def draw_rc(m, rng: np.random.Generator, size: int | None = None):
    """Rough clustering(s) drawn from the product distribution over focal sets."""
    src = _RegionSource(m)
    regions = src.draw(rng, 1 if size is None else size)
    if size is None:
        return RoughClustering(src.frame, tuple(int(r) for r in regions[0]))
    return regions


# --- block runner --------------------------------------------------------------------

def _run_blocks(plan: SamplePlan, fn, total: int):
    """Apply ``fn(rng, count, block_index)`` to fixed-size blocks, in block order."""
    blocks = [(b, min(BLOCK, total - b * BLOCK)) for b in range(math.ceil(total / BLOCK))]

    def one(item):
        b, count = item
        return fn(make_rng(plan.seed, b), count, b)

    if plan.workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(plan.workers) as pool:
            return list(pool.map(one, blocks))
    return [one(item) for item in blocks]


def _check_inputs(a, b):
    if a.n != b.n:
        raise MismatchedObjectCount(f"{a.n} vs {b.n} objects")
    if a.n < 2:
        raise ValidationError("need at least two objects")


def _ecdf(values: np.ndarray) -> tuple:
    vals, counts = np.unique(values, return_counts=True)
    return tuple(zip(vals.tolist(), (np.cumsum(counts) / len(values)).tolist()))


def approx_interval_rough(r1, r2, base=RAND, plan: SamplePlan | None = None) -> ApproxResult:
    """Inner approximation of the value-set interval from uniformly drawn compatible pairs."""
    plan = plan or SamplePlan(mode="rough-interval")
    base = get_base(base)
    t0 = time.perf_counter()
    s1, s2 = _RegionSource(_rough(r1)), _RegionSource(_rough(r2))
    _check_inputs(s1, s2)
    u1, u2 = _UniformWithin(s1.k), _UniformWithin(s2.k)

    def block(rng, count, _):
        l1 = u1(s1.draw(rng, count), rng)
        l2 = u2(s2.draw(rng, count), rng)
        return base.rowwise(l1, l2, s1.k, s2.k)

    d = np.concatenate(_run_blocks(plan, block, plan.samples))
    return ApproxResult(float(d.min()), float(d.max()), None, len(d), time.perf_counter() - t0,
                        "rough-interval", ecdf=_ecdf(d))


def _rough(r):
    if isinstance(r, SoftClustering):
        return r.to_rough()
    return r


def approx_expectation_fuzzy(f1, f2, base=RAND, plan: SamplePlan | None = None) -> ApproxResult:
    """Sample mean of the base distance under independent draws from both fuzzy clusterings."""
    plan = plan or SamplePlan(mode="fuzzy-expectation")
    base = get_base(base)
    if not base.normalized:
        raise BaseNotNormalized(f"base distance {base.name!r} is not normalized")
    f1, f2 = as_soft(f1), as_soft(f2)
    for side, f in (("first", f1), ("second", f2)):
        if not is_fuzzy(f):
            raise NotFuzzy(f"{side} argument is not a fuzzy clustering")
    t0 = time.perf_counter()
    s1, s2 = _RegionSource(f1), _RegionSource(f2)
    _check_inputs(s1, s2)
    u1, u2 = _UniformWithin(s1.k), _UniformWithin(s2.k)

    def block(rng, count, _):
        l1 = u1(s1.draw(rng, count), rng)
        l2 = u2(s2.draw(rng, count), rng)
        return base.rowwise(l1, l2, s1.k, s2.k)

    d = np.concatenate(_run_blocks(plan, block, plan.samples))
    est = math.fsum(d.tolist()) / len(d)
    return ApproxResult(est, est, hoeffding_epsilon(len(d), plan.delta), len(d),
                        time.perf_counter() - t0, "fuzzy-expectation")


def approx_expectations_evidential(m1, m2, base=RAND, plan: SamplePlan | None = None,
                                   budget: int | None = None) -> ApproxResult:
    """Estimates of the lower and upper expected distance.

    ``evidential-exact-inner`` draws focal rough-clustering pairs and
    averages their exact intervals (each pair must fit in ``budget``);
    ``evidential-nested`` replaces each exact interval by the min/max over
    ``inner_samples`` compatible pairs.
    """
    from .distributional import DEFAULT_BUDGET
    plan = plan or SamplePlan(mode="evidential-exact-inner")
    if plan.mode not in ("evidential-exact-inner", "evidential-nested"):
        raise ValidationError(f"mode {plan.mode!r} is not an evidential mode")
    budget = DEFAULT_BUDGET if budget is None else budget
    base = get_base(base)
    if not base.normalized:
        raise BaseNotNormalized(f"base distance {base.name!r} is not normalized")
    t0 = time.perf_counter()
    s1 = _RegionSource(m1 if isinstance(m1, RCDistribution) else _soft_or_rc(m1))
    s2 = _RegionSource(m2 if isinstance(m2, RCDistribution) else _soft_or_rc(m2))
    _check_inputs(s1, s2)

    if plan.mode == "evidential-exact-inner":
        cache: dict = {}
        frame1, frame2 = s1.frame, s2.frame

        def block(rng, count, _):
            g1 = s1.draw(rng, count)
            g2 = s2.draw(rng, count)
            lo = np.empty(count)
            hi = np.empty(count)
            for i in range(count):
                key = (g1[i].tobytes(), g2[i].tobytes())
                iv = cache.get(key)
                if iv is None:
                    iv = rough_interval(RoughClustering(frame1, tuple(g1[i].tolist())),
                                        RoughClustering(frame2, tuple(g2[i].tolist())), base, budget)
                    cache[key] = iv
                lo[i] = iv.lower
                hi[i] = iv.upper
            return lo, hi

        warnings: tuple = ()
    else:
        u1, u2 = _UniformWithin(s1.k), _UniformWithin(s2.k)
        inner = plan.inner_samples

        def block(rng, count, _):
            g1 = s1.draw(rng, count)
            g2 = s2.draw(rng, count)
            l1 = u1(np.repeat(g1, inner, axis=0), rng)
            l2 = u2(np.repeat(g2, inner, axis=0), rng)
            d = base.rowwise(l1, l2, s1.k, s2.k).reshape(count, inner)
            return d.min(axis=1), d.max(axis=1)

        warnings = (NESTED_WARNING,)

    parts = _run_blocks(plan, block, plan.samples)
    lo = np.concatenate([p[0] for p in parts])
    hi = np.concatenate([p[1] for p in parts])
    n = len(lo)
    return ApproxResult(math.fsum(lo.tolist()) / n, math.fsum(hi.tolist()) / n,
                        hoeffding_epsilon(n, plan.delta), n, time.perf_counter() - t0, plan.mode, warnings)


def _soft_or_rc(m):
    if isinstance(m, (HardClustering, RoughClustering)):
        return as_soft(m)
    return m


def approximate(m1, m2, base=RAND, plan: SamplePlan | None = None, budget: int | None = None) -> ApproxResult:
    """Pick the sampling estimator that matches the kinds of both inputs.

    Rough-vs-rough inputs get the interval estimator, fuzzy-vs-fuzzy the
    expectation estimator and everything else the evidential one (exact
    inner intervals, falling back to nested sampling if a pair is too big).
    """
    from .errors import BudgetExceeded
    from .model import is_rough
    plan = plan or SamplePlan()
    if not isinstance(m1, RCDistribution) and not isinstance(m2, RCDistribution):
        a, b = as_soft(m1), as_soft(m2)
        if is_rough(a) and is_rough(b):
            return approx_interval_rough(a.to_rough(), b.to_rough(), base, plan.with_mode("rough-interval"))
        if is_fuzzy(a) and is_fuzzy(b):
            return approx_expectation_fuzzy(a, b, base, plan.with_mode("fuzzy-expectation"))
    if plan.mode == "evidential-nested":
        return approx_expectations_evidential(m1, m2, base, plan, budget)
    try:
        return approx_expectations_evidential(m1, m2, base, plan.with_mode("evidential-exact-inner"), budget)
    except BudgetExceeded:
        return approx_expectations_evidential(m1, m2, base, plan.with_mode("evidential-nested"), budget)


__all__ = [
    "DEFAULT_EPSILON", "DEFAULT_DELTA", "DEFAULT_INNER_SAMPLES", "MODES", "SamplePlan", "ApproxResult",
    "required_samples", "hoeffding_epsilon", "make_rng", "draw_hard", "draw_rc", "approx_interval_rough",
    "approx_expectation_fuzzy", "approx_expectations_evidential", "approximate",
]
