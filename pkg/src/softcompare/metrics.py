"""Comparison measures between hard clusterings and between evidential clusterings.

Every base distance used by the distributional machinery is a
:class:`BaseDistance`. Besides plain evaluation it can hand out an
incremental evaluator that tracks the contingency table while single
objects change cluster, which is what the enumeration code relies on.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import EmptySet, MismatchedObjectCount, UnknownKind, ValidationError
from .model import (
    TOL,
    HardClustering,
    PairRelationMass,
    SoftClustering,
    equivalent,
    pair_relation_mass,
)


def _check_pair(c1: HardClustering, c2: HardClustering, min_n: int = 1) -> int:
    if c1.n != c2.n:
        raise MismatchedObjectCount(f"{c1.n} vs {c2.n} objects")
    if c1.n < min_n:
        raise ValidationError(f"measure needs at least {min_n} objects, got {c1.n}")
    return c1.n


def contingency(c1: HardClustering, c2: HardClustering) -> np.ndarray:
    """k1 x k2 matrix of co-occurrence counts."""
    _check_pair(c1, c2)
    table = np.zeros((c1.frame.k, c2.frame.k), dtype=np.int64)
    np.add.at(table, (c1.array, c2.array), 1)
    return table


def _choose2(v):
    return v * (v - 1) // 2


def _rand_disagreements(table: np.ndarray) -> int:
    t = np.asarray(table, dtype=np.int64)
    s = int(_choose2(t).sum())
    a = int(_choose2(t.sum(axis=1)).sum())
    b = int(_choose2(t.sum(axis=0)).sum())
    return a + b - 2 * s


def rand_index(c1: HardClustering, c2: HardClustering, pairs: str = "distinct") -> float:
    """Fraction of object pairs on which both clusterings agree.

    ``pairs="distinct"`` (default) counts unordered pairs of distinct objects.
    ``pairs="all"`` counts ordered pairs including ``(x, x)``, the ``|X|^2``
    normalization found in parts of the literature.
    """
    n = _check_pair(c1, c2, 2)
    dis = _rand_disagreements(contingency(c1, c2))
    if pairs == "distinct":
        return 1.0 - dis / (n * (n - 1) // 2)
    if pairs == "all":
        return 1.0 - 2 * dis / (n * n)
    raise UnknownKind(f"unknown pair convention {pairs!r}")


def _max_matching(table: np.ndarray) -> int:
    rows, cols = linear_sum_assignment(table, maximize=True)
    return int(np.asarray(table)[rows, cols].sum())


def partition_moves(c1: HardClustering, c2: HardClustering) -> int:
    """Minimum number of objects to move so that ``c1`` becomes ``c2`` (up to relabeling)."""
    n = _check_pair(c1, c2)
    return n - _max_matching(contingency(c1, c2))


def partition_distance(c1: HardClustering, c2: HardClustering) -> float:
    """Minimum object moves between the two partitions, divided by ``n - 1``.

    The optimal cluster matching maximizes total overlap, which is the same
    as minimizing half the summed symmetric differences with empty clusters
    padding the smaller side.
    """
    n = _check_pair(c1, c2, 2)
    return partition_moves(c1, c2) / (n - 1)


def entropy(c: HardClustering, base: float = math.e) -> float:
    p = np.bincount(c.array, minlength=c.frame.k) / c.n
    p = p[p > 0]
    return float(-(p * np.log(p)).sum() / math.log(base))


def mutual_information(c1: HardClustering, c2: HardClustering, base: float = math.e) -> float:
    n = _check_pair(c1, c2)
    p = contingency(c1, c2) / n
    pi = p.sum(axis=1, keepdims=True)
    pj = p.sum(axis=0, keepdims=True)
    nz = p > 0
    mi = float((p[nz] * np.log(p[nz] / (pi @ pj)[nz])).sum() / math.log(base))
    return max(mi, 0.0)


# --- distances on pair-relation masses -------------------------------------

# Jaccard similarity between {s}, {not s} and {s, not s}
_JACCARD = np.array([[1.0, 0.0, 0.5],
                     [0.0, 1.0, 0.5],
                     [0.5, 0.5, 1.0]])

MASS_METRICS = ("l1", "jousselme")


def mass_metric(m1: PairRelationMass, m2: PairRelationMass, kind: str = "jousselme") -> float:
    """Normalized distance between two mass functions on {s, not s}."""
    diff = m1.as_array() - m2.as_array()
    if kind == "l1":
        return float(0.5 * np.abs(diff).sum())
    if kind == "jousselme":
        q = 0.5 * float(diff @ _JACCARD @ diff)
        return math.sqrt(max(q, 0.0))
    raise UnknownKind(f"unknown mass metric {kind!r}; expected one of {MASS_METRICS}")


def rand_evidential(m1: SoftClustering, m2: SoftClustering, kind: str = "jousselme") -> float:
    """Mean pair agreement ``1 - d_M`` between the relational masses of two clusterings."""
    if m1.n != m2.n:
        raise MismatchedObjectCount(f"{m1.n} vs {m2.n} objects")
    n = m1.n
    if n < 2:
        raise ValidationError("rand_evidential needs at least two objects")
    total = 0.0
    for x in range(n):
        for y in range(x + 1, n):
            total += 1.0 - mass_metric(pair_relation_mass(m1, x, y), pair_relation_mass(m2, x, y), kind)
    return total / (n * (n - 1) / 2)


# --- base distances for distributional measures ------------------------------

class BaseDistance:
    """Distance between hard clusterings over the same objects.

    Subclasses implement :meth:`from_table` when the value depends only on
    the contingency table; arbitrary callables are wrapped by
    :class:`CallableDistance`.
    """

    name = "base"
    normalized = True

    def __call__(self, c1: HardClustering, c2: HardClustering) -> float:
        _check_pair(c1, c2, 2)
        return self.from_table(contingency(c1, c2))

    def from_table(self, table: np.ndarray) -> float:
        raise NotImplementedError

    def evaluator(self, a1, a2, k1: int, k2: int) -> "_TableEvaluator":
        return _TableEvaluator(self, a1, a2, k1, k2)

    def pairwise(self, l1: np.ndarray, l2: np.ndarray, k1: int, k2: int) -> np.ndarray:
        """Distance matrix between rows of two label arrays."""
        out = np.empty((len(l1), len(l2)))
        for i, a in enumerate(l1):
            for j, b in enumerate(l2):
                t = np.zeros((k1, k2), dtype=np.int64)
                np.add.at(t, (a, b), 1)
                out[i, j] = self.from_table(t)
        return out

    def rowwise(self, l1: np.ndarray, l2: np.ndarray, k1: int, k2: int) -> np.ndarray:
        """Distance between row ``i`` of ``l1`` and row ``i`` of ``l2`` for every ``i``."""
        return self.from_tables(row_tables(l1, l2, k1, k2))

    def from_tables(self, tables: np.ndarray) -> np.ndarray:
        return np.array([self.from_table(t) for t in tables])

    def __repr__(self):
        return f"{type(self).__name__}()"


def row_tables(l1: np.ndarray, l2: np.ndarray, k1: int, k2: int) -> np.ndarray:
    """Stack of contingency tables, one per row pair; shape ``(s, k1, k2)``."""
    l1 = np.atleast_2d(np.asarray(l1, dtype=np.int64))
    l2 = np.atleast_2d(np.asarray(l2, dtype=np.int64))
    s = l1.shape[0]
    cell = l1 * k2 + l2 + (np.arange(s, dtype=np.int64) * (k1 * k2))[:, None]
    return np.bincount(cell.ravel(), minlength=s * k1 * k2).reshape(s, k1, k2)


class _TableEvaluator:
    """Maintains the contingency table under single-object label changes."""

    def __init__(self, base, a1, a2, k1, k2):
        self.base = base
        self.l1 = [int(v) for v in a1]
        self.l2 = [int(v) for v in a2]
        self.table = np.zeros((k1, k2), dtype=np.int64)
        np.add.at(self.table, (np.asarray(self.l1), np.asarray(self.l2)), 1)

    def move1(self, x: int, new: int):
        old = self.l1[x]
        j = self.l2[x]
        self.table[old, j] -= 1
        self.table[new, j] += 1
        self.l1[x] = new

    def move2(self, x: int, new: int):
        old = self.l2[x]
        i = self.l1[x]
        self.table[i, old] -= 1
        self.table[i, new] += 1
        self.l2[x] = new

    def value(self) -> float:
        return self.base.from_table(self.table)


class RandDistance(BaseDistance):
    """``1 - Rand`` over unordered pairs of distinct objects."""

    name = "rand"

    def from_table(self, table):
        n = int(np.asarray(table).sum())
        return _rand_disagreements(table) / (n * (n - 1) // 2)

    def from_tables(self, tables):
        t = np.asarray(tables, dtype=np.int64)
        n = t.sum(axis=(1, 2))
        dis = (_choose2(t.sum(axis=2)).sum(axis=1) + _choose2(t.sum(axis=1)).sum(axis=1)
               - 2 * _choose2(t).sum(axis=(1, 2)))
        return dis / (n * (n - 1) // 2)

    def evaluator(self, a1, a2, k1, k2):
        return _RandEvaluator(a1, a2, k1, k2)

    def pairwise(self, l1, l2, k1=None, k2=None):
        l1 = np.atleast_2d(np.asarray(l1))
        l2 = np.atleast_2d(np.asarray(l2))
        n = l1.shape[1]
        iu, ju = np.triu_indices(n, 1)
        npairs = len(iu)
        out = np.empty((len(l1), len(l2)))
        s2 = (l2[:, iu] == l2[:, ju]).astype(np.float64)
        step = max(1, 2_000_000 // max(npairs, 1))
        for lo in range(0, len(l1), step):
            s1 = (l1[lo:lo + step, iu] == l1[lo:lo + step, ju]).astype(np.float64)
            dis = s1 @ (1.0 - s2).T + (1.0 - s1) @ s2.T
            out[lo:lo + step] = np.rint(dis) / npairs
        return out


class _RandEvaluator:
    """O(1) update of pair disagreement counts."""

    def __init__(self, a1, a2, k1, k2):
        self.l1 = [int(v) for v in a1]
        self.l2 = [int(v) for v in a2]
        n = len(self.l1)
        self.pairs = n * (n - 1) // 2
        self.t = [[0] * k2 for _ in range(k1)]
        self.r = [0] * k1
        self.c = [0] * k2
        for i, j in zip(self.l1, self.l2):
            self.t[i][j] += 1
            self.r[i] += 1
            self.c[j] += 1
        self.s = sum(v * (v - 1) // 2 for row in self.t for v in row)
        self.a = sum(v * (v - 1) // 2 for v in self.r)
        self.b = sum(v * (v - 1) // 2 for v in self.c)

    def move1(self, x, new):
        old = self.l1[x]
        if old == new:
            return
        j = self.l2[x]
        t, r = self.t, self.r
        t[old][j] -= 1
        self.s -= t[old][j]
        self.s += t[new][j]
        t[new][j] += 1
        r[old] -= 1
        self.a -= r[old]
        self.a += r[new]
        r[new] += 1
        self.l1[x] = new

    def move2(self, x, new):
        old = self.l2[x]
        if old == new:
            return
        i = self.l1[x]
        t, c = self.t, self.c
        t[i][old] -= 1
        self.s -= t[i][old]
        self.s += t[i][new]
        t[i][new] += 1
        c[old] -= 1
        self.b -= c[old]
        self.b += c[new]
        c[new] += 1
        self.l2[x] = new

    def value(self):
        return (self.a + self.b - 2 * self.s) / self.pairs


class PartitionDistance(BaseDistance):
    """Normalized partition (transfer) distance."""

    name = "partition"

    def from_table(self, table):
        table = np.asarray(table)
        n = int(table.sum())
        return (n - _max_matching(table)) / (n - 1)

    def from_tables(self, tables):
        t = np.asarray(tables, dtype=np.int64)
        s, k1, k2 = t.shape
        k = max(k1, k2)
        if k > 6:
            return super().from_tables(t)
        if k1 != k2:
            padded = np.zeros((s, k, k), dtype=np.int64)
            padded[:, :k1, :k2] = t
            t = padded
        n = t.sum(axis=(1, 2))
        best = np.zeros(s, dtype=np.int64)
        rows = np.arange(k)
        for perm in itertools.permutations(range(k)):
            np.maximum(best, t[:, rows, perm].sum(axis=1), out=best)
        return (n - best) / (n - 1)


class CallableDistance(BaseDistance):
    """Adapter for a plain ``f(c1, c2) -> float`` on hard clusterings."""

    def __init__(self, fn: Callable[[HardClustering, HardClustering], float], name: str | None = None,
                 normalized: bool = True):
        self.fn = fn
        self.name = name or getattr(fn, "__name__", "custom")
        self.normalized = normalized

    def __call__(self, c1, c2):
        return float(self.fn(c1, c2))

    def evaluator(self, a1, a2, k1, k2):
        return _CallableEvaluator(self.fn, a1, a2, k1, k2)

    def pairwise(self, l1, l2, k1, k2):
        from .model import Frame
        f1, f2 = Frame.of_size(k1), Frame.of_size(k2)
        h2 = [HardClustering(f2, tuple(b)) for b in l2]
        return np.array([[self.fn(HardClustering(f1, tuple(a)), c) for c in h2] for a in l1])

    def rowwise(self, l1, l2, k1, k2):
        from .model import Frame
        f1, f2 = Frame.of_size(k1), Frame.of_size(k2)
        return np.array([self.fn(HardClustering(f1, tuple(a)), HardClustering(f2, tuple(b)))
                         for a, b in zip(l1, l2)])


class _CallableEvaluator:
    def __init__(self, fn, a1, a2, k1, k2):
        from .model import Frame
        self.fn = fn
        self.f1, self.f2 = Frame.of_size(k1), Frame.of_size(k2)
        self.l1 = [int(v) for v in a1]
        self.l2 = [int(v) for v in a2]

    def move1(self, x, new):
        self.l1[x] = new

    def move2(self, x, new):
        self.l2[x] = new

    def value(self):
        return float(self.fn(HardClustering(self.f1, tuple(self.l1)), HardClustering(self.f2, tuple(self.l2))))


RAND = RandDistance()
PARTITION = PartitionDistance()
BASE_DISTANCES = {"rand": RAND, "partition": PARTITION}


def get_base(base) -> BaseDistance:
    """Resolve a base distance given by name, instance or callable."""
    if isinstance(base, BaseDistance):
        return base
    if isinstance(base, str):
        try:
            return BASE_DISTANCES[base]
        except KeyError:
            raise UnknownKind(f"unknown base distance {base!r}; expected one of {sorted(BASE_DISTANCES)}") from None
    if callable(base):
        return CallableDistance(base)
    raise UnknownKind(f"cannot use {base!r} as a base distance")


# --- set distances and axiom checks -------------------------------------------

def hausdorff(a: Sequence, b: Sequence, d: Callable) -> float:
    """Hausdorff distance between two finite nonempty sets under ``d``."""
    a = list(a)
    b = list(b)
    if not a or not b:
        raise EmptySet("Hausdorff distance needs two nonempty sets")
    dm = np.array([[d(x, y) for y in b] for x in a], dtype=float)
    return float(max(dm.min(axis=1).max(), dm.min(axis=0).max()))


AXIOMS = ("M1", "M1b", "M2", "M3", "M4", "normalized")


@dataclass
class AxiomReport:
    """Outcome of an exhaustive check of the metric axioms on a finite point set.

    Counterexamples are index tuples into the checked point list: ``(i,)``
    for M1, ``(i, j)`` for M1b/M2/M3/normalized and ``(i, j, k)`` for the
    triangle inequality ``d(i, k) <= d(i, j) + d(j, k)``.
    """

    holds_m1: bool
    holds_m1b: bool
    holds_m2: bool
    holds_m3: bool
    holds_m4: bool
    is_normalized: bool
    counterexamples: dict = field(default_factory=dict)
    max_value: float = 0.0
    n_points: int = 0

    @property
    def is_metric(self):
        return self.holds_m1 and self.holds_m2 and self.holds_m3 and self.holds_m4

    @property
    def is_pseudo_metric(self):
        return self.holds_m1 and self.holds_m3 and self.holds_m4

    @property
    def is_semi_metric(self):
        return self.holds_m1 and self.holds_m2 and self.holds_m3

    @property
    def is_meta_metric(self):
        return self.holds_m1b and self.holds_m2 and self.holds_m3 and self.holds_m4

    def verdict(self) -> str:
        if self.is_metric:
            return "metric"
        if self.is_meta_metric:
            return "meta-metric"
        if self.is_pseudo_metric:
            return "pseudo-metric"
        if self.is_semi_metric:
            return "semi-metric"
        return "none"

    def flags(self) -> dict:
        return {"M1": self.holds_m1, "M1b": self.holds_m1b, "M2": self.holds_m2,
                "M3": self.holds_m3, "M4": self.holds_m4, "normalized": self.is_normalized}


def _default_equal(x, y) -> bool:
    if isinstance(x, HardClustering) and isinstance(y, HardClustering):
        return equivalent(x, y)
    return x == y


def check_axioms(points: Sequence, distance: Callable, equal: Callable | None = None,
                 tol: float = TOL, max_counterexamples: int = 10) -> AxiomReport:
    """Exhaustively test M1, M1b, M2, M3 on all pairs and M4 on all triples.

    ``equal`` decides when two points count as the same; for hard
    clusterings it defaults to partition equality so relabelings do not
    show up as spurious M2 violations.
    """
    pts = list(points)
    if len(pts) < 2:
        raise ValidationError("check_axioms needs at least two points")
    equal = equal or _default_equal
    n = len(pts)
    dm = np.array([[float(distance(x, y)) for y in pts] for x in pts])
    eq = np.array([[bool(equal(x, y)) for y in pts] for x in pts])
    cx: dict[str, list] = {a: [] for a in AXIOMS}

    def note(axiom, item):
        if len(cx[axiom]) < max_counterexamples:
            cx[axiom].append(item)

    diag = np.diag(dm)
    for i in np.flatnonzero(np.abs(diag) > tol):
        note("M1", (int(i),))
    zero = np.abs(dm) <= tol
    for i, j in zip(*np.nonzero(zero & ~eq)):
        note("M1b", (int(i), int(j)))
        if i != j:
            note("M2", (int(i), int(j)))
    for i, j in zip(*np.nonzero(np.abs(dm - dm.T) > tol)):
        if i < j:
            note("M3", (int(i), int(j)))
    for j in range(n):
        viol = dm > dm[:, j][:, None] + dm[j, :][None, :] + tol
        for i, k in zip(*np.nonzero(viol)):
            note("M4", (int(i), int(j), int(k)))
        if len(cx["M4"]) >= max_counterexamples:
            break
    mx = float(dm.max())
    if mx > 1 + tol:
        i, j = np.unravel_index(int(np.argmax(dm)), dm.shape)
        note("normalized", (int(i), int(j)))
    return AxiomReport(
        holds_m1=not cx["M1"], holds_m1b=not cx["M1b"], holds_m2=not cx["M2"],
        holds_m3=not cx["M3"], holds_m4=not cx["M4"], is_normalized=not cx["normalized"],
        counterexamples={a: v for a, v in cx.items() if v}, max_value=mx, n_points=n)


def all_partitions(n: int, max_blocks: int | None = None):
    """Every set partition of ``n`` objects as a restricted growth string."""
    if n == 0:
        yield ()
        return

    def rec(prefix, top):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        limit = top + 2 if max_blocks is None else min(top + 2, max_blocks)
        for v in range(limit):
            prefix.append(v)
            yield from rec(prefix, max(top, v))
            prefix.pop()

    yield from rec([0], 0)


def all_hard_clusterings(n: int, k: int | None = None) -> list[HardClustering]:
    """One representative hard clustering per set partition of ``n`` objects."""
    from .model import Frame
    parts = list(all_partitions(n, k))
    kk = k or max(max(p) + 1 for p in parts)
    frame = Frame.of_size(kk)
    return [HardClustering(frame, p) for p in parts]

