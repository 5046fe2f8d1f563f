"""Clustering representations: hard, rough and mass-function based soft clusterings.

Objects are dense indices ``0..n-1``. Clusters live in a :class:`Frame` and
subsets of the frame are stored as integer bitmasks (bit ``i`` set means
cluster ``i`` is in the subset), which limits frames to 64 clusters.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    EmptyFocalSet,
    MassSumViolation,
    MismatchedObjectCount,
    SubnormalPossibility,
    UnknownLabel,
    ValidationError,
)

#: tolerance for internal equality of masses and distances
TOL = 1e-9
#: largest deviation from 1 that input renormalization will silently absorb
INPUT_TOL = 1e-6
MAX_CLUSTERS = 64

EMPTY_SET_POLICIES = ("reject", "redistribute-omega", "renormalize")


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def mask_members(mask: int) -> list[int]:
    """Cluster indices contained in ``mask``, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def is_singleton(mask: int) -> bool:
    return mask != 0 and mask & (mask - 1) == 0


def singleton_index(mask: int) -> int:
    return mask.bit_length() - 1


@dataclass(frozen=True)
class Frame:
    """Ordered set of cluster labels."""

    clusters: tuple

    def __post_init__(self):
        clusters = tuple(self.clusters)
        object.__setattr__(self, "clusters", clusters)
        if not clusters:
            raise ValidationError("a frame needs at least one cluster")
        if len(set(clusters)) != len(clusters):
            raise ValidationError(f"duplicate cluster labels in frame {clusters!r}")
        if len(clusters) > MAX_CLUSTERS:
            raise ValidationError(f"frames are limited to {MAX_CLUSTERS} clusters, got {len(clusters)}")

    @classmethod
    def of_size(cls, k: int) -> Frame:
        return cls(tuple(f"w{i + 1}" for i in range(k)))

    @property
    def k(self) -> int:
        return len(self.clusters)

    @property
    def omega(self) -> int:
        """Bitmask of the whole frame."""
        return (1 << self.k) - 1

    @cached_property
    def _index(self) -> dict:
        return {c: i for i, c in enumerate(self.clusters)}

    def index(self, label: Hashable) -> int:
        try:
            return self._index[label]
        except (KeyError, TypeError):
            raise UnknownLabel(f"label {label!r} is not in the frame {self.clusters!r}") from None

    def mask(self, labels: Iterable[Hashable]) -> int:
        m = 0
        for lab in labels:
            m |= 1 << self.index(lab)
        return m

    def labels_of(self, mask: int) -> tuple:
        return tuple(self.clusters[i] for i in mask_members(mask))


@dataclass(frozen=True, eq=False)
class HardClustering:
    """Total assignment of ``n`` objects to clusters of a frame (as cluster indices)."""

    frame: Frame
    assignment: tuple

    def __post_init__(self):
        assignment = tuple(int(a) for a in self.assignment)
        object.__setattr__(self, "assignment", assignment)
        k = self.frame.k
        for x, a in enumerate(assignment):
            if not 0 <= a < k:
                raise UnknownLabel(f"object {x}: cluster index {a} outside frame of size {k}")

    @classmethod
    def from_labels(cls, labels: Sequence[Hashable], frame: Frame | None = None) -> HardClustering:
        """Build from arbitrary hashable labels; the frame defaults to first-seen order."""
        if frame is None:
            frame = Frame(tuple(dict.fromkeys(labels)))
        return cls(frame, tuple(frame.index(lab) for lab in labels))

    @property
    def n(self) -> int:
        return len(self.assignment)

    @cached_property
    def array(self) -> np.ndarray:
        a = np.asarray(self.assignment, dtype=np.intp)
        a.setflags(write=False)
        return a

    def label(self, x: int):
        return self.frame.clusters[self.assignment[x]]

    def canonical(self) -> tuple:
        """Assignment relabeled by order of first appearance; equal iff same partition."""
        seen: dict[int, int] = {}
        return tuple(seen.setdefault(a, len(seen)) for a in self.assignment)

    def __eq__(self, other):
        if not isinstance(other, HardClustering):
            return NotImplemented
        return self.frame == other.frame and self.assignment == other.assignment

    def __hash__(self):
        return hash((self.frame, self.assignment))

    def __repr__(self):
        return f"HardClustering({list(self.assignment)}, k={self.frame.k})"


@dataclass(frozen=True, eq=False)
class RoughClustering:
    """Per-object nonempty region ``R(x)`` of admissible clusters (bitmasks)."""

    frame: Frame
    regions: tuple

    def __post_init__(self):
        regions = tuple(int(r) for r in self.regions)
        object.__setattr__(self, "regions", regions)
        omega = self.frame.omega
        for x, r in enumerate(regions):
            if r == 0:
                raise ValidationError(f"object {x}: empty rough region")
            if r & ~omega:
                raise UnknownLabel(f"object {x}: region {r:#b} outside the frame")

    @classmethod
    def from_hard(cls, c: HardClustering) -> RoughClustering:
        return cls(c.frame, tuple(1 << a for a in c.assignment))

    @classmethod
    def from_label_sets(cls, sets: Sequence[Iterable[Hashable]], frame: Frame) -> RoughClustering:
        return cls(frame, tuple(frame.mask(s) for s in sets))

    @property
    def n(self) -> int:
        return len(self.regions)

    @property
    def is_hard(self) -> bool:
        return all(is_singleton(r) for r in self.regions)

    def compatible_count(self) -> int:
        """``|C(R)|``, the number of compatible hard clusterings (as mappings)."""
        return math.prod(popcount(r) for r in self.regions)

    def to_hard(self) -> HardClustering:
        if not self.is_hard:
            raise ValidationError("rough clustering has ambiguous regions")
        return HardClustering(self.frame, tuple(singleton_index(r) for r in self.regions))

    def to_soft(self) -> SoftClustering:
        return SoftClustering(self.frame, tuple(MassFunction(((r, 1.0),)) for r in self.regions))

    def __eq__(self, other):
        if not isinstance(other, RoughClustering):
            return NotImplemented
        return self.frame == other.frame and self.regions == other.regions

    def __hash__(self):
        return hash((self.frame, self.regions))

    def __repr__(self):
        return f"RoughClustering({[mask_members(r) for r in self.regions]}, k={self.frame.k})"


@dataclass(frozen=True)
class MassFunction:
    """Normal mass function over subsets of a frame: sorted ``(mask, mass)`` pairs."""

    focal: tuple

    def __post_init__(self):
        items = tuple(sorted((int(a), float(v)) for a, v in self.focal))
        object.__setattr__(self, "focal", items)
        if not items:
            raise ValidationError("mass function without focal sets")
        masks = [a for a, _ in items]
        if len(set(masks)) != len(masks):
            raise ValidationError("duplicate focal sets")
        for a, v in items:
            if a == 0:
                raise EmptyFocalSet("mass on the empty set")
            if not 0.0 < v <= 1.0 + TOL:
                raise ValidationError(f"focal mass {v} outside (0, 1]")
        total = math.fsum(v for _, v in items)
        if abs(total - 1.0) > TOL:
            raise MassSumViolation(f"focal masses sum to {total!r}")

    @classmethod
    def categorical(cls, mask: int) -> MassFunction:
        return cls(((mask, 1.0),))

    def __len__(self):
        return len(self.focal)

    def __iter__(self):
        return iter(self.focal)

    def mass(self, mask: int) -> float:
        for a, v in self.focal:
            if a == mask:
                return v
        return 0.0

    @property
    def core(self) -> int:
        """Union of focal sets."""
        u = 0
        for a, _ in self.focal:
            u |= a
        return u

    @property
    def is_logical(self) -> bool:
        return len(self.focal) == 1

    @property
    def is_bayesian(self) -> bool:
        return all(is_singleton(a) for a, _ in self.focal)

    @property
    def is_consonant(self) -> bool:
        masks = sorted((a for a, _ in self.focal), key=popcount)
        return all(lo & ~hi == 0 for lo, hi in zip(masks, masks[1:]))

    def contour(self, k: int) -> np.ndarray:
        """Plausibility of each singleton, ``pl(w) = sum of m(A) over A containing w``."""
        pl = np.zeros(k)
        for a, v in self.focal:
            for i in mask_members(a):
                pl[i] += v
        return pl


class SCKind(enum.Enum):
    HARD = "hard"
    ROUGH = "rough"
    FUZZY = "fuzzy"
    POSSIBILISTIC = "possibilistic"
    GENERAL = "evidential"


@dataclass(frozen=True, eq=False)
class SoftClustering:
    """One mass function per object, all over the same frame."""

    frame: Frame
    masses: tuple

    def __post_init__(self):
        masses = tuple(self.masses)
        object.__setattr__(self, "masses", masses)
        if not masses:
            raise ValidationError("a clustering needs at least one object")
        omega = self.frame.omega
        for x, m in enumerate(masses):
            if not isinstance(m, MassFunction):
                raise ValidationError(f"object {x}: expected a MassFunction, got {type(m).__name__}")
            if m.core & ~omega:
                raise UnknownLabel(f"object {x}: focal set outside the frame")

    @classmethod
    def from_hard(cls, c: HardClustering) -> SoftClustering:
        return cls(c.frame, tuple(MassFunction.categorical(1 << a) for a in c.assignment))

    @classmethod
    def from_rough(cls, r: RoughClustering) -> SoftClustering:
        return r.to_soft()

    @classmethod
    def from_memberships(cls, mu, frame: Frame | None = None, *, possibilistic: bool = False,
                         renormalize: bool = False) -> SoftClustering:
        """Fuzzy (rows sum to 1) or possibilistic (rows have max 1) membership matrix."""
        mu = np.asarray(mu, dtype=float)
        if mu.ndim != 2:
            raise ValidationError("membership matrix must be 2-d")
        if frame is None:
            frame = Frame.of_size(mu.shape[1])
        if mu.shape[1] != frame.k:
            raise ValidationError(f"membership matrix has {mu.shape[1]} columns for a frame of {frame.k}")
        if possibilistic:
            masses = tuple(possibility_to_consonant(row, renormalize=renormalize) for row in mu)
        else:
            masses = tuple(_bayesian(row, x) for x, row in enumerate(mu))
        return cls(frame, masses)

    @property
    def n(self) -> int:
        return len(self.masses)

    @cached_property
    def kind(self) -> SCKind:
        return classify(self)

    def memberships(self) -> np.ndarray:
        """n x k matrix of singleton plausibilities (membership for fuzzy/possibilistic inputs)."""
        return np.vstack([m.contour(self.frame.k) for m in self.masses])

    def focal_counts(self) -> list[int]:
        return [len(m) for m in self.masses]

    def to_rough(self) -> RoughClustering:
        if not all(m.is_logical for m in self.masses):
            raise ValidationError("not a rough clustering: some object has several focal sets")
        return RoughClustering(self.frame, tuple(m.focal[0][0] for m in self.masses))

    def to_hard(self) -> HardClustering:
        return self.to_rough().to_hard()

    def __eq__(self, other):
        if not isinstance(other, SoftClustering):
            return NotImplemented
        return self.frame == other.frame and self.masses == other.masses

    def __hash__(self):
        return hash((self.frame, self.masses))


def _bayesian(row, x) -> MassFunction:
    row = np.asarray(row, dtype=float)
    if np.any(row < -TOL):
        raise ValidationError(f"object {x}: negative membership")
    total = float(row.sum())
    if abs(total - 1.0) > INPUT_TOL:
        raise MassSumViolation(f"object {x}: memberships sum to {total!r}")
    scale = total if abs(total - 1.0) > TOL else 1.0
    return MassFunction(tuple((1 << i, v / scale) for i, v in enumerate(row) if v > 0))


def as_soft(c) -> SoftClustering:
    """Lift hard or rough clusterings to the mass-function representation."""
    if isinstance(c, SoftClustering):
        return c
    if isinstance(c, HardClustering):
        return SoftClustering.from_hard(c)
    if isinstance(c, RoughClustering):
        return c.to_soft()
    raise TypeError(f"cannot interpret {type(c).__name__} as a soft clustering")


def _key_to_mask(key, frame: Frame) -> int:
    if isinstance(key, (set, frozenset, tuple, list)):
        return frame.mask(key)
    if key is None:
        return 0
    return frame.mask((key,))


def validate_soft_clustering(raw: Sequence[Mapping], frame: Frame | Sequence | None = None,
                             empty_set: str = "redistribute-omega") -> SoftClustering:
    """Validate per-object focal maps and build a :class:`SoftClustering`.

    Each entry of ``raw`` maps a focal set to its mass. A focal set is a
    label, or a set/tuple of labels (empty for the empty set). Sums that
    deviate from 1 by at most ``INPUT_TOL`` are renormalized.

    ``empty_set`` decides what happens to mass on the empty set:
    ``reject`` raises :class:`EmptyFocalSet`, ``redistribute-omega`` moves it
    to the whole frame, ``renormalize`` drops it and rescales the rest.
    """
    if empty_set not in EMPTY_SET_POLICIES:
        raise ValidationError(f"unknown empty-set policy {empty_set!r}")
    if not raw:
        raise ValidationError("a clustering needs at least one object")
    if frame is None:
        labels: dict = {}
        for entry in raw:
            for key in entry:
                if isinstance(key, (set, frozenset, tuple, list)):
                    labels.update(dict.fromkeys(sorted(key, key=repr) if isinstance(key, (set, frozenset)) else key))
                elif key is not None:
                    labels[key] = None
        frame = Frame(tuple(labels))
    elif not isinstance(frame, Frame):
        frame = Frame(tuple(frame))

    masses = []
    for x, entry in enumerate(raw):
        acc: dict[int, float] = {}
        for key, v in entry.items():
            v = float(v)
            if not math.isfinite(v) or v < 0:
                raise ValidationError(f"object {x}: invalid mass {v!r}")
            if v == 0:
                continue
            mask = _key_to_mask(key, frame)
            acc[mask] = acc.get(mask, 0.0) + v
        empty = acc.pop(0, 0.0)
        if empty > 0:
            if empty_set == "reject":
                raise EmptyFocalSet(f"object {x}: mass {empty} on the empty set")
            if empty_set == "redistribute-omega":
                acc[frame.omega] = acc.get(frame.omega, 0.0) + empty
        total = math.fsum(acc.values()) + (empty if empty_set == "renormalize" else 0.0)
        if abs(total - 1.0) > INPUT_TOL:
            raise MassSumViolation(f"object {x}: masses sum to {total!r}")
        kept = math.fsum(acc.values())
        if kept <= 0:
            raise EmptyFocalSet(f"object {x}: all mass on the empty set")
        scale = kept if abs(kept - 1.0) > TOL else 1.0
        masses.append(MassFunction(tuple((a, v / scale) for a, v in acc.items())))
    return SoftClustering(frame, tuple(masses))


def classify(m: SoftClustering) -> SCKind:
    """Most specific kind that every object's mass function satisfies."""
    ms = m.masses
    if all(f.is_logical for f in ms):
        if all(is_singleton(f.focal[0][0]) for f in ms):
            return SCKind.HARD
        return SCKind.ROUGH
    if all(f.is_bayesian for f in ms):
        return SCKind.FUZZY
    if all(f.is_consonant for f in ms):
        return SCKind.POSSIBILISTIC
    return SCKind.GENERAL


def is_hard(m: SoftClustering) -> bool:
    return classify(m) is SCKind.HARD


def is_rough(m: SoftClustering) -> bool:
    return all(f.is_logical for f in m.masses)


def is_fuzzy(m: SoftClustering) -> bool:
    return all(f.is_bayesian for f in m.masses)


def is_possibilistic(m: SoftClustering) -> bool:
    return all(f.is_consonant for f in m.masses)


@dataclass(frozen=True, eq=False)
class RelationalRepr:
    """Co-membership relation ``[C]`` as a read-only boolean n x n matrix."""

    same: np.ndarray = field(repr=False)

    def __post_init__(self):
        same = np.array(self.same, dtype=bool)
        same.setflags(write=False)
        object.__setattr__(self, "same", same)

    @property
    def n(self) -> int:
        return self.same.shape[0]

    def __eq__(self, other):
        if not isinstance(other, RelationalRepr):
            return NotImplemented
        return self.same.shape == other.same.shape and bool(np.array_equal(self.same, other.same))

    def __hash__(self):
        return hash(self.same.tobytes())

    def is_equivalence(self) -> bool:
        s = self.same
        if not np.all(np.diag(s)) or not np.array_equal(s, s.T):
            return False
        si = s.astype(np.int64)
        return bool(np.array_equal((si @ si) > 0, s))


def relational_of_hard(c: HardClustering) -> RelationalRepr:
    a = c.array
    return RelationalRepr(a[:, None] == a[None, :])


def equivalent(c1: HardClustering, c2: HardClustering) -> bool:
    """``C1 ~ C2``: both clusterings induce the same partition of the objects."""
    if c1.n != c2.n:
        raise MismatchedObjectCount(f"{c1.n} vs {c2.n} objects")
    return c1.canonical() == c2.canonical()


@dataclass(frozen=True)
class PairRelationMass:
    """Mass on ``{s}``, ``{not s}`` and ``{s, not s}`` for one pair of objects."""

    same: float
    not_same: float
    theta: float

    def __post_init__(self):
        for v in (self.same, self.not_same, self.theta):
            if v < -TOL:
                raise ValidationError("negative pair mass")
        if abs(self.same + self.not_same + self.theta - 1.0) > TOL:
            raise MassSumViolation("pair masses must sum to 1")

    def as_array(self) -> np.ndarray:
        return np.array([self.same, self.not_same, self.theta])


def pair_relation_mass(m: SoftClustering, x: int, y: int) -> PairRelationMass:
    """Relational mass for objects ``x`` and ``y``.

    Focal pairs ``({w}, {w})`` support "same cluster", disjoint pairs support
    "different clusters" and everything else is uncommitted. There is no
    conflict renormalization.
    """
    if x == y:
        raise ValidationError("pair_relation_mass needs two distinct objects")
    same = 0.0
    apart = 0.0
    for a, va in m.masses[x]:
        for b, vb in m.masses[y]:
            if a & b == 0:
                apart += va * vb
            elif a == b and is_singleton(a):
                same += va * vb
    theta = max(0.0, 1.0 - same - apart)
    return PairRelationMass(same, apart, theta)


def possibility_to_consonant(mu, renormalize: bool = False) -> MassFunction:
    """Consonant mass function whose contour function is the possibility vector ``mu``.

    Distinct positive levels ``1 = p1 > p2 > ... > pr`` give mass ``p_i - p_(i+1)``
    to the superlevel set ``{w : mu(w) >= p_i}``.
    """
    mu = np.asarray(mu, dtype=float)
    if mu.ndim != 1 or mu.size == 0:
        raise ValidationError("possibility vector must be a nonempty 1-d array")
    if np.any(mu < -TOL) or np.any(mu > 1 + INPUT_TOL) or not np.all(np.isfinite(mu)):
        raise ValidationError(f"possibility degrees outside [0, 1]: {mu}")
    mu = np.clip(mu, 0.0, 1.0)
    top = float(mu.max())
    if abs(top - 1.0) > TOL:
        if not renormalize or top <= 0:
            raise SubnormalPossibility(f"maximum possibility {top} < 1")
        mu = mu / top
    levels = sorted({float(v) for v in mu if v > 0}, reverse=True)
    # merge levels closer than TOL so that no focal set gets a sub-tolerance mass
    merged: list[float] = []
    for v in levels:
        if merged and merged[-1] - v <= TOL:
            continue
        merged.append(v)
    merged[0] = 1.0
    focal = []
    for i, p in enumerate(merged):
        nxt = merged[i + 1] if i + 1 < len(merged) else 0.0
        mask = 0
        for j, v in enumerate(mu):
            if v >= p - TOL:
                mask |= 1 << j
        focal.append((mask, p - nxt))
    return MassFunction(tuple(focal))
