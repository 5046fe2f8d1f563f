"""Small numpy implementations of the c-means family.

All fitters take a :class:`Dataset` (or a plain array) and a
:class:`FitConfig`, and are deterministic given the config seed. With
``n_init > 1`` the run with the lowest objective is kept, trying seeds
``seed, seed + 1, ...``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DegenerateData, ValidationError
from .model import (
    Frame,
    HardClustering,
    MassFunction,
    RoughClustering,
    SoftClustering,
    validate_soft_clustering,
)
from .sampling import make_rng


@dataclass(frozen=True)
class Dataset:
    rows: np.ndarray
    labels: HardClustering | None = None
    feature_names: tuple = ()

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim != 2 or rows.shape[0] == 0:
            raise ValidationError("dataset rows must form a nonempty 2-d array")
        if not np.all(np.isfinite(rows)):
            raise ValidationError("dataset contains non-finite values")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        if self.labels is not None and self.labels.n != rows.shape[0]:
            raise ValidationError("label count does not match row count")

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def p(self) -> int:
        return self.rows.shape[1]


@dataclass(frozen=True)
class FitConfig:
    k: int
    seed: int = 0
    max_iter: int = 300
    tol: float = 1e-6
    n_init: int = 1
    m: float = 2.0
    epsilon: float = 1.1
    w_lower: float = 0.7
    w_upper: float = 0.3
    alpha: float = 1.0
    beta: float = 2.0
    delta: float = 10.0
    eta: tuple | float | None = None
    singletons_only: bool = False

    def __post_init__(self):
        if self.k < 1:
            raise ValidationError("k must be at least 1")
        if self.m <= 1:
            raise ValidationError("fuzzifier m must exceed 1")
        if self.epsilon < 1:
            raise ValidationError("RKM epsilon must be at least 1")
        if min(self.alpha, self.beta, self.delta) <= 0:
            raise ValidationError("ECM alpha, beta and delta must be positive")
        if self.beta <= 1:
            raise ValidationError("ECM beta must exceed 1")
        if self.n_init < 1 or self.max_iter < 1:
            raise ValidationError("n_init and max_iter must be positive")


@dataclass
class FitInfo:
    centers: np.ndarray
    objective: float
    history: list = field(default_factory=list)
    n_iter: int = 0
    seed: int = 0
    extra: dict = field(default_factory=dict)


def _rows(data) -> np.ndarray:
    return data.rows if isinstance(data, Dataset) else np.asarray(data, dtype=float)


def _check(x: np.ndarray, k: int):
    if len(np.unique(x, axis=0)) < k:
        raise DegenerateData(f"need at least {k} distinct points, got {len(np.unique(x, axis=0))}")


def _sqdist(x: np.ndarray, c: np.ndarray) -> np.ndarray:
    d = (x * x).sum(1)[:, None] - 2 * x @ c.T + (c * c).sum(1)[None, :]
    return np.maximum(d, 0.0)


def kmeans_pp(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding."""
    n = len(x)
    centers = [x[rng.integers(n)]]
    d2 = _sqdist(x, np.array(centers))[:, 0]
    for _ in range(1, k):
        total = d2.sum()
        if total <= 0:
            idx = rng.integers(n)
        else:
            idx = int(np.searchsorted(np.cumsum(d2), rng.random() * total, side="right"))
            idx = min(idx, n - 1)
        centers.append(x[idx])
        d2 = np.minimum(d2, _sqdist(x, x[idx:idx + 1])[:, 0])
    return np.array(centers, dtype=float)


def _best_of(fit, x, cfg: FitConfig):
    best = None
    for i in range(cfg.n_init):
        res = fit(x, replace(cfg, seed=cfg.seed + i))
        if best is None or res[-1].objective < best[-1].objective - 1e-12:
            best = res
    return best


def _frame(k):
    return Frame.of_size(k)


# --- k-means --------------------------------------------------------------------

def _kmeans_once(x, cfg):
    rng = make_rng(cfg.seed)
    c = kmeans_pp(x, cfg.k, rng)
    history = []
    labels = np.zeros(len(x), dtype=np.intp)
    it = 0
    for it in range(1, cfg.max_iter + 1):
        d2 = _sqdist(x, c)
        labels = d2.argmin(axis=1)
        history.append(float(d2[np.arange(len(x)), labels].sum()))
        new = c.copy()
        for j in range(cfg.k):
            members = x[labels == j]
            if len(members):
                new[j] = members.mean(axis=0)
        shift = float(np.sqrt(((new - c) ** 2).sum(axis=1)).max())
        c = new
        if shift < cfg.tol:
            break
    d2 = _sqdist(x, c)
    labels = d2.argmin(axis=1)
    obj = float(d2[np.arange(len(x)), labels].sum())
    history.append(obj)
    return labels, FitInfo(c, obj, history, it, cfg.seed)


def kmeans(data, cfg: FitConfig, return_info: bool = False):
    """Lloyd's algorithm from k-means++ seeding."""
    x = _rows(data)
    _check(x, cfg.k)
    labels, info = _best_of(_kmeans_once, x, cfg)
    hc = HardClustering(_frame(cfg.k), tuple(labels))
    return (hc, info) if return_info else hc


# --- fuzzy c-means ----------------------------------------------------------------

def fcm_memberships(d2: np.ndarray, m: float) -> np.ndarray:
    """Membership update for squared distances ``d2`` (n x k)."""
    u = np.empty_like(d2)
    zero = d2 <= 1e-300
    hit = zero.any(axis=1)
    if np.any(~hit):
        inv = d2[~hit] ** (-1.0 / (m - 1.0))
        u[~hit] = inv / inv.sum(axis=1, keepdims=True)
    if np.any(hit):
        z = zero[hit].astype(float)
        u[hit] = z / z.sum(axis=1, keepdims=True)
    return u


def _fcm_once(x, cfg):
    rng = make_rng(cfg.seed)
    c = kmeans_pp(x, cfg.k, rng)
    m = cfg.m
    history = []
    it = 0
    u = fcm_memberships(_sqdist(x, c), m)
    for it in range(1, cfg.max_iter + 1):
        um = u ** m
        c_new = (um.T @ x) / um.sum(axis=0)[:, None]
        d2 = _sqdist(x, c_new)
        u = fcm_memberships(d2, m)
        history.append(float(((u ** m) * d2).sum()))
        shift = float(np.abs(c_new - c).max())
        c = c_new
        if shift < cfg.tol:
            break
    return u, FitInfo(c, history[-1], history, it, cfg.seed)


def fuzzy_cmeans(data, cfg: FitConfig, return_info: bool = False):
    """Fuzzy c-means with fuzzifier ``cfg.m``."""
    x = _rows(data)
    _check(x, cfg.k)
    u, info = _best_of(_fcm_once, x, cfg)
    u = u / u.sum(axis=1, keepdims=True)
    sc = SoftClustering.from_memberships(u, _frame(cfg.k))
    info.extra["memberships"] = u
    return (sc, info) if return_info else sc


# --- possibilistic c-means -----------------------------------------------------------

def pcm_typicalities(d2: np.ndarray, eta: np.ndarray, m: float) -> np.ndarray:
    return 1.0 / (1.0 + (d2 / eta[None, :]) ** (1.0 / (m - 1.0)))


def _pcm_once(x, cfg):
    u, pre = _fcm_once(x, cfg)
    c = pre.centers
    m = cfg.m
    d2 = _sqdist(x, c)
    if cfg.eta is None:
        um = u ** m
        eta = (um * d2).sum(axis=0) / um.sum(axis=0)
    else:
        eta = np.broadcast_to(np.asarray(cfg.eta, dtype=float), (cfg.k,)).copy()
    eta = np.maximum(eta, 1e-12)
    history = []
    it = 0
    t = pcm_typicalities(d2, eta, m)
    for it in range(1, cfg.max_iter + 1):
        tm = t ** m
        c_new = (tm.T @ x) / tm.sum(axis=0)[:, None]
        d2 = _sqdist(x, c_new)
        t = pcm_typicalities(d2, eta, m)
        tm = t ** m
        obj = float((tm * d2).sum() + (eta * ((1 - t) ** m).sum(axis=0)).sum())
        history.append(obj)
        shift = float(np.abs(c_new - c).max())
        c = c_new
        if shift < cfg.tol:
            break
    return t, FitInfo(c, history[-1], history, it, cfg.seed, {"eta": eta})


def possibilistic_cmeans(data, cfg: FitConfig, return_info: bool = False, renormalize: bool = True):
    """Possibilistic c-means; ``eta`` comes from an FCM pre-run unless configured.

    Typicalities are scaled per object to a maximum of 1 before being
    turned into consonant mass functions (``renormalize``); the raw values
    stay available as ``info.extra["typicalities"]``.
    """
    x = _rows(data)
    _check(x, cfg.k)
    t, info = _best_of(_pcm_once, x, cfg)
    info.extra["typicalities"] = t
    sc = SoftClustering.from_memberships(t, _frame(cfg.k), possibilistic=True, renormalize=renormalize)
    return (sc, info) if return_info else sc


# --- rough k-means ----------------------------------------------------------------------

def rough_regions(d: np.ndarray, epsilon: float) -> np.ndarray:
    """Region masks: clusters whose distance is within ``epsilon`` times the nearest one."""
    dmin = d.min(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(dmin > 0, d / np.where(dmin > 0, dmin, 1.0), np.where(d > 0, np.inf, 1.0))
    close = ratio <= epsilon
    weights = 1 << np.arange(d.shape[1], dtype=np.int64)
    return (close * weights).sum(axis=1)


def _rkm_once(x, cfg):
    rng = make_rng(cfg.seed)
    c = kmeans_pp(x, cfg.k, rng)
    k = cfg.k
    regions = None
    history = []
    it = 0
    for it in range(1, cfg.max_iter + 1):
        d = np.sqrt(_sqdist(x, c))
        new_regions = rough_regions(d, cfg.epsilon)
        singleton = (new_regions & (new_regions - 1)) == 0
        c_new = c.copy()
        for j in range(k):
            inside = (new_regions >> j) & 1 == 1
            lower = x[inside & singleton]
            boundary = x[inside & ~singleton]
            if len(lower) and len(boundary):
                c_new[j] = cfg.w_lower * lower.mean(axis=0) + cfg.w_upper * boundary.mean(axis=0)
            elif len(lower):
                c_new[j] = lower.mean(axis=0)
            elif len(boundary):
                c_new[j] = boundary.mean(axis=0)
        history.append(float(d.min(axis=1).sum()))
        shift = float(np.abs(c_new - c).max())
        stable = regions is not None and np.array_equal(regions, new_regions)
        regions = new_regions
        c = c_new
        if stable and shift < cfg.tol:
            break
    d = np.sqrt(_sqdist(x, c))
    regions = rough_regions(d, cfg.epsilon)
    obj = float(d.min(axis=1).sum())
    return regions, FitInfo(c, obj, history, it, cfg.seed)


def rough_kmeans(data, cfg: FitConfig, return_info: bool = False):
    """Rough k-means: ambiguous objects go to the upper regions of all near-tied clusters."""
    x = _rows(data)
    _check(x, cfg.k)
    regions, info = _best_of(_rkm_once, x, cfg)
    rc = RoughClustering(_frame(cfg.k), tuple(int(r) for r in regions))
    return (rc, info) if return_info else rc


# --- evidential c-means --------------------------------------------------------------------

def focal_subsets(k: int, singletons_only: bool = False) -> list[int]:
    """Nonempty subsets of the frame as masks, ordered by size then value."""
    if singletons_only:
        return [1 << j for j in range(k)]
    masks = range(1, 1 << k)
    return sorted(masks, key=lambda a: (bin(a).count("1"), a))


def _membership_matrix(masks, k):
    return np.array([[(a >> j) & 1 for j in range(k)] for a in masks], dtype=float)


def ecm_masses(x, centers, masks, alpha, beta, delta):
    """Mass update: returns (n x F) masses on ``masks`` and the empty-set column."""
    k = centers.shape[0]
    member = _membership_matrix(masks, k)
    card = member.sum(axis=1)
    protos = (member @ centers) / card[:, None]
    d2 = _sqdist(x, protos)
    expo = -1.0 / (beta - 1.0)
    d2 = np.maximum(d2, 1e-300)
    num = card[None, :] ** (alpha * expo) * d2 ** expo
    denom = num.sum(axis=1, keepdims=True) + (delta * delta) ** expo
    mass = num / denom
    empty = 1.0 - mass.sum(axis=1)
    return mass, np.maximum(empty, 0.0), d2, card


def _ecm_objective(mass, empty, d2, card, alpha, beta, delta):
    return float(((card[None, :] ** alpha) * mass ** beta * d2).sum() + (delta * delta * empty ** beta).sum())


def _ecm_once(x, cfg):
    rng = make_rng(cfg.seed)
    k = cfg.k
    c = kmeans_pp(x, k, rng)
    masks = focal_subsets(k, cfg.singletons_only)
    member = _membership_matrix(masks, k)
    alpha, beta, delta = cfg.alpha, cfg.beta, cfg.delta
    history = []
    it = 0
    mass, empty, d2, card = ecm_masses(x, c, masks, alpha, beta, delta)
    for it in range(1, cfg.max_iter + 1):
        mb = mass ** beta
        w1 = mb * card[None, :] ** (alpha - 1.0)
        # B[l] = sum_i x_i sum_{A containing l} |A|^(alpha-1) m_iA^beta
        b = (w1 @ member).T @ x
        w2 = (mb * card[None, :] ** (alpha - 2.0)).sum(axis=0)
        h = np.einsum("f,fl,fq->lq", w2, member, member)
        try:
            c_new = np.linalg.solve(h, b)
        except np.linalg.LinAlgError:
            c_new = np.linalg.lstsq(h, b, rcond=None)[0]
        mass, empty, d2, card = ecm_masses(x, c_new, masks, alpha, beta, delta)
        history.append(_ecm_objective(mass, empty, d2, card, alpha, beta, delta))
        shift = float(np.abs(c_new - c).max())
        c = c_new
        if shift < cfg.tol:
            break
    info = FitInfo(c, history[-1], history, it, cfg.seed, {"masks": masks, "empty": empty, "mass": mass})
    return (mass, empty, masks), info


def evidential_cmeans(data, cfg: FitConfig, return_info: bool = False, empty_set: str = "redistribute-omega"):
    """Evidential c-means over all nonempty subsets of the frame plus the empty set.

    Subset prototypes are the mean of their member singleton centers, the
    cardinality penalty is ``|A|^alpha``, the fuzzifier ``beta`` and the
    outlier distance ``delta``. Mass left on the empty set is handled by
    ``empty_set`` (see :func:`validate_soft_clustering`).
    """
    x = _rows(data)
    _check(x, cfg.k)
    (mass, empty, masks), info = _best_of(_ecm_once, x, cfg)
    frame = _frame(cfg.k)
    raw = []
    for i in range(len(x)):
        entry = {tuple(frame.labels_of(a)): float(v) for a, v in zip(masks, mass[i]) if v > 0}
        if empty[i] > 0:
            entry[()] = float(empty[i])
        raw.append(entry)
    sc = validate_soft_clustering(raw, frame, empty_set=empty_set)
    return (sc, info) if return_info else sc


def prune_masses(m: SoftClustering, threshold: float) -> SoftClustering:
    """Drop focal sets with mass below ``threshold`` and renormalize (keeps at least the largest)."""
    out = []
    for f in m.masses:
        kept = [(a, v) for a, v in f if v >= threshold] or [max(f, key=lambda t: t[1])]
        total = sum(v for _, v in kept)
        out.append(MassFunction(tuple((a, v / total) for a, v in kept)))
    return SoftClustering(m.frame, tuple(out))


def harden(m) -> HardClustering:
    """Argmax of the singleton plausibilities (lower region for rough input)."""
    if isinstance(m, HardClustering):
        return m
    if isinstance(m, RoughClustering):
        m = m.to_soft()
    pl = m.memberships()
    return HardClustering(m.frame, tuple(int(i) for i in pl.argmax(axis=1)))


def blobs(n_per: int, centers, spread: float, seed: int = 0):
    """Isotropic Gaussian blobs with their generating labels."""
    rng = make_rng(seed)
    centers = np.asarray(centers, dtype=float)
    rows = np.vstack([c + spread * rng.standard_normal((n_per, centers.shape[1])) for c in centers])
    labels = list(itertools.chain.from_iterable([j] * n_per for j in range(len(centers))))
    return Dataset(rows, HardClustering(_frame(len(centers)), tuple(labels)))
