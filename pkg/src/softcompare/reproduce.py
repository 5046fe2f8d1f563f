"""Iris comparison of five clusterers against the species labels.

Rows of the table are D-RI, S-RI (Rand similarity, exact and sampled) and
D-PD, S-PD (partition distance). Intervals are printed low to high. Exact
cells that would exceed the enumeration budget are reported as such rather
than silently sampled.

Fitters run ``n_init`` restarts with seeds ``seed .. seed + n_init - 1`` and
keep the lowest objective.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .clusterers import (
    FitConfig,
    evidential_cmeans,
    fuzzy_cmeans,
    kmeans,
    possibilistic_cmeans,
    prune_masses,
    rough_kmeans,
)
from .distributional import (
    DEFAULT_BUDGET,
    distributional_fuzzy,
    evidential_expectations,
    fuzzy_rand_expectation_fast,
    possibilistic_rc_distribution,
    rough_interval,
)
from .errors import BudgetExceeded
from .io import load_iris
from .metrics import PARTITION, RAND
from .sampling import DEFAULT_INNER_SAMPLES, SamplePlan, approximate

ALGORITHMS = ("KM", "RKM", "FCM", "PCM", "ECM")
ROWS = ("D-RI", "S-RI", "D-PD", "S-PD")

# RKM centroid weights for the Iris run; see IrisConfig
IRIS_RKM_WEIGHTS = (0.9, 0.1)


@dataclass(frozen=True)
class IrisConfig:
    seed: int = 0
    n_init: int = 10
    samples: int = 10_000
    inner_samples: int = DEFAULT_INNER_SAMPLES
    budget: int = DEFAULT_BUDGET
    workers: int = 1
    epsilon: float = 1.1
    m: float = 5.0
    alpha: float = 5.0
    beta: float = 5.0
    delta: float = 10.0
    w_lower: float = IRIS_RKM_WEIGHTS[0]
    w_upper: float = IRIS_RKM_WEIGHTS[1]
    prune: float = 0.0
    algorithms: tuple = ALGORITHMS


@dataclass
class Cell:
    value: float | tuple | None = None
    seconds: float = 0.0
    note: str = ""
    detail: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.value is not None

    def text(self) -> str:
        if self.value is None:
            return self.note or "-"
        if isinstance(self.value, tuple):
            return f"({self.value[0]:.3f}, {self.value[1]:.3f})"
        return f"{self.value:.3f}"

    def to_dict(self) -> dict:
        return {"value": self.value, "seconds": round(self.seconds, 3), "note": self.note, **self.detail}


def _timed(fn):
    t0 = time.perf_counter()
    try:
        v, detail = fn()
        return Cell(v, time.perf_counter() - t0, detail=detail)
    except BudgetExceeded as e:
        return Cell(None, time.perf_counter() - t0, "budget exceeded",
                    {"count": str(e.count) if e.count < 10**30 else f"~1e{len(str(e.count)) - 1}",
                     "suggested_samples": e.suggested_samples})


def _point(v):
    """Collapse an interval whose ends coincide."""
    lo, hi = v
    return lo if abs(hi - lo) < 1e-12 else (lo, hi)


def _sim(iv):
    lo, hi = iv
    return _point((1.0 - hi, 1.0 - lo))


def fit_all(cfg: IrisConfig, data=None) -> dict:
    data = data if data is not None else load_iris()
    base = dict(k=3, seed=cfg.seed, n_init=cfg.n_init)
    out = {}
    for name in cfg.algorithms:
        t0 = time.perf_counter()
        if name == "KM":
            c = kmeans(data, FitConfig(**base))
        elif name == "RKM":
            c = rough_kmeans(data, FitConfig(**base, epsilon=cfg.epsilon, w_lower=cfg.w_lower,
                                             w_upper=cfg.w_upper))
        elif name == "FCM":
            c = fuzzy_cmeans(data, FitConfig(**base, m=cfg.m))
        elif name == "PCM":
            c = possibilistic_cmeans(data, FitConfig(**base, m=cfg.m))
        elif name == "ECM":
            c = evidential_cmeans(data, FitConfig(**base, alpha=cfg.alpha, beta=cfg.beta, delta=cfg.delta))
        else:
            raise ValueError(f"unknown algorithm {name!r}")
        if cfg.prune > 0 and name in ("FCM", "PCM", "ECM"):
            c = prune_masses(c, cfg.prune)
        out[name] = (c, time.perf_counter() - t0)
    return out


def evaluate(name: str, c, truth, cfg: IrisConfig) -> dict:
    """D-RI, S-RI, D-PD and S-PD cells for one clustering."""
    plan = SamplePlan(samples=cfg.samples, seed=cfg.seed, workers=cfg.workers, inner_samples=cfg.inner_samples)
    cells = {}
    if name == "KM":
        from .metrics import partition_distance, rand_index
        cells["D-RI"] = _timed(lambda: (rand_index(c, truth), {}))
        cells["D-PD"] = _timed(lambda: (partition_distance(c, truth), {}))
        cells["S-RI"] = Cell(note="-")
        cells["S-PD"] = Cell(note="-")
        return cells

    if name == "RKM":
        for row, base in (("D-RI", RAND), ("D-PD", PARTITION)):
            iv = _timed(lambda: (rough_interval(c, truth, base, cfg.budget), {}))
            if iv.ok:
                iv.value = _sim((iv.value.lower, iv.value.upper)) if base is RAND \
                    else _point((iv.value.lower, iv.value.upper))
            cells[row] = iv
    elif name == "FCM":
        cells["D-RI"] = _timed(lambda: (1.0 - fuzzy_rand_expectation_fast(c, truth), {"method": "closed form"}))
        cells["D-PD"] = _timed(lambda: (distributional_fuzzy(c, truth, PARTITION, cfg.budget).expectation, {}))
    else:
        src = possibilistic_rc_distribution(c) if name == "PCM" else c
        for row, base in (("D-RI", RAND), ("D-PD", PARTITION)):
            cell = _timed(lambda: (evidential_expectations(src, truth, base, cfg.budget), {}))
            if cell.ok:
                e = cell.value
                cell.value = _sim((e.lower, e.upper)) if base is RAND else _point((e.lower, e.upper))
            cells[row] = cell

    src = possibilistic_rc_distribution(c) if name == "PCM" else c
    for row, base in (("S-RI", RAND), ("S-PD", PARTITION)):
        def run(base=base):
            r = approximate(src, truth, base, plan, cfg.budget)
            v = _sim((r.lower, r.upper)) if base is RAND else _point((r.lower, r.upper))
            return v, {"mode": r.mode, "samples": r.samples_used, "hoeffding_epsilon": r.epsilon}
        cells[row] = _timed(run)
    return cells


def run_iris(cfg: IrisConfig | None = None) -> dict:
    """Fit every algorithm and evaluate it; returns ``{algorithm: {row: Cell}}`` plus fit times."""
    cfg = cfg or IrisConfig()
    data = load_iris()
    fits = fit_all(cfg, data)
    table = {}
    for name, (c, fit_seconds) in fits.items():
        cells = evaluate(name, c, data.labels, cfg)
        cells["fit"] = Cell(None, fit_seconds, "")
        table[name] = cells
    return table


def render(table: dict) -> str:
    names = list(table)
    width = 24
    lines = ["Metric | " + " | ".join(f"{n:^{width}}" for n in names)]
    lines.append("-" * len(lines[0]))
    for row in ROWS:
        vals = []
        for n in names:
            cell = table[n][row]
            txt = cell.text()
            if cell.ok or cell.note not in ("-", ""):
                txt += f" ({cell.seconds:.3f}s)"
            vals.append(f"{txt:^{width}}")
        lines.append(f"{row:<6} | " + " | ".join(vals))
    return "\n".join(lines)


def to_dict(table: dict) -> dict:
    return {n: {r: c.to_dict() for r, c in cells.items()} for n, cells in table.items()}
