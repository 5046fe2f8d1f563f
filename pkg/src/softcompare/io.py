"""CSV datasets, clustering files and evaluation reports.

Clustering files are JSON::

    {"format": "softcompare.clustering", "version": 1, "kind": "evidential",
     "frame": ["w1", "w2"],
     "objects": [{"focal": [{"set": ["w1"], "mass": 0.6}, {"set": ["w1", "w2"], "mass": 0.4}]},
                 "w1", ["w2"], [0.5, 0.5]]}

An object entry is a label (hard), a list of labels (rough), a membership
vector over the frame (fuzzy or possibilistic) or a focal map. Floats are
written with ``repr`` so a write/read cycle restores them exactly.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .clusterers import Dataset
from .errors import NonNumericFeature, ParseError, SchemaError, ValidationError
from .model import (
    Frame,
    HardClustering,
    MassFunction,
    SCKind,
    SoftClustering,
    as_soft,
    classify,
    is_singleton,
    possibility_to_consonant,
    singleton_index,
    validate_soft_clustering,
)

FORMAT = "softcompare.clustering"
VERSION = 1
KINDS = {k.value: k for k in SCKind}


# --- datasets ----------------------------------------------------------------------

def load_dataset(path, label_col: str | None = None, delimiter: str = ",") -> Dataset:
    """Read a CSV with a header row; every column except ``label_col`` must be numeric."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file", row=1) from None
        header = [h.strip() for h in header]
        if label_col is not None and label_col not in header:
            raise ParseError(f"{path}: no column named {label_col!r}", row=1)
        li = header.index(label_col) if label_col is not None else None
        names = tuple(h for i, h in enumerate(header) if i != li)
        rows, labels = [], []
        for r, rec in enumerate(reader, start=2):
            if not rec or all(not c.strip() for c in rec):
                continue
            if len(rec) != len(header):
                raise ParseError(f"{path}: row {r} has {len(rec)} fields, expected {len(header)}", row=r)
            vals = []
            for c, cell in enumerate(rec):
                if c == li:
                    labels.append(cell.strip())
                    continue
                try:
                    v = float(cell)
                except ValueError:
                    raise NonNumericFeature(f"{path}: row {r}, column {header[c]!r}: {cell!r} is not numeric",
                                            row=r, column=header[c]) from None
                if not math.isfinite(v):
                    raise NonNumericFeature(f"{path}: row {r}, column {header[c]!r}: non-finite value",
                                            row=r, column=header[c])
                vals.append(v)
            rows.append(vals)
    if not rows:
        raise ParseError(f"{path}: no data rows", row=2)
    truth = HardClustering.from_labels(labels) if li is not None else None
    return Dataset(np.array(rows), truth, names)


def iris_path():
    return resources.files("softcompare").joinpath("data/iris.csv")


def load_iris() -> Dataset:
    with resources.as_file(iris_path()) as p:
        return load_dataset(p, label_col="species")


# --- clustering files --------------------------------------------------------------

def _labels(frame: Frame, mask: int) -> list:
    return list(frame.labels_of(mask))


def clustering_to_dict(m) -> dict:
    m = as_soft(m)
    kind = classify(m)
    frame = m.frame
    k = frame.k
    if kind is SCKind.HARD:
        objects = [frame.clusters[singleton_index(f.focal[0][0])] for f in m.masses]
    elif kind is SCKind.ROUGH:
        objects = [_labels(frame, f.focal[0][0]) for f in m.masses]
    elif kind is SCKind.FUZZY:
        objects = []
        for f in m.masses:
            row = [0.0] * k
            for a, v in f.focal:
                row[singleton_index(a)] = v
            objects.append(row)
    else:
        # focal maps keep possibilistic masses exact; contours would need a round of arithmetic
        objects = [{"focal": [{"set": _labels(frame, a), "mass": v} for a, v in f.focal]} for f in m.masses]
    return {"format": FORMAT, "version": VERSION, "kind": kind.value, "frame": list(frame.clusters),
            "objects": objects}


def _entry(obj, x: int, kind: SCKind, frame: Frame, empty_set: str) -> MassFunction:
    if isinstance(obj, dict):
        if "focal" not in obj or not isinstance(obj["focal"], list):
            raise SchemaError(f"object {x}: focal map needs a 'focal' list")
        raw = {}
        for item in obj["focal"]:
            if not isinstance(item, dict) or "set" not in item or "mass" not in item:
                raise SchemaError(f"object {x}: focal entries need 'set' and 'mass'")
            if not isinstance(item["set"], list):
                raise SchemaError(f"object {x}: focal 'set' must be a list of labels")
            key = tuple(item["set"])
            if key in raw:
                raise SchemaError(f"object {x}: focal set {list(key)} listed twice")
            if isinstance(item["mass"], bool) or not isinstance(item["mass"], (int, float)):
                raise SchemaError(f"object {x}: mass must be a number")
            raw[key if key else None] = item["mass"]
        return validate_soft_clustering([raw], frame, empty_set).masses[0]
    if isinstance(obj, list) and kind in (SCKind.FUZZY, SCKind.POSSIBILISTIC) and obj \
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
        if len(obj) != frame.k:
            raise SchemaError(f"object {x}: membership vector of length {len(obj)} for a frame of {frame.k}")
        if kind is SCKind.POSSIBILISTIC:
            return possibility_to_consonant(obj)
        return SoftClustering.from_memberships([obj], frame).masses[0]
    if isinstance(obj, list):
        if not obj:
            raise ValidationError(f"object {x}: empty label set")
        return MassFunction.categorical(frame.mask(obj))
    if isinstance(obj, (str, int)) and not isinstance(obj, bool):
        return MassFunction.categorical(frame.mask((obj,)))
    raise SchemaError(f"object {x}: unrecognized entry {obj!r}")


def clustering_from_dict(doc, empty_set: str = "redistribute-omega") -> SoftClustering:
    if not isinstance(doc, dict):
        raise SchemaError("clustering file must hold a JSON object")
    if doc.get("format") != FORMAT:
        raise SchemaError(f"not a clustering file (format={doc.get('format')!r})")
    if doc.get("version") != VERSION:
        raise SchemaError(f"unsupported clustering file version {doc.get('version')!r}")
    kind = KINDS.get(doc.get("kind"))
    if kind is None:
        raise SchemaError(f"unknown kind {doc.get('kind')!r}; expected one of {sorted(KINDS)}")
    if not isinstance(doc.get("frame"), list) or not isinstance(doc.get("objects"), list):
        raise SchemaError("'frame' and 'objects' must be lists")
    if not doc["objects"]:
        raise ValidationError("a clustering needs at least one object")
    frame = Frame(tuple(doc["frame"]))
    masses = tuple(_entry(o, x, kind, frame, empty_set) for x, o in enumerate(doc["objects"]))
    return SoftClustering(frame, masses)


def write_clustering(m, path) -> None:
    Path(path).write_text(json.dumps(clustering_to_dict(m), indent=1) + "\n")


def read_clustering(path, empty_set: str = "redistribute-omega") -> SoftClustering:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path}: invalid JSON ({e.msg} at line {e.lineno})") from None
    return clustering_from_dict(doc, empty_set)


def is_hard_file(m: SoftClustering) -> bool:
    return all(f.is_logical and is_singleton(f.focal[0][0]) for f in m.masses)


# --- reports -----------------------------------------------------------------------

def sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class EvaluationReport:
    measure: str
    base: str
    mode: str
    result: dict
    params: dict = field(default_factory=dict)
    seed: int | None = None
    inputs: list = field(default_factory=list)
    counts: dict = field(default_factory=dict)
    seconds: float = 0.0

    def payload(self) -> dict:
        """The reproducible part of the report (no runtime)."""
        return {"inputs": self.inputs, "measure": self.measure, "base": self.base, "mode": self.mode,
                "params": self.params, "seed": self.seed, "result": self.result, "counts": self.counts}

    def to_dict(self) -> dict:
        return {**self.payload(), "seconds": round(self.seconds, 3)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=_jsonable)

    def to_table(self) -> str:
        lines = [f"measure   {self.measure} ({self.base})", f"mode      {self.mode}"]
        if self.seed is not None:
            lines.append(f"seed      {self.seed}")
        for i in self.inputs:
            lines.append(f"input     {i['path']}  sha256:{i['sha256'][:12]}")
        for key, val in self.result.items():
            lines.append(f"{key:<9} {_fmt(val)}")
        for key, val in self.counts.items():
            lines.append(f"{key:<9} {_fmt(val)}")
        lines.append(f"seconds   {self.seconds:.3f}")
        return "\n".join(lines)


def _jsonable(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    return str(o)


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, float):
        return f"{v:.4f}"
    if isinstance(v, (list, tuple)) and v and all(isinstance(x, float) for x in v):
        return "(" + ", ".join(f"{x:.4f}" for x in v) + ")"
    if isinstance(v, dict) and len(v) > 8:
        return f"{{{len(v)} entries}}"
    return json.dumps(v, default=_jsonable)
