import sys
from pathlib import Path

import numpy as np
import pytest

from softcompare.model import Frame, HardClustering, RoughClustering, SoftClustering, validate_soft_clustering

sys.path.insert(0, str(Path(__file__).parent))

FRAME = Frame(("w1", "w2"))


@pytest.fixture
def frame():
    return FRAME


@pytest.fixture
def c_hard():
    return HardClustering(FRAME, (0, 0, 1))


@pytest.fixture
def fixture_e():
    return validate_soft_clustering([{"w1": 0.6, ("w1", "w2"): 0.4}, {"w1": 1.0}, {"w2": 1.0}], FRAME)


@pytest.fixture
def fixture_r():
    return RoughClustering(FRAME, (0b11, 0b01, 0b10))


@pytest.fixture
def fixture_f1():
    return SoftClustering.from_memberships([[0.5, 0.5], [1.0, 0.0], [0.0, 1.0]], FRAME)


@pytest.fixture
def fixture_p():
    return SoftClustering.from_memberships([[1.0, 0.5], [1.0, 0.0], [0.0, 1.0]], FRAME, possibilistic=True)


def random_mass_clustering(rng, n, k, max_focal=2, dyadic=False):
    """Soft clustering with 1..max_focal random focal sets per object."""
    frame = Frame.of_size(k)
    raw = []
    for _ in range(n):
        nf = int(rng.integers(1, max_focal + 1))
        sets = set()
        while len(sets) < min(nf, 2 ** k - 1):
            sets.add(int(rng.integers(1, 2 ** k)))
        if dyadic:
            w = rng.multinomial(4, np.ones(len(sets)) / len(sets)) / 4.0
        else:
            w = rng.dirichlet(np.ones(len(sets)))
        entry = {}
        for a, v in zip(sorted(sets), w):
            if v > 0:
                entry[frame.labels_of(a)] = float(v)
        raw.append(entry)
    return validate_soft_clustering(raw, frame)


def random_rough(rng, n, k, hard_prob=0.3):
    frame = Frame.of_size(k)
    regions = []
    for _ in range(n):
        if rng.random() < hard_prob:
            regions.append(1 << int(rng.integers(0, k)))
        else:
            regions.append(int(rng.integers(1, 2 ** k)))
    return RoughClustering(frame, tuple(regions))


def random_hard(rng, n, k):
    return HardClustering(Frame.of_size(k), tuple(int(v) for v in rng.integers(0, k, n)))


def random_fuzzy(rng, n, k, sparse=True):
    mu = rng.dirichlet(np.ones(k), n)
    if sparse:
        # zero some memberships so that supports stay small
        drop = rng.random((n, k)) < 0.3
        drop[np.arange(n), mu.argmax(1)] = False
        mu = np.where(drop, 0.0, mu)
        mu /= mu.sum(1, keepdims=True)
    return SoftClustering.from_memberships(mu, Frame.of_size(k))


_ACCEPTANCE: list = []


def record(criterion, passed, detail=""):
    line = f"criterion {criterion}: {'PASS' if passed else 'FAIL'}  {detail}".rstrip()
    _ACCEPTANCE.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
