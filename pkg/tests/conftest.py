from __future__ import annotations

import itertools
import json
from importlib import resources

import numpy as np
import pytest

from netcomp.bridge import NetworkMatroidMap
from netcomp.galois import FieldMatrix, matrix_from_json
from netcomp.netgraph import in_set, out_set, problem_from_json


def fixture_path(name: str):
    return resources.files("netcomp") / "fixtures" / name


def load_json(name: str):
    return json.loads(fixture_path(name).read_text())


def load_problem(name: str):
    return problem_from_json(load_json(name))


def load_matrix(name: str):
    return matrix_from_json(load_json(name))


def span_size(cols, p: int, K: int) -> int:
    """Number of distinct vectors in the span, by enumerating all combinations."""
    cols = [np.asarray(c, dtype=np.int64) for c in cols]
    seen = set()
    for coeffs in itertools.product(range(p), repeat=len(cols)):
        v = np.zeros(K, dtype=np.int64)
        for c, col in zip(coeffs, cols):
            v = (v + c * col) % p
        seen.add(tuple(v))
    return len(seen)


def brute_rank(cols, p: int, K: int) -> int:
    """Column rank via |span| = p^rank."""
    n = span_size(cols, p, K)
    r = 0
    while p**r < n:
        r += 1
    return r


def brute_in_span(cols, target, p: int) -> bool:
    target = tuple(int(t) % p for t in target)
    cols = [np.asarray(c, dtype=np.int64) for c in cols]
    for coeffs in itertools.product(range(p), repeat=len(cols)):
        v = np.zeros(len(target), dtype=np.int64)
        for c, col in zip(coeffs, cols):
            v = (v + c * col) % p
        if tuple(int(x) for x in v) == target:
            return True
    return False


def definition1_oracle(P, A: FieldMatrix, f: NetworkMatroidMap) -> set[str]:
    """Which of M1-M3 fail, using enumeration-based ranks."""
    cols = lambda S: [A.column(s) for s in sorted(S)]  # noqa: E731
    r = lambda S: brute_rank(cols(S), A.p, A.rows)  # noqa: E731
    failed = set()
    msgs = [f.messages[k] for k in range(1, P.K + 1)]
    if len(set(msgs)) != len(msgs):
        failed.add("M1")
    if r(set(msgs)) != len(set(msgs)):
        failed.add("M2")
    for v in P.nodes:
        ins = {f.element(e) for e in in_set(P, v)}
        outs = {f.element(e) for e in out_set(P, v)}
        if r(ins) != r(ins | outs):
            failed.add("M3")
    return failed


@pytest.fixture
def fig1():
    return load_problem("fig1.json")


@pytest.fixture
def table1():
    return load_problem("table1.json")


@pytest.fixture
def butterfly():
    return load_problem("butterfly_sum.json")


ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
