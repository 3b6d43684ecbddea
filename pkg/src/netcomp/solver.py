"""Exhaustive search for scalar solutions.

Both searches walk the links in ancestral order, trying kernels in
lexicographic order, and return the first (hence lexicographically least)
complete assignment under which every sink can decode. Two prunings keep
this tractable without changing the answer:

* at each link, kernels that yield a global already produced by an earlier
  kernel at the same step are skipped;
* a sink is checked as soon as its whole In-set is assigned, and a state
  (the globals still needed downstream) that was shown infeasible is never
  expanded twice.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from . import kernels
from .fdrel import NonlinearCode, _tabulate_map
from .galois import FieldMatrix, PrimeField, is_prime, solve_right
from .lincode import CodeError, LinearNetworkCode, demand_columns, make_code, unit
from .netgraph import (
    EdgeRef,
    NetworkProblem,
    X,
    demand_table,
    in_set_of_edge,
    link_order,
    normalize_multi_demand,
    sink_in_set,
)
from .tables import FunctionTable, encode_columns, message_grid, symbol_dtype

LINEAR_BITS_CAP = 40


class BudgetError(ValueError):
    """The instance is structurally too large for the requested search."""


@dataclass(frozen=True)
class SolveBudget:
    max_candidates: int = 10_000_000
    time_limit: float = 60.0
    mode: str = "exhaustive"  # or "randomized"
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("exhaustive", "randomized"):
            raise ValueError(f"mode must be 'exhaustive' or 'randomized', got {self.mode!r}")


@dataclass
class Solution:
    q: int
    code: Union[LinearNetworkCode, NonlinearCode]
    locals: dict
    mode: str
    candidates_examined: int
    elapsed: float

    def provenance(self) -> dict:
        return {"mode": self.mode, "candidates_examined": self.candidates_examined,
                "elapsed": round(self.elapsed, 6)}


@dataclass
class Unsolvable:
    q: int
    candidates_examined: int
    elapsed: float
    reason: str = "exhaustive search found no solution"


@dataclass
class Unknown:
    q: int
    candidates_examined: int
    elapsed: float
    reason: str = "budget exhausted"


Outcome = Union[Solution, Unsolvable, Unknown]


class _OutOfBudget(Exception):
    pass


@dataclass
class _Plan:
    order: list[int]
    ins: dict[int, list[EdgeRef]]
    # sinks checked right after position d (-1: before any link)
    checks: dict[int, list[int]]
    # edges whose globals matter after position d
    live: list[list[EdgeRef]] = field(default_factory=list)


def _plan(P: NetworkProblem) -> _Plan:
    order = link_order(P)
    pos = {i: d for d, i in enumerate(order)}
    ins = {i: in_set_of_edge(P, i) for i in order}
    checks: dict[int, list[int]] = {}
    sink_ins = {j: sink_in_set(P, j) for j in range(1, len(P.sinks) + 1)}
    done_at = {}
    for j, s_in in sink_ins.items():
        d = max([pos[e.index] for e in s_in if e.kind == "e"], default=-1)
        checks.setdefault(d, []).append(j)
        done_at[j] = d
    live = []
    for d in range(len(order)):
        need = set()
        for i in order[d + 1:]:
            need.update(e for e in ins[i] if e.kind == "e" and pos[e.index] <= d)
        for j, s_in in sink_ins.items():
            if done_at[j] > d:
                need.update(e for e in s_in if e.kind == "e" and pos[e.index] <= d)
        live.append(sorted(need, key=lambda e: e.sort_key))
    return _Plan(order, ins, checks, live)


class _Clock:
    def __init__(self, budget: SolveBudget):
        self.budget = budget
        self.count = 0
        self.start = time.perf_counter()

    def tick(self):
        self.count += 1
        if self.count > self.budget.max_candidates:
            raise _OutOfBudget
        if self.count % 1024 == 0 and time.perf_counter() - self.start > self.budget.time_limit:
            raise _OutOfBudget

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self.start


def linear_search_bits(P: NetworkProblem, q: int) -> float:
    return sum(len(in_set_of_edge(P, i)) for i in link_order(P)) * math.log2(q)


def solve_scalar_linear(P: NetworkProblem, budget: SolveBudget | None = None,
                        q: int | None = None) -> Outcome:
    """Lexicographically least scalar linear solution over GF(q), if any."""
    budget = budget or SolveBudget()
    q = q or P.q
    if not is_prime(q):
        raise ValueError(f"linear search needs a prime field size, got {q}")
    P = normalize_multi_demand(P.with_q(q))
    demands = demand_columns(P)  # raises CodeError on nonlinear demands
    bits = linear_search_bits(P, q)
    if budget.mode == "exhaustive" and bits > LINEAR_BITS_CAP:
        raise BudgetError(f"search space 2^{bits:.1f} exceeds the exhaustive cap 2^{LINEAR_BITS_CAP}")
    if budget.mode == "randomized":
        return _linear_randomized(P, q, demands, budget)

    field_ = PrimeField(q)
    K = P.K
    plan = _plan(P)
    clock = _Clock(budget)
    g: dict[EdgeRef, tuple[int, ...]] = {X(k): unit(k, K) for k in range(1, K + 1)}
    chosen: list[tuple[int, ...]] = []
    failed: set = set()

    def decodable(j: int) -> bool:
        cols = [g[e] for e in sink_in_set(P, j)]
        return solve_right(FieldMatrix.from_columns(field_, cols, rows=K), demands[j]) is not None

    def candidates(i: int):
        ins = plan.ins[i]
        basis = np.array([g[e] for e in ins], dtype=np.int64).reshape(len(ins), K)
        seen = set()
        for c in itertools.product(range(q), repeat=len(ins)):
            v = tuple(int(x) for x in (np.asarray(c, dtype=np.int64) @ basis) % q) if ins else (0,) * K
            if v in seen:
                continue
            seen.add(v)
            yield c, v

    def dfs(d: int) -> bool:
        if d == len(plan.order):
            return True
        i = plan.order[d]
        for c, v in candidates(i):
            clock.tick()
            g[EdgeRef("e", i)] = v
            if all(decodable(j) for j in plan.checks.get(d, [])):
                key = (d, tuple(g[e] for e in plan.live[d]))
                if key not in failed:
                    chosen.append(c)
                    if dfs(d + 1):
                        return True
                    chosen.pop()
                    failed.add(key)
        del g[EdgeRef("e", i)]
        return False

    if not all(decodable(j) for j in plan.checks.get(-1, [])):
        return Unsolvable(q, clock.count, clock.elapsed, "a sink without incoming links cannot decode")
    try:
        found = dfs(0)
    except _OutOfBudget:
        return Unknown(q, clock.count, clock.elapsed)
    if not found:
        return Unsolvable(q, clock.count, clock.elapsed)
    locals_ = dict(zip(plan.order, chosen))
    code = make_code(P, {i: g[EdgeRef("e", i)] for i in plan.order})
    decoders = {}
    for j, col in demands.items():
        cols = [code.globals[e] for e in sink_in_set(P, j)]
        decoders[j] = solve_right(FieldMatrix.from_columns(field_, cols, rows=K), col)
    return Solution(q, code.with_decoders(decoders), locals_, "exhaustive", clock.count, clock.elapsed)


def _linear_randomized(P: NetworkProblem, q: int, demands, budget: SolveBudget) -> Outcome:
    from .lincode import globals_from_locals, solve_decoders

    rng = np.random.default_rng(budget.seed)
    clock = _Clock(budget)
    order = link_order(P)
    sizes = {i: len(in_set_of_edge(P, i)) for i in order}
    try:
        while True:
            clock.tick()
            locals_ = {i: tuple(int(x) for x in rng.integers(0, q, sizes[i])) for i in order}
            code = globals_from_locals(P, locals_)
            dec = solve_decoders(P, code)
            if dec is not None:
                return Solution(q, code.with_decoders(dec), locals_, "randomized", clock.count, clock.elapsed)
    except _OutOfBudget:
        return Unknown(q, clock.count, clock.elapsed)


# ----------------------------------------------------------------- nonlinear


def nonlinear_space(P: NetworkProblem, q: int) -> int:
    return math.prod(q ** (q ** len(in_set_of_edge(P, i))) for i in link_order(P))


def solve_scalar_nonlinear_exhaustive(P: NetworkProblem, q: int | None = None,
                                      budget: SolveBudget | None = None) -> Outcome:
    """Lexicographically least scalar code of arbitrary local kernels.

    Kernels are explicit tables over In(e), ordered lexicographically by their
    value lists. Practical only for tiny instances.
    """
    budget = budget or SolveBudget()
    q = q or P.q
    P = normalize_multi_demand(P.with_q(q))
    K = P.K
    space = nonlinear_space(P, q)
    if space > budget.max_candidates:
        raise BudgetError(f"{space} kernel assignments exceed the candidate budget {budget.max_candidates}")
    grid = message_grid(q, K)
    size = q**K
    wants = {j: demand_table(P.sink_demand(j), K).evaluate(grid, q) for j in range(1, len(P.sinks) + 1)}
    plan = _plan(P)
    clock = _Clock(budget)
    vals: dict[EdgeRef, np.ndarray] = {X(k): grid[k - 1] for k in range(1, K + 1)}
    chosen: list[tuple[int, ...]] = []
    failed: set = set()
    dt = symbol_dtype(q)

    def decodable(j: int) -> bool:
        ins = sink_in_set(P, j)
        keys = encode_columns([vals[e] for e in ins], q, size=size)
        return kernels.first_conflict(keys, wants[j]) is None

    def candidates(i: int):
        ins = plan.ins[i]
        keys = encode_columns([vals[e] for e in ins], q, size=size)
        seen = set()
        for table in itertools.product(range(q), repeat=q ** len(ins)):
            v = np.asarray(table, dtype=dt)[keys]
            b = v.tobytes()
            if b in seen:
                continue
            seen.add(b)
            yield table, v

    def dfs(d: int) -> bool:
        if d == len(plan.order):
            return True
        i = plan.order[d]
        for table, v in candidates(i):
            clock.tick()
            vals[EdgeRef("e", i)] = v
            if all(decodable(j) for j in plan.checks.get(d, [])):
                key = (d, b"".join(vals[e].tobytes() for e in plan.live[d]))
                if key not in failed:
                    chosen.append(table)
                    if dfs(d + 1):
                        return True
                    chosen.pop()
                    failed.add(key)
        del vals[EdgeRef("e", i)]
        return False

    if not all(decodable(j) for j in plan.checks.get(-1, [])):
        return Unsolvable(q, clock.count, clock.elapsed, "a sink without incoming links cannot decode")
    try:
        found = dfs(0)
    except _OutOfBudget:
        return Unknown(q, clock.count, clock.elapsed)
    if not found:
        return Unsolvable(q, clock.count, clock.elapsed)
    locals_ = {i: FunctionTable.explicit(np.asarray(t, dtype=np.int64)) for i, t in zip(plan.order, chosen)}
    decoders = {}
    for j in range(1, len(P.sinks) + 1):
        ins = sink_in_set(P, j)
        decoders[j] = _tabulate_map([vals[e] for e in ins], wants[j], q)
    code = NonlinearCode(q, K, locals_, decoders)
    return Solution(q, code, {i: tuple(t) for i, t in zip(plan.order, chosen)}, "exhaustive",
                    clock.count, clock.elapsed)


__all__ = [
    "SolveBudget", "Solution", "Unsolvable", "Unknown", "BudgetError", "CodeError",
    "solve_scalar_linear", "solve_scalar_nonlinear_exhaustive", "linear_search_bits", "nonlinear_space",
]
