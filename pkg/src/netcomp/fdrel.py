"""FD-relations on the edge set and functional representations.

The generator set of a problem pairs every node's In-set with its outgoing
links, and every sink's In-set with its demand edge. Membership in the
generated FD-relation is decided by attribute closure. Two orientations of
the reflexivity axiom are supported:

* ``"consistent"`` (default): ``J ⊆ I`` implies ``(I, J)``. Every functional
  representation satisfies it.
* ``"paper"``: ``I ⊆ J`` implies ``(I, J)``, read literally. Every set then
  determines the whole ground set, so closures are trivial.

A functional representation assigns each edge a function of the message
tuple; it is valid when, for every generator ``(I, J)``, the values on ``J``
are a function of the values on ``I``. Generator-level checking suffices:
the composition of two such functions is again one.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from . import kernels
from .netgraph import (
    EdgeRef,
    NetworkProblem,
    T,
    X,
    canonical,
    demand_table,
    in_set,
    in_set_of_edge,
    link_order,
    out_prime,
    sink_in_set,
)
from .reports import Report
from .tables import (
    DEFAULT_TUPLE_BUDGET,
    FunctionTable,
    encode_columns,
    message_grid,
    symbol_dtype,
    tuple_at,
)

ORIENTATIONS = ("consistent", "paper")
MAX_EXPLICIT_GROUND = 6
FUNCTIONAL = "Phi_J=Psi(Phi_I)"


class FDError(ValueError):
    pass


# ----------------------------------------------------------------- generators


@dataclass(frozen=True)
class FDPair:
    I: frozenset
    J: frozenset
    label: str = ""

    def to_json(self) -> dict:
        return {"I": [str(e) for e in canonical(self.I)], "J": [str(e) for e in canonical(self.J)],
                "from": self.label}


@dataclass(frozen=True)
class FDGenerators:
    ground: tuple
    pairs: tuple[FDPair, ...]

    def __post_init__(self):
        g = set(self.ground)
        for p in self.pairs:
            if not (p.I <= g and p.J <= g):
                raise FDError(f"generator {p.label or p} uses elements outside the ground set")


def build_QE(P: NetworkProblem) -> FDGenerators:
    """(In(v), Out'(v)) for each node with outgoing links, (In(t), {t}) per sink."""
    pairs = []
    for v in P.nodes:
        outs = out_prime(P, v)
        if outs:
            pairs.append(FDPair(frozenset(in_set(P, v)), frozenset(outs), f"node {v}"))
        for j, s in enumerate(P.sinks, 1):
            if s.node == v:
                pairs.append(FDPair(frozenset(in_set(P, v)), frozenset({T(j)}), f"sink t{j}"))
    return FDGenerators(tuple(P.edge_refs()), tuple(pairs))


def attr_closure(G: FDGenerators, I: Iterable, orientation: str = "consistent") -> frozenset:
    """Largest J with (I, J) in the generated FD-relation."""
    I = frozenset(I)
    if not I <= set(G.ground):
        raise FDError("closure argument is not a subset of the ground set")
    if orientation == "paper":
        return frozenset(G.ground)
    if orientation != "consistent":
        raise ValueError(f"orientation must be one of {ORIENTATIONS}")
    current = set(I)
    pending = list(G.pairs)
    changed = True
    while changed:
        changed = False
        rest = []
        for p in pending:
            if p.I <= current:
                if not p.J <= current:
                    current |= p.J
                changed = True
            else:
                rest.append(p)
        pending = rest
    return frozenset(current)


def fd_member(G: FDGenerators, I: Iterable, J: Iterable, orientation: str = "consistent") -> bool:
    return frozenset(J) <= attr_closure(G, I, orientation)


# ----------------------------------------------------------------- explicit relations


def _subsets_of(mask: int):
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def explicit_closure(gen_masks: Iterable[tuple[int, int]], n: int,
                     orientation: str = "consistent") -> set[tuple[int, int]]:
    """Brute-force closure of generator pairs (bitmasks) under FD1/FD1', FD2, FD3."""
    if n > MAX_EXPLICIT_GROUND:
        raise FDError(f"explicit closure limited to ground size {MAX_EXPLICIT_GROUND}")
    total = 1 << n
    rel = [0] * total  # rel[I] is a bitset over J
    for I, J in gen_masks:
        rel[I] |= 1 << J
    for I in range(total):
        if orientation == "consistent":
            for J in _subsets_of(I):
                rel[I] |= 1 << J
        else:
            comp = (total - 1) & ~I
            for extra in _subsets_of(comp):
                rel[I] |= 1 << (I | extra)
    changed = True
    while changed:
        changed = False
        for I in range(total):
            row = rel[I]
            new = row
            for J in range(total):
                if row >> J & 1:
                    nxt = rel[J]
                    new |= nxt  # FD2
                    for K in range(total):
                        if nxt >> K & 1:
                            new |= 1 << (J | K)  # FD3
            if new != row:
                rel[I] = new
                changed = True
    return {(I, J) for I in range(total) for J in range(total) if rel[I] >> J & 1}


@dataclass(frozen=True)
class FDViolation:
    axiom: str
    witness: tuple

    def __str__(self):
        return f"{self.axiom} at {self.witness}"


def check_fd_axioms(pairs: Iterable[tuple[int, int]], n: int, orientation: str = "consistent",
                    limit: int = 100) -> list[FDViolation]:
    """Exhaustive FD1 (or FD1'), FD2, FD3 check of an explicit relation on bitmasks."""
    if n > MAX_EXPLICIT_GROUND:
        raise FDError(f"explicit axiom check limited to ground size {MAX_EXPLICIT_GROUND}")
    if orientation not in ORIENTATIONS:
        raise ValueError(f"orientation must be one of {ORIENTATIONS}")
    Q = set(pairs)
    total = 1 << n
    out: list[FDViolation] = []
    name1 = "FD1'" if orientation == "consistent" else "FD1"
    for I in range(total):
        for J in range(total):
            proj = (J & I) == J if orientation == "consistent" else (I & J) == I
            if proj and (I, J) not in Q:
                out.append(FDViolation(name1, (I, J)))
                if len(out) >= limit:
                    return out
    by_first: dict[int, list[int]] = {}
    for I, J in Q:
        by_first.setdefault(I, []).append(J)
    for I, J in sorted(Q):
        for K in sorted(by_first.get(J, [])):
            if (I, K) not in Q:
                out.append(FDViolation("FD2", (I, J, K)))
            if (I, J | K) not in Q:
                out.append(FDViolation("FD3", (I, J, K)))
            if len(out) >= limit:
                return out[:limit]
    return out


def generators_to_masks(G: FDGenerators) -> tuple[list[tuple[int, int]], dict]:
    index = {e: i for i, e in enumerate(G.ground)}

    def mask(S):
        return sum(1 << index[e] for e in S)

    return [(mask(p.I), mask(p.J)) for p in G.pairs], index


# ----------------------------------------------------------------- functional representations


PhiMap = Mapping[EdgeRef, FunctionTable]


def _fingerprint(columns: list[np.ndarray], q: int, size: int) -> np.ndarray:
    """One int64 key per position, equal iff the column tuples are equal."""
    if not columns:
        return np.zeros(size, dtype=np.int64)
    key = np.zeros(size, dtype=np.int64)
    span = 1
    for col in columns:
        if span * q >= 1 << 62:
            _, inv = np.unique(key, return_inverse=True)
            key = inv.reshape(-1).astype(np.int64)
            span = int(key.max()) + 1
        key = key * q + col.astype(np.int64)
        span *= q
    return key


def evaluate_phi(P: NetworkProblem, phi: PhiMap, q: int | None = None,
                 budget: int = DEFAULT_TUPLE_BUDGET) -> tuple[list[np.ndarray], dict[EdgeRef, np.ndarray]]:
    """Evaluate every edge function on all of [q]^K.

    Message edges default to the coordinate function and demand edges to the
    sink's demand when ``phi`` does not list them.
    """
    q = q or P.q
    K = P.K
    grid = message_grid(q, K, budget)
    size = q**K
    vals: dict[EdgeRef, np.ndarray] = {}
    for e in P.edge_refs():
        tab = phi.get(e)
        if tab is None:
            if e.kind == "x":
                tab = FunctionTable.coordinate(e.index)
            elif e.kind == "t":
                tab = demand_table(P.sink_demand(e.index), K)
            else:
                raise FDError(f"no function assigned to {e}")
        v = tab.evaluate(grid, q)
        if v.shape[0] != size:
            v = np.broadcast_to(v, (size,))
        vals[e] = v
    return grid, vals


def _generator_conflict(args):
    I_cols, J_cols, q, size = args
    keys = _fingerprint(I_cols, q, size)
    vals = _fingerprint(J_cols, q, size)
    return kernels.first_conflict(keys, vals)


def check_functional_representation(P: NetworkProblem, phi: PhiMap, q: int | None = None,
                                    budget: int = DEFAULT_TUPLE_BUDGET,
                                    reference: bool = False) -> Report:
    """Check C1', C2' pointwise and that each generator's J is a function of its I.

    A failing generator is reported with a witness pair of message tuples
    that agree on I but not on J. ``reference=True`` switches to the
    quadratic all-pairs scan (small instances only).
    """
    q = q or P.q
    K = P.K
    rep = Report("functional representation")
    try:
        grid, vals = evaluate_phi(P, phi, q, budget)
    except FDError as exc:
        rep.fail("phi", "map", str(exc))
        return rep
    size = q**K
    for k in range(1, K + 1):
        bad = np.nonzero(vals[X(k)] != grid[k - 1])[0]
        if bad.size:
            x = int(bad[0])
            rep.fail("C1'", f"x{k}", f"Phi(X) != X_{k} at X = {tuple_at(q, K, x)}", [tuple_at(q, K, x)])
    for j in range(1, len(P.sinks) + 1):
        want = demand_table(P.sink_demand(j), K).evaluate(grid, q)
        bad = np.nonzero(vals[T(j)] != want)[0]
        if bad.size:
            x = int(bad[0])
            rep.fail("C2'", f"t{j}", f"Phi(X) != g_t(X) at X = {tuple_at(q, K, x)}", [tuple_at(q, K, x)])
    G = build_QE(P)
    jobs = [([vals[e] for e in canonical(p.I)], [vals[e] for e in canonical(p.J)], q, size)
            for p in G.pairs]
    if reference:
        results = [_reference_conflict(*job) for job in jobs]
    else:
        workers = min(kernels.thread_cap(), max(1, len(jobs)))
        if workers > 1:
            with ThreadPoolExecutor(workers) as pool:
                results = list(pool.map(_generator_conflict, jobs))
        else:
            results = [_generator_conflict(job) for job in jobs]
    for p, hit in zip(G.pairs, results):
        if hit is None:
            continue
        i, jj = hit
        xa, xb = tuple_at(q, K, i), tuple_at(q, K, jj)
        ins = canonical(p.I)
        rep.fail(FUNCTIONAL, p.label,
                 f"X = {xa} and X' = {xb} agree on {[str(e) for e in ins]} "
                 f"but differ on {[str(e) for e in canonical(p.J)]}",
                 [xa, xb])
    rep.info = {"q": q, "K": K, "tuples": size, "generators": len(G.pairs)}
    return rep


def _reference_conflict(I_cols, J_cols, q, size):
    if size > 4096:
        raise FDError("quadratic reference mode is limited to q^K <= 4096")
    I = np.stack(I_cols, axis=1) if I_cols else np.zeros((size, 0), dtype=np.int64)
    J = np.stack(J_cols, axis=1)
    for b in range(1, size):
        same = (I[:b] == I[b]).all(axis=1)
        clash = same & ~(J[:b] == J[b]).all(axis=1)
        if clash.any():
            return int(np.argmax(same)), b
    return None


# ----------------------------------------------------------------- nonlinear codes


@dataclass(frozen=True)
class NonlinearCode:
    """Local kernels over canonical In(e) and decoders over canonical In(t)."""

    q: int
    K: int
    locals: dict[int, FunctionTable]
    decoders: dict[int, FunctionTable] = field(default_factory=dict)


def execute(P: NetworkProblem, code: NonlinearCode, q: int | None = None,
            budget: int = DEFAULT_TUPLE_BUDGET) -> dict[EdgeRef, np.ndarray]:
    """Run the code on every message tuple; demand edges hold the decoder outputs."""
    q = q or code.q
    grid = message_grid(q, P.K, budget)
    size = q**P.K
    vals: dict[EdgeRef, np.ndarray] = {X(k): grid[k - 1] for k in range(1, P.K + 1)}

    def apply(tab: FunctionTable, ins: list[EdgeRef]) -> np.ndarray:
        out = tab.evaluate([vals[e] for e in ins], q)
        return out if out.shape[0] == size else np.broadcast_to(out, (size,))

    for i in link_order(P):
        if i not in code.locals:
            raise FDError(f"no local kernel for e{i}")
        vals[EdgeRef("e", i)] = apply(code.locals[i], in_set_of_edge(P, i))
    for j in range(1, len(P.sinks) + 1):
        if j in code.decoders:
            vals[T(j)] = apply(code.decoders[j], sink_in_set(P, j))
    return vals


def sinks_satisfied(P: NetworkProblem, code: NonlinearCode, q: int | None = None) -> dict[int, bool]:
    q = q or code.q
    vals = execute(P, code, q)
    grid = message_grid(q, P.K)
    out = {}
    for j in range(1, len(P.sinks) + 1):
        if T(j) not in vals:
            out[j] = False
            continue
        want = demand_table(P.sink_demand(j), P.K).evaluate(grid, q)
        out[j] = bool(np.array_equal(vals[T(j)], want))
    return out


def _tabulate_map(in_cols: list[np.ndarray], out_col: np.ndarray, q: int) -> FunctionTable:
    """Table of ``out`` as a function of the packed ``in`` tuple; unreached inputs map to 0."""
    n = len(in_cols)
    table = np.zeros(q**n, dtype=symbol_dtype(q))
    key = encode_columns(in_cols, q, size=out_col.shape[0])
    table[key] = out_col
    return FunctionTable.explicit(table)


def code_from_fd_representation(P: NetworkProblem, phi: PhiMap, q: int | None = None,
                                budget: int = DEFAULT_TUPLE_BUDGET) -> NonlinearCode:
    """Read local kernels and decoders off a valid functional representation."""
    q = q or P.q
    rep = check_functional_representation(P, phi, q, budget)
    if not rep.passed:
        raise FDError("not a functional representation satisfying C1'/C2':\n" + rep.render())
    _, vals = evaluate_phi(P, phi, q, budget)
    locals_ = {}
    for i in link_order(P):
        ins = in_set_of_edge(P, i)
        locals_[i] = _tabulate_map([vals[e] for e in ins], vals[EdgeRef("e", i)], q)
    decoders = {}
    for j in range(1, len(P.sinks) + 1):
        ins = sink_in_set(P, j)
        decoders[j] = _tabulate_map([vals[e] for e in ins], vals[T(j)], q)
    return NonlinearCode(q, P.K, locals_, decoders)


def fd_rep_from_code(P: NetworkProblem, code: NonlinearCode, q: int | None = None,
                     budget: int = DEFAULT_TUPLE_BUDGET) -> dict[EdgeRef, FunctionTable]:
    """Global kernels of a code, tabulated over [q]^K by forward execution."""
    vals = execute(P, code, q, budget)
    phi = {e: FunctionTable.explicit(v) for e, v in vals.items() if e.kind == "e"}
    return phi


def phi_from_linear_code(code) -> dict[EdgeRef, FunctionTable]:
    """Linear global vectors as functions ``X -> X . F_e``."""
    return {e: FunctionTable.linear(v) for e, v in code.globals.items() if e.kind in ("x", "e")}


def nonlinear_from_linear(P: NetworkProblem, locals_: Mapping[int, tuple[int, ...]],
                          decoders: Mapping[int, tuple[int, ...]], q: int) -> NonlinearCode:
    return NonlinearCode(
        q, P.K,
        {i: FunctionTable.linear(c) for i, c in locals_.items()},
        {j: FunctionTable.linear(d) for j, d in decoders.items()},
    )


# ----------------------------------------------------------------- JSON


def _tables_from_json(raw, where: str) -> dict[EdgeRef, FunctionTable]:
    if not isinstance(raw, dict):
        raise ValueError(f"{where}: expected an object")
    out = {}
    for name, obj in raw.items():
        try:
            e = EdgeRef.parse(name)
        except ValueError as exc:
            raise ValueError(f"{where}: {exc}") from None
        out[e] = FunctionTable.from_json(obj, f"{where}.{name}")
    return out


def phi_from_json(obj) -> tuple[int, int, dict[EdgeRef, FunctionTable]]:
    if not isinstance(obj, dict):
        raise ValueError("phi: top level must be an object")
    for key in ("q", "K", "tables"):
        if key not in obj:
            raise ValueError(f"phi: missing field {key!r}")
    return obj["q"], obj["K"], _tables_from_json(obj["tables"], "phi.tables")


def phi_to_json(q: int, K: int, phi: PhiMap) -> dict:
    return {"q": q, "K": K,
            "tables": {str(e): t.to_json() for e, t in sorted(phi.items(), key=lambda kv: kv[0].sort_key)}}


def nonlinear_code_from_json(obj) -> NonlinearCode:
    if not isinstance(obj, dict):
        raise ValueError("code: top level must be an object")
    for key in ("q", "K", "locals"):
        if key not in obj:
            raise ValueError(f"code: missing field {key!r}")
    locals_ = {}
    for e, t in _tables_from_json(obj["locals"], "code.locals").items():
        if e.kind != "e":
            raise ValueError(f"code.locals: {e} is not a link")
        locals_[e.index] = t
    decoders = {}
    for e, t in _tables_from_json(obj.get("decoders", {}), "code.decoders").items():
        if e.kind != "t":
            raise ValueError(f"code.decoders: {e} is not a sink")
        decoders[e.index] = t
    return NonlinearCode(obj["q"], obj["K"], locals_, decoders)


def nonlinear_code_to_json(code: NonlinearCode) -> dict:
    return {"q": code.q, "K": code.K,
            "locals": {f"e{i}": t.to_json() for i, t in sorted(code.locals.items())},
            "decoders": {f"t{j}": t.to_json() for j, t in sorted(code.decoders.items())}}
