"""Matroidal networks: checking network-matroid maps and converting between
scalar linear codes and constrained matroid representations."""

from __future__ import annotations

from dataclasses import dataclass, field

from .galois import FieldMatrix, PrimeField, full_rank_row_basis, solve_right
from .lincode import (
    CodeError,
    LinearNetworkCode,
    demand_columns,
    make_code,
    verify_code,
)
from .matroid import RankOracle, VectorMatroid, subsets_up_to
from .netgraph import EdgeRef, NetworkProblem, in_set, link_order, out_set
from .reports import Report


@dataclass(frozen=True)
class NetworkMatroidMap:
    """Ground elements assigned to messages (by k), links (by id) and demands (by sink index)."""

    messages: dict[int, int]
    edges: dict[int, int]
    demands: dict[int, int] = field(default_factory=dict)

    def element(self, e: EdgeRef) -> int:
        table = {"x": self.messages, "e": self.edges, "t": self.demands}[e.kind]
        if e.index not in table:
            raise KeyError(f"network-matroid map has no assignment for {e}")
        return table[e.index]

    def image(self, edges) -> set[int]:
        return {self.element(e) for e in edges}

    def to_json(self) -> dict:
        return {"messages": {str(k): v for k, v in sorted(self.messages.items())},
                "edges": {str(k): v for k, v in sorted(self.edges.items())},
                "demands": {str(k): v for k, v in sorted(self.demands.items())}}

    @classmethod
    def from_json(cls, obj) -> "NetworkMatroidMap":
        if not isinstance(obj, dict):
            raise ValueError("map: top level must be an object")
        parts = []
        for key in ("messages", "edges", "demands"):
            raw = obj.get(key, {})
            if not isinstance(raw, dict):
                raise ValueError(f"map.{key}: expected an object")
            try:
                parts.append({int(k): int(v) for k, v in raw.items()})
            except (TypeError, ValueError):
                raise ValueError(f"map.{key}: keys and values must be integers") from None
        return cls(*parts)


def _check_totality(P: NetworkProblem, f: NetworkMatroidMap, n: int, rep: Report):
    for e in P.edge_refs():
        try:
            s = f.element(e)
        except KeyError as exc:
            rep.fail("map", str(e), str(exc.args[0]))
            continue
        if not 1 <= s <= n:
            raise IndexError(f"{e} mapped to {s}, outside ground set [1, {n}]")


def check_matroidal(P: NetworkProblem, M: RankOracle, f: NetworkMatroidMap) -> Report:
    """Check M1 (injective on messages), M2 (messages independent) and M3 per node."""
    rep = Report("matroidal network")
    _check_totality(P, f, M.n, rep)
    if not rep.passed:
        return rep
    msgs = [f.messages[k] for k in range(1, P.K + 1)]
    if len(set(msgs)) != len(msgs):
        seen: dict[int, int] = {}
        for k, s in enumerate(msgs, 1):
            if s in seen:
                rep.fail("M1", f"X{seen[s]}, X{k}", f"both mapped to element {s}")
            else:
                seen[s] = k
    r_msgs = M.rank(set(msgs))
    if r_msgs != len(set(msgs)):
        rep.fail("M2", "messages", f"r(f(X)) = {r_msgs} < {len(set(msgs))}", sorted(set(msgs)))
    for v in P.nodes:
        ins = f.image(in_set(P, v))
        both = ins | f.image(out_set(P, v))
        r_in, r_both = M.rank(ins), M.rank(both)
        if r_in != r_both:
            rep.fail("M3", f"node {v}",
                     f"r(f(In)) = {r_in} but r(f(In u Out)) = {r_both}", sorted(both - ins))
    return rep


def canonical_map(P: NetworkProblem) -> NetworkMatroidMap:
    """f(X_k) = k, links K+1.. in ancestral order, then demands."""
    K = P.K
    order = link_order(P)
    return NetworkMatroidMap(
        {k: k for k in range(1, K + 1)},
        {i: K + pos for pos, i in enumerate(order, 1)},
        {j: K + len(order) + j for j in range(1, len(P.sinks) + 1)},
    )


def matroid_from_code(P: NetworkProblem, code: LinearNetworkCode,
                      merge_unit_demands: bool = False) -> tuple[VectorMatroid, NetworkMatroidMap]:
    """Juxtapose [I_K | link globals | demand columns] into a vector matroid.

    With ``merge_unit_demands`` a demand equal to a unit vector shares the
    ground element of that message instead of getting its own column.
    """
    rep = verify_code(P, code)
    if not rep.passed:
        raise CodeError("code does not solve the problem:\n" + rep.render())
    f = canonical_map(P)
    K = P.K
    cols = [code.globals[EdgeRef("x", k)] for k in range(1, K + 1)]
    cols += [code.globals[EdgeRef("e", i)] for i in link_order(P)]
    demands = demand_columns(P)
    if merge_unit_demands:
        dmap = {}
        for j, col in demands.items():
            if sum(col) == 1 and max(col) == 1:
                dmap[j] = col.index(1) + 1
            else:
                cols.append(col)
                dmap[j] = len(cols)
        f = NetworkMatroidMap(f.messages, f.edges, dmap)
    else:
        cols += [demands[j] for j in range(1, len(P.sinks) + 1)]
    return VectorMatroid(FieldMatrix.from_columns(code.field, cols, rows=K)), f


@dataclass(frozen=True)
class ConstraintVerdict:
    ok: bool
    failures: tuple[str, ...] = ()

    def __bool__(self):
        return self.ok


def check_representation_constraints(M: FieldMatrix, P: NetworkProblem,
                                     f: NetworkMatroidMap) -> ConstraintVerdict:
    """C1: message columns are [I_K; 0]. C2: demand columns are [g_t; 0]."""
    K = P.K
    m, n = M.shape
    if m < K:
        raise ValueError(f"dimension mismatch: representation has {m} rows < K = {K}")
    if n < m:
        raise ValueError(f"dimension mismatch: representation has n = {n} < m = {m} columns")
    bad = []
    for k in range(1, K + 1):
        j = f.messages.get(k)
        if j is None or not 1 <= j <= n:
            bad.append(f"C1: X{k} has no column")
            continue
        want = tuple(int(i == k) for i in range(1, m + 1))
        if M.column(j) != want:
            bad.append(f"C1: column {j} for X{k} is {list(M.column(j))}, expected {list(want)}")
    for j, col in demand_columns(P).items():
        c = f.demands.get(j)
        if c is None or not 1 <= c <= n:
            bad.append(f"C2: t{j} has no column")
            continue
        want = tuple(col) + (0,) * (m - K)
        if M.column(c) != want:
            bad.append(f"C2: column {c} for t{j} is {list(M.column(c))}, expected {list(want)}")
    return ConstraintVerdict(not bad, tuple(bad))


def code_from_representation(M: FieldMatrix, P: NetworkProblem,
                             f: NetworkMatroidMap) -> LinearNetworkCode:
    """Turn a constrained representation into a scalar linear code.

    Redundant rows are dropped, rows past K act as dummy messages while the
    decoders are solved, and are then deleted.
    """
    if M.p != P.q:
        raise ValueError(f"representation over GF({M.p}) but problem alphabet is {P.q}")
    rep = check_matroidal(P, VectorMatroid(M), f)
    if not rep.passed:
        raise CodeError("map is not matroidal for this representation:\n" + rep.render())
    cv = check_representation_constraints(M, P, f)
    if not cv.ok:
        raise CodeError("representation violates constraints: " + "; ".join(cv.failures))
    B = full_rank_row_basis(M)
    K = P.K
    field_: PrimeField = B.field

    def col(e: EdgeRef) -> tuple[int, ...]:
        return B.column(f.element(e))

    decoders = {}
    for j in range(1, len(P.sinks) + 1):
        ins = in_set(P, P.sinks[j - 1].node)
        A = FieldMatrix.from_columns(field_, [col(e) for e in ins], rows=B.rows)
        d = solve_right(A, col(EdgeRef("t", j)))
        if d is None:
            raise CodeError(f"internal inconsistency: demand of t{j} outside the span of its In-set "
                            "although M3 holds")
        decoders[j] = d
    link_globals = {e.id: col(EdgeRef("e", e.id))[:K] for e in P.links}
    code = make_code(P, link_globals, decoders)
    check = verify_code(P, code)
    if not check.passed:
        raise CodeError("internal inconsistency: derived code fails verification:\n" + check.render())
    return code


def restricted_rank_agreement(A: RankOracle, B: RankOracle, elements_a, elements_b,
                              max_size: int) -> tuple[int, ...] | None:
    """First subset (as positions into the element lists) where the two ranks differ."""
    for S in subsets_up_to(len(elements_a), max_size):
        ra = A.rank({elements_a[i - 1] for i in S})
        rb = B.rank({elements_b[i - 1] for i in S})
        if ra != rb:
            return S
    return None

