"""Network computation problems over a DAG.

Edges come in three classes, named by :class:`EdgeRef`:

* ``x<k>`` - the tailless edge carrying source message ``X_k`` into its node,
* ``e<i>`` - a unit-capacity link with integer id ``i``,
* ``t<j>`` - the headless demand edge of the ``j``-th sink (1-based, in sink order).

Kernel coefficient vectors and decoders index an In-set in canonical
order: message edges by ``k``, then links by id.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field, replace
from typing import Hashable, NamedTuple, Union

from .galois import is_prime
from .tables import FunctionTable

Node = Hashable

_KIND_ORDER = {"x": 0, "e": 1, "t": 2}


class EdgeRef(NamedTuple):
    kind: str  # "x" message, "e" link, "t" demand
    index: int

    def __str__(self):
        return f"{self.kind}{self.index}"

    @property
    def sort_key(self):
        return (_KIND_ORDER[self.kind], self.index)

    @classmethod
    def parse(cls, text: str) -> "EdgeRef":
        text = text.strip()
        if len(text) < 2 or text[0] not in _KIND_ORDER or not text[1:].isdigit():
            raise ValueError(f"bad edge name {text!r}; expected x<k>, e<i> or t<j>")
        return cls(text[0], int(text[1:]))


def X(k: int) -> EdgeRef:
    return EdgeRef("x", k)


def L(i: int) -> EdgeRef:
    return EdgeRef("e", i)


def T(j: int) -> EdgeRef:
    return EdgeRef("t", j)


def canonical(edges) -> list[EdgeRef]:
    return sorted(edges, key=lambda e: e.sort_key)


# ----------------------------------------------------------------- demands


@dataclass(frozen=True)
class LinearDemand:
    coeffs: tuple[int, ...]


@dataclass(frozen=True)
class NamedDemand:
    name: str  # "max", "sum" or "identity"
    k: int | None = None

    def __post_init__(self):
        if self.name not in ("max", "sum", "identity"):
            raise ValueError(f"unknown named demand {self.name!r}")
        if (self.name == "identity") != (self.k is not None):
            raise ValueError("identity demand takes exactly one message index k")


@dataclass(frozen=True)
class TableDemand:
    table: FunctionTable


Demand = Union[LinearDemand, NamedDemand, TableDemand]


def demand_column(d: Demand, q: int, K: int) -> tuple[int, ...] | None:
    """The coefficient column of a linear demand, or None if it is not linear over GF(q)."""
    if not is_prime(q):
        return None
    if isinstance(d, LinearDemand):
        return tuple(c % q for c in d.coeffs)
    if isinstance(d, NamedDemand):
        if d.name == "sum":
            return (1,) * K
        if d.name == "identity":
            return tuple(int(i == d.k) for i in range(1, K + 1))
    if isinstance(d, TableDemand) and d.table.kind in ("linear", "sum", "coordinate"):
        tab = d.table
        col = [0] * K
        picks = tab.args if tab.args is not None else tuple(range(1, K + 1))
        cs = tab.coeffs if tab.kind == "linear" else (1,) * len(picks)
        for a, c in zip(picks, cs):
            col[a - 1] = (col[a - 1] + c) % q
        return tuple(col)
    return None


def demand_table(d: Demand, K: int) -> FunctionTable:
    """The demand as a function of the K messages."""
    if isinstance(d, LinearDemand):
        return FunctionTable.linear(d.coeffs)
    if isinstance(d, NamedDemand):
        if d.name == "identity":
            return FunctionTable.coordinate(d.k)
        return FunctionTable.named(d.name)
    return d.table


def demand_to_json(d: Demand) -> dict:
    if isinstance(d, LinearDemand):
        return {"linear": list(d.coeffs)}
    if isinstance(d, NamedDemand):
        out = {"named": d.name}
        if d.k is not None:
            out["k"] = d.k
        return out
    return {"table": d.table.to_json()}


def demand_from_json(obj, where: str) -> Demand:
    if not isinstance(obj, dict):
        raise ValueError(f"{where}: demand must be an object")
    if "linear" in obj:
        c = obj["linear"]
        if not isinstance(c, list) or not all(isinstance(x, int) for x in c):
            raise ValueError(f"{where}.linear: expected a list of integers")
        return LinearDemand(tuple(c))
    if "named" in obj:
        try:
            return NamedDemand(obj["named"], obj.get("k"))
        except ValueError as exc:
            raise ValueError(f"{where}.named: {exc}") from None
    if "table" in obj:
        return TableDemand(FunctionTable.from_json(obj["table"], f"{where}.table"))
    raise ValueError(f"{where}: expected one of 'linear', 'named', 'table'")


# ----------------------------------------------------------------- model


@dataclass(frozen=True)
class Link:
    id: int
    tail: Node
    head: Node


@dataclass(frozen=True)
class Message:
    k: int
    node: Node


@dataclass(frozen=True)
class Sink:
    node: Node
    demands: tuple[Demand, ...]

    @property
    def demand(self) -> Demand:
        if len(self.demands) != 1:
            raise ValueError(f"sink at {self.node!r} has {len(self.demands)} demands; normalize first")
        return self.demands[0]


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str

    def __str__(self):
        return f"{self.kind}: {self.detail}"


class CycleError(ValueError):
    pass


@dataclass(frozen=True)
class NetworkProblem:
    """A network computation problem: DAG, messages and sink demands.

    ``q`` is the alphabet size: the field prime for linear problems, any
    integer >= 2 otherwise.
    """

    q: int
    nodes: tuple[Node, ...]
    messages: tuple[Message, ...]
    links: tuple[Link, ...]
    sinks: tuple[Sink, ...]
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def K(self) -> int:
        return len(self.messages)

    def with_q(self, q: int) -> "NetworkProblem":
        return replace(self, q=q)

    def link(self, i: int) -> Link:
        for e in self.links:
            if e.id == i:
                return e
        raise KeyError(f"unknown link e{i}")

    def edge_refs(self) -> list[EdgeRef]:
        return ([X(m.k) for m in sorted(self.messages, key=lambda m: m.k)]
                + [L(e.id) for e in sorted(self.links, key=lambda e: e.id)]
                + [T(j) for j in range(1, len(self.sinks) + 1)])

    def sink_demand(self, j: int) -> Demand:
        return self.sinks[j - 1].demand


# ----------------------------------------------------------------- queries


def _check_node(P: NetworkProblem, v: Node):
    if v not in P.nodes:
        raise KeyError(f"unknown node {v!r}")


def in_set(P: NetworkProblem, v: Node) -> list[EdgeRef]:
    """Messages generated at ``v`` plus incoming links, canonical order."""
    _check_node(P, v)
    out = [X(m.k) for m in P.messages if m.node == v]
    out += [L(e.id) for e in P.links if e.head == v]
    return canonical(out)


def out_set(P: NetworkProblem, v: Node) -> list[EdgeRef]:
    """Outgoing links plus the demand edges of sinks located at ``v``."""
    return canonical(out_prime(P, v) + [T(j) for j, s in enumerate(P.sinks, 1) if s.node == v])


def out_prime(P: NetworkProblem, v: Node) -> list[EdgeRef]:
    """Outgoing links of ``v``, without demand edges."""
    _check_node(P, v)
    return canonical([L(e.id) for e in P.links if e.tail == v])


def in_set_of_edge(P: NetworkProblem, e: EdgeRef | int) -> list[EdgeRef]:
    i = e.index if isinstance(e, EdgeRef) else e
    if isinstance(e, EdgeRef) and e.kind != "e":
        raise KeyError(f"{e} is not a link edge")
    return in_set(P, P.link(i).tail)


def sink_in_set(P: NetworkProblem, j: int) -> list[EdgeRef]:
    return in_set(P, P.sinks[j - 1].node)


def tail_of(P: NetworkProblem, e: EdgeRef) -> Node | None:
    if e.kind == "e":
        return P.link(e.index).tail
    if e.kind == "t":
        return P.sinks[e.index - 1].node
    return None


# ----------------------------------------------------------------- structure


def validate(P: NetworkProblem) -> list[Violation]:
    """Every structural problem found, as data; empty means valid."""
    out: list[Violation] = []
    nodes = set(P.nodes)
    if len(nodes) != len(P.nodes):
        out.append(Violation("DuplicateNode", "node list contains repeats"))
    if P.q < 2:
        out.append(Violation("BadAlphabet", f"q = {P.q} < 2"))
    ks = sorted(m.k for m in P.messages)
    if ks != list(range(1, len(ks) + 1)):
        out.append(Violation("BadMessageIndex", f"message indices {ks} are not 1..{len(ks)}"))
    for m in P.messages:
        if m.node not in nodes:
            out.append(Violation("UnknownNode", f"message X{m.k} generated at unknown node {m.node!r}"))
    ids = [e.id for e in P.links]
    if len(set(ids)) != len(ids):
        out.append(Violation("DuplicateEdge", "link ids repeat"))
    for e in P.links:
        for end in (e.tail, e.head):
            if end not in nodes:
                out.append(Violation("UnknownNode", f"link e{e.id} touches unknown node {end!r}"))
        if e.tail == e.head:
            out.append(Violation("CycleDetected", f"self-loop e{e.id} at {e.tail!r}"))
    for j, s in enumerate(P.sinks, 1):
        if s.node not in nodes:
            out.append(Violation("UnknownNode", f"sink t{j} at unknown node {s.node!r}"))
        if len(s.demands) != 1:
            out.append(Violation("MultiDemand", f"sink t{j} at {s.node!r} has {len(s.demands)} demands"))
        for d in s.demands:
            out.extend(_demand_violations(P, j, d))
    if not any(v.kind == "UnknownNode" for v in out):
        cyc = _find_cycle(P)
        if cyc:
            out.append(Violation("CycleDetected", " -> ".join(map(str, cyc))))
    return out


def _demand_violations(P: NetworkProblem, j: int, d: Demand) -> list[Violation]:
    K = P.K
    if isinstance(d, LinearDemand):
        if not is_prime(P.q):
            return [Violation("BadDemand", f"t{j}: linear demand needs a prime alphabet, q = {P.q}")]
        if len(d.coeffs) != K:
            return [Violation("BadDemand", f"t{j}: linear demand has {len(d.coeffs)} coefficients, K = {K}")]
    elif isinstance(d, NamedDemand) and d.name == "identity" and not 1 <= d.k <= K:
        return [Violation("BadDemand", f"t{j}: identity demand on X{d.k}, K = {K}")]
    elif isinstance(d, TableDemand) and d.table.kind == "values":
        if d.table.values.shape[0] != P.q**K:
            return [Violation("BadDemand",
                              f"t{j}: table has {d.table.values.shape[0]} entries, expected q^K = {P.q**K}")]
    return []


def _find_cycle(P: NetworkProblem) -> list[Node] | None:
    succ: dict = {v: [] for v in P.nodes}
    for e in sorted(P.links, key=lambda e: e.id):
        succ[e.tail].append(e.head)
    color = {v: 0 for v in P.nodes}
    for root in P.nodes:
        if color[root]:
            continue
        stack = [(root, iter(succ[root]))]
        path = [root]
        color[root] = 1
        while stack:
            v, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[v] = 2
                stack.pop()
                path.pop()
            elif color[nxt] == 1:
                return path[path.index(nxt):] + [nxt]
            elif color[nxt] == 0:
                color[nxt] = 1
                stack.append((nxt, iter(succ[nxt])))
                path.append(nxt)
    return None


def normalize_multi_demand(P: NetworkProblem) -> NetworkProblem:
    """Split every sink with N > 1 demands into N co-located single-demand sinks."""
    if all(len(s.demands) == 1 for s in P.sinks):
        return P
    sinks = tuple(Sink(s.node, (d,)) for s in P.sinks for d in s.demands)
    return replace(P, sinks=sinks)


def link_order(P: NetworkProblem) -> list[int]:
    """Link ids in topological order, ties broken by ascending id."""
    indeg = {e.id: 0 for e in P.links}
    into: dict = {}
    for e in P.links:
        into.setdefault(e.head, []).append(e.id)
    tails = {e.id: e.tail for e in P.links}
    for e in P.links:
        indeg[e.id] = len(into.get(e.tail, []))
    children: dict = {}
    for e in P.links:
        for f in into.get(e.tail, []):
            children.setdefault(f, []).append(e.id)
    heap = [i for i, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    out = []
    while heap:
        i = heapq.heappop(heap)
        out.append(i)
        for c in children.get(i, []):
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(heap, c)
    if len(out) != len(P.links):
        stuck = sorted(set(tails) - set(out))
        raise CycleError(f"cycle detected among links {['e%d' % i for i in stuck]}")
    return out


def ancestral_order(P: NetworkProblem) -> list[EdgeRef]:
    """Message edges, links in topological order, then demand edges."""
    return ([X(k) for k in range(1, P.K + 1)]
            + [L(i) for i in link_order(P)]
            + [T(j) for j in range(1, len(P.sinks) + 1)])


# ----------------------------------------------------------------- JSON


def problem_to_json(P: NetworkProblem) -> dict:
    out = {
        "q": P.q,
        "nodes": list(P.nodes),
        "messages": [{"k": m.k, "node": m.node} for m in P.messages],
        "edges": [{"id": e.id, "tail": e.tail, "head": e.head} for e in P.links],
        "sinks": [],
    }
    for s in P.sinks:
        if len(s.demands) == 1:
            out["sinks"].append({"node": s.node, "demand": demand_to_json(s.demands[0])})
        else:
            out["sinks"].append({"node": s.node, "demands": [demand_to_json(d) for d in s.demands]})
    if P.meta:
        out["meta"] = P.meta
    return out


def problem_from_json(obj) -> NetworkProblem:
    """Parse a problem file; errors name the offending field."""
    if not isinstance(obj, dict):
        raise ValueError("problem: top level must be an object")
    for key in ("q", "nodes", "messages", "edges", "sinks"):
        if key not in obj:
            raise ValueError(f"problem: missing field {key!r}")
    if not isinstance(obj["q"], int):
        raise ValueError("problem.q: expected an integer")
    nodes = tuple(obj["nodes"])
    messages = []
    for i, m in enumerate(obj["messages"]):
        if not isinstance(m, dict) or "k" not in m or "node" not in m:
            raise ValueError(f"problem.messages[{i}]: expected {{'k', 'node'}}")
        messages.append(Message(int(m["k"]), m["node"]))
    links = []
    for i, e in enumerate(obj["edges"]):
        if not isinstance(e, dict) or not {"id", "tail", "head"} <= set(e):
            raise ValueError(f"problem.edges[{i}]: expected {{'id', 'tail', 'head'}}")
        if not isinstance(e["id"], int):
            raise ValueError(f"problem.edges[{i}].id: expected an integer")
        links.append(Link(e["id"], e["tail"], e["head"]))
    sinks = []
    for i, s in enumerate(obj["sinks"]):
        where = f"problem.sinks[{i}]"
        if not isinstance(s, dict) or "node" not in s:
            raise ValueError(f"{where}: expected an object with 'node'")
        if "demands" in s:
            ds = tuple(demand_from_json(d, f"{where}.demands[{n}]") for n, d in enumerate(s["demands"]))
        elif "demand" in s:
            ds = (demand_from_json(s["demand"], f"{where}.demand"),)
        else:
            raise ValueError(f"{where}: missing 'demand'")
        sinks.append(Sink(s["node"], ds))
    return NetworkProblem(obj["q"], nodes, tuple(messages), tuple(links), tuple(sinks),
                          dict(obj.get("meta", {})))
