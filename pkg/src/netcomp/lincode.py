"""Scalar linear network codes: global/local kernels and decoding checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .galois import FieldMatrix, PrimeField, solve_right
from .netgraph import (
    EdgeRef,
    L,
    NetworkProblem,
    T,
    X,
    demand_column,
    in_set_of_edge,
    link_order,
    sink_in_set,
)
from .reports import Report

Column = tuple[int, ...]

# link id -> coefficients over the canonical In(e)
LocalKernelSet = Mapping[int, Column]


class CodeError(ValueError):
    pass


def unit(k: int, K: int) -> Column:
    return tuple(int(i == k) for i in range(1, K + 1))


@dataclass(frozen=True)
class LinearNetworkCode:
    """Global encoding vectors for every edge plus optional sink decoders.

    ``globals`` is keyed by :class:`EdgeRef` and always contains the message
    edges (unit vectors) and, when known, the demand edges. ``decoders`` maps
    sink index ``j`` to a coefficient column over ``In(t_j)``.
    """

    field: PrimeField
    K: int
    globals: dict[EdgeRef, Column]
    decoders: dict[int, Column] = field(default_factory=dict)

    @property
    def q(self) -> int:
        return self.field.p

    def link_globals(self) -> dict[int, Column]:
        return {e.index: v for e, v in self.globals.items() if e.kind == "e"}

    def with_decoders(self, decoders: Mapping[int, Column]) -> "LinearNetworkCode":
        return LinearNetworkCode(self.field, self.K, dict(self.globals), dict(decoders))


def _column_matrix(field: PrimeField, cols: list[Column], K: int) -> FieldMatrix:
    return FieldMatrix.from_columns(field, cols, rows=K)


def demand_columns(P: NetworkProblem) -> dict[int, Column]:
    """Linear demand column of every sink; raises CodeError on a nonlinear demand."""
    out = {}
    for j, s in enumerate(P.sinks, 1):
        col = demand_column(s.demand, P.q, P.K)
        if col is None:
            raise CodeError(f"sink t{j} at {s.node!r} does not demand a linear function over GF({P.q})")
        out[j] = col
    return out


def make_code(P: NetworkProblem, link_globals: Mapping[int, Column],
              decoders: Mapping[int, Column] | None = None) -> LinearNetworkCode:
    """Build a code from link globals, adding unit message vectors and demand columns."""
    K = P.K
    g: dict[EdgeRef, Column] = {X(k): unit(k, K) for k in range(1, K + 1)}
    for i, v in link_globals.items():
        g[L(i)] = tuple(int(x) % P.q for x in v)
    for j, col in demand_columns(P).items():
        g[T(j)] = col
    return LinearNetworkCode(PrimeField(P.q), K, g, dict(decoders or {}))


def globals_from_locals(P: NetworkProblem, locals_: LocalKernelSet) -> LinearNetworkCode:
    """Expand local kernels into global vectors along an ancestral order."""
    field_ = PrimeField(P.q)
    K, q = P.K, P.q
    g: dict[EdgeRef, Column] = {X(k): unit(k, K) for k in range(1, K + 1)}
    for i in link_order(P):
        if i not in locals_:
            raise CodeError(f"missing local kernel for e{i}")
        ins = in_set_of_edge(P, i)
        coeffs = locals_[i]
        if len(coeffs) != len(ins):
            raise CodeError(f"e{i}: {len(coeffs)} coefficients for |In(e)| = {len(ins)}")
        acc = np.zeros(K, dtype=np.int64)
        for c, e in zip(coeffs, ins):
            acc = (acc + (c % q) * np.asarray(g[e], dtype=np.int64)) % q
        g[L(i)] = tuple(int(x) for x in acc)
    try:
        for j, col in demand_columns(P).items():
            g[T(j)] = col
    except CodeError:
        pass
    return LinearNetworkCode(field_, K, g)


def sink_matrix(P: NetworkProblem, code: LinearNetworkCode, j: int) -> FieldMatrix:
    cols = [code.globals[e] for e in sink_in_set(P, j)]
    return _column_matrix(code.field, cols, code.K)


def solve_decoders(P: NetworkProblem, code: LinearNetworkCode) -> dict[int, Column] | None:
    """A decoder for every sink, or None if some demand is outside its In-span."""
    out = {}
    for j, col in demand_columns(P).items():
        d = solve_right(sink_matrix(P, code, j), col)
        if d is None:
            return None
        out[j] = d
    return out


def locals_from_globals(P: NetworkProblem, code: LinearNetworkCode) -> dict[int, Column]:
    """Coefficients expressing each link global over its In-set globals."""
    out = {}
    bad = []
    for i in link_order(P):
        ins = in_set_of_edge(P, i)
        a = _column_matrix(code.field, [code.globals[e] for e in ins], code.K)
        c = solve_right(a, code.globals[L(i)])
        if c is None:
            bad.append(f"e{i}")
        else:
            out[i] = c
    if bad:
        raise CodeError(f"global vector outside the span of its In-set at {', '.join(bad)}")
    return out


def verify_code(P: NetworkProblem, code: LinearNetworkCode) -> Report:
    """Check message vectors, per-edge span membership and sink decoding."""
    rep = Report("linear code")
    K, field_ = code.K, code.field
    if K != P.K:
        rep.fail("shape", "code", f"code has K = {K}, problem has K = {P.K}")
        return rep
    for k in range(1, K + 1):
        if code.globals.get(X(k)) != unit(k, K):
            rep.fail("source", f"x{k}", f"global {code.globals.get(X(k))} is not the unit vector")
    order = link_order(P)
    for i in order:
        if L(i) not in code.globals:
            rep.fail("span", f"e{i}", "no global vector")
    if not rep.passed:
        return rep
    for i in order:
        ins = in_set_of_edge(P, i)
        a = _column_matrix(field_, [code.globals[e] for e in ins], K)
        if solve_right(a, code.globals[L(i)]) is None:
            rep.fail("span", f"e{i}",
                     f"F_e = {list(code.globals[L(i)])} not in span of In(e) = {[str(e) for e in ins]}")
    try:
        demands = demand_columns(P)
    except CodeError as exc:
        rep.fail("demand", "problem", str(exc))
        return rep
    for j, col in demands.items():
        stored = code.globals.get(T(j))
        if stored is not None and stored != col:
            rep.fail("demand", f"t{j}", f"code lists demand {list(stored)}, problem demands {list(col)}")
        d = code.decoders.get(j)
        if d is None:
            rep.fail("decode", f"t{j}", "no decoder")
            continue
        a = sink_matrix(P, code, j)
        if len(d) != a.cols:
            rep.fail("decode", f"t{j}", f"decoder length {len(d)} != |In(t)| = {a.cols}")
            continue
        got = tuple(int(x) for x in (a.array @ np.asarray(d, dtype=np.int64)) % code.q)
        if got != col:
            rep.fail("decode", f"t{j}", f"In(t) globals times D_t = {list(got)}, demand is {list(col)}")
    return rep


def code_to_json(code: LinearNetworkCode) -> dict:
    g = {str(e): list(v) for e, v in sorted(code.globals.items(), key=lambda kv: kv[0].sort_key)
         if e.kind != "x"}
    return {"q": code.q, "K": code.K, "globals": g,
            "decoders": {f"t{j}": list(d) for j, d in sorted(code.decoders.items())}}


def code_from_json(obj, P: NetworkProblem | None = None) -> LinearNetworkCode:
    """Parse a code file; message-edge globals are implicit unit vectors."""
    if not isinstance(obj, dict):
        raise ValueError("code: top level must be an object")
    for key in ("q", "K", "globals"):
        if key not in obj:
            raise ValueError(f"code: missing field {key!r}")
    q, K = obj["q"], obj["K"]
    field_ = PrimeField(q)
    g: dict[EdgeRef, Column] = {X(k): unit(k, K) for k in range(1, K + 1)}
    for name, col in obj["globals"].items():
        try:
            e = EdgeRef.parse(name)
        except ValueError as exc:
            raise ValueError(f"code.globals: {exc}") from None
        if not isinstance(col, list) or len(col) != K or not all(isinstance(c, int) for c in col):
            raise ValueError(f"code.globals.{name}: expected a list of {K} integers")
        g[e] = tuple(c % q for c in col)
    decoders = {}
    for name, col in obj.get("decoders", {}).items():
        e = EdgeRef.parse(name)
        if e.kind != "t":
            raise ValueError(f"code.decoders: {name!r} is not a sink name t<j>")
        if not isinstance(col, list) or not all(isinstance(c, int) for c in col):
            raise ValueError(f"code.decoders.{name}: expected a list of integers")
        decoders[e.index] = tuple(c % q for c in col)
    if P is not None:
        try:
            for j, col in demand_columns(P).items():
                g.setdefault(T(j), col)
        except CodeError:
            pass
    return LinearNetworkCode(field_, K, g, decoders)
