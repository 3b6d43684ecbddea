from __future__ import annotations

import numpy as np
import pytest

from conftest import load_json, load_problem
from netcomp.fdrel import (
    FUNCTIONAL,
    FDError,
    FDGenerators,
    FDPair,
    NonlinearCode,
    attr_closure,
    build_QE,
    check_fd_axioms,
    check_functional_representation,
    code_from_fd_representation,
    evaluate_phi,
    execute,
    explicit_closure,
    fd_member,
    fd_rep_from_code,
    generators_to_masks,
    nonlinear_code_from_json,
    nonlinear_code_to_json,
    nonlinear_from_linear,
    phi_from_json,
    phi_from_linear_code,
    phi_to_json,
    sinks_satisfied,
)
from netcomp.lincode import code_from_json, locals_from_globals, solve_decoders
from netcomp.netgraph import L, T, X
from netcomp.tables import FunctionTable, message_grid, tuple_at


@pytest.fixture
def table1_phi():
    return phi_from_json(load_json("table1_phi.json"))[2]


def _edges(*names):
    return frozenset(X(int(n[1:])) if n[0] == "x" else L(int(n[1:])) if n[0] == "e" else T(int(n[1:]))
                     for n in names)


def test_build_QE_xor_bottleneck():
    G = build_QE(load_problem("xor_bottleneck.json"))
    assert [(p.I, p.J) for p in G.pairs] == [
        (_edges("x1"), _edges("e1")),
        (_edges("x2"), _edges("e2")),
        (_edges("e1", "e2"), _edges("e3")),
        (_edges("e3"), _edges("t1")),
    ]
    assert len(G.ground) == 6


def test_build_QE_table1_node8(table1):
    G = build_QE(table1)
    node8 = [p for p in G.pairs if p.label == "node 8"][0]
    assert node8.I == _edges("x8", "e5", "e6") and node8.J == _edges("e10")
    sink = [p for p in G.pairs if p.label == "sink t1"][0]
    assert sink.I == _edges("e12", "e13") and sink.J == _edges("t1")


def test_generator_outside_ground():
    with pytest.raises(FDError):
        FDGenerators((1, 2), (FDPair(frozenset({3}), frozenset({1})),))


def test_attr_closure_table1(table1):
    G = build_QE(table1)
    assert attr_closure(G, _edges("x1")) == _edges("x1", "e1")
    assert attr_closure(G, _edges("x1", "x4")) == _edges("x1", "x4", "e1", "e5")
    assert T(1) in attr_closure(G, _edges("e12", "e13"))
    everything = attr_closure(G, [X(k) for k in range(1, 12)])
    assert everything == frozenset(G.ground)
    assert fd_member(G, _edges("e12", "e13"), _edges("t1"))
    assert not fd_member(G, _edges("e12"), _edges("t1"))


def test_attr_closure_literal_orientation_is_trivial(table1):
    G = build_QE(table1)
    assert attr_closure(G, [], "paper") == frozenset(G.ground)
    with pytest.raises(ValueError):
        attr_closure(G, [], "other")
    with pytest.raises(FDError):
        attr_closure(G, [X(99)])


def test_explicit_closure_satisfies_axioms():
    gens = [(0b001, 0b010), (0b010, 0b100)]
    Q = explicit_closure(gens, 3)
    assert check_fd_axioms(Q, 3) == []
    assert (0b001, 0b111) in Q and (0b100, 0b001) not in Q


def test_explicit_closure_literal_orientation_is_everything():
    Q = explicit_closure([], 3, "paper")
    assert check_fd_axioms(Q, 3, "paper") == []
    assert all((I, 0b111) in Q for I in range(8))


def test_check_fd_axioms_finds_violations():
    # generators alone are not closed
    v = check_fd_axioms({(0b01, 0b10), (0b10, 0b01)}, 2)
    assert {"FD1'", "FD2", "FD3"} & {x.axiom for x in v}
    assert "FD1'" in {x.axiom for x in v}
    with pytest.raises(FDError):
        check_fd_axioms(set(), 7)


def test_generators_to_masks_roundtrip():
    G = build_QE(load_problem("xor_bottleneck.json"))
    masks, index = generators_to_masks(G)
    assert len(masks) == len(G.pairs)
    I, J = masks[2]
    assert I == (1 << index[L(1)]) | (1 << index[L(2)]) and J == 1 << index[L(3)]


# ----------------------------------------------------------------- functional representations


def test_table1_q2_passes(table1, table1_phi):
    rep = check_functional_representation(table1, table1_phi)
    assert rep.passed, rep.render()
    assert rep.info["tuples"] == 2**11


def test_table1_reference_mode_agrees(table1, table1_phi):
    assert check_functional_representation(table1, table1_phi, reference=True).passed


def test_corrupted_e10_gives_concrete_witness(table1, table1_phi):
    phi = dict(table1_phi)
    phi[L(10)] = FunctionTable.named("max", [1, 2, 4, 5])  # drop X8
    rep = check_functional_representation(table1, phi)
    assert not rep.passed
    fails = [f for f in rep.failures if f.condition == FUNCTIONAL]
    assert fails and fails[0].where == "node 10"
    xa, xb = fails[0].witness
    # independently re-evaluate: the pair agrees on In(10) but not on e10
    grid, vals = evaluate_phi(table1, phi)
    ia = int("".join(map(str, xa)), 2)
    ib = int("".join(map(str, xb)), 2)
    for e in (X(10), L(10), L(11)):
        assert vals[e][ia] == vals[e][ib]
    assert vals[L(12)][ia] != vals[L(12)][ib]


def test_corrupted_e10_reference_finds_same_first_pair(table1, table1_phi):
    phi = dict(table1_phi)
    phi[L(10)] = FunctionTable.named("max", [1, 2, 4, 5])
    fast = check_functional_representation(table1, phi)
    ref = check_functional_representation(table1, phi, reference=True)
    assert [(f.where, f.witness) for f in fast.failures] == [(f.where, f.witness) for f in ref.failures]


def test_c1_c2_prime_failures(table1, table1_phi):
    phi = dict(table1_phi)
    phi[X(3)] = FunctionTable.named("const", coeffs=[0])
    phi[T(1)] = FunctionTable.named("sum")
    conds = check_functional_representation(table1, phi).conditions()
    assert {"C1'", "C2'"} <= conds


def test_missing_link_function(table1, table1_phi):
    phi = dict(table1_phi)
    del phi[L(3)]
    rep = check_functional_representation(table1, phi)
    assert rep.conditions() == {"phi"}


def test_threaded_matches_serial(monkeypatch, table1, table1_phi):
    phi = dict(table1_phi)
    phi[L(10)] = FunctionTable.named("max", [1, 2, 4, 5])
    serial = check_functional_representation(table1, phi).to_json()
    monkeypatch.setenv("NETCOMP_THREADS", "4")
    assert check_functional_representation(table1, phi).to_json() == serial


def test_code_from_fd_representation_executes_to_max(table1, table1_phi):
    code = code_from_fd_representation(table1, table1_phi)
    vals = execute(table1, code)
    grid = message_grid(2, 11)
    assert np.array_equal(vals[T(1)], np.maximum.reduce(grid))
    assert sinks_satisfied(table1, code) == {1: True}


def test_code_from_fd_representation_rejects_invalid(table1, table1_phi):
    phi = dict(table1_phi)
    phi[L(10)] = FunctionTable.named("max", [1, 2, 4, 5])
    with pytest.raises(FDError, match="functional representation"):
        code_from_fd_representation(table1, phi)


def test_fd_rep_from_code_roundtrip(table1):
    code = nonlinear_code_from_json(load_json("table1_code.json"))
    phi = fd_rep_from_code(table1, code)
    assert check_functional_representation(table1, phi).passed
    assert nonlinear_code_from_json(nonlinear_code_to_json(code)).locals.keys() == code.locals.keys()


def test_linear_code_gives_functional_representation(fig1):
    code = code_from_json(load_json("eq5_code.json"), fig1)
    assert check_functional_representation(fig1, phi_from_linear_code(code)).passed
    nl = nonlinear_from_linear(fig1, locals_from_globals(fig1, code), solve_decoders(fig1, code), 2)
    assert sinks_satisfied(fig1, nl) == {j: True for j in range(1, 5)}


def test_ternary_code_gives_functional_representation(fig1):
    P3 = fig1.with_q(3)
    code = code_from_json(load_json("eq6_code.json"), P3)
    assert check_functional_representation(P3, phi_from_linear_code(code)).passed


def test_phi_json_roundtrip(table1_phi):
    q, K, again = phi_from_json(phi_to_json(2, 11, table1_phi))
    assert (q, K) == (2, 11)
    assert {e: t.to_json() for e, t in again.items()} == {e: t.to_json() for e, t in table1_phi.items()}


@pytest.mark.parametrize("obj, field", [
    ({"q": 2, "K": 1}, "tables"),
    ({"q": 2, "K": 1, "tables": {"z1": {"named": "max"}}}, "phi.tables"),
    ({"q": 2, "K": 1, "tables": {"e1": {"named": "median"}}}, "phi.tables.e1"),
    ({"q": 2, "K": 1, "tables": {"e1": {"values": [0, -1]}}}, "phi.tables.e1"),
])
def test_phi_json_errors(obj, field):
    with pytest.raises(ValueError, match=field):
        phi_from_json(obj)


def test_execute_without_kernel(table1):
    with pytest.raises(FDError):
        execute(table1, NonlinearCode(2, 11, {}))


def test_tuple_order_first_message_most_significant():
    assert tuple_at(2, 3, 1) == (0, 0, 1)
    assert tuple_at(3, 2, 5) == (1, 2)
