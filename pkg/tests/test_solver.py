from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from conftest import brute_in_span, load_problem
from netcomp.bridge import matroid_from_code
from netcomp.fdrel import check_functional_representation, fd_rep_from_code, sinks_satisfied
from netcomp.lincode import CodeError, demand_columns, globals_from_locals, verify_code
from netcomp.netgraph import (
    L,
    LinearDemand,
    Link,
    Message,
    NamedDemand,
    NetworkProblem,
    Sink,
    in_set_of_edge,
    link_order,
    sink_in_set,
)
from netcomp.solver import (
    BudgetError,
    SolveBudget,
    Solution,
    Unknown,
    Unsolvable,
    solve_scalar_linear,
    solve_scalar_nonlinear_exhaustive,
)


def lex_least_oracle(P, q):
    """First local-kernel assignment, in lexicographic order, that lets every sink decode."""
    order = link_order(P)
    sizes = [len(in_set_of_edge(P, i)) for i in order]
    demands = demand_columns(P)
    for flat in itertools.product(range(q), repeat=sum(sizes)):
        it = iter(flat)
        locals_ = {i: tuple(next(it) for _ in range(s)) for i, s in zip(order, sizes)}
        g = globals_from_locals(P, locals_).globals
        if all(brute_in_span([g[e] for e in sink_in_set(P, j)], col, q) for j, col in demands.items()):
            return locals_
    return None


def test_butterfly_sum_bottleneck_carries_sum(butterfly):
    sol = solve_scalar_linear(butterfly)
    assert isinstance(sol, Solution)
    assert verify_code(butterfly, sol.code).passed
    assert sol.code.globals[L(5)] == (1, 1)
    assert sol.locals == lex_least_oracle(butterfly, 2)


def test_xor_bottleneck_linear_matches_oracle():
    P = load_problem("xor_bottleneck.json")
    sol = solve_scalar_linear(P)
    assert sol.locals == lex_least_oracle(P, 2)
    assert sol.code.globals[L(3)] == (1, 1)


def test_fig1_solvable_over_gf2(fig1):
    sol = solve_scalar_linear(fig1)
    assert isinstance(sol, Solution)
    assert verify_code(fig1, sol.code).passed
    assert sol.provenance()["mode"] == "exhaustive"


def test_no_path_is_unsolvable():
    P = load_problem("no_path.json")
    out = solve_scalar_linear(P)
    assert isinstance(out, Unsolvable) and out.q == 2
    assert isinstance(solve_scalar_linear(P, q=3), Unsolvable)
    # no code at all can be turned into a matroid for this problem
    for c in range(2):
        code = globals_from_locals(P, {1: (c,)})
        with pytest.raises(CodeError):
            matroid_from_code(P, code.with_decoders({1: (1,)}))


def test_nonlinear_xor_table():
    P = load_problem("xor_bottleneck.json")
    sol = solve_scalar_nonlinear_exhaustive(P)
    assert isinstance(sol, Solution)
    assert sol.locals[3] == (0, 1, 1, 0)
    assert sinks_satisfied(P, sol.code) == {1: True}
    assert check_functional_representation(P, fd_rep_from_code(P, sol.code)).passed


def test_both_messages_through_one_edge_unsolvable():
    P = load_problem("bottleneck_both.json")
    assert isinstance(solve_scalar_nonlinear_exhaustive(P), Unsolvable)
    assert isinstance(solve_scalar_linear(P), Unsolvable)


def test_empty_demand_network_trivially_solved():
    P = NetworkProblem(2, ("s", "t"), (Message(1, "s"),), (Link(1, "s", "t"),), ())
    assert isinstance(solve_scalar_nonlinear_exhaustive(P), Solution)
    assert isinstance(solve_scalar_linear(P), Solution)


def test_nonlinear_budget_error(fig1):
    with pytest.raises(BudgetError):
        solve_scalar_nonlinear_exhaustive(fig1)


def test_linear_bits_cap():
    n = 41
    nodes = tuple(f"v{i}" for i in range(n + 1))
    links = tuple(Link(i + 1, nodes[i], nodes[i + 1]) for i in range(n))
    P = NetworkProblem(2, nodes, (Message(1, "v0"),), links, (Sink(nodes[-1], (NamedDemand("identity", 1),)),))
    with pytest.raises(BudgetError):
        solve_scalar_linear(P)
    # every one of the 41 coefficients must be nonzero; 200 random draws will not find it
    out = solve_scalar_linear(P, SolveBudget(mode="randomized", max_candidates=200))
    assert isinstance(out, Unknown)


def test_budget_exhaustion_is_unknown(butterfly):
    out = solve_scalar_linear(butterfly, SolveBudget(max_candidates=3))
    assert isinstance(out, Unknown)


def test_randomized_mode(butterfly):
    sol = solve_scalar_linear(butterfly, SolveBudget(mode="randomized", seed=7))
    assert isinstance(sol, Solution) and sol.mode == "randomized"
    assert verify_code(butterfly, sol.code).passed
    out = solve_scalar_linear(load_problem("no_path.json"), SolveBudget(mode="randomized", max_candidates=50))
    assert isinstance(out, Unknown)


def test_bad_inputs(table1):
    with pytest.raises(CodeError):
        solve_scalar_linear(table1)
    with pytest.raises(ValueError, match="prime"):
        solve_scalar_linear(load_problem("xor_bottleneck.json"), q=4)
    with pytest.raises(ValueError, match="mode"):
        SolveBudget(mode="greedy")


def test_deterministic(fig1):
    a = solve_scalar_linear(fig1)
    b = solve_scalar_linear(fig1)
    assert a.locals == b.locals


@st.composite
def small_problems(draw):
    K = draw(st.integers(1, 2))
    n = draw(st.integers(2, 4))
    nodes = tuple(f"v{i}" for i in range(n))
    msgs = tuple(Message(k, nodes[draw(st.integers(0, n - 2))]) for k in range(1, K + 1))
    pairs = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
                          .filter(lambda ab: ab[0] < ab[1]), min_size=1, max_size=4))
    links = tuple(Link(i + 1, nodes[a], nodes[b]) for i, (a, b) in enumerate(pairs))
    coeffs = tuple(draw(st.integers(0, 1)) for _ in range(K))
    sink = Sink(nodes[draw(st.integers(1, n - 1))], (LinearDemand(coeffs),))
    return NetworkProblem(2, nodes, msgs, links, (sink,))


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(small_problems())
def test_linear_solver_matches_enumeration(P):
    want = lex_least_oracle(P, 2)
    out = solve_scalar_linear(P)
    if want is None:
        assert isinstance(out, Unsolvable)
    else:
        assert isinstance(out, Solution) and out.locals == want
        assert verify_code(P, out.code).passed


@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(small_problems())
def test_linear_success_implies_nonlinear_success(P):
    lin = solve_scalar_linear(P)
    try:
        nl = solve_scalar_nonlinear_exhaustive(P, budget=SolveBudget(max_candidates=10**6))
    except BudgetError:
        return
    if isinstance(lin, Solution):
        assert isinstance(nl, Solution)
    if isinstance(nl, Solution):
        assert all(sinks_satisfied(P, nl.code).values())


def test_nonlinear_over_gf3_relay():
    # s -> m -> t forwarding X1 over an alphabet of size 3: the relay tables must be bijective
    P = NetworkProblem(3, ("s", "m", "t"), (Message(1, "s"),), (Link(1, "s", "m"), Link(2, "m", "t")),
                       (Sink("t", (NamedDemand("identity", 1),)),))
    sol = solve_scalar_nonlinear_exhaustive(P)
    assert isinstance(sol, Solution)
    assert sol.locals == {1: (0, 1, 2), 2: (0, 1, 2)}
    assert sinks_satisfied(P, sol.code) == {1: True}
