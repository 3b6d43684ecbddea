from __future__ import annotations

import itertools

import numpy as np
import pytest

from conftest import brute_rank, load_json, load_matrix
from netcomp.galois import FieldMatrix
from netcomp.matroid import (
    ExplicitMatroid,
    GroundTooLarge,
    RepresentationClaim,
    UniformMatroid,
    VectorMatroid,
    check_rank_axioms,
    from_mask,
    is_independent,
    is_representation,
    matroid_from_json,
    matroid_rank,
    to_mask,
)


def identity_map(n):
    return {i: i for i in range(1, n + 1)}


def test_masks():
    assert to_mask([1, 3], 4) == 0b101
    assert from_mask(0b101) == (1, 3)
    with pytest.raises(IndexError):
        to_mask([5], 4)


def test_uniform_rank():
    U = UniformMatroid(3, 2)
    assert [U.rank(A) for A in ([], [1], [1, 2], [1, 2, 3])] == [0, 1, 2, 2]
    assert matroid_rank(U) == 2
    with pytest.raises(ValueError):
        UniformMatroid(2, 3)


def test_u23_axioms_clean():
    assert check_rank_axioms(UniformMatroid(3, 2)) == []


@pytest.mark.parametrize("name", ["m2.json", "m3.json"])
def test_u23_representations(name):
    M = load_matrix(name)
    v = is_representation(RepresentationClaim(UniformMatroid(3, 2), M, identity_map(3)))
    assert v.ok and v.witness is None


def test_non_representation_gives_smallest_witness():
    M = FieldMatrix(2, [[1, 1, 0], [0, 0, 1]])
    v = is_representation(RepresentationClaim(UniformMatroid(3, 2), M, identity_map(3)))
    assert not v.ok
    assert v.witness == (1, 2) and (v.expected, v.got) == (2, 1)


def test_permuted_map():
    # elements 1, 2 are parallel in U but columns 2, 3 are parallel in M
    M = FieldMatrix(2, [[1, 0, 0], [0, 1, 1]])
    U = ExplicitMatroid(3, {m: min(bin(m).count("1"), 2) - (m == 0b011) for m in range(8)})
    assert not is_representation(RepresentationClaim(U, M, identity_map(3))).ok
    phi = {1: 2, 2: 3, 3: 1}
    assert is_representation(RepresentationClaim(U, M, phi)).ok


def test_claim_validation():
    M = load_matrix("m2.json")
    with pytest.raises(ValueError, match="dimension"):
        RepresentationClaim(UniformMatroid(4, 2), M, identity_map(4))
    with pytest.raises(ValueError, match="bijection"):
        RepresentationClaim(UniformMatroid(3, 2), M, {1: 1, 2: 1, 3: 2})


def test_explicit_table_must_be_complete():
    with pytest.raises(ValueError, match="misses"):
        ExplicitMatroid(2, {0: 0, 1: 1})


def test_axiom_violations_found():
    # r({1}) = 2 breaks R1, r({1,2}) < r({1}) breaks R2
    ranks = {0: 0, 1: 2, 2: 1, 3: 1}
    found = {v.axiom for v in check_rank_axioms(ExplicitMatroid(2, ranks))}
    assert {"R1", "R2"} <= found
    # r({1,2}) + r({3}) = 2 < r({1,2,3}) breaks submodularity
    ranks = {m: min(bin(m).count("1"), 2) for m in range(8)}
    ranks[0b111] = 3
    ranks[0b011] = 1
    assert "R3" in {v.axiom for v in check_rank_axioms(ExplicitMatroid(3, ranks))}


def test_axiom_check_limit():
    ranks = {m: 5 for m in range(1 << 4)}
    assert len(check_rank_axioms(ExplicitMatroid(4, ranks), limit=3)) == 3


def test_ground_caps():
    with pytest.raises(GroundTooLarge):
        check_rank_axioms(UniformMatroid(15, 3))
    with pytest.raises(GroundTooLarge):
        UniformMatroid(21, 2).rank_table()


def test_vector_matroid_rank_table_matches_oracle():
    rng = np.random.default_rng(3)
    for p in (2, 3):
        A = FieldMatrix(p, rng.integers(0, p, (3, 6)))
        M = VectorMatroid(A)
        table = M.rank_table()
        for mask in range(1 << 6):
            cols = [A.column(i) for i in from_mask(mask)]
            assert table[mask] == brute_rank(cols, p, 3)
            assert M.rank(from_mask(mask)) == table[mask]


def test_is_independent():
    M = VectorMatroid(load_matrix("m2.json"))
    assert is_independent(M, [1, 2])
    assert not is_independent(M, [1, 2, 3])


@pytest.mark.parametrize("name", ["u23.json", "eq5_matroid.json", "eq6_matroid.json"])
def test_json_roundtrip(name):
    M = matroid_from_json(load_json(name))
    again = matroid_from_json(M.to_json())
    assert np.array_equal(again.rank_table(), M.rank_table()) if M.n <= 12 else again.to_json() == M.to_json()


def test_explicit_json_roundtrip():
    E = ExplicitMatroid(2, {0: 0, 1: 1, 2: 1, 3: 1})
    assert matroid_from_json(E.to_json()).ranks == E.ranks


@pytest.mark.parametrize("obj, field", [
    ({"n": 3}, "kind"),
    ({"kind": "uniform", "n": 3}, "matroid.k"),
    ({"kind": "vector"}, "matrix"),
    ({"kind": "vector", "n": 4, "matrix": {"p": 2, "rows": 1, "cols": 3, "entries": [[1, 0, 1]]}}, "matroid.n"),
    ({"kind": "explicit", "n": 1, "ranks": {"a": 1}}, "ranks"),
    ({"kind": "graphic"}, "kind"),
])
def test_json_errors(obj, field):
    with pytest.raises(ValueError, match=field):
        matroid_from_json(obj)


def test_binary_matroid_rank_is_four():
    M = matroid_from_json(load_json("eq5_matroid.json"))
    assert M.n == 24 and matroid_rank(M) == 4
    assert M.rank(range(1, 5)) == 4


def test_small_uniform_axioms_exhaustive():
    for n, k in itertools.product(range(0, 6), repeat=2):
        if k <= n:
            assert check_rank_axioms(UniformMatroid(n, k)) == []
