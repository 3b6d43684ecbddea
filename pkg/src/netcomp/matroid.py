"""Matroids as rank oracles over the ground set ``{1, ..., n}``.

Subsets are passed as iterables of 1-based elements; internally they are
bitmasks with bit ``i - 1`` standing for element ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping

import numpy as np

from . import kernels
from .galois import FieldMatrix, column_submatrix, rank

MAX_GROUND = 20
MAX_AXIOM_GROUND = 14


class GroundTooLarge(ValueError):
    pass


def to_mask(A: Iterable[int], n: int) -> int:
    mask = 0
    for a in A:
        if not 1 <= a <= n:
            raise IndexError(f"element {a} outside ground set [1, {n}]")
        mask |= 1 << (a - 1)
    return mask


def from_mask(mask: int) -> tuple[int, ...]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def _popcounts(n: int) -> np.ndarray:
    counts = np.zeros(1 << n, dtype=np.int64)
    for b in range(n):
        counts[1 << b: 1 << (b + 1)] = counts[: 1 << b] + 1
    return counts


class RankOracle:
    """Base rank oracle; subclasses provide ``_rank(mask)`` and possibly a fast table."""

    n: int

    def rank(self, A: Iterable[int]) -> int:
        return self._rank(to_mask(A, self.n))

    def _rank(self, mask: int) -> int:
        raise NotImplementedError

    def rank_table(self) -> np.ndarray:
        """Rank of every subset, indexed by bitmask."""
        if self.n > MAX_GROUND:
            raise GroundTooLarge(f"ground set of {self.n} elements exceeds {MAX_GROUND}")
        return np.array([self._rank(m) for m in range(1 << self.n)], dtype=np.int64)

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class UniformMatroid(RankOracle):
    n: int
    k: int

    def __post_init__(self):
        if not 0 <= self.k <= self.n:
            raise ValueError(f"U_{{{self.k},{self.n}}} needs 0 <= k <= n")

    def _rank(self, mask: int) -> int:
        return min(bin(mask).count("1"), self.k)

    def rank_table(self) -> np.ndarray:
        if self.n > MAX_GROUND:
            raise GroundTooLarge(f"ground set of {self.n} elements exceeds {MAX_GROUND}")
        return np.minimum(_popcounts(self.n), self.k)

    def to_json(self) -> dict:
        return {"n": self.n, "kind": "uniform", "k": self.k}


@dataclass(frozen=True)
class VectorMatroid(RankOracle):
    """Column matroid of a matrix: element ``i`` is column ``i``."""

    matrix: FieldMatrix

    @property
    def n(self) -> int:
        return self.matrix.cols

    def _rank(self, mask: int) -> int:
        return rank(column_submatrix(self.matrix, from_mask(mask)))

    def rank_table(self) -> np.ndarray:
        if self.n > MAX_GROUND:
            raise GroundTooLarge(f"ground set of {self.n} elements exceeds {MAX_GROUND}")
        return np.asarray(kernels.rank_table(self.matrix.array, self.matrix.p), dtype=np.int64)

    def to_json(self) -> dict:
        m = self.matrix
        return {"n": m.cols, "kind": "vector",
                "matrix": {"p": m.p, "rows": m.rows, "cols": m.cols, "entries": m.to_lists()}}


class ExplicitMatroid(RankOracle):
    """Rank function given as a table keyed by bitmask (missing subsets are an error)."""

    def __init__(self, n: int, ranks: Mapping[int, int]):
        if n > MAX_GROUND:
            raise GroundTooLarge(f"ground set of {n} elements exceeds {MAX_GROUND}")
        self.n = n
        self.ranks = dict(ranks)
        missing = [m for m in range(1 << n) if m not in self.ranks]
        if missing:
            raise ValueError(f"explicit rank table misses {len(missing)} subsets, e.g. {from_mask(missing[0])}")

    def _rank(self, mask: int) -> int:
        return self.ranks[mask]

    def to_json(self) -> dict:
        return {"n": self.n, "kind": "explicit", "ranks": {str(m): r for m, r in sorted(self.ranks.items())}}


def rank_of(M: RankOracle, A: Iterable[int]) -> int:
    return M.rank(A)


def is_independent(M: RankOracle, A: Iterable[int]) -> bool:
    A = list(A)
    return M.rank(A) == len(set(A))


def matroid_rank(M: RankOracle) -> int:
    return M._rank((1 << M.n) - 1)


@dataclass(frozen=True)
class AxiomViolation:
    axiom: str  # R1, R2, R3
    A: tuple[int, ...]
    B: tuple[int, ...] | None

    def __str__(self):
        if self.B is None:
            return f"{self.axiom} at A={set(self.A) or '{}'}"
        return f"{self.axiom} at A={set(self.A) or '{}'}, B={set(self.B) or '{}'}"


def check_rank_axioms(M: RankOracle, limit: int = 100) -> list[AxiomViolation]:
    """Exhaustive R1 (bounds), R2 (monotone) and R3 (submodular) check."""
    if M.n > MAX_AXIOM_GROUND:
        raise GroundTooLarge(f"exhaustive axiom check limited to {MAX_AXIOM_GROUND} elements, got {M.n}")
    table = M.rank_table()
    raw = kernels.rank_axiom_violations(table, M.n, limit)
    return [AxiomViolation(code, from_mask(a), None if b < 0 else from_mask(b)) for code, a, b in raw]


@dataclass(frozen=True)
class RepresentationClaim:
    matroid: RankOracle
    matrix: FieldMatrix
    phi: Mapping[int, int]  # ground element -> column (1-based)

    def __post_init__(self):
        n = self.matroid.n
        if self.matrix.cols != n:
            raise ValueError(f"dimension mismatch: {self.matrix.cols} columns for {n} ground elements")
        if sorted(self.phi) != list(range(1, n + 1)) or sorted(self.phi.values()) != list(range(1, n + 1)):
            raise ValueError("phi must be a bijection of [n] onto the column indices")


@dataclass(frozen=True)
class Verdict:
    ok: bool
    witness: tuple[int, ...] | None = None
    expected: int | None = None
    got: int | None = None

    def __bool__(self):
        return self.ok


def is_representation(claim: RepresentationClaim) -> Verdict:
    """Compare matroid rank with column rank on every subset.

    The witness on failure is the smallest mismatching subset by cardinality,
    then lexicographically.
    """
    n = claim.matroid.n
    if n > MAX_GROUND:
        raise GroundTooLarge(f"ground set of {n} elements exceeds {MAX_GROUND}")
    # reorder columns so column i of `reordered` is phi(i)
    reordered = column_submatrix(claim.matrix, [claim.phi[i] for i in range(1, n + 1)])
    mat = np.asarray(kernels.rank_table(reordered.array, reordered.p), dtype=np.int64)
    want = claim.matroid.rank_table()
    bad = np.nonzero(mat != want)[0]
    if bad.size == 0:
        return Verdict(True)
    w = min((int(m) for m in bad), key=lambda m: (bin(m).count("1"), from_mask(m)))
    return Verdict(False, from_mask(w), int(want[w]), int(mat[w]))


def subsets_up_to(n: int, size: int):
    for s in range(size + 1):
        yield from combinations(range(1, n + 1), s)


def matroid_from_json(obj) -> RankOracle:
    from .galois import matrix_from_json

    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValueError("matroid: expected an object with 'kind'")
    kind = obj["kind"]
    if kind == "uniform":
        for key in ("n", "k"):
            if not isinstance(obj.get(key), int):
                raise ValueError(f"matroid.{key}: expected an integer")
        return UniformMatroid(obj["n"], obj["k"])
    if kind == "vector":
        if "matrix" not in obj:
            raise ValueError("matroid: missing field 'matrix'")
        m = matrix_from_json(obj["matrix"])
        if "n" in obj and obj["n"] != m.cols:
            raise ValueError(f"matroid.n = {obj['n']} but matrix has {m.cols} columns")
        return VectorMatroid(m)
    if kind == "explicit":
        if not isinstance(obj.get("n"), int) or "ranks" not in obj:
            raise ValueError("matroid: explicit kind needs 'n' and 'ranks'")
        try:
            ranks = {int(k): int(v) for k, v in obj["ranks"].items()}
        except (TypeError, ValueError):
            raise ValueError("matroid.ranks: keys must be bitmask integers, values integers") from None
        return ExplicitMatroid(obj["n"], ranks)
    raise ValueError(f"matroid.kind: unknown kind {kind!r}")
