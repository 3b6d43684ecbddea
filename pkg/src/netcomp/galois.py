"""Exact linear algebra over prime fields GF(p)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels

MAX_PRIME = 65521


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class PrimeField:
    """The field of residues modulo a prime ``p``."""

    p: int

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or not 2 <= self.p <= MAX_PRIME:
            raise ValueError(f"field size must be a prime in [2, {MAX_PRIME}], got {self.p!r}")
        if not is_prime(int(self.p)):
            raise ValueError(f"{self.p} is not prime")

    def inverse(self, c: int) -> int:
        c %= self.p
        if c == 0:
            raise ZeroDivisionError("0 has no multiplicative inverse")
        return pow(c, self.p - 2, self.p)


class FieldMatrix:
    """Immutable dense matrix over GF(p).

    Entries live in a read-only ``int64`` array and are always reduced into
    ``[0, p)``.
    """

    __slots__ = ("field", "_a")

    def __init__(self, field: PrimeField | int, entries):
        if not isinstance(field, PrimeField):
            field = PrimeField(int(field))
        a = np.array(entries, dtype=np.int64)
        if a.ndim != 2:
            if a.size == 0:
                a = a.reshape(0, 0)
            else:
                raise ValueError("matrix entries must be a 2-D array")
        a %= field.p
        a.setflags(write=False)
        self.field = field
        self._a = a

    @classmethod
    def zeros(cls, field, rows: int, cols: int) -> "FieldMatrix":
        return cls(field, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, field, n: int) -> "FieldMatrix":
        return cls(field, np.eye(n, dtype=np.int64))

    @classmethod
    def from_columns(cls, field, columns: Sequence[Sequence[int]], rows: int | None = None):
        """Juxtapose columns; ``rows`` is needed only when there are none."""
        if len(columns) == 0:
            return cls.zeros(field, rows or 0, 0)
        return cls(field, np.array(columns, dtype=np.int64).reshape(len(columns), -1).T)

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape

    @property
    def array(self) -> np.ndarray:
        """Read-only view of the entries."""
        return self._a

    def column(self, j: int) -> tuple[int, ...]:
        """Column ``j`` (1-based) as a tuple."""
        if not 1 <= j <= self.cols:
            raise IndexError(f"column {j} out of range [1, {self.cols}]")
        return tuple(int(x) for x in self._a[:, j - 1])

    def columns(self) -> list[tuple[int, ...]]:
        return [tuple(int(x) for x in col) for col in self._a.T]

    def to_lists(self) -> list[list[int]]:
        return self._a.tolist()

    @property
    def T(self) -> "FieldMatrix":
        return FieldMatrix(self.field, self._a.T)

    def __eq__(self, other):
        if not isinstance(other, FieldMatrix):
            return NotImplemented
        return self.p == other.p and self.shape == other.shape and np.array_equal(self._a, other._a)

    def __hash__(self):
        return hash((self.p, self.shape, self._a.tobytes()))

    def __repr__(self):
        return f"FieldMatrix(p={self.p}, {self.to_lists()})"


def rank(a: FieldMatrix) -> int:
    if a.rows == 0 or a.cols == 0:
        return 0
    return int(kernels.rank_mod_p(a.array, a.p))


def column_submatrix(a: FieldMatrix, idxs: Iterable[int]) -> FieldMatrix:
    """Columns ``idxs`` (1-based, order and duplicates kept)."""
    idxs = list(idxs)
    for j in idxs:
        if not 1 <= j <= a.cols:
            raise IndexError(f"column {j} out of range [1, {a.cols}]")
    if not idxs:
        return FieldMatrix.zeros(a.field, a.rows, 0)
    return FieldMatrix(a.field, a.array[:, [j - 1 for j in idxs]])


def _rref(aug: np.ndarray, p: int, pivot_limit: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form; pivots searched in the first ``pivot_limit`` columns."""
    m = aug.copy() % p
    rows = m.shape[0]
    pivots: list[int] = []
    r = 0
    for j in range(pivot_limit):
        if r == rows:
            break
        nz = np.nonzero(m[r:, j])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        m[r] = (m[r] * pow(int(m[r, j]), p - 2, p)) % p
        col = m[:, j].copy()
        col[r] = 0
        m = (m - col[:, None] * m[r][None, :]) % p
        pivots.append(j)
        r += 1
    return m, pivots


def solve_right(a: FieldMatrix, b) -> tuple[int, ...] | None:
    """Solve ``a @ x = b`` over GF(p).

    ``b`` is a column given as a sequence (or a one-column FieldMatrix).
    Free variables are set to zero, so the answer is deterministic. Returns
    ``None`` when ``b`` is outside the column span.
    """
    p = a.p
    if isinstance(b, FieldMatrix):
        if b.cols != 1:
            raise ValueError("right-hand side must be a single column")
        bvec = b.array[:, 0]
    else:
        bvec = np.asarray(list(b), dtype=np.int64)
    if bvec.shape[0] != a.rows:
        raise ValueError(f"dimension mismatch: {a.rows} rows vs rhs of length {bvec.shape[0]}")
    if a.cols == 0:
        return () if not (bvec % p).any() else None
    aug = np.concatenate([a.array, (bvec % p)[:, None]], axis=1)
    red, pivots = _rref(aug, p, a.cols)
    if (red[len(pivots):, -1] != 0).any():
        return None
    x = [0] * a.cols
    for r, j in enumerate(pivots):
        x[j] = int(red[r, -1])
    return tuple(x)


def in_span(a: FieldMatrix, b) -> bool:
    return solve_right(a, b) is not None


def full_rank_row_basis(a: FieldMatrix) -> FieldMatrix:
    """Maximal independent subset of rows, earliest rows preferred."""
    keep: list[int] = []
    current = 0
    for i in range(a.rows):
        trial = kernels.rank_mod_p(a.array[keep + [i]], a.p) if a.cols else 0
        if trial > current:
            keep.append(i)
            current = trial
    return FieldMatrix(a.field, a.array[keep].reshape(len(keep), a.cols))


def _check_same_field(a: FieldMatrix, b: FieldMatrix):
    if a.p != b.p:
        raise ValueError(f"field mismatch: GF({a.p}) vs GF({b.p})")


def add(a: FieldMatrix, b: FieldMatrix) -> FieldMatrix:
    _check_same_field(a, b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return FieldMatrix(a.field, a.array + b.array)


def scale(c: int, a: FieldMatrix) -> FieldMatrix:
    return FieldMatrix(a.field, (c % a.p) * a.array)


def matmul(a: FieldMatrix, b: FieldMatrix) -> FieldMatrix:
    _check_same_field(a, b)
    if a.cols != b.rows:
        raise ValueError(f"shape mismatch: {a.shape} @ {b.shape}")
    # row-by-row keeps intermediate sums below 2**63 for any p <= MAX_PRIME
    out = np.zeros((a.rows, b.cols), dtype=np.int64)
    for k in range(a.cols):
        out = (out + np.outer(a.array[:, k], b.array[k, :])) % a.p
    return FieldMatrix(a.field, out)


def inverse_element(field: PrimeField | int, c: int) -> int:
    if not isinstance(field, PrimeField):
        field = PrimeField(int(field))
    return field.inverse(c)


def matrix_to_json(a: FieldMatrix) -> dict:
    return {"p": a.p, "rows": a.rows, "cols": a.cols, "entries": a.to_lists()}


def matrix_from_json(obj: dict) -> FieldMatrix:
    """Parse the matrix literal ``{"p", "rows", "cols", "entries"}``."""
    for key in ("p", "rows", "cols", "entries"):
        if key not in obj:
            raise ValueError(f"matrix: missing field {key!r}")
    p, rows, cols, entries = obj["p"], obj["rows"], obj["cols"], obj["entries"]
    if len(entries) != rows:
        raise ValueError(f"matrix: 'entries' has {len(entries)} rows, expected {rows}")
    for i, row in enumerate(entries):
        if len(row) != cols:
            raise ValueError(f"matrix: entries[{i}] has {len(row)} entries, expected {cols}")
        for j, x in enumerate(row):
            if not isinstance(x, int) or not 0 <= x < p:
                raise ValueError(f"matrix: entries[{i}][{j}] = {x!r} is not a residue mod {p}")
    if rows == 0:
        return FieldMatrix.zeros(p, 0, cols)
    return FieldMatrix(p, entries)
