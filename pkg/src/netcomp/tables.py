"""Functions from tuples over the alphabet ``[0, q)`` to one alphabet symbol.

A :class:`FunctionTable` is either named (max, sum, linear, coordinate,
const) over a selection of its arguments, or an explicit value table indexed
by the argument tuple read as a base-``q`` number, first argument most
significant. Evaluation is vectorised: arguments are whole arrays, typically
one entry per message tuple in ``[q]^K``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

NAMED_KINDS = ("max", "sum", "linear", "coordinate", "const")

# default cap on q**K for exhaustive scans
DEFAULT_TUPLE_BUDGET = 1 << 24


class BudgetExceeded(RuntimeError):
    pass


def symbol_dtype(q: int):
    if q <= 1 << 8:
        return np.uint8
    if q <= 1 << 16:
        return np.uint16
    return np.int64


def message_grid(q: int, K: int, budget: int = DEFAULT_TUPLE_BUDGET) -> list[np.ndarray]:
    """All of ``[q]^K`` in lexicographic order, one array per coordinate.

    Tuple number ``x`` has ``X_1`` as its most significant base-``q`` digit.
    """
    total = q**K
    if total > budget:
        raise BudgetExceeded(f"q^K = {q}^{K} = {total} exceeds the tuple budget {budget}")
    idx = np.arange(total, dtype=np.int64)
    dt = symbol_dtype(q)
    return [((idx // q ** (K - 1 - k)) % q).astype(dt) for k in range(K)]


def tuple_at(q: int, K: int, x: int) -> tuple[int, ...]:
    """Message tuple number ``x`` of :func:`message_grid`."""
    return tuple((x // q ** (K - 1 - k)) % q for k in range(K))


def encode_columns(columns: Sequence[np.ndarray], q: int, size: int | None = None) -> np.ndarray:
    """Pack argument columns into one base-``q`` integer key per position."""
    if not columns:
        return np.zeros(size or 0, dtype=np.int64)
    key = np.zeros(len(columns[0]), dtype=np.int64)
    for col in columns:
        key = key * q + col.astype(np.int64)
    return key


@dataclass(frozen=True, eq=False)
class FunctionTable:
    """A function ``[q]^arity -> [q]``.

    ``args`` are 1-based argument positions used by the named kinds (``None``
    means every argument). ``coeffs`` belong to ``linear``; ``const`` stores
    its value in ``coeffs[0]``. ``values`` holds the explicit table.
    """

    kind: str
    args: tuple[int, ...] | None = None
    coeffs: tuple[int, ...] | None = None
    values: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in NAMED_KINDS + ("values",):
            raise ValueError(f"unknown function kind {self.kind!r}")
        if self.kind == "values" and self.values is None:
            raise ValueError("explicit table needs values")
        if self.kind == "coordinate" and (self.args is None or len(self.args) != 1):
            raise ValueError("coordinate needs exactly one argument")
        if self.kind in ("linear", "const") and self.coeffs is None:
            raise ValueError(f"{self.kind} needs coeffs")

    @classmethod
    def named(cls, name: str, args=None, coeffs=None) -> "FunctionTable":
        return cls(name, tuple(args) if args is not None else None,
                   tuple(coeffs) if coeffs is not None else None)

    @classmethod
    def explicit(cls, values) -> "FunctionTable":
        v = np.asarray(values)
        if v.dtype.kind not in "iu":
            v = v.astype(np.int64)
        v = v.copy() if v.flags.writeable else v
        v.setflags(write=False)
        return cls("values", values=v)

    @classmethod
    def coordinate(cls, k: int) -> "FunctionTable":
        return cls("coordinate", (k,))

    @classmethod
    def linear(cls, coeffs, args=None) -> "FunctionTable":
        return cls("linear", tuple(args) if args is not None else None, tuple(int(c) for c in coeffs))

    def evaluate(self, columns: Sequence[np.ndarray], q: int) -> np.ndarray:
        """Apply the function position-wise to argument arrays."""
        n = len(columns[0]) if columns else 0
        dt = symbol_dtype(q)
        if self.kind == "values":
            if self.values.shape[0] != q ** len(columns):
                raise ValueError(
                    f"table has {self.values.shape[0]} entries, expected {q}^{len(columns)}")
            if not columns:
                # zero-argument table: a constant
                return np.full(1, self.values[0] % q, dtype=dt)
            return (self.values[encode_columns(columns, q)] % q).astype(dt)
        if self.kind == "const":
            size = n if columns else 1
            return np.full(size, self.coeffs[0] % q, dtype=dt)
        picks = self.args if self.args is not None else tuple(range(1, len(columns) + 1))
        for a in picks:
            if not 1 <= a <= len(columns):
                raise ValueError(f"argument {a} out of range for arity {len(columns)}")
        sel = [columns[a - 1] for a in picks]
        if self.kind == "coordinate":
            return sel[0].astype(dt)
        if not sel:
            return np.zeros(n if columns else 1, dtype=dt)
        if self.kind == "max":
            return np.maximum.reduce([s.astype(dt) for s in sel])
        if self.kind == "sum":
            coeffs = (1,) * len(sel)
        else:
            coeffs = self.coeffs
            if len(coeffs) != len(sel):
                raise ValueError(f"linear: {len(coeffs)} coeffs for {len(sel)} arguments")
        acc = np.zeros(len(sel[0]), dtype=np.int64)
        for c, s in zip(coeffs, sel):
            acc = (acc + (c % q) * s.astype(np.int64)) % q
        return acc.astype(dt)

    def tabulate(self, arity: int, q: int) -> np.ndarray:
        """Explicit value table of length ``q**arity``."""
        cols = message_grid(q, arity, budget=1 << 30)
        if arity == 0:
            return self.evaluate([], q).astype(np.int64)
        return self.evaluate(cols, q).astype(np.int64)

    def to_json(self) -> dict:
        if self.kind == "values":
            return {"values": [int(v) for v in self.values]}
        out: dict = {"named": self.kind}
        if self.args is not None:
            out["args"] = list(self.args)
        if self.coeffs is not None:
            out["coeffs"] = list(self.coeffs)
        return out

    @classmethod
    def from_json(cls, obj: dict, where: str = "table") -> "FunctionTable":
        if "values" in obj:
            vals = obj["values"]
            if not isinstance(vals, list) or not all(isinstance(v, int) and v >= 0 for v in vals):
                raise ValueError(f"{where}: 'values' must be a list of non-negative integers")
            return cls.explicit(vals)
        if "named" in obj:
            name = obj["named"]
            if name == "identity":
                name = "coordinate"
            if name not in NAMED_KINDS:
                raise ValueError(f"{where}: unknown named function {name!r}")
            args = obj.get("args")
            if name == "coordinate" and args is None and "k" in obj:
                args = [obj["k"]]
            try:
                return cls.named(name, args, obj.get("coeffs"))
            except ValueError as exc:
                raise ValueError(f"{where}: {exc}") from None
        raise ValueError(f"{where}: expected 'values' or 'named'")
