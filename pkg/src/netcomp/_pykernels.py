"""Pure numpy implementations of the hot kernels.

Every function here has a twin in ``_ckernels.pyx`` with the same signature
and the same (deterministic) output. ``netcomp.kernels`` picks one at import.
"""

from __future__ import annotations

import numpy as np

# subsets processed per batch in rank_table; bounds peak memory
_CHUNK = 1 << 15


def _inverse_table(p: int) -> np.ndarray:
    inv = np.zeros(p, dtype=np.int64)
    for c in range(1, p):
        inv[c] = pow(c, p - 2, p)
    return inv


def rank_mod_p(a: np.ndarray, p: int) -> int:
    """Rank of a 2-D integer array over GF(p)."""
    m = np.array(a, dtype=np.int64, copy=True) % p
    rows, cols = m.shape
    r = 0
    for j in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, j])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        m[r] = (m[r] * pow(int(m[r, j]), p - 2, p)) % p
        below = m[r + 1:, j].copy()
        if below.any():
            m[r + 1:] = (m[r + 1:] - below[:, None] * m[r]) % p
        r += 1
    return r


def _batched_rank(batch: np.ndarray, p: int, inv: np.ndarray) -> np.ndarray:
    """Ranks of a stack of matrices, shape (N, m, n), by lock-step elimination."""
    a = batch % p
    n_batch, rows, cols = a.shape
    rank = np.zeros(n_batch, dtype=np.int64)
    ar = np.arange(n_batch)
    row_idx = np.arange(rows)
    for j in range(cols):
        cand = (a[:, :, j] != 0) & (row_idx[None, :] >= rank[:, None])
        has = cand.any(axis=1)
        if not has.any():
            continue
        sel = ar[has]
        piv = np.argmax(cand[has], axis=1)
        tgt = rank[has]
        prow = a[sel, piv].copy()
        a[sel, piv] = a[sel, tgt]
        prow = (prow * inv[prow[:, j]][:, None]) % p
        a[sel, tgt] = prow
        col = a[sel, :, j].copy()
        col[np.arange(sel.size), tgt] = 0
        a[sel] = (a[sel] - col[:, :, None] * prow[:, None, :]) % p
        rank[has] += 1
    return rank


def rank_table(a: np.ndarray, p: int) -> np.ndarray:
    """Rank of every column subset; entry ``mask`` has bit i set for column i."""
    a = np.asarray(a, dtype=np.int64) % p
    rows, cols = a.shape
    total = 1 << cols
    out = np.zeros(total, dtype=np.int64)
    if rows == 0 or cols == 0:
        return out
    inv = _inverse_table(p)
    bits = 1 << np.arange(cols, dtype=np.int64)
    for start in range(0, total, _CHUNK):
        masks = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        keep = (masks[:, None] & bits[None, :]) != 0
        batch = a[None, :, :] * keep[:, None, :]
        out[start:start + masks.size] = _batched_rank(batch, p, inv)
    return out


def first_conflict(keys: np.ndarray, vals: np.ndarray):
    """Find the earliest index whose key was seen before with another value.

    Returns ``(i, j)`` where ``i`` is the first occurrence of the key and ``j``
    the first position (in array order) that contradicts it, or ``None`` when
    ``vals`` is a function of ``keys``.
    """
    keys = np.asarray(keys)
    vals = np.asarray(vals)
    if keys.size == 0:
        return None
    _, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
    first_of = first[inverse.reshape(-1)]
    bad = vals != vals[first_of]
    if not bad.any():
        return None
    j = int(np.argmax(bad))
    return int(first_of[j]), j


def rank_axiom_violations(r: np.ndarray, n: int, limit: int):
    """Exhaustive R1/R2/R3 scan of a rank table over all subset pairs.

    Violations come out ordered by (A, B) with codes ``"R1"`` (B unused, -1),
    ``"R2"`` for A ⊆ B with r(A) > r(B), and ``"R3"`` for A < B breaking
    submodularity.
    """
    r = np.asarray(r, dtype=np.int64)
    total = 1 << n
    out: list[tuple[str, int, int]] = []
    allb = np.arange(total, dtype=np.int64)
    sizes = np.array([bin(x).count("1") for x in range(total)], dtype=np.int64)
    for a in range(total):
        if r[a] < 0 or r[a] > sizes[a]:
            out.append(("R1", a, -1))
            if len(out) >= limit:
                return out
        rest = allb[a:]
        sub = (rest & a) == a
        r2 = sub & (r[a] > r[rest])
        r3 = (r[rest | a] + r[rest & a]) > (r[a] + r[rest])
        r3[0] = False
        hits = np.nonzero(r2 | r3)[0]
        for h in hits:
            b = a + int(h)
            if r2[h]:
                out.append(("R2", a, b))
                if len(out) >= limit:
                    return out
            if r3[h]:
                out.append(("R3", a, b))
                if len(out) >= limit:
                    return out
    return out
