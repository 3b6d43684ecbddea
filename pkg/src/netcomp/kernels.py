"""Backend selection for the hot kernels.

The compiled extension ``netcomp._ckernels`` is used when it was built;
otherwise the numpy implementations in ``netcomp._pykernels`` are used.
Set ``NETCOMP_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _pykernels

BACKEND = "python"

if os.environ.get("NETCOMP_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels
    else:
        BACKEND = "compiled"
else:
    _impl = _pykernels

rank_mod_p = _impl.rank_mod_p
rank_table = _impl.rank_table
first_conflict = _impl.first_conflict
rank_axiom_violations = _impl.rank_axiom_violations


def thread_cap() -> int:
    """Worker cap from ``NETCOMP_THREADS`` (default 1, i.e. serial)."""
    try:
        return max(1, int(os.environ.get("NETCOMP_THREADS", "1")))
    except ValueError:
        return 1
