"""Backend selection for the enumeration kernel.

The compiled extension (``_enum``) is used when it imported successfully and
an a priori bound shows that int64/int128 arithmetic is exact for the given
box; otherwise the pure-Python twin runs.  Setting the environment variable
``ANISOLATTICE_PURE_PYTHON=1`` disables the compiled path at import.
``ANISOLATTICE_THREADS`` sets the default number of worker threads.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _enum_py
from ._linalg import common_denominator
from .exact import QuadScalar

try:
    if os.environ.get("ANISOLATTICE_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("compiled kernel disabled by environment")
    from . import _enum as _compiled
except ImportError:
    _compiled = None

HAVE_COMPILED = _compiled is not None

_LIMIT64 = 1 << 62
_LIMIT128 = 1 << 126

__all__ = ["HAVE_COMPILED", "Constraints", "pack_constraints", "fits_compiled",
           "enumerate_points", "default_threads"]


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("ANISOLATTICE_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class Constraints:
    """Integer data of constraints alpha_c(k) + beta_c(k) sqrt(d) < 0."""

    n: int
    d: int
    q0: tuple
    q1: tuple
    l0: tuple
    l1: tuple
    k0: tuple
    k1: tuple

    def __len__(self):
        return len(self.k0)


def _parts(x):
    if isinstance(x, QuadScalar):
        return x.a, x.b
    return Fraction(x), Fraction(0)


def pack_constraints(raw, n: int, d: int) -> Constraints:
    """Pack ``(Q, L, K)`` triples meaning k^T Q k + L.k + K < 0.

    ``Q`` is a symmetric n x n matrix (or None), ``L`` a length-n vector and
    ``K`` a scalar, all with entries in Q(sqrt(d)).  Each constraint is
    multiplied by a positive integer to clear denominators, and Q is folded
    into its upper triangle.
    """
    q0, q1, l0, l1, k0, k1 = [], [], [], [], [], []
    for Q, L, K in raw:
        Q = Q if Q is not None else [[0] * n for _ in range(n)]
        folded = [[Q[i][j] if i == j else (Q[i][j] + Q[j][i] if i < j else 0)
                   for j in range(n)] for i in range(n)]
        entries = [_parts(x) for row in folded for x in row] + [_parts(x) for x in L] + [_parts(K)]
        den = common_denominator([v for pair in entries for v in pair])

        def scale(x, part):
            return int(_parts(x)[part] * den)

        for part, (qs, ls, ks) in enumerate(((q0, l0, k0), (q1, l1, k1))):
            qs.append(tuple(tuple(scale(x, part) for x in row) for row in folded))
            ls.append(tuple(scale(x, part) for x in L))
            ks.append(scale(K, part))
    return Constraints(n, d, tuple(q0), tuple(q1), tuple(l0), tuple(l1), tuple(k0), tuple(k1))


def _bound(q, l, k, K: int) -> int:
    return sum(abs(x) for row in q for x in row) * K * K + sum(abs(x) for x in l) * K + abs(k)


def fits_compiled(cons: Constraints, lo, hi) -> bool:
    """True when the compiled kernel's fixed-width arithmetic is provably exact."""
    K = max([abs(int(x)) for x in list(lo) + list(hi)] + [1])
    if K >= _LIMIT64:
        return False
    for c in range(len(cons)):
        ba = _bound(cons.q0[c], cons.l0[c], cons.k0[c], K)
        bb = _bound(cons.q1[c], cons.l1[c], cons.k1[c], K)
        if ba >= _LIMIT64 or bb >= _LIMIT64 or max(cons.d, 1) * bb * bb >= _LIMIT128:
            return False
    return True


def _slabs(lo, hi, pieces: int):
    a, b = lo[0], hi[0]
    width = b - a + 1
    pieces = max(1, min(pieces, width))
    step = -(-width // pieces)
    for start in range(a, b + 1, step):
        yield [start] + list(lo[1:]), [min(start + step - 1, b)] + list(hi[1:])


def _run_compiled(lo, hi, arrays, d):
    lo = np.asarray(lo, dtype=np.int64)
    hi = np.asarray(hi, dtype=np.int64)
    n = len(lo)
    volume = int(np.prod((hi - lo + 1).astype(object)))
    cap = max(1, min(volume, 1 << 20))
    out = np.empty((cap, n), dtype=np.int64)
    count = _compiled.enumerate_box(lo, hi, *arrays, d, out)
    if count > cap:
        out = np.empty((count, n), dtype=np.int64)
        count = _compiled.enumerate_box(lo, hi, *arrays, d, out)
    return out[:count].copy()


def enumerate_points(lo, hi, cons: Constraints, threads: int | None = None,
                     backend: str = "auto") -> np.ndarray:
    """All integer k with lo <= k <= hi satisfying every constraint, in lexicographic order.

    ``backend`` is "auto", "compiled" or "python".  Asking for "compiled"
    when the extension is missing or the magnitude bound fails raises
    RuntimeError.
    """
    lo = [int(x) for x in lo]
    hi = [int(x) for x in hi]
    n = cons.n
    if backend not in ("auto", "compiled", "python"):
        raise ValueError(f"unknown backend {backend!r}")
    use_compiled = backend != "python" and HAVE_COMPILED and fits_compiled(cons, lo, hi)
    if backend == "compiled" and not use_compiled:
        raise RuntimeError("compiled kernel unavailable or unsafe for this input")
    if any(a > b for a, b in zip(lo, hi)):
        return np.empty((0, n), dtype=np.int64)
    threads = threads or default_threads()

    if use_compiled:
        c = len(cons)
        arrays = (
            np.ascontiguousarray(np.array(cons.q0, dtype=np.int64).reshape(c, n, n)),
            np.ascontiguousarray(np.array(cons.q1, dtype=np.int64).reshape(c, n, n)),
            np.ascontiguousarray(np.array(cons.l0, dtype=np.int64).reshape(c, n)),
            np.ascontiguousarray(np.array(cons.l1, dtype=np.int64).reshape(c, n)),
            np.ascontiguousarray(np.array(cons.k0, dtype=np.int64).reshape(c)),
            np.ascontiguousarray(np.array(cons.k1, dtype=np.int64).reshape(c)),
        )
        slabs = list(_slabs(lo, hi, threads * 4 if threads > 1 else 1))
        if threads > 1 and len(slabs) > 1:
            with ThreadPoolExecutor(threads) as pool:
                parts = list(pool.map(lambda s: _run_compiled(s[0], s[1], arrays, cons.d), slabs))
        else:
            parts = [_run_compiled(a, b, arrays, cons.d) for a, b in slabs]
        return np.concatenate(parts) if parts else np.empty((0, n), dtype=np.int64)

    pts = _enum_py.enumerate_box(lo, hi, cons.q0, cons.q1, cons.l0, cons.l1, cons.k0, cons.k1, cons.d)
    return np.array(pts, dtype=np.int64).reshape(len(pts), n)
