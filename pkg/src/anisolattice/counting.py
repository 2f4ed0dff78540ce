"""Exact counts n_eps(S) = #(T_eps(S) ∩ Z^n) and their split over fibers.

T_eps fixes F and stretches H = F^⊥ by 1/eps, so k is counted exactly when
T_eps^{-1}(k) = k_F + eps * k_H lies in S.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _linalg as la
from .domains import Box, Ellipsoid, OracleDomain, bounding_box, classify
from .exact import QuadScalar, as_fraction, format_rational, parse_rational, to_float
from .kernels import enumerate_points, pack_constraints
from .lattice import SubspaceData

__all__ = [
    "CountResult",
    "BudgetExceeded",
    "DEFAULT_BUDGET",
    "t_eps_matrix",
    "t_eps_inverse",
    "candidate_box",
    "count_points",
    "gauss_reference",
]

DEFAULT_BUDGET = 10**9


class BudgetExceeded(RuntimeError):
    def __init__(self, candidates: int, budget: int):
        self.candidates = candidates
        self.budget = budget
        super().__init__(f"enumeration needs {candidates} candidate points, budget is {budget}")


@dataclass(frozen=True)
class CountResult:
    epsilon: Fraction
    total: int
    by_fiber: dict = field(default_factory=dict)
    ambiguous: int = 0

    def to_json(self) -> dict:
        return {
            "epsilon": format_rational(self.epsilon),
            "total": self.total,
            "by_fiber": [{"coords": list(k), "count": v} for k, v in self.by_fiber.items()],
            "ambiguous": self.ambiguous,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CountResult":
        return cls(
            epsilon=parse_rational(obj["epsilon"]),
            total=int(obj["total"]),
            by_fiber={tuple(e["coords"]): int(e["count"]) for e in obj["by_fiber"]},
            ambiguous=int(obj.get("ambiguous", 0)),
        )


def _positive_eps(eps) -> Fraction:
    eps = parse_rational(eps) if isinstance(eps, str) else as_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    return eps


def t_eps_matrix(eps, S: SubspaceData, inverse: bool = True):
    """Matrix of T_eps^{-1} = eps I + (1 - eps) P_F (or T_eps when ``inverse`` is false)."""
    eps = _positive_eps(eps)
    s = eps if inverse else 1 / eps
    n = S.n
    return [[(s if i == j else 0) + (1 - s) * S.proj_F[i][j] for j in range(n)] for i in range(n)]


def t_eps_inverse(k, eps, S: SubspaceData) -> list[QuadScalar]:
    """k_F + eps * k_H for the orthogonal splitting k = k_F + k_H along F ⊕ H."""
    if len(k) != S.n:
        raise ValueError("dimension mismatch")
    eps = _positive_eps(eps)
    kF = la.matvec([list(r) for r in S.proj_F], [Fraction(x) for x in k])
    zero = QuadScalar(0, 0, S.d)
    return [zero + f + eps * (x - f) for x, f in zip(k, kF)]


def candidate_box(D, S: SubspaceData, eps) -> tuple[list[int], list[int]]:
    """Integer box containing T_eps(bounding_box(D))."""
    box = bounding_box(D)
    T = np.array([[to_float(x) for x in row] for row in t_eps_matrix(eps, S, inverse=False)])
    lo = np.array([float(x) for x in box.lower])
    hi = np.array([float(x) for x in box.upper])
    mid, half = (lo + hi) / 2, (hi - lo) / 2
    c = T @ mid
    w = np.abs(T) @ half
    slack = 1e-7 * (1 + np.abs(c) + w)
    return ([math.floor(v) for v in c - w - slack], [math.ceil(v) for v in c + w + slack])


def _box_volume(lo, hi) -> int:
    return math.prod(max(0, b - a + 1) for a, b in zip(lo, hi))


def _constraints(D, T, n: int):
    if isinstance(D, Ellipsoid):
        M = [list(r) for r in D.shape]
        TM = la.matmul(T, M)
        A = la.matmul(TM, T)
        TMc = la.matvec(TM, list(D.center))
        c0 = D.quadratic_form([0] * n) - 1
        return [(A, [-2 * x for x in TMc], c0)]
    if isinstance(D, Box):
        raw = []
        for i in range(n):
            raw.append((None, [-x for x in T[i]], D.lower[i]))
            raw.append((None, list(T[i]), -D.upper[i]))
        return raw
    raise TypeError(f"no exact constraints for {D!r}")


def _fiber_counts(points: np.ndarray, S: SubspaceData) -> dict:
    if S.r == 0:
        return {(): int(len(points))} if len(points) else {}
    if len(points) == 0:
        return {}
    L = np.array(S.gamma.basis, dtype=np.int64)
    coords = points @ L.T
    keys, counts = np.unique(coords, axis=0, return_counts=True)
    return {tuple(int(v) for v in key): int(c) for key, c in zip(keys, counts)}


def _oracle_points(D: OracleDomain, S, eps, lo, hi, chunk: int = 1 << 18):
    T = np.array([[to_float(x) for x in row] for row in t_eps_matrix(eps, S)])
    n = S.n
    inside_parts = []
    ambiguous = 0
    inner = _box_volume(lo[1:], hi[1:]) if n > 1 else 1
    step = max(1, chunk // max(inner, 1))
    rest = [np.arange(a, b + 1) for a, b in zip(lo[1:], hi[1:])]
    for start in range(lo[0], hi[0] + 1, step):
        first = np.arange(start, min(start + step - 1, hi[0]) + 1)
        grid = np.stack(np.meshgrid(first, *rest, indexing="ij"), axis=-1).reshape(-1, n)
        lev = D.level(grid.astype(float) @ T.T)
        amb = np.abs(lev) <= D.tol
        ambiguous += int(np.count_nonzero(amb))
        inside_parts.append(grid[(lev < 0) & ~amb])
    pts = np.concatenate(inside_parts) if inside_parts else np.empty((0, n), dtype=np.int64)
    return pts.astype(np.int64), ambiguous


def count_points(D, S: SubspaceData, eps, budget: int = DEFAULT_BUDGET, threads: int | None = None,
                 backend: str = "auto", return_points: bool = False):
    """Exact n_eps(D) with its fiber decomposition.

    Every integer point of the box around T_eps(D) is tested; the fiber of a
    counted point k is given by the integers <k, l_j> for the basis l_j of
    Gamma, which are its coordinates in the dual basis.
    """
    eps = _positive_eps(eps)
    if D.dim != S.n:
        raise ValueError("domain and subspace dimensions differ")
    lo, hi = candidate_box(D, S, eps)
    candidates = _box_volume(lo, hi)
    if candidates > budget:
        raise BudgetExceeded(candidates, budget)
    ambiguous = 0
    if isinstance(D, OracleDomain):
        points, ambiguous = _oracle_points(D, S, eps, lo, hi)
    else:
        T = t_eps_matrix(eps, S)
        cons = pack_constraints(_constraints(D, T, S.n), S.n, S.d)
        points = enumerate_points(lo, hi, cons, threads=threads, backend=backend)
    result = CountResult(eps, int(len(points)), _fiber_counts(points, S), ambiguous)
    if return_points:
        return result, points
    return result


def gauss_reference(D, eps, budget: int = DEFAULT_BUDGET) -> int:
    """#(eps^{-1} D ∩ Z^n) by direct exact membership tests of eps * k.

    Independent of the kernel path; intended as a cross-check when F is trivial.
    """
    eps = _positive_eps(eps)
    box = bounding_box(D)
    lo = [math.floor(x / eps) for x in box.lower]
    hi = [math.ceil(x / eps) for x in box.upper]
    if _box_volume(lo, hi) > budget:
        raise BudgetExceeded(_box_volume(lo, hi), budget)
    total = 0
    for k in itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi))):
        inside, _ = classify(D, [eps * x for x in k])
        total += inside
    return total
