"""Lattices attached to a linear subspace F of R^n.

For F spanned by vectors with entries in Q(sqrt(d)) this module computes

* ``H``, the orthogonal complement of F,
* ``gamma`` = Z^n ∩ F with its rank ``r`` (an HNF basis),
* ``gamma_star``, the dual of ``gamma`` inside V = span(gamma),
* ``gamma_perp`` = Z^n ∩ V^⊥,
* the squared covolume ``|Q|^2`` of ``gamma`` in V,

all exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import _linalg as la
from .exact import FieldMismatchError, QuadScalar, format_rational, parse_rational, parse_scalar

SCHEMA_VERSION = 1

__all__ = [
    "IntegerLattice",
    "DualLattice",
    "SubspaceData",
    "hermite_normal_form",
    "integer_kernel",
    "build_subspace",
    "dual_basis",
    "project_V",
    "dual_coordinates",
    "covolume_sq",
]


# -- integer normal forms ----------------------------------------------------

def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with x*a + y*b = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def _row_echelon(rows: list[list[int]], ncols: int) -> int:
    """In-place integer row reduction on the first ``ncols`` columns.

    Only unimodular row operations are used.  Pivots are made positive and
    entries above each pivot are reduced into [0, pivot).  Returns the number
    of pivot rows, which come first.
    """
    m = len(rows)
    piv = 0
    for c in range(ncols):
        if piv == m:
            break
        for i in range(piv + 1, m):
            b = rows[i][c]
            if b == 0:
                continue
            a = rows[piv][c]
            g, x, y = _xgcd(a, b)
            ra, rb = rows[piv], rows[i]
            u, v = a // g, b // g
            rows[piv] = [x * p + y * q for p, q in zip(ra, rb)]
            rows[i] = [-v * p + u * q for p, q in zip(ra, rb)]
        if rows[piv][c] == 0:
            continue
        if rows[piv][c] < 0:
            rows[piv] = [-t for t in rows[piv]]
        p = rows[piv][c]
        for i in range(piv):
            f = rows[i][c] // p
            if f:
                rows[i] = [s - f * t for s, t in zip(rows[i], rows[piv])]
        piv += 1
    return piv


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row-style HNF of an integer matrix, zero rows dropped."""
    work = [list(map(int, r)) for r in rows]
    if not work:
        return []
    k = _row_echelon(work, len(work[0]))
    return work[:k]


def _integer_rows(M) -> list[list[int]]:
    out = []
    for row in M:
        row = [parse_rational(x) if isinstance(x, str) else x for x in row]
        for x in row:
            if isinstance(x, QuadScalar):
                if x.b != 0:
                    raise ValueError("integer_kernel needs rational rows; split quadratic rows first")
            elif not isinstance(x, (int, Fraction)):
                raise ValueError(f"non-rational entry {x!r}")
        row = [x.a if isinstance(x, QuadScalar) else Fraction(x) for x in row]
        den = la.common_denominator(row)
        out.append([int(x * den) for x in row])
    return out


# -- lattice types -----------------------------------------------------------

@dataclass(frozen=True)
class IntegerLattice:
    ambient_dim: int
    basis: tuple[tuple[int, ...], ...]
    gram_det: Fraction

    @property
    def rank(self) -> int:
        return len(self.basis)

    @classmethod
    def from_basis(cls, basis, ambient_dim: int) -> "IntegerLattice":
        basis = tuple(tuple(int(x) for x in v) for v in basis)
        return cls(ambient_dim, basis, Fraction(la.det(la.gram(basis))))


@dataclass(frozen=True)
class DualLattice:
    ambient_dim: int
    basis: tuple[tuple[Fraction, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.basis)


def integer_kernel(M) -> IntegerLattice:
    """Basis of the saturated lattice Z^n ∩ ker(M) for a rational m x n matrix.

    Rows are scaled to integers, and a unimodular reduction of [M^T | I]
    exposes the kernel; the result is returned in Hermite normal form.
    """
    rows = _integer_rows(M)
    if not rows:
        raise ValueError("integer_kernel needs at least one row to know n")
    n = len(rows[0])
    m = len(rows)
    aug = [[rows[j][i] for j in range(m)] + [int(i == k) for k in range(n)] for i in range(n)]
    k = _row_echelon(aug, m)
    kernel = [row[m:] for row in aug[k:]]
    basis = hermite_normal_form(kernel)
    return IntegerLattice.from_basis(basis, n)


def dual_basis(L: IntegerLattice) -> DualLattice:
    """Dual basis B (B^T B)^{-1} in the span of L."""
    if not L.basis:
        return DualLattice(L.ambient_dim, ())
    B = [[Fraction(x) for x in v] for v in L.basis]
    Ginv = la.inverse(la.gram(B))
    dual = la.matmul(Ginv, B)
    return DualLattice(L.ambient_dim, tuple(tuple(v) for v in dual))


def covolume_sq(L: IntegerLattice | DualLattice) -> Fraction:
    """Squared covolume of a lattice inside its own span (1 for rank 0)."""
    if not L.basis:
        return Fraction(1)
    return Fraction(la.det(la.gram([[Fraction(x) for x in v] for v in L.basis])))


# -- the subspace ------------------------------------------------------------

@dataclass(frozen=True)
class SubspaceData:
    n: int
    p: int
    d: int
    F_basis: tuple[tuple[QuadScalar, ...], ...]
    H_basis: tuple[tuple[QuadScalar, ...], ...]
    gamma: IntegerLattice
    gamma_star: DualLattice
    gamma_perp: IntegerLattice
    covolume_sq: Fraction
    proj_F: tuple[tuple[QuadScalar, ...], ...] = field(repr=False)

    @property
    def q(self) -> int:
        return self.n - self.p

    @property
    def r(self) -> int:
        return self.gamma.rank

    @property
    def V_basis(self):
        return self.gamma.basis

    @property
    def covolume(self) -> float:
        return float(self.covolume_sq) ** 0.5

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "n": self.n,
            "p": self.p,
            "q": self.q,
            "d": self.d,
            "F_basis": [[str(x) for x in v] for v in self.F_basis],
            "H_basis": [[str(x) for x in v] for v in self.H_basis],
            "r": self.r,
            "gamma": [list(v) for v in self.gamma.basis],
            "gamma_star": [[format_rational(x) for x in v] for v in self.gamma_star.basis],
            "gamma_perp": [list(v) for v in self.gamma_perp.basis],
            "covolume_sq": format_rational(self.covolume_sq),
            "covolume": self.covolume,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SubspaceData":
        """Rebuild from ``n``, ``d`` and ``F_basis``; stored derived fields are checked."""
        S = build_subspace(obj.get("F_basis", []), int(obj["n"]), obj.get("d"))
        if "gamma" in obj:
            stored = {
                "gamma": [list(map(int, v)) for v in obj["gamma"]],
                "gamma_star": [[format_rational(parse_rational(x)) for x in v] for v in obj.get("gamma_star", [])],
                "covolume_sq": format_rational(parse_rational(obj["covolume_sq"])),
            }
            fresh = S.to_json()
            for key, value in stored.items():
                if fresh[key] != value:
                    raise ValueError(f"stored {key} {value} disagrees with recomputed {fresh[key]}")
        return S


def _infer_field(entries, d: int | None) -> int:
    found = {x.d for x in entries if isinstance(x, QuadScalar) and x.b != 0}
    if len(found) > 1:
        raise FieldMismatchError(f"F basis mixes quadratic fields {sorted(found)}")
    if d is not None:
        if found and found != {d}:
            raise FieldMismatchError(f"F basis uses sqrt({found.pop()}) but d={d}")
        return d
    return found.pop() if found else 0


def _split_rows(rows):
    """Rational and sqrt(d) parts of each quadratic row (integer k kills both)."""
    out = []
    for row in rows:
        out.append([x.a for x in row])
        if any(x.b != 0 for x in row):
            out.append([x.b for x in row])
    return out


def build_subspace(F_basis, n: int, d: int | None = None) -> SubspaceData:
    """Compute the full lattice apparatus for F = span(F_basis) in R^n."""
    vectors = [[parse_scalar(x) for x in v] for v in F_basis]
    if any(len(v) != n for v in vectors):
        raise ValueError(f"every F basis vector must have length n={n}")
    p = len(vectors)
    if p >= n:
        raise ValueError(f"need p < n, got p={p}, n={n}")
    d = _infer_field([x for v in vectors for x in v], d)
    vectors = [[parse_scalar(x, d) for x in v] for v in vectors]
    zero = QuadScalar(0, 0, d)
    one = QuadScalar(1, 0, d)

    if p:
        G = la.gram(vectors)
        if la.det(G) == 0:
            raise ValueError("F basis is linearly dependent")
        H = la.nullspace(vectors, n)
        H = [[zero + x for x in h] for h in H]
        Ginv = la.inverse(G)
        proj = la.matmul(la.matmul(la.transpose(vectors), Ginv), vectors)
    else:
        H = [[one if i == j else zero for j in range(n)] for i in range(n)]
        proj = [[zero] * n for _ in range(n)]

    if p:
        gamma = integer_kernel(_split_rows(H))
    else:
        gamma = IntegerLattice(n, (), Fraction(1))
    gamma_star = dual_basis(gamma)
    if gamma.basis:
        gamma_perp = integer_kernel([list(v) for v in gamma.basis])
    else:
        gamma_perp = IntegerLattice.from_basis([[int(i == j) for j in range(n)] for i in range(n)], n)

    return SubspaceData(
        n=n,
        p=p,
        d=d,
        F_basis=tuple(tuple(zero + x for x in v) for v in vectors),
        H_basis=tuple(tuple(h) for h in H),
        gamma=gamma,
        gamma_star=gamma_star,
        gamma_perp=gamma_perp,
        covolume_sq=covolume_sq(gamma),
        proj_F=tuple(tuple(zero + x for x in row) for row in proj),
    )


def project_V(x, S: SubspaceData) -> list[Fraction]:
    """Orthogonal projection onto V = span(gamma), via B (B^T B)^{-1} B^T x."""
    if len(x) != S.n:
        raise ValueError("dimension mismatch")
    x = [Fraction(t) for t in x]
    if not S.gamma.basis:
        return [Fraction(0)] * S.n
    B = [[Fraction(t) for t in v] for v in S.gamma.basis]
    coeffs = la.solve(la.gram(B), la.matvec(B, x))
    return [sum((c * v[i] for c, v in zip(coeffs, B)), Fraction(0)) for i in range(S.n)]


def dual_coordinates(k, S: SubspaceData) -> tuple[int, ...]:
    """Coordinates of pi_V(k) in the dual basis, for integer k.

    They are the integers <k, l_j> for the primal basis vectors l_j.
    """
    return tuple(sum(int(a) * b for a, b in zip(k, v)) for v in S.gamma.basis)
