"""Small dense linear algebra over an exact field (Fraction or QuadScalar).

Matrices are lists of row lists.  Nothing here is meant for large sizes;
n is at most a handful in every caller.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def zeros(m: int, n: int):
    return [[Fraction(0)] * n for _ in range(m)]


def identity(n: int):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def transpose(A):
    return [list(col) for col in zip(*A)]


def dot(u, v):
    s = Fraction(0)
    for x, y in zip(u, v):
        if x and y:
            s = s + x * y
    return s


def matvec(A, v):
    return [dot(row, v) for row in A]


def matmul(A, B):
    Bt = transpose(B)
    return [[dot(row, col) for col in Bt] for row in A]


def gram(rows):
    return [[dot(u, v) for v in rows] for u in rows]


def rref(A):
    """Reduced row echelon form; returns (R, pivot_columns)."""
    R = [list(row) for row in A]
    m = len(R)
    n = len(R[0]) if m else 0
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        p = next((i for i in range(r, m) if R[i][c] != 0), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        inv = 1 / R[r][c]
        R[r] = [x * inv for x in R[r]]
        for i in range(m):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
    return R, pivots


def rank(A) -> int:
    if not A:
        return 0
    return len(rref(A)[1])


def nullspace(A, n: int):
    """Basis of {x : A x = 0} in the standard rref form (one free variable = 1)."""
    if not A:
        return identity(n)
    R, pivots = rref(A)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -R[i][f]
        basis.append(v)
    return basis


def det(A):
    n = len(A)
    if n == 0:
        return Fraction(1)
    M = [list(row) for row in A]
    result = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if M[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            M[c], M[p] = M[p], M[c]
            result = -result
        piv = M[c][c]
        result = result * piv
        for i in range(c + 1, n):
            if M[i][c] != 0:
                f = M[i][c] / piv
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return result


def inverse(A):
    n = len(A)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in R]


def solve(A, b):
    """Solve the square system A x = b exactly."""
    n = len(A)
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    R, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [R[i][n] for i in range(n)]


# -- integer helpers -------------------------------------------------------

def lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b) if a and b else max(a, b, 1)


def common_denominator(values) -> int:
    den = 1
    for v in values:
        den = lcm(den, Fraction(v).denominator)
    return den
