"""Bounded open domains S: exact ellipsoids and boxes, and float oracles.

Slices of a domain by the affine fibers P = gamma* + V^⊥ are measured here,
in closed form for ellipsoids and by hit-or-miss Monte Carlo for oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import _linalg as la
from .exact import QuadScalar, as_fraction, format_rational, parse_rational, parse_scalar, sign, to_float
from .lattice import SubspaceData

__all__ = [
    "Ellipsoid",
    "Box",
    "OracleDomain",
    "ball",
    "superellipsoid",
    "contains",
    "classify",
    "bounding_box",
    "unit_ball_volume",
    "slice_volume",
    "slice_volume_ellipsoid",
    "slice_volume_box",
    "slice_volume_mc",
    "orthonormal_complement",
    "domain_from_json",
    "domain_to_json",
]

DEFAULT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class Ellipsoid:
    """The open set {x : (x - c)^T M (x - c) < 1}.

    ``shape`` must be symmetric positive definite with rational entries.  The
    center may have entries in Q(sqrt(d)).
    """

    center: tuple
    shape: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        n = len(self.center)
        center = tuple(parse_scalar(c) for c in self.center)
        shape = tuple(tuple(as_fraction(x) for x in row) for row in self.shape)
        if len(shape) != n or any(len(row) != n for row in shape):
            raise ValueError("shape must be an n x n matrix matching the center")
        if any(shape[i][j] != shape[j][i] for i in range(n) for j in range(n)):
            raise ValueError("shape matrix must be symmetric")
        for k in range(1, n + 1):
            if la.det([list(row[:k]) for row in shape[:k]]) <= 0:
                raise ValueError("shape matrix must be positive definite")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "shape", shape)

    @property
    def dim(self) -> int:
        return len(self.center)

    def quadratic_form(self, x):
        """(x - c)^T M (x - c), exact."""
        y = [xi - ci for xi, ci in zip(x, self.center)]
        return la.dot(y, la.matvec(self.shape, y))

    def as_oracle(self, tol: float = DEFAULT_TOLERANCE) -> "OracleDomain":
        c = np.array([to_float(v) for v in self.center])
        M = np.array([[float(v) for v in row] for row in self.shape])

        def level(pts):
            y = np.atleast_2d(pts) - c
            return np.einsum("ij,jk,ik->i", y, M, y) - 1.0

        return OracleDomain(level, bounding_box(self), smooth=True,
                            slicewise_strictly_convex=True, tol=tol)


def ball(center, radius_sq) -> Ellipsoid:
    """Open Euclidean ball of squared radius ``radius_sq`` (rational)."""
    r2 = as_fraction(radius_sq)
    if r2 <= 0:
        raise ValueError("radius_sq must be positive")
    n = len(center)
    shape = [[(1 / r2) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    return Ellipsoid(tuple(center), tuple(map(tuple, shape)))


@dataclass(frozen=True)
class Box:
    """Open axis-aligned box prod (lower_i, upper_i)."""

    lower: tuple[Fraction, ...]
    upper: tuple[Fraction, ...]

    def __post_init__(self):
        lower = tuple(as_fraction(x) for x in self.lower)
        upper = tuple(as_fraction(x) for x in self.upper)
        if len(lower) != len(upper):
            raise ValueError("lower and upper must have the same length")
        if any(lo >= hi for lo, hi in zip(lower, upper)):
            raise ValueError("box must have nonempty interior")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def volume(self) -> Fraction:
        v = Fraction(1)
        for lo, hi in zip(self.lower, self.upper):
            v *= hi - lo
        return v


@dataclass(frozen=True)
class OracleDomain:
    """A domain known through a vectorized float level function.

    ``level(points)`` takes an (N, n) array and returns N values; a point is
    inside when its level is negative.  Points with ``|level| <= tol`` are
    ambiguous and are treated as outside.
    """

    level: Callable[[np.ndarray], np.ndarray]
    box: Box
    smooth: bool = True
    slicewise_strictly_convex: bool = False
    tol: float = DEFAULT_TOLERANCE
    spec: dict | None = field(default=None, compare=False)

    @property
    def dim(self) -> int:
        return self.box.dim

    def membership(self, x) -> bool:
        return bool(self.level(np.asarray(x, dtype=float).reshape(1, -1))[0] < -self.tol)


def superellipsoid(center, radii, power: int = 4, tol: float = DEFAULT_TOLERANCE) -> OracleDomain:
    """{x : sum |(x_i - c_i)/a_i|^power < 1} as an oracle domain."""
    c = [as_fraction(x) for x in center]
    a = [as_fraction(x) for x in radii]
    if power < 2 or any(x <= 0 for x in a):
        raise ValueError("need power >= 2 and positive radii")
    cf = np.array([float(x) for x in c])
    af = np.array([float(x) for x in a])

    def level(pts):
        y = np.abs((np.atleast_2d(pts) - cf) / af)
        return np.sum(y ** power, axis=1) - 1.0

    box = Box(tuple(ci - ai for ci, ai in zip(c, a)), tuple(ci + ai for ci, ai in zip(c, a)))
    spec = {"type": "superellipsoid", "power": power,
            "center": [format_rational(x) for x in c], "radii": [format_rational(x) for x in a]}
    return OracleDomain(level, box, smooth=power % 2 == 0, slicewise_strictly_convex=True, tol=tol, spec=spec)


Domain = Ellipsoid | Box | OracleDomain


def _check_dim(D, x):
    if len(x) != D.dim:
        raise ValueError(f"point of dimension {len(x)} for a domain of dimension {D.dim}")


def classify(D, x) -> tuple[bool, bool]:
    """(inside, ambiguous) for the point x; exact for Ellipsoid and Box."""
    _check_dim(D, x)
    if isinstance(D, Ellipsoid):
        return sign(D.quadratic_form(x) - 1) < 0, False
    if isinstance(D, Box):
        inside = all(sign(xi - lo) > 0 and sign(hi - xi) > 0 for xi, lo, hi in zip(x, D.lower, D.upper))
        return inside, False
    if isinstance(D, OracleDomain):
        pt = np.array([[to_float(v) if isinstance(v, QuadScalar) else float(v) for v in x]])
        lev = float(D.level(pt)[0])
        if abs(lev) <= D.tol:
            return False, True
        return lev < 0, False
    raise TypeError(f"unknown domain {D!r}")


def contains(D, x) -> bool:
    """Membership of x in the open set D; boundary points are outside."""
    return classify(D, x)[0]


def _sqrt_upper(x: Fraction) -> Fraction:
    """A rational upper bound for sqrt(x), exact when x is a rational square."""
    num, den = x.numerator, x.denominator
    s = math.isqrt(num * den)
    if s * s == num * den:
        return Fraction(s, den)
    return Fraction(s + 1, den)


def bounding_box(D) -> Box:
    """A box containing the closure of D."""
    if isinstance(D, Box):
        return D
    if isinstance(D, OracleDomain):
        return D.box
    if isinstance(D, Ellipsoid):
        Minv = la.inverse([list(r) for r in D.shape])
        lo, hi = [], []
        for i, c in enumerate(D.center):
            h = _sqrt_upper(Fraction(Minv[i][i]))
            if isinstance(c, QuadScalar) and c.b != 0:
                # rational enclosure of an irrational center coordinate
                cf = to_float(c)
                c_lo = Fraction(math.floor(cf * 2**20) - 1, 2**20)
                c_hi = Fraction(math.ceil(cf * 2**20) + 1, 2**20)
            else:
                c_lo = c_hi = as_fraction(c)
            lo.append(c_lo - h)
            hi.append(c_hi + h)
        return Box(tuple(lo), tuple(hi))
    raise TypeError(f"unknown domain {D!r}")


def unit_ball_volume(m: int) -> float:
    """Volume of the unit ball in R^m, pi^(m/2) / Gamma(m/2 + 1)."""
    if m < 0:
        raise ValueError("dimension must be nonnegative")
    if m % 2 == 0:
        return math.pi ** (m // 2) / math.factorial(m // 2)
    # Gamma(k + 1/2 + 1) = (2k+1)!! / 2^(k+1) * sqrt(pi)
    k = m // 2
    double_fact = math.prod(range(1, 2 * k + 2, 2))
    return 2 ** (k + 1) * math.pi ** k / double_fact


# -- fibers ------------------------------------------------------------------

def _fiber_frame(S: SubspaceData) -> list[list[Fraction]]:
    """Integer basis of V^⊥ (columns of W), as rational rows."""
    return [[Fraction(x) for x in v] for v in S.gamma_perp.basis]


def orthonormal_complement(S: SubspaceData) -> np.ndarray:
    """Float (n, n - r) matrix whose columns are an orthonormal basis of V^⊥."""
    W = np.array([[float(x) for x in v] for v in S.gamma_perp.basis]).T
    Q, _ = np.linalg.qr(W)
    return Q


def slice_volume_ellipsoid(E: Ellipsoid, gamma_star, S: SubspaceData) -> float:
    """(n - r)-volume of E ∩ (gamma_star + V^⊥), from the restricted quadratic form.

    With W a basis of V^⊥ and u = gamma_star - c, the form on the fiber is
    t^T K t + 2 g^T t + u^T M u with K = W^T M W and g = W^T M u; its minimum
    over the fiber is m = u^T M u - g^T K^{-1} g.
    """
    n = S.n
    if E.dim != n or len(gamma_star) != n:
        raise ValueError("dimension mismatch")
    W = _fiber_frame(S)
    k = len(W)
    M = [list(r) for r in E.shape]
    u = [parse_scalar(g) - c for g, c in zip(gamma_star, E.center)]
    Mu = la.matvec(M, u)
    uMu = la.dot(u, Mu)
    if k == 0:
        return 1.0 if sign(uMu - 1) < 0 else 0.0
    K = [[la.dot(wi, la.matvec(M, wj)) for wj in W] for wi in W]
    g = [la.dot(w, Mu) for w in W]
    detK = la.det(K)
    if detK <= 0:
        raise ArithmeticError("restricted shape matrix is not positive definite")
    t0 = la.solve(K, g)
    m = uMu - la.dot(g, t0)
    gap = 1 - m
    if sign(gap) <= 0:
        return 0.0
    ratio = Fraction(la.det(la.gram(W))) / Fraction(detK)
    # vol = omega_k * sqrt(gap^k * det(W^T W) / det K)
    radicand = gap ** k * ratio if isinstance(gap, QuadScalar) else Fraction(gap) ** k * ratio
    return unit_ball_volume(k) * math.sqrt(to_float(radicand))


def slice_volume_box(B: Box, gamma_star, S: SubspaceData) -> float:
    """(n - r)-volume of the polytope B ∩ (gamma_star + V^⊥)."""
    from scipy.optimize import linprog
    from scipy.spatial import ConvexHull, HalfspaceIntersection

    n = S.n
    g = np.array([to_float(parse_scalar(x)) for x in gamma_star])
    lo = np.array([float(x) for x in B.lower])
    hi = np.array([float(x) for x in B.upper])
    if S.r == 0:
        return float(B.volume)
    # coordinates the fiber cannot move in must lie strictly inside, decided exactly
    for i in range(n):
        if all(w[i] == 0 for w in S.gamma_perp.basis):
            gi = parse_scalar(gamma_star[i])
            if sign(gi - B.lower[i]) <= 0 or sign(B.upper[i] - gi) <= 0:
                return 0.0
    U = orthonormal_complement(S)
    k = U.shape[1]
    # lo < g + U t < hi  as  A t <= b
    A = np.vstack([U, -U])
    b = np.concatenate([hi - g, g - lo])
    if k == 1:
        a = A[:, 0]
        upper = min(bi / ai for ai, bi in zip(a, b) if ai > 1e-15)
        lower = max(bi / ai for ai, bi in zip(a, b) if ai < -1e-15)
        return max(0.0, upper - lower)
    norms = np.linalg.norm(A, axis=1)
    # Chebyshev center: maximize s subject to A t + s |a_i| <= b
    res = linprog(c=np.r_[np.zeros(k), -1.0], A_ub=np.c_[A, norms], b_ub=b,
                  bounds=[(None, None)] * k + [(0, None)], method="highs")
    if not res.success or res.x[-1] <= 1e-12:
        return 0.0
    interior = res.x[:k]
    hs = HalfspaceIntersection(np.c_[A, -b], interior)
    return float(ConvexHull(hs.intersections).volume)


def _fiber_box(D, gamma_star, U: np.ndarray):
    """Interval box in fiber coordinates t (x = g + U t) covering D's bounding box."""
    box = bounding_box(D)
    lo = np.array([float(x) for x in box.lower])
    hi = np.array([float(x) for x in box.upper])
    g = np.asarray(gamma_star, dtype=float)
    # t_j = U_j . (x - g) over the box
    Ut = U.T
    t_lo = np.sum(np.where(Ut > 0, Ut * (lo - g), Ut * (hi - g)), axis=1)
    t_hi = np.sum(np.where(Ut > 0, Ut * (hi - g), Ut * (lo - g)), axis=1)
    return t_lo, t_hi


def slice_volume_mc(D, gamma_star, S: SubspaceData, samples: int = 10**6, seed: int = 0,
                    chunk: int = 1 << 18) -> tuple[float, float]:
    """Hit-or-miss estimate of vol_{n-r}(D ∩ (gamma_star + V^⊥)) with its standard error.

    Samples are drawn in chunks; chunk ``i`` uses the stream
    ``SeedSequence([seed, i])``, so results do not depend on chunking order.
    """
    if samples < 1000:
        raise ValueError("samples must be at least 1000")
    if isinstance(D, (Ellipsoid, Box)):
        D = D.as_oracle() if isinstance(D, Ellipsoid) else _box_oracle(D)
    g = np.array([to_float(parse_scalar(x)) for x in gamma_star])
    U = orthonormal_complement(S)
    k = U.shape[1]
    t_lo, t_hi = _fiber_box(D, g, U)
    widths = t_hi - t_lo
    if k == 0:
        return (1.0, 0.0) if float(D.level(g.reshape(1, -1))[0]) < 0 else (0.0, 0.0)
    if np.any(widths <= 0):
        return 0.0, 0.0
    box_vol = float(np.prod(widths))
    hits = 0
    done = 0
    i = 0
    while done < samples:
        m = min(chunk, samples - done)
        rng = np.random.default_rng(np.random.SeedSequence([seed, i]))
        t = t_lo + rng.random((m, k)) * widths
        pts = g + t @ U.T
        hits += int(np.count_nonzero(D.level(pts) < 0))
        done += m
        i += 1
    p = hits / samples
    return box_vol * p, box_vol * math.sqrt(p * (1 - p) / samples)


def _box_oracle(B: Box) -> OracleDomain:
    lo = np.array([float(x) for x in B.lower])
    hi = np.array([float(x) for x in B.upper])
    mid, half = (lo + hi) / 2, (hi - lo) / 2

    def level(pts):
        return np.max(np.abs(np.atleast_2d(pts) - mid) / half, axis=1) - 1.0

    return OracleDomain(level, B, smooth=False, slicewise_strictly_convex=False)


def slice_volume(D, gamma_star, S: SubspaceData, samples: int = 10**6, seed: int = 0) -> tuple[float, float]:
    """(volume, stderr); the error is zero for the exact domain types."""
    if isinstance(D, Ellipsoid):
        return slice_volume_ellipsoid(D, gamma_star, S), 0.0
    if isinstance(D, Box):
        return slice_volume_box(D, gamma_star, S), 0.0
    return slice_volume_mc(D, gamma_star, S, samples=samples, seed=seed)


# -- JSON ----------------------------------------------------------------------

def domain_from_json(obj: dict):
    kind = obj.get("type")
    if kind == "ellipsoid":
        return Ellipsoid(tuple(parse_scalar(x) for x in obj["center"]),
                         tuple(tuple(parse_rational(x) for x in row) for row in obj["shape"]))
    if kind == "ball":
        return ball([parse_scalar(x) for x in obj["center"]], parse_rational(obj["radius_sq"]))
    if kind == "box":
        return Box(tuple(parse_rational(x) for x in obj["lower"]), tuple(parse_rational(x) for x in obj["upper"]))
    if kind == "superellipsoid":
        return superellipsoid([parse_rational(x) for x in obj["center"]],
                              [parse_rational(x) for x in obj["radii"]],
                              int(obj.get("power", 4)), float(obj.get("tol", DEFAULT_TOLERANCE)))
    raise ValueError(f"unknown domain type {kind!r}")


def domain_to_json(D) -> dict:
    if isinstance(D, Ellipsoid):
        return {"type": "ellipsoid", "center": [str(c) for c in D.center],
                "shape": [[format_rational(x) for x in row] for row in D.shape]}
    if isinstance(D, Box):
        return {"type": "box", "lower": [format_rational(x) for x in D.lower],
                "upper": [format_rational(x) for x in D.upper]}
    if isinstance(D, OracleDomain) and D.spec is not None:
        return dict(D.spec)
    raise ValueError("domain has no JSON form")
