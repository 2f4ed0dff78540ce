"""Spectrum of the magnetic Laplacian H_eps on the flat torus R^n / Z^n.

For the metric g_eps = g_F + eps^{-2} g_H and constant potential A the
eigenvalues are lambda_k = (2 pi)^2 (|pi_F(k - A)|^2 + eps^2 |pi_H(k - A)|^2),
k in Z^n.  Energies are passed as mu = lambda / (4 pi^2), which keeps every
comparison rational (or in Q(sqrt(d))) and therefore exact.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from . import _linalg as la
from .counting import BudgetExceeded, DEFAULT_BUDGET, t_eps_inverse
from .domains import Ellipsoid, ball, unit_ball_volume
from .exact import QuadScalar, as_fraction, sign_parts, to_float
from .lattice import SubspaceData

__all__ = [
    "SpectralConfig",
    "metric_matrix",
    "eigenvalue",
    "counting_function",
    "spectral_leading_term",
    "spectral_ball",
    "unit_ball_volume",
]

FOUR_PI_SQ = 4 * math.pi ** 2


@dataclass(frozen=True)
class SpectralConfig:
    subspace: SubspaceData
    A: tuple[Fraction, ...]
    eps: Fraction
    mu: Fraction

    def __post_init__(self):
        A = tuple(as_fraction(a) for a in self.A)
        if len(A) != self.subspace.n:
            raise ValueError("A must have length n")
        eps, mu = as_fraction(self.eps), as_fraction(self.mu)
        if eps <= 0:
            raise ValueError("eps must be positive")
        if mu < 0:
            raise ValueError("mu must be nonnegative")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "mu", mu)

    @property
    def lam(self) -> float:
        return FOUR_PI_SQ * float(self.mu)


def metric_matrix(S: SubspaceData, eps) -> list[list]:
    """Inverse metric g_eps^{-1} = P_F + eps^2 (I - P_F)."""
    e2 = as_fraction(eps) ** 2
    n = S.n
    return [[(e2 if i == j else 0) + (1 - e2) * S.proj_F[i][j] for j in range(n)] for i in range(n)]


def _norm_sq(k, cfg: SpectralConfig):
    x = [Fraction(ki) - a for ki, a in zip(k, cfg.A)]
    G = metric_matrix(cfg.subspace, cfg.eps)
    return la.dot(x, la.matvec(G, x))


def eigenvalue(k, cfg: SpectralConfig) -> float:
    """lambda_k = (2 pi)^2 ||k - A||^2 in the inverse metric."""
    if len(k) != cfg.subspace.n:
        raise ValueError("dimension mismatch")
    return FOUR_PI_SQ * to_float(_norm_sq(k, cfg))


def _scaled_int_matrix(G):
    parts = [(x.a, x.b) if isinstance(x, QuadScalar) else (Fraction(x), Fraction(0)) for row in G for x in row]
    den = la.common_denominator([v for pair in parts for v in pair])
    n = len(G)
    g0 = [[int(parts[i * n + j][0] * den) for j in range(n)] for i in range(n)]
    g1 = [[int(parts[i * n + j][1] * den) for j in range(n)] for i in range(n)]
    return g0, g1, den


def _quad(M, x):
    return sum(M[i][j] * x[i] * x[j] for i in range(len(x)) for j in range(len(x)) if M[i][j])


def counting_function(cfg: SpectralConfig, budget: int = DEFAULT_BUDGET) -> int:
    """N_eps(4 pi^2 mu) = #{k in Z^n : lambda_k < 4 pi^2 mu}, exactly.

    Enumerates the box around A given by the diagonal of the metric
    g_eps = P_F + eps^{-2} P_H and decides each strict inequality in
    integer arithmetic.
    """
    S = cfg.subspace
    n = S.n
    G = metric_matrix(S, cfg.eps)
    e2inv = 1 / cfg.eps ** 2
    # diagonal of g_eps = e^{-2} I + (1 - e^{-2}) P_F bounds each coordinate of k - A
    ginv_diag = [to_float(e2inv + (1 - e2inv) * S.proj_F[i][i]) for i in range(n)]
    mu = float(cfg.mu)
    lo, hi = [], []
    for a, gii in zip(cfg.A, ginv_diag):
        w = math.sqrt(max(mu * gii, 0.0))
        slack = 1e-7 * (1 + abs(float(a)) + w)
        lo.append(math.floor(float(a) - w - slack))
        hi.append(math.ceil(float(a) + w + slack))
    candidates = math.prod(b - a + 1 for a, b in zip(lo, hi))
    if candidates > budget:
        raise BudgetExceeded(candidates, budget)

    g0, g1, dg = _scaled_int_matrix(G)
    da = la.common_denominator(cfg.A)
    shift = [int(a * da) for a in cfg.A]
    mn, md = cfg.mu.numerator, cfg.mu.denominator
    rhs = mn * dg * da * da
    d = S.d
    total = 0
    for k in itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi))):
        X = [da * ki - s for ki, s in zip(k, shift)]
        alpha = md * _quad(g0, X) - rhs
        beta = md * _quad(g1, X)
        if sign_parts(alpha, beta, d) < 0:
            total += 1
    return total


def spectral_leading_term(cfg: SpectralConfig) -> float:
    """eps^{-q} omega_{n-r} / |Q| * sum over gamma* of (mu - |gamma* - pi_V(A)|^2)_+^{(n-r)/2}.

    The distance is measured to pi_V(A), the foot of A on V; for A in V this
    is |gamma* - A|.
    """
    S = cfg.subspace
    n, r = S.n, S.r
    m = n - r
    A = list(cfg.A)
    if r:
        B = [[Fraction(x) for x in v] for v in S.gamma.basis]
        pairing = [la.dot(A, l) for l in B]
        radius = math.sqrt(float(cfg.mu))
        ranges = []
        for pa, l in zip(pairing, B):
            w = radius * math.sqrt(float(la.dot(l, l)))
            ranges.append(range(math.floor(float(pa) - w) - 1, math.ceil(float(pa) + w) + 2))
        # pi_V(A) in the dual basis has coefficients <A, l_j>
        gram = _dual_gram(S)
        total = 0.0
        for coords in itertools.product(*ranges):
            diff = [Fraction(c) - pa for c, pa in zip(coords, pairing)]
            dist2 = la.dot(diff, la.matvec(gram, diff))
            gap = cfg.mu - dist2
            if gap > 0:
                total += float(gap) ** (m / 2)
    else:
        total = float(cfg.mu) ** (m / 2) if cfg.mu > 0 else 0.0
    scale = float(1 / cfg.eps ** S.q)
    return total * unit_ball_volume(m) / math.sqrt(S.covolume_sq) * scale


def _dual_gram(S: SubspaceData):
    return la.gram([list(v) for v in S.gamma_star.basis])


def spectral_ball(cfg: SpectralConfig) -> Ellipsoid:
    """The ball B whose dilation T_eps(B) is the ellipsoid A + T_eps(B_sqrt(mu)(0)).

    Its center is T_eps^{-1}(A), which equals A whenever A lies in F, so
    count_points(spectral_ball(cfg), S, eps) == counting_function(cfg).
    """
    if cfg.mu <= 0:
        raise ValueError("ball needs mu > 0")
    center = t_eps_inverse(list(cfg.A), cfg.eps, cfg.subspace) if cfg.subspace.p else list(cfg.A)
    return ball(center, cfg.mu)
