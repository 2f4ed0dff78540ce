import itertools
import math
from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings, strategies as st

from anisolattice.counting import count_points
from anisolattice.domains import ball
from anisolattice.exact import parse_scalar
from anisolattice.lattice import build_subspace
from anisolattice.spectral import (SpectralConfig, counting_function, eigenvalue, metric_matrix,
                                   spectral_ball, spectral_leading_term, unit_ball_volume)

FOUR_PI_SQ = 4 * math.pi ** 2
X_AXIS = build_subspace([[1, 0]], 2)
RATIONAL = build_subspace([[1, Fr(1, 2)]], 2)
IRRATIONAL = build_subspace([[1, parse_scalar("sqrt(2)")]], 2)


def brute_force_count(S, A, eps, mu, reach):
    """#{k : lambda_k < 4 pi^2 mu} from float eigenvalues, away from ties."""
    lam = FOUR_PI_SQ * float(mu)
    total = 0
    cfg = SpectralConfig(S, tuple(A), eps, mu)
    for k in itertools.product(range(-reach, reach + 1), repeat=S.n):
        value = eigenvalue(k, cfg)
        assert abs(value - lam) > 1e-9 * lam, "tie: pick another mu"
        total += value < lam
    return total


def test_eigenvalue_examples():
    cfg = SpectralConfig(X_AXIS, (0, 0), Fr(1, 2), 1)
    assert math.isclose(eigenvalue((1, 0), cfg), FOUR_PI_SQ)
    assert math.isclose(eigenvalue((0, 1), cfg), FOUR_PI_SQ / 4)
    assert eigenvalue((3, -2), SpectralConfig(X_AXIS, (3, -2), Fr(1, 3), 1)) == 0


def test_metric_is_identity_at_eps_one():
    G = metric_matrix(IRRATIONAL, 1)
    assert G == [[1, 0], [0, 1]]


def test_counting_examples():
    assert counting_function(SpectralConfig(X_AXIS, (0, 0), Fr(1, 2), 1)) == 3
    assert counting_function(SpectralConfig(X_AXIS, (0, 0), Fr(1, 2), 0)) == 0
    # zero mode with lambda = mu = 0 is not strictly below
    assert counting_function(SpectralConfig(RATIONAL, (1, 1), Fr(1, 5), 0)) == 0


@pytest.mark.parametrize("S", [X_AXIS, RATIONAL, IRRATIONAL])
@pytest.mark.parametrize("A", [(0, 0), (Fr(1, 3), Fr(-1, 7))])
def test_counting_matches_float_enumeration(S, A):
    for eps, mu in [(Fr(1, 2), Fr(7, 3)), (Fr(1, 5), Fr(11, 7))]:
        assert counting_function(SpectralConfig(S, A, eps, mu)) == brute_force_count(S, A, eps, mu, reach=12)


@settings(max_examples=25, deadline=None)
@given(st.integers(-3, 3), st.integers(-3, 3), st.sampled_from([RATIONAL, IRRATIONAL]))
def test_gauge_periodicity(a, b, S):
    A = (Fr(1, 3), Fr(1, 4))
    base = SpectralConfig(S, A, Fr(1, 4), Fr(5, 2))
    shifted = SpectralConfig(S, (A[0] + a, A[1] + b), Fr(1, 4), Fr(5, 2))
    assert counting_function(base) == counting_function(shifted)


def test_monotone_in_mu():
    values = [counting_function(SpectralConfig(IRRATIONAL, (Fr(1, 2), 0), Fr(1, 4), Fr(m, 4))) for m in range(0, 30)]
    assert values == sorted(values)


@pytest.mark.parametrize("S", [X_AXIS, RATIONAL, IRRATIONAL, build_subspace([[1, 2, 0], [0, 0, 1]], 3)])
def test_equivalence_with_lattice_count(S):
    for A in ([0] * S.n, [Fr(1, 2)] + [0] * (S.n - 1), [Fr(2, 3)] * S.n):
        for eps in (Fr(1, 2), Fr(1, 6)):
            cfg = SpectralConfig(S, tuple(A), eps, Fr(9, 4))
            assert counting_function(cfg) == count_points(spectral_ball(cfg), S, eps).total


def test_ball_center_is_A_when_A_lies_in_F():
    cfg = SpectralConfig(RATIONAL, (2, 1), Fr(1, 8), Fr(5, 2))
    assert spectral_ball(cfg).center == (2, 1)
    assert counting_function(cfg) == count_points(ball([2, 1], Fr(5, 2)), RATIONAL, Fr(1, 8)).total


def test_off_F_potential_needs_dilated_center():
    """With A off F the ball around A itself does not describe the spectrum."""
    cfg = SpectralConfig(RATIONAL, (Fr(1, 2), 0), Fr(1, 8), Fr(5, 2))
    assert counting_function(cfg) == count_points(spectral_ball(cfg), RATIONAL, cfg.eps).total == 64
    assert count_points(ball([Fr(1, 2), 0], Fr(5, 2)), RATIONAL, cfg.eps).total == 63


def test_leading_term_examples():
    assert spectral_leading_term(SpectralConfig(X_AXIS, (0, 0), Fr(1, 2), 1)) == 4.0
    for eps in (Fr(1, 2), Fr(1, 8)):
        value = spectral_leading_term(SpectralConfig(IRRATIONAL, (0, 0), eps, 1))
        assert math.isclose(value, math.pi / float(eps))
    # trivial Gamma with A off the origin: the term does not depend on A
    a = spectral_leading_term(SpectralConfig(IRRATIONAL, (Fr(1, 2), 0), Fr(1, 4), 1))
    assert math.isclose(a, 4 * math.pi)


def test_leading_term_approaches_count():
    cfg = SpectralConfig(RATIONAL, (Fr(1, 3), 0), Fr(1, 64), Fr(3, 2))
    assert abs(counting_function(cfg) - spectral_leading_term(cfg)) < 0.05 * spectral_leading_term(cfg)


def test_unit_ball_volume_reexport():
    assert unit_ball_volume(1) == 2
    assert math.isclose(unit_ball_volume(3), 4 * math.pi / 3)


def test_config_validation():
    with pytest.raises(ValueError):
        SpectralConfig(X_AXIS, (0, 0), 0, 1)
    with pytest.raises(ValueError):
        SpectralConfig(X_AXIS, (0, 0), Fr(1, 2), -1)
    with pytest.raises(ValueError):
        SpectralConfig(X_AXIS, (0,), Fr(1, 2), 1)
